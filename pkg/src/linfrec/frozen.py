"""Frozen calibration constants.

The recovery guarantees hold up to unspecified universal constants.  Each
constant below was fixed by a one-time Monte Carlo sweep over the reference
Gaussian configurations (scripts/calibrate_constants.py reproduces the sweep
and prints the observed quantiles; the committed run used 100 trials at seed
20260811).  Constants are set with ample headroom above the observed 95th
percentile so the pass-rate gates test the algorithm, not seed luck.  Tests
and the harness treat these as part of the contract; do not tune them per run.
"""

# Oblivious three-phase recovery: sup-norm error <= C * r at the reference
# configuration d=4000, k=10, n=3*ceil(10 k ln d), r = ||X^T xi||_inf sqrt(ln n).
# Observed error/r: p95 = 1.30, max = 1.58.
OBLIVIOUS_ERROR_CONSTANT = 20.0

# Holdout reduction: error <= C' * ||X^T xi||_inf * sqrt(ln n * ln(R/r)) with
# r deliberately set two decades below the noise scale.
# Observed error/scale: p95 = 2.26, max = 2.66.
REDUCTION_ERROR_CONSTANT = 4.0

# Masked-query pipeline: sup-norm error <= C'' * sigma * sqrt(ln d) at the
# reference configuration d=2000, k=16.
# Observed error/(sigma sqrt(ln d)): p95 = 0.99, max = 1.18.
PARTIAL_ADAPTIVE_ERROR_CONSTANT = 3.0

# Masking construction: median of ||v||_inf / ||X^T X v||_inf over seeds is at
# least this multiple of k/sqrt(n) at the reference point k=40, n=100, |S|=k/2.
MASKING_MEDIAN_CONSTANT = 0.1

# Error-metric chain, Gaussian design, delta = 0.01:
# upper: ||X_{S:}^T xi||_inf <= A * ||xi||_2 * sqrt(ln(k/delta) / n)
# lower: ||X_{S:}^T xi||_inf >= a * ||xi||_2 / sqrt(n)  (k >= 16)
# Observed A needed: p95 = 1.09, max = 1.17; a needed: p05 = 1.07, min = 0.79.
METRIC_CHAIN_DELTA = 0.01
METRIC_CHAIN_UPPER_A = 2.5
METRIC_CHAIN_LOWER_A = 0.5
