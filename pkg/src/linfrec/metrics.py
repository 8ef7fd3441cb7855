"""Candidate sup-norm error metrics and their cross-comparison.

Five ways of measuring the noise scale of an instance, ordered as a chain:
the restricted least-squares image of the noise, its correlation with the
support columns, the correlation with all columns, and the plain l2 / sup
norms of the noise itself.  Under an oblivious Gaussian design the first two
agree to within a factor of 6; the norm comparisons at the tail of the chain
hold deterministically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import MeasurementMatrix, NoiseVector
from .linops import IndexSet, SolverFailure, restricted_ols

__all__ = ["MetricReport", "compute_metrics"]


@dataclass
class MetricReport:
    m_gram: float          # ||X^T xi||_inf over all columns
    m_gram_support: float  # ||X_{S:}^T xi||_inf
    m_ols: float | None    # ||[X^T X]^{-1}_{SxS} X_{S:}^T xi||_inf (None if singular)
    m_l2: float            # ||xi||_2 / sqrt(n)
    m_linf: float          # ||xi||_inf
    ratios: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)


def compute_metrics(
    x: MeasurementMatrix | np.ndarray,
    xi: NoiseVector | np.ndarray,
    s: IndexSet,
) -> MetricReport:
    data = x.data if isinstance(x, MeasurementMatrix) else np.asarray(x, dtype=np.float64)
    noise = xi.values if isinstance(xi, NoiseVector) else np.asarray(xi, dtype=np.float64)
    n = data.shape[0]
    if len(noise) != n:
        raise ValueError(f"noise length {len(noise)} != n {n}")
    corr = data.T @ noise
    m_gram = float(np.max(np.abs(corr), initial=0.0))
    m_gram_support = float(np.max(np.abs(corr[s.indices]), initial=0.0))
    diagnostics = {}
    try:
        w = restricted_ols(data, s, noise)
        m_ols = float(np.max(np.abs(w), initial=0.0))
    except SolverFailure as exc:
        m_ols = None
        diagnostics["ols_failure"] = str(exc)
    m_l2 = float(np.linalg.norm(noise) / math.sqrt(n))
    m_linf = float(np.max(np.abs(noise), initial=0.0))

    def _ratio(a, b):
        if a is None or b is None or b == 0.0:
            return None
        return a / b

    ratios = {
        "ols_over_support": _ratio(m_ols, m_gram_support),
        "support_over_l2": _ratio(m_gram_support, m_l2),
        "l2_over_linf": _ratio(m_l2 * math.sqrt(n), m_linf),  # ||xi||_2 / ||xi||_inf
    }
    return MetricReport(
        m_gram=m_gram,
        m_gram_support=m_gram_support,
        m_ols=m_ols,
        m_l2=m_l2,
        m_linf=m_linf,
        ratios=ratios,
        diagnostics=diagnostics,
    )
