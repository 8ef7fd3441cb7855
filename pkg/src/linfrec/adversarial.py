"""Adversarial constructions behind the quadratic sample-complexity barrier.

A masking vector is a sparse v whose sup norm is large while ``X^T X v`` has
unit sup norm; feeding ``xi = X v`` as noise perturbs the signal by v yet is
invisible in correlation space.  Pairing a base signal with its v-shifted
sibling yields two instances with byte-identical observations, which no
estimator can tell apart.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import (
    MeasurementMatrix,
    ModelTag,
    NoiseVector,
    RecoveryInstance,
    SparseVector,
    matrix_sha256,
    save_instance,
    save_matrix,
)
from .linops import IndexSet, restricted_gram

__all__ = [
    "ConstructionFailure",
    "IndistinguishablePair",
    "MaskingVector",
    "build_indistinguishable_pair",
    "build_masking_vector",
    "build_metric_impossibility_pair",
    "save_pair",
]

PAIR_RTOL = 1e-9


class ConstructionFailure(RuntimeError):
    pass


@dataclass
class MaskingVector:
    v: SparseVector
    linf_v: float
    linf_gram_v: float  # ||X^T X v||_inf before normalization
    normalized: bool


@dataclass
class IndistinguishablePair:
    theta1: SparseVector
    theta2: SparseVector
    xi1: NoiseVector
    xi2: NoiseVector
    shared_y: np.ndarray


def build_masking_vector(
    x: MeasurementMatrix | np.ndarray, s: IndexSet, normalize: bool = True
) -> MaskingVector:
    """Build v supported on S maximizing ||v||_inf per unit of ||X^T X v||_inf.

    With M the restricted Gram, the sign pattern u of the max-l1 row of
    M^{-1} attains ``max_{u in {-1,+1}^S} ||M^{-1} u||_inf`` exactly; take
    ``v_S = M^{-1} u`` and zero elsewhere.  Ties between rows go to the
    smaller index.  If ``normalize``, v is rescaled so ||X^T X v||_inf = 1.
    """
    data = x.data if isinstance(x, MeasurementMatrix) else np.asarray(x, dtype=np.float64)
    d = data.shape[1]
    m = restricted_gram(data, s)
    try:
        m_inv = np.linalg.inv(m)
    except np.linalg.LinAlgError as exc:
        raise ConstructionFailure(f"restricted Gram on |S|={len(s)} is singular") from exc
    if not np.all(np.isfinite(m_inv)):
        raise ConstructionFailure("restricted Gram inverse is not finite")

    row_l1 = np.abs(m_inv).sum(axis=1)
    pick = int(np.argmax(row_l1))  # first max: lexicographic tie-break
    u = np.sign(m_inv[pick])
    u[u == 0.0] = 1.0
    v_s = m_inv @ u

    v = np.zeros(d)
    v[s.indices] = v_s
    gram_v = data.T @ (data @ v)
    linf_gram = float(np.max(np.abs(gram_v)))
    if normalize:
        if linf_gram == 0.0:
            raise ConstructionFailure("cannot normalize: X^T X v vanished")
        v = v / linf_gram
    return MaskingVector(
        v=SparseVector.from_dense(v, budget=len(s)),
        linf_v=float(np.max(np.abs(v))),
        linf_gram_v=linf_gram,
        normalized=bool(normalize),
    )


def _check_shared(y1: np.ndarray, y2: np.ndarray) -> None:
    tol = PAIR_RTOL * (1.0 + float(np.max(np.abs(y1), initial=0.0)))
    if float(np.max(np.abs(y1 - y2), initial=0.0)) > tol:
        raise ConstructionFailure("pair members do not share an observation vector")


def build_indistinguishable_pair(
    x: MeasurementMatrix | np.ndarray,
    s: IndexSet,
    t: IndexSet,
    base_magnitude: float,
) -> IndistinguishablePair:
    """Two instances with identical (X, y): a base signal on T versus the same
    signal shifted by the masking vector on S, the shift absorbed into noise.

    ``s`` and ``t`` must be disjoint and equally sized (each half the sparsity
    budget of the instances being emulated).
    """
    data = x.data if isinstance(x, MeasurementMatrix) else np.asarray(x, dtype=np.float64)
    d = data.shape[1]
    if len(np.intersect1d(s.indices, t.indices)):
        raise ValueError("masking and base supports must be disjoint")
    if len(s) != len(t):
        raise ValueError(f"|S| = {len(s)} and |T| = {len(t)} must be equal (both k/2)")

    mv = build_masking_vector(data, s, normalize=True)
    budget = len(s) + len(t)

    theta_bar = np.zeros(d)
    theta_bar[t.indices] = float(base_magnitude)
    theta1 = SparseVector.from_dense(theta_bar, budget=budget)
    theta2 = SparseVector.from_dense(theta_bar + mv.v.values, budget=budget)
    xi1 = NoiseVector.adversarial(data @ mv.v.values)
    xi2 = NoiseVector.zero(data.shape[0])

    y1 = data @ theta1.values + xi1.values
    y2 = data @ theta2.values
    _check_shared(y1, y2)
    return IndistinguishablePair(theta1=theta1, theta2=theta2, xi1=xi1, xi2=xi2, shared_y=y1)


def build_metric_impossibility_pair(
    x: MeasurementMatrix | np.ndarray, i: int
) -> IndistinguishablePair:
    """The one-column pair: (0, X e_i) versus (e_i, 0), sharing y = column i.

    Demonstrates that noise-side error metrics (||xi||_inf, scaled ||xi||_2,
    restricted least-squares residuals) cannot be achieved under adaptive
    noise: both members force sup-norm estimation error 1/2 on some member
    while every such metric stays near zero.
    """
    data = x.data if isinstance(x, MeasurementMatrix) else np.asarray(x, dtype=np.float64)
    n, d = data.shape
    if not 0 <= i < d:
        raise ValueError(f"column index {i} out of range for d={d}")
    e_i = np.zeros(d)
    e_i[i] = 1.0
    theta1 = SparseVector.zeros(d, budget=1)
    theta2 = SparseVector.from_dense(e_i, budget=1)
    xi1 = NoiseVector.adversarial(data[:, i].copy())
    xi2 = NoiseVector.zero(n)
    y = data[:, i].copy()
    _check_shared(y, data @ theta2.values)
    return IndistinguishablePair(theta1=theta1, theta2=theta2, xi1=xi1, xi2=xi2, shared_y=y)


def save_pair(
    pair: IndistinguishablePair,
    x: MeasurementMatrix,
    out_dir: str | Path,
    stem: str = "pair",
) -> tuple[Path, Path, Path]:
    """Write the two instances as JSON sharing one content-addressed matrix file."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tmp = out_dir / f"{stem}-matrix.tmp"
    save_matrix(x, tmp)
    digest = matrix_sha256(tmp)
    matrix_path = out_dir / f"matrix-{digest[:16]}.bin"
    tmp.replace(matrix_path)

    inst1 = RecoveryInstance(
        x=x, y=pair.shared_y, truth=pair.theta1, noise=pair.xi1, model=ModelTag.ADAPTIVE
    )
    inst2 = RecoveryInstance(
        x=x, y=pair.shared_y, truth=pair.theta2, noise=pair.xi2, model=ModelTag.ADAPTIVE
    )
    p1 = out_dir / f"{stem}-member1.json"
    p2 = out_dir / f"{stem}-member2.json"
    save_instance(inst1, p1, matrix_path)
    save_instance(inst2, p2, matrix_path)
    return p1, p2, matrix_path
