"""Shared independent oracles for the test suite.

These deliberately avoid the library's own code paths: brute-force subset
enumeration, dense factorizations, power iteration, exhaustive sign search.
"""

from __future__ import annotations

import itertools

import numpy as np
import pytest


def power_iteration_norm(m: np.ndarray, iters: int = 400, seed: int = 0) -> float:
    """Spectral norm by power iteration on m^T m."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(m.shape[1])
    v /= np.linalg.norm(v)
    a = m.T @ m
    for _ in range(iters):
        v = a @ v
        nv = np.linalg.norm(v)
        if nv == 0.0:
            return 0.0
        v /= nv
    return float(np.sqrt(v @ (a @ v)))


def brute_force_linf_cert(g: np.ndarray, s: int) -> float:
    """Max over all subsets |S| <= s of the max-row-l1 norm of [g - I]_{SxS}."""
    d = g.shape[0]
    dev = g - np.eye(d)
    best = 0.0
    for size in range(1, min(s, d) + 1):
        for sub in itertools.combinations(range(d), size):
            idx = np.asarray(sub)
            block = dev[np.ix_(idx, idx)]
            best = max(best, float(np.max(np.abs(block).sum(axis=1))))
    return best


def brute_force_sign_max(m_inv: np.ndarray) -> float:
    """max over u in {-1,+1}^s of ||m_inv u||_inf by exhaustive search."""
    s = m_inv.shape[0]
    best = 0.0
    for bits in itertools.product((-1.0, 1.0), repeat=s):
        u = np.asarray(bits)
        best = max(best, float(np.max(np.abs(m_inv @ u))))
    return best


def orthonormal_columns(n: int, d: int, seed: int) -> np.ndarray:
    """n x d matrix with exactly orthonormal columns (n >= d)."""
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((n, d)))
    return q[:, :d]


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
