"""Coefficient-space ladder algebra.

Coefficient vectors are indexed by ``(m, j) -> m*P + j`` with Landau level
``m = 0..M`` and LLL index ``j = 0..P-1``.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.sparse as sp
from scipy.special import eval_genlaguerre, gammaln

from .lattice import FluxSpec


def _level_shift(M: int, P: int, values: np.ndarray, up: bool) -> sp.csr_matrix:
    """Block-shift matrix moving block ``m`` to ``m +/- 1`` with factor ``values[m]``."""
    N = P * (M + 1)
    rows, cols, data = [], [], []
    for m, v in enumerate(values):
        target = m + 1 if up else m - 1
        if v == 0 or not 0 <= target <= M:
            continue
        for j in range(P):
            rows.append(target * P + j)
            cols.append(m * P + j)
            data.append(v)
    return sp.csr_matrix((data, (rows, cols)), shape=(N, N))


def ladder_matrices(flux: FluxSpec, M: int):
    """Sparse ``(Zp, Zm, Zm_inv)`` on levels ``0..M``.

    ``Zm``: block m -> m-1 with ``sqrt(2Bm)``; ``Zp``: m -> m+1 with
    ``sqrt(2B(m+1))`` (truncated at M); ``Zm_inv``: m -> m+1 with
    ``(2B(m+1))^{-1/2}``, a right inverse of ``Zm`` on blocks ``0..M-1``.
    """
    if M < 1:
        raise ValueError("ladder matrices need M >= 1")
    B = flux.B
    P = flux.P
    m = np.arange(M + 1)
    Zm = _level_shift(M, P, np.sqrt(2 * B * m), up=False)
    Zp = _level_shift(M, P, np.sqrt(2 * B * (m + 1)), up=True)
    Zm_inv = _level_shift(M, P, 1.0 / np.sqrt(2 * B * (m + 1)), up=True)
    return Zp, Zm, Zm_inv


def displacement_parameter(Y, B: float) -> complex:
    """``(Y1 + i Y2) / sqrt(2B)``: the shift of ``Z_-/sqrt(2B)`` under conjugation by ``e^{i(Y,x)}``."""
    Y = np.asarray(Y, dtype=float)
    return complex(Y[0], Y[1]) / math.sqrt(2 * B)


def displacement_matrix(M: int, Y, B: float) -> np.ndarray:
    """``d_{m'm}(Y)`` for ``m', m = 0..M`` by the exact two-term recursion.

    Seeded at ``d_00 = exp(-|Y|^2/(4B))``; first column from
    ``sqrt(m'+1) d_{m'+1,0} = beta d_{m'0}``, then columns from
    ``sqrt(m+1) d_{m',m+1} = sqrt(m') d_{m'-1,m} - conj(beta) d_{m'm}``.
    """
    beta = displacement_parameter(Y, B)
    d = np.zeros((M + 1, M + 1), dtype=complex)
    d[0, 0] = math.exp(-0.5 * abs(beta) ** 2)
    for mp in range(M):
        d[mp + 1, 0] = beta * d[mp, 0] / math.sqrt(mp + 1)
    bc = np.conj(beta)
    sq = np.sqrt(np.arange(M + 1))
    for m in range(M):
        col = -bc * d[:, m]
        col[1:] += sq[1:] * d[:-1, m]
        d[:, m + 1] = col / math.sqrt(m + 1)
    return d


def displacement_coeff(mp: int, m: int, Y, B: float) -> complex:
    """Single coefficient ``d_{m'm}(Y)``."""
    if mp < 0 or m < 0:
        raise ValueError("Landau indices must be non-negative")
    return complex(displacement_matrix(max(mp, m), Y, B)[mp, m])


def displacement_laguerre(mp: int, m: int, Y, B: float) -> complex:
    """Closed form via associated Laguerre polynomials (independent check)."""
    beta = displacement_parameter(Y, B)
    t = abs(beta) ** 2
    lo, hi = min(mp, m), max(mp, m)
    mag = math.exp(-0.5 * t + 0.5 * (gammaln(lo + 1) - gammaln(hi + 1)))
    lag = eval_genlaguerre(lo, hi - lo, t)
    if mp >= m:
        return mag * beta ** (hi - lo) * lag
    return mag * (-np.conj(beta)) ** (hi - lo) * lag


def graded_norm(phi, n: int, flux: FluxSpec) -> float:
    """``||Phi||_{k,H^n_B} = ||Zp^n Phi||`` for a coefficient vector.

    ``Phi`` must vanish on blocks above ``M - n`` so the raise is exact.
    """
    phi = np.asarray(phi)
    P = flux.P
    if phi.size % P:
        raise ValueError("coefficient vector length is not a multiple of P")
    M = phi.size // P - 1
    if n < 0:
        raise ValueError("graded norm index must be >= 0")
    if n == 0:
        return float(np.linalg.norm(phi))
    if n > M or np.any(phi[(M - n + 1) * P:] != 0):
        raise ValueError(f"Phi has support above level M - n = {M - n}; the raise would be truncated")
    Zp, _, _ = ladder_matrices(flux, M)
    out = phi
    for _ in range(n):
        out = Zp @ out
    return float(np.linalg.norm(out))


def project_level(phi, m: int, P: int) -> np.ndarray:
    """Coefficient-space projector onto Landau level ``m``."""
    out = np.zeros_like(np.asarray(phi))
    out[m * P:(m + 1) * P] = phi[m * P:(m + 1) * P]
    return out
