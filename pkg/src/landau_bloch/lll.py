"""Lowest-Landau-level magnetic Bloch functions.

With ``Et1 = (a, 0)``, ``Et2 = (alpha, beta)`` and quasimomentum ``k``, the
kernel of ``Z_-(k)`` inside the quasiperiodic space is spanned by

    psi_j(x) = N * sum_s d_j(s) * h_{j+sP}(x),          j = 0..P-1,

    h_n(x) = exp(-i k2 x2 + i (2 pi n / a) x1 + i B x1 x2 - (B/2) (x2 + q_n/B)^2),
    q_n = k1 + 2 pi n / a.

Each ``h_n`` is annihilated by ``Z_-(k)`` exactly.  The x1-quasiperiodicity
holds term by term; the x2-direction condition fixes the unimodular
coefficients ``d_j(s)`` through a P-step recursion with closed form

    d_j(s) = exp(i [ (2 pi alpha / a) (s j + P s (s-1) / 2) + s (B alpha beta - k2 beta) ]).

Raising to level m multiplies each term by a normalized Hermite function
of ``u = sqrt(B) (x2 + q_n/B)``.  The normalization ``N = (a sqrt(pi/B))^{-1/2}``
makes the P functions orthonormal over the enlarged cell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import TruncationError
from .lattice import TWO_PI, FluxSpec

TAIL_TOL = 1e-12


def hermite_functions(mmax: int, u: np.ndarray) -> np.ndarray:
    """``H_m(u) exp(-u^2/2) / sqrt(2^m m!)`` for ``m = 0..mmax``, stacked on axis 0."""
    u = np.asarray(u, dtype=float)
    out = np.empty((mmax + 1,) + u.shape)
    out[0] = np.exp(-0.5 * u * u)
    if mmax >= 1:
        out[1] = math.sqrt(2.0) * u * out[0]
    for m in range(1, mmax):
        out[m + 1] = math.sqrt(2.0 / (m + 1)) * u * out[m] - math.sqrt(m / (m + 1)) * out[m - 1]
    return out


def _geometry(flux: FluxSpec):
    a = float(flux.Etilde1[0])
    alpha, beta = (float(v) for v in flux.Etilde2)
    return a, alpha, beta


def _tail_bound(B: float, beta: float, L: int, mmax: int) -> float:
    # evaluation region x2 in [-beta, 2 beta]; retained centres cover about
    # L cells either side of the middle of the cell
    D = (L - 2) * beta
    if D <= 0:
        return math.inf
    dist = D + beta * np.arange(40)
    g = hermite_functions(mmax, math.sqrt(B) * dist)
    return float(2.0 * np.max(np.sum(np.abs(g), axis=1)))


def default_truncation(flux: FluxSpec, mmax: int = 0) -> int:
    """Smallest half-width ``L`` whose dropped tail is below ``TAIL_TOL`` up to level ``mmax``."""
    a, alpha, beta = _geometry(flux)
    L = 3
    while _tail_bound(flux.B, beta, L, mmax) > 0.1 * TAIL_TOL:
        L += 1
    return L


@dataclass(frozen=True, eq=False)
class LLLBasis:
    """Gaussian-sum representation of an orthonormal LLL basis at quasimomentum ``k``.

    Attributes
    ----------
    n_index : ndarray of int, shape (P, 2L+1)
        Term indices ``n = j + s P`` retained for each ``j``.
    s_index : ndarray of int, shape (P, 2L+1)
    coeffs : ndarray of complex, shape (P, 2L+1)
        ``N * d_j(s)``.
    mmax : int
        Highest Landau level for which the truncation tail was certified.
    """

    flux: FluxSpec
    k: np.ndarray
    L: int
    n_index: np.ndarray
    s_index: np.ndarray
    coeffs: np.ndarray
    norm: float
    tail: float
    mmax: int

    @property
    def P(self) -> int:
        return self.flux.P

    def phase(self, j: int, s):
        """Unnormalized coefficient ``d_j(s)`` (any integer ``s``)."""
        return np.exp(1j * _phase_exponent(self.flux, self.k, j, np.asarray(s)))

    def evaluate(self, m: int, x1, x2) -> np.ndarray:
        """Values of ``psi^(m)_j`` for all ``j``; shape ``(P,) + broadcast(x1, x2).shape``."""
        return self.evaluate_levels(m, x1, x2)[m]

    def evaluate_levels(self, mmax: int, x1, x2) -> np.ndarray:
        """``psi^(m)_j`` for ``m = 0..mmax``; shape ``(mmax+1, P) + shape``."""
        flux = self.flux
        B = flux.B
        a, alpha, beta = _geometry(flux)
        x1, x2 = np.broadcast_arrays(np.asarray(x1, float), np.asarray(x2, float))
        shape = x1.shape
        x1 = x1.ravel()
        x2 = x2.ravel()
        common = np.exp(1j * (-self.k[1] * x2 + B * x1 * x2))
        out = np.zeros((mmax + 1, self.P, x1.size), dtype=complex)
        sqB = math.sqrt(B)
        for j in range(self.P):
            n = self.n_index[j]
            q = self.k[0] + TWO_PI * n / a
            u = sqB * (x2[None, :] + q[:, None] / B)
            herm = hermite_functions(mmax, u)  # (mmax+1, terms, pts)
            wave = np.exp(1j * (TWO_PI / a) * n[:, None] * x1[None, :]) * self.coeffs[j][:, None]
            out[:, j, :] = np.einsum("mtp,tp->mp", herm, wave) * common[None, :]
        return out.reshape((mmax + 1, self.P) + shape)


def _phase_exponent(flux: FluxSpec, k, j, s):
    a, alpha, beta = _geometry(flux)
    P = flux.P
    B = flux.B
    s = np.asarray(s, dtype=float)
    return (TWO_PI * alpha / a) * (s * j + P * s * (s - 1) / 2) + s * (B * alpha * beta - k[1] * beta)


def build_lll_basis(flux: FluxSpec, k, L: int | None = None, mmax: int = 0) -> LLLBasis:
    """Orthonormal LLL basis at quasimomentum ``k``.

    Parameters
    ----------
    L : int, optional
        Half-width of the Gaussian sum per function.  Chosen automatically
        from ``mmax`` when omitted.
    mmax : int
        Highest Landau level that will be evaluated from this basis; the
        truncation tail is certified up to it.

    Raises
    ------
    TruncationError
        If the dropped tail exceeds 1e-12 of the retained mass.
    """
    k = np.asarray(k, dtype=float).reshape(2)
    if L is None:
        L = default_truncation(flux, mmax)
    a, alpha, beta = _geometry(flux)
    B = flux.B
    P = flux.P
    tail = _tail_bound(B, beta, L, mmax)
    if tail > TAIL_TOL:
        raise TruncationError(
            f"Gaussian-sum half-width L={L} leaves a tail of {tail:.2e} (> {TAIL_TOL:g}); "
            f"use L >= {default_truncation(flux, mmax)}"
        )
    norm = (a * math.sqrt(math.pi / B)) ** -0.5
    n_index = np.empty((P, 2 * L + 1), dtype=np.int64)
    s_index = np.empty_like(n_index)
    coeffs = np.empty((P, 2 * L + 1), dtype=complex)
    for j in range(P):
        # centre of term s sits at x2 = -(k1 + 2 pi j / a)/B - s*beta; keep
        # the window around the middle of the cell
        c0 = -(k[0] + TWO_PI * j / a) / B
        s0 = int(round((c0 - 0.5 * beta) / beta))
        s = np.arange(s0 - L, s0 + L + 1)
        s_index[j] = s
        n_index[j] = j + s * P
        coeffs[j] = norm * np.exp(1j * _phase_exponent(flux, k, j, s))
    return LLLBasis(flux, k, L, n_index, s_index, coeffs, norm, tail, mmax)
