"""Quadrature/finite-difference cross-checks of the factorized fiber.

Everything here evaluates basis functions pointwise and integrates over the
enlarged cell; none of it uses the displacement recursion or the
clock-shift form of ``U``.
"""

from __future__ import annotations

import numpy as np

from .lattice import FluxSpec
from .lll import LLLBasis, build_lll_basis
from .potential import FourierPotential
from .quadrature import (
    apply_hamiltonian_fd,
    apply_ladder_fd,
    cell_grid,
    fd_step,
    quad_matrix,
)


def _extent(flux: FluxSpec) -> float:
    return float(np.linalg.norm(flux.Etilde1) + np.linalg.norm(flux.Etilde2))


def _levels(basis: LLLBasis, M: int):
    P = basis.P

    def f(x1, x2):
        return basis.evaluate_levels(M, x1, x2).reshape((M + 1) * P, -1)

    return f


def oracle_basis(flux: FluxSpec, k, M: int) -> LLLBasis:
    """Basis whose truncation is certified up to level ``M + 2``."""
    return build_lll_basis(flux, k, mmax=M + 2)


def quadrature_gram(basis: LLLBasis, M: int, tol: float = 1e-11) -> np.ndarray:
    f = _levels(basis, M)
    return quad_matrix(f, f, basis.flux, tol=tol).value


def quadrature_coupling(basis: LLLBasis, V: FourierPotential, M: int, tol: float = 1e-11) -> np.ndarray:
    """``<psi^(m')_j', V psi^(m)_j>`` by direct quadrature."""
    f = _levels(basis, M)
    W = V.vectors
    c = V.coeffs

    def g(x1, x2):
        phase = np.exp(1j * (np.outer(x1, W[:, 0]) + np.outer(x2, W[:, 1]))) @ c if len(V) else 0.0 * x1
        return f(x1, x2) * phase[None, :]

    return quad_matrix(f, g, basis.flux, tol=tol).value


def quadrature_plane_wave(basis: LLLBasis, Y, M: int, tol: float = 1e-11) -> np.ndarray:
    """``<psi^(m')_j', e^{i(Y,x)} psi^(m)_j>`` by direct quadrature."""
    Y = np.asarray(Y, dtype=float)
    f = _levels(basis, M)
    return quad_matrix(
        f, lambda x1, x2: f(x1, x2) * np.exp(1j * (Y[0] * x1 + Y[1] * x2))[None, :], basis.flux, tol=tol
    ).value


def quadrature_complex_fiber(basis: LLLBasis, V: FourierPotential, zeta: complex, M: int,
                             lower: bool = True, tol: float = 1e-9) -> np.ndarray:
    """Matrix of ``H_B(k + (zeta/2) e1 +/- i (zeta/2) e2) + V`` from finite differences and quadrature."""
    flux = basis.flux
    sign = 1.0 if lower else -1.0
    kc = basis.k.astype(complex) + np.array([zeta / 2, sign * 1j * zeta / 2])
    h = fd_step(flux.B, M, _extent(flux))
    f = _levels(basis, M)
    W = V.vectors

    def Hf(x1, x2):
        vals = apply_hamiltonian_fd(lambda a, b: f(a, b), flux, kc, x1, x2, h)
        if len(V):
            vals = vals + f(x1, x2) * (np.exp(1j * (np.outer(x1, W[:, 0]) + np.outer(x2, W[:, 1]))) @ V.coeffs)[None, :]
        return vals

    return quad_matrix(f, Hf, flux, tol=tol).value


def ladder_residuals(basis: LLLBasis, mmax: int, tol: float = 1e-12):
    """Quadrature norms of ``Z_+ psi^(m) - sqrt(2B(m+1)) psi^(m+1)`` and
    ``Z_- psi^(m) - sqrt(2Bm) psi^(m-1)``, worst over ``j`` and ``m <= mmax``.

    Returns
    -------
    dict with keys ``raise``, ``lower`` (lists indexed by m) and ``annihilate``.
    """
    flux = basis.flux
    B = flux.B
    k = basis.k
    out = {"raise": [], "lower": []}
    for m in range(mmax + 1):
        h = fd_step(B, m + 1, _extent(flux))

        def psi(x1, x2, m=m):
            return basis.evaluate(m, x1, x2)

        def r_up(x1, x2, m=m):
            return apply_ladder_fd(psi, flux, k, x1, x2, h, raising=True) - np.sqrt(2 * B * (m + 1)) * basis.evaluate(m + 1, x1, x2)

        def r_down(x1, x2, m=m):
            z = apply_ladder_fd(psi, flux, k, x1, x2, h, raising=False)
            if m == 0:
                return z
            return z - np.sqrt(2 * B * m) * basis.evaluate(m - 1, x1, x2)

        for key, r in (("raise", r_up), ("lower", r_down)):
            g = quad_matrix(r, r, flux, tol=tol * 1e-2, n_start=16).value
            out[key].append(float(np.sqrt(np.max(np.abs(np.diag(g))))))
    out["annihilate"] = out["lower"][0]
    return out


def quasiperiodicity_residual(basis: LLLBasis, m: int = 0, n: int = 12) -> float:
    """``max |psi(x + Et) - e^{i B Et_1 x2} psi(x)| / max |psi|`` on a grid."""
    flux = basis.flux
    x1, x2, _ = cell_grid(flux, n)
    v0 = basis.evaluate(m, x1, x2)
    scale = float(np.max(np.abs(v0)))
    worst = 0.0
    for Et in (flux.Etilde1, flux.Etilde2):
        v1 = basis.evaluate(m, x1 + Et[0], x2 + Et[1])
        worst = max(worst, float(np.max(np.abs(v1 - np.exp(1j * flux.B * Et[0] * x2) * v0))))
    return worst / scale


def sup_norm_ratio(basis: LLLBasis, n: int = 96) -> float:
    """Empirical ``max_j ||psi_j||_inf / ||psi_j||`` over the enlarged cell.

    ``|psi|`` is periodic with respect to the enlarged lattice, so the cell
    supremum is the global one.
    """
    x1, x2, w = cell_grid(basis.flux, n)
    vals = basis.evaluate(0, x1, x2)
    norms = np.sqrt(w * np.sum(np.abs(vals) ** 2, axis=1))
    return float(np.max(np.max(np.abs(vals), axis=1) / norms))
