"""Fiber Hamiltonians ``H_B(k) + V`` in the Landau-level basis.

Matrix elements factorize as

    <psi^(m')_j', e^{i(Y,x)} psi^(m)_j> = d_{m'm}(Y) * U^(Y)(k)_{j'j},

with ``d`` the displacement coefficients of the ladder algebra and ``U`` the
unitary action on the lowest level.  For the Gaussian-sum basis ``U`` is a
clock-shift matrix: column ``j`` has a single entry, in row
``(j + n1 Q) mod P``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .lattice import TWO_PI, FluxSpec
from .ladder import displacement_matrix, ladder_matrices
from .lll import LLLBasis, build_lll_basis
from .potential import FourierPotential
from .quadrature import quad_matrix

UNITARITY_TOL = 1e-6
HERMITICITY_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class PhaseMatrix:
    U: np.ndarray
    unitarity_defect: float


@dataclass(frozen=True, eq=False)
class FiberMatrix:
    """Truncated fiber operator, index ``(m, j) -> m*P + j``."""

    flux: FluxSpec
    k: np.ndarray
    M: int
    entries: np.ndarray

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    def block(self, mp: int, m: int) -> np.ndarray:
        P = self.flux.P
        return self.entries[mp * P:(mp + 1) * P, m * P:(m + 1) * P]


def _analytic_phase_matrix(basis: LLLBasis, Y) -> np.ndarray:
    flux = basis.flux
    P, Q, B = flux.P, flux.Q, flux.B
    n1, _ = flux.lattice.fourier_index(Y)
    Yv = flux.lattice.fourier_vector(*flux.lattice.fourier_index(Y))
    a = float(flux.Etilde1[0])
    k1 = basis.k[0]
    U = np.zeros((P, P), dtype=complex)
    for j in range(P):
        target = j + n1 * Q
        jp = target % P
        sp_ = (target - jp) // P
        q_j = k1 + TWO_PI * j / a
        q_t = k1 + TWO_PI * target / a
        U[jp, j] = np.conj(basis.phase(jp, sp_)) * np.exp(-1j * Yv[1] * (q_j + q_t) / (2 * B))
    return U


def _quadrature_phase_matrix(basis: LLLBasis, Y, tol: float) -> np.ndarray:
    Y = np.asarray(Y, dtype=float)
    B = basis.flux.B
    res = quad_matrix(
        lambda x1, x2: basis.evaluate(0, x1, x2),
        lambda x1, x2: np.exp(1j * (Y[0] * x1 + Y[1] * x2)) * basis.evaluate(0, x1, x2),
        basis.flux,
        tol=tol,
    )
    return res.value * np.exp(Y @ Y / (4 * B))


def phase_matrix(basis: LLLBasis, Y, method: str = "analytic", tol: float = 1e-12) -> PhaseMatrix:
    """``U^(Y)(k)`` with ``(psi', e^{i(Y,x)} psi) = e^{-|Y|^2/(4B)} (psi', U psi)``.

    ``method='analytic'`` uses the closed-form clock-shift entries;
    ``method='quadrature'`` integrates ``T = <psi_j', e^{i(Y,x)} psi_j>`` over the
    enlarged cell and rescales.

    Raises
    ------
    NumericalError
        If ``||U^dagger U - I|| > 1e-6``.
    """
    basis.flux.lattice.fourier_index(Y)
    if method == "analytic":
        U = _analytic_phase_matrix(basis, Y)
    elif method == "quadrature":
        U = _quadrature_phase_matrix(basis, Y, tol)
    else:
        raise ValueError(f"unknown method {method!r}")
    defect = float(np.linalg.norm(U.conj().T @ U - np.eye(basis.P), 2))
    if defect > UNITARITY_TOL:
        raise NumericalError(
            f"U^(Y) unitarity defect {defect:.2e} exceeds {UNITARITY_TOL:g}; "
            "increase quadrature resolution or basis truncation"
        )
    return PhaseMatrix(U, defect)


class FiberAssembler:
    """Caches the k-independent displacement matrices of a potential.

    ``coupling(k)`` returns ``sum_Y V_Y d(Y) (x) U^(Y)(k)``; the fiber matrix
    adds the Landau diagonal ``(2m+1)B``.
    """

    def __init__(self, flux: FluxSpec, V: FourierPotential, M: int):
        if M < 0:
            raise ValueError("Landau cutoff M must be >= 0")
        if V.lattice is not flux.lattice:
            # same geometry is enough; object identity is not required
            if not (np.allclose(V.lattice.E1, flux.lattice.E1) and np.allclose(V.lattice.E2, flux.lattice.E2)):
                raise ValueError("potential and flux use different lattices")
        self.flux = flux
        self.V = V
        self.M = M
        B = flux.B
        self._terms = [
            (complex(c), Y, displacement_matrix(M, Y, B)) for c, Y in zip(V.coeffs, V.vectors)
        ]

    def basis(self, k) -> LLLBasis:
        return build_lll_basis(self.flux, k)

    def coupling(self, k, basis: LLLBasis | None = None) -> np.ndarray:
        if basis is None:
            basis = self.basis(k)
        P = self.flux.P
        N = P * (self.M + 1)
        H = np.zeros((N, N), dtype=complex)
        for c, Y, D in self._terms:
            U = _analytic_phase_matrix(basis, Y)
            H += c * np.kron(D, U)
        return H

    def landau_diagonal(self) -> np.ndarray:
        m = np.repeat(np.arange(self.M + 1), self.flux.P)
        return (2 * m + 1) * self.flux.B

    def matrix(self, k, basis: LLLBasis | None = None) -> FiberMatrix:
        k = np.asarray(k, dtype=float)
        H = self.coupling(k, basis)
        H[np.diag_indices_from(H)] += self.landau_diagonal()
        check_hermitian(H)
        return FiberMatrix(self.flux, k, self.M, H)


def check_hermitian(H: np.ndarray) -> float:
    scale = max(1.0, float(np.max(np.abs(H))))
    defect = float(np.max(np.abs(H - H.conj().T))) / scale
    if defect > HERMITICITY_TOL:
        raise NumericalError(f"fiber matrix Hermiticity defect {defect:.2e} > {HERMITICITY_TOL:g}")
    return defect


def assemble_fiber(flux: FluxSpec, V: FourierPotential, k, M: int, basis: LLLBasis | None = None) -> FiberMatrix:
    """Truncated Hermitian matrix of ``H_B(k) + V`` on levels ``0..M``."""
    if basis is not None and not np.allclose(basis.k, k):
        raise ValueError("basis was built at a different quasimomentum")
    return FiberAssembler(flux, V, M).matrix(k, basis)


def complex_fiber(flux: FluxSpec, V: FourierPotential, k, zeta: complex, M: int,
                  basis: LLLBasis | None = None, lower: bool = True) -> np.ndarray:
    """``Zp Zm + zeta Z-/+ + B + V`` = ``H_B(k + (zeta/2) e1 +/- i (zeta/2) e2) + V``.

    ``lower=True`` gives the ``+i`` quasimomentum shift paired with ``Zm``.
    """
    Zp, Zm, _ = ladder_matrices(flux, max(M, 1))
    if M == 0:
        Zp, Zm = Zp[: flux.P, : flux.P], Zm[: flux.P, : flux.P]
    shift = Zm if lower else Zp
    H = (Zp @ Zm).toarray().astype(complex) + zeta * shift.toarray() + flux.B * np.eye(flux.P * (M + 1))
    H += FiberAssembler(flux, V, M).coupling(k, basis)
    return H
