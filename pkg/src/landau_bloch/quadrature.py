"""Tensor-product trapezoid quadrature over the enlarged cell and
finite-difference application of the magnetic differential operators.

These are the independent oracle paths: they see the basis functions only
through point evaluation, never through the ladder algebra.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import QuadratureError
from .lattice import FluxSpec

# 8th-order central-difference stencils
_D1 = np.array([1 / 280, -4 / 105, 1 / 5, -4 / 5, 0.0, 4 / 5, -1 / 5, 4 / 105, -1 / 280])
_D2 = np.array([-1 / 560, 8 / 315, -1 / 5, 8 / 5, -205 / 72, 8 / 5, -1 / 5, 8 / 315, -1 / 560])
_OFFSETS = np.arange(-4, 5)


@dataclass(frozen=True)
class QuadResult:
    value: np.ndarray | complex
    error: float
    n: int


def cell_grid(flux: FluxSpec, n: int):
    """Uniform ``n x n`` grid on the enlarged cell in lattice coordinates.

    Returns ``(x1, x2, weight)`` with flattened coordinates and the scalar
    trapezoid weight ``v(K~)/n^2``.
    """
    xi = np.arange(n) / n
    xi1, xi2 = np.meshgrid(xi, xi, indexing="ij")
    E1, E2 = flux.Etilde1, flux.Etilde2
    x1 = (xi1 * E1[0] + xi2 * E2[0]).ravel()
    x2 = (xi1 * E1[1] + xi2 * E2[1]).ravel()
    return x1, x2, flux.enlarged_cell_area / n**2


def quad_matrix(
    F: Callable, G: Callable, flux: FluxSpec, tol: float = 1e-10, n_start: int = 16, n_max: int = 512
) -> QuadResult:
    """Gram-type matrix ``<F_a, G_b>`` over the enlarged cell.

    ``F`` and ``G`` map flattened ``(x1, x2)`` to arrays of shape
    ``(A, npts)`` and ``(B, npts)``.  The resolution doubles until two
    successive results differ by less than ``tol`` (max entry).

    Raises
    ------
    QuadratureError
        With the last estimate if ``n_max`` is reached first.
    """
    prev = None
    n = n_start
    est = np.inf
    while n <= n_max:
        x1, x2, w = cell_grid(flux, n)
        f = np.atleast_2d(F(x1, x2))
        g = np.atleast_2d(G(x1, x2))
        cur = w * (np.conj(f) @ g.T)
        if prev is not None:
            est = float(np.max(np.abs(cur - prev)))
            if est < tol:
                return QuadResult(cur, est, n)
        prev = cur
        n *= 2
    raise QuadratureError(
        f"quadrature did not converge to {tol:g} by n={n_max} (estimate {est:.3g})", est
    )


def quad_inner(f: Callable, g: Callable, flux: FluxSpec, tol: float = 1e-10, n_start: int = 16,
               n_max: int = 512) -> QuadResult:
    """Scalar ``(f, g) = int_{K~} conj(f) g dx`` with a Richardson-halving error estimate."""
    res = quad_matrix(
        lambda a, b: np.asarray(f(a, b))[None, :],
        lambda a, b: np.asarray(g(a, b))[None, :],
        flux, tol, n_start, n_max,
    )
    return QuadResult(complex(res.value[0, 0]), res.error, res.n)


def fd_derivatives(func: Callable, x1, x2, h: float):
    """Return ``(f, d1 f, d2 f, d11 f, d22 f)`` of a point-evaluable function."""
    x1 = np.asarray(x1, float)
    x2 = np.asarray(x2, float)
    f0 = func(x1, x2)
    d1 = sum(c * func(x1 + o * h, x2) for c, o in zip(_D1, _OFFSETS) if c != 0) / h
    d2 = sum(c * func(x1, x2 + o * h) for c, o in zip(_D1, _OFFSETS) if c != 0) / h
    d11 = sum(c * (f0 if o == 0 else func(x1 + o * h, x2)) for c, o in zip(_D2, _OFFSETS)) / h**2
    d22 = sum(c * (f0 if o == 0 else func(x1, x2 + o * h)) for c, o in zip(_D2, _OFFSETS)) / h**2
    return f0, d1, d2, d11, d22


def fd_step(B: float, m: int, extent: float = 0.0) -> float:
    """Step size scaled to the local wavenumber of level-``m`` functions.

    ``extent`` bounds ``|x|`` over the evaluation region; the gauge phase
    ``e^{i B x1 x2}`` oscillates with wavenumber up to ``B * extent``.
    """
    return 0.05 / (np.sqrt(B * (m + 2)) + B * extent)


def apply_ladder_fd(func: Callable, flux: FluxSpec, k, x1, x2, h: float, raising: bool):
    """``Z_+(k) f`` (``raising=True``) or ``Z_-(k) f`` by finite differences.

    ``Z_-/+ = (k1 - i d1) +/- i (k2 - i d2 - B x1)``.
    """
    f, d1, d2, _, _ = fd_derivatives(func, x1, x2, h)
    a_op = k[0] * f - 1j * d1
    b_op = (k[1] - flux.B * x1) * f - 1j * d2
    return a_op - 1j * b_op if raising else a_op + 1j * b_op


def apply_hamiltonian_fd(func: Callable, flux: FluxSpec, kc, x1, x2, h: float):
    """``H_B(kc) f = (kc1 - i d1)^2 f + (kc2 - i d2 - B x1)^2 f`` for complex ``kc``."""
    f, d1, d2, d11, d22 = fd_derivatives(func, x1, x2, h)
    B = flux.B
    c = kc[1] - B * x1
    first = kc[0] ** 2 * f - 2j * kc[0] * d1 - d11
    # (c - i d2)^2 f = c^2 f - 2 i c d2 f - d22 f   (d2 c = 0 since c depends on x1 only)
    second = c**2 * f - 2j * c * d2 - d22
    return first + second
