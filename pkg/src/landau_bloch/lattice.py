"""Period lattice, reciprocal lattice and the enlarged magnetic lattice.

Coordinates are normalized so that the first basis vector lies on the
positive x1 axis and the second has positive x2 component.  Reciprocal
vectors satisfy ``(E^mu, E^nu_*) = delta_{mu nu}`` (no factor 2*pi); the
Fourier lattice of Lambda-periodic functions is ``2*pi*Lambda^*``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ConfigError, GeometryError

TWO_PI = 2.0 * np.pi

# closed-disk membership slack, relative to the radius
_DISK_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class Lattice2:
    """A normalized two-dimensional lattice.

    Attributes
    ----------
    E1, E2 : ndarray, shape (2,)
        Basis vectors with ``E1[1] == 0``, ``E1[0] > 0``, ``E2[1] > 0``.
    E1s, E2s : ndarray, shape (2,)
        Dual basis, ``E_mu . E_nu_s = delta``.
    rotation : ndarray, shape (2, 2)
        Orthogonal map applied to the user input to reach the normal form.
    """

    E1: np.ndarray
    E2: np.ndarray
    E1s: np.ndarray
    E2s: np.ndarray
    rotation: np.ndarray

    @property
    def cell_area(self) -> float:
        return abs(self.E1[0] * self.E2[1])

    @property
    def reciprocal_cell_area(self) -> float:
        return 1.0 / self.cell_area

    @property
    def diam_kstar(self) -> float:
        """Longest diagonal of the reciprocal cell spanned by E1s, E2s."""
        return max(np.linalg.norm(self.E1s + self.E2s), np.linalg.norm(self.E1s - self.E2s))

    @property
    def basis(self) -> np.ndarray:
        return np.array([self.E1, self.E2])

    @property
    def reciprocal_basis(self) -> np.ndarray:
        return np.array([self.E1s, self.E2s])

    def fourier_vector(self, n1, n2) -> np.ndarray:
        """``Y = 2*pi*(n1*E1s + n2*E2s)``; broadcasts over integer arrays."""
        n1 = np.asarray(n1, dtype=float)
        n2 = np.asarray(n2, dtype=float)
        return TWO_PI * (n1[..., None] * self.E1s + n2[..., None] * self.E2s)

    def fourier_index(self, Y, tol: float = 1e-9) -> tuple[int, int]:
        """Inverse of :meth:`fourier_vector`; raises if ``Y`` is off the lattice."""
        from .errors import OffLatticeError

        Y = np.asarray(Y, dtype=float)
        coords = self.basis @ Y / TWO_PI
        idx = np.rint(coords)
        residual = np.linalg.norm(self.fourier_vector(idx[0], idx[1]) - Y)
        if residual > tol:
            raise OffLatticeError(
                f"vector {Y.tolist()} is {residual:.3g} away from the nearest node of 2*pi*Lambda^*"
            )
        return int(idx[0]), int(idx[1])

    def biorthogonality_residual(self) -> float:
        return float(np.max(np.abs(self.basis @ self.reciprocal_basis.T - np.eye(2))))


def build_lattice(E1, E2) -> Lattice2:
    """Normalize a lattice basis and compute its dual.

    The input is rotated so that ``E1`` points along +x1; if the rotated
    ``E2`` has negative x2 component the frame is reflected in the x1 axis.

    Raises
    ------
    GeometryError
        If the basis is (numerically) degenerate.
    """
    E1 = np.asarray(E1, dtype=float).reshape(2)
    E2 = np.asarray(E2, dtype=float).reshape(2)
    if not (np.all(np.isfinite(E1)) and np.all(np.isfinite(E2))):
        raise GeometryError("lattice basis contains non-finite entries")
    det = E1[0] * E2[1] - E1[1] * E2[0]
    if abs(det) < 1e-12:
        raise GeometryError(f"degenerate lattice basis (|det| = {abs(det):.3g})")

    c, s = E1 / np.linalg.norm(E1)
    rot = np.array([[c, s], [-s, c]])
    if (rot @ E2)[1] < 0:
        rot = np.diag([1.0, -1.0]) @ rot
    e1 = rot @ E1
    e2 = rot @ E2
    e1[1] = 0.0  # kill rounding residue; exact by construction

    # dual basis in closed form for the normalized frame
    e1s = np.array([1.0 / e1[0], -e2[0] / (e1[0] * e2[1])])
    e2s = np.array([0.0, 1.0 / e2[1]])
    return Lattice2(E1=e1, E2=e2, E1s=e1s, E2s=e2s, rotation=rot)


@dataclass(frozen=True, eq=False)
class FluxSpec:
    """Rational flux ``eta = P/Q`` through the period cell.

    ``B`` is derived from the integers; it is never parsed from input.
    """

    lattice: Lattice2
    P: int
    Q: int

    @property
    def eta(self) -> Fraction:
        return Fraction(self.P, self.Q)

    @property
    def B(self) -> float:
        return TWO_PI * self.P / (self.Q * self.lattice.cell_area)

    @property
    def Etilde1(self) -> np.ndarray:
        return self.Q * self.lattice.E1

    @property
    def Etilde2(self) -> np.ndarray:
        return self.lattice.E2

    @property
    def Etilde1s(self) -> np.ndarray:
        return self.lattice.E1s / self.Q

    @property
    def Etilde2s(self) -> np.ndarray:
        return self.lattice.E2s

    @property
    def enlarged_cell_area(self) -> float:
        return self.Q * self.lattice.cell_area

    def enlarged_flux(self) -> float:
        """``B * v(K~) / (2*pi)``; equals ``P`` up to rounding."""
        return self.B * self.enlarged_cell_area / TWO_PI

    def quasimomentum(self, u1: float, u2: float) -> np.ndarray:
        """Point ``2*pi*(u1*Et1s + u2*Et2s)`` of the magnetic Brillouin zone."""
        return TWO_PI * (u1 * self.Etilde1s + u2 * self.Etilde2s)

    def to_config(self) -> dict:
        # undo the normalization so the round trip reproduces user input
        inv = self.lattice.rotation.T
        return {
            "E1": (inv @ self.lattice.E1).tolist(),
            "E2": (inv @ self.lattice.E2).tolist(),
            "P": self.P,
            "Q": self.Q,
        }


def make_flux(lattice: Lattice2, P: int, Q: int) -> FluxSpec:
    if int(P) != P or int(Q) != Q:
        raise ConfigError("P and Q must be integers")
    P, Q = int(P), int(Q)
    if P < 1 or Q < 1:
        raise ConfigError(f"flux requires P, Q >= 1 (got P={P}, Q={Q})")
    if math.gcd(P, Q) != 1:
        raise ConfigError(f"P={P} and Q={Q} are not coprime; reduce the fraction first")
    return FluxSpec(lattice=lattice, P=P, Q=Q)


def flux_from_config(block: dict) -> FluxSpec:
    """Build a flux from ``{"E1": [x, y], "E2": [x, y], "P": int, "Q": int}``."""
    try:
        lat = build_lattice(block["E1"], block["E2"])
        return make_flux(lat, block["P"], block["Q"])
    except KeyError as exc:
        raise ConfigError(f"lattice/flux block is missing key {exc}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"malformed lattice/flux block: {exc}") from None


def points_in_disk(lattice: Lattice2, center, radius: float):
    """Nodes of ``2*pi*Lambda^*`` in the closed disk ``|Y - center| <= radius``.

    Returns
    -------
    indices : ndarray of int, shape (K, 2)
        ``(n1, n2)`` in lexicographic order.
    vectors : ndarray, shape (K, 2)
    """
    if radius < 0:
        raise ValueError("radius must be non-negative")
    center = np.asarray(center, dtype=float).reshape(2)
    r = radius * (1.0 + _DISK_SLACK) + _DISK_SLACK
    # n_mu = (Y, E^mu) / (2 pi)
    bounds = []
    for E in (lattice.E1, lattice.E2):
        mid = center @ E / TWO_PI
        half = r * np.linalg.norm(E) / TWO_PI
        bounds.append(np.arange(math.floor(mid - half), math.ceil(mid + half) + 1))
    n1, n2 = np.meshgrid(bounds[0], bounds[1], indexing="ij")
    n1 = n1.ravel()
    n2 = n2.ravel()
    Y = lattice.fourier_vector(n1, n2)
    keep = np.linalg.norm(Y - center, axis=1) <= r
    return np.stack([n1[keep], n2[keep]], axis=1).astype(np.int64), Y[keep]


def lattice_gaussian_sum(lattice: Lattice2, width: float, center=(0.0, 0.0)) -> float:
    """``sum_{Y in 2 pi Lambda^*} exp(-|Y - center|^2 / width)``.

    Summed over square index rings until a ring adds less than ``1e-16``
    of the running total.
    """
    center = np.asarray(center, dtype=float)
    c = lattice.basis @ center / TWO_PI
    c0 = np.rint(c).astype(int)
    total = 0.0
    ring = 0
    while True:
        if ring == 0:
            idx = np.array([[0, 0]])
        else:
            side = np.arange(-ring, ring + 1)
            top = np.stack([side, np.full_like(side, ring)], axis=1)
            bot = np.stack([side, np.full_like(side, -ring)], axis=1)
            inner = np.arange(-ring + 1, ring)
            left = np.stack([np.full_like(inner, -ring), inner], axis=1)
            right = np.stack([np.full_like(inner, ring), inner], axis=1)
            idx = np.concatenate([top, bot, left, right])
        idx = idx + c0
        Y = lattice.fourier_vector(idx[:, 0], idx[:, 1])
        contrib = float(np.sum(np.exp(-np.sum((Y - center) ** 2, axis=1) / width)))
        total += contrib
        if ring >= 2 and contrib < 1e-16 * total:
            return total
        ring += 1
