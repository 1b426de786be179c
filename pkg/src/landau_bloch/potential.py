"""Fourier-side representation of periodic potentials.

A potential is a finite map ``(n1, n2) -> V_Y`` with
``Y = 2*pi*(n1*E1s + n2*E2s)``, so every norm and criterion sum is an exact
finite sum.  Infinite families are handled as truncations carrying a
declared ``truncation_radius``.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np

from .errors import PotentialFormatError
from .lattice import Lattice2, lattice_gaussian_sum

HERMITIAN_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class FourierPotential:
    """Finitely supported Fourier coefficient map.

    ``indices`` is kept in lexicographic order and never contains exact
    zeros.  Hermitian symmetry is *not* required here (one-sided disk
    strips are complex); :func:`load_potential` enforces it for input.
    """

    lattice: Lattice2
    indices: np.ndarray
    coeffs: np.ndarray
    truncation_radius: Optional[float] = None

    @classmethod
    def from_arrays(cls, lattice, indices, coeffs, truncation_radius=None):
        indices = np.asarray(indices, dtype=np.int64).reshape(-1, 2)
        coeffs = np.asarray(coeffs, dtype=complex).reshape(-1)
        if len(indices) != len(coeffs):
            raise ValueError("indices and coeffs differ in length")
        keep = coeffs != 0
        indices, coeffs = indices[keep], coeffs[keep]
        order = np.lexsort((indices[:, 1], indices[:, 0]))
        indices, coeffs = indices[order], coeffs[order]
        if len(indices) > 1 and np.any(np.all(np.diff(indices, axis=0) == 0, axis=1)):
            raise ValueError("duplicate Fourier indices")
        return cls(lattice, indices, coeffs, truncation_radius)

    @classmethod
    def from_dict(cls, lattice, mapping: Mapping, truncation_radius=None):
        if not mapping:
            return cls.zero(lattice)
        keys = np.array(list(mapping.keys()), dtype=np.int64)
        vals = np.array(list(mapping.values()), dtype=complex)
        return cls.from_arrays(lattice, keys, vals, truncation_radius)

    @classmethod
    def zero(cls, lattice):
        return cls(lattice, np.zeros((0, 2), dtype=np.int64), np.zeros(0, dtype=complex))

    @classmethod
    def plane_wave_pair(cls, lattice, n1, n2, amplitude):
        """``amplitude * (e^{i(Y,x)} + e^{-i(Y,x)})`` for real ``amplitude``."""
        if (n1, n2) == (0, 0):
            return cls.from_dict(lattice, {(0, 0): 2 * amplitude})
        return cls.from_dict(lattice, {(n1, n2): amplitude, (-n1, -n2): amplitude})

    def as_dict(self) -> dict:
        return {(int(a), int(b)): complex(c) for (a, b), c in zip(self.indices, self.coeffs)}

    @property
    def vectors(self) -> np.ndarray:
        if len(self.indices) == 0:
            return np.zeros((0, 2))
        return self.lattice.fourier_vector(self.indices[:, 0], self.indices[:, 1])

    @property
    def mean(self) -> complex:
        return self.as_dict().get((0, 0), 0j)

    @property
    def support_radius(self) -> float:
        if len(self.indices) == 0:
            return 0.0
        return float(np.max(np.linalg.norm(self.vectors, axis=1)))

    def coefficient(self, n1: int, n2: int) -> complex:
        return self.as_dict().get((int(n1), int(n2)), 0j)

    def hermitian_defect(self) -> float:
        """``max |V_{-Y} - conj(V_Y)|`` over the support."""
        d = self.as_dict()
        worst = 0.0
        for (a, b), c in d.items():
            worst = max(worst, abs(d.get((-a, -b), 0j) - np.conj(c)))
        return worst

    def is_real(self, tol: float = 0.0) -> bool:
        return self.hermitian_defect() <= tol

    def _combine(self, other, sign):
        if other.lattice is not self.lattice:
            raise ValueError("potentials live on different lattice objects")
        d = self.as_dict()
        for key, val in other.as_dict().items():
            d[key] = d.get(key, 0j) + sign * val
        return FourierPotential.from_dict(self.lattice, d, _merge_trunc(self, other))

    def __add__(self, other):
        return self._combine(other, 1.0)

    def __sub__(self, other):
        return self._combine(other, -1.0)

    def __mul__(self, scalar):
        return FourierPotential.from_arrays(
            self.lattice, self.indices, self.coeffs * scalar, self.truncation_radius
        )

    __rmul__ = __mul__

    def shifted(self, c: float):
        """Add a real constant (changes the mean value only)."""
        d = self.as_dict()
        d[(0, 0)] = d.get((0, 0), 0j) + c
        return FourierPotential.from_dict(self.lattice, d, self.truncation_radius)

    def __len__(self):
        return len(self.indices)


def _merge_trunc(a, b):
    radii = [r for r in (a.truncation_radius, b.truncation_radius) if r is not None]
    return min(radii) if radii else None


# --------------------------------------------------------------------- I/O


def load_potential(text: str, lattice: Lattice2) -> FourierPotential:
    """Parse ``n1 n2 re im`` lines and symmetrize to a real potential.

    A missing partner ``(-n1, -n2)`` is filled with the conjugate; a present
    partner must agree with the conjugate to 1e-12.
    """
    raw = {}
    for lineno, line in enumerate(io.StringIO(text), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 4:
            raise PotentialFormatError(f"line {lineno}: expected 'n1 n2 re im', got {line!r}")
        try:
            n1, n2 = int(parts[0]), int(parts[1])
            val = complex(float(parts[2]), float(parts[3]))
        except ValueError:
            raise PotentialFormatError(f"line {lineno}: cannot parse {line!r}") from None
        if (n1, n2) in raw:
            raise PotentialFormatError(f"line {lineno}: duplicate index ({n1}, {n2})")
        raw[(n1, n2)] = val

    full = dict(raw)
    for (n1, n2), val in raw.items():
        partner = (-n1, -n2)
        if partner in raw:
            if abs(raw[partner] - np.conj(val)) > HERMITIAN_TOL:
                raise PotentialFormatError(
                    f"coefficients at ({n1}, {n2}) and {partner} are not conjugate; "
                    "the potential would not be real-valued"
                )
        else:
            full[partner] = np.conj(val)
    if (0, 0) in full and abs(full[(0, 0)].imag) > HERMITIAN_TOL:
        raise PotentialFormatError("mean value V_0 must be real")
    return FourierPotential.from_dict(lattice, full)


def dump_potential(V: FourierPotential, header: str | None = None) -> str:
    """Coefficient-file text, lexicographic order, 17 significant digits."""
    lines = []
    if header:
        lines.extend(f"# {h}" for h in header.splitlines())
    for (n1, n2), c in zip(V.indices, V.coeffs):
        lines.append(f"{n1} {n2} {c.real:.17g} {c.imag:.17g}")
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------- functionals


def sobolev_norm(V: FourierPotential, s: float) -> float:
    """``||V||_{H^s} = v(K)^{1/2} (sum (1+|Y|)^{2s} |V_Y|^2)^{1/2}``."""
    if s < 0:
        raise ValueError("Sobolev index must be non-negative")
    if len(V) == 0:
        return 0.0
    w = (1.0 + np.linalg.norm(V.vectors, axis=1)) ** (2 * s)
    return math.sqrt(V.lattice.cell_area * float(np.sum(w * np.abs(V.coeffs) ** 2)))


def evaluate(V: FourierPotential, x) -> float | np.ndarray:
    """Fourier synthesis at one point or an array of points ``(..., 2)``."""
    x = np.asarray(x, dtype=float)
    if len(V) == 0:
        return 0.0 if x.ndim == 1 else np.zeros(x.shape[:-1])
    phase = np.exp(1j * (x @ V.vectors.T))
    val = phase @ V.coeffs
    if np.max(np.abs(np.imag(val))) > 1e-10 * max(1.0, float(np.max(np.abs(val)))):
        raise ValueError("potential is not real-valued at the requested points")
    val = np.real(val)
    return float(val) if np.ndim(val) == 0 else val


def c_criterion_many(V: FourierPotential, B: float, Ys) -> np.ndarray:
    """Vectorized ``C_{B,V}(Y)`` for lattice vectors ``Ys`` (assumed on-lattice)."""
    Ys = np.atleast_2d(np.asarray(Ys, dtype=float))
    if len(V) == 0:
        return np.zeros(len(Ys))
    W = V.vectors
    mod = np.abs(V.coeffs)
    out = np.empty(len(Ys))
    # chunk to bound memory on large scans
    step = max(1, 2_000_000 // max(1, len(W)))
    for start in range(0, len(Ys), step):
        Yc = Ys[start : start + step]
        d2 = np.sum((Yc[:, None, :] - W[None, :, :]) ** 2, axis=2)
        self_mask = d2 <= (1e-9 * (1.0 + np.linalg.norm(Yc, axis=1)[:, None])) ** 2
        gauss = np.where(self_mask, 0.0, np.exp(-d2 / (4 * B)))
        own = np.where(self_mask, mod[None, :], 0.0).sum(axis=1)
        out[start : start + step] = own - gauss @ mod
    return out


def c_criterion(V: FourierPotential, B: float, Y) -> float:
    """``|V_Y| - sum_{Y' != Y} |V_{Y'}| exp(-|Y'-Y|^2 / (4B))``.

    Raises
    ------
    OffLatticeError
        If ``Y`` is farther than 1e-9 from ``2*pi*Lambda^*``.
    """
    n1, n2 = V.lattice.fourier_index(Y)
    Yexact = V.lattice.fourier_vector(n1, n2)
    return float(c_criterion_many(V, B, Yexact[None, :])[0])


def strip_disk(V: FourierPotential, Yc, r: float):
    """Split ``V`` into the part outside and inside the closed disk ``|Y - Yc| <= r``.

    Returns ``(stripped, removed)`` with ``stripped + removed == V``.
    """
    if r < 0:
        raise ValueError("radius must be non-negative")
    if len(V) == 0:
        z = FourierPotential.zero(V.lattice)
        return z, z
    Yc = np.asarray(Yc, dtype=float)
    inside = np.linalg.norm(V.vectors - Yc, axis=1) <= r * (1 + 1e-12) + 1e-12
    kept = FourierPotential.from_arrays(
        V.lattice, V.indices[~inside], V.coeffs[~inside], V.truncation_radius
    )
    removed = FourierPotential.from_arrays(V.lattice, V.indices[inside], V.coeffs[inside])
    return kept, removed


def lipschitz_constant(lattice: Lattice2, B: float) -> float:
    """Lipschitz constant of ``W -> C_{B,W}(Y)`` with respect to ``||.||_{L^2}``."""
    g = lattice_gaussian_sum(lattice, 2.0 * B)
    return math.sqrt(g / lattice.cell_area)


# ------------------------------------------------------------------ shells


@dataclass(frozen=True)
class ShellSpec:
    """Radii of the m-th shell: ``R_m = a m (ln m)^{3/4}``, ``r'_m``, ``r_m``."""

    m: int
    a: float
    Rm: float
    rpm: float
    rm: float

    @classmethod
    def for_lattice(cls, lattice: Lattice2, m: int) -> "ShellSpec":
        if m < 2:
            raise ValueError("shell index must be >= 2")
        a = 4 * math.pi * math.log(2) ** (-0.75) * lattice.diam_kstar
        L = math.log(m) ** 0.75
        rpm = 0.5 * a * L
        return cls(m=m, a=a, Rm=a * m * L, rpm=rpm, rm=0.5 * rpm)


def _shell_weight(Y, n: int, m: int, weight: str):
    if weight == "n":
        exponent = 2 * n
    elif weight == "m":
        exponent = 2 * m
    else:
        raise ValueError("weight must be 'n' or 'm'")
    return (1.0 + np.linalg.norm(Y, axis=1)) ** exponent


def shell_energy(W: FourierPotential, spec: ShellSpec, n: int, weight: str = "n") -> float:
    """Weighted energy of ``W`` in the annulus ``R_m - r'_m <= |Y| <= R_m + r'_m``.

    ``weight='n'`` uses ``(1+|Y|)^{2n}`` (default), ``weight='m'`` uses the
    shell index as exponent.
    """
    if len(W) == 0:
        return 0.0
    Y = W.vectors
    rad = np.linalg.norm(Y, axis=1)
    tol = 1e-12 * (1 + spec.Rm)
    mask = (rad >= spec.Rm - spec.rpm - tol) & (rad <= spec.Rm + spec.rpm + tol)
    if not np.any(mask):
        return 0.0
    w = _shell_weight(Y[mask], n, spec.m, weight)
    return float(np.sum(w * np.abs(W.coeffs[mask]) ** 2))


def directed_shell_energy(
    W: FourierPotential, spec: ShellSpec, n: int, x, weight: str = "n"
) -> float:
    """Weighted energy of ``W`` in the disk ``|Y - x| <= r'_m`` for ``|x| = R_m``."""
    x = np.asarray(x, dtype=float)
    if abs(np.linalg.norm(x) - spec.Rm) > 1e-9 * max(1.0, spec.Rm):
        raise ValueError(f"|x| = {np.linalg.norm(x)!r} differs from R_m = {spec.Rm!r}")
    if len(W) == 0:
        return 0.0
    Y = W.vectors
    mask = np.linalg.norm(Y - x, axis=1) <= spec.rpm * (1 + 1e-12) + 1e-12
    if not np.any(mask):
        return 0.0
    w = _shell_weight(Y[mask], n, spec.m, weight)
    return float(np.sum(w * np.abs(W.coeffs[mask]) ** 2))


# -------------------------------------------------------------- generators


def cosine_potential(lattice: Lattice2, n1: int = 1, n2: int = 0, amplitude: float = 1.0):
    """``2*amplitude*cos((Y, x))`` with ``Y = 2*pi*(n1 E1s + n2 E2s)``."""
    return FourierPotential.plane_wave_pair(lattice, n1, n2, amplitude)


def lacunary_potential(lattice: Lattice2, jmax: int, direction=(1, 0), power: float = -0.5):
    """Truncated lacunary family ``V_{Y_j} = |Y_j|^power`` at ``Y_j = 2^j * Y_dir``.

    Modes ``j = 1..jmax`` plus conjugates; the truncation radius is the
    radius of the last mode.
    """
    d = {}
    for j in range(1, jmax + 1):
        idx = (direction[0] * 2**j, direction[1] * 2**j)
        Y = lattice.fourier_vector(*idx)
        amp = float(np.linalg.norm(Y)) ** power
        d[idx] = amp
        d[(-idx[0], -idx[1])] = amp
    radius = float(np.linalg.norm(lattice.fourier_vector(direction[0] * 2**jmax, direction[1] * 2**jmax)))
    return FourierPotential.from_dict(lattice, d, truncation_radius=radius)


def random_potential(lattice: Lattice2, rng, radius: float, scale: float = 1.0, decay: float = 0.0):
    """Random real potential supported in ``|Y| <= radius``."""
    from .lattice import points_in_disk

    idx, Y = points_in_disk(lattice, (0.0, 0.0), radius)
    d = {}
    for (a, b), y in zip(idx, Y):
        key = (int(a), int(b))
        if key in d:
            continue
        amp = scale * (1 + np.linalg.norm(y)) ** (-decay)
        if key == (0, 0):
            d[key] = complex(amp * rng.standard_normal())
        else:
            c = amp * complex(rng.standard_normal(), rng.standard_normal())
            d[key] = c
            d[(-key[0], -key[1])] = np.conj(c)
    return FourierPotential.from_dict(lattice, d)
