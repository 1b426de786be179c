"""Band functions over the magnetic Brillouin zone.

The zone ``2*pi*K~*`` is sampled on a uniform ``N1 x N2`` grid in the
coordinates of the enlarged dual basis.  Every grid point gets a dense
Hermitian eigendecomposition of the truncated fiber matrix; the table is
assembled by grid index, so the result does not depend on how the work is
scheduled.
"""

from __future__ import annotations

import io
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import LandauBlochError
from .fiber import FiberAssembler
from .lattice import FluxSpec
from .potential import FourierPotential

THREADS_ENV = "LANDAU_BLOCH_THREADS"


def thread_count() -> int:
    """Worker count: ``$LANDAU_BLOCH_THREADS`` if set, else the CPU count."""
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return max(1, os.cpu_count() or 1)


@dataclass(frozen=True, eq=False)
class BandSurface:
    """Sorted fiber eigenvalues on a k-grid.

    Attributes
    ----------
    kpoints : ndarray, shape (N1*N2, 2)
        Row-major in the grid indices ``(i1, i2)``.
    eigenvalues : ndarray, shape (N1*N2, P*(M+1))
        Ascending per row.
    """

    flux: FluxSpec
    V: FourierPotential
    M: int
    grid: tuple[int, int]
    kpoints: np.ndarray
    eigenvalues: np.ndarray

    @property
    def n_bands(self) -> int:
        return self.eigenvalues.shape[1]

    @property
    def interior_bands(self) -> int:
        """Bands counted as reliable: sorted indices below ``P*(M-1)``.

        The top two Landau blocks (``m > M-2``) are excluded.
        """
        return self.flux.P * max(self.M - 1, 0)


def kgrid(flux: FluxSpec, grid) -> np.ndarray:
    """Uniform grid ``k = 2 pi (i1/N1 Et1s + i2/N2 Et2s)``, row-major."""
    n1, n2 = (int(g) for g in grid)
    u1, u2 = np.meshgrid(np.arange(n1) / n1, np.arange(n2) / n2, indexing="ij")
    return np.stack([flux.quasimomentum(a, b) for a, b in zip(u1.ravel(), u2.ravel())])


def sweep(flux: FluxSpec, V: FourierPotential, M: int, grid=(8, 8), threads: int | None = None) -> BandSurface:
    """Eigenvalues of ``H_B(k) + V`` truncated to levels ``0..M`` on a k-grid.

    Parameters
    ----------
    grid : (int, int)
        ``N1 x N2`` with both at least 2.
    threads : int, optional
        Overrides ``$LANDAU_BLOCH_THREADS``.

    Raises
    ------
    LandauBlochError
        Any fiber assembly failure, re-raised with the offending ``k`` in
        the message.
    """
    grid = (int(grid[0]), int(grid[1]))
    if min(grid) < 2:
        raise ValueError("k-grid must be at least 2 x 2")
    assembler = FiberAssembler(flux, V, M)
    ks = kgrid(flux, grid)
    out = np.empty((len(ks), flux.P * (M + 1)))

    def work(i):
        try:
            out[i] = assembler.matrix(ks[i]).eigenvalues()
        except LandauBlochError as exc:
            exc.args = (f"at k = ({ks[i][0]!r}, {ks[i][1]!r}): {exc}",) + exc.args[1:]
            raise

    nthreads = thread_count() if threads is None else max(1, threads)
    if nthreads == 1:
        for i in range(len(ks)):
            work(i)
    else:
        with ThreadPoolExecutor(max_workers=nthreads) as pool:
            list(pool.map(work, range(len(ks))))
    return BandSurface(flux, V, M, grid, ks, out)


def band_widths(surface: BandSurface) -> np.ndarray:
    """Per sorted band: columns ``(min, max, width)``."""
    lo = surface.eigenvalues.min(axis=0)
    hi = surface.eigenvalues.max(axis=0)
    return np.stack([lo, hi, hi - lo], axis=1)


@dataclass(frozen=True)
class FlatBand:
    """A band flat to ``tol`` over the whole grid.

    ``level_set_distance`` is ``max_k dist(mean, spec H(k))``; it is the
    crossing-robust form of the test.  ``near_truncation`` marks a mean
    within ``10*tol`` of an excluded top band.
    """

    mean: float
    index: int
    width: float
    level_set_distance: float
    near_truncation: bool


def flat_band_candidates(surface: BandSurface, tol: float) -> list[FlatBand]:
    """Interior bands of width at most ``tol``.

    A band whose sorted index splits across a crossing can still be caught:
    every candidate mean is also tested against the full spectrum at each
    ``k``.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    widths = band_widths(surface)
    n_int = surface.interior_bands
    ev = surface.eigenvalues
    top = ev[:, n_int:]
    out = []
    for b in range(n_int):
        width = float(widths[b, 2])
        if not width <= tol:
            continue
        mean = float(np.mean(ev[:, b]))
        dist = float(np.max(np.min(np.abs(ev - mean), axis=1)))
        near = bool(top.size) and float(np.min(np.abs(top - mean))) <= 10 * tol
        out.append(FlatBand(mean, b, width, dist, near))
    return out


@dataclass(frozen=True)
class TruncationCertificate:
    M: int
    M_check: int
    interior_bands: int
    max_deviation: float
    per_band: np.ndarray

    def to_dict(self) -> dict:
        return {
            "M": self.M,
            "M_check": self.M_check,
            "interior_bands": self.interior_bands,
            "max_deviation": self.max_deviation,
            "per_band": [float(x) for x in self.per_band],
        }


def truncation_certificate(surface: BandSurface, extra: int = 4, threads: int | None = None) -> TruncationCertificate:
    """Compare interior bands against a sweep at ``M + extra``."""
    finer = sweep(surface.flux, surface.V, surface.M + extra, surface.grid, threads)
    n = surface.interior_bands
    dev = np.max(np.abs(surface.eigenvalues[:, :n] - finer.eigenvalues[:, :n]), axis=0)
    return TruncationCertificate(
        surface.M, surface.M + extra, n, float(dev.max()) if n else 0.0, dev
    )


def bands_csv(surface: BandSurface, comment: str | None = None) -> str:
    """CSV text: header ``k1,k2,lam_1,...,lam_N``, one row per grid point."""
    buf = io.StringIO()
    if comment:
        buf.write(f"# {comment}\n")
    N = surface.n_bands
    buf.write(",".join(["k1", "k2"] + [f"lam_{i + 1}" for i in range(N)]) + "\n")
    for k, lam in zip(surface.kpoints, surface.eigenvalues):
        buf.write(",".join(f"{x:.17g}" for x in (*k, *lam)) + "\n")
    return buf.getvalue()
