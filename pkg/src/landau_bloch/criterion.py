"""Scans of the Fourier criterion ``|Y|^{n+1} C_{B,V}(Y)`` and membership
diagnostics for the bad sets ``B_n(S1, S2, S3)``.

A finite scan cannot decide a ``limsup``.  The verdicts produced here are
evidence labels attached to a radial envelope, never spectral claims.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .lattice import TWO_PI, FluxSpec, points_in_disk
from .potential import FourierPotential, c_criterion_many, sobolev_norm

VERDICTS = ("increasing-evidence", "bounded-evidence", "inconclusive")


def default_shell_width(flux: FluxSpec) -> float:
    """Radial shell width: the shortest reciprocal basis vector of ``2 pi Lambda^*``."""
    lat = flux.lattice
    return TWO_PI * min(float(np.linalg.norm(lat.E1s)), float(np.linalg.norm(lat.E2s)))


@dataclass(frozen=True, eq=False)
class CriterionReport:
    """Rows of the criterion scan plus the shell-wise envelope.

    Attributes
    ----------
    indices : ndarray of int, shape (K, 2)
        Lexicographic ``(n1, n2)`` of every lattice vector with ``|Y| <= Rmax``.
    absY, C, weighted : ndarray, shape (K,)
        ``|Y|``, ``C_{B,V}(Y)`` and ``|Y|^{n+1} C_{B,V}(Y)``.
    shell_lower : ndarray
        Inner radius of each shell ``[s w, (s+1) w)``.
    envelope : ndarray
        Max of ``weighted`` per shell (NaN for a shell with no lattice point).
    """

    n: int
    B: float
    Rmax: float
    shell_width: float
    indices: np.ndarray
    absY: np.ndarray
    C: np.ndarray
    weighted: np.ndarray
    shell_lower: np.ndarray
    envelope: np.ndarray
    support_radius: float
    truncation_radius: float | None

    def shell_of(self, radius: float) -> int:
        return int(math.floor(radius / self.shell_width + 1e-12))

    def to_csv(self, comment: str | None = None) -> str:
        buf = io.StringIO()
        if comment:
            buf.write(f"# {comment}\n")
        buf.write("n1,n2,absY,C,weightedC\n")
        for (a, b), r, c, w in zip(self.indices, self.absY, self.C, self.weighted):
            buf.write(f"{a},{b},{r:.17g},{c:.17g},{w:.17g}\n")
        return buf.getvalue()


def scan(V: FourierPotential, flux: FluxSpec, n: int, Rmax: float, shell_width: float | None = None) -> CriterionReport:
    """Evaluate ``C_{B,V}`` at every lattice vector in the disk ``|Y| <= Rmax``."""
    if not Rmax > 0:
        raise ValueError("Rmax must be positive")
    if n < 0:
        raise ValueError("smoothness index n must be >= 0")
    w = default_shell_width(flux) if shell_width is None else float(shell_width)
    idx, Y = points_in_disk(flux.lattice, (0.0, 0.0), Rmax)
    absY = np.linalg.norm(Y, axis=1)
    C = c_criterion_many(V, flux.B, Y)
    weighted = absY ** (n + 1) * C
    nshell = int(math.floor(Rmax / w + 1e-12)) + 1
    shell = np.minimum(np.floor(absY / w + 1e-12).astype(int), nshell - 1)
    env = np.full(nshell, np.nan)
    np.fmax.at(env, shell, weighted)
    return CriterionReport(
        n=n, B=flux.B, Rmax=float(Rmax), shell_width=w, indices=idx, absY=absY, C=C,
        weighted=weighted, shell_lower=w * np.arange(nshell), envelope=env,
        support_radius=V.support_radius, truncation_radius=V.truncation_radius,
    )


@dataclass(frozen=True)
class GrowthVerdict:
    verdict: str
    slope: float | None
    windows: int
    shell_lower: list = field(default_factory=list)
    envelope: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "slope": self.slope,
            "windows": self.windows,
            "shell_lower": self.shell_lower,
            "envelope": self.envelope,
        }


def growth_verdict(report: CriterionReport, windows: int = 4) -> GrowthVerdict:
    """Label the envelope's growth.

    * ``bounded-evidence``: the potential is an honest trigonometric
      polynomial (no declared truncation radius) and the envelope is
      ``<= 0`` on every shell lying beyond its support.
    * ``increasing-evidence``: the last ``windows`` shells with a positive
      envelope have a positive least-squares slope of ``log(envelope)``
      against ``log(shell radius)``.
    * ``inconclusive`` otherwise.

    A generated truncation of an infinite family (``truncation_radius`` set)
    is never labelled bounded: its support edge is an artefact.
    """
    if windows < 2:
        raise ValueError("windows must be >= 2")
    env = report.envelope
    lower = report.shell_lower
    series = dict(
        windows=windows,
        shell_lower=[float(x) for x in lower],
        envelope=[None if np.isnan(e) else float(e) for e in env],
    )
    if len(env) < windows:
        raise ValueError(f"report has {len(env)} shells, fewer than windows={windows}")
    if report.truncation_radius is None:
        beyond = (lower > report.support_radius) & ~np.isnan(env)
        if np.all(env[beyond] <= 0):
            return GrowthVerdict("bounded-evidence", None, **series)
    pos = np.flatnonzero(np.nan_to_num(env, nan=-1.0) > 0)
    if len(pos) >= windows:
        last = pos[-windows:]
        centre = lower[last] + 0.5 * report.shell_width
        slope = float(np.polyfit(np.log(centre), np.log(env[last]), 1)[0])
        if slope > 0:
            return GrowthVerdict("increasing-evidence", slope, **series)
        return GrowthVerdict("inconclusive", slope, **series)
    return GrowthVerdict("inconclusive", None, **series)


@dataclass(frozen=True)
class BadSetSpec:
    """Parameters of ``B_n(S1, S2, S3)``; ``Cn`` stands in for the unknown ``C(Lambda, B; n)``."""

    S1: float
    S2: float
    S3: float
    Cn: float = 1.0

    def __post_init__(self):
        if min(self.S1, self.S2, self.S3, self.Cn) <= 0:
            raise ValueError("S1, S2, S3 and Cn must be positive")

    def threshold(self, n: int, flux: FluxSpec) -> float:
        """``C' = Cn ((v(K))^{(n+2)/2} (1 + B + S2)^{n+2} + S1^{n+2})``."""
        v = flux.lattice.cell_area
        return self.Cn * (v ** ((n + 2) / 2) * (1 + flux.B + self.S2) ** (n + 2) + self.S1 ** (n + 2))


@dataclass(frozen=True)
class BadSetDiagnosis:
    norm_bound: bool
    eigenvalue_candidate: bool
    criterion_bound: bool
    member: bool
    threshold: float
    norm: float
    worst_weighted: float | None
    candidates: list
    band_settings: dict
    # when the flat-band proxy fires, whether the criterion bound also holds
    direction_check: bool | None

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def badset_check(V: FourierPotential, flux: FluxSpec, n: int, spec: BadSetSpec, report: CriterionReport,
                 M: int = 8, grid=(4, 4), tol: float = 1e-6, surface=None) -> BadSetDiagnosis:
    """Check the three defining conditions of ``B_n(S1, S2, S3)``.

    Condition 2 uses the flat-band proxy from a band sweep with the given
    ``(M, grid, tol)``, or a precomputed ``surface``.
    """
    from .bands import flat_band_candidates, sweep

    if report.Rmax < spec.S3 + report.shell_width:
        raise ValueError("scan radius must reach S3 plus one shell")
    if report.n != n:
        raise ValueError("report was computed for a different n")
    norm = sobolev_norm(V, n)
    cond1 = norm <= spec.S1
    if surface is None:
        surface = sweep(flux, V, M, grid)
    cands = [c for c in flat_band_candidates(surface, tol) if abs(c.mean) <= spec.S2]
    cond2 = len(cands) > 0
    thr = spec.threshold(n, flux)
    far = report.absY >= spec.S3
    worst = float(np.max(report.weighted[far])) if np.any(far) else None
    cond3 = worst is None or worst <= thr
    return BadSetDiagnosis(
        norm_bound=bool(cond1),
        eigenvalue_candidate=bool(cond2),
        criterion_bound=bool(cond3),
        member=bool(cond1 and cond2 and cond3),
        threshold=thr,
        norm=norm,
        worst_weighted=worst,
        candidates=[c.mean for c in cands],
        band_settings={"M": surface.M, "grid": list(surface.grid), "tol": tol},
        direction_check=bool(cond3) if cond2 else None,
    )


def verdict_json(report: CriterionReport, verdict: GrowthVerdict, extra: dict | None = None) -> str:
    payload = {"n": report.n, "B": report.B, "Rmax": report.Rmax, "shell_width": report.shell_width}
    payload.update(verdict.to_dict())
    if extra:
        payload.update(extra)
    return json.dumps(payload, indent=2, sort_keys=True, default=_json_default)


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(type(obj).__name__)
