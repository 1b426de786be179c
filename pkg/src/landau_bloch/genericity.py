"""Constructive perturbation pushing a potential out of ``B_n(S1, S2, S3)``.

Given ``W`` and a shell index ``m`` whose annulus carries little of ``W``'s
weighted energy, a direction ``x`` with ``|x| = R_m`` is chosen where the
two opposite disks ``|Y' -/+ x| <= r'_m`` carry even less.  The lattice
vector ``Y`` nearest to ``x`` then has its neighbourhood (radius ``r_m``)
cleared and replaced by the pure mode pair

    A (e^{i(Y, x)} + e^{-i(Y, x)}),        A = m^{-n-(1+theta)/2}.

Because the cleared disk isolates ``Y`` from the rest of the spectrum up to
Gaussian tails, ``C_{B,W^(m)}(Y)`` is close to ``A`` while the change in
``H^{n+theta}`` norm is small.

The space used for the ``n+theta`` smoothness is ``H^{n+theta}`` itself, so
``||e^{i(Y,x)}|| = sqrt(v(K)) (1+|Y|)^{n+theta}`` and the embedding constant
is ``sqrt(v(K))``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import InadmissibleShellError, NumericalError
from .lattice import FluxSpec, Lattice2, points_in_disk
from .potential import (
    FourierPotential,
    ShellSpec,
    c_criterion,
    directed_shell_energy,
    shell_energy,
    sobolev_norm,
    strip_disk,
)

REL_SLACK = 1e-12


def _check(lhs: float, rhs: float, slack: float = REL_SLACK) -> dict:
    """Inequality record ``lhs <= rhs`` with a round-off allowance."""
    ok = lhs <= rhs + slack * max(1.0, abs(lhs), abs(rhs))
    return {"lhs": float(lhs), "rhs": float(rhs), "pass": bool(ok)}


def shell_constants(lattice: Lattice2, m: int) -> ShellSpec:
    """``(a, R_m, r'_m, r_m)`` with the separation of consecutive shells asserted."""
    if m < 2:
        raise ValueError("shell index m must be >= 2")
    s = ShellSpec.for_lattice(lattice, m)
    nxt = ShellSpec.for_lattice(lattice, m + 1)
    if not nxt.Rm - s.Rm > nxt.rpm + s.rpm:
        raise NumericalError(f"shells {m} and {m + 1} overlap")
    return s


def _energy_bound(W: FourierPotential, n: int, delta: float, m: int) -> float:
    v = W.lattice.cell_area
    return delta / v / (m * math.log(m)) * sobolev_norm(W, n) ** 2


def admissible_m(W: FourierPotential, n: int, delta: float, m_range=range(2, 201), weight: str = "n") -> list[int]:
    """Shell indices ``m`` in ``m_range`` with ``P_m(W) <= delta v(K)^{-1} (m ln m)^{-1} ||W||^2_{H^n}``."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    out = []
    for m in m_range:
        if m < 2:
            raise ValueError("shell indices start at 2")
        spec = ShellSpec.for_lattice(W.lattice, m)
        if shell_energy(W, spec, n, weight) <= _energy_bound(W, n, delta, m):
            out.append(int(m))
    return out


def direction_bound(spec: ShellSpec, total: float) -> float:
    """``2 pi^{-1} arcsin(r'_m / (R_m + r'_m)) P_m(W)``."""
    return 2 / math.pi * math.asin(spec.rpm / (spec.Rm + spec.rpm)) * total


@dataclass(frozen=True)
class DirectionChoice:
    x: np.ndarray
    angle: float
    energy: float
    bound: float
    n_angles: int


def _pair_energies(W: FourierPotential, spec: ShellSpec, n: int, angles, weight: str) -> np.ndarray:
    dirs = np.stack([np.cos(angles), np.sin(angles)], axis=1) * spec.Rm
    return np.array([
        directed_shell_energy(W, spec, n, x, weight) + directed_shell_energy(W, spec, n, -x, weight)
        for x in dirs
    ])


def _pick_angle(vals: np.ndarray) -> int:
    """Centre of the longest circular run of minimizers (index 0 if all minimal)."""
    lo = vals.min()
    is_min = vals <= lo + REL_SLACK * max(1.0, abs(lo))
    N = len(vals)
    if is_min.all():
        return 0
    # start scanning just after a non-minimal entry so runs do not wrap
    start = int(np.flatnonzero(~is_min)[0]) + 1
    best_len, best_start, run_len, run_start = 0, 0, 0, 0
    for t in range(N):
        i = (start + t) % N
        if is_min[i]:
            if run_len == 0:
                run_start = i
            run_len += 1
            if run_len > best_len:
                best_len, best_start = run_len, run_start
        else:
            run_len = 0
    return (best_start + (best_len - 1) // 2) % N


def select_direction(W: FourierPotential, n: int, m: int, n_angles: int = 256, weight: str = "n") -> DirectionChoice:
    """Minimize ``P_m(W; x) + P_m(W; -x)`` over a uniform angular grid on ``|x| = R_m``.

    The minimizer must satisfy the averaging bound; if it does not, the
    grid is refined four-fold once before giving up.

    Raises
    ------
    NumericalError
        If the refined grid still violates the bound.
    """
    if n_angles < 64:
        raise ValueError("n_angles must be >= 64")
    spec = shell_constants(W.lattice, m)
    bound = direction_bound(spec, shell_energy(W, spec, n, weight))
    for N in (n_angles, 4 * n_angles):
        angles = 2 * math.pi * np.arange(N) / N
        vals = _pair_energies(W, spec, n, angles, weight)
        i = _pick_angle(vals)
        if _check(vals[i], bound)["pass"]:
            x = spec.Rm * np.array([math.cos(angles[i]), math.sin(angles[i])])
            return DirectionChoice(x, float(angles[i]), float(vals[i]), bound, N)
    raise NumericalError(
        f"no direction on a {4 * n_angles}-point grid meets the averaging bound "
        f"({vals.min():.3e} > {bound:.3e}); check the shell weight setting"
    )


@dataclass(frozen=True)
class LatticeChoice:
    index: tuple[int, int]
    Y: np.ndarray
    distance: float
    bracket: dict | None


def select_Ym(lattice: Lattice2, x, rm: float, spec: ShellSpec | None = None) -> LatticeChoice:
    """Nearest vector of ``2 pi Lambda^*`` to ``x`` (ties: lexicographically smallest index).

    With ``spec`` given, the bracket ``(7/8) R_m <= |Y| <= (9/8) R_m`` is
    evaluated as well.

    Raises
    ------
    NumericalError
        If no lattice vector lies within ``rm`` of ``x``.
    """
    x = np.asarray(x, dtype=float)
    idx, Y = points_in_disk(lattice, x, rm)
    if len(idx) == 0:
        raise NumericalError(f"no lattice vector within r_m = {rm!r} of x; covering bound violated")
    d = np.linalg.norm(Y - x, axis=1)
    best = int(np.flatnonzero(d <= d.min() * (1 + 1e-12) + 1e-15)[0])
    bracket = None
    if spec is not None:
        absY = float(np.linalg.norm(Y[best]))
        bracket = {
            "lower": _check(7 / 8 * spec.Rm, absY),
            "upper": _check(absY, 9 / 8 * spec.Rm),
        }
    return LatticeChoice((int(idx[best, 0]), int(idx[best, 1])), Y[best], float(d[best]), bracket)


@dataclass(frozen=True, eq=False)
class PerturbationRecord:
    """Everything produced and verified by one perturbation step."""

    n: int
    theta: float
    delta: float
    m: int
    weight: str
    shell: ShellSpec
    direction: DirectionChoice
    lattice_choice: LatticeChoice
    amplitude: float
    W_m: FourierPotential
    shell_energy: float
    distance: float
    C: float
    weighted: float
    exact_tail: float
    checks: dict

    @property
    def Y(self) -> np.ndarray:
        return self.lattice_choice.Y

    @property
    def all_pass(self) -> bool:
        return all(c["pass"] for c in self.checks.values())

    def to_dict(self) -> dict:
        s = self.shell
        return {
            "inputs": {"n": self.n, "theta": self.theta, "delta": self.delta, "m": self.m, "weight": self.weight},
            "constants": {"a": s.a, "R_m": s.Rm, "rp_m": s.rpm, "r_m": s.rm},
            "x": [float(v) for v in self.direction.x],
            "x_angle": self.direction.angle,
            "n_angles": self.direction.n_angles,
            "Y_index": list(self.lattice_choice.index),
            "Y": [float(v) for v in self.Y],
            "absY": float(np.linalg.norm(self.Y)),
            "distance_x_Y": self.lattice_choice.distance,
            "amplitude": self.amplitude,
            "shell_energy": self.shell_energy,
            "distance_H": self.distance,
            "C": self.C,
            "weightedC": self.weighted,
            "exact_tail": self.exact_tail,
            "checks": self.checks,
            "all_pass": self.all_pass,
        }

    def to_json(self, extra: dict | None = None) -> str:
        payload = self.to_dict()
        if extra:
            payload.update(extra)
        return json.dumps(payload, indent=2, sort_keys=True)


def _gaussian_tail(V: FourierPotential, Y, B: float) -> float:
    if len(V) == 0:
        return 0.0
    d2 = np.sum((V.vectors - Y) ** 2, axis=1)
    return float(np.sum(np.abs(V.coeffs) * np.exp(-d2 / (4 * B))))


def perturb(W: FourierPotential, flux: FluxSpec, n: int, theta: float, m: int, n_angles: int = 256,
            delta: float = 1.0, weight: str = "n", require_admissible: bool = True) -> PerturbationRecord:
    """Build ``W^(m)`` and verify every inequality of the construction.

    Raises
    ------
    InadmissibleShellError
        If ``m`` fails the shell-energy bound for ``delta`` (and
        ``require_admissible``), or the amplitude underflows.
    """
    if not 0 <= theta < 1:
        raise ValueError("theta must lie in [0, 1)")
    if n < 0:
        raise ValueError("n must be >= 0")
    lattice = W.lattice
    spec = shell_constants(lattice, m)
    P_m = shell_energy(W, spec, n, weight)
    c14 = _check(P_m, _energy_bound(W, n, delta, m))
    if require_admissible and not c14["pass"]:
        raise InadmissibleShellError(
            f"m = {m} is not admissible for delta = {delta!r}: P_m = {P_m:.6e} > {c14['rhs']:.6e}"
        )
    A = float(m) ** (-n - (1 + theta) / 2)
    if A < 1e-300:
        raise InadmissibleShellError(f"amplitude {A!r} underflows for m = {m}")

    choice = select_direction(W, n, m, n_angles, weight)
    lat = select_Ym(lattice, choice.x, spec.rm, spec)
    Y = lat.Y
    B = flux.B

    stripped, _ = strip_disk(W, Y, spec.rm)
    stripped, _ = strip_disk(stripped, -Y, spec.rm)
    pair = FourierPotential.plane_wave_pair(lattice, lat.index[0], lat.index[1], A)
    W_m = FourierPotential.from_arrays(
        lattice,
        np.concatenate([stripped.indices, pair.indices]),
        np.concatenate([stripped.coeffs, pair.coeffs]),
        W.truncation_radius,
    )

    C = c_criterion(W_m, B, Y)
    absY = float(np.linalg.norm(Y))
    tail = _gaussian_tail(stripped, Y, B)
    lower19 = A * (1 - math.exp(-absY**2 / B)) - tail
    distance = sobolev_norm(W - W_m, n + theta)

    checks = {
        "shell_energy_bound": c14,
        "direction_bound": _check(choice.energy, choice.bound),
        "covering": _check(lat.distance, spec.rm),
        "bracket_lower": lat.bracket["lower"],
        "bracket_upper": lat.bracket["upper"],
        "criterion_lower_bound": _check(lower19, C),
        "hermitian": _check(W_m.hermitian_defect(), 0.0),
    }
    return PerturbationRecord(
        n=n, theta=theta, delta=delta, m=m, weight=weight, shell=spec, direction=choice,
        lattice_choice=lat, amplitude=A, W_m=W_m, shell_energy=P_m, distance=distance,
        C=C, weighted=absY ** (n + 1) * C, exact_tail=tail, checks=checks,
    )


def _disk_count(lattice: Lattice2, Y, r: float) -> int:
    return len(points_in_disk(lattice, Y, r)[0])


def stripping_diagnostic(W: FourierPotential, n: int, theta: float, m: int, delta: float,
                         n_angles: int = 256, weight: str = "n") -> dict:
    """Raw inequalities bounding the stripped pieces at one ``(m, delta)``.

    Reports, each as ``{lhs, rhs, pass}``:

    * ``piece_norm_bound``: ``sum_+- ||W^(+-Y, r_m)||_{H^n} <= delta m^{-1} (ln m)^{-1/2} ||W||_{H^n}``;
    * ``piece_smooth_bound``: the same pieces in ``H^{n+theta}`` against
      ``delta m^{theta-1} (ln m)^{(1+3 theta)/4} ||W||_{H^n}``;
    * ``transfer_chain_*``: each link of the norm-transfer chain for both disks;
    * ``distance_*``: the distance estimate, first with the exact piece
      norms and then with the ``delta = 1`` smooth-piece bound substituted.

    Nothing is inferred about the existence of ``delta'`` or ``delta''``.
    """
    lattice = W.lattice
    spec = shell_constants(lattice, m)
    choice = select_direction(W, n, m, n_angles, weight)
    lat = select_Ym(lattice, choice.x, spec.rm, spec)
    Y = lat.Y
    absY = float(np.linalg.norm(Y))
    v = lattice.cell_area
    Cp = math.sqrt(v)
    lnm = math.log(m)
    normW = sobolev_norm(W, n)
    A = float(m) ** (-n - (1 + theta) / 2)

    out: dict = {"m": m, "delta": delta, "Y_index": list(lat.index), "absY": absY}
    pieces_n, pieces_nt = [], []
    for sgn, tag in ((1, "plus"), (-1, "minus")):
        _, piece = strip_disk(W, sgn * Y, spec.rm)
        hn = sobolev_norm(piece, n)
        hnt = sobolev_norm(piece, n + theta)
        pieces_n.append(hn)
        pieces_nt.append(hnt)
        l1 = Cp * float(np.sum((1 + np.linalg.norm(piece.vectors, axis=1)) ** (n + theta) * np.abs(piece.coeffs))) if len(piece) else 0.0
        count = _disk_count(lattice, sgn * Y, spec.rm)
        s2 = Cp * (1 + absY + spec.rm) ** theta * math.sqrt(count) / math.sqrt(v) * hn
        s3 = spec.a / (4 * math.sqrt(math.pi)) * (9 / 8) ** theta * Cp * (1 + absY) ** theta * lnm**0.75 * hn
        out[f"transfer_chain_{tag}"] = {
            "norm_to_l1": _check(hnt, l1),
            "l1_to_count": _check(l1, s2),
            "count_to_final": _check(s2, s3),
            "overall": _check(hnt, s3),
            "count": count,
            "count_bound": _check(count, v / math.pi * spec.rm**2),
        }
    out["piece_norm_bound"] = _check(sum(pieces_n), delta / m / math.sqrt(lnm) * normW)
    smooth_rhs = m ** (theta - 1) * lnm ** ((1 + 3 * theta) / 4) * normW
    out["piece_smooth_bound"] = _check(sum(pieces_nt), delta * smooth_rhs)
    mode = 2 * Cp * A * (1 + absY) ** (n + theta)
    stripped, _ = strip_disk(W, Y, spec.rm)
    stripped, _ = strip_disk(stripped, -Y, spec.rm)
    pair = FourierPotential.plane_wave_pair(lattice, lat.index[0], lat.index[1], A)
    dist = sobolev_norm(W - (stripped + pair), n + theta)
    out["distance_exact"] = _check(dist, sum(pieces_nt) + mode)
    out["distance_bound"] = _check(
        sum(pieces_nt) + mode,
        smooth_rhs + 2 * Cp * A * (1 + 9 / 8 * spec.Rm) ** (n + theta),
    )
    return out
