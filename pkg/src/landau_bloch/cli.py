"""``landau-bloch`` command line: ``bands``, ``criterion``, ``perturb``, ``verify``.

Settings are resolved in three layers: built-in defaults, the JSON file
given by ``--config``, then explicit flags.  The resolved configuration is
hashed (SHA-256 of its canonical JSON) and the hash is embedded in every
output file, so a result can always be traced to its inputs.  Outputs carry
no timestamps or absolute paths; identical inputs give identical bytes.

Exit codes: 0 success, 1 configuration or input error, 2 numerical
failure, 3 a verification inequality failed.
"""

from __future__ import annotations

import argparse
import copy
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import bands as bands_mod
from . import criterion as crit_mod
from . import genericity as pert_mod
from .errors import ConfigError, LandauBlochError, VerificationError
from .fiber import FiberAssembler
from .lattice import flux_from_config
from .oracles import oracle_basis, quadrature_coupling
from .potential import (
    FourierPotential,
    c_criterion,
    cosine_potential,
    dump_potential,
    lacunary_potential,
    load_potential,
    random_potential,
)
from .verify import SUITES, run_suite

DEFAULTS = {
    "lattice": {"E1": [1.0, 0.0], "E2": [0.0, 1.0], "P": 1, "Q": 1},
    "potential": None,
    "generator": None,
    "seed": 0,
    "oracle": False,
    "bands": {"M": 8, "grid": [8, 8], "tol": 1e-6, "extra": 4},
    "criterion": {"n": 0, "Rmax": 60.0, "windows": 4, "shell_width": None, "badset": None},
    "perturb": {"n": 0, "theta": 0.5, "delta": 1.0, "m": None, "m_range": [2, 200],
                "n_angles": 256, "weight": "n"},
    "verify": {"suite": "all"},
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, val in override.items():
        if key not in out:
            raise ConfigError(f"unknown configuration key {key!r}")
        if isinstance(out[key], dict) and isinstance(val, dict):
            out[key] = _merge(out[key], val) if key != "lattice" else {**out[key], **val}
        else:
            out[key] = val
    return out


def config_hash(cfg: dict) -> str:
    text = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def _dumps(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON configuration file")
    common.add_argument("--potential", help="coefficient file with lines 'n1 n2 re im'")
    common.add_argument("--gen", dest="generator",
                        help="generated potential: zero | cosine[:n1,n2[,amp]] | lacunary:J | random:R")
    common.add_argument("--out", type=Path, default=Path("."), help="output directory")
    common.add_argument("--seed", type=int, help="seed for random sampling")
    common.add_argument("--oracle", action="store_true", default=None, help="also run quadrature cross-checks")

    parser = _Parser(prog="landau-bloch", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("bands", parents=[common], help="band sweep and truncation certificate")
    p.add_argument("--M", type=int)
    p.add_argument("--grid", type=int, nargs=2, metavar=("N1", "N2"))
    p.add_argument("--tol", type=float)

    p = sub.add_parser("criterion", parents=[common], help="Fourier criterion scan and growth verdict")
    p.add_argument("--n", type=int)
    p.add_argument("--rmax", dest="Rmax", type=float)
    p.add_argument("--windows", type=int)

    p = sub.add_parser("perturb", parents=[common], help="one constructive perturbation step")
    p.add_argument("--n", type=int)
    p.add_argument("--theta", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--m", type=int)
    p.add_argument("--n-angles", dest="n_angles", type=int)

    p = sub.add_parser("verify", parents=[common], help="lemma-level property suites")
    p.add_argument("suite", nargs="?", help=f"one of {', '.join(SUITES + ('all',))}")
    return parser


def resolve_config(args: argparse.Namespace) -> dict:
    cfg = copy.deepcopy(DEFAULTS)
    if args.config is not None:
        try:
            user = json.loads(Path(args.config).read_text())
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {args.config}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from None
        cfg = _merge(cfg, user)
    for key in ("potential", "generator", "seed", "oracle"):
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    section = cfg.get(args.command, {})
    for key in section:
        val = getattr(args, key, None)
        if val is not None:
            section[key] = list(val) if isinstance(val, (list, tuple)) else val
    return cfg


def load_inputs(cfg: dict):
    flux = flux_from_config(cfg["lattice"])
    lattice = flux.lattice
    if cfg["potential"] and cfg["generator"]:
        raise ConfigError("give either a potential file or a generator, not both")
    if cfg["potential"]:
        path = Path(cfg["potential"])
        try:
            text = path.read_text(encoding="utf-8")
        except FileNotFoundError:
            raise ConfigError(f"potential file not found: {path}") from None
        V = load_potential(text, lattice)
        provenance = {"potential_sha256": hashlib.sha256(text.encode()).hexdigest()}
    else:
        V = generate_potential(cfg["generator"] or "zero", lattice, cfg["seed"])
        provenance = {}
    return flux, V, provenance


def generate_potential(spec: str, lattice, seed: int) -> FourierPotential:
    name, _, arg = spec.partition(":")
    try:
        if name == "zero":
            return FourierPotential.zero(lattice)
        if name == "cosine":
            parts = [float(x) for x in arg.split(",")] if arg else []
            n1, n2 = (int(parts[0]), int(parts[1])) if len(parts) >= 2 else (1, 0)
            amp = parts[2] if len(parts) >= 3 else 1.0
            return cosine_potential(lattice, n1, n2, amp)
        if name == "lacunary":
            return lacunary_potential(lattice, int(arg or 6))
        if name == "random":
            rng = np.random.default_rng(seed)
            return random_potential(lattice, rng, float(arg or 20.0), decay=1.0)
    except ValueError as exc:
        raise ConfigError(f"bad generator argument in {spec!r}: {exc}") from None
    raise ConfigError(f"unknown generator {spec!r}")


class Run:
    """Output sink that stamps every file with the configuration hash."""

    def __init__(self, cfg: dict, out: Path, provenance: dict):
        self.cfg = cfg
        self.out = out
        self.provenance = provenance
        self.hash = config_hash({"config": cfg, **provenance})
        out.mkdir(parents=True, exist_ok=True)

    def write_text(self, name: str, text: str):
        (self.out / name).write_text(text, encoding="utf-8")

    def write_json(self, name: str, payload: dict):
        payload = {**payload, "config": self.cfg, "config_sha256": self.hash, **self.provenance}
        self.write_text(name, _dumps(payload))

    def comment(self) -> str:
        return f"config_sha256={self.hash}"


def cmd_bands(cfg: dict, run: Run, flux, V) -> int:
    opt = cfg["bands"]
    surface = bands_mod.sweep(flux, V, int(opt["M"]), tuple(opt["grid"]))
    run.write_text("bands.csv", bands_mod.bands_csv(surface, run.comment()))
    cert = bands_mod.truncation_certificate(surface, int(opt["extra"]))
    flat = bands_mod.flat_band_candidates(surface, float(opt["tol"]))
    widths = bands_mod.band_widths(surface)
    run.write_json("bands_certificate.json", {
        "certificate": cert.to_dict(),
        "widths": widths[:, 2],
        "flat_bands": [f.__dict__ for f in flat],
    })
    print(f"bands: {surface.n_bands} bands on {surface.grid[0]}x{surface.grid[1]} grid; "
          f"M vs M+{opt['extra']} deviation {cert.max_deviation:.3e}; {len(flat)} flat interior band(s)")
    if cfg["oracle"]:
        M = int(opt["M"])
        k = surface.kpoints[0]
        basis = oracle_basis(flux, k, M)
        fac = FiberAssembler(flux, V, M).coupling(k, basis)
        quad = quadrature_coupling(basis, V, M)
        dev = float(np.max(np.abs(fac - quad)))
        run.write_json("bands_oracle.json", {"k": k, "M": M, "max_deviation": dev})
        print(f"oracle: factorized vs quadrature max deviation {dev:.3e}")
    return 0


def cmd_criterion(cfg: dict, run: Run, flux, V) -> int:
    opt = cfg["criterion"]
    report = crit_mod.scan(V, flux, int(opt["n"]), float(opt["Rmax"]), opt["shell_width"])
    verdict = crit_mod.growth_verdict(report, int(opt["windows"]))
    run.write_text("criterion.csv", report.to_csv(run.comment()))
    payload = {"n": report.n, "B": report.B, "Rmax": report.Rmax, "shell_width": report.shell_width}
    payload.update(verdict.to_dict())
    if opt["badset"]:
        spec = crit_mod.BadSetSpec(**opt["badset"])
        diag = crit_mod.badset_check(V, flux, report.n, spec, report, **_band_opts(cfg))
        payload["badset"] = diag.to_dict()
    run.write_json("criterion_verdict.json", payload)
    # last maximizer: among +/-Y ties this reports the positive-index row
    i = len(report.weighted) - 1 - int(np.argmax(report.weighted[::-1]))
    print(f"criterion: {len(report.C)} rows; peak weightedC {report.weighted[i]:.6g} at "
          f"({report.indices[i, 0]},{report.indices[i, 1]}); verdict {verdict.verdict}")
    return 0


def _band_opts(cfg):
    b = cfg["bands"]
    return {"M": int(b["M"]), "grid": tuple(b["grid"]), "tol": float(b["tol"])}


def cmd_perturb(cfg: dict, run: Run, flux, V) -> int:
    opt = cfg["perturb"]
    n, theta, delta = int(opt["n"]), float(opt["theta"]), float(opt["delta"])
    m = opt["m"]
    if m is None:
        lo, hi = opt["m_range"]
        adm = pert_mod.admissible_m(V, n, delta, range(int(lo), int(hi) + 1), opt["weight"])
        if not adm:
            raise ConfigError(f"no admissible shell index in [{lo}, {hi}]")
        m = adm[0]
    rec = pert_mod.perturb(V, flux, n, theta, int(m), int(opt["n_angles"]), delta, opt["weight"])
    payload = rec.to_dict()
    rescan = c_criterion(rec.W_m, flux.B, rec.Y)
    payload["rescan_C"] = rescan
    if cfg["oracle"]:
        payload["diagnostic"] = pert_mod.stripping_diagnostic(V, n, theta, int(m), delta, int(opt["n_angles"]), opt["weight"])
    run.write_json("perturb_record.json", payload)
    run.write_text("perturbed_potential.txt", dump_potential(rec.W_m, run.comment()))
    print(f"perturb: m={rec.m} Y=({rec.lattice_choice.index[0]},{rec.lattice_choice.index[1]}) "
          f"A={rec.amplitude:.6g} |Y|^(n+1) C={rec.weighted:.6g} distance={rec.distance:.6g} "
          f"all checks {'pass' if rec.all_pass else 'FAIL'}")
    if not rec.all_pass:
        failed = [k for k, c in rec.checks.items() if not c["pass"]]
        raise VerificationError(f"verification failed: {', '.join(failed)}")
    return 0


def cmd_verify(cfg: dict, run: Run, flux, V) -> int:
    suite = cfg["verify"]["suite"] or "all"
    if suite not in SUITES + ("all",):
        raise ConfigError(f"unknown suite {suite!r}; choose from {', '.join(SUITES + ('all',))}")
    checks = run_suite(suite, seed=int(cfg["seed"]), lattice=flux.lattice)
    run.write_json(f"verify_{suite}.json", {
        "suite": suite,
        "checks": [c.to_dict() for c in checks],
        "all_pass": all(c.passed for c in checks),
    })
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.suite:7s} {c.name}: {c.value:.3e} (threshold {c.threshold:g})")
    failed = [c.name for c in checks if not c.passed]
    if failed:
        raise VerificationError(f"{len(failed)} check(s) failed")
    return 0


COMMANDS = {"bands": cmd_bands, "criterion": cmd_criterion, "perturb": cmd_perturb, "verify": cmd_verify}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = resolve_config(args)
        flux, V, provenance = load_inputs(cfg)
        run = Run(cfg, args.out, provenance)
        return COMMANDS[args.command](cfg, run, flux, V)
    except LandauBlochError as exc:
        print(f"landau-bloch: error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
