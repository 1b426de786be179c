import csv
import json

import numpy as np
import pytest

from landau_bloch import cli, load_potential, scan
from landau_bloch.lattice import build_lattice, make_flux
from landau_bloch.verify import Check, run_suite

from reference_values import AMPLITUDE_M2, WEIGHTED_COS_AT_Y10


def _rows(path):
    lines = [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def _run(tmp_path, *argv):
    return cli.main([*argv, "--out", str(tmp_path)])


def test_bands_zero_potential(tmp_path):
    assert _run(tmp_path, "bands", "--M", "4", "--grid", "3", "3") == 0
    text = (tmp_path / "bands.csv").read_text()
    assert text.startswith("# config_sha256=")
    data = np.array([[float(v) for v in r.values()] for r in _rows(tmp_path / "bands.csv")])
    assert np.all(np.ptp(data[:, 2:], axis=0) < 1e-9)
    cert = json.loads((tmp_path / "bands_certificate.json").read_text())
    assert cert["config_sha256"] in text
    assert "max_deviation" in cert["certificate"]


def test_bands_oracle(tmp_path):
    assert _run(tmp_path, "bands", "--gen", "cosine", "--M", "6", "--grid", "2", "2", "--oracle") == 0
    payload = json.loads((tmp_path / "bands_oracle.json").read_text())
    assert payload["max_deviation"] < 1e-6


def test_missing_potential_file(tmp_path, capsys):
    assert _run(tmp_path, "bands", "--potential", str(tmp_path / "nope.txt")) == 1
    assert "not found" in capsys.readouterr().err


def test_bad_generator_and_flags(tmp_path):
    assert _run(tmp_path, "criterion", "--gen", "sawtooth") == 1
    assert _run(tmp_path, "criterion", "--rmax", "abc") == 1
    assert _run(tmp_path, "verify", "bogus") == 1


def test_config_file_layering(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"lattice": {"P": 3}, "bands": {"M": 3, "grid": [2, 2]}}))
    assert _run(tmp_path, "bands", "--config", str(cfg), "--M", "2") == 0
    out = json.loads((tmp_path / "bands_certificate.json").read_text())
    assert out["config"]["lattice"]["P"] == 3
    assert out["config"]["bands"]["M"] == 2 and out["config"]["bands"]["grid"] == [2, 2]
    cfg.write_text(json.dumps({"colour": 1}))
    assert _run(tmp_path, "bands", "--config", str(cfg)) == 1


def test_criterion_zero(tmp_path):
    assert _run(tmp_path, "criterion", "--rmax", "20") == 0
    assert all(float(r["C"]) == 0.0 for r in _rows(tmp_path / "criterion.csv"))
    v = json.loads((tmp_path / "criterion_verdict.json").read_text())
    assert v["verdict"] == "bounded-evidence"


def test_criterion_cosine_peak(tmp_path, capsys):
    assert _run(tmp_path, "criterion", "--gen", "cosine") == 0
    rows = _rows(tmp_path / "criterion.csv")
    w = np.array([float(r["weightedC"]) for r in rows])
    assert w.max() == pytest.approx(WEIGHTED_COS_AT_Y10, abs=1e-12)
    assert "at (1,0)" in capsys.readouterr().out


def test_criterion_lacunary(tmp_path):
    assert _run(tmp_path, "criterion", "--gen", "lacunary:6", "--rmax", "410") == 0
    v = json.loads((tmp_path / "criterion_verdict.json").read_text())
    assert v["verdict"] == "increasing-evidence"


def test_criterion_badset(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"criterion": {"badset": {"S1": 1.0, "S2": 10.0, "S3": 20.0}},
                               "bands": {"M": 4, "grid": [2, 2]}}))
    assert _run(tmp_path, "criterion", "--config", str(cfg)) == 0
    v = json.loads((tmp_path / "criterion_verdict.json").read_text())
    assert v["badset"]["member"] is True


def test_perturb_cosine_round_trip(tmp_path):
    assert _run(tmp_path, "perturb", "--gen", "cosine", "--m", "2", "--oracle") == 0
    rec = json.loads((tmp_path / "perturb_record.json").read_text())
    assert rec["amplitude"] == pytest.approx(AMPLITUDE_M2, rel=1e-15)
    assert rec["all_pass"] and rec["rescan_C"] == rec["C"]
    assert "piece_norm_bound" in rec["diagnostic"]
    text = (tmp_path / "perturbed_potential.txt").read_text()
    assert text.startswith("# config_sha256=")
    flux = make_flux(build_lattice((1.0, 0.0), (0.0, 1.0)), 1, 1)
    W = load_potential(text, flux.lattice)
    r = scan(W, flux, 0, rec["absY"] + 1)
    i = np.flatnonzero((r.indices[:, 0] == rec["Y_index"][0]) & (r.indices[:, 1] == rec["Y_index"][1]))[0]
    assert r.C[i] == rec["C"]


def test_perturb_auto_m(tmp_path):
    assert _run(tmp_path, "perturb", "--gen", "random:30", "--seed", "4") == 0
    rec = json.loads((tmp_path / "perturb_record.json").read_text())
    assert rec["inputs"]["m"] >= 2


def test_perturb_inadmissible_exit_2(tmp_path):
    pot = tmp_path / "v.txt"
    pot.write_text("-6 0 1 0\n6 0 1 0\n")
    assert _run(tmp_path, "perturb", "--potential", str(pot), "--m", "2") == 2


def test_potential_hash_recorded(tmp_path):
    pot = tmp_path / "v.txt"
    pot.write_text("1 0 1 0\n")
    assert _run(tmp_path, "criterion", "--potential", str(pot), "--rmax", "10", "--windows", "2") == 0
    assert "potential_sha256" in json.loads((tmp_path / "criterion_verdict.json").read_text())


def test_verify_suite(tmp_path):
    assert _run(tmp_path, "verify", "lemma3") == 0
    out = json.loads((tmp_path / "verify_lemma3.json").read_text())
    assert out["all_pass"]
    assert any("violations of 1000" in c["name"] and c["value"] == 0 for c in out["checks"])


def test_verify_failure_exit_3(tmp_path, monkeypatch):
    monkeypatch.setattr(cli, "run_suite", lambda *a, **k: [Check("x", "forced", 1.0, 0.0, False)])
    assert _run(tmp_path, "verify", "graded") == 3


def test_verify_all_matches_individual():
    full = run_suite("all", seed=5)
    parts = [c for s in ("ladder", "lemma2", "lemma3", "eq5", "graded", "lemma6") for c in run_suite(s, seed=5)]
    assert [c.value for c in full] == [c.value for c in parts]
    assert all(c.passed for c in full)


@pytest.mark.parametrize("argv", [
    ["bands", "--gen", "cosine", "--M", "5", "--grid", "3", "3"],
    ["criterion", "--gen", "random:15", "--seed", "2"],
    ["perturb", "--gen", "cosine", "--m", "3"],
])
def test_byte_identical_reruns(tmp_path, argv):
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main([*argv, "--out", str(a)]) == 0
    assert cli.main([*argv, "--out", str(b)]) == 0
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir())
    for name in names:
        assert (a / name).read_bytes() == (b / name).read_bytes()
