import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from landau_bloch import FourierPotential, InadmissibleShellError, c_criterion, random_potential
from landau_bloch.errors import NumericalError
from landau_bloch.genericity import (
    admissible_m,
    direction_bound,
    stripping_diagnostic,
    perturb,
    select_direction,
    select_Ym,
    shell_constants,
)
from landau_bloch.lattice import TWO_PI
from landau_bloch.potential import shell_energy, sobolev_norm

from reference_values import (
    ABS_Y_M2,
    AMPLITUDE_M2,
    DISTANCE_H_M2,
    DISTANCE_X_Y_M2,
    SHELL_A,
    SHELL_R2,
    SHELL_r2,
    WEIGHTED_M2,
)


def test_shell_constants_unit_square(square):
    s = shell_constants(square, 2)
    assert s.a == pytest.approx(SHELL_A, rel=1e-14)
    assert s.Rm == pytest.approx(SHELL_R2, rel=1e-14)
    assert s.rm == pytest.approx(SHELL_r2, rel=1e-14)
    assert s.rpm == pytest.approx(2 * SHELL_r2, rel=1e-14)
    with pytest.raises(ValueError):
        shell_constants(square, 1)


def test_admissible_zero_and_cosine(square, cosV):
    zero = FourierPotential.zero(square)
    assert admissible_m(zero, 0, 1.0, range(2, 12)) == list(range(2, 12))
    # the cosine modes sit at |Y| = 2 pi, inside no shell
    assert admissible_m(cosV, 0, 1.0, range(2, 30)) == list(range(2, 30))
    with pytest.raises(ValueError):
        admissible_m(cosV, 0, 0.0)


def test_admissible_excludes_loaded_shell(square):
    s5 = shell_constants(square, 5)
    n1 = round(s5.Rm / TWO_PI)
    V = FourierPotential.from_dict(square, {(n1, 0): 1.0, (-n1, 0): 1.0})
    ms = admissible_m(V, 0, 1.0, range(2, 12))
    assert 5 not in ms and 4 in ms and 6 in ms


def test_admissible_monotone_in_delta(square, rng):
    V = random_potential(square, rng, 120.0, decay=1.2)
    sets = [set(admissible_m(V, 0, d, range(2, 40))) for d in (0.1, 1.0, 10.0, 100.0)]
    assert all(a <= b for a, b in zip(sets, sets[1:]))


def test_direction_for_empty_shell(cosV):
    d = select_direction(cosV, 0, 2)
    assert d.angle == 0.0 and d.energy == 0.0
    np.testing.assert_allclose(d.x, (SHELL_R2, 0.0), rtol=1e-14)
    with pytest.raises(ValueError):
        select_direction(cosV, 0, 2, n_angles=32)


def test_direction_avoids_mode(square):
    s = shell_constants(square, 2)
    n1 = round(s.Rm / TWO_PI)
    V = FourierPotential.from_dict(square, {(n1, 0): 1.0, (-n1, 0): 1.0})
    d = select_direction(V, 0, 2)
    assert d.energy == 0.0
    assert d.angle == pytest.approx(math.pi / 2, abs=2 * math.pi / 256)
    assert d.bound == pytest.approx(direction_bound(s, shell_energy(V, s, 0)))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 6))
def test_direction_meets_averaging_bound(seed, m):
    from landau_bloch import build_lattice

    lat = build_lattice((1.0, 0.0), (0.35, 1.1))
    V = random_potential(lat, np.random.default_rng(seed), 80.0)
    d = select_direction(V, 0, m, n_angles=64)
    assert d.energy <= d.bound * (1 + 1e-12) + 1e-300


def test_select_Ym_examples(square):
    s = shell_constants(square, 2)
    c = select_Ym(square, (s.Rm, 0.0), s.rm, s)
    assert c.index == (6, 0)
    assert c.distance == pytest.approx(DISTANCE_X_Y_M2, rel=1e-13)
    assert c.bracket["lower"]["pass"] and c.bracket["upper"]["pass"]
    exact = select_Ym(square, (TWO_PI * 3, -TWO_PI), 1.0)
    assert exact.index == (3, -1) and exact.distance == 0.0
    # equidistant from (0,0) and (1,0): lexicographically smaller index wins
    assert select_Ym(square, (math.pi, 0.0), 4.0).index == (0, 0)
    with pytest.raises(NumericalError):
        select_Ym(square, (math.pi, math.pi), 1.0)


def test_perturb_cosine_m2(flux1, cosV):
    rec = perturb(cosV, flux1, 0, 0.5, 2)
    assert rec.all_pass
    assert rec.amplitude == pytest.approx(AMPLITUDE_M2, rel=1e-15)
    assert np.linalg.norm(rec.Y) == pytest.approx(ABS_Y_M2, rel=1e-15)
    assert rec.weighted == pytest.approx(WEIGHTED_M2, rel=1e-12)
    assert rec.distance == pytest.approx(DISTANCE_H_M2, rel=1e-13)
    # nothing of the cosine lies near +-Y, so the old modes survive untouched
    assert rec.W_m.coefficient(1, 0) == 1.0


@pytest.mark.parametrize("m", [2, 5, 10, 20])
def test_zero_potential_distance_closed_form(square, flux1, m):
    rec = perturb(FourierPotential.zero(square), flux1, 0, 0.5, m)
    absY = float(np.linalg.norm(rec.Y))
    expected = math.sqrt(2 * square.cell_area) * rec.amplitude * (1 + absY) ** 0.5
    assert rec.distance == pytest.approx(expected, rel=1e-13)
    assert rec.C == pytest.approx(rec.amplitude * (1 - math.exp(-absY**2 / flux1.B)), rel=1e-14)


def test_perturb_random_all_checks(flux_oblique, rng):
    V = random_potential(flux_oblique.lattice, rng, 60.0, decay=1.5)
    ms = admissible_m(V, 1, 1.0, range(2, 15))
    assert ms
    rec = perturb(V, flux_oblique, 1, 0.3, ms[0])
    assert rec.all_pass, {k: c for k, c in rec.checks.items() if not c["pass"]}
    assert rec.W_m.hermitian_defect() == 0.0
    # the record's C matches an independent evaluation of the new potential
    assert rec.C == c_criterion(rec.W_m, flux_oblique.B, rec.Y)


def test_perturb_rejects_inadmissible(square, flux1):
    s5 = shell_constants(square, 5)
    n1 = round(s5.Rm / TWO_PI)
    V = FourierPotential.from_dict(square, {(n1, 0): 1.0, (-n1, 0): 1.0})
    with pytest.raises(InadmissibleShellError):
        perturb(V, flux1, 0, 0.5, 5)
    rec = perturb(V, flux1, 0, 0.5, 5, require_admissible=False)
    assert not rec.checks["shell_energy_bound"]["pass"]
    with pytest.raises(ValueError):
        perturb(V, flux1, 0, 1.0, 3)


def test_record_json(flux1, cosV):
    payload = json.loads(perturb(cosV, flux1, 0, 0.5, 3).to_json({"extra": 1}))
    assert payload["extra"] == 1
    assert payload["Y_index"] == [int(round(payload["Y"][0] / TWO_PI)), 0]
    assert set(payload["checks"]) == {
        "shell_energy_bound", "direction_bound", "covering", "bracket_lower",
        "bracket_upper", "criterion_lower_bound", "hermitian",
    }


def test_rescan_matches_record(flux1, cosV):
    from landau_bloch import scan

    rec = perturb(cosV, flux1, 0, 0.5, 2)
    r = scan(rec.W_m, flux1, 0, float(np.linalg.norm(rec.Y)) + 1)
    i = np.flatnonzero((r.indices[:, 0] == rec.lattice_choice.index[0]) & (r.indices[:, 1] == rec.lattice_choice.index[1]))[0]
    assert r.weighted[i] == pytest.approx(rec.weighted, rel=1e-14)


def test_stripping_diagnostic_structure(square, rng):
    V = random_potential(square, rng, 200.0, decay=1.5)
    diag = stripping_diagnostic(V, 0, 0.5, 4, 1.0)
    for tag in ("plus", "minus"):
        chain = diag[f"transfer_chain_{tag}"]
        # the first two links are Cauchy-Schwarz and hold for any input
        assert chain["norm_to_l1"]["pass"] and chain["l1_to_count"]["pass"]
        assert chain["count_bound"]["pass"]
    assert diag["distance_exact"]["pass"]
    assert {"piece_norm_bound", "piece_smooth_bound", "distance_bound"} <= set(diag)


def test_distance_of_mode_alone(square, flux1):
    rec = perturb(FourierPotential.zero(square), flux1, 1, 0.25, 3)
    pair = rec.W_m
    assert rec.distance == pytest.approx(sobolev_norm(pair, 1.25), rel=1e-15)
