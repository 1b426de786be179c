import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from landau_bloch import (
    FourierPotential,
    OffLatticeError,
    PotentialFormatError,
    ShellSpec,
    c_criterion,
    directed_shell_energy,
    dump_potential,
    evaluate,
    lacunary_potential,
    load_potential,
    random_potential,
    shell_energy,
    sobolev_norm,
    strip_disk,
)
from landau_bloch.lattice import TWO_PI, build_lattice, points_in_disk
from landau_bloch.potential import c_criterion_many, lipschitz_constant

from reference_values import C_COS_AT_Y00, C_COS_AT_Y10, SOBOLEV_COS_S1


def test_load_symmetrizes(square):
    V = load_potential("1 0 1 0\n", square)
    assert V.as_dict() == {(-1, 0): 1, (1, 0): 1}
    assert V.mean == 0


def test_load_rejects_inconsistent_conjugates(square):
    with pytest.raises(PotentialFormatError):
        load_potential("1 0 0 1\n-1 0 0 1\n", square)


def test_load_accepts_consistent_pair_and_comments(square):
    V = load_potential("# header\n1 2 0.5 -0.25   # inline\n-1 -2 0.5 0.25\n0 0 3 0\n", square)
    assert V.coefficient(1, 2) == 0.5 - 0.25j
    assert V.coefficient(-1, -2) == 0.5 + 0.25j
    assert V.mean == 3


@pytest.mark.parametrize("text", ["1 0 1\n", "a b c d\n", "1 0 1 0\n1 0 1 0\n", "0 0 0 1\n"])
def test_load_rejects_malformed(square, text):
    with pytest.raises(PotentialFormatError):
        load_potential(text, square)


def test_load_empty_is_zero(square):
    V = load_potential("", square)
    assert len(V) == 0 and V.mean == 0


def test_dump_round_trip(square, rng):
    V = random_potential(square, rng, 15.0, decay=0.5)
    W = load_potential(dump_potential(V, "hdr"), square)
    assert W.as_dict() == V.as_dict()


def test_sobolev_examples(square, cosV):
    single = FourierPotential.from_dict(square, {(1, 0): 1.0})
    assert sobolev_norm(single, 0) == pytest.approx(1.0)
    assert sobolev_norm(cosV, 0) == pytest.approx(math.sqrt(2))
    assert sobolev_norm(cosV, 1) == pytest.approx(SOBOLEV_COS_S1, rel=1e-14)
    with pytest.raises(ValueError):
        sobolev_norm(cosV, -0.5)


def test_sobolev_parseval_and_monotone(oblique, rng):
    V = random_potential(oblique, rng, 20.0)
    l2 = math.sqrt(oblique.cell_area * np.sum(np.abs(V.coeffs) ** 2))
    assert sobolev_norm(V, 0) == pytest.approx(l2, rel=1e-14)
    values = [sobolev_norm(V, s) for s in np.linspace(0, 3, 13)]
    assert all(b >= a for a, b in zip(values, values[1:]))


def test_evaluate_examples(square, cosV):
    assert evaluate(cosV, (0.0, 0.0)) == pytest.approx(2.0)
    assert evaluate(cosV, (0.25, 0.0)) == pytest.approx(0.0, abs=1e-15)
    assert evaluate(FourierPotential.zero(square), (0.3, 0.1)) == 0.0


def test_evaluate_matches_cosine_grid(cosV):
    x = np.random.default_rng(1).random((50, 2))
    np.testing.assert_allclose(evaluate(cosV, x), 2 * np.cos(TWO_PI * x[:, 0]), atol=1e-13)


def test_c_criterion_examples(square, cosV):
    B = TWO_PI
    assert c_criterion(cosV, B, (TWO_PI, 0)) == pytest.approx(C_COS_AT_Y10, abs=1e-12)
    assert c_criterion(cosV, B, (0, 0)) == pytest.approx(C_COS_AT_Y00, abs=1e-12)
    assert c_criterion(FourierPotential.zero(square), B, (TWO_PI, TWO_PI)) == 0.0
    with pytest.raises(OffLatticeError):
        c_criterion(cosV, B, (1.0, 0.0))


def test_c_criterion_independent_sum(oblique, rng):
    """Row-by-row comparison with an explicit double loop."""
    V = random_potential(oblique, rng, 12.0)
    B = 4.0
    _, Ys = points_in_disk(oblique, (0, 0), 20.0)
    got = c_criterion_many(V, B, Ys)
    d = V.as_dict()
    for Y, g in zip(Ys, got):
        own = 0.0
        rest = 0.0
        for key, c in d.items():
            Yp = oblique.fourier_vector(*key)
            if np.allclose(Yp, Y, atol=1e-9):
                own = abs(c)
            else:
                rest += abs(c) * math.exp(-np.sum((Yp - Y) ** 2) / (4 * B))
        assert g == pytest.approx(own - rest, abs=1e-13)


def test_c_criterion_lower_bound(oblique, rng):
    V = random_potential(oblique, rng, 12.0)
    _, Ys = points_in_disk(oblique, (0, 0), 25.0)
    C = c_criterion_many(V, 3.0, Ys)
    assert np.all(C >= -np.sum(np.abs(V.coeffs)) - 1e-12)


def test_c_criterion_isolated_pair(square):
    V = FourierPotential.plane_wave_pair(square, 40, 0, 0.7)
    assert c_criterion(V, TWO_PI, square.fourier_vector(40, 0)) == pytest.approx(1.4 / 2, abs=1e-15)


def test_strip_disk_examples(square, cosV):
    kept, removed = strip_disk(cosV, (TWO_PI, 0), 1.0)
    assert removed.as_dict() == {(1, 0): 1}
    kept2, removed2 = strip_disk(cosV, (100.0, 0), 0.0)
    assert len(removed2) == 0 and kept2.as_dict() == cosV.as_dict()
    final, _ = strip_disk(kept, (-TWO_PI, 0), 1.0)
    assert len(final) == 0


def test_strip_disk_partition(oblique, rng):
    V = random_potential(oblique, rng, 25.0)
    kept, removed = strip_disk(V, oblique.fourier_vector(2, -1), 9.0)
    assert not set(kept.as_dict()) & set(removed.as_dict())
    assert (kept + removed).as_dict() == V.as_dict()


def test_shell_spec_unit_square(square):
    s = ShellSpec.for_lattice(square, 2)
    assert s.rm == pytest.approx(math.pi * math.sqrt(2), abs=1e-12)
    assert s.Rm == pytest.approx(2 * s.a * math.log(2) ** 0.75)
    with pytest.raises(ValueError):
        ShellSpec.for_lattice(square, 1)


@pytest.mark.parametrize("m", [2, 3, 7, 50, 400])
def test_shell_separation(square, m):
    a, b = ShellSpec.for_lattice(square, m), ShellSpec.for_lattice(square, m + 1)
    assert b.Rm - a.Rm > a.rpm + b.rpm


def test_shell_energy_examples(square, cosV):
    s = ShellSpec.for_lattice(square, 2)
    assert shell_energy(cosV, s, 0) == 0.0
    # a mode sitting on the shell radius (lattice-rounded) inside the annulus
    one = FourierPotential.from_dict(square, {(6, 0): 1.0})
    assert shell_energy(one, s, 0) == 1.0
    two = FourierPotential.from_dict(square, {(6, 0): 1.0, (0, -6): 1j})
    assert shell_energy(two, s, 0) == 2.0
    assert shell_energy(one, s, 1) == pytest.approx((1 + 12 * math.pi) ** 2)
    assert shell_energy(one, s, 0, weight="m") == pytest.approx((1 + 12 * math.pi) ** 4)


def test_directed_energy_closed_boundary(square):
    s = ShellSpec.for_lattice(square, 2)
    x = np.array([s.Rm, 0.0])
    assert directed_shell_energy(FourierPotential.zero(square), s, 0, x) == 0.0
    one = FourierPotential.from_dict(square, {(6, 0): 1.0})
    assert directed_shell_energy(one, s, 1, x) == pytest.approx((1 + 12 * math.pi) ** 2)
    with pytest.raises(ValueError):
        directed_shell_energy(one, s, 0, x * 1.01)


def test_directed_energy_is_subset_sum(square, rng):
    V = random_potential(square, rng, 45.0)
    s = ShellSpec.for_lattice(square, 2)
    for t in np.linspace(0, 2 * np.pi, 17):
        x = s.Rm * np.array([np.cos(t), np.sin(t)])
        assert directed_shell_energy(V, s, 0, x) <= shell_energy(V, s, 0) + 1e-12


def test_lipschitz_constant_square(square):
    one_d = sum(math.exp(-(TWO_PI * j) ** 2 / (4 * math.pi)) for j in range(-20, 21))
    assert lipschitz_constant(square, TWO_PI) == pytest.approx(one_d, rel=1e-14)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.5, 30.0))
def test_lemma6_lipschitz(seed, B):
    lat = build_lattice((1.1, 0.0), (0.3, 0.8))
    rng = np.random.default_rng(seed)
    W1 = random_potential(lat, rng, 15.0)
    W2 = random_potential(lat, rng, 10.0)
    _, Ys = points_in_disk(lat, (0, 0), 30.0)
    diff = np.max(np.abs(c_criterion_many(W1, B, Ys) - c_criterion_many(W2, B, Ys)))
    assert diff <= lipschitz_constant(lat, B) * sobolev_norm(W1 - W2, 0) * (1 + 1e-12)


def test_lacunary_family(square):
    V = lacunary_potential(square, 6)
    assert len(V) == 12
    for j in range(1, 7):
        assert V.coefficient(2**j, 0) == pytest.approx((TWO_PI * 2**j) ** -0.5)
    assert V.truncation_radius == pytest.approx(TWO_PI * 64)


def test_random_potential_is_real(oblique, rng):
    V = random_potential(oblique, rng, 18.0)
    assert V.hermitian_defect() == 0.0
    assert np.max(np.abs(np.imag([evaluate(V, (0.1 * i, 0.3)) for i in range(3)]))) == 0.0


def test_constant_shift(square, cosV):
    W = cosV.shifted(2.5)
    assert W.mean == 2.5
    assert evaluate(W, (0.0, 0.0)) == pytest.approx(4.5)
