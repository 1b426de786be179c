import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from landau_bloch import ConfigError, GeometryError, OffLatticeError, build_lattice, make_flux, points_in_disk
from landau_bloch.lattice import TWO_PI, flux_from_config, lattice_gaussian_sum

coord = st.floats(-3, 3, allow_nan=False)


def test_unit_square_reciprocal(square):
    np.testing.assert_allclose(square.E1s, [1, 0], atol=1e-15)
    np.testing.assert_allclose(square.E2s, [0, 1], atol=1e-15)
    assert square.cell_area == pytest.approx(1.0, abs=1e-15)
    assert square.diam_kstar == pytest.approx(math.sqrt(2), abs=1e-15)


def test_sheared_lattice_by_hand():
    lat = build_lattice((2, 0), (1, 1))
    np.testing.assert_allclose(lat.E1s, [0.5, -0.5], atol=1e-15)
    np.testing.assert_allclose(lat.E2s, [0, 1], atol=1e-15)
    assert lat.cell_area == pytest.approx(2.0)


def test_rotated_square_normalizes_to_unit_square(square):
    lat = build_lattice((0, 1), (-1, 0))
    np.testing.assert_allclose(lat.E1, square.E1, atol=1e-15)
    np.testing.assert_allclose(lat.E2, square.E2, atol=1e-15)


def test_reflection_applied_for_negative_orientation():
    lat = build_lattice((1, 0), (0.3, -2))
    assert lat.E1[1] == 0 and lat.E1[0] > 0 and lat.E2[1] > 0
    assert lat.cell_area == pytest.approx(2.0)


def test_degenerate_basis_rejected():
    with pytest.raises(GeometryError):
        build_lattice((1, 2), (2, 4))


@settings(max_examples=100, deadline=None)
@given(coord, coord, coord, coord)
def test_biorthogonality_random_bases(a, b, c, d):
    if abs(a * d - b * c) < 1e-2:
        return
    lat = build_lattice((a, b), (c, d))
    assert lat.biorthogonality_residual() < 1e-12
    assert lat.cell_area * lat.reciprocal_cell_area == pytest.approx(1.0, abs=1e-12)
    assert lat.E1[1] == 0 and lat.E1[0] > 0 and lat.E2[1] > 0


@pytest.mark.parametrize(
    "P,Q,B",
    [(1, 1, TWO_PI), (1, 2, math.pi), (3, 1, 3 * TWO_PI)],
)
def test_flux_field_strength(square, P, Q, B):
    f = make_flux(square, P, Q)
    assert f.B == pytest.approx(B, rel=1e-15)
    assert f.enlarged_flux() == pytest.approx(P, abs=1e-12)
    assert f.eta.numerator == P and f.eta.denominator == Q


def test_enlarged_basis(square):
    f = make_flux(square, 1, 2)
    np.testing.assert_allclose(f.Etilde1, [2, 0])
    np.testing.assert_allclose(f.Etilde2, [0, 1])
    assert f.Etilde1 @ f.Etilde1s == pytest.approx(1.0)
    assert f.Etilde1 @ f.Etilde2s == pytest.approx(0.0)


@pytest.mark.parametrize("P,Q", [(2, 4), (0, 1), (1, 0), (-1, 1)])
def test_invalid_flux_rejected(square, P, Q):
    with pytest.raises(ConfigError):
        make_flux(square, P, Q)


def test_flux_config_round_trip():
    block = {"E1": [0.0, 1.0], "E2": [-1.0, 0.5], "P": 2, "Q": 3}
    f = flux_from_config(block)
    g = flux_from_config(f.to_config())
    np.testing.assert_allclose(g.lattice.E1, f.lattice.E1, atol=1e-14)
    np.testing.assert_allclose(g.lattice.E2, f.lattice.E2, atol=1e-14)
    with pytest.raises(ConfigError):
        flux_from_config({"E1": [1, 0]})


def test_points_in_disk_examples(square):
    idx, Y = points_in_disk(square, (0, 0), 7)
    assert sorted(map(tuple, idx)) == [(-1, 0), (0, -1), (0, 0), (0, 1), (1, 0)]
    idx, _ = points_in_disk(square, (0, 0), 0)
    assert list(map(tuple, idx)) == [(0, 0)]
    idx, _ = points_in_disk(square, (37.70, 0), 2.2)
    assert (6, 0) in map(tuple, idx)


def test_points_in_disk_lexicographic(oblique):
    idx, _ = points_in_disk(oblique, (3.0, -1.0), 30)
    keys = [tuple(i) for i in idx]
    assert keys == sorted(keys)


@settings(max_examples=50, deadline=None)
@given(st.floats(-40, 40), st.floats(-40, 40), st.floats(0, 25))
def test_points_in_disk_matches_brute_force(cx, cy, r):
    lat = build_lattice((1.3, 0.2), (0.4, 0.9))
    idx, _ = points_in_disk(lat, (cx, cy), r)
    n = np.arange(-60, 61)
    n1, n2 = np.meshgrid(n, n, indexing="ij")
    Y = lat.fourier_vector(n1.ravel(), n2.ravel())
    d = np.linalg.norm(Y - [cx, cy], axis=1)
    # avoid points sitting on the boundary within the closed-disk slack
    if np.any(np.abs(d - r) < 1e-9):
        return
    assert len(idx) == int(np.sum(d <= r))


@pytest.mark.parametrize("r_factor", [1.0, 1.5, 3.0, 10.0])
def test_counting_bound(square, oblique, r_factor):
    for lat in (square, oblique):
        r = r_factor * math.pi * lat.diam_kstar
        for center_idx in [(0, 0), (3, -2)]:
            Yc = lat.fourier_vector(*center_idx)
            count = len(points_in_disk(lat, Yc, r)[0])
            assert count <= lat.cell_area * r**2 / math.pi


def test_fourier_index_off_lattice(square):
    assert square.fourier_index((TWO_PI * 3, -TWO_PI)) == (3, -1)
    with pytest.raises(OffLatticeError):
        square.fourier_index((1.0, 0.0))


def test_lattice_gaussian_sum_square(square):
    # the unit-square sum factorizes into a product of one-dimensional theta sums
    width = 4 * math.pi
    one_d = sum(math.exp(-(TWO_PI * j) ** 2 / width) for j in range(-20, 21))
    assert lattice_gaussian_sum(square, width) == pytest.approx(one_d**2, rel=1e-15)
