import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from induction_inverse.errors import ConfigError, ModeRangeError
from induction_inverse.lattice import (
    TorusLattice,
    dual_vector,
    enumerate_modes,
    laplacian_eigenvalue,
)


class TestConstruction:
    def test_valid(self):
        lat = TorusLattice((1.0, 2.0), (8, 4))
        assert lat.d == 2
        assert lat.truncation == (3, 1)
        assert lat.kmax_full == 1
        assert lat.volume == pytest.approx(2.0)

    @pytest.mark.parametrize(
        "L, N",
        [
            ((1.0,), (8,)),
            ((1.0,) * 4, (8,) * 4),
            ((1.0, -1.0), (8, 8)),
            ((1.0, 0.0), (8, 8)),
            ((1.0, 1.0), (7, 8)),
            ((1.0, 1.0), (2, 8)),
            ((1.0, 1.0), (8, 8, 8)),
        ],
    )
    def test_invalid(self, L, N):
        with pytest.raises(ConfigError):
            TorusLattice(L, N)

    def test_retained_excludes_nyquist(self):
        lat = TorusLattice.unit(2, 8)
        kx = lat.k_grid[0]
        assert not np.any(lat.retained & (np.abs(kx) == 4))
        assert lat.retained.sum() == 7 * 7


class TestDualVector:
    @pytest.mark.parametrize(
        "L, k, expected",
        [
            ((1.0, 1.0), (1, 0), (1.0, 0.0)),
            ((2.0, 4.0), (1, 2), (0.5, 0.5)),
            ((1.0, 1.0, 1.0), (0, -3, 1), (0.0, -3.0, 1.0)),
        ],
    )
    def test_examples(self, L, k, expected):
        lat = TorusLattice(L, (8,) * len(L))
        np.testing.assert_array_equal(dual_vector(lat, k), expected)

    def test_out_of_range(self):
        lat = TorusLattice.unit(2, 8)
        with pytest.raises(ModeRangeError):
            dual_vector(lat, (4, 0))
        with pytest.raises(ModeRangeError):
            dual_vector(lat, (1, 0, 0))


class TestEigenvalue:
    def test_unit_cube(self):
        lat = TorusLattice.unit(3, 8)
        assert laplacian_eigenvalue(lat, (1, 0, 0)) == pytest.approx(4 * np.pi**2, rel=1e-15)

    def test_zero_mode(self):
        assert laplacian_eigenvalue(TorusLattice.unit(2, 8), (0, 0)) == 0.0

    def test_two_pi_periods(self):
        lat = TorusLattice((2 * np.pi, 2 * np.pi), (8, 8))
        assert laplacian_eigenvalue(lat, (1, 0)) == pytest.approx(1.0, rel=1e-14)

    def test_grid_matches_pointwise(self):
        lat = TorusLattice((1.0, 3.0), (8, 6))
        for k in enumerate_modes(lat):
            assert lat.eigenvalues[lat.slot(k)] == pytest.approx(laplacian_eigenvalue(lat, k), rel=1e-14)


class TestEnumerate:
    @pytest.mark.parametrize("d, kmax, count", [(2, 1, 8), (3, 1, 26), (2, 2, 24)])
    def test_counts(self, d, kmax, count):
        assert len(enumerate_modes(TorusLattice.unit(d, 8), kmax)) == count

    def test_lexicographic_and_closed(self):
        modes = enumerate_modes(TorusLattice.unit(2, 8), 2)
        assert modes == sorted(modes)
        assert len(set(modes)) == len(modes)
        assert {tuple(-c for c in k) for k in modes} == set(modes)

    def test_full_anisotropic(self):
        lat = TorusLattice((1.0, 1.0), (8, 4))
        modes = enumerate_modes(lat, "full")
        assert len(modes) == 7 * 3 - 1

    @pytest.mark.parametrize("kmax", [0, 4])
    def test_range(self, kmax):
        with pytest.raises(ModeRangeError):
            enumerate_modes(TorusLattice.unit(2, 8), kmax)


@settings(max_examples=50, deadline=None)
@given(
    L=st.lists(st.floats(0.1, 10.0), min_size=2, max_size=3),
    data=st.data(),
)
def test_symmetry_and_positivity(L, data):
    lat = TorusLattice(L, (8,) * len(L))
    k = tuple(data.draw(st.lists(st.integers(-3, 3), min_size=len(L), max_size=len(L))))
    mk = tuple(-c for c in k)
    np.testing.assert_array_equal(dual_vector(lat, mk), -dual_vector(lat, k))
    assert laplacian_eigenvalue(lat, mk) == laplacian_eigenvalue(lat, k)
    if any(k):
        assert laplacian_eigenvalue(lat, k) > 0


def test_slot_roundtrip():
    lat = TorusLattice((1.0, 1.0), (8, 6))
    for k in itertools.product(range(-3, 4), range(-2, 3)):
        s = lat.slot(k)
        assert tuple(int(lat.k_grid[(i,) + s]) for i in range(2)) == k
