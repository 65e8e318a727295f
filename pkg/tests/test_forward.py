import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import F2, F3, rel
from induction_inverse.errors import ConfigError, InputError, PreconditionError
from induction_inverse.fields import (
    SpectralVectorField,
    curl_cross,
    random_scalar,
    random_solenoidal,
    spectral_norm,
)
from induction_inverse.forward import (
    EvolutionSeries,
    divergence_residual,
    duhamel_snapshot,
    evolve_series,
    phi1,
    stokes_domain_norm,
)
from induction_inverse.lattice import TorusLattice


def test_phi1():
    x = np.array([0.0, 1e-12, 1e-9, 1e-6, 1.0, 50.0])
    exact = np.array([1.0, 1 - 5e-13, 1 - 5e-10, 1 - 5e-7 + 1e-12 / 6, 1 - np.exp(-1.0), 1 / 50.0])
    np.testing.assert_allclose(phi1(x), exact, rtol=1e-14)


class TestDuhamel:
    def test_zero_time(self, lat2):
        h = curl_cross(F2, random_solenoidal(lat2, 1, 4))
        assert spectral_norm(duhamel_snapshot(lat2, 1.0, h, 0.0)) == 0.0

    def test_ln2(self):
        lat = TorusLattice((2 * np.pi, 2 * np.pi), (8, 8))
        h = SpectralVectorField.from_modes(lat, {(1, 0): [0.0, 1.0]})
        b = duhamel_snapshot(lat, 1.0, h, np.log(2.0))
        np.testing.assert_allclose(b.coefficient((1, 0)), [0.0, 0.5], rtol=1e-14)

    def test_steady_state(self, lat2):
        h = curl_cross(F2, random_solenoidal(lat2, 2, 4))
        lam = lat2.eigenvalues
        t = 50.0 / (4 * np.pi**2)
        b = duhamel_snapshot(lat2, 1.0, h, t)
        steady = np.where(lam > 0, h.coeffs / np.where(lam > 0, lam, 1.0), 0.0)
        assert np.linalg.norm(b.coeffs - steady) <= 1e-12 * np.linalg.norm(steady)

    def test_errors(self, lat2):
        h = curl_cross(F2, random_solenoidal(lat2, 3, 4))
        with pytest.raises(ConfigError):
            duhamel_snapshot(lat2, 0.0, h, 1.0)
        mean = SpectralVectorField.from_modes(lat2, {(0, 0): [1.0, 0.0]})
        with pytest.raises(PreconditionError):
            duhamel_snapshot(lat2, 1.0, mean, 1.0)


class TestEvolve:
    @pytest.mark.parametrize("d", [2, 3])
    def test_matches_duhamel(self, d):
        lat = TorusLattice.unit(d, 16 if d == 2 else 8)
        F = F2 if d == 2 else F3
        v = random_solenoidal(lat, 4, 3)
        h = curl_cross(F, v)
        times = [0.01, 0.05, 0.2, 0.5]
        series = evolve_series(lat, 0.7, F, v, None, times)
        for t, b in zip(times, series.snapshots):
            assert rel(b, duhamel_snapshot(lat, 0.7, h, t)) <= 1e-13
        assert divergence_residual(series) <= 1e-12

    def test_heat_decay(self, lat2):
        b0 = random_solenoidal(lat2, 5, 5)
        zero = SpectralVectorField.zeros(lat2)
        times = np.linspace(0.001, 0.1, 20)
        series = evolve_series(lat2, 1.0, F2, zero, b0, times)
        for t, b in zip(times, series.snapshots):
            expected = np.exp(-lat2.eigenvalues * t) * b0.coeffs
            assert np.linalg.norm(b.coeffs - expected) <= 1e-13 * np.linalg.norm(b0.coeffs)
        norms = [spectral_norm(b) for b in series.snapshots]
        assert all(b <= a for a, b in zip(norms, norms[1:]))

    def test_all_zero(self, lat2):
        zero = SpectralVectorField.zeros(lat2)
        series = evolve_series(lat2, 1.0, F2, zero, None, [0.1, 0.2])
        assert all(spectral_norm(b) == 0 for b in series.snapshots)

    def test_semigroup(self, lat2):
        v = random_solenoidal(lat2, 6, 4)
        direct = evolve_series(lat2, 1.0, F2, v, None, [0.3]).snapshots[0]
        first = evolve_series(lat2, 1.0, F2, v, None, [0.1]).snapshots[0]
        # continue from b(0.1) for a further 0.2
        cont = evolve_series(lat2, 1.0, F2, v, first, [0.2]).snapshots[0]
        assert rel(cont, direct) <= 1e-12

    def test_time_varying_left_endpoint(self, lat2):
        v1 = random_solenoidal(lat2, 7, 3)
        v2 = random_solenoidal(lat2, 8, 3)
        series = evolve_series(lat2, 1.0, F2, [v1, v1, v2], None, [0.1, 0.2, 0.3])
        first = evolve_series(lat2, 1.0, F2, v1, None, [0.1, 0.2, 0.3])
        # the step ending at 0.3 still uses v1
        assert rel(series.snapshots[2], first.snapshots[2]) <= 1e-14

    def test_rejects_non_solenoidal(self, lat2):
        phi = random_scalar(lat2, 9, 3)
        grad = SpectralVectorField(lat2, 2j * np.pi * lat2.g_grid * phi.coeffs)
        with pytest.raises(PreconditionError, match="divergence residual"):
            evolve_series(lat2, 1.0, F2, grad, None, [0.1])
        with pytest.raises(PreconditionError, match="divergence residual"):
            evolve_series(lat2, 1.0, F2, SpectralVectorField.zeros(lat2), grad, [0.1])

    def test_bad_times(self, lat2):
        v = random_solenoidal(lat2, 10, 3)
        with pytest.raises(InputError):
            evolve_series(lat2, 1.0, F2, v, None, [0.2, 0.1])
        with pytest.raises(InputError):
            evolve_series(lat2, 1.0, F2, [v], None, [0.1, 0.2])


class TestNorms:
    def test_stokes_examples(self):
        lat = TorusLattice((2 * np.pi, 2 * np.pi), (8, 8))
        assert stokes_domain_norm(SpectralVectorField.zeros(lat)) == 0
        b = SpectralVectorField(lat, np.zeros((2, 8, 8)))
        b.coeffs[(0,) + lat.slot((1, 0))] = 1.0
        assert stokes_domain_norm(b) == pytest.approx(1.0)

    def test_equals_laplacian_norm(self, lat2):
        b = random_solenoidal(lat2, 11, 5)
        g = lat2.g_grid
        # apply d^2/dx_i^2 mode by mode and sum
        lap = sum((2j * np.pi * g[i]) ** 2 for i in range(2)) * b.coeffs
        assert stokes_domain_norm(b) == pytest.approx(np.linalg.norm(lap), rel=1e-12)

    def test_divergence_residual_witness(self, lat2):
        phi = random_scalar(lat2, 12, 3)
        grad = SpectralVectorField(lat2, 2j * np.pi * lat2.g_grid * phi.coeffs)
        series = EvolutionSeries([0.1], [grad], 1.0)
        assert divergence_residual(series) > 1e-3
        assert divergence_residual(EvolutionSeries([0.1], [SpectralVectorField.zeros(lat2)], 1.0)) == 0


LAT = TorusLattice((1.0, 1.5), (16, 16))


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), eta=st.floats(0.05, 5.0))
def test_duhamel_domain_bound(seed, eta):
    h = curl_cross(F2, random_solenoidal(LAT, seed, 5))
    hn = spectral_norm(h)
    times = np.linspace(0.01, 2.0, 15)
    series = evolve_series(LAT, eta, F2, random_solenoidal(LAT, seed, 5), None, times)
    assert max(stokes_domain_norm(b) for b in series.snapshots) <= hn / eta + 1e-10
    assert all(np.all(b.mean == 0) for b in series.snapshots)
