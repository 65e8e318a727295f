import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import F2, F3
from induction_inverse.errors import CharacteristicSurfaceError, ConfigError, InputError
from induction_inverse.profiles import constant_profile, gaussian_vortex, make_profile, zero_profile
from induction_inverse.transport_rd import (
    SlabGrid,
    SlabSpec,
    chart_decompose,
    divergence_residual_slab,
    make_chart,
    project_to_surface,
    sample_slab,
    slab_points,
    solve_slab,
    surface_points,
    transport_residual_slab,
)

CASES = [
    (2, F2, (1.0, 0.0)),
    (3, F3, (0.3, 0.2, 1.0)),
]


def spec_for(d, level, W=1.0, S=1.0):
    M = (10 if d == 3 else 20) * 2**level + 1
    return SlabSpec.from_extent([W] * (d - 1), [M] * (d - 1), S, 20 * 2**level + 1)


class TestChart:
    def test_orthonormal(self):
        for _, F, n in CASES:
            ch = make_chart(n, F)
            assert np.linalg.norm(ch.n) == pytest.approx(1.0, abs=1e-14)
            B = ch.surface_basis
            np.testing.assert_allclose(B @ B.T, np.eye(len(n) - 1), atol=1e-14)
            np.testing.assert_allclose(B @ ch.n, 0.0, atol=1e-14)

    def test_characteristic_rejected(self):
        with pytest.raises(CharacteristicSurfaceError, match="characteristic surface"):
            make_chart((0.0, 1.0), (1.0, 0.0))
        with pytest.raises(CharacteristicSurfaceError):
            make_chart((0.0, 1.0, 0.0), (1.0, 1e-14, 1.0))

    def test_bad_inputs(self):
        with pytest.raises(ConfigError):
            make_chart((0.0, 0.0), (1.0, 0.0))
        with pytest.raises(ConfigError):
            make_chart((1.0, 0.0), (0.0, 0.0))
        with pytest.raises(ConfigError):
            make_chart((1.0, 0.0), (1.0, 0.0, 0.0))

    def test_decompose_example(self):
        ch = make_chart((1.0, 0.0), (2.0, 1.0))
        y, tau = chart_decompose(ch, (4.0, 3.0))
        assert tau == pytest.approx(2.0)
        np.testing.assert_allclose(project_to_surface(ch, (4.0, 3.0)), (0.0, 1.0), atol=1e-15)
        assert abs(y[0]) == pytest.approx(1.0)

    def test_on_surface_and_on_line(self):
        ch = make_chart((0.3, 0.2, 1.0), F3)
        y0 = ch.surface_basis.T @ np.array([0.4, -0.7])
        _, tau = chart_decompose(ch, y0)
        assert abs(tau) < 1e-15
        x = y0 + 1.25 * ch.F
        _, tau = chart_decompose(ch, x)
        assert tau == pytest.approx(1.25, rel=1e-14)
        np.testing.assert_allclose(project_to_surface(ch, x), y0, atol=1e-14)


@settings(max_examples=50, deadline=None)
@given(x=st.lists(st.floats(-50, 50), min_size=3, max_size=3))
def test_decomposition_identity(x):
    ch = make_chart((0.3, 0.2, 1.0), F3)
    x = np.array(x)
    pi = project_to_surface(ch, x)
    _, tau = chart_decompose(ch, x)
    assert abs(pi @ ch.n) <= 1e-13 * max(1.0, np.abs(x).max())
    np.testing.assert_allclose(pi + tau * ch.F, x, atol=1e-13 * max(1.0, np.abs(x).max()))


class TestSlabSpec:
    def test_geometry(self):
        sp = SlabSpec.from_extent([1.0], [5], 2.0, 9)
        assert sp.Ms == 9 and sp.m == 4
        assert sp.S == pytest.approx(2.0)
        assert sp.s[sp.m] == 0.0
        assert sp.shape == (5, 9)

    def test_errors(self):
        with pytest.raises(InputError):
            SlabSpec.from_extent([1.0], [5], 1.0, 8)
        with pytest.raises(InputError):
            SlabSpec.from_extent([1.0, 1.0], [5], 1.0, 9)
        ch = make_chart((1.0, 0.0), F2)
        with pytest.raises(InputError):
            surface_points(ch, SlabSpec.from_extent([1.0, 1.0], [5, 5], 1.0, 9))

    def test_points_on_lines(self):
        ch = make_chart((0.3, 0.2, 1.0), F3)
        sp = SlabSpec.from_extent([1.0, 0.5], [4, 3], 1.0, 5)
        pts = np.moveaxis(slab_points(ch, sp), 0, -1)
        y, tau = chart_decompose(ch, pts)
        np.testing.assert_allclose(tau, np.broadcast_to(sp.s, tau.shape), atol=1e-14)


class TestSolve:
    @pytest.mark.parametrize("d, F, n", CASES)
    def test_homogeneous(self, d, F, n):
        ch = make_chart(n, F)
        sp = spec_for(d, 0)
        trace = gaussian_vortex(d, F, sigma=0.4).velocity
        v = solve_slab(ch, zero_profile(d).source, trace, sp)
        expected = trace(surface_points(ch, sp))[..., None]
        assert np.max(np.abs(v.values - expected)) <= 1e-13
        assert transport_residual_slab(v, np.zeros_like(v.values)) <= 1e-13

    @pytest.mark.parametrize("d, F, n", CASES)
    def test_constant_source(self, d, F, n):
        ch = make_chart(n, F)
        sp = spec_for(d, 0)
        c = np.arange(1.0, d + 1.0)
        prof = constant_profile(d, c)
        v = solve_slab(ch, prof.source, prof.velocity, sp)
        expected = -sp.s * c.reshape((-1,) + (1,) * d)
        assert np.max(np.abs(v.values - expected)) <= 1e-13

    @pytest.mark.parametrize("d, F, n", CASES)
    def test_trace_bitwise(self, d, F, n):
        ch = make_chart(n, F)
        sp = spec_for(d, 0)
        prof = gaussian_vortex(d, F)
        vS = prof.velocity(surface_points(ch, sp))
        v = solve_slab(ch, prof.source, vS, sp)
        assert np.array_equal(v.trace, vS)

    @pytest.mark.parametrize("d, F, n", CASES)
    def test_convergence(self, d, F, n):
        ch = make_chart(n, F)
        prof = gaussian_vortex(d, F, center=np.full(d, 0.1))
        res, div, err = [], [], []
        for level in range(3):
            sp = spec_for(d, level)
            pts = slab_points(ch, sp)
            v = solve_slab(ch, prof.source, prof.velocity, sp)
            res.append(transport_residual_slab(v, prof.source(pts)))
            div.append(divergence_residual_slab(v))
            err.append(np.max(np.abs(v.values - prof.velocity(pts))))
        assert 3.5 <= res[1] / res[2] <= 4.5
        assert 3.5 <= div[1] / div[2] <= 4.5
        assert 3.5 <= err[1] / err[2] <= 4.5

    def test_uniqueness_and_additivity(self):
        d, F, n = CASES[1]
        ch = make_chart(n, F)
        prof = gaussian_vortex(d, F)
        sp = spec_for(d, 0)
        a = solve_slab(ch, prof.source, prof.velocity, sp)
        b = solve_slab(ch, prof.source, prof.velocity, sp)
        assert np.array_equal(a.values, b.values)
        shift = np.array([0.5, -1.0, 2.0])
        c = solve_slab(ch, prof.source, lambda x: prof.velocity(x) + shift[:, None, None], sp)
        np.testing.assert_allclose(c.values - a.values, np.broadcast_to(shift[:, None, None, None], a.values.shape), atol=1e-14)
        # a longer slab with the same ds agrees on the shared nodes
        long = SlabSpec(sp.W, sp.M, sp.ds, sp.m + 6)
        e = solve_slab(ch, prof.source, prof.velocity, long)
        assert np.array_equal(e.values[..., 6:-6], a.values)

    def test_shape_errors(self):
        d, F, n = CASES[0]
        ch = make_chart(n, F)
        sp = spec_for(d, 0)
        with pytest.raises(InputError):
            solve_slab(ch, np.zeros((2, 3, 3)), np.zeros((2,) + sp.M), sp)
        with pytest.raises(InputError):
            solve_slab(ch, np.zeros((2,) + sp.shape), np.zeros((2, 3)), sp)


class TestResiduals:
    def test_perturbation_detected(self):
        d, F, n = CASES[0]
        ch = make_chart(n, F)
        sp = spec_for(d, 0)
        v = sample_slab(ch, sp, lambda x: np.ones_like(x))
        h = np.zeros_like(v.values)
        assert transport_residual_slab(v, h) == 0
        bumped = v.values.copy()
        bumped[0, 3, 5] += 1e-3
        assert transport_residual_slab(SlabGrid(ch, sp, bumped), h) > 0

    @pytest.mark.parametrize("d, F, n", CASES)
    def test_affine_solenoidal(self, d, F, n):
        ch = make_chart(n, F)
        sp = spec_for(d, 0)
        A = np.arange(1.0, d * d + 1).reshape(d, d)
        A -= np.trace(A) / d * np.eye(d)
        v = sample_slab(ch, sp, lambda x: np.tensordot(A, x, axes=1))
        assert divergence_residual_slab(v) <= 1e-12

    def test_gradient_witness(self):
        d, F, n = CASES[0]
        ch = make_chart(n, F)
        vals = []
        for level in range(2):
            sp = spec_for(d, level)
            # grad of x^2 + y^2 has divergence 4
            v = sample_slab(ch, sp, lambda x: 2 * x)
            vals.append(divergence_residual_slab(v))
        assert min(vals) > 0.1

    def test_too_small(self):
        ch = make_chart((1.0, 0.0), F2)
        sp = SlabSpec.from_extent([1.0], [4], 1.0, 9)
        v = sample_slab(ch, sp, lambda x: x)
        with pytest.raises(InputError):
            divergence_residual_slab(v)


class TestProfiles:
    @pytest.mark.parametrize("d, F, n", CASES)
    def test_vortex_is_exact_solution(self, d, F, n):
        # oracle: finite-difference the velocity along F and compare with -h
        prof = gaussian_vortex(d, F, center=np.full(d, 0.2), sigma=0.6)
        x = np.random.default_rng(0).uniform(-1, 1, (d, 50))
        eps = 1e-5
        Fc = np.reshape(F, (-1, 1))
        dv = (prof.velocity(x + eps * Fc) - prof.velocity(x - eps * Fc)) / (2 * eps)
        np.testing.assert_allclose(dv, -prof.source(x), atol=1e-8)

    @pytest.mark.parametrize("d, F, n", CASES)
    def test_vortex_divergence_free(self, d, F, n):
        prof = gaussian_vortex(d, F)
        x = np.random.default_rng(1).uniform(-1, 1, (d, 30))
        eps = 1e-5
        div = sum(
            (prof.velocity(x + eps * np.eye(d)[:, [i]])[i] - prof.velocity(x - eps * np.eye(d)[:, [i]])[i]) / (2 * eps)
            for i in range(d)
        )
        assert np.max(np.abs(div)) < 1e-8

    def test_make_profile(self):
        assert make_profile("zero", 2, F2).name == "zero"
        with pytest.raises(ConfigError):
            make_profile("swirl", 2, F2)
        with pytest.raises(ConfigError):
            constant_profile(3, [1.0, 2.0])
