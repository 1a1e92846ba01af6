import numpy as np
import pytest

import ompath as om
from ompath.levy import BoundedVariationError


class TestMaierStein:
    def test_equilibria(self, ms1):
        assert np.allclose(ms1.drift.eval([1.0, 0.0]), [0.0, 0.0])
        assert np.allclose(ms1.drift.eval([-1.0, 0.0]), [0.0, 0.0])
        assert np.allclose(ms1.drift.eval([0.0, 0.0]), [0.0, 0.0])

    def test_drift_value(self, ms1):
        # f(0.5, 0.2) = (0.5 - 0.125 - 0.5*0.04, -(1.25)*0.2)
        out = ms1.drift.eval([0.5, 0.2])
        assert np.allclose(out, [0.355, -0.25], atol=1e-15)

    def test_jacobian_trace_at_well(self, ms1):
        jac = ms1.drift.jacobian([1.0, 0.0])
        assert np.trace(jac) == pytest.approx(-4.0, abs=1e-14)

    def test_jacobian_matches_finite_difference(self):
        rng = np.random.Generator(np.random.Philox(key=7))
        for gamma in (1.0, 2.0, 0.5):
            system = om.maier_stein(gamma)
            for point in rng.uniform(-2, 2, size=(10, 2)):
                fd = om.finite_diff_jacobian(system.drift, point)
                assert np.max(np.abs(fd - system.drift.jacobian(point))) < 1e-7

    def test_jacobian_symmetric_only_at_gamma_one(self):
        j1 = om.maier_stein(1.0).drift.jacobian([1.0, 1.0])
        assert j1[0, 1] == j1[1, 0]
        j2 = om.maier_stein(2.0).drift.jacobian([1.0, 1.0])
        assert abs(j2[0, 1] - j2[1, 0]) > 0.1

    def test_second_derivs(self, ms1):
        assert np.allclose(ms1.drift.second_derivs([0.7, -0.4]), [-5.6, 0.8])
        gamma3 = om.maier_stein(3.0)
        assert np.allclose(gamma3.drift.second_derivs([0.7, -0.4]), [-5.6, 2.4])

    def test_defaults(self, ms1):
        assert np.array_equal(ms1.x0, [1.0, 0.0])
        assert all(c.null for c in ms1.levy)
        assert np.array_equal(ms1.noise.B, np.eye(2))

    @pytest.mark.parametrize("gamma", [0.0, -1.0])
    def test_gamma_must_be_positive(self, gamma):
        with pytest.raises(ValueError, match="gamma"):
            om.maier_stein(gamma)


class TestPotential:
    def test_values(self):
        assert om.maier_stein_potential([1.0, 0.0]) == pytest.approx(-0.25)
        assert om.maier_stein_potential([-1.0, 0.0]) == pytest.approx(-0.25)
        assert om.maier_stein_potential([0.0, 0.0]) == 0.0

    def test_negative_gradient_is_the_drift(self, ms1):
        # central differences of V against f at random points
        rng = np.random.Generator(np.random.Philox(key=11))
        h = 1e-6
        for point in rng.uniform(-1.5, 1.5, size=(20, 2)):
            grad = np.empty(2)
            for i in range(2):
                step = np.zeros(2)
                step[i] = h
                grad[i] = (om.maier_stein_potential(point + step)
                           - om.maier_stein_potential(point - step)) / (2 * h)
            assert np.max(np.abs(-grad - ms1.drift.eval(point))) < 1e-8

    def test_batched(self):
        pts = np.array([[1.0, 0.0], [0.0, 0.0]])
        vals = om.maier_stein_potential(pts)
        assert vals.shape == (2,)
        assert np.allclose(vals, [-0.25, 0.0])


class TestDriftField:
    def test_fd_second_derivs_fallback(self, ms1):
        # same field without the analytic second derivatives
        bare = om.DriftField(2, ms1.drift.fn, ms1.drift.jacobian_fn)
        rng = np.random.Generator(np.random.Philox(key=13))
        pts = rng.uniform(-2, 2, size=(15, 2))
        assert np.max(np.abs(bare.second_derivs(pts)
                             - ms1.drift.second_derivs(pts))) < 1e-6

    def test_finite_diff_jacobian_rejects_bad_step(self, ms1):
        with pytest.raises(ValueError):
            om.finite_diff_jacobian(ms1.drift, [0.0, 0.0], h=0.0)

    def test_dimension_validated(self):
        with pytest.raises(ValueError):
            om.DriftField(0, lambda p: p, lambda p: p)


class TestPolynomialDrift:
    def test_matches_builtin_two_well(self, ms1):
        # x - x^3 - x y^2 ; -y - x^2 y
        poly = om.polynomial_drift(2, [
            [[1.0, 1, 0], [-1.0, 3, 0], [-1.0, 1, 2]],
            [[-1.0, 0, 1], [-1.0, 2, 1]],
        ])
        rng = np.random.Generator(np.random.Philox(key=17))
        pts = rng.uniform(-2, 2, size=(30, 2))
        assert np.allclose(poly.fn(pts), ms1.drift.eval(pts), atol=1e-13)
        assert np.allclose(poly.jacobian_fn(pts), ms1.drift.jacobian(pts), atol=1e-13)
        assert np.allclose(poly.second_derivs(pts), ms1.drift.second_derivs(pts),
                           atol=1e-13)

    def test_zero_drift(self):
        z = om.zero_drift(3)
        pts = np.ones((4, 3))
        assert np.all(z.eval(pts) == 0.0)
        assert np.all(z.jacobian(pts) == 0.0)
        assert np.all(z.second_derivs(pts) == 0.0)

    def test_bad_terms_rejected(self):
        with pytest.raises(ValueError, match="exponents"):
            om.polynomial_drift(1, [[[1.0, -1]]])
        with pytest.raises(ValueError, match="exponents"):
            om.polynomial_drift(1, [[[1.0, 0.5]]])
        with pytest.raises(ValueError, match="expected"):
            om.polynomial_drift(2, [[[1.0, 1]], []])
        with pytest.raises(ValueError):
            om.polynomial_drift(2, [[]])


class TestNoiseMatrix:
    def test_identity(self):
        noise = om.NoiseMatrix.identity(3)
        assert noise.d == 3
        assert np.array_equal(noise.B_inv, np.eye(3))
        assert noise.condition_estimate == pytest.approx(1.0)
        assert noise.is_diagonal()

    def test_inverse_residual_bound(self):
        rng = np.random.Generator(np.random.Philox(key=19))
        mat = np.eye(2) + 0.3 * rng.standard_normal((2, 2))
        noise = om.NoiseMatrix(mat)
        assert np.max(np.abs(mat @ noise.B_inv - np.eye(2))) <= 1e-12

    def test_singular_rejected(self):
        with pytest.raises(om.SingularNoiseError):
            om.NoiseMatrix(np.zeros((2, 2)))
        with pytest.raises(om.SingularNoiseError):
            om.NoiseMatrix([[1.0, 2.0], [2.0, 4.0]])

    def test_degenerate_carried_when_asked(self):
        noise = om.NoiseMatrix(np.zeros((2, 2)), require_invertible=False)
        assert not noise.invertible
        assert noise.condition_estimate == np.inf
        with pytest.raises(om.SingularNoiseError):
            noise.B_inv

    def test_shape_and_finiteness(self):
        with pytest.raises(ValueError):
            om.NoiseMatrix(np.ones((2, 3)))
        with pytest.raises(ValueError):
            om.NoiseMatrix([[np.nan]])

    def test_diagonal_detection(self):
        assert om.NoiseMatrix.diagonal([2.0, 0.5]).is_diagonal()
        assert not om.NoiseMatrix([[1.0, 0.1], [0.0, 1.0]]).is_diagonal()

    def test_readonly(self):
        noise = om.NoiseMatrix.identity(2)
        with pytest.raises(ValueError):
            noise.B[0, 0] = 2.0


class TestBoundaryPair:
    def test_basic(self):
        b = om.BoundaryPair([1.0, 0.0], [-1.0, 0.0])
        assert b.T == 1.0
        assert b.d == 2

    def test_validation(self):
        with pytest.raises(ValueError):
            om.BoundaryPair([1.0], [1.0, 2.0])
        with pytest.raises(ValueError):
            om.BoundaryPair([1.0], [0.0], T=0.0)
        with pytest.raises(ValueError):
            om.BoundaryPair([np.inf], [0.0])


class TestSystemSpec:
    def test_dimension_checks(self, ms1):
        with pytest.raises(ValueError, match="noise dimension"):
            om.SystemSpec(ms1.drift, om.NoiseMatrix.identity(3),
                          ms1.levy, np.zeros(2))
        with pytest.raises(ValueError, match="one Levy component"):
            om.SystemSpec(ms1.drift, ms1.noise,
                          (om.null_component(),), np.zeros(2))
        with pytest.raises(ValueError, match="x0"):
            om.SystemSpec(ms1.drift, ms1.noise, ms1.levy, np.zeros(3))

    def test_bounded_variation_gate(self, ms1):
        bad = om.stable_component(1.5, 1.0, 0.0)
        with pytest.raises(BoundedVariationError):
            om.SystemSpec(ms1.drift, ms1.noise, (bad, om.null_component()),
                          np.zeros(2))

    def test_mu_folds_into_drift(self, ms1):
        comp = om.stable_component(0.5, 1.0, 0.0, mu=0.3)
        system = om.SystemSpec(ms1.drift, ms1.noise,
                               (comp, om.null_component()), np.zeros(2))
        base = ms1.drift.eval([0.4, -0.1])
        folded = system.drift.eval([0.4, -0.1])
        assert np.allclose(folded - base, [0.3, 0.0], atol=1e-15)
        # Jacobian unchanged, stored component has mu = 0
        assert np.array_equal(system.drift.jacobian([0.4, -0.1]),
                              ms1.drift.jacobian([0.4, -0.1]))
        assert system.levy[0].mu == 0.0
        assert system.drift.meta["mu_folded"] == (0.3, 0.0)

    def test_digest_distinguishes_systems(self):
        a = om.maier_stein(1.0)
        b = om.maier_stein(1.5)
        assert a.digest == om.maier_stein(1.0).digest
        assert a.digest != b.digest
        assert a.digest != om.benchmark_system().digest

    def test_x0_readonly(self, ms1):
        with pytest.raises(ValueError):
            ms1.x0[0] = 5.0
