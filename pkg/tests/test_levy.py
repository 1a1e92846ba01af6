import numpy as np
import pytest

import ompath as om
from ompath.levy import BoundedVariationError, as_eta_array, stable_coeffs

from oracles import cf_exponent_closed, cf_exponent_numeric


# Frozen values for the benchmark component (alpha=0.5, sigma=1, beta=0.5).
C_PLUS_HALF = 0.19947114020071635
ETA_BENCH = 0.3989422804014327


class TestCoefficients:
    def test_frozen_symmetric_case(self):
        c_plus, c_minus = stable_coeffs(0.5, 1.0, 0.0)
        assert c_plus == pytest.approx(C_PLUS_HALF, rel=1e-14)
        assert c_minus == pytest.approx(C_PLUS_HALF, rel=1e-14)

    def test_one_sided(self):
        c_plus, c_minus = stable_coeffs(0.5, 1.0, 1.0)
        assert c_minus == 0.0
        assert c_plus == pytest.approx(2 * C_PLUS_HALF, rel=1e-14)

    def test_sigma_scaling(self):
        base = stable_coeffs(0.7, 1.0, 0.3)
        scaled = stable_coeffs(0.7, 2.0, 0.3)
        assert scaled[0] == pytest.approx(2**0.7 * base[0], rel=1e-13)
        assert scaled[1] == pytest.approx(2**0.7 * base[1], rel=1e-13)

    def test_against_characteristic_function(self):
        # closed-form CF exponent vs direct quadrature of the jump measure
        rng = np.random.Generator(np.random.Philox(key=23))
        for _ in range(12):
            alpha = rng.uniform(0.1, 0.95)
            sigma = rng.uniform(0.3, 2.0)
            beta = rng.uniform(-1.0, 1.0)
            theta = rng.uniform(0.2, 3.0)
            c_plus, c_minus = stable_coeffs(alpha, sigma, beta)
            numeric = cf_exponent_numeric(theta, alpha, c_plus, c_minus)
            closed = cf_exponent_closed(theta, alpha, sigma, beta)
            assert abs(numeric - closed) < 1e-6 * max(1.0, abs(closed))

    @pytest.mark.parametrize("alpha", [1.0, 1.5, 2.0])
    def test_unbounded_variation_rejected(self, alpha):
        with pytest.raises(BoundedVariationError):
            stable_coeffs(alpha, 1.0, 0.0)

    def test_invalid_parameters(self):
        with pytest.raises(ValueError):
            stable_coeffs(0.0, 1.0, 0.0)
        with pytest.raises(ValueError):
            stable_coeffs(0.5, -1.0, 0.0)
        with pytest.raises(ValueError):
            stable_coeffs(0.5, 1.0, 1.5)


class TestStableComponent:
    def test_coeffs_filled_below_one(self):
        comp = om.stable_component(0.5, 1.0, 0.5)
        assert comp.c_plus == pytest.approx(1.5 * C_PLUS_HALF, rel=1e-13)
        assert comp.c_minus == pytest.approx(0.5 * C_PLUS_HALF, rel=1e-13)
        assert not comp.null

    def test_gaussian_case_has_no_jump_coeffs(self):
        comp = om.stable_component(2.0, 1.0, 0.0)
        assert np.isnan(comp.c_plus) and np.isnan(comp.c_minus)

    def test_null_component(self):
        comp = om.null_component()
        assert comp.null
        assert comp.c_plus == 0.0 and comp.c_minus == 0.0

    def test_beta_consistency_enforced(self):
        good = om.stable_component(0.5, 1.0, 0.5)
        with pytest.raises(ValueError, match="disagree with beta"):
            om.StableComponent(alpha=0.5, sigma=1.0, beta=-0.5, mu=0.0,
                               c_plus=good.c_plus, c_minus=good.c_minus)

    def test_check_bounded_variation(self):
        assert om.check_bounded_variation(om.stable_component(0.5, 1, 0))
        assert om.check_bounded_variation(om.null_component())
        assert not om.check_bounded_variation(om.stable_component(2.0, 1, 0))


class TestEta:
    def test_benchmark_values(self):
        comps = om.benchmark_system().levy
        vec = om.eta(comps)
        assert vec.eta[0] == pytest.approx(ETA_BENCH, rel=1e-12)
        assert vec.eta[1] == 0.0

    def test_symmetric_is_exactly_zero(self):
        vec = om.eta((om.stable_component(0.5, 1.0, 0.0),))
        assert vec.eta[0] == 0.0
        assert vec.quadrature[0] == pytest.approx(0.0, abs=1e-10)

    def test_matches_coefficient_formula(self):
        rng = np.random.Generator(np.random.Philox(key=29))
        for _ in range(10):
            alpha = rng.uniform(0.1, 0.95)
            sigma = rng.uniform(0.5, 1.5)
            beta = rng.uniform(-1.0, 1.0)
            comp = om.stable_component(alpha, sigma, beta)
            expected = (comp.c_plus - comp.c_minus) / (1.0 - alpha)
            vec = om.eta((comp,))
            assert vec.eta[0] == pytest.approx(expected, rel=1e-13)
            assert abs(vec.quadrature[0] - expected) < 1e-8

    def test_null_components_contribute_zero(self):
        vec = om.eta((om.null_component(), om.stable_component(0.3, 1, 1)))
        assert vec.eta[0] == 0.0
        assert vec.eta[1] > 0.0

    def test_vector_is_readonly_and_aliases_analytic(self):
        vec = om.eta((om.stable_component(0.5, 1, 1),))
        assert np.array_equal(vec.eta, vec.analytic)
        with pytest.raises(ValueError):
            vec.eta[0] = 0.0

    def test_as_eta_array(self):
        assert np.array_equal(as_eta_array(None, 3), np.zeros(3))
        assert np.array_equal(as_eta_array(1.5, 2), [1.5, 1.5])
        assert np.array_equal(as_eta_array([1.0, 2.0], 2), [1.0, 2.0])
        vec = om.eta((om.stable_component(0.5, 1, 1), om.null_component()))
        assert np.array_equal(as_eta_array(vec, 2), vec.eta)
        with pytest.raises(ValueError):
            as_eta_array([1.0, 2.0, 3.0], 2)


class TestSampling:
    def test_golden_scalar(self):
        comp = om.stable_component(0.5, 1.0, 0.5)
        rng = np.random.Generator(np.random.Philox(key=12345))
        x = om.sample_stable(comp, 1e-3, rng)
        assert isinstance(x, float)
        assert x == pytest.approx(5.8348306986635631e-07, rel=1e-15)

    def test_golden_vector(self):
        comp = om.stable_component(0.5, 1.0, 0.5)
        rng = np.random.Generator(np.random.Philox(key=12345))
        got = om.sample_stable(comp, 1e-3, rng, size=4)
        expected = [4.6428890191899075e-06, 4.0803395006054518e-06,
                    7.5075398334659931e-06, -1.2598634769819294e-06]
        assert np.allclose(got, expected, rtol=1e-15)

    def test_gaussian_limit_variance(self):
        # alpha=2 reduces to N(0, 2 sigma^2 dt)
        comp = om.stable_component(2.0, 1.0, 0.0)
        rng = np.random.Generator(np.random.Philox(key=31))
        draws = om.sample_stable(comp, 0.01, rng, size=200_000)
        assert draws.std() ** 2 == pytest.approx(0.02, rel=0.02)
        assert abs(draws.mean()) < 3 * draws.std() / np.sqrt(draws.size)

    def test_fully_skewed_is_positive(self):
        # beta=1 with alpha<1 is a subordinator: all increments positive
        comp = om.stable_component(0.5, 1.0, 1.0)
        rng = np.random.Generator(np.random.Philox(key=37))
        draws = om.sample_stable(comp, 0.1, rng, size=50_000)
        assert np.all(draws > 0)

    def test_self_similarity_in_dt(self):
        # same generator state: draw at dt and at 16 dt differ by 16^(1/alpha)
        comp = om.stable_component(0.5, 1.0, 0.3)
        a = om.sample_stable(comp, 1e-3,
                             np.random.Generator(np.random.Philox(key=41)),
                             size=100)
        b = om.sample_stable(comp, 16e-3,
                             np.random.Generator(np.random.Philox(key=41)),
                             size=100)
        assert np.allclose(b, 256.0 * a, rtol=1e-12)

    def test_mu_shifts_by_mu_dt(self):
        with_mu = om.stable_component(0.5, 1.0, 0.3, mu=2.0)
        without = om.stable_component(0.5, 1.0, 0.3)
        a = om.sample_stable(with_mu, 0.25,
                             np.random.Generator(np.random.Philox(key=43)),
                             size=50)
        b = om.sample_stable(without, 0.25,
                             np.random.Generator(np.random.Philox(key=43)),
                             size=50)
        assert np.allclose(a - b, 0.5, atol=1e-15)

    def test_rejections(self):
        rng = np.random.Generator(np.random.Philox(key=47))
        with pytest.raises(ValueError):
            om.sample_stable(om.null_component(), 0.1, rng)
        with pytest.raises(ValueError):
            om.sample_stable(om.stable_component(0.5, 1, 0), 0.0, rng)
        cauchy = om.StableComponent(alpha=1.0, sigma=1.0, beta=0.0, mu=0.0,
                                    c_plus=np.nan, c_minus=np.nan)
        with pytest.raises(ValueError, match="alpha = 1"):
            om.sample_stable(cauchy, 0.1, rng)
