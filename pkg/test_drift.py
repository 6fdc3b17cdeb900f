"""Tests for the forgetting-factor posterior and the hierarchical power prior bounds"""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from streamvb.drift import (
    SHARED,
    DriftState,
    TruncExp,
    bound_gap,
    double_lower_bound,
    expected_rho,
    hpp_fit_batch,
    hpp_lower_bound,
    power_prior_combine,
    truncexp_kl,
    truncexp_log_normalizer,
    truncexp_variance,
    update_omega,
)
from streamvb.engine import FitConfig, FitResult, fit_batch
from streamvb.errors import FamilyMismatchError, InvalidParameterError
from streamvb.expfam import BETA, GAMMA, NaturalParams, kl_divergence
from streamvb.models import NO_LOCALS, make_beta_binomial, make_gaussian_model

CFG = FitConfig()


def beta(alpha, b):
    return NaturalParams.from_standard(BETA, alpha=alpha, beta=b)


def random_instance(rng, gaussian=False):
    """Model, previous posterior, fixed variational posterior and batch"""
    if gaussian:
        model = make_gaussian_model(shape=2.0, rate=2.0, mu0=0.0, kappa=1.0)
        family = model.family("gaussian")

        def draw():
            return NaturalParams.from_standard(
                family,
                shape=rng.uniform(1.0, 10.0), rate=rng.uniform(0.5, 5.0),
                mu0=rng.normal(0.0, 1.0), kappa=rng.uniform(0.5, 10.0),
            )

        data = rng.normal(0.5, 1.0, size=10)
        return model, {"gaussian": draw()}, {"gaussian": draw()}, data
    model = make_beta_binomial(1.0, 1.0)
    prev = {"p": beta(*rng.uniform(1.0, 20.0, size=2))}
    q = {"p": beta(*rng.uniform(1.0, 20.0, size=2))}
    return model, prev, q, rng.integers(0, 2, size=10)


def fixed_fit(posterior):
    return FitResult(posterior=dict(posterior), locals=NO_LOCALS, elbo_trace=(0.0,), converged=True)


class TestPowerPriorCombine:
    def test_arithmetic(self):
        mixed = power_prior_combine(beta(31.0, 71.0), beta(1.0, 1.0), 0.9)
        assert np.allclose(mixed.eta, [27.0, 63.0])

    def test_endpoints(self):
        prev, alpha_u = beta(5.0, 3.0), beta(1.0, 1.0)
        assert np.array_equal(power_prior_combine(prev, alpha_u, 1.0).eta, prev.eta)
        assert np.array_equal(power_prior_combine(prev, alpha_u, 0.0).eta, alpha_u.eta)

    def test_errors(self):
        with pytest.raises(FamilyMismatchError):
            power_prior_combine(beta(2.0, 2.0), NaturalParams.from_standard(GAMMA, shape=1.0, rate=1.0), 0.5)
        with pytest.raises(InvalidParameterError):
            power_prior_combine(beta(2.0, 2.0), beta(1.0, 1.0), 1.5)


class TestTruncatedExponential:
    def test_expected_rho_examples(self):
        assert expected_rho(0.0) == 0.5
        assert expected_rho(1.0) == pytest.approx(0.5820, abs=1e-4)
        assert expected_rho(-1.0) == pytest.approx(0.4180, abs=1e-4)

    @given(st.floats(min_value=-50.0, max_value=50.0))
    def test_expected_rho_symmetry(self, omega):
        assert expected_rho(-omega) == pytest.approx(1.0 - expected_rho(omega), abs=1e-12)

    def test_expected_rho_increasing(self):
        values = [expected_rho(w) for w in np.linspace(-30.0, 30.0, 2001)]
        assert np.all(np.diff(values) > 0.0)

    def test_expected_rho_continuous_at_series_threshold(self):
        for omega in (1e-4, -1e-4):
            assert expected_rho(omega * (1 + 1e-9)) == pytest.approx(expected_rho(omega * (1 - 1e-9)), abs=1e-10)

    def test_expected_rho_matches_quadrature(self):
        for omega in (-7.0, -0.3, 2.5, 12.0):
            num = integrate.quad(lambda r: r * math.exp(omega * r), 0.0, 1.0)[0]
            den = integrate.quad(lambda r: math.exp(omega * r), 0.0, 1.0)[0]
            assert expected_rho(omega) == pytest.approx(num / den, abs=1e-10)
            assert TruncExp(omega).expected_rho == pytest.approx(num / den, abs=1e-10)

    def test_non_finite_omega(self):
        with pytest.raises(InvalidParameterError):
            expected_rho(math.inf)
        with pytest.raises(InvalidParameterError):
            TruncExp(math.nan)

    def test_log_normalizer(self):
        for omega in (-3.0, 0.5, 4.0):
            assert truncexp_log_normalizer(omega) == pytest.approx(math.log(math.expm1(omega) / omega), rel=1e-12)
        assert truncexp_log_normalizer(0.0) == 0.0

    def test_variance_is_derivative_of_mean(self):
        for omega in (-4.0, -0.005, 0.0, 0.02, 3.0):
            h = 1e-5
            slope = (expected_rho(omega + h) - expected_rho(omega - h)) / (2 * h)
            assert truncexp_variance(omega) == pytest.approx(slope, rel=1e-6)

    def test_kl_to_itself_is_zero(self):
        assert truncexp_kl(0.7, 0.7) == pytest.approx(0.0, abs=1e-15)
        assert truncexp_kl(3.0, 0.1) > 0.0

    def test_quadrature_weights_reproduce_mean(self):
        rho, w = TruncExp(3.0).quadrature()
        assert w.sum() == pytest.approx(1.0)
        assert np.dot(w, rho) == pytest.approx(expected_rho(3.0), abs=1e-12)


class TestUpdateOmega:
    def test_examples(self):
        assert update_omega(5.0, 0.3, 0.1) == pytest.approx(4.8)
        assert update_omega(0.3, 5.0, 0.1) == pytest.approx(-4.6)
        assert expected_rho(update_omega(0.3, 5.0, 0.1)) < 0.5
        assert update_omega(2.0, 2.0, 0.1) == pytest.approx(0.1)

    def test_non_finite(self):
        with pytest.raises(InvalidParameterError):
            update_omega(math.nan, 1.0, 0.1)

    @pytest.mark.parametrize("gaussian", [False, True])
    def test_gradient_vanishes_at_fixed_point(self, gaussian):
        rng = np.random.default_rng(21)
        for _ in range(20):
            model, prev, q, data = random_instance(rng, gaussian)
            alpha_u = model.priors
            block = model.block_names[0]
            omega = update_omega(kl_divergence(q[block], alpha_u[block]), kl_divergence(q[block], prev[block]), 0.1)
            fit = fixed_fit(q)
            h = 1e-3

            def bound(w):
                return double_lower_bound(model, prev, alpha_u, fit, TruncExp(w, 0.1), data)

            derivative = (bound(omega + h) - bound(omega - h)) / (2 * h)
            assert abs(derivative / truncexp_variance(omega)) < 1e-5
            off = (bound(omega + 1.0 + h) - bound(omega + 1.0 - h)) / (2 * h)
            assert abs(off) > 1e-6


class TestBounds:
    @pytest.mark.parametrize("gaussian", [False, True])
    def test_double_bound_below_quadrature_bound(self, gaussian):
        rng = np.random.default_rng(31)
        for _ in range(100):
            model, prev, q, data = random_instance(rng, gaussian)
            s = TruncExp(rng.uniform(-5.0, 5.0), 0.1)
            fit = fixed_fit(q)
            low = double_lower_bound(model, prev, model.priors, fit, s, data)
            exact = hpp_lower_bound(model, prev, model.priors, fit, s, data)
            assert low <= exact + 1e-10
            gap = bound_gap(model, prev, model.priors, s)
            assert gap >= -1e-12
            assert exact - low == pytest.approx(gap, abs=1e-8)

    def test_gap_vanishes_for_point_mass_at_one(self):
        model = make_beta_binomial(1.0, 1.0)
        state = DriftState.create(model, pinned_rho=1.0)
        fit = fixed_fit({"p": beta(4.0, 9.0)})
        data = np.array([1, 0, 0, 1])
        low = double_lower_bound(model, model.priors, model.priors, fit, state, data)
        exact = hpp_lower_bound(model, model.priors, model.priors, fit, state, data)
        assert low == pytest.approx(exact, abs=1e-12)

    def test_pinned_rho_drops_rho_kl(self):
        model = make_beta_binomial(1.0, 1.0)
        fit = fixed_fit({"p": beta(4.0, 9.0)})
        prev = {"p": beta(10.0, 2.0)}
        data = np.array([1, 0, 0, 1])
        pinned = DriftState.create(model, pinned_rho=0.5)
        free = TruncExp(0.0, 0.0)
        # q(rho | 0) has mean 1/2 and zero KL to a gamma = 0 prior
        assert double_lower_bound(model, prev, model.priors, fit, pinned, data) == pytest.approx(
            double_lower_bound(model, prev, model.priors, fit, free, data), abs=1e-12
        )


class TestDriftState:
    def test_shared_layout(self):
        model = make_gaussian_model()
        state = DriftState.create(model, gamma=0.2)
        assert list(state.factors) == [SHARED]
        assert state.factors[SHARED].omega == 0.2

    def test_per_block_needs_every_block(self):
        model = make_beta_binomial()
        with pytest.raises(InvalidParameterError):
            DriftState(factors={"q": TruncExp(0.1)}, uninformative_prior=model.priors, shared=False)

    def test_reset(self):
        model = make_beta_binomial()
        state = DriftState.create(model).with_omegas({SHARED: 7.0})
        assert state.reset().factors[SHARED].omega == state.factors[SHARED].gamma


class TestHPPFit:
    def test_fixed_rho_recursion_matches_one_shot_power_prior(self):
        model = make_beta_binomial(1.0, 1.0)
        state = DriftState.create(model, pinned_rho=0.9)
        batch0 = np.concatenate([np.ones(30), np.zeros(70)])
        batch1 = np.concatenate([np.ones(50), np.zeros(50)])
        fit0, state, _ = hpp_fit_batch(model, model.priors, state, batch0, CFG)
        fit1, _, _ = hpp_fit_batch(model, fit0.posterior, state, batch1, CFG)
        recursive = fit1.posterior["p"].standard()
        one_shot = {"alpha": 1.0 + 0.9 * 30 + 50, "beta": 1.0 + 0.9 * 70 + 50}
        assert recursive == pytest.approx(one_shot, abs=1e-10)
        assert recursive == pytest.approx({"alpha": 78.0, "beta": 114.0})

    @pytest.mark.parametrize("shared", [True, False])
    def test_first_batch_equals_plain_update(self, shared):
        model = make_gaussian_model(shape=2.0, rate=1.0, mu0=0.0, kappa=1.0)
        data = np.random.default_rng(2).normal(1.0, 2.0, size=50)
        state = DriftState.create(model, shared=shared)
        fit, new_state, bound = hpp_fit_batch(model, model.priors, state, data, CFG)
        plain = fit_batch(model, model.priors, data, CFG)
        assert fit.posterior["gaussian"].allclose(plain.posterior["gaussian"], atol=1e-10)
        assert math.isfinite(bound)
        assert set(new_state.factors) == set(state.factors)

    def test_drift_lowers_expected_rho(self):
        model = make_beta_binomial(1.0, 1.0)
        state = DriftState.create(model)
        prev = fit_batch(model, model.priors, np.concatenate([np.ones(95), np.zeros(5)]), CFG).posterior
        _, changed, _ = hpp_fit_batch(model, prev, state, np.concatenate([np.ones(5), np.zeros(95)]), CFG)
        _, same, _ = hpp_fit_batch(model, prev, state, np.concatenate([np.ones(95), np.zeros(5)]), CFG)
        assert changed.expected_rho("p") < 0.5 < same.expected_rho("p")

    def test_misaligned_blocks(self):
        model = make_beta_binomial()
        other = make_gaussian_model()
        state = DriftState.create(other, shared=False)
        with pytest.raises(InvalidParameterError):
            hpp_fit_batch(model, model.priors, state, np.ones(3), CFG)
