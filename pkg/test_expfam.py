"""Tests for the exponential-family kernel"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats
from scipy.special import digamma, gammaln

from conftest import FAMILIES, random_params
from streamvb.errors import FamilyMismatchError, InvalidParameterError, SupportError, UnsupportedFamilyError
from streamvb.expfam import (
    BETA,
    GAMMA,
    NORMAL,
    NORMAL_GAMMA,
    NaturalParams,
    dirichlet,
    ess,
    kl_divergence,
    log_normalizer,
    mean_params,
    normal_known_precision,
    sufficient_stats,
)


def beta(a, b):
    return NaturalParams.from_standard(BETA, alpha=a, beta=b)


class TestLogNormalizer:
    def test_uniform_beta(self):
        assert log_normalizer(NaturalParams(BETA, [0.0, 0.0])) == pytest.approx(0.0, abs=1e-15)

    def test_beta_2_2(self):
        assert log_normalizer(NaturalParams(BETA, [1.0, 1.0])) == pytest.approx(math.log(1.0 / 6.0), abs=1e-12)

    def test_beta_2_2_matches_quadrature(self):
        value, _ = integrate.quad(lambda x: x * (1.0 - x), 0.0, 1.0)
        assert log_normalizer(beta(2, 2)) == pytest.approx(math.log(value), abs=1e-10)

    def test_uniform_dirichlet(self):
        assert log_normalizer(NaturalParams(dirichlet(3), [0.0, 0.0, 0.0])) == pytest.approx(-math.log(2.0), abs=1e-12)

    def test_normal_gamma_standard_prior(self):
        p = NaturalParams.from_standard(NORMAL_GAMMA, shape=1.0, rate=1.0, mu0=0.0, kappa=1e-10)
        expected = -0.5 * math.log(1e-10) + 0.5 * math.log(2.0 * math.pi)
        assert log_normalizer(p) == pytest.approx(expected, rel=1e-12)

    def test_out_of_domain_names_component(self):
        with pytest.raises(InvalidParameterError) as info:
            NaturalParams(BETA, [-1.0, 0.0])
        assert info.value.component == "alpha"

    def test_gamma_positive_rate_rejected(self):
        with pytest.raises(InvalidParameterError) as info:
            NaturalParams(GAMMA, [0.0, 0.5])
        assert info.value.component == "rate"

    def test_wrong_dimension_rejected(self):
        with pytest.raises(InvalidParameterError):
            NaturalParams(NORMAL_GAMMA, [0.0, -1.0])

    def test_non_finite_rejected(self):
        with pytest.raises(InvalidParameterError):
            NaturalParams(NORMAL, [float("nan"), -1.0])

    def test_values_are_read_only(self):
        p = beta(2, 3)
        with pytest.raises(ValueError):
            p.eta[0] = 5.0


class TestMeanParams:
    def test_uniform_beta(self):
        expected = digamma(1.0) - digamma(2.0)
        assert mean_params(beta(1, 1)) == pytest.approx([expected, expected], abs=1e-12)
        assert expected == pytest.approx(-1.0)

    def test_known_precision_at_zero(self):
        assert mean_params(NaturalParams(normal_known_precision(3.0), [0.0])) == pytest.approx([0.0])

    def test_uniform_beta_monte_carlo(self):
        x = np.random.default_rng(1).uniform(size=200_000)
        assert mean_params(beta(1, 1)) == pytest.approx([np.log(x).mean(), np.log1p(-x).mean()], abs=0.01)

    def test_gradient_identity(self, family):
        rng = np.random.default_rng(7)
        h = 1e-5
        for _ in range(200):
            p = random_params(family, rng)
            grad = mean_params(p)
            for i in range(family.dim):
                step = np.zeros(family.dim)
                step[i] = h
                fd = (family.log_normalizer(p.eta + step) - family.log_normalizer(p.eta - step)) / (2.0 * h)
                assert abs(fd - grad[i]) <= 1e-5 * max(1.0, abs(grad[i]))


class TestConvexity:
    def test_log_normalizer_convex_on_mixes(self, family):
        rng = np.random.default_rng(11)
        for _ in range(1000):
            p1, p2 = random_params(family, rng), random_params(family, rng)
            rho = rng.uniform()
            mixed = rho * p1.eta + (1.0 - rho) * p2.eta
            assert family.in_domain(mixed)
            lhs = family.log_normalizer(mixed)
            rhs = rho * family.log_normalizer(p1.eta) + (1.0 - rho) * family.log_normalizer(p2.eta)
            assert lhs <= rhs + 1e-10 * max(1.0, abs(rhs))

    @settings(max_examples=200, deadline=None)
    @given(
        st.floats(0.05, 50.0), st.floats(0.05, 50.0),
        st.floats(0.05, 50.0), st.floats(0.05, 50.0),
        st.floats(0.0, 1.0),
    )
    def test_beta_convexity_property(self, a1, b1, a2, b2, rho):
        eta1, eta2 = beta(a1, b1).eta, beta(a2, b2).eta
        mixed = rho * eta1 + (1.0 - rho) * eta2
        rhs = rho * BETA.log_normalizer(eta1) + (1.0 - rho) * BETA.log_normalizer(eta2)
        assert BETA.log_normalizer(mixed) <= rhs + 1e-10 * max(1.0, abs(rhs))


def quadrature_kl(q: NaturalParams, p: NaturalParams) -> float:
    """Independent KL oracle by one-dimensional quadrature with scipy.stats densities"""
    fid = q.family.family_id.value
    if fid == "Beta":
        dq = stats.beta(q.standard()["alpha"], q.standard()["beta"])
        dp = stats.beta(p.standard()["alpha"], p.standard()["beta"])
    elif fid == "Gamma":
        dq = stats.gamma(q.standard()["shape"], scale=1.0 / q.standard()["rate"])
        dp = stats.gamma(p.standard()["shape"], scale=1.0 / p.standard()["rate"])
    elif fid == "Normal":
        dq = stats.norm(q.standard()["mean"], 1.0 / math.sqrt(q.standard()["precision"]))
        dp = stats.norm(p.standard()["mean"], 1.0 / math.sqrt(p.standard()["precision"]))
    else:
        tau = q.family.precision
        dq = stats.norm(q.standard()["mean"], 1.0 / math.sqrt(tau))
        dp = stats.norm(p.standard()["mean"], 1.0 / math.sqrt(tau))
    lo, hi = dq.ppf(1e-12), dq.isf(1e-12)
    value, _ = integrate.quad(lambda x: dq.pdf(x) * (dq.logpdf(x) - dp.logpdf(x)), lo, hi, limit=200)
    return value


def monte_carlo_kl(q: NaturalParams, p: NaturalParams, rng: np.random.Generator, n: int = 40_000):
    """KL oracle from draws of q, returned with its standard error"""
    if q.family.family_id.value == "Dirichlet":
        aq, ap = np.array(q.standard()["alpha"]), np.array(p.standard()["alpha"])
        x = rng.dirichlet(aq, size=n)
        log_x = np.log(x)

        def logpdf(alpha):
            return log_x @ (alpha - 1.0) - (gammaln(alpha).sum() - gammaln(alpha.sum()))

        diff = logpdf(aq) - logpdf(ap)
    else:
        sq, sp = q.standard(), p.standard()
        tau = rng.gamma(sq["shape"], 1.0 / sq["rate"], size=n)
        mu = rng.normal(sq["mu0"], 1.0 / np.sqrt(sq["kappa"] * tau))

        def logpdf(s):
            return (stats.gamma.logpdf(tau, s["shape"], scale=1.0 / s["rate"])
                    + stats.norm.logpdf(mu, s["mu0"], 1.0 / np.sqrt(s["kappa"] * tau)))

        diff = logpdf(sq) - logpdf(sp)
    return diff.mean(), diff.std(ddof=1) / math.sqrt(n)


class TestKLDivergence:
    def test_identical_is_zero(self):
        assert kl_divergence(beta(1, 1), beta(1, 1)) == pytest.approx(0.0, abs=1e-12)

    def test_beta_2_2_vs_uniform(self):
        assert kl_divergence(beta(2, 2), beta(1, 1)) == pytest.approx(0.1251, abs=1e-3)

    def test_dirichlet_matches_monte_carlo(self):
        d3 = dirichlet(3)
        q = NaturalParams.from_standard(d3, alpha=[2.0, 2.0, 2.0])
        p = NaturalParams.from_standard(d3, alpha=[1.0, 1.0, 1.0])
        estimate, se = monte_carlo_kl(q, p, np.random.default_rng(3))
        assert abs(kl_divergence(q, p) - estimate) < 4.0 * se + 1e-3

    def test_family_mismatch(self):
        with pytest.raises(FamilyMismatchError):
            kl_divergence(beta(1, 1), NaturalParams.from_standard(GAMMA, shape=1.0, rate=1.0))

    def test_dirichlet_arity_mismatch(self):
        with pytest.raises(FamilyMismatchError):
            kl_divergence(NaturalParams(dirichlet(2), [0.0, 0.0]), NaturalParams(dirichlet(3), [0.0, 0.0, 0.0]))

    def test_non_negative_and_zero_only_on_equal(self, family):
        rng = np.random.default_rng(5)
        for _ in range(100):
            q, p = random_params(family, rng), random_params(family, rng)
            assert kl_divergence(q, p) >= -1e-12
            assert kl_divergence(q, q) == pytest.approx(0.0, abs=1e-10)
            if not q.allclose(p, atol=1e-6):
                assert kl_divergence(q, p) > 1e-10

    @pytest.mark.parametrize("name", ["beta", "gamma", "normal", "normal_known_precision"])
    def test_matches_quadrature(self, name):
        family = FAMILIES[name]
        rng = np.random.default_rng(17)
        for _ in range(20):
            q, p = random_params(family, rng), random_params(family, rng)
            assert kl_divergence(q, p) == pytest.approx(quadrature_kl(q, p), abs=1e-3)

    @pytest.mark.parametrize("name", ["dirichlet", "normal_gamma"])
    def test_matches_monte_carlo(self, name):
        family = FAMILIES[name]
        rng = np.random.default_rng(19)
        for _ in range(20):
            q, p = random_params(family, rng), random_params(family, rng)
            estimate, se = monte_carlo_kl(q, p, rng)
            assert abs(kl_divergence(q, p) - estimate) < 4.0 * se + 1e-3


class TestSufficientStats:
    def test_bernoulli_success(self):
        assert sufficient_stats(BETA, 1).tolist() == [1.0, 0.0]

    def test_gaussian_zero(self):
        stats_ = sufficient_stats(NORMAL_GAMMA, 0.0)
        assert stats_[0] == 0.0 and stats_[3] == 0.0

    def test_batch_additivity(self):
        outcomes = [1] * 30 + [0] * 70
        total = sum(sufficient_stats(BETA, y) for y in outcomes)
        assert total.tolist() == [30.0, 70.0]

    def test_category_one_hot(self):
        assert sufficient_stats(dirichlet(4), 2).tolist() == [0.0, 0.0, 1.0, 0.0]

    @pytest.mark.parametrize("family, x", [(BETA, 2), (BETA, 0.5), (dirichlet(3), 3), (NORMAL_GAMMA, float("inf"))])
    def test_support_violation(self, family, x):
        with pytest.raises(SupportError):
            sufficient_stats(family, x)


class TestStandardCoordinates:
    def test_normal_gamma_round_trip(self):
        p = NaturalParams.from_standard(NORMAL_GAMMA, shape=1.0, rate=1.0, mu0=0.0, kappa=1e-10)
        assert p.standard() == pytest.approx({"shape": 1.0, "rate": 1.0, "mu0": 0.0, "kappa": 1e-10})

    def test_beta_natural_coordinates(self):
        assert beta(31, 71).eta.tolist() == [30.0, 70.0]

    def test_non_positive_hyperparameter(self):
        with pytest.raises(InvalidParameterError):
            beta(0, 1)

    def test_ess_conventions(self):
        assert ess(beta(31, 71)) == pytest.approx(102.0)
        assert ess(NaturalParams.from_standard(GAMMA, shape=3.0, rate=1.0)) == pytest.approx(6.0)
        with pytest.raises(UnsupportedFamilyError):
            ess(NaturalParams(normal_known_precision(), [0.0]))
