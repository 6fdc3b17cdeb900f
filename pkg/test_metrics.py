"""Tests for ESS, test marginal log-likelihood and trace records"""

import math

import numpy as np
import pytest
from numpy.polynomial.legendre import leggauss
from scipy import stats

from streamvb.engine import FitConfig, fit_batch
from streamvb.errors import EmptyBatchError, TraceFormatError, UnsupportedFamilyError
from streamvb.expfam import BETA, GAMMA, NORMAL_GAMMA, NaturalParams, dirichlet, normal_known_precision
from streamvb.metrics import TraceRecord, aggregate_tmll, block_ess, ess, monte_carlo_tmll, scored_records, tmll
from streamvb.models import (
    make_beta_binomial,
    make_gaussian_model,
    make_linear_regression,
    make_mixture_model,
    make_normal_known_precision_model,
)


def gauss_legendre(f, lo, hi, nodes=400):
    x, w = leggauss(nodes)
    mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
    return half * np.dot(w, f(mid + half * x))


def record(t, value, learner="A"):
    return TraceRecord(t=t, learner=learner, elbo=0.0, tmll=value)


class TestESS:
    def test_beta(self):
        assert ess(BETA, NaturalParams.from_standard(BETA, alpha=31.0, beta=71.0)) == pytest.approx(102.0)
        assert ess(BETA, make_beta_binomial(1.0, 1.0).priors["p"]) == pytest.approx(2.0)

    def test_other_families(self):
        assert ess(dirichlet(3), NaturalParams.from_standard(dirichlet(3), alpha=[1.0, 2.0, 3.0])) == pytest.approx(6.0)
        assert ess(GAMMA, NaturalParams.from_standard(GAMMA, shape=4.0, rate=2.0)) == pytest.approx(8.0)
        ng = NaturalParams.from_standard(NORMAL_GAMMA, shape=2.0, rate=1.0, mu0=0.0, kappa=7.0)
        assert ess(NORMAL_GAMMA, ng) == pytest.approx(7.0)

    def test_unsupported(self):
        family = normal_known_precision(1.0)
        with pytest.raises(UnsupportedFamilyError):
            ess(family, NaturalParams.from_standard(family, mean=0.0))
        with pytest.raises(UnsupportedFamilyError):
            ess(GAMMA, NaturalParams.from_standard(BETA, alpha=1.0, beta=1.0))

    def test_block_ess(self):
        model = make_normal_known_precision_model(2.0, prior_precision=5.0)
        assert block_ess(model, model.priors) == pytest.approx({"mean": 5.0})
        assert set(block_ess(make_mixture_model(2, 1), make_mixture_model(2, 1).priors)) == {
            "weights", "component_0_dim_0", "component_1_dim_0",
        }


class TestTMLL:
    def test_bernoulli_examples(self):
        model = make_beta_binomial()
        posterior = {"p": NaturalParams.from_standard(BETA, alpha=2.0, beta=1.0)}
        assert tmll(model, posterior, np.array([1])) == pytest.approx(math.log(2.0 / 3.0))
        assert tmll(model, model.priors, np.array([0])) == pytest.approx(math.log(0.5))

    def test_empty_test_set(self):
        model = make_beta_binomial()
        with pytest.raises(EmptyBatchError):
            tmll(model, model.priors, np.array([]))

    def test_bernoulli_matches_quadrature(self):
        model = make_beta_binomial()
        posterior = {"p": NaturalParams.from_standard(BETA, alpha=7.0, beta=4.0)}
        density = stats.beta(7.0, 4.0).pdf
        for x in (0, 1):
            exact = gauss_legendre(lambda p: p ** x * (1 - p) ** (1 - x) * density(p), 0.0, 1.0)
            assert tmll(model, posterior, np.array([x])) == pytest.approx(math.log(exact), abs=1e-6)

    def test_normal_known_precision_matches_quadrature(self):
        model = make_normal_known_precision_model(precision=2.0, prior_mean=0.5, prior_precision=3.0)
        posterior = model.priors
        for x in (-1.0, 0.5, 2.0):
            exact = gauss_legendre(
                lambda mu: stats.norm.pdf(x, mu, 1 / math.sqrt(2.0)) * stats.norm.pdf(mu, 0.5, 1 / math.sqrt(3.0)),
                0.5 - 12.0 / math.sqrt(3.0), 0.5 + 12.0 / math.sqrt(3.0),
            )
            assert tmll(model, posterior, np.array([x])) == pytest.approx(math.log(exact), abs=1e-6)

    def test_student_t_matches_quadrature(self):
        model = make_gaussian_model(shape=3.0, rate=2.0, mu0=1.0, kappa=4.0)
        gamma = stats.gamma(3.0, scale=1.0 / 2.0)
        lo, hi = gamma.ppf(1e-14), gamma.isf(1e-14)
        for x in (-2.0, 1.0, 3.5):
            exact = gauss_legendre(
                lambda tau: stats.norm.pdf(x, 1.0, np.sqrt((1.0 / 4.0 + 1.0) / tau)) * gamma.pdf(tau), lo, hi, nodes=800,
            )
            assert tmll(model, model.priors, np.array([x])) == pytest.approx(math.log(exact), abs=1e-6)

    def test_mixture_monte_carlo_is_self_consistent(self):
        model = make_mixture_model(2, 1)
        rng = np.random.default_rng(12)
        X = np.concatenate([rng.normal(-3.0, 1.0, 100), rng.normal(3.0, 1.0, 100)])
        posterior = fit_batch(model, model.priors, X, FitConfig()).posterior
        test = np.array([-3.5, -1.0, 0.0, 2.0, 4.0])
        small, small_se = monte_carlo_tmll(model, posterior, test, num_samples=1000, seed=0)
        large, large_se = monte_carlo_tmll(model, posterior, test, num_samples=10000, seed=1)
        assert abs(small - large) < 3.0 * math.hypot(small_se, large_se)
        assert abs(small - tmll(model, posterior, test)) < 3.0 * math.hypot(small_se, large_se)

    def test_regression_predictive_is_finite(self):
        model = make_linear_regression(1)
        rng = np.random.default_rng(3)
        x = rng.normal(size=200)
        data = np.column_stack([x, 1.0 + 2.0 * x + rng.normal(scale=0.5, size=200)])
        posterior = fit_batch(model, model.priors, data, FitConfig()).posterior
        score = tmll(model, posterior, data[:20])
        assert math.isfinite(score)
        assert score == tmll(model, posterior, data[:20])


class TestAggregate:
    def test_sum(self):
        assert aggregate_tmll([record(1, -1.0), record(2, -2.0)]) == pytest.approx(-3.0)

    def test_empty_trace(self):
        with pytest.raises(TraceFormatError):
            aggregate_tmll([])

    def test_missing_tmll(self):
        with pytest.raises(TraceFormatError):
            aggregate_tmll([record(1, -1.0), record(2, None)])
        with pytest.raises(TraceFormatError):
            aggregate_tmll([record(1, -1.0), TraceRecord(t=2, learner="A", elbo=0.0, tmll=None, test_size=5)])

    def test_steps_without_test_rows_are_skipped(self):
        trace = [
            TraceRecord(t=1, learner="A", elbo=0.0, tmll=-1.0, test_size=3),
            TraceRecord(t=2, learner="A", elbo=0.0, tmll=None, test_size=0),
            TraceRecord(t=3, learner="A", elbo=0.0, tmll=-2.0, test_size=1),
        ]
        assert aggregate_tmll(trace) == pytest.approx(-3.0)
        assert [r.t for r in scored_records(trace)] == [1, 3]

    def test_nothing_to_score(self):
        with pytest.raises(TraceFormatError):
            aggregate_tmll([TraceRecord(t=1, learner="A", elbo=0.0, tmll=None, test_size=0)])

    def test_dominance(self):
        rng = np.random.default_rng(0)
        worse = rng.normal(-2.0, 0.5, size=50)
        better = worse + rng.uniform(0.0, 0.1, size=50)
        assert aggregate_tmll([record(t, v) for t, v in enumerate(better)]) > aggregate_tmll(
            [record(t, v) for t, v in enumerate(worse)]
        )


class TestTraceRecord:
    def test_row_columns(self):
        rec = TraceRecord(t=3, learner="SVB_MHPP", elbo=-10.0, ess={"p": 12.0},
                          expected_rho={"p": 0.7}, tmll=-0.6, summary={"mean": 0.4})
        row = rec.to_row()
        assert list(row) == ["t", "learner", "elbo", "ess_p", "expected_rho_p", "tmll", "summary_mean"]
        assert TraceRecord.from_row(row) == rec

    def test_shared_rho_column(self):
        rec = TraceRecord(t=1, learner="SVB_HPP", elbo=0.0, expected_rho={"shared": 0.6})
        assert "expected_rho" in rec.to_row()
        assert TraceRecord.from_row(rec.to_row()).expected_rho == {"shared": 0.6}

    def test_test_size_column(self):
        rec = TraceRecord(t=2, learner="SVB", elbo=-1.0, ess={"p": 4.0}, test_size=0)
        row = rec.to_row()
        assert list(row) == ["t", "learner", "elbo", "ess_p", "test_size", "tmll"]
        assert TraceRecord.from_row({**row, "tmll": float("nan")}) == rec
