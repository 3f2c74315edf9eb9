import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from explomax import (
    BayesMixture,
    CensoredSample,
    DomainError,
    GelfDomainError,
    ImportanceSamplingMixture,
    InvalidLoss,
    MixtureMLE,
    bayes_self,
    build_expansion,
    ml_fit,
)
from explomax.validation import check_censored_data

TIMES = np.array([0.05, 0.12, 0.3, 0.02, 0.2, 0.35, 0.35, 0.35])
LABELS = np.array([1, 1, 1, 2, 2, 0, 0, 0])


class TestValidation:
    def test_labels_with_survivor_rows(self, small_censored):
        assert check_censored_data(TIMES, LABELS) == small_censored

    def test_survivors_through_n(self, small_censored):
        s = check_censored_data(TIMES[:5], LABELS[:5], n=8, censor_time=0.35)
        assert s == small_censored

    def test_sample_passthrough(self, small_censored):
        assert check_censored_data(small_censored) is small_censored
        with pytest.raises(DomainError):
            check_censored_data(small_censored, n=9)

    def test_column_vector(self, small_censored):
        assert check_censored_data(TIMES.reshape(-1, 1), LABELS) == small_censored

    @pytest.mark.parametrize(
        "X,y,kw",
        [
            (TIMES, None, {}),
            (TIMES, LABELS[:-1], {}),
            (TIMES, np.where(LABELS == 0, 3, LABELS), {}),
            (TIMES[:5], LABELS[:5], dict(n=8)),  # survivors counted but T unknown
            (np.r_[TIMES[:-1], 0.4], LABELS, {}),  # survivors disagree on T
            (TIMES, LABELS, dict(n=12)),  # survivors given both ways
            (np.ones((2, 2)), np.ones(2), {}),
        ],
    )
    def test_rejects(self, X, y, kw):
        with pytest.raises(DomainError):
            check_censored_data(X, y, **kw)


class TestMixtureMLE:
    def test_fit_matches_function(self, bench_sample):
        est = MixtureMLE().fit(bench_sample)
        ref, _ = ml_fit(bench_sample, 1.0)
        np.testing.assert_array_equal(est.params_.as_array(), ref.as_array())
        assert (est.theta1_, est.theta2_, est.p_) == tuple(ref.as_array())
        assert est.report_.converged and est.n_iter_ == est.report_.iterations
        assert est.variances_.shape == (3,)

    def test_get_set_params_and_clone(self):
        est = MixtureMLE(delta=2.0, tol=1e-9)
        assert est.get_params() == {"delta": 2.0, "max_iter": 200, "tol": 1e-9}
        twin = clone(est.set_params(max_iter=50))
        assert twin.get_params()["max_iter"] == 50 and not hasattr(twin, "params_")

    def test_not_fitted(self):
        with pytest.raises(NotFittedError):
            MixtureMLE().predict([0.1])

    def test_array_input(self, small_censored):
        a = MixtureMLE().fit(TIMES, LABELS)
        b = MixtureMLE().fit(small_censored)
        np.testing.assert_array_equal(a.params_.as_array(), b.params_.as_array())

    def test_density_methods(self, bench_sample):
        est = MixtureMLE().fit(bench_sample)
        x = np.array([0.001, 0.05, 0.3, 2.0])
        proba = est.predict_proba(x)
        np.testing.assert_allclose(proba.sum(axis=1), 1.0)
        # the heavy Lomax tail owns long failure times
        assert proba[-1, 1] > 0.99
        np.testing.assert_array_equal(est.predict(x), np.where(proba[:, 0] >= 0.5, 1, 2))
        assert np.all(np.isfinite(est.score_samples(x)))
        assert est.score(bench_sample) == pytest.approx(est.report_.log_likelihood)
        times, labels = est.sample(20, random_state=0)
        assert times.shape == labels.shape == (20,)

    def test_bad_delta(self, bench_sample):
        with pytest.raises(DomainError):
            MixtureMLE(delta=0).fit(bench_sample)


class TestBayesMixture:
    def test_canonical(self):
        s = CensoredSample([1.0], [math.e - 1], 2, 5.0)
        est = BayesMixture().fit(s)
        np.testing.assert_allclose(est.params_.as_array(), [2, 2, 0.5], rtol=1e-13)
        np.testing.assert_allclose(est.posterior_variance_, [2, 2, 0.05], rtol=1e-12)

    def test_matches_closed_form(self, bench_sample):
        est = BayesMixture(prior="jeffreys").fit(bench_sample)
        np.testing.assert_array_equal(est.params_.as_array(), bayes_self(build_expansion(bench_sample, 1.0, "jeffreys")))

    def test_gelf(self, bench_sample):
        a = BayesMixture(loss="gelf", c=1.2).fit(bench_sample)
        b = BayesMixture(loss="gelf", c=-1.2).fit(bench_sample)
        assert np.all(a.params_.as_array() < b.params_.as_array())

    def test_gelf_domain(self):
        with pytest.raises(GelfDomainError):
            BayesMixture(prior="jeffreys", loss="gelf", c=1.2).fit(CensoredSample([0.1], [0.2], 3, 0.4))

    @pytest.mark.parametrize("kw", [dict(loss="gelf"), dict(loss="gelf", c=0), dict(loss="huber")])
    def test_bad_loss(self, kw, bench_sample):
        with pytest.raises(InvalidLoss):
            BayesMixture(**kw).fit(bench_sample)

    def test_bad_prior(self, bench_sample):
        with pytest.raises(DomainError):
            BayesMixture(prior="flat").fit(bench_sample)

    def test_predictive(self, bench_sample):
        est = BayesMixture().fit(bench_sample)
        s = est.predict_interval(0.05)
        assert est.predictive_cdf(s.median) == pytest.approx(0.5, abs=1e-9)
        assert est.predictive_pdf(s.median) > 0
        with pytest.raises(DomainError):
            est.predict_interval(2.0)


class TestImportanceSampling:
    def test_reproducible(self, bench_sample):
        a = ImportanceSamplingMixture(n_samples=500, random_state=3).fit(bench_sample)
        b = ImportanceSamplingMixture(n_samples=500, random_state=3).fit(bench_sample)
        np.testing.assert_array_equal(a.params_.as_array(), b.params_.as_array())
        assert 0 < a.ess_ <= 500 and a.standard_error_.shape == (3,)

    def test_close_to_closed_form(self, bench_sample):
        est = ImportanceSamplingMixture(n_samples=50_000, random_state=1).fit(bench_sample)
        exact = bayes_self(build_expansion(bench_sample, 1.0))
        assert np.all(np.abs(est.params_.as_array() - exact) < 4 * est.standard_error_)

    @pytest.mark.parametrize("n_samples", [0, 2.5])
    def test_bad_sample_count(self, bench_sample, n_samples):
        with pytest.raises(DomainError):
            ImportanceSamplingMixture(n_samples=n_samples).fit(bench_sample)
