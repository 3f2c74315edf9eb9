"""Scikit-learn style estimators for the exponential-Lomax mixture.

All three estimators share the same ``fit`` signature::

    est.fit(times, labels, n=None, censor_time=None)
    est.fit(censored_sample)

and expose the fitted point as ``params_`` plus ``theta1_``, ``theta2_`` and
``p_``. Fitted estimators also behave as density models:
``score_samples`` gives the mixture log-density and ``predict_proba`` the
probability that a failure at each time came from each component.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .bayes import bayes_estimate, build_expansion, posterior_variance
from .distributions import Params, exp_pdf, lomax_logpdf, mixture_pdf, mixture_sample
from .exceptions import DomainError, SingularInformation
from .importance import is_draws, is_estimate, is_standard_error
from .likelihood import log_likelihood_direct, ml_fit, ml_variances
from .losses import check_prior
from .predictive import predictive_cdf, predictive_interval, predictive_pdf
from .validation import check_alpha, check_censored_data, check_loss, check_positive

__all__ = ["MixtureMLE", "BayesMixture", "ImportanceSamplingMixture"]


class _MixtureMixin:
    """Density-model methods shared by every fitted estimator."""

    def _set_params(self, est):
        est = np.asarray(est, dtype=float)
        self.params_ = Params(est[0], est[1], est[2], self.delta)
        self.theta1_, self.theta2_, self.p_ = (float(v) for v in est)

    def score_samples(self, X):
        """Log mixture density at each time in ``X`` under the fitted parameters."""
        check_is_fitted(self, "params_")
        return np.log(mixture_pdf(np.asarray(X, dtype=float).ravel(), self.params_))

    def predict_proba(self, X):
        """Probability that a failure at each time came from component 1 or 2.

        Returns an array of shape ``(len(X), 2)``.
        """
        check_is_fitted(self, "params_")
        x = np.asarray(X, dtype=float).ravel()
        pr = self.params_
        log1 = np.log(pr.p) + np.log(exp_pdf(x, pr.theta1))
        log2 = np.log1p(-pr.p) + lomax_logpdf(x, pr.theta2, pr.delta)
        first = 1.0 / (1.0 + np.exp(log2 - log1))
        return np.column_stack([first, 1.0 - first])

    def predict(self, X):
        """Most probable component (1 or 2) for failures at each time."""
        return np.where(self.predict_proba(X)[:, 0] >= 0.5, 1, 2)

    def score(self, X, y=None, n=None, censor_time=None):
        """Censored-data log-likelihood (up to a constant) at the fitted point."""
        check_is_fitted(self, "params_")
        sample = check_censored_data(X, y, n=n, censor_time=censor_time)
        return log_likelihood_direct(self.params_, sample)

    def sample(self, n_samples=1, random_state=None):
        """Draw lifetimes and component labels from the fitted mixture."""
        check_is_fitted(self, "params_")
        return mixture_sample(self.params_, n_samples, random_state)


class MixtureMLE(_MixtureMixin, BaseEstimator):
    """Maximum likelihood fit for type-I censored mixture data.

    Parameters
    ----------
    delta : float, default=1.0
        Known Lomax scale.
    max_iter : int, default=200
        Newton iteration cap.
    tol : float, default=1e-8
        Convergence threshold on the sup-norm of the gradient in
        ``(log theta1, log theta2, logit p)``.

    Attributes
    ----------
    params_ : Params
    variances_ : ndarray of shape (3,) or None
        Diagonal of the inverse observed information, ``None`` if singular.
    report_ : ConvergenceReport
    n_iter_ : int
    """

    def __init__(self, delta=1.0, max_iter=200, tol=1e-8):
        self.delta = delta
        self.max_iter = max_iter
        self.tol = tol

    def fit(self, X, y=None, n=None, censor_time=None):
        check_positive(self.delta, "delta")
        sample = check_censored_data(X, y, n=n, censor_time=censor_time)
        params, report = ml_fit(sample, self.delta, max_iter=self.max_iter, tol=self.tol)
        self._set_params(params.as_array())
        self.report_ = report
        self.n_iter_ = report.iterations
        try:
            self.variances_ = ml_variances(params, sample)
        except SingularInformation:
            self.variances_ = None
        return self


class _BayesBase(_MixtureMixin, BaseEstimator):
    def _validate(self):
        check_positive(self.delta, "delta")
        self._prior = check_prior(self.prior)
        self._loss = check_loss(self.loss, self.c)


class BayesMixture(_BayesBase):
    """Closed-form Bayes estimates and posterior predictive summaries.

    Parameters
    ----------
    prior : {"uniform", "jeffreys"}, default="uniform"
    loss : {"self", "gelf"}, default="self"
        Squared error loss gives posterior means; general entropy loss gives
        ``E[x^-c]^(-1/c)``.
    c : float, optional
        GELF shape, required and nonzero when ``loss="gelf"``.
    delta : float, default=1.0

    Attributes
    ----------
    params_ : Params
    posterior_variance_ : ndarray of shape (3,)
    expansion_ : PosteriorExpansion
    """

    def __init__(self, prior="uniform", loss="self", c=None, delta=1.0):
        self.prior = prior
        self.loss = loss
        self.c = c
        self.delta = delta

    def fit(self, X, y=None, n=None, censor_time=None):
        self._validate()
        sample = check_censored_data(X, y, n=n, censor_time=censor_time)
        self.expansion_ = build_expansion(sample, self.delta, self._prior)
        self._set_params(bayes_estimate(self.expansion_, self._loss))
        self.posterior_variance_ = posterior_variance(self.expansion_)
        return self

    def predictive_pdf(self, y):
        check_is_fitted(self, "expansion_")
        return predictive_pdf(y, self.expansion_)

    def predictive_cdf(self, y):
        check_is_fitted(self, "expansion_")
        return predictive_cdf(y, self.expansion_)

    def predict_interval(self, alpha=0.01):
        """Predictive median with equal-tail ``100(1 - alpha)%`` bounds."""
        check_is_fitted(self, "expansion_")
        return predictive_interval(self.expansion_, check_alpha(alpha))


class ImportanceSamplingMixture(_BayesBase):
    """Approximate Bayes estimates by self-normalized importance sampling.

    Parameters
    ----------
    prior, loss, c, delta
        As for :class:`BayesMixture`.
    n_samples : int, default=1000
        Number of proposal draws.
    random_state : int, Generator or None
        Seed or stream for the proposal draws.

    Attributes
    ----------
    params_ : Params
    standard_error_ : ndarray of shape (3,)
        Delta-method Monte-Carlo standard errors.
    ess_ : float
        Effective sample size of the importance weights.
    draws_ : ISDraws
    """

    def __init__(self, prior="uniform", loss="self", c=None, delta=1.0, n_samples=1000, random_state=None):
        self.prior = prior
        self.loss = loss
        self.c = c
        self.delta = delta
        self.n_samples = n_samples
        self.random_state = random_state

    def fit(self, X, y=None, n=None, censor_time=None):
        self._validate()
        if int(self.n_samples) != self.n_samples or self.n_samples < 1:
            raise DomainError(f"n_samples must be a positive integer, got {self.n_samples!r}")
        sample = check_censored_data(X, y, n=n, censor_time=censor_time)
        self.draws_ = is_draws(sample, self.delta, self._prior, int(self.n_samples), self.random_state)
        self._set_params(is_estimate(self.draws_, self._loss))
        self.standard_error_ = is_standard_error(self.draws_, self._loss)
        self.ess_ = self.draws_.ess
        return self
