"""Posterior predictive distribution of one future lifetime.

Integrating the mixture density against the expanded posterior leaves two
branches per expansion term: a shifted gamma-exponential (Lomax-like) tail
from the exponential component, and the same in ``log(1 + y/delta)`` from the
Lomax component. Both integrate in closed form, so the CDF needs no
quadrature.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import betaln, gammaln, logsumexp

from .bayes import PosteriorExpansion
from .exceptions import DomainError, PredictiveBracketError

__all__ = [
    "PredictiveSummary",
    "predictive_logpdf",
    "predictive_pdf",
    "predictive_cdf",
    "predictive_sf",
    "predictive_quantile",
    "predictive_interval",
]


@dataclass(frozen=True)
class PredictiveSummary:
    median: float
    lower: float
    upper: float
    alpha: float
    prior: str

    def as_dict(self) -> dict:
        return asdict(self)


def _grid(y):
    y = np.asarray(y, dtype=float)
    if np.any(np.isnan(y)) or np.any(y < 0):
        raise DomainError("y must be >= 0")
    return y


def _branch_constants(e: PosteriorExpansion):
    """Shared per-term pieces: ``log binom + log Beta`` for each branch."""
    k, r1, n = e.k, e.r1, e.n
    exp_beta = e.log_binom + betaln(k + r1 + 2, n - k - r1 + 1)
    lom_beta = e.log_binom + betaln(k + r1 + 1, n - k - r1 + 2)
    return exp_beta, lom_beta


def predictive_logpdf(y, expansion: PosteriorExpansion):
    e = expansion
    ys = _grid(y)
    yy = ys.reshape(-1, 1)
    a0, b0 = e.a0, e.b0
    ell = np.log1p(yy / e.delta)
    exp_beta, lom_beta = _branch_constants(e)
    exp_branch = (
        gammaln(a0 + 1) + gammaln(b0) + exp_beta - (a0 + 1) * np.log(e.A + yy) - b0 * np.log(e.B)
    )
    lom_branch = (
        gammaln(a0)
        + gammaln(b0 + 1)
        - np.log(yy + e.delta)
        + lom_beta
        - a0 * np.log(e.A)
        - (b0 + 1) * np.log(e.B + ell)
    )
    out = logsumexp(np.concatenate([exp_branch, lom_branch], axis=1), axis=1) - e.logH
    return float(out[0]) if ys.ndim == 0 else out.reshape(ys.shape)


def predictive_pdf(y, expansion: PosteriorExpansion):
    """Posterior predictive density of a single future observation."""
    return np.exp(predictive_logpdf(y, expansion))


def _log_cdf_and_sf(ys, e: PosteriorExpansion):
    yy = ys.reshape(-1, 1)
    a0, b0 = e.a0, e.b0
    ell = np.log1p(yy / e.delta)
    exp_beta, lom_beta = _branch_constants(e)
    # Gamma(a0 + 1) / a0 == Gamma(a0); same for b0 in the Lomax branch
    common = gammaln(a0) + gammaln(b0) - e.logH
    logA, logB = np.log(e.A), np.log(e.B)
    with np.errstate(divide="ignore"):
        # A^-a0 - (A + y)^-a0 = A^-a0 (1 - (1 + y/A)^-a0)
        exp_gain = np.log(-np.expm1(-a0 * np.log1p(yy / e.A)))
        lom_gain = np.log(-np.expm1(-b0 * np.log1p(ell / e.B)))
    exp_cdf = exp_beta - a0 * logA + exp_gain - b0 * logB
    lom_cdf = lom_beta - a0 * logA - b0 * logB + lom_gain
    exp_sf = exp_beta - a0 * np.log(e.A + yy) - b0 * logB
    lom_sf = lom_beta - a0 * logA - b0 * np.log(e.B + ell)
    log_cdf = common + logsumexp(np.concatenate([exp_cdf, lom_cdf], axis=1), axis=1)
    log_sf = common + logsumexp(np.concatenate([exp_sf, lom_sf], axis=1), axis=1)
    return log_cdf, log_sf


def predictive_cdf(y, expansion: PosteriorExpansion):
    """Closed-form predictive CDF, summed from positive terms only."""
    ys = _grid(y)
    log_cdf, _ = _log_cdf_and_sf(ys, expansion)
    out = np.minimum(np.exp(log_cdf), 1.0)
    return float(out[0]) if ys.ndim == 0 else out.reshape(ys.shape)


def predictive_sf(y, expansion: PosteriorExpansion):
    """``1 - predictive_cdf(y)``, accurate far into the upper tail."""
    ys = _grid(y)
    _, log_sf = _log_cdf_and_sf(ys, expansion)
    out = np.minimum(np.exp(log_sf), 1.0)
    return float(out[0]) if ys.ndim == 0 else out.reshape(ys.shape)


def predictive_quantile(q, expansion: PosteriorExpansion, tol: float = 1e-10, max_iter: int = 4000):
    """Solve ``predictive_cdf(y) = q`` by bisection.

    The bracket starts at ``[0, 1]`` and its upper end doubles until it
    straddles the target. Targets above one half are matched on the survival
    function instead, which keeps the root condition sharp in the tail.
    Bisection stops once the CDF residual is below ``tol`` and the bracket
    can no longer be split in floating point.
    """
    qs = np.atleast_1d(np.asarray(q, dtype=float))
    if np.any(~(qs > 0)) or np.any(~(qs < 1)):
        raise DomainError("quantile levels must lie in (0, 1)")
    upper_tail = qs > 0.5
    target = np.where(upper_tail, 1.0 - qs, qs)

    def below(y):
        # True where the root lies above y
        log_cdf, log_sf = _log_cdf_and_sf(y, expansion)
        return np.where(upper_tail, np.exp(log_sf) > target, np.exp(log_cdf) < target)

    def residual(y):
        log_cdf, log_sf = _log_cdf_and_sf(y, expansion)
        return np.where(upper_tail, np.exp(log_sf) - target, np.exp(log_cdf) - target)

    lo = np.zeros_like(qs)
    hi = np.ones_like(qs)
    grow = below(hi)
    while np.any(grow):
        hi = np.where(grow, hi * 2.0, hi)
        if np.any(hi > 1e300):
            raise PredictiveBracketError(
                f"could not bracket predictive quantiles {qs[grow]}; CDF at {hi.max():.3g} is "
                f"{predictive_cdf(np.array([hi.max()]), expansion)[0]:.17g}"
            )
        lo = np.where(grow, hi / 2.0, lo)
        grow = below(hi)

    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        stuck = (mid <= lo) | (mid >= hi)
        if np.all(stuck | (np.abs(residual(mid)) <= tol * 1e-3)):
            break
        go_up = below(mid)
        lo = np.where(go_up, mid, lo)
        hi = np.where(go_up, hi, mid)
    root = 0.5 * (lo + hi)
    res = np.abs(residual(root))
    if np.any(res > tol):
        raise PredictiveBracketError(
            f"bisection stalled with CDF residual {res.max():.3g} > {tol:g} (flat CDF region)"
        )
    return float(root[0]) if np.ndim(q) == 0 else root


def predictive_interval(expansion: PosteriorExpansion, alpha: float = 0.01, tol: float = 1e-10) -> PredictiveSummary:
    """Median and equal-tail ``100(1 - alpha)%`` predictive bounds."""
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    lower, median, upper = predictive_quantile(
        np.array([alpha / 2, 0.5, 1 - alpha / 2]), expansion, tol=tol
    )
    return PredictiveSummary(float(median), float(lower), float(upper), alpha, expansion.prior)
