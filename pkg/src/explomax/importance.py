"""Approximate Bayes estimates by importance sampling.

Proposals are the conjugate posteriors of the uncensored part of the data
(independent gamma, gamma and beta), and every draw is weighted by the
censoring factor ``h = C(theta)^(n - r)`` that the proposal leaves out.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .exceptions import DegenerateWeights, DomainError, ImproperProposal, InvalidLoss
from .likelihood import SuffStats
from .losses import LossSpec, check_prior

__all__ = [
    "ProposalSpec",
    "ISDraws",
    "proposal_for",
    "is_draws",
    "is_estimate",
    "is_standard_error",
]


@dataclass(frozen=True)
class ProposalSpec:
    """Gamma ``(shape, rate)`` proposals for the rates and a beta for ``p``."""

    gamma1: tuple
    gamma2: tuple
    beta: tuple
    M: int = 1000

    def __post_init__(self):
        for name in ("gamma1", "gamma2", "beta"):
            a, b = getattr(self, name)
            if not (a > 0 and b > 0 and np.isfinite(a) and np.isfinite(b)):
                raise ImproperProposal(f"{name} proposal needs positive parameters, got ({a}, {b})")
        if int(self.M) < 1:
            raise DomainError(f"M must be >= 1, got {self.M}")


def proposal_for(stats: SuffStats, prior: str = "uniform", M: int = 1000) -> ProposalSpec:
    """Proposal matching the factored posterior under ``prior``.

    Uniform: ``Gamma(r1 + 1, S1)``, ``Gamma(r2 + 1, S2)``, ``Beta(r1 + 1, r2 + 1)``.
    Jeffreys drops one from each gamma shape.
    """
    prior = check_prior(prior)
    shift = 1 if prior == "uniform" else 0
    return ProposalSpec(
        gamma1=(stats.r1 + shift, stats.S1),
        gamma2=(stats.r2 + shift, stats.S2),
        beta=(stats.r1 + 1, stats.r2 + 1),
        M=int(M),
    )


@dataclass(frozen=True, eq=False)
class ISDraws:
    """Proposal draws with their log censoring weights.

    Stored column-wise; ``draws[i]`` gives the ``i``-th
    ``(theta1, theta2, p, log_h)`` tuple.
    """

    theta1: np.ndarray
    theta2: np.ndarray
    p: np.ndarray
    log_h: np.ndarray

    def __len__(self):
        return self.log_h.size

    def __getitem__(self, i):
        return self.theta1[i], self.theta2[i], self.p[i], self.log_h[i]

    @property
    def coords(self) -> np.ndarray:
        return np.stack([self.theta1, self.theta2, self.p], axis=1)

    def normalized_weights(self) -> np.ndarray:
        return np.exp(self.log_h - logsumexp(self.log_h))

    @property
    def ess(self) -> float:
        """Effective sample size ``(sum w)^2 / sum w^2``."""
        return float(np.exp(2 * logsumexp(self.log_h) - logsumexp(2 * self.log_h)))


def is_draws(sample, delta: float = 1.0, prior: str = "uniform", M: int = 1000, rng=None) -> ISDraws:
    """Draw ``M`` proposal points and their log weights.

    Raises
    ------
    ImproperProposal
        If a gamma shape or rate is not positive, e.g. a component with no
        failures (``S = 0``), or ``r1 = 0`` under the Jeffreys prior.
    """
    stats = sample if isinstance(sample, SuffStats) else sample.suff_stats(delta)
    spec = proposal_for(stats, prior, M)
    rng = np.random.default_rng(rng)
    a1, b1 = spec.gamma1
    a2, b2 = spec.gamma2
    t1 = rng.gamma(a1, 1.0 / b1, size=spec.M)
    t2 = rng.gamma(a2, 1.0 / b2, size=spec.M)
    p = rng.beta(*spec.beta, size=spec.M)
    if stats.m:
        log_h = stats.m * np.logaddexp(np.log(p) - t1 * stats.T, np.log1p(-p) - t2 * stats.lam)
    else:
        log_h = np.zeros(spec.M)
    return ISDraws(t1, t2, p, log_h)


def _integrand(draws: ISDraws, loss: LossSpec) -> np.ndarray:
    x = draws.coords
    if loss.kind == "SELF":
        return x
    if np.any(x <= 0):
        raise DomainError("GELF needs strictly positive draws")
    return np.exp(-loss.c * np.log(x))


def _weights(draws: ISDraws) -> np.ndarray:
    if len(draws) == 0:
        raise DomainError("no draws")
    if not np.any(np.isfinite(draws.log_h)):
        raise DegenerateWeights("every draw has zero weight")
    w = draws.normalized_weights()
    # sum(w) / max(w) counts the draws carrying the mass
    effective = 1.0 / w.max()
    if effective < min(2.0, len(draws)):
        raise DegenerateWeights(
            f"importance weights collapsed (sum w / max w = {effective:.3g}, ESS = {draws.ess:.3g})"
        )
    return w


def is_estimate(draws: ISDraws, loss: LossSpec | None = None) -> np.ndarray:
    """Self-normalized importance estimate of ``(theta1, theta2, p)``.

    Under SELF this is the weighted mean; under GELF the weighted mean of
    ``x^-c`` raised to ``-1/c``.
    """
    loss = LossSpec() if loss is None else loss
    if not isinstance(loss, LossSpec):
        raise InvalidLoss(f"expected a LossSpec, got {loss!r}")
    w = _weights(draws)
    mu = w @ _integrand(draws, loss)
    if loss.kind == "SELF":
        return mu
    return mu ** (-1.0 / loss.c)


def is_standard_error(draws: ISDraws, loss: LossSpec | None = None) -> np.ndarray:
    """Delta-method Monte-Carlo standard error of :func:`is_estimate`."""
    loss = LossSpec() if loss is None else loss
    w = _weights(draws)
    g = _integrand(draws, loss)
    mu = w @ g
    se = np.sqrt((w**2) @ ((g - mu) ** 2))
    if loss.kind == "SELF":
        return se
    c = loss.c
    return np.abs(mu ** (-1.0 / c - 1.0) / c) * se
