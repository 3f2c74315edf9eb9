"""Closed-form posterior summaries under uniform and Jeffreys priors.

Expanding the censoring factor binomially turns the posterior into a finite
mixture over ``k = 0..n-r`` of products ``Gamma x Gamma x Beta``, where ``k``
is the number of censored units assigned to the exponential component. Every
posterior moment is then a ratio of two sums

    sum_k binom(n-r, k) A_k^-(a0+i) B_k^-(b0+j) Beta(k + r1 + 1 + l, n - k - r1 + 1)

with ``A_k = S1 + T k`` and ``B_k = S2 + (n - r - k) log(1 + T/delta)``.
The prior only shifts the gamma shapes: ``a0 = r1 + 1`` (uniform) or
``a0 = r1`` (Jeffreys), likewise ``b0`` with ``r2``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import betaln, gammaln, logsumexp

from .exceptions import GelfDomainError, ImproperPosterior, InvalidLoss
from .likelihood import CensoredSample, SuffStats, _log_binom
from .losses import LossSpec, check_prior

__all__ = [
    "ExpansionTerm",
    "PosteriorExpansion",
    "build_expansion",
    "bayes_self",
    "bayes_gelf",
    "bayes_estimate",
    "posterior_variance",
]


@dataclass(frozen=True)
class ExpansionTerm:
    k: int
    A2k: float
    B2k: float
    log_binom: float


@dataclass(frozen=True, eq=False)
class PosteriorExpansion:
    """Immutable binomial expansion of the posterior for one sample and prior."""

    prior: str
    r1: int
    r2: int
    n: int
    T: float
    delta: float
    k: np.ndarray
    A: np.ndarray
    B: np.ndarray
    log_binom: np.ndarray
    logH: float

    @property
    def terms(self) -> list[ExpansionTerm]:
        return [
            ExpansionTerm(int(k), float(a), float(b), float(lb))
            for k, a, b, lb in zip(self.k, self.A, self.B, self.log_binom)
        ]

    @property
    def a0(self) -> int:
        """Gamma shape of the ``theta1`` kernel in each term."""
        return self.r1 + 1 if self.prior == "uniform" else self.r1

    @property
    def b0(self) -> int:
        return self.r2 + 1 if self.prior == "uniform" else self.r2

    def log_term_weights(self, da=0.0, db=0.0, dp=0.0, dq=0.0) -> np.ndarray:
        """Per-``k`` log terms with the exponents shifted by ``da``, ``db``
        and the beta arguments by ``dp`` (first) and ``dq`` (second)."""
        return (
            self.log_binom
            - (self.a0 + da) * np.log(self.A)
            - (self.b0 + db) * np.log(self.B)
            + betaln(self.k + self.r1 + 1 + dp, self.n - self.k - self.r1 + 1 + dq)
        )

    def log_sum(self, da=0.0, db=0.0, dp=0.0, dq=0.0) -> float:
        return float(logsumexp(self.log_term_weights(da, db, dp, dq)))

    def log_moment(self, coordinate: int, power: float) -> float:
        """``log E[param ** power]`` for coordinate 0 (theta1), 1 (theta2) or 2 (p)."""
        base = self.logH - gammaln(self.a0) - gammaln(self.b0)
        if coordinate == 0:
            return gammaln(self.a0 + power) - gammaln(self.a0) + self.log_sum(da=power) - base
        if coordinate == 1:
            return gammaln(self.b0 + power) - gammaln(self.b0) + self.log_sum(db=power) - base
        if coordinate == 2:
            return self.log_sum(dp=power) - base
        raise IndexError(coordinate)


def build_expansion(sample, delta: float = 1.0, prior: str = "uniform") -> PosteriorExpansion:
    """Tabulate the expansion terms and the log normalizing constant.

    Raises
    ------
    ImproperPosterior
        If the posterior does not integrate. With ``T > 0`` this happens
        exactly when a component has no observed failure: some term then
        has ``A_k = 0`` or ``B_k = 0`` raised to a negative power, and under
        the Jeffreys prior the kernel is also not integrable at zero.
    """
    prior = check_prior(prior)
    s = sample if isinstance(sample, SuffStats) else sample.suff_stats(delta)
    for name, r in (("r1", s.r1), ("r2", s.r2)):
        if r < 1:
            if prior == "jeffreys":
                why = f"Gamma({name}) = Gamma(0) diverges"
            else:
                why = "a term with zero total exposure has a non-integrable gamma kernel"
            raise ImproperPosterior(f"{prior} posterior is improper with {name} = 0: {why}")
    m = s.m
    k = np.arange(m + 1)
    A = s.S1 + s.T * k if m else np.array([s.S1])
    B = s.S2 + (m - k) * s.lam
    if np.any(A <= 0) or np.any(B <= 0):
        raise ImproperPosterior("an expansion term has nonpositive A_k or B_k")
    for arr in (k, A, B):
        arr.setflags(write=False)
    lb = _log_binom(m)
    lb.setflags(write=False)
    exp = PosteriorExpansion(prior, s.r1, s.r2, s.n, s.T, s.delta, k, A, B, lb, 0.0)
    logH = gammaln(exp.a0) + gammaln(exp.b0) + exp.log_sum()
    if not np.isfinite(logH):
        raise ImproperPosterior(f"normalizing constant is not finite (log H = {logH})")
    object.__setattr__(exp, "logH", float(logH))
    return exp


def _as_expansion(obj, delta=1.0, prior="uniform"):
    if isinstance(obj, PosteriorExpansion):
        return obj
    return build_expansion(obj, delta, prior)


def bayes_self(expansion: PosteriorExpansion) -> np.ndarray:
    """Posterior means of ``(theta1, theta2, p)``."""
    e = _as_expansion(expansion)
    return np.exp([e.log_moment(i, 1.0) for i in range(3)])


def _gelf_domain(e: PosteriorExpansion, c: float):
    checks = (
        ("theta1", e.a0 - c, "a0 - c"),
        ("theta2", e.b0 - c, "b0 - c"),
        ("p", e.r1 + 1 - c, "r1 + 1 - c"),
    )
    for name, value, expr in checks:
        if not value > 0:
            a = "r1" if name != "theta2" else "r2"
            raise GelfDomainError(
                f"GELF estimate of {name} needs {expr} > 0 under the {e.prior} prior "
                f"({a} = {e.r1 if a == 'r1' else e.r2}, c = {c:g} gives {value:g})"
            )


def bayes_gelf(expansion: PosteriorExpansion, c: float) -> np.ndarray:
    """General entropy loss estimates ``E[param^-c] ** (-1/c)``."""
    if c is None or not np.isfinite(c) or c == 0:
        raise InvalidLoss(f"GELF needs a finite nonzero c, got {c!r}")
    e = _as_expansion(expansion)
    c = float(c)
    _gelf_domain(e, c)
    return np.exp([-e.log_moment(i, -c) / c for i in range(3)])


def bayes_estimate(expansion: PosteriorExpansion, loss: LossSpec) -> np.ndarray:
    if loss.kind == "SELF":
        return bayes_self(expansion)
    return bayes_gelf(expansion, loss.c)


def posterior_variance(expansion: PosteriorExpansion) -> np.ndarray:
    """Marginal posterior variances of ``(theta1, theta2, p)``."""
    e = _as_expansion(expansion)
    out = np.empty(3)
    for i in range(3):
        m1 = e.log_moment(i, 1.0)
        m2 = e.log_moment(i, 2.0)
        # E[x^2] - E[x]^2 = E[x]^2 (E[x^2]/E[x]^2 - 1)
        out[i] = np.exp(2 * m1) * np.expm1(m2 - 2 * m1)
    return out
