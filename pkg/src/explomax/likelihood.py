"""Type-I censored likelihood of the exponential-Lomax mixture.

The log-likelihood is reported up to an additive constant that does not
depend on the parameters, so only differences are meaningful.

Notation used below: ``m = n - r`` censored units, ``e1 = exp(-theta1 T)``,
``lam = log(1 + T/delta)``, ``e2 = exp(-theta2 lam)`` and
``C = p e1 + (1 - p) e2`` is the mixture survival at ``T``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, logsumexp

from .distributions import Params
from .exceptions import DomainError, NoFailures, NonConvergence, SingularInformation

__all__ = [
    "CensoredSample",
    "SuffStats",
    "ConvergenceReport",
    "survival_at_censoring",
    "log_likelihood_direct",
    "log_likelihood_expanded",
    "score",
    "hessian",
    "observed_information",
    "ml_fit",
    "ml_variances",
]


@dataclass(frozen=True)
class CensoredSample:
    """Failure times observed up to a fixed censoring time.

    Parameters
    ----------
    obs1, obs2 : array-like
        Failure times attributed to the exponential and Lomax components.
    n : int
        Units put on test. The ``n - r`` survivors contribute no rows.
    censor_time : float
        Test termination time ``T``. May be ``inf`` only when ``n == r``.
    """

    obs1: np.ndarray
    obs2: np.ndarray
    n: int
    censor_time: float

    def __post_init__(self):
        obs1 = np.sort(np.asarray(self.obs1, dtype=float).ravel())
        obs2 = np.sort(np.asarray(self.obs2, dtype=float).ravel())
        obs1.setflags(write=False)
        obs2.setflags(write=False)
        object.__setattr__(self, "obs1", obs1)
        object.__setattr__(self, "obs2", obs2)

        n = int(self.n)
        if n != self.n or n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", n)

        T = float(self.censor_time)
        if np.isnan(T) or T <= 0:
            raise DomainError(f"censor_time must be > 0, got {self.censor_time!r}")
        object.__setattr__(self, "censor_time", T)

        r = obs1.size + obs2.size
        if r > n:
            raise DomainError(f"{r} observed failures exceed n = {n}")
        if np.isinf(T) and r < n:
            raise DomainError("an infinite censor_time requires every unit to fail (r == n)")
        for name, obs in (("obs1", obs1), ("obs2", obs2)):
            if obs.size and (not np.all(np.isfinite(obs)) or obs[0] <= 0 or obs[-1] > T):
                raise DomainError(f"every time in {name} must lie in (0, censor_time]")

    @property
    def r1(self) -> int:
        return self.obs1.size

    @property
    def r2(self) -> int:
        return self.obs2.size

    @property
    def r(self) -> int:
        return self.r1 + self.r2

    @property
    def n_censored(self) -> int:
        return self.n - self.r

    def suff_stats(self, delta: float) -> "SuffStats":
        if not delta > 0:
            raise DomainError(f"delta must be > 0, got {delta!r}")
        return SuffStats(
            S1=float(self.obs1.sum()),
            S2=float(np.log1p(self.obs2 / delta).sum()),
            r1=self.r1,
            r2=self.r2,
            n=self.n,
            T=self.censor_time,
            delta=float(delta),
            log_x2_delta=float(np.log(self.obs2 + delta).sum()),
        )

    def __eq__(self, other):
        if not isinstance(other, CensoredSample):
            return NotImplemented
        return (
            self.n == other.n
            and self.censor_time == other.censor_time
            and np.array_equal(self.obs1, other.obs1)
            and np.array_equal(self.obs2, other.obs2)
        )

    __hash__ = None


@dataclass(frozen=True)
class SuffStats:
    """Sufficient statistics of a censored sample for a given ``delta``."""

    S1: float
    S2: float
    r1: int
    r2: int
    n: int
    T: float
    delta: float
    # sum of log(x_2j + delta); only the direct log-likelihood needs it
    log_x2_delta: float = 0.0

    @property
    def m(self) -> int:
        return self.n - self.r1 - self.r2

    @property
    def lam(self) -> float:
        """``log(1 + T/delta)``; zero when nothing is censored."""
        if self.m == 0:
            return 0.0
        return float(np.log1p(self.T / self.delta))


@dataclass
class ConvergenceReport:
    converged: bool
    iterations: int
    gradient_norm: float
    score_norm: float
    log_likelihood: float
    positive_definite: bool
    history: list = field(default_factory=list, repr=False)


def _stats(sample, delta):
    if isinstance(sample, SuffStats):
        return sample
    return sample.suff_stats(delta)


def _check_delta(params: Params, stats: SuffStats):
    if not np.isclose(params.delta, stats.delta, rtol=1e-12, atol=0):
        raise DomainError(
            f"params.delta={params.delta} does not match the sample's delta={stats.delta}"
        )


def survival_at_censoring(params: Params, T: float):
    """Return ``(log C, a, b)`` where ``a + b == 1`` split ``C`` by component."""
    log_e1 = -params.theta1 * T
    log_e2 = -params.theta2 * np.log1p(T / params.delta)
    log_a = np.log(params.p) + log_e1
    log_b = np.log1p(-params.p) + log_e2
    log_C = np.logaddexp(log_a, log_b)
    return log_C, np.exp(log_a - log_C), np.exp(log_b - log_C)


def log_likelihood_direct(params: Params, sample) -> float:
    """Log-likelihood in product form, dropping the proportionality constant.

    ``sample`` may be a :class:`CensoredSample` or :class:`SuffStats`.
    """
    s = _stats(sample, params.delta)
    _check_delta(params, s)
    t1, t2, p = params.theta1, params.theta2, params.p
    ll = 0.0
    if s.r1:
        ll += s.r1 * (np.log(p) + np.log(t1)) - t1 * s.S1
    if s.r2:
        # r2 theta2 log(delta) - (theta2 + 1) sum log(x + delta), regrouped
        ll += s.r2 * (np.log1p(-p) + np.log(t2)) - t2 * s.S2 - s.log_x2_delta
    if s.m:
        log_C, _, _ = survival_at_censoring(params, s.T)
        ll += s.m * log_C
    return float(ll)


def _log_binom(m: int) -> np.ndarray:
    k = np.arange(m + 1)
    return gammaln(m + 1) - gammaln(k + 1) - gammaln(m - k + 1)


def log_likelihood_expanded(params: Params, sample) -> float:
    """Log-likelihood via the binomial expansion of the censoring factor.

    Sums over ``k = 0..n-r`` censored units assigned to the exponential
    component with log-sum-exp. Differs from :func:`log_likelihood_direct`
    by a constant that does not depend on ``params``.
    """
    s = _stats(sample, params.delta)
    _check_delta(params, s)
    t1, t2, p = params.theta1, params.theta2, params.p
    m = s.m
    k = np.arange(m + 1)
    A = s.S1 + s.T * k if m else np.array([s.S1])
    B = s.S2 + (m - k) * s.lam
    log_terms = (
        _log_binom(m)
        - t1 * A
        - t2 * B
        + (k + s.r1) * np.log(p)
        + (s.n - k - s.r1) * np.log1p(-p)
    )
    ll = logsumexp(log_terms)
    if s.r1:
        ll += s.r1 * np.log(t1)
    if s.r2:
        ll += s.r2 * np.log(t2)
    return float(ll)


def score(params: Params, sample) -> np.ndarray:
    """Gradient of the log-likelihood in ``(theta1, theta2, p)``."""
    s = _stats(sample, params.delta)
    _check_delta(params, s)
    t1, t2, p = params.theta1, params.theta2, params.p
    g = np.array([s.r1 / t1 - s.S1, s.r2 / t2 - s.S2, s.r1 / p - s.r2 / (1.0 - p)])
    if s.m:
        _, a, b = survival_at_censoring(params, s.T)
        g[0] -= s.m * s.T * a
        g[1] -= s.m * s.lam * b
        # (e1 - e2) / C written with the component shares a, b
        g[2] += s.m * (a / p - b / (1.0 - p))
    return g


def hessian(params: Params, sample) -> np.ndarray:
    """Matrix of second derivatives of the log-likelihood."""
    s = _stats(sample, params.delta)
    _check_delta(params, s)
    t1, t2, p = params.theta1, params.theta2, params.p
    H = np.diag([-s.r1 / t1**2, -s.r2 / t2**2, -s.r1 / p**2 - s.r2 / (1.0 - p) ** 2])
    if s.m:
        m, T, lam = s.m, s.T, s.lam
        _, a, b = survival_at_censoring(params, T)
        d = a / p - b / (1.0 - p)  # (e1 - e2) / C
        H[0, 0] += m * T**2 * a * (1.0 - a)
        H[1, 1] += m * lam**2 * b * (1.0 - b)
        H[2, 2] -= m * d**2
        H[0, 1] = H[1, 0] = -m * T * lam * a * b
        H[0, 2] = H[2, 0] = m * T * (a / p) * (-1.0 + p * d)
        H[1, 2] = H[2, 1] = m * lam * (b / (1.0 - p)) * (1.0 + (1.0 - p) * d)
    return H


def observed_information(params: Params, sample) -> np.ndarray:
    """Negated Hessian of the log-likelihood, ordered ``(theta1, theta2, p)``."""
    return -hessian(params, sample)


def ml_variances(params: Params, sample) -> np.ndarray:
    """Diagonal of the inverse observed information."""
    info = observed_information(params, sample)
    if not np.all(np.isfinite(info)):
        raise SingularInformation("information matrix has non-finite entries")
    scale = np.sqrt(np.abs(np.diag(info)))
    if np.any(scale == 0):
        raise SingularInformation("information matrix has a zero diagonal entry")
    # equilibrate before inverting; parameters live on very different scales
    scaled = info / np.outer(scale, scale)
    if np.linalg.cond(scaled) > 1e14:
        raise SingularInformation("information matrix is numerically singular")
    try:
        inv = np.linalg.inv(scaled) / np.outer(scale, scale)
    except np.linalg.LinAlgError as exc:
        raise SingularInformation(str(exc)) from exc
    var = np.diag(inv).copy()
    if np.any(var < 0):
        raise SingularInformation("information matrix is not positive definite")
    return var


# -- ML solver ---------------------------------------------------------------


def _to_free(params: Params) -> np.ndarray:
    return np.array([np.log(params.theta1), np.log(params.theta2), np.log(params.p / (1 - params.p))])


def _from_free(u, delta) -> Params:
    p = 1.0 / (1.0 + np.exp(-u[2]))
    return Params(np.exp(u[0]), np.exp(u[1]), p, delta)


def _free_derivatives(params: Params, stats: SuffStats):
    """Gradient and Hessian in ``(log theta1, log theta2, logit p)``."""
    g = score(params, stats)
    H = hessian(params, stats)
    jac = np.array([params.theta1, params.theta2, params.p * (1 - params.p)])
    curv = np.array([params.theta1, params.theta2, params.p * (1 - params.p) * (1 - 2 * params.p)])
    g_u = jac * g
    H_u = H * np.outer(jac, jac) + np.diag(curv * g)
    return g_u, H_u


def _ascent_direction(g_u, H_u):
    try:
        L = np.linalg.cholesky(-H_u)
        return np.linalg.solve(L.T, np.linalg.solve(L, g_u))
    except np.linalg.LinAlgError:
        # indefinite: reflect eigenvalues so the step still climbs
        w, V = np.linalg.eigh(-H_u)
        w = np.maximum(np.abs(w), 1e-8 * max(1.0, np.abs(w).max()))
        return V @ ((V.T @ g_u) / w)


def default_init(sample: CensoredSample, delta: float) -> Params:
    """Uncensored closed-form estimates, the exact optimum when ``n == r``."""
    s = _stats(sample, delta)
    return Params(s.r1 / s.S1, s.r2 / s.S2, s.r1 / (s.r1 + s.r2), delta)


def ml_fit(sample, delta: float = 1.0, init: Params | None = None, max_iter: int = 200, tol: float = 1e-8):
    """Maximum likelihood estimates by Newton's method.

    Iterates on ``(log theta1, log theta2, logit p)`` so every iterate is
    feasible, with a backtracking line search on the log-likelihood.
    Convergence is declared when the gradient in those coordinates has
    sup-norm below ``tol``.

    Returns
    -------
    params : Params
    report : ConvergenceReport

    Raises
    ------
    NoFailures
        If either component has no observed failure.
    NonConvergence
        If ``max_iter`` is reached. ``exc.best`` holds the last iterate.
    """
    stats = _stats(sample, delta)
    if stats.r1 == 0 or stats.r2 == 0:
        raise NoFailures(
            f"ML needs at least one failure per component (r1={stats.r1}, r2={stats.r2})"
        )
    params = init if init is not None else default_init(stats, delta)
    if init is not None and init.delta != delta:
        params = init.replace(delta=delta)
    u = _to_free(params)
    ll = log_likelihood_direct(params, stats)
    history = []
    converged = False
    it = 0
    for it in range(max_iter + 1):
        g_u, H_u = _free_derivatives(params, stats)
        gnorm = float(np.max(np.abs(g_u)))
        history.append((ll, gnorm))
        if gnorm < tol:
            converged = True
            break
        if it == max_iter:
            break
        step = _ascent_direction(g_u, H_u)
        slope = float(g_u @ step)
        t = 1.0
        for _ in range(60):
            cand = _from_free(u + t * step, delta)
            cand_ll = log_likelihood_direct(cand, stats)
            if cand_ll >= ll + 1e-4 * t * slope:
                break
            # at the optimum ll changes sit below rounding; trust a full
            # Newton step that shrinks the gradient instead
            if t == 1.0 and abs(cand_ll - ll) <= 1e-12 * max(1.0, abs(ll)):
                g_c, _ = _free_derivatives(cand, stats)
                if np.max(np.abs(g_c)) < gnorm:
                    break
            t *= 0.5
        else:
            break
        u = u + t * step
        params, ll = cand, cand_ll

    # one extra Newton step; near the optimum it squares the residual
    if converged:
        g_u, H_u = _free_derivatives(params, stats)
        cand = _from_free(u + _ascent_direction(g_u, H_u), delta)
        g_c, _ = _free_derivatives(cand, stats)
        if np.max(np.abs(g_c)) < np.max(np.abs(g_u)):
            params = cand
            ll = log_likelihood_direct(params, stats)

    g_u, _ = _free_derivatives(params, stats)
    info = observed_information(params, stats)
    try:
        np.linalg.cholesky(info)
        pd = True
    except np.linalg.LinAlgError:
        pd = False
    report = ConvergenceReport(
        converged=converged,
        iterations=it,
        gradient_norm=float(np.max(np.abs(g_u))),
        score_norm=float(np.max(np.abs(score(params, stats)))),
        log_likelihood=ll,
        positive_definite=pd,
        history=history,
    )
    if not converged:
        raise NonConvergence(
            f"Newton iteration did not converge in {max_iter} steps "
            f"(gradient norm {report.gradient_norm:.3g})",
            best=params,
            report=report,
        )
    return params, report
