"""Independent numerical oracles used by the test-suite.

Nothing here goes through the binomial expansion: posterior functionals are
integrated from the product-form likelihood directly.
"""
import numpy as np
from scipy.integrate import cubature, quad


def log_posterior_kernel(t1, t2, p, data, prior):
    """Unnormalized log posterior built from the product-form likelihood.

    ``data`` is ``(x1, x2, n, T, delta)``.
    """
    x1, x2, n, T, delta = data
    r1, r2 = len(x1), len(x2)
    m = n - r1 - r2
    lp = (
        r1 * np.log(p * t1)
        - t1 * np.sum(x1)
        + r2 * np.log((1 - p) * t2)
        + r2 * t2 * np.log(delta)
        - (t2 + 1) * np.sum(np.log(np.asarray(x2, dtype=float) + delta))
    )
    if m:
        with np.errstate(divide="ignore"):
            surv = p * np.exp(-t1 * T) + (1 - p) * (1 + T / delta) ** (-t2)
            lp = lp + m * np.log(surv)
    if prior == "jeffreys":
        lp = lp - np.log(t1) - np.log(t2)
    return lp


def posterior_functionals(data, prior, cs=(1.2, -1.2), rtol=1e-10):
    """Posterior mean, variance and ``E[x^-c]^(-1/c)`` per coordinate.

    Adaptive Gauss-Kronrod cubature over ``(log theta1, log theta2, logit p)``.
    In these coordinates the integrand is analytic and decays exponentially,
    so truncating at the box below costs far less than ``rtol``.

    Returns a dict with ``logZ`` (log normalizer of the product-form kernel),
    ``mean``, ``var`` and ``gelf`` (``{c: array}``).
    """
    x1, x2, n, T, delta = data
    r1, r2 = len(x1), len(x2)
    s1 = max(r1, 1) / max(np.sum(x1), 1e-300)
    s2 = max(r2, 1) / max(np.sum(np.log1p(np.asarray(x2, dtype=float) / delta)), 1e-300)
    ref = log_posterior_kernel(s1, s2, (r1 + 1) / (r1 + r2 + 2), data, prior)

    def integrand(z):
        t1 = s1 * np.exp(z[:, 0])
        t2 = s2 * np.exp(z[:, 1])
        p = 1.0 / (1.0 + np.exp(-z[:, 2]))
        with np.errstate(over="ignore", under="ignore", invalid="ignore", divide="ignore"):
            w = np.exp(log_posterior_kernel(t1, t2, p, data, prior) - ref) * t1 * t2 * p * (1 - p)
            cols = [w, w * t1, w * t2, w * p, w * t1**2, w * t2**2, w * p**2]
            for c in cs:
                cols += [w * t1 ** (-c), w * t2 ** (-c), w * p ** (-c)]
        out = np.stack(cols, axis=-1)
        return np.where(np.isfinite(out), out, 0.0)

    res = cubature(
        integrand,
        [-45.0, -45.0, -45.0],
        [12.0, 12.0, 45.0],
        rule="gk15",
        rtol=rtol,
        atol=0,
        max_subdivisions=200000,
    )
    vals = res.estimate
    Z = vals[0]
    mean = vals[1:4] / Z
    second = vals[4:7] / Z
    gelf = {c: (vals[7 + 3 * j : 10 + 3 * j] / Z) ** (-1.0 / c) for j, c in enumerate(cs)}
    return {
        "logZ": float(np.log(Z) + ref),
        "mean": mean,
        "var": second - mean**2,
        "gelf": gelf,
        "converged": res.status == "converged",
    }


def integrate_1d(f, a, b, **kw):
    """Adaptive Gauss-Kronrod on ``[a, b]``; ``b`` may be ``inf``."""
    kw.setdefault("epsabs", 0)
    kw.setdefault("epsrel", 1e-12)
    kw.setdefault("limit", 1000)
    val, _ = quad(f, a, b, **kw)
    return val


def finite_difference_gradient(f, x, rel_step=1e-6):
    """Central differences with step ``rel_step * max(1, |x_i|)``."""
    x = np.asarray(x, dtype=float)
    cols = []
    for i in range(x.size):
        h = rel_step * max(1.0, abs(x[i]))
        e = np.zeros_like(x)
        e[i] = h
        cols.append((np.asarray(f(x + e)) - np.asarray(f(x - e))) / (2 * h))
    return np.stack(cols, axis=0)
