"""Exponential, Lomax and their two-component mixture.

All evaluation functions accept scalars or array-likes and return a float
for scalar input and an ``ndarray`` otherwise.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError

__all__ = [
    "Params",
    "exp_pdf",
    "exp_cdf",
    "lomax_pdf",
    "lomax_logpdf",
    "lomax_cdf",
    "mixture_pdf",
    "mixture_cdf",
    "mixture_sf",
    "mixture_sample",
]


@dataclass(frozen=True)
class Params:
    """Parameter point of the exponential-Lomax mixture.

    Parameters
    ----------
    theta1 : float
        Rate of the exponential component.
    theta2 : float
        Shape of the Lomax component.
    p : float
        Mixing proportion of the exponential component, in (0, 1).
    delta : float
        Lomax scale. Treated as a known constant throughout.
    """

    theta1: float
    theta2: float
    p: float
    delta: float = 1.0

    def __post_init__(self):
        for name in ("theta1", "theta2", "p", "delta"):
            value = float(getattr(self, name))
            if not np.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if self.theta1 <= 0:
            raise DomainError(f"theta1 must be > 0, got {self.theta1}")
        if self.theta2 <= 0:
            raise DomainError(f"theta2 must be > 0, got {self.theta2}")
        if self.delta <= 0:
            raise DomainError(f"delta must be > 0, got {self.delta}")
        if not 0.0 < self.p < 1.0:
            raise DomainError(f"p must lie in the open interval (0, 1), got {self.p}")

    def as_array(self) -> np.ndarray:
        """Return ``(theta1, theta2, p)``; ``delta`` is not a free parameter."""
        return np.array([self.theta1, self.theta2, self.p])

    def replace(self, **changes) -> "Params":
        values = dict(theta1=self.theta1, theta2=self.theta2, p=self.p, delta=self.delta)
        values.update(changes)
        return Params(**values)


def _support(x):
    x = np.asarray(x, dtype=float)
    if np.any(np.isnan(x)) or np.any(x < 0):
        raise DomainError("x must be >= 0")
    return x


def _positive(name, value):
    value = float(value)
    if not value > 0 or not np.isfinite(value):
        raise DomainError(f"{name} must be a positive finite number, got {value!r}")
    return value


def _out(values, like):
    if np.ndim(like) == 0:
        return float(values)
    return values


def exp_pdf(x, theta1):
    """Exponential density ``theta1 * exp(-theta1 * x)``."""
    xs = _support(x)
    theta1 = _positive("theta1", theta1)
    return _out(theta1 * np.exp(-theta1 * xs), x)


def exp_cdf(x, theta1):
    xs = _support(x)
    theta1 = _positive("theta1", theta1)
    return _out(-np.expm1(-theta1 * xs), x)


def lomax_logpdf(x, theta2, delta):
    """Log-density of the Lomax law.

    Evaluated as ``log(theta2) - log(delta) - (theta2 + 1) * log1p(x / delta)``,
    which equals ``log(theta2 * delta**theta2 * (x + delta)**-(theta2 + 1))``
    without ever forming ``delta**theta2``.
    """
    xs = _support(x)
    theta2 = _positive("theta2", theta2)
    delta = _positive("delta", delta)
    return _out(np.log(theta2) - np.log(delta) - (theta2 + 1.0) * np.log1p(xs / delta), x)


def lomax_pdf(x, theta2, delta=1.0):
    return _out(np.exp(lomax_logpdf(np.asarray(x, dtype=float), theta2, delta)), x)


def lomax_cdf(x, theta2, delta=1.0):
    xs = _support(x)
    theta2 = _positive("theta2", theta2)
    delta = _positive("delta", delta)
    return _out(-np.expm1(-theta2 * np.log1p(xs / delta)), x)


def mixture_pdf(x, params: Params):
    xs = _support(x)
    p = params.p
    value = p * exp_pdf(xs, params.theta1) + (1.0 - p) * lomax_pdf(xs, params.theta2, params.delta)
    return _out(value, x)


def mixture_sf(x, params: Params):
    """Survival function ``p exp(-theta1 x) + (1 - p)(1 + x/delta)^-theta2``."""
    xs = _support(x)
    p = params.p
    value = p * np.exp(-params.theta1 * xs) + (1.0 - p) * np.exp(
        -params.theta2 * np.log1p(xs / params.delta)
    )
    return _out(value, x)


def mixture_cdf(x, params: Params):
    xs = _support(x)
    p = params.p
    value = p * exp_cdf(xs, params.theta1) + (1.0 - p) * lomax_cdf(xs, params.theta2, params.delta)
    return _out(value, x)


def _exp_quantile(u, theta1):
    return -np.log1p(-u) / theta1


def _lomax_quantile(u, theta2, delta):
    return delta * np.expm1(-np.log1p(-u) / theta2)


def mixture_sample(params: Params, count: int, rng=None):
    """Draw labelled lifetimes from the mixture by inverse transform.

    Two uniforms are consumed per draw, one for the component label and one
    for the lifetime, whichever component is selected.

    Parameters
    ----------
    params : Params
    count : int
        Number of draws, at least 1.
    rng : numpy.random.Generator or int, optional
        Random stream or seed. Any object with a ``random(size)`` method is
        used as is.

    Returns
    -------
    times : ndarray of shape (count,)
    labels : ndarray of int, shape (count,)
        ``1`` for the exponential component, ``2`` for the Lomax component.
    """
    count = int(count)
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    if not hasattr(rng, "random"):
        rng = np.random.default_rng(rng)
    u_label = rng.random(count)
    u_life = rng.random(count)
    first = u_label < params.p
    times = np.where(
        first,
        _exp_quantile(u_life, params.theta1),
        _lomax_quantile(u_life, params.theta2, params.delta),
    )
    labels = np.where(first, 1, 2)
    return times, labels
