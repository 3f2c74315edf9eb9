"""Input validation helpers for the estimator classes."""
from __future__ import annotations

import numbers

import numpy as np

from .exceptions import DomainError, InvalidLoss
from .likelihood import CensoredSample
from .losses import LossSpec

__all__ = ["check_censored_data", "check_loss", "check_alpha", "check_positive"]


def check_positive(value, name):
    if not isinstance(value, numbers.Real) or not np.isfinite(value) or value <= 0:
        raise DomainError(f"{name} must be a positive finite number, got {value!r}")
    return float(value)


def check_alpha(alpha):
    if not isinstance(alpha, numbers.Real) or not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    return float(alpha)


def check_loss(loss="self", c=None) -> LossSpec:
    """Build a :class:`LossSpec` from ``"self"``/``"gelf"`` and ``c``."""
    if isinstance(loss, LossSpec):
        return loss
    key = str(loss).lower()
    if key == "self":
        return LossSpec("SELF")
    if key == "gelf":
        return LossSpec("GELF", c)
    raise InvalidLoss(f"loss must be 'self' or 'gelf', got {loss!r}")


def check_censored_data(X, y=None, *, n=None, censor_time=None) -> CensoredSample:
    """Coerce estimator input to a :class:`CensoredSample`.

    ``X`` is either a ``CensoredSample`` or a 1-D array of times (a single
    column 2-D array is accepted). ``y`` then labels each row ``1``
    (exponential failure), ``2`` (Lomax failure) or ``0`` (survivor at
    ``censor_time``). Survivors may instead be counted through ``n``, the
    total number of units on test.
    """
    if isinstance(X, CensoredSample):
        if n is not None and n != X.n:
            raise DomainError(f"n={n} conflicts with the sample's n={X.n}")
        if censor_time is not None and censor_time != X.censor_time:
            raise DomainError(f"censor_time={censor_time} conflicts with the sample's {X.censor_time}")
        return X
    if y is None:
        raise DomainError("component labels y are required when X is an array of times")
    times = np.asarray(X, dtype=float)
    if times.ndim == 2 and times.shape[1] == 1:
        times = times[:, 0]
    if times.ndim != 1:
        raise DomainError(f"X must be 1-D (one time per unit), got shape {np.shape(X)}")
    labels = np.asarray(y)
    if labels.shape != times.shape:
        raise DomainError(f"y has shape {labels.shape}, expected {times.shape}")
    if not np.all(np.isin(labels, (0, 1, 2))):
        raise DomainError("labels must be 0 (survivor), 1 or 2")
    if not np.all(np.isfinite(times)):
        raise DomainError("times must be finite")

    survivors = labels == 0
    if censor_time is None:
        if np.any(survivors):
            stops = np.unique(times[survivors])
            if stops.size != 1:
                raise DomainError("survivor rows disagree on the censoring time; pass censor_time")
            censor_time = float(stops[0])
        else:
            censor_time = float(times.max()) if n in (None, times.size) else None
            if censor_time is None:
                raise DomainError("censor_time is required when survivors are counted through n")
    total = times.size if n is None else int(n)
    if n is not None and np.any(survivors) and total != times.size:
        raise DomainError("give survivors either as label-0 rows or through n, not both")
    return CensoredSample(times[labels == 1], times[labels == 2], total, censor_time)
