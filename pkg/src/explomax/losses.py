"""Loss functions and prior tags shared by the Bayes estimators."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, InvalidLoss

PRIORS = ("uniform", "jeffreys")


def check_prior(prior: str) -> str:
    key = str(prior).lower()
    if key not in PRIORS:
        raise DomainError(f"prior must be one of {PRIORS}, got {prior!r}")
    return key


@dataclass(frozen=True)
class LossSpec:
    """Squared error (``SELF``) or general entropy (``GELF``) loss.

    The GELF weight ``omega`` is fixed at 1.
    """

    kind: str = "SELF"
    c: float | None = None

    def __post_init__(self):
        kind = str(self.kind).upper()
        if kind not in ("SELF", "GELF"):
            raise InvalidLoss(f"unknown loss kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if kind == "GELF":
            if self.c is None or not np.isfinite(self.c) or float(self.c) == 0.0:
                raise InvalidLoss(f"GELF needs a finite nonzero c, got {self.c!r}")
            object.__setattr__(self, "c", float(self.c))
        else:
            object.__setattr__(self, "c", None)

    @classmethod
    def squared(cls) -> "LossSpec":
        return cls("SELF")

    @classmethod
    def entropy(cls, c: float) -> "LossSpec":
        return cls("GELF", c)

    @property
    def label(self) -> str:
        return "SELF" if self.kind == "SELF" else f"GELF(c={self.c:g})"

    def __call__(self, truth, estimate):
        """Loss of ``estimate`` when the true value is ``truth``."""
        truth = np.asarray(truth, dtype=float)
        estimate = np.asarray(estimate, dtype=float)
        if self.kind == "SELF":
            return (estimate - truth) ** 2
        if np.any(truth <= 0) or np.any(estimate <= 0):
            raise DomainError("GELF is defined for positive truth and estimate only")
        log_ratio = np.log(estimate) - np.log(truth)
        c = self.c
        # (ratio^c - c log ratio - 1) without cancellation near ratio = 1
        return np.expm1(c * log_ratio) - c * log_ratio
