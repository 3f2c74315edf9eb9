"""Monte-Carlo studies of estimator performance under type-I censoring.

Each replication draws ``n`` lifetimes from the mixture, censors them at
``T`` and runs every requested estimator on the result. Replication ``i``
uses random streams keyed on ``(seed, i)`` only, so a study gives the same
report whatever the number of workers.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from .bayes import bayes_estimate, build_expansion
from .distributions import Params, _exp_quantile, _lomax_quantile, mixture_sample
from .exceptions import DomainError, InvalidLoss
from .importance import is_draws, is_estimate
from .likelihood import CensoredSample, ml_fit
from .losses import LossSpec, check_prior
from .predictive import predictive_interval

__all__ = [
    "EstimatorSpec",
    "StudyConfig",
    "StudyReport",
    "generate_censored_sample",
    "estimated_risk",
    "standard_estimators",
    "run_study",
]

METHODS = ("ml", "bayes", "is")
_METHOD_NAMES = {"ml": "ML", "bayes": "BayesClosed", "is": "BayesIS"}
PARAM_NAMES = ("theta1", "theta2", "p")
COMPOSITIONS = ("bernoulli", "fixed")


@dataclass(frozen=True)
class EstimatorSpec:
    """One column group of a results table: method, prior and loss."""

    method: str
    prior: str | None = None
    loss: LossSpec = field(default_factory=LossSpec)

    def __post_init__(self):
        method = str(self.method).lower()
        aliases = {"mle": "ml", "bayesclosed": "bayes", "closed": "bayes", "bayesis": "is"}
        method = aliases.get(method, method)
        if method not in METHODS:
            raise DomainError(f"method must be one of {METHODS}, got {self.method!r}")
        object.__setattr__(self, "method", method)
        if method == "ml":
            if self.prior is not None:
                raise DomainError("ML estimators carry no prior")
        else:
            object.__setattr__(self, "prior", check_prior(self.prior or "uniform"))
        if not isinstance(self.loss, LossSpec):
            raise InvalidLoss(f"loss must be a LossSpec, got {self.loss!r}")

    @property
    def label(self) -> str:
        parts = [_METHOD_NAMES[self.method]]
        if self.prior:
            parts.append(self.prior)
        parts.append(self.loss.label)
        return "/".join(parts)


def standard_estimators(priors=("uniform",), losses=(LossSpec(),), methods=METHODS):
    """ML, importance-sampling and closed-form Bayes columns for each prior and loss."""
    specs = []
    for loss in losses:
        if "ml" in methods:
            specs.append(EstimatorSpec("ml", None, loss))
        for prior in priors:
            for method in ("is", "bayes"):
                if method in methods:
                    specs.append(EstimatorSpec(method, prior, loss))
    return specs


@dataclass(frozen=True)
class StudyConfig:
    true_params: Params
    n: int
    censor_time: float
    reps: int
    seed: int
    estimators: tuple = ()
    is_M: int = 1000
    alpha: float = 0.01
    predictive_priors: tuple = ()
    composition: str = "bernoulli"

    def __post_init__(self):
        if self.composition not in COMPOSITIONS:
            raise DomainError(f"composition must be one of {COMPOSITIONS}, got {self.composition!r}")
        if int(self.reps) != self.reps or self.reps < 1:
            raise DomainError(f"reps must be a positive integer, got {self.reps!r}")
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"n must be an integer >= 2, got {self.n!r}")
        if not self.censor_time > 0:
            raise DomainError(f"censor_time must be > 0, got {self.censor_time!r}")
        if int(self.is_M) < 1:
            raise DomainError(f"is_M must be >= 1, got {self.is_M!r}")
        if not 0 < self.alpha < 1:
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if int(self.seed) != self.seed or self.seed < 0:
            raise DomainError(f"seed must be a nonnegative integer, got {self.seed!r}")
        object.__setattr__(self, "estimators", tuple(self.estimators))
        object.__setattr__(self, "predictive_priors", tuple(check_prior(p) for p in self.predictive_priors))
        if not self.estimators and not self.predictive_priors:
            raise DomainError("nothing to run: give at least one estimator or predictive prior")
        labels = [e.label for e in self.estimators]
        if len(set(labels)) != len(labels):
            raise DomainError("duplicate estimator specifications")

    def as_dict(self) -> dict:
        tp = self.true_params
        return {
            "true_params": {"theta1": tp.theta1, "theta2": tp.theta2, "p": tp.p, "delta": tp.delta},
            "n": self.n,
            "censor_time": self.censor_time,
            "reps": self.reps,
            "seed": self.seed,
            "estimators": [e.label for e in self.estimators],
            "is_M": self.is_M,
            "alpha": self.alpha,
            "predictive_priors": list(self.predictive_priors),
            "composition": self.composition,
        }


def generate_censored_sample(
    true_params: Params, n: int, T: float, rng=None, composition: str = "bernoulli"
) -> CensoredSample:
    """Draw ``n`` labelled lifetimes and censor them at ``T``.

    Units failing after ``T`` keep no time and no label. With
    ``composition="fixed"`` exactly ``round(n p)`` units come from the
    exponential component instead of a Bernoulli(p) count.
    """
    if composition == "bernoulli":
        times, labels = mixture_sample(true_params, n, rng)
    elif composition == "fixed":
        rng = np.random.default_rng(rng)
        n1 = int(round(n * true_params.p))
        labels = np.where(np.arange(n) < n1, 1, 2)
        u = rng.random(n)
        tp = true_params
        times = np.where(labels == 1, _exp_quantile(u, tp.theta1), _lomax_quantile(u, tp.theta2, tp.delta))
    else:
        raise DomainError(f"composition must be one of {COMPOSITIONS}, got {composition!r}")
    seen = times <= T
    return CensoredSample(
        times[seen & (labels == 1)], times[seen & (labels == 2)], n, T
    )


def estimated_risk(estimates, truth: float, loss: LossSpec) -> float:
    """Average loss of ``estimates`` against the true value."""
    estimates = np.asarray(estimates, dtype=float)
    if estimates.size == 0:
        raise DomainError("no estimates to average")
    return float(np.mean(loss(truth, estimates)))


def _stream(seed: int, *key) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def _replicate(config: StudyConfig, index: int):
    """Run one replication; returns per-estimator estimates (or None if skipped)."""
    tp = config.true_params
    sample = generate_censored_sample(
        tp, config.n, config.censor_time, _stream(config.seed, index, 0), config.composition
    )
    out = {"estimates": {}, "predictive": {}, "r": (sample.r1, sample.r2)}
    if sample.r1 == 0 or sample.r2 == 0:
        return out
    stats = sample.suff_stats(tp.delta)
    cache = {}

    def expansion(prior):
        if prior not in cache:
            cache[prior] = build_expansion(stats, tp.delta, prior)
        return cache[prior]

    ml = None
    for j, spec in enumerate(config.estimators):
        try:
            if spec.method == "ml":
                if ml is None:
                    ml = ml_fit(stats, tp.delta)[0].as_array()
                est = ml
            elif spec.method == "bayes":
                est = bayes_estimate(expansion(spec.prior), spec.loss)
            else:
                draws = is_draws(stats, tp.delta, spec.prior, config.is_M, _stream(config.seed, index, 1 + j))
                est = is_estimate(draws, spec.loss)
        except (ValueError, ArithmeticError):
            continue
        if np.all(np.isfinite(est)):
            out["estimates"][spec.label] = np.asarray(est, dtype=float)
    for prior in config.predictive_priors:
        try:
            ps = predictive_interval(expansion(prior), config.alpha)
        except (ValueError, ArithmeticError):
            continue
        out["predictive"][prior] = (ps.median, ps.lower, ps.upper)
    return out


@dataclass
class StudyReport:
    """Aggregated study results.

    ``cells[label]`` holds ``mean`` and ``risk`` (one entry per parameter),
    ``used`` and ``skipped``. ``predictive[prior]`` holds the mean and median
    over replications of the predictive median and bounds.
    """

    config: StudyConfig
    cells: dict
    predictive: dict
    wall_time: float = 0.0
    raw: dict = field(default_factory=dict, repr=False)

    def to_dict(self, include_timing: bool = False) -> dict:
        out = {"config": self.config.as_dict(), "cells": self.cells, "predictive": self.predictive}
        if include_timing:
            out["wall_time"] = self.wall_time
        return out

    def to_json(self, include_timing: bool = False, **kw) -> str:
        kw.setdefault("indent", 2)
        return json.dumps(self.to_dict(include_timing), **kw)

    def to_table(self, digits: int = 5) -> str:
        """Aligned text table: estimate row with the risk row beneath it."""
        label_w = max([len("estimator")] + [len(k) for k in self.cells] + [len(k) for k in self.predictive])
        col_w = max(12, digits + 8)
        fmt = f"{{:.{digits}f}}"
        lines = []
        cfg = self.config
        tp = cfg.true_params
        lines.append(
            f"n={cfg.n}  T={cfg.censor_time:g}  theta1={tp.theta1:g}  theta2={tp.theta2:g}  "
            f"p={tp.p:g}  delta={tp.delta:g}  reps={cfg.reps}  seed={cfg.seed}"
        )
        if self.cells:
            header = "estimator".ljust(label_w) + "  row   " + "".join(n.rjust(col_w) for n in PARAM_NAMES)
            header += "used".rjust(8) + "skipped".rjust(9)
            lines += [header, "-" * len(header)]
            for label, cell in self.cells.items():
                if cell["used"]:
                    est = "".join(fmt.format(v).rjust(col_w) for v in cell["mean"])
                    risk = "".join(fmt.format(v).rjust(col_w) for v in cell["risk"])
                else:
                    est = risk = "".join("-".rjust(col_w) for _ in PARAM_NAMES)
                lines.append(label.ljust(label_w) + "  est   " + est + str(cell["used"]).rjust(8) + str(cell["skipped"]).rjust(9))
                lines.append(" " * label_w + "  risk  " + risk)
        if self.predictive:
            lines.append("")
            header = "predictive".ljust(label_w) + "  stat  " + "".join(n.rjust(col_w) for n in ("median", "L", "U"))
            header += "used".rjust(8)
            lines += [header, "-" * len(header)]
            for prior, cell in self.predictive.items():
                for stat in ("mean", "median"):
                    vals = cell[stat]
                    row = "".join(("-" if v is None else fmt.format(v)).rjust(col_w) for v in vals)
                    tail = str(cell["used"]).rjust(8) if stat == "mean" else ""
                    lines.append((prior if stat == "mean" else "").ljust(label_w) + f"  {stat:<6}" + row + tail)
        return "\n".join(lines)


def run_study(config: StudyConfig, n_jobs: int = 1, keep_raw: bool = False) -> StudyReport:
    """Run all replications and aggregate means and estimated risks.

    Replications where an estimator's preconditions fail are tallied as
    skipped for that estimator. Samples with an empty component are skipped
    for every estimator.
    """
    start = time.perf_counter()
    if n_jobs == 1:
        results = [_replicate(config, i) for i in range(config.reps)]
    else:
        from joblib import Parallel, delayed

        results = Parallel(n_jobs=n_jobs)(delayed(_replicate)(config, i) for i in range(config.reps))

    truth = config.true_params.as_array()
    cells = {}
    raw = {}
    for spec in config.estimators:
        ests = [res["estimates"][spec.label] for res in results if spec.label in res["estimates"]]
        used = len(ests)
        cell = {"used": used, "skipped": config.reps - used, "mean": None, "risk": None}
        if used:
            arr = np.vstack(ests)
            cell["mean"] = arr.mean(axis=0).tolist()
            cell["risk"] = [estimated_risk(arr[:, i], truth[i], spec.loss) for i in range(3)]
            raw[spec.label] = arr
        cells[spec.label] = cell

    predictive = {}
    for prior in config.predictive_priors:
        vals = [res["predictive"][prior] for res in results if prior in res["predictive"]]
        cell = {"used": len(vals), "skipped": config.reps - len(vals), "mean": [None] * 3, "median": [None] * 3}
        if vals:
            arr = np.array(vals)
            cell["mean"] = arr.mean(axis=0).tolist()
            cell["median"] = np.median(arr, axis=0).tolist()
            raw[f"predictive/{prior}"] = arr
        predictive[prior] = cell

    report = StudyReport(config, cells, predictive, time.perf_counter() - start)
    if keep_raw:
        report.raw = raw
    return report
