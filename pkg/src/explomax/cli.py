"""Command-line interface: ``explomax {fit,predict,simulate,sample}``.

Exit codes: 0 on success, 2 for unusable input or configuration, 3 when an
estimator's preconditions fail on otherwise valid input.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .bayes import bayes_estimate, build_expansion, posterior_variance
from .datafile import format_datafile, read_datafile
from .distributions import Params
from .exceptions import DomainError, SingularInformation
from .importance import is_draws, is_estimate, is_standard_error
from .likelihood import ml_fit, ml_variances
from .losses import LossSpec
from .predictive import predictive_interval
from .simulation import COMPOSITIONS, StudyConfig, generate_censored_sample, standard_estimators, run_study
from .validation import check_alpha, check_loss

__all__ = ["main", "build_parser"]

PARAM_NAMES = ("theta1", "theta2", "p")
EXIT_OK, EXIT_INPUT, EXIT_ESTIMATOR = 0, 2, 3


class UsageError(Exception):
    """Bad flags or data; maps to exit status 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from None
    if not np.isfinite(value) or value <= 0:
        raise argparse.ArgumentTypeError(f"must be a positive finite number, got {text}")
    return value


def _count(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def _seed(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return value


def _choices(allowed):
    def parse(text):
        items = [s.strip().lower() for s in text.split(",") if s.strip()]
        bad = [s for s in items if s not in allowed]
        if not items or bad:
            raise argparse.ArgumentTypeError(f"expected a comma list from {allowed}, got {text!r}")
        return list(dict.fromkeys(items))

    return parse


def _add_data_args(p):
    p.add_argument("--input", required=True, help="CSV file with header 'time,component'")
    p.add_argument("--n", type=_count, required=True, help="units on test, survivors included")
    p.add_argument("--censor-time", type=_positive, required=True, help="censoring time T")
    p.add_argument("--delta", type=_positive, required=True, help="known Lomax scale")
    p.add_argument("--format", choices=("json", "table"), default="json")


def _add_estimator_args(p, methods=True):
    if methods:
        p.add_argument("--method", choices=("ml", "bayes", "is"), default="bayes")
    p.add_argument("--prior", choices=("uniform", "jeffreys"), default="uniform")
    p.add_argument("--loss", choices=("self", "gelf"), default="self")
    p.add_argument("--c", type=float, default=None, help="GELF shape (nonzero)")
    p.add_argument("--is-samples", type=_count, default=1000, help="importance sampling draws")
    p.add_argument("--seed", type=_seed, default=None, help="required for randomized methods")


def _add_truth_args(p):
    p.add_argument("--theta1", type=_positive, required=True)
    p.add_argument("--theta2", type=_positive, required=True)
    p.add_argument("--p", type=float, required=True, help="mixing proportion in (0, 1)")
    p.add_argument("--delta", type=_positive, default=1.0)
    p.add_argument("--n", type=_count, required=True)
    p.add_argument("--censor-time", type=_positive, required=True)
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--composition", choices=COMPOSITIONS, default="bernoulli")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="explomax", description="Exponential-Lomax mixture fitting for type-I censored data.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    fit = sub.add_parser("fit", help="point estimates with uncertainty")
    _add_data_args(fit)
    _add_estimator_args(fit)
    fit.add_argument(
        "--truth", type=_positive, nargs=3, metavar=("THETA1", "THETA2", "P"),
        help="reference values for reporting the loss of each estimate",
    )

    pred = sub.add_parser("predict", help="predictive median and interval")
    _add_data_args(pred)
    pred.add_argument("--prior", choices=("uniform", "jeffreys"), default="uniform")
    pred.add_argument("--alpha", type=float, default=0.01)

    sim = sub.add_parser("simulate", help="Monte-Carlo study of estimator risk")
    _add_truth_args(sim)
    sim.add_argument("--reps", type=_count, required=True)
    sim.add_argument("--methods", type=_choices(("ml", "bayes", "is")), default=["ml", "is", "bayes"])
    sim.add_argument("--prior", type=_choices(("uniform", "jeffreys")), default=["uniform"])
    sim.add_argument("--loss", choices=("self", "gelf"), default="self")
    sim.add_argument("--c", type=float, default=None)
    sim.add_argument("--is-samples", type=_count, default=1000)
    sim.add_argument("--predictive", type=_choices(("uniform", "jeffreys")), default=[],
                     help="priors for predictive summaries")
    sim.add_argument("--alpha", type=float, default=0.01)
    sim.add_argument("--n-jobs", type=int, default=1)
    sim.add_argument("--timing", action="store_true", help="include wall time (breaks byte-identity)")
    sim.add_argument("--format", choices=("json", "table"), default="json")

    samp = sub.add_parser("sample", help="simulate a censored data file")
    _add_truth_args(samp)
    samp.add_argument("--output", default="-", help="destination CSV, '-' for stdout")
    return parser


def _loss_for(args) -> LossSpec:
    # validated here, so a bad c surfaces as an estimator error
    return check_loss(args.loss, args.c)


def _fit_report(args, sample):
    delta = args.delta
    loss = _loss_for(args)
    config = {
        "method": args.method, "n": sample.n, "censor_time": sample.censor_time, "delta": delta,
        "r1": sample.r1, "r2": sample.r2, "loss": loss.label,
        "prior": None if args.method == "ml" else args.prior,
    }
    diagnostics = {}
    if args.method == "ml":
        params, report = ml_fit(sample, delta)
        est = params.as_array()
        try:
            var = ml_variances(params, sample).tolist()
        except SingularInformation:
            var = None
        uncertainty = {"kind": "ml_variance", "values": var}
        diagnostics.update(
            converged=report.converged, iterations=report.iterations, gradient_norm=report.gradient_norm,
            log_likelihood=report.log_likelihood,
        )
    elif args.method == "bayes":
        exp = build_expansion(sample, delta, args.prior)
        est = bayes_estimate(exp, loss)
        uncertainty = {"kind": "posterior_variance", "values": posterior_variance(exp).tolist()}
        diagnostics["terms"] = int(exp.k.size)
    else:
        config["is_samples"] = args.is_samples
        config["seed"] = args.seed
        draws = is_draws(sample, delta, args.prior, args.is_samples, args.seed)
        est = is_estimate(draws, loss)
        uncertainty = {"kind": "monte_carlo_se", "values": is_standard_error(draws, loss).tolist()}
        diagnostics["ess"] = draws.ess
    risks = None
    if args.truth is not None:
        truth = Params(*args.truth, delta).as_array()
        risks = dict(zip(PARAM_NAMES, (float(v) for v in loss(truth, np.asarray(est)))))
    return {
        "config": config,
        "estimates": dict(zip(PARAM_NAMES, (float(v) for v in est))),
        "uncertainty": uncertainty,
        "risks": risks,
        "diagnostics": diagnostics,
    }


def _fmt(v):
    if v is None:
        return "-"
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _fit_table(rep):
    lines = ["  ".join(f"{k}={_fmt(v)}" for k, v in rep["config"].items())]
    w = 20
    header = "row".ljust(w) + "".join(n.rjust(14) for n in PARAM_NAMES)
    lines += [header, "-" * len(header)]
    lines.append("estimate".ljust(w) + "".join(f"{rep['estimates'][n]:.6g}".rjust(14) for n in PARAM_NAMES))
    unc = rep["uncertainty"]
    vals = unc["values"] or [None] * 3
    lines.append(unc["kind"].ljust(w) + "".join(_fmt(v).rjust(14) for v in vals))
    if rep["risks"] is not None:
        lines.append("loss".ljust(w) + "".join(f"{rep['risks'][n]:.6g}".rjust(14) for n in PARAM_NAMES))
    if rep["diagnostics"]:
        lines.append("  ".join(f"{k}={_fmt(v)}" for k, v in rep["diagnostics"].items()))
    return "\n".join(lines)


def _emit(obj, fmt, table):
    if fmt == "json":
        print(json.dumps(obj, indent=2))
    else:
        print(table(obj))


def _cmd_fit(args):
    if args.method == "is" and args.seed is None:
        raise UsageError("--method is requires --seed")
    if args.c is not None and args.loss == "self":
        raise UsageError("--c applies only to --loss gelf")
    sample = read_datafile(args.input, args.n, args.censor_time)
    return lambda: _emit(_fit_report(args, sample), args.format, _fit_table)


def _cmd_predict(args):
    alpha = check_alpha(args.alpha)
    sample = read_datafile(args.input, args.n, args.censor_time)

    def run():
        summary = predictive_interval(build_expansion(sample, args.delta, args.prior), alpha)
        out = {
            "config": {"n": sample.n, "censor_time": sample.censor_time, "delta": args.delta,
                       "r1": sample.r1, "r2": sample.r2, "prior": args.prior, "alpha": alpha},
            "median": summary.median,
            "lower": summary.lower,
            "upper": summary.upper,
        }
        _emit(out, args.format, lambda o: "median={median:.8g}  L={lower:.8g}  U={upper:.8g}".format(**o))

    return run


def _cmd_simulate(args):
    truth = Params(args.theta1, args.theta2, args.p, args.delta)
    if args.c is not None and args.loss == "self":
        raise UsageError("--c applies only to --loss gelf")
    try:
        loss = _loss_for(args)
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    config = StudyConfig(
        true_params=truth, n=args.n, censor_time=args.censor_time, reps=args.reps, seed=args.seed,
        estimators=standard_estimators(args.prior, (loss,), args.methods), is_M=args.is_samples,
        alpha=check_alpha(args.alpha), predictive_priors=tuple(args.predictive), composition=args.composition,
    )
    if args.n_jobs == 0:
        raise UsageError("--n-jobs must be nonzero")

    def run():
        report = run_study(config, n_jobs=args.n_jobs)
        print(report.to_json(include_timing=args.timing) if args.format == "json" else report.to_table())

    return run


def _cmd_sample(args):
    truth = Params(args.theta1, args.theta2, args.p, args.delta)

    def run():
        sample = generate_censored_sample(truth, args.n, args.censor_time, args.seed, args.composition)
        text = format_datafile(sample)
        if args.output == "-":
            sys.stdout.write(text)
        else:
            with open(args.output, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        print(f"# n={sample.n} r1={sample.r1} r2={sample.r2} censored={sample.n_censored}", file=sys.stderr)

    return run


_COMMANDS = {"fit": _cmd_fit, "predict": _cmd_predict, "simulate": _cmd_simulate, "sample": _cmd_sample}


def main(argv=None) -> int:
    """Entry point; returns the process exit status."""
    parser = build_parser()
    # configuration stage: any failure here is an input error
    try:
        args = parser.parse_args(argv)
        run = _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"explomax: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (DomainError, OSError) as exc:
        print(f"explomax: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    # estimation stage: failures are estimator domain errors
    try:
        run()
    except (ValueError, ArithmeticError) as exc:
        print(f"explomax: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ESTIMATOR
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
