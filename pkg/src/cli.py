"""Command-line entry point: ``antsel`` / ``python -m src``.

Exit codes: 0 success, 2 configuration error, 3 property-check failure.
Results go to stdout (or ``--out``); logs go to stderr.
"""

from __future__ import annotations

import argparse
import asyncio
import logging
import math
import sys
from collections.abc import Sequence
from pathlib import Path

import structlog
from pydantic import ValidationError

from .harness.config import ConfigError, ExperimentConfig, FadingLaw, Mode, RunnerConfig, parse_l_range
from .harness.experiment import estimate_outage, run_experiment
from .harness.suites import SUITES, run_suites
from .oracle.enumeration import EnumerationBudgetExceeded
from .selection.mimo import transmit_counterexample
from .selection.types import SubsetError

logger = structlog.get_logger()

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CHECK_FAILED = 3

_LEVELS = (logging.WARNING, logging.INFO, logging.DEBUG)


def _stderr_logger(*_args: object) -> structlog.PrintLogger:
    # sys.stderr is looked up per logger, not at configure time
    return structlog.PrintLogger(file=sys.stderr)


def configure_logging(verbosity: int) -> None:
    level = _LEVELS[min(max(verbosity, 0), len(_LEVELS) - 1)]
    structlog.configure(
        processors=[
            structlog.processors.add_log_level,
            structlog.dev.ConsoleRenderer(),
        ],
        wrapper_class=structlog.make_filtering_bound_logger(level),
        context_class=dict,
        logger_factory=_stderr_logger,
        cache_logger_on_first_use=False,
    )


def _add_run_options(parser: argparse.ArgumentParser, *, mimo: bool, brute_force: bool = True) -> None:
    parser.add_argument("--l", dest="l_range", default=None, help="Subset sizes: a..b, a,b,c or a")
    if mimo:
        parser.add_argument("--nt", type=int, default=None, help="Transmit antennas Nt")
        parser.add_argument("--power", type=float, default=1.0, help="Average transmit power P")
    parser.add_argument("--trials", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    if brute_force:
        parser.add_argument("--brute-force", action="store_true", help="Also enumerate the optimum")
        parser.add_argument("--budget", type=int, default=None, help="Max subsets per enumeration")
    parser.add_argument("--bits", action="store_true", help="Report bits instead of nats")
    parser.add_argument("--out", type=Path, default=None, help="CSV output path (stdout if omitted)")
    parser.add_argument("--workers", type=int, default=None, help="Trial threads; 0 = physical cores")
    parser.add_argument(
        "--fading", choices=[law.value for law in FadingLaw], default=FadingLaw.RAYLEIGH.value
    )
    parser.add_argument("--k-factor", type=float, default=0.0, help="Rician K-factor")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="antsel",
        description="Greedy receive/relay antenna selection experiments and property checks",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v info, -vv debug")
    sub = parser.add_subparsers(dest="command", required=True)

    mimo = sub.add_parser("mimo", help="Greedy vs. optimal receive-antenna selection")
    mimo.add_argument("--nr", "--n", dest="num_antennas", type=int, required=True)
    _add_run_options(mimo, mimo=True)

    relay = sub.add_parser("relay", help="Greedy vs. optimal relay-antenna selection")
    relay.add_argument("--n", "--nr", dest="num_antennas", type=int, required=True)
    _add_run_options(relay, mimo=False)

    outage = sub.add_parser("outage", help="Outage probability of the greedy subset")
    outage.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.MIMO.value)
    outage.add_argument("--nr", "--n", dest="num_antennas", type=int, required=True)
    outage.add_argument("--rate", type=float, required=True, help="Target rate R (output unit)")
    _add_run_options(outage, mimo=True, brute_force=False)

    counter = sub.add_parser("counterexample", help="Transmit-side selection is not monotone")
    counter.add_argument("--bits", action="store_true")

    check = sub.add_parser("check", help="Run property suites")
    check.add_argument("--suite", action="append", choices=sorted(SUITES), default=None)
    check.add_argument("--seed", type=int, default=0)
    return parser


def _experiment_config(args: argparse.Namespace, mode: Mode) -> ExperimentConfig:
    l_text = args.l_range if args.l_range is not None else f"1..{args.num_antennas}"
    return ExperimentConfig(
        mode=mode,
        num_antennas=args.num_antennas,
        num_tx=getattr(args, "nt", None) if mode is Mode.MIMO else None,
        l_range=tuple(parse_l_range(l_text)),
        power=getattr(args, "power", 1.0),
        trials=args.trials,
        seed=args.seed,
        brute_force=getattr(args, "brute_force", False),
        output_path=args.out,
        bits=args.bits,
        fading=FadingLaw(args.fading),
        k_factor=args.k_factor,
    )


def _runner_config(args: argparse.Namespace) -> RunnerConfig:
    kwargs: dict[str, int] = {}
    if args.workers is not None:
        kwargs["workers"] = args.workers
    budget = getattr(args, "budget", None)
    if budget is not None:
        kwargs["enumeration_budget"] = budget
    return RunnerConfig(**kwargs)


def _cmd_experiment(args: argparse.Namespace) -> int:
    cfg = _experiment_config(args, Mode(args.command))
    asyncio.run(run_experiment(cfg, _runner_config(args), stream=sys.stdout))
    return EXIT_OK


def _cmd_outage(args: argparse.Namespace) -> int:
    mode = Mode(args.mode)
    cfg = _experiment_config(args, mode)
    # --rate is given in the output unit
    rate = args.rate / cfg.unit_scale
    asyncio.run(
        estimate_outage(
            cfg.model_copy(update={"outage_rate": rate}),
            runner=_runner_config(args),
            stream=sys.stdout,
        )
    )
    return EXIT_OK


def _cmd_counterexample(args: argparse.Namespace) -> int:
    scale = 1.0 / math.log(2.0) if args.bits else 1.0
    unit = "bits" if args.bits else "nats"
    report = transmit_counterexample()
    for case in report.cases:
        h1, h2 = case.channel
        sys.stdout.write(
            f"{case.label}: h=({h1:g}, {h2:g}) P={case.power:g} "
            f"C1={case.single * scale:.4f} {case.relation} C2={case.both * scale:.4f} {unit}\n"
        )
    witnessed = "yes" if report.both_directions_witnessed else "no"
    sys.stdout.write(f"both directions witnessed: {witnessed}\n")
    return EXIT_OK


def _cmd_check(args: argparse.Namespace) -> int:
    results = run_suites(args.suite, seed=args.seed)
    for result in results:
        sys.stdout.write(result.summary() + "\n")
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK_FAILED


_COMMANDS = {
    "mimo": _cmd_experiment,
    "relay": _cmd_experiment,
    "outage": _cmd_outage,
    "counterexample": _cmd_counterexample,
    "check": _cmd_check,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, ValidationError, SubsetError, EnumerationBudgetExceeded) as e:
        logger.error("Invalid configuration", command=args.command, error=str(e))
        return EXIT_CONFIG
