"""Seeded property suites run by the ``check`` subcommand.

Each suite draws its instances from ``trial_rng(seed, i)`` and returns a
``SuiteResult``; a suite passes only when every instance does. The
transmit-side suite passes when the monotonicity checker *finds* a failure.
"""

from __future__ import annotations

import math
import time
from collections.abc import Callable
from dataclasses import dataclass, field, replace

import numpy as np
import structlog

from ..linalg.hermitian import ComplexArray, logdet_pd
from ..oracle.enumeration import brute_force_select_mimo, brute_force_select_relay
from ..oracle.functions import (
    entropy_function,
    max_function,
    mimo_capacity_function,
    relay_snr_function,
    transmit_capacity_function,
)
from ..oracle.properties import PropertyReport, check_monotone, check_submodular
from ..selection.mimo import greedy_select_mimo, transmit_counterexample
from ..selection.relay import greedy_select_relay, relay_optimal_weights, relay_snr_closed_form
from ..selection.types import AntennaSubset, TransmitConfig
from .channels import RAYLEIGH, sample_channel_mimo, sample_channel_relay, trial_rng
from .config import ConfigError

logger = structlog.get_logger()

GREEDY_BOUND = 1.0 - 1.0 / math.e
POWERS = (0.1, 1.0, 10.0)


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    instances: int
    detail: str
    elapsed: float = 0.0
    failures: tuple[str, ...] = field(default=())

    def summary(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        text = f"{verdict} {self.name} instances={self.instances} {self.detail} ({self.elapsed:.2f}s)"
        for failure in self.failures[:5]:
            text += f"\n    {failure}"
        return text


def determinant_identity(seed: int = 0, instances: int = 500) -> SuiteResult:
    """log det(I + A A^H) = log det(I + A^H A) for random A up to 16 x 16."""
    worst = 0.0
    failures: list[str] = []
    for i in range(instances):
        rng = trial_rng(seed, i)
        n, m = (int(x) for x in rng.integers(1, 17, size=2))
        a = RAYLEIGH.draw(rng, (n, m))
        left = logdet_pd(np.eye(n) + a @ a.conj().T)
        right = logdet_pd(np.eye(m) + a.conj().T @ a)
        gap = abs(left - right)
        worst = max(worst, gap)
        if gap > 1e-9:
            failures.append(f"instance {i}: {n}x{m} gap {gap:.3e}")
    return SuiteResult(
        name="determinant-identity",
        passed=not failures,
        instances=instances,
        detail=f"max_gap={worst:.3e}",
        failures=tuple(failures),
    )


def _random_mimo(seed: int, i: int) -> tuple[ComplexArray, TransmitConfig]:
    rng = trial_rng(seed, i)
    nr = int(rng.integers(2, 13))
    nt = int(rng.integers(1, 7))
    power = POWERS[int(rng.integers(0, len(POWERS)))]
    return sample_channel_mimo(nr, nt, rng), TransmitConfig(power=power, num_tx=nt)


def _collect(name: str, reports: list[PropertyReport]) -> SuiteResult:
    failures = tuple(
        f"instance {i}: {r.summary()}" for i, r in enumerate(reports) if not r.passed
    )
    min_margin = min((r.min_margin for r in reports), default=0.0)
    checks = sum(r.checks for r in reports)
    return SuiteResult(
        name=name,
        passed=not failures,
        instances=len(reports),
        detail=f"checks={checks} min_margin={min_margin:.3e}",
        failures=failures,
    )


def mimo_monotone(seed: int = 0, instances: int = 200, trials: int = 50) -> SuiteResult:
    reports: list[PropertyReport] = []
    for i in range(instances):
        h, cfg = _random_mimo(seed, i)
        reports.append(check_monotone(mimo_capacity_function(h, cfg), trials=trials, rng_seed=i))
    return _collect("mimo-monotone", reports)


def mimo_submodular(seed: int = 0, instances: int = 200, trials: int = 50) -> SuiteResult:
    reports: list[PropertyReport] = []
    for i in range(instances):
        h, cfg = _random_mimo(seed, i)
        reports.append(check_submodular(mimo_capacity_function(h, cfg), trials=trials, rng_seed=i))
    # One fully enumerated Nr = 6 instance on top of the sampled ones
    rng = trial_rng(seed, instances)
    h6 = sample_channel_mimo(6, 3, rng)
    reports.append(check_submodular(mimo_capacity_function(h6, TransmitConfig(1.0, 3))))
    return _collect("mimo-submodular", reports)


def entropy_submodular(seed: int = 0, instances: int = 50, trials: int = 50) -> SuiteResult:
    reports: list[PropertyReport] = []
    for i in range(instances):
        h, cfg = _random_mimo(seed, i)
        reports.append(check_submodular(entropy_function(h, cfg), trials=trials, rng_seed=i))
    return _collect("entropy-submodular", reports)


def relay_modular(seed: int = 0, instances: int = 20, trials: int = 25) -> SuiteResult:
    """Marginal-gain equality on N = 16 plus closed form vs. Rayleigh quotient."""
    reports: list[PropertyReport] = []
    failures: list[str] = []
    for i in range(instances):
        rng = trial_rng(seed, i)
        links = sample_channel_relay(16, rng)
        reports.append(check_submodular(relay_snr_function(links), trials=trials, rng_seed=i))
        for _ in range(trials):
            size = int(rng.integers(1, 17))
            subset = AntennaSubset.of(rng.choice(16, size=size, replace=False), 16)
            weights, achieved = relay_optimal_weights(links, subset)
            closed = relay_snr_closed_form(links, subset)
            if weights.degenerate:
                continue
            if abs(achieved - closed) > 1e-10 * max(closed, 1e-300):
                failures.append(f"instance {i}: subset {subset.indices} {achieved!r} != {closed!r}")
    result = _collect("relay-modular", reports)
    all_failures = result.failures + tuple(failures)
    return replace(result, passed=not all_failures, failures=all_failures)


def greedy_bound(seed: int = 0, instances: int = 100) -> SuiteResult:
    """Greedy / brute-force ratio on Nr = 10, Nt = 4, L = 4."""
    worst = math.inf
    failures: list[str] = []
    for i in range(instances):
        rng = trial_rng(seed, i)
        cfg = TransmitConfig(power=POWERS[i % len(POWERS)], num_tx=4)
        h = sample_channel_mimo(10, 4, rng)
        _, trace = greedy_select_mimo(h, 4, cfg)
        _, optimum = brute_force_select_mimo(h, 4, cfg)
        ratio = trace.final_value / optimum
        worst = min(worst, ratio)
        if ratio < GREEDY_BOUND - 1e-9 or ratio > 1.0 + 1e-9:
            failures.append(f"instance {i}: ratio {ratio:.6f}")
    return SuiteResult(
        name="greedy-bound",
        passed=not failures,
        instances=instances,
        detail=f"min_ratio={worst:.6f} bound={GREEDY_BOUND:.6f}",
        failures=tuple(failures),
    )


def relay_greedy_optimal(seed: int = 0, instances: int = 50, n: int = 12) -> SuiteResult:
    failures: list[str] = []
    for i in range(instances):
        links = sample_channel_relay(n, trial_rng(seed, i))
        for count in range(1, n + 1):
            _, trace = greedy_select_relay(links, count)
            _, optimum = brute_force_select_relay(links, count)
            if abs(trace.final_value - optimum) > 1e-12:
                failures.append(f"instance {i} L={count}: {trace.final_value!r} vs {optimum!r}")
    return SuiteResult(
        name="relay-greedy-optimal",
        passed=not failures,
        instances=instances,
        detail=f"N={n} L=1..{n}",
        failures=tuple(failures),
    )


def transmit_nonmonotone(seed: int = 0) -> SuiteResult:
    """The transmit-side objective must yield a monotonicity failure witness."""
    report = transmit_counterexample()
    case = report.primary
    h = np.asarray([case.channel], dtype=np.complex128)
    check = check_monotone(transmit_capacity_function(h, case.power), rng_seed=seed)
    found = not check.passed and check.witness is not None
    detail = f"C1={case.single:.4f} C2={case.both:.4f} witness={'found' if found else 'missing'}"
    return SuiteResult(
        name="transmit-nonmonotone",
        passed=found and case.single > case.both,
        instances=1,
        detail=detail,
        failures=() if found else (check.summary(),),
    )


def checker_discrimination(seed: int = 0) -> SuiteResult:
    """A max-function must pass the inequality and fail the modular equality."""
    rng = trial_rng(seed, 0)
    report = check_submodular(max_function(rng.uniform(0.5, 2.0, size=6)))
    ok = report.inequality_holds and not report.passed
    return SuiteResult(
        name="checker-discrimination",
        passed=ok,
        instances=1,
        detail=f"inequality={'holds' if report.inequality_holds else 'violated'} "
        f"max_equality_gap={report.max_equality_gap or 0.0:.3e}",
        failures=() if ok else (report.summary(),),
    )


SUITES: dict[str, Callable[[int], SuiteResult]] = {
    "determinant-identity": determinant_identity,
    "mimo-monotone": mimo_monotone,
    "mimo-submodular": mimo_submodular,
    "entropy-submodular": entropy_submodular,
    "relay-modular": relay_modular,
    "greedy-bound": greedy_bound,
    "relay-greedy-optimal": relay_greedy_optimal,
    "transmit-nonmonotone": transmit_nonmonotone,
    "checker-discrimination": checker_discrimination,
}


def run_suites(names: list[str] | None = None, seed: int = 0) -> list[SuiteResult]:
    """Run the named suites (all by default) in registration order.

    Raises:
        ConfigError: On a seed outside [0, 2**64) or an unknown suite name
    """
    if not 0 <= seed < 2**64:
        raise ConfigError(f"seed must be in [0, 2**64), got {seed}")
    selected = list(SUITES) if not names else names
    unknown = [name for name in selected if name not in SUITES]
    if unknown:
        raise ConfigError(f"Unknown suite(s): {', '.join(unknown)}")
    results: list[SuiteResult] = []
    for name in selected:
        start = time.perf_counter()
        result = SUITES[name](seed)
        elapsed = time.perf_counter() - start
        result = replace(result, elapsed=elapsed)
        logger.info("Suite finished", suite=name, passed=result.passed, elapsed=elapsed)
        results.append(result)
    return results
