"""Monte Carlo runner for greedy-vs-optimal experiments and outage estimates.

Trials are scheduled on a thread pool from asyncio and gathered; outcomes are
re-ordered by trial index before aggregation, so the CSV is identical for any
worker count.
"""

from __future__ import annotations

import asyncio
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, TextIO

import numpy as np
import structlog

from ..linalg.hermitian import RealArray
from ..oracle.enumeration import brute_force_select_mimo, brute_force_select_relay
from ..selection.mimo import greedy_select_mimo, mimo_capacity
from ..selection.relay import relay_capacity, relay_gain_table
from ..selection.types import AntennaSubset, TransmitConfig
from .channels import ChannelSampler, sample_channel_mimo, sample_channel_relay, sampler_for, trial_rng
from .config import ConfigError, ExperimentConfig, Mode, RunnerConfig
from .results import OUTAGE_HEADER, RESULT_HEADER, OutageRow, ResultRow, render_csv, write_text_atomic

logger = structlog.get_logger()


@dataclass
class TrialOutcome:
    """Per-L capacities (nats) of one trial; optimal is NaN where not enumerated."""

    trial: int
    greedy: RealArray
    optimal: RealArray


@dataclass
class RunnerMetrics:
    trials_run: int = 0
    brute_force_evaluations: int = 0
    skipped_l: list[int] = field(default_factory=list)
    elapsed: float = 0.0


def _mean_stderr(samples: RealArray) -> tuple[float, float]:
    n = samples.shape[0]
    mean = float(np.mean(samples))
    if n < 2:
        return mean, 0.0
    return mean, float(np.std(samples, ddof=1) / math.sqrt(n))


class ExperimentRunner:
    """Runs the trials of one ``ExperimentConfig``."""

    def __init__(
        self,
        cfg: ExperimentConfig,
        runner: RunnerConfig | None = None,
        *,
        sampler: ChannelSampler | None = None,
    ) -> None:
        self._cfg = cfg
        self._runner = runner or RunnerConfig()
        self._sampler = sampler or sampler_for(cfg)
        self._metrics = RunnerMetrics()
        self._l_values = list(cfg.l_range)
        self._max_l = max(self._l_values)
        self._enumerated = self._plan_brute_force() if cfg.brute_force else []
        self._tx = (
            TransmitConfig(power=cfg.power, num_tx=cfg.num_tx) if cfg.num_tx is not None else None
        )

    @property
    def config(self) -> ExperimentConfig:
        return self._cfg

    @property
    def skipped_l(self) -> list[int]:
        """L values for which brute force was requested but exceeds the budget."""
        return list(self._metrics.skipped_l)

    def _plan_brute_force(self) -> list[bool]:
        budget = self._runner.enumeration_budget
        plan: list[bool] = []
        for count in self._l_values:
            required = math.comb(self._cfg.num_antennas, count)
            allowed = required <= budget
            plan.append(allowed)
            if not allowed:
                self._metrics.skipped_l.append(count)
                logger.warning(
                    "Brute force disabled for L",
                    L=count,
                    required=required,
                    budget=budget,
                )
        return plan

    def budget_comments(self) -> list[str]:
        n = self._cfg.num_antennas
        return [
            f"brute force disabled for L={count}: C({n},{count})={math.comb(n, count)} "
            f"exceeds budget {self._runner.enumeration_budget}"
            for count in self._metrics.skipped_l
        ]

    # Per-trial work (runs on executor threads)

    def _greedy_values(self, trial: int) -> tuple[RealArray, Any]:
        rng = trial_rng(self._cfg.seed, trial)
        values = np.empty(len(self._l_values))
        if self._cfg.mode is Mode.MIMO:
            assert self._tx is not None
            h = sample_channel_mimo(self._cfg.num_antennas, self._tx.num_tx, rng, self._sampler)
            # Greedy for L is the first L picks of greedy for max(L)
            _, trace = greedy_select_mimo(h, self._max_l, self._tx)
            for j, count in enumerate(self._l_values):
                prefix = AntennaSubset.of(trace.order[:count], self._cfg.num_antennas)
                values[j] = mimo_capacity(h, prefix, self._tx)
            return values, h

        links = sample_channel_relay(self._cfg.num_antennas, rng, self._sampler)
        table = relay_gain_table(links)
        ranking = table.ranking()
        for j, count in enumerate(self._l_values):
            values[j] = relay_capacity(table.total(ranking[:count]))
        return values, links

    def _trial(self, trial: int) -> TrialOutcome:
        greedy, instance = self._greedy_values(trial)
        optimal = np.full(len(self._l_values), np.nan)
        for j, count in enumerate(self._l_values):
            if not (self._enumerated and self._enumerated[j]):
                continue
            optimal[j] = self._optimal_value(instance, count)
        return TrialOutcome(trial=trial, greedy=greedy, optimal=optimal)

    def _optimal_value(self, instance: Any, count: int) -> float:
        budget = self._runner.enumeration_budget
        if self._cfg.mode is Mode.MIMO:
            assert self._tx is not None
            _, value = brute_force_select_mimo(
                instance, count, self._tx, budget=budget, chunk_size=self._runner.chunk_size
            )
            return value
        _, snr = brute_force_select_relay(
            instance, count, budget=budget, chunk_size=self._runner.chunk_size
        )
        return relay_capacity(snr)

    async def _gather(self) -> list[TrialOutcome]:
        loop = asyncio.get_running_loop()
        workers = self._runner.resolved_workers
        with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="antsel-trial") as pool:
            futures = [
                loop.run_in_executor(pool, self._trial, t) for t in range(self._cfg.trials)
            ]
            outcomes = await asyncio.gather(*futures)
        ordered = sorted(outcomes, key=lambda o: o.trial)
        self._metrics.trials_run += len(ordered)
        per_trial = sum(self._enumerated) if self._enumerated else 0
        self._metrics.brute_force_evaluations += per_trial * len(ordered)
        return ordered

    async def run(self) -> list[ResultRow]:
        """Aggregate one ``ResultRow`` per L, in the configured output unit."""
        logger.info(
            "Starting experiment",
            mode=self._cfg.mode.value,
            universe=self._cfg.num_antennas,
            trials=self._cfg.trials,
            workers=self._runner.resolved_workers,
        )
        start = time.perf_counter()
        outcomes = await self._gather()
        greedy = np.stack([o.greedy for o in outcomes])
        optimal = np.stack([o.optimal for o in outcomes])

        rows: list[ResultRow] = []
        for j, count in enumerate(self._l_values):
            mean_g, se_g = _mean_stderr(greedy[:, j])
            mean_o: float | None = None
            se_o: float | None = None
            ratio: float | None = None
            if self._enumerated and self._enumerated[j]:
                mean_o, se_o = _mean_stderr(optimal[:, j])
                if mean_o > 0.0:
                    ratio = mean_g / mean_o
                elif mean_g == 0.0:
                    ratio = 1.0
            row = ResultRow(
                mode=self._cfg.mode,
                L=count,
                trials=self._cfg.trials,
                mean_greedy=mean_g,
                stderr_greedy=se_g,
                mean_optimal=mean_o,
                stderr_optimal=se_o,
                ratio=ratio,
                seed=self._cfg.seed,
            )
            rows.append(row.scaled(self._cfg.unit_scale))

        self._metrics.elapsed += time.perf_counter() - start
        logger.info("Experiment finished", rows=len(rows), elapsed=self._metrics.elapsed)
        return rows

    async def run_outage(self, rate: float) -> list[OutageRow]:
        """P(C <= rate) of the greedy subset per L; ``rate`` in nats."""
        if not (math.isfinite(rate) and rate >= 0.0):
            raise ConfigError(f"Outage rate must be finite and >= 0, got {rate}")
        # Outage never needs the optimum
        enumerated, self._enumerated = self._enumerated, []
        try:
            start = time.perf_counter()
            outcomes = await self._gather()
        finally:
            self._enumerated = enumerated
        greedy = np.stack([o.greedy for o in outcomes])

        rows: list[OutageRow] = []
        n = greedy.shape[0]
        for j, count in enumerate(self._l_values):
            p = float(np.count_nonzero(greedy[:, j] <= rate)) / n
            rows.append(
                OutageRow(
                    mode=self._cfg.mode,
                    L=count,
                    trials=n,
                    rate=rate * self._cfg.unit_scale,
                    outage=p,
                    stderr=math.sqrt(p * (1.0 - p) / n),
                    seed=self._cfg.seed,
                )
            )
        self._metrics.elapsed += time.perf_counter() - start
        logger.info("Outage estimate finished", rate=rate, trials=n)
        return rows

    def get_info(self) -> dict[str, Any]:
        return {
            "config": {
                "mode": self._cfg.mode.value,
                "universe": self._cfg.num_antennas,
                "l_range": list(self._l_values),
                "trials": self._cfg.trials,
                "seed": self._cfg.seed,
                "workers": self._runner.resolved_workers,
                "enumeration_budget": self._runner.enumeration_budget,
            },
            "metrics": {
                "trials_run": self._metrics.trials_run,
                "brute_force_evaluations": self._metrics.brute_force_evaluations,
                "skipped_l": list(self._metrics.skipped_l),
                "elapsed": self._metrics.elapsed,
            },
        }


async def run_experiment(
    cfg: ExperimentConfig,
    runner: RunnerConfig | None = None,
    *,
    sampler: ChannelSampler | None = None,
    stream: TextIO | None = None,
) -> list[ResultRow]:
    """Run ``cfg``; the CSV goes to ``cfg.output_path`` when set, else to ``stream`` if given."""
    experiment = ExperimentRunner(cfg, runner, sampler=sampler)
    rows = await experiment.run()
    text = render_csv(RESULT_HEADER, rows, comments=experiment.budget_comments())
    if cfg.output_path is not None:
        await write_text_atomic(cfg.output_path, text)
    elif stream is not None:
        stream.write(text)
    return rows


async def estimate_outage(
    cfg: ExperimentConfig,
    rate: float | None = None,
    runner: RunnerConfig | None = None,
    *,
    sampler: ChannelSampler | None = None,
    stream: TextIO | None = None,
) -> list[OutageRow]:
    """Outage probability P(C <= R) per L; R in nats, defaulting to ``cfg.outage_rate``.

    Raises:
        ConfigError: If no rate is given or it is negative
    """
    target = cfg.outage_rate if rate is None else rate
    if target is None:
        raise ConfigError("Outage estimation needs a rate R")
    experiment = ExperimentRunner(cfg, runner, sampler=sampler)
    rows = await experiment.run_outage(target)
    text = render_csv(OUTAGE_HEADER, rows)
    if cfg.output_path is not None:
        await write_text_atomic(cfg.output_path, text)
    elif stream is not None:
        stream.write(text)
    return rows
