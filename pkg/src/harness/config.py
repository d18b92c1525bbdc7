"""Experiment and runner configuration."""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import psutil
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..oracle.enumeration import DEFAULT_CHUNK_SIZE, DEFAULT_ENUMERATION_BUDGET

ENV_WORKERS = "ANTSEL_WORKERS"
ENV_ENUMERATION_BUDGET = "ANTSEL_ENUMERATION_BUDGET"

DEFAULT_WORKERS = 1


class ConfigError(ValueError):
    """Invalid experiment configuration not caught by field validation."""

    pass


class Mode(str, Enum):
    MIMO = "mimo"
    RELAY = "relay"


class FadingLaw(str, Enum):
    RAYLEIGH = "rayleigh"
    RICIAN = "rician"


_RANGE = re.compile(r"^\s*(\d+)\s*\.\.\s*(\d+)\s*$")


def parse_l_range(text: str) -> list[int]:
    """Parse ``a..b`` (inclusive), a single count, or a comma list.

    Raises:
        ConfigError: On malformed input or an empty/descending range
    """
    match = _RANGE.match(text)
    if match:
        lo, hi = int(match.group(1)), int(match.group(2))
        if lo > hi:
            raise ConfigError(f"L range {text!r} is descending")
        return list(range(lo, hi + 1))
    try:
        values = [int(part) for part in text.split(",")]
    except ValueError:
        raise ConfigError(f"Cannot parse L range {text!r}; expected a..b or a,b,c") from None
    if not values:
        raise ConfigError("L range is empty")
    return values


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    mode: Mode = Field(description="Selection problem: receive antennas or relay antennas")
    num_antennas: int = Field(ge=1, description="Nr for mimo, N for relay")
    num_tx: int | None = Field(default=None, ge=1, description="Nt (mimo only)")
    l_range: tuple[int, ...] = Field(min_length=1, description="Subset sizes L to evaluate")
    power: float = Field(default=1.0, gt=0, description="Average transmit power P, linear scale")
    trials: int = Field(ge=1, description="Monte Carlo trials per run")
    seed: int = Field(default=0, ge=0, lt=2**64, description="Root seed for every substream")
    brute_force: bool = Field(default=False, description="Also compute the optimum by enumeration")
    outage_rate: float | None = Field(
        default=None, ge=0, description="Target rate R in nats for outage estimation"
    )
    output_path: Path | None = Field(default=None, description="CSV destination")
    bits: bool = Field(default=False, description="Report capacities in bits instead of nats")
    fading: FadingLaw = Field(default=FadingLaw.RAYLEIGH, description="Channel law")
    k_factor: float = Field(default=0.0, ge=0, description="Rician K-factor (linear)")

    @model_validator(mode="after")
    def _check_universe(self) -> ExperimentConfig:
        if self.mode is Mode.MIMO and self.num_tx is None:
            raise ValueError("mimo mode needs num_tx")
        if not math.isfinite(self.power):
            raise ValueError("power must be finite")
        if not math.isfinite(self.k_factor):
            raise ValueError("k_factor must be finite")
        for count in self.l_range:
            if not 1 <= count <= self.num_antennas:
                raise ValueError(f"L={count} outside [1, {self.num_antennas}]")
        return self

    @property
    def unit_scale(self) -> float:
        """Factor applied to nats at output time."""
        return 1.0 / math.log(2.0) if self.bits else 1.0

    @property
    def unit(self) -> str:
        return "bits" if self.bits else "nats"


def _env_int(name: str) -> int | None:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return None
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {raw!r}") from None


@dataclass
class RunnerConfig:
    """Execution knobs for the experiment runner and the brute-force oracle.

    ``ANTSEL_WORKERS`` and ``ANTSEL_ENUMERATION_BUDGET`` override fields left
    at their defaults.
    """

    workers: int = DEFAULT_WORKERS  # 0 = one per physical core
    enumeration_budget: int = DEFAULT_ENUMERATION_BUDGET
    chunk_size: int = DEFAULT_CHUNK_SIZE

    def __post_init__(self) -> None:
        if self.workers == DEFAULT_WORKERS:
            env = _env_int(ENV_WORKERS)
            if env is not None:
                self.workers = env
        if self.enumeration_budget == DEFAULT_ENUMERATION_BUDGET:
            env = _env_int(ENV_ENUMERATION_BUDGET)
            if env is not None:
                self.enumeration_budget = env

        if self.workers < 0:
            raise ConfigError(f"workers must be >= 0, got {self.workers}")
        if self.enumeration_budget < 1:
            raise ConfigError(f"enumeration_budget must be >= 1, got {self.enumeration_budget}")
        if self.chunk_size < 1:
            raise ConfigError(f"chunk_size must be >= 1, got {self.chunk_size}")

    @property
    def resolved_workers(self) -> int:
        if self.workers:
            return self.workers
        return psutil.cpu_count(logical=False) or 1
