"""Result rows and atomic CSV output."""

from __future__ import annotations

import csv
import io
import os
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Protocol

import aiofiles
import aiofiles.os
import structlog
from pydantic import BaseModel, ConfigDict, Field

from .config import Mode

logger = structlog.get_logger()

RESULT_HEADER = (
    "mode",
    "L",
    "trials",
    "mean_greedy",
    "stderr_greedy",
    "mean_optimal",
    "stderr_optimal",
    "ratio",
    "seed",
)

OUTAGE_HEADER = ("mode", "L", "trials", "rate", "outage", "stderr", "seed")


def _cell(value: float | None) -> str:
    return "" if value is None else repr(float(value))


class ResultRow(BaseModel):
    """Aggregated greedy (and optionally optimal) capacity for one L."""

    model_config = ConfigDict(frozen=True)

    mode: Mode = Field(description="Selection problem")
    L: int = Field(ge=1, description="Subset size")
    trials: int = Field(ge=1, description="Trials aggregated")
    mean_greedy: float = Field(description="Mean greedy capacity")
    stderr_greedy: float = Field(ge=0, description="Standard error of mean_greedy")
    mean_optimal: float | None = Field(default=None, description="Mean brute-force capacity")
    stderr_optimal: float | None = Field(default=None, description="Standard error of mean_optimal")
    ratio: float | None = Field(default=None, description="mean_greedy / mean_optimal")
    seed: int = Field(description="Root seed of the run")

    def scaled(self, factor: float) -> ResultRow:
        """Convert capacities by ``factor`` (e.g. nats to bits); the ratio is unit-free."""
        if factor == 1.0:
            return self

        def mul(x: float | None) -> float | None:
            return None if x is None else x * factor

        return self.model_copy(
            update={
                "mean_greedy": self.mean_greedy * factor,
                "stderr_greedy": self.stderr_greedy * factor,
                "mean_optimal": mul(self.mean_optimal),
                "stderr_optimal": mul(self.stderr_optimal),
            }
        )

    def cells(self) -> list[str]:
        return [
            self.mode.value,
            str(self.L),
            str(self.trials),
            _cell(self.mean_greedy),
            _cell(self.stderr_greedy),
            _cell(self.mean_optimal),
            _cell(self.stderr_optimal),
            _cell(self.ratio),
            str(self.seed),
        ]


class OutageRow(BaseModel):
    """Empirical P(C <= R) of the greedy subset for one L."""

    model_config = ConfigDict(frozen=True)

    mode: Mode = Field(description="Selection problem")
    L: int = Field(ge=1, description="Subset size")
    trials: int = Field(ge=1, description="Trials aggregated")
    rate: float = Field(ge=0, description="Target rate R in the output unit")
    outage: float = Field(ge=0, le=1, description="Fraction of trials with capacity <= R")
    stderr: float = Field(ge=0, description="Binomial standard error")
    seed: int = Field(description="Root seed of the run")

    def cells(self) -> list[str]:
        return [
            self.mode.value,
            str(self.L),
            str(self.trials),
            _cell(self.rate),
            _cell(self.outage),
            _cell(self.stderr),
            str(self.seed),
        ]


class CsvRow(Protocol):
    def cells(self) -> list[str]: ...


def render_csv(
    header: Sequence[str], rows: Iterable[CsvRow], comments: Iterable[str] = ()
) -> str:
    """CSV text with ``# ...`` comment lines ahead of the header."""
    buffer = io.StringIO()
    for comment in comments:
        buffer.write(f"# {comment}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row.cells())
    return buffer.getvalue()


async def write_text_atomic(path: Path, text: str) -> None:
    """Write to a sibling temp file, then rename over ``path``."""
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(f".{path.name}.{os.getpid()}.tmp")
    try:
        async with aiofiles.open(tmp, "w", encoding="utf-8", newline="") as fh:
            await fh.write(text)
            await fh.flush()
        await aiofiles.os.replace(tmp, path)
    except BaseException:
        if await aiofiles.os.path.exists(tmp):
            await aiofiles.os.remove(tmp)
        raise
    logger.info("Wrote results", path=str(path), bytes=len(text.encode("utf-8")))
