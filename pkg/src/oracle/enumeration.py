"""Brute-force subset enumeration used as the optimality oracle.

Subsets are visited in lexicographic order, in contiguous chunks that are
evaluated as numpy batches (optionally on a thread pool). The reduction keeps
the first strict maximum, so ties resolve to the lexicographically smallest
subset no matter how chunks are scheduled.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Callable, Iterator
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
import structlog

from ..linalg.hermitian import as_complex_matrix
from ..selection.mimo import check_transmit_width, mimo_capacity
from ..selection.relay import relay_gain_table
from ..selection.types import AntennaSubset, RelayLinkSet, SubsetError, TransmitConfig

logger = structlog.get_logger()

DEFAULT_ENUMERATION_BUDGET = 2_000_000
DEFAULT_CHUNK_SIZE = 4096

IndexArray = npt.NDArray[np.intp]
ChunkEvaluator = Callable[[IndexArray], npt.NDArray[np.float64]]


class EnumerationBudgetExceeded(RuntimeError):
    """C(n, k) exceeds the enumeration budget; the oracle refuses to approximate."""

    def __init__(self, required: int, budget: int) -> None:
        self.required = required
        self.budget = budget
        super().__init__(f"Enumeration needs {required} subsets, budget is {budget}")


@dataclass(frozen=True)
class SubsetEnumeration:
    """All k-subsets of range(n) in lexicographic order."""

    universe_size: int
    cardinality: int

    def __post_init__(self) -> None:
        if not 0 <= self.cardinality <= self.universe_size:
            raise SubsetError(
                f"Cardinality {self.cardinality} outside [0, {self.universe_size}]"
            )

    def __len__(self) -> int:
        return math.comb(self.universe_size, self.cardinality)

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return itertools.combinations(range(self.universe_size), self.cardinality)

    def range(self, start: int, stop: int) -> Iterator[tuple[int, ...]]:
        """Subsets with lexicographic rank in [start, stop)."""
        return itertools.islice(iter(self), start, stop)

    def ranges(self, parts: int) -> list[tuple[int, int]]:
        """Split the rank space into ``parts`` contiguous ranges."""
        total = len(self)
        parts = max(1, min(parts, total))
        bounds = [total * p // parts for p in range(parts + 1)]
        return [(bounds[p], bounds[p + 1]) for p in range(parts)]

    def chunks(self, size: int = DEFAULT_CHUNK_SIZE) -> Iterator[IndexArray]:
        """Consecutive batches as (m, k) index arrays."""
        it = iter(self)
        while True:
            batch = list(itertools.islice(it, size))
            if not batch:
                return
            yield np.asarray(batch, dtype=np.intp).reshape(len(batch), self.cardinality)


def _require_budget(enumeration: SubsetEnumeration, budget: int) -> None:
    required = len(enumeration)
    if required > budget:
        raise EnumerationBudgetExceeded(required=required, budget=budget)


def _argmax_over_chunks(
    enumeration: SubsetEnumeration,
    evaluate: ChunkEvaluator,
    *,
    chunk_size: int,
    workers: int,
) -> tuple[tuple[int, ...], float]:
    best_subset: tuple[int, ...] = ()
    best_value = -math.inf

    def consider(chunk: IndexArray, values: npt.NDArray[np.float64]) -> None:
        nonlocal best_subset, best_value
        j = int(np.argmax(values))
        if values[j] > best_value:
            best_value = float(values[j])
            best_subset = tuple(int(i) for i in chunk[j])

    chunks = enumeration.chunks(chunk_size)
    if workers <= 1:
        for chunk in chunks:
            consider(chunk, evaluate(chunk))
        return best_subset, best_value

    with ThreadPoolExecutor(max_workers=workers) as pool:
        while True:
            window = list(itertools.islice(chunks, workers))
            if not window:
                break
            # map preserves submission order, keeping the reduction deterministic
            for chunk, values in zip(window, pool.map(evaluate, window), strict=True):
                consider(chunk, values)
    return best_subset, best_value


def batched_mimo_capacity(
    h: npt.ArrayLike, combos: IndexArray, cfg: TransmitConfig
) -> npt.NDArray[np.float64]:
    """Capacities of many equal-size subsets via one batched Cholesky."""
    channel = as_complex_matrix(h, name="H")
    m, k = combos.shape
    if k == 0:
        return np.zeros(m)
    rows = channel[combos]
    rows_h = np.conj(np.swapaxes(rows, -1, -2))
    gram = rows @ rows_h if k <= channel.shape[1] else rows_h @ rows
    eye = np.eye(gram.shape[-1], dtype=np.complex128)
    factor = np.linalg.cholesky(eye + cfg.per_antenna_power * gram)
    diag = np.real(np.diagonal(factor, axis1=-2, axis2=-1))
    return np.asarray(2.0 * np.sum(np.log(diag), axis=-1), dtype=np.float64)


def brute_force_select_mimo(
    h: npt.ArrayLike,
    count: int,
    cfg: TransmitConfig,
    *,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    workers: int = 1,
) -> tuple[AntennaSubset, float]:
    """Globally optimal receive subset of size ``count``.

    Raises:
        SubsetError: If ``count`` is outside [1, Nr]
        ChannelError: If H does not have ``cfg.num_tx`` columns
        EnumerationBudgetExceeded: If C(Nr, count) > ``budget``
    """
    channel = as_complex_matrix(h, name="H")
    check_transmit_width(channel, cfg)
    nr = channel.shape[0]
    if not 1 <= count <= nr:
        raise SubsetError(f"L must be in [1, {nr}], got {count}")
    enumeration = SubsetEnumeration(nr, count)
    _require_budget(enumeration, budget)

    best, _ = _argmax_over_chunks(
        enumeration,
        lambda combos: batched_mimo_capacity(channel, combos, cfg),
        chunk_size=chunk_size,
        workers=workers,
    )
    subset = AntennaSubset(indices=best, universe_size=nr)
    return subset, mimo_capacity(channel, subset, cfg)


def brute_force_select_relay(
    links: RelayLinkSet,
    count: int,
    *,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    workers: int = 1,
) -> tuple[AntennaSubset, float]:
    """Optimal relay subset of size ``count`` by closed-form SNR.

    Raises:
        SubsetError: If ``count`` is outside [1, N]
        EnumerationBudgetExceeded: If C(N, count) > ``budget``
    """
    n = links.num_antennas
    if not 1 <= count <= n:
        raise SubsetError(f"L must be in [1, {n}], got {count}")
    enumeration = SubsetEnumeration(n, count)
    _require_budget(enumeration, budget)

    table = relay_gain_table(links)
    best, _ = _argmax_over_chunks(
        enumeration,
        lambda combos: np.sum(table.gains[combos], axis=1),
        chunk_size=chunk_size,
        workers=workers,
    )
    subset = AntennaSubset(indices=best, universe_size=n)
    return subset, table.total(subset)
