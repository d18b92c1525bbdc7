"""Receive-antenna selection for point-to-point MIMO mutual information.

The objective is C(S) = log det(I + (P/Nt) H_S H_S^H) over row subsets S of
H. It is monotone and sub-modular, so the greedy algorithm (add the antenna
with the largest increment, stop at L) is within (1 - 1/e) of optimal.

Greedy gains are computed on the Nt x Nt side of det(I + AB) = det(I + BA):

    C(S + a) - C(S) = log(1 + (P/Nt) h_a M_S^-1 h_a^H),
    M_S = I_Nt + (P/Nt) H_S^H H_S,

with the Cholesky factor of M_S carried in ``GreedyState`` and rank-1
updated per accepted antenna.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
import scipy.linalg as la
import structlog

from ..linalg.constants import GAIN_CLAMP
from ..linalg.hermitian import (
    ChannelError,
    ComplexArray,
    HermitianPD,
    RealArray,
    as_complex_matrix,
    cholesky_rank1_update,
    logdet_pd,
)
from .types import (
    AntennaSubset,
    SelectionTrace,
    StaleGreedyStateError,
    SubsetError,
    TraceStep,
    TransmitConfig,
)

logger = structlog.get_logger()


def logdet_identity_plus_gram(a: ComplexArray, scale: float) -> float:
    """log det(I + scale * A A^H), factorized on the smaller side of A."""
    rows, cols = a.shape
    if rows == 0 or cols == 0:
        return 0.0
    gram = a @ a.conj().T if rows <= cols else a.conj().T @ a
    m = np.eye(gram.shape[0], dtype=np.complex128) + scale * gram
    return max(logdet_pd(m), 0.0)


def _check_universe(h: ComplexArray, subset: AntennaSubset) -> None:
    if subset.universe_size != h.shape[0]:
        raise SubsetError(
            f"Subset universe {subset.universe_size} does not match {h.shape[0]} receive antennas"
        )


def check_transmit_width(h: ComplexArray, cfg: TransmitConfig) -> None:
    """Raise ``ChannelError`` unless H has exactly ``cfg.num_tx`` columns."""
    if h.shape[1] != cfg.num_tx:
        raise ChannelError(f"H has {h.shape[1]} transmit columns but num_tx={cfg.num_tx}")


def mimo_capacity(h: npt.ArrayLike, subset: AntennaSubset, cfg: TransmitConfig) -> float:
    """Mutual information (nats) of receiving on ``subset``; 0 for the empty subset."""
    channel = as_complex_matrix(h, name="H")
    check_transmit_width(channel, cfg)
    _check_universe(channel, subset)
    if not len(subset):
        return 0.0
    return logdet_identity_plus_gram(channel[subset.as_array()], cfg.per_antenna_power)


def _clamp(gain: float) -> float:
    return 0.0 if gain < GAIN_CLAMP else gain


class GreedyState:
    """Factor of M_S = I + (P/Nt) H_S^H H_S for the current subset S.

    Single-owner and mutable: ``accept`` advances S by one antenna.
    """

    def __init__(
        self,
        h: npt.ArrayLike,
        cfg: TransmitConfig,
        subset: AntennaSubset | None = None,
    ) -> None:
        self._h = as_complex_matrix(h, name="H")
        check_transmit_width(self._h, cfg)
        self._cfg = cfg
        self._scale = cfg.per_antenna_power
        nr, nt = self._h.shape
        self._subset = subset if subset is not None else AntennaSubset.empty(nr)
        _check_universe(self._h, self._subset)

        rows = self._h[self._subset.as_array()]
        m = np.eye(nt, dtype=np.complex128) + self._scale * (rows.conj().T @ rows)
        self._pd = HermitianPD.from_matrix(m)

    @property
    def subset(self) -> AntennaSubset:
        return self._subset

    @property
    def config(self) -> TransmitConfig:
        return self._cfg

    @property
    def matrix(self) -> HermitianPD:
        return self._pd

    @property
    def value(self) -> float:
        """Capacity of the current subset (log det M_S)."""
        return max(logdet_pd(self._pd), 0.0)

    def gain(self, candidate: int) -> float:
        if not 0 <= candidate < self._h.shape[0]:
            raise SubsetError(f"Candidate {candidate} outside [0, {self._h.shape[0]})")
        if candidate in self._subset:
            raise SubsetError(f"Candidate {candidate} already selected")
        v = la.solve_triangular(self._pd.factor, self._h[candidate].conj(), lower=True)
        return math.log1p(self._scale * float(np.real(np.vdot(v, v))))

    def candidate_gains(self) -> RealArray:
        """Gains of every antenna in one triangular solve; selected ones are -inf."""
        v = la.solve_triangular(self._pd.factor, self._h.conj().T, lower=True)
        quad = self._scale * np.sum(np.abs(v) ** 2, axis=0)
        gains = np.log1p(quad)
        gains[self._subset.as_array()] = -np.inf
        return np.asarray(gains, dtype=np.float64)

    def accept(self, candidate: int) -> float:
        """Add ``candidate`` to S and return its marginal gain."""
        gain = self.gain(candidate)
        x = math.sqrt(self._scale) * self._h[candidate].conj()
        self._pd = HermitianPD.from_factor(cholesky_rank1_update(self._pd.factor, x))
        self._subset = self._subset.with_added(candidate)
        return gain


def marginal_gain(
    h: npt.ArrayLike,
    subset: AntennaSubset,
    candidate: int,
    cfg: TransmitConfig,
    state: GreedyState,
) -> float:
    """C(subset + candidate) - C(subset) from the cached factor in ``state``.

    Raises:
        SubsetError: If the candidate is already selected or out of range
        StaleGreedyStateError: If ``state`` was built for another subset or config
    """
    channel = as_complex_matrix(h, name="H")
    _check_universe(channel, subset)
    if state.subset != subset or state.config != cfg:
        raise StaleGreedyStateError(
            f"GreedyState holds {state.subset.indices}, caller passed {subset.indices}"
        )
    return state.gain(candidate)


def _check_cardinality(count: int, universe: int) -> None:
    if not 1 <= count <= universe:
        raise SubsetError(f"L must be in [1, {universe}], got {count}")


def greedy_select_mimo(
    h: npt.ArrayLike,
    count: int,
    cfg: TransmitConfig,
    *,
    lazy: bool = False,
) -> tuple[AntennaSubset, SelectionTrace]:
    """Greedy receive-antenna selection of ``count`` antennas.

    Each step adds the antenna with the largest marginal gain, lowest index on
    ties. ``lazy=True`` re-evaluates stale upper bounds from a heap instead of
    scanning every candidate; the result matches the eager scan on tie-free
    channels.
    """
    channel = as_complex_matrix(h, name="H")
    _check_cardinality(count, channel.shape[0])

    state = GreedyState(channel, cfg)
    steps = _lazy_steps(state, count) if lazy else _eager_steps(state, count)
    trace = SelectionTrace(steps=tuple(steps), final_value=state.value)

    logger.debug(
        "Greedy MIMO selection finished",
        order=trace.order,
        value=trace.final_value,
        lazy=lazy,
    )
    return state.subset, trace


def _eager_steps(state: GreedyState, count: int) -> list[TraceStep]:
    steps: list[TraceStep] = []
    for step in range(1, count + 1):
        gains = state.candidate_gains()
        best = int(np.argmax(gains))
        gain = state.accept(best)
        steps.append(TraceStep(step=step, antenna=best, gain=_clamp(gain)))
    return steps


def _lazy_steps(state: GreedyState, count: int) -> list[TraceStep]:
    # Heap of (-upper_bound, index); sub-modularity keeps old gains as upper bounds
    heap = [(-float(g), i) for i, g in enumerate(state.candidate_gains())]
    heapq.heapify(heap)
    steps: list[TraceStep] = []
    evaluations = len(heap)

    while len(steps) < count:
        _, index = heapq.heappop(heap)
        fresh = state.gain(index)
        evaluations += 1
        if heap:
            next_bound, next_index = -heap[0][0], heap[0][1]
            if fresh < next_bound or (fresh == next_bound and next_index < index):
                heapq.heappush(heap, (-fresh, index))
                continue
        gain = state.accept(index)
        steps.append(TraceStep(step=len(steps) + 1, antenna=index, gain=_clamp(gain)))

    logger.debug("Lazy greedy evaluations", evaluations=evaluations, count=count)
    return steps


def transmit_capacity(h: npt.ArrayLike, tx_subset: AntennaSubset, power: float) -> float:
    """log det(I + (P/|T|) H_T H_T^H) when transmitting on columns T with power split P/|T|.

    Not monotone in T; kept for the counterexample and its failing
    monotonicity witness.
    """
    channel = as_complex_matrix(h, name="H")
    if tx_subset.universe_size != channel.shape[1]:
        raise SubsetError(
            f"Subset universe {tx_subset.universe_size} does not match {channel.shape[1]} transmit antennas"
        )
    if not len(tx_subset):
        return 0.0
    return logdet_identity_plus_gram(channel[:, tx_subset.as_array()], power / len(tx_subset))


@dataclass(frozen=True)
class TransmitCase:
    """One Nt=2, Nr=1 instance: capacity on antenna 1 alone vs. both antennas."""

    label: str
    channel: tuple[complex, complex]
    power: float
    single: float
    both: float

    @property
    def relation(self) -> str:
        if math.isclose(self.single, self.both, rel_tol=1e-12, abs_tol=1e-12):
            return "="
        return ">" if self.single > self.both else "<"


@dataclass(frozen=True)
class CounterexampleReport:
    cases: tuple[TransmitCase, ...]

    @property
    def primary(self) -> TransmitCase:
        return self.cases[0]

    @property
    def both_directions_witnessed(self) -> bool:
        relations = {c.relation for c in self.cases}
        return {">", "<"} <= relations


_TRANSMIT_INSTANCES: tuple[tuple[str, tuple[complex, complex], float], ...] = (
    ("single-antenna-wins", (1.0, 0.0), 1.0),
    ("symmetric", (1.0, 1.0), 2.0),
    ("both-antennas-win", (0.1, 2.0), 1.0),
)


def transmit_counterexample() -> CounterexampleReport:
    """Evaluate the two-transmit-antenna instances showing non-monotone transmit selection.

    Capacities are recomputed on every call.
    """
    cases: list[TransmitCase] = []
    for label, channel, power in _TRANSMIT_INSTANCES:
        row = np.asarray([channel], dtype=np.complex128)
        single = transmit_capacity(row, AntennaSubset.of([0], 2), power)
        both = transmit_capacity(row, AntennaSubset.full(2), power)
        cases.append(
            TransmitCase(label=label, channel=channel, power=power, single=single, both=both)
        )
    return CounterexampleReport(cases=tuple(cases))
