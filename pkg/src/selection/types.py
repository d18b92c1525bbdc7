"""Value types shared by the MIMO and relay selection algorithms."""

from __future__ import annotations

import math
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

from ..linalg.hermitian import ComplexArray, HermitianPD, RealArray, as_complex_vector


class SubsetError(ValueError):
    """Invalid antenna subset, candidate, or cardinality."""

    pass


class StaleGreedyStateError(RuntimeError):
    """A GreedyState was used with a subset it was not built for."""

    pass


@dataclass(frozen=True)
class TransmitConfig:
    """Average transmit power P (linear) split evenly over Nt antennas."""

    power: float
    num_tx: int

    def __post_init__(self) -> None:
        if not (math.isfinite(self.power) and self.power > 0):
            raise ValueError(f"power must be positive and finite, got {self.power}")
        if self.num_tx < 1:
            raise ValueError(f"num_tx must be >= 1, got {self.num_tx}")

    @property
    def per_antenna_power(self) -> float:
        """P / Nt, the scale in front of H H^H."""
        return self.power / self.num_tx


@dataclass(frozen=True)
class AntennaSubset:
    """Sorted set of distinct 0-based antenna indices within a universe.

    Selection order is kept separately in ``SelectionTrace``.
    """

    indices: tuple[int, ...]
    universe_size: int

    def __post_init__(self) -> None:
        if self.universe_size < 0:
            raise SubsetError(f"universe_size must be >= 0, got {self.universe_size}")
        previous = -1
        for i in self.indices:
            if not 0 <= i < self.universe_size:
                raise SubsetError(f"Index {i} outside [0, {self.universe_size})")
            if i <= previous:
                raise SubsetError(f"Indices must be strictly ascending: {self.indices}")
            previous = i

    @classmethod
    def of(cls, indices: Iterable[int], universe_size: int) -> AntennaSubset:
        """Build from any iterable; sorts, and rejects duplicates."""
        items = [int(i) for i in indices]
        if len(set(items)) != len(items):
            raise SubsetError(f"Duplicate antenna indices: {sorted(items)}")
        return cls(indices=tuple(sorted(items)), universe_size=universe_size)

    @classmethod
    def empty(cls, universe_size: int) -> AntennaSubset:
        return cls(indices=(), universe_size=universe_size)

    @classmethod
    def full(cls, universe_size: int) -> AntennaSubset:
        return cls(indices=tuple(range(universe_size)), universe_size=universe_size)

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def __contains__(self, item: object) -> bool:
        return item in self.indices

    def with_added(self, index: int) -> AntennaSubset:
        if index in self.indices:
            raise SubsetError(f"Antenna {index} already selected")
        return AntennaSubset.of((*self.indices, index), self.universe_size)

    def as_array(self) -> npt.NDArray[np.intp]:
        return np.asarray(self.indices, dtype=np.intp)

    def complement(self) -> tuple[int, ...]:
        chosen = set(self.indices)
        return tuple(i for i in range(self.universe_size) if i not in chosen)


@dataclass(frozen=True)
class TraceStep:
    """One greedy choice: step number (1-based), antenna, marginal gain."""

    step: int
    antenna: int
    gain: float


@dataclass(frozen=True)
class SelectionTrace:
    """Per-step record of a greedy run plus the final objective value."""

    steps: tuple[TraceStep, ...]
    final_value: float

    @property
    def order(self) -> tuple[int, ...]:
        return tuple(s.antenna for s in self.steps)

    @property
    def gains(self) -> tuple[float, ...]:
        return tuple(s.gain for s in self.steps)

    def total_gain(self) -> float:
        return math.fsum(self.gains)


def _freeze(arr: npt.NDArray[np.generic]) -> None:
    arr.setflags(write=False)


@dataclass(frozen=True, eq=False)
class RelayLinkSet:
    """Per-antenna source->relay (f) and relay->destination (g) coefficients."""

    f: ComplexArray
    g: ComplexArray

    def __post_init__(self) -> None:
        f = np.array(as_complex_vector(self.f, name="f"))
        g = np.array(as_complex_vector(self.g, name="g"))
        if f.shape != g.shape:
            raise SubsetError(f"f and g lengths differ: {f.shape[0]} vs {g.shape[0]}")
        _freeze(f)
        _freeze(g)
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "g", g)

    @classmethod
    def from_arrays(cls, f: npt.ArrayLike, g: npt.ArrayLike) -> RelayLinkSet:
        return cls(f=np.asarray(f, dtype=np.complex128), g=np.asarray(g, dtype=np.complex128))

    @property
    def num_antennas(self) -> int:
        return int(self.f.shape[0])

    @property
    def gamma(self) -> RealArray:
        """Amplification normalizers sqrt(|f_i|^2 + 1), all >= 1."""
        return np.sqrt(np.abs(self.f) ** 2 + 1.0)


@dataclass(frozen=True, eq=False)
class WeightVector:
    """Relay beamforming weights over a selected subset."""

    weights: ComplexArray
    subset: AntennaSubset
    degenerate: bool = False

    @property
    def norm_squared(self) -> float:
        return float(np.real(np.vdot(self.weights, self.weights)))


@dataclass(frozen=True, eq=False)
class RelaySnrDecomposition:
    """Delta, the diagonal noise term and B = diag(noise) + I for one subset."""

    subset: AntennaSubset
    delta: ComplexArray
    noise_diag: RealArray
    b: HermitianPD


@dataclass(frozen=True, eq=False)
class RelayGainTable:
    """Per-antenna modular gains q_i = |g_i|^2 |f_i|^2 / (|f_i|^2 + |g_i|^2 + 1)."""

    gains: RealArray = field(repr=False)

    def __post_init__(self) -> None:
        gains = np.array(self.gains, dtype=np.float64)
        _freeze(gains)
        object.__setattr__(self, "gains", gains)

    def __len__(self) -> int:
        return int(self.gains.shape[0])

    def total(self, subset: Iterable[int]) -> float:
        return math.fsum(float(self.gains[i]) for i in subset)

    def ranking(self) -> npt.NDArray[np.intp]:
        """Antenna indices by descending gain, ties by lowest index."""
        return np.argsort(-self.gains, kind="stable")
