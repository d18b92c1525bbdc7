"""Monotonicity and (sub)modularity checkers for abstract set functions.

A set function is a ``SetFunction`` handle: a closure over precomputed
instance data that maps a sorted index tuple to a real value. Universes of at
most ``EXHAUSTIVE_LIMIT`` elements are checked over every quantifier
assignment; larger ones are sampled. Values are memoized per check run.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Callable, Iterable, Iterator
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import structlog

from ..linalg.constants import MODULAR_SLACK, MONOTONE_SLACK, SUBMODULAR_SLACK
from ..selection.types import SubsetError

logger = structlog.get_logger()

EXHAUSTIVE_LIMIT = 8

Subset = tuple[int, ...]


@dataclass(frozen=True)
class SetFunction:
    """Named set function over range(universe_size).

    ``modular`` marks handles whose marginal gains must not depend on the base
    set; the sub-modularity checker then also asserts equality.
    """

    name: str
    universe_size: int
    evaluate: Callable[[Subset], float] = field(repr=False, compare=False)
    modular: bool = False

    def __call__(self, subset: Iterable[int]) -> float:
        return self.evaluate(tuple(sorted(subset)))


@dataclass(frozen=True)
class Witness:
    """Quantifier assignment achieving the worst observed margin."""

    base: Subset
    superset: Subset | None
    element: int
    margin: float


@dataclass(frozen=True)
class PropertyReport:
    kind: Literal["monotone", "submodular"]
    function: str
    passed: bool
    checks: int
    exhaustive: bool
    min_margin: float
    witness: Witness | None
    inequality_holds: bool = True
    equality_checked: bool = False
    max_equality_gap: float | None = None

    def summary(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        text = (
            f"{verdict} {self.kind} [{self.function}] checks={self.checks} "
            f"min_margin={self.min_margin:.3e}"
        )
        if self.equality_checked and self.max_equality_gap is not None:
            text += f" max_equality_gap={self.max_equality_gap:.3e}"
        if not self.passed and self.witness is not None:
            w = self.witness
            text += f" witness=(S={list(w.base)}, T={list(w.superset) if w.superset is not None else None}, a={w.element})"
        return text


class _Memo:
    def __init__(self, f: SetFunction) -> None:
        self._f = f
        self._cache: dict[Subset, float] = {}

    def __call__(self, subset: Iterable[int]) -> float:
        key = tuple(sorted(subset))
        if key not in self._cache:
            self._cache[key] = self._f.evaluate(key)
        return self._cache[key]


def _resolve_universe(f: SetFunction, universe: int | None) -> int:
    if universe is None:
        return f.universe_size
    if not 1 <= universe <= f.universe_size:
        raise SubsetError(f"universe must be in [1, {f.universe_size}] for {f.name}, got {universe}")
    return universe


def _all_monotone_pairs(n: int) -> Iterator[tuple[Subset, int]]:
    for mask in range(1 << n):
        base = tuple(i for i in range(n) if mask >> i & 1)
        for a in range(n):
            if not mask >> a & 1:
                yield base, a


def _sampled_monotone_pairs(n: int, trials: int, rng: np.random.Generator) -> Iterator[tuple[Subset, int]]:
    for _ in range(trials):
        size = int(rng.integers(0, n))
        chosen = rng.permutation(n)
        base = tuple(sorted(int(i) for i in chosen[:size]))
        a = int(chosen[size + int(rng.integers(0, n - size))])
        yield base, a


def check_monotone(
    f: SetFunction,
    universe: int | None = None,
    trials: int = 200,
    rng_seed: int = 0,
) -> PropertyReport:
    """Check f(S + a) - f(S) >= 0 on sampled or enumerated chains.

    Raises:
        SubsetError: If ``universe`` exceeds the handle's universe
    """
    n = _resolve_universe(f, universe)
    memo = _Memo(f)
    exhaustive = n <= EXHAUSTIVE_LIMIT
    pairs = (
        _all_monotone_pairs(n)
        if exhaustive
        else _sampled_monotone_pairs(n, trials, np.random.default_rng(rng_seed))
    )

    checks = 0
    min_margin = math.inf
    witness: Witness | None = None
    for base, a in pairs:
        checks += 1
        margin = memo((*base, a)) - memo(base)
        if margin < min_margin:
            min_margin = margin
            witness = Witness(base=base, superset=None, element=a, margin=margin)

    passed = min_margin >= -MONOTONE_SLACK
    report = PropertyReport(
        kind="monotone",
        function=f.name,
        passed=passed,
        checks=checks,
        exhaustive=exhaustive,
        min_margin=min_margin if checks else 0.0,
        witness=witness,
        inequality_holds=passed,
    )
    logger.debug("Monotonicity check", function=f.name, passed=passed, min_margin=report.min_margin)
    return report


def _all_submodular_triples(n: int) -> Iterator[tuple[Subset, Subset, int]]:
    # 0: outside T, 1: in T only, 2: in S (and so in T)
    for labels in itertools.product(range(3), repeat=n):
        base = tuple(i for i, lab in enumerate(labels) if lab == 2)
        superset = tuple(i for i, lab in enumerate(labels) if lab >= 1)
        for a in range(n):
            if labels[a] == 0:
                yield base, superset, a


def _sampled_submodular_triples(
    n: int, trials: int, rng: np.random.Generator
) -> Iterator[tuple[Subset, Subset, int]]:
    for _ in range(trials):
        size = int(rng.integers(0, n))
        chosen = rng.permutation(n)
        superset = tuple(sorted(int(i) for i in chosen[:size]))
        keep = rng.random(size) < 0.5
        base = tuple(i for i, k in zip(superset, keep, strict=True) if k)
        a = int(chosen[size + int(rng.integers(0, n - size))])
        yield base, superset, a


def check_submodular(
    f: SetFunction,
    universe: int | None = None,
    trials: int = 200,
    rng_seed: int = 0,
) -> PropertyReport:
    """Check [f(S+a) - f(S)] >= [f(T+a) - f(T)] for S within T, a outside T.

    Modular handles must additionally show equal gains within
    ``MODULAR_SLACK``.
    """
    n = _resolve_universe(f, universe)
    memo = _Memo(f)
    exhaustive = n <= EXHAUSTIVE_LIMIT
    triples = (
        _all_submodular_triples(n)
        if exhaustive
        else _sampled_submodular_triples(n, trials, np.random.default_rng(rng_seed))
    )

    checks = 0
    min_margin = math.inf
    max_gap = 0.0
    witness: Witness | None = None
    for base, superset, a in triples:
        checks += 1
        gain_small = memo((*base, a)) - memo(base)
        gain_large = memo((*superset, a)) - memo(superset)
        margin = gain_small - gain_large
        max_gap = max(max_gap, abs(margin))
        if margin < min_margin:
            min_margin = margin
            witness = Witness(base=base, superset=superset, element=a, margin=margin)

    if not checks:
        min_margin = 0.0
    inequality_holds = min_margin >= -SUBMODULAR_SLACK
    equality_holds = max_gap <= MODULAR_SLACK
    passed = inequality_holds and (equality_holds or not f.modular)
    logger.debug(
        "Sub-modularity check",
        function=f.name,
        passed=passed,
        min_margin=min_margin,
        max_equality_gap=max_gap,
    )
    return PropertyReport(
        kind="submodular",
        function=f.name,
        passed=passed,
        checks=checks,
        exhaustive=exhaustive,
        min_margin=min_margin,
        witness=witness,
        inequality_holds=inequality_holds,
        equality_checked=f.modular,
        max_equality_gap=max_gap if f.modular else None,
    )
