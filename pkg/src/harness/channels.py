"""Seeded channel generation.

Every trial draws from its own generator, spawned from the root seed with
the trial index as spawn key, so a trial's channel depends only on
(seed, trial) and never on scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Protocol

import numpy as np

from ..linalg.hermitian import ChannelError, ComplexArray
from ..selection.types import RelayLinkSet
from .config import ExperimentConfig, FadingLaw


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent substream for one trial."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(trial,)))


def _complex_normal(rng: np.random.Generator, shape: tuple[int, ...]) -> ComplexArray:
    # Unit variance: real and imaginary parts each have variance 1/2
    real = rng.standard_normal(shape)
    imag = rng.standard_normal(shape)
    return np.asarray((real + 1j * imag) * math.sqrt(0.5), dtype=np.complex128)


class ChannelSampler(Protocol):
    """Draws i.i.d. unit-mean-power complex fading coefficients."""

    def draw(self, rng: np.random.Generator, shape: tuple[int, ...]) -> ComplexArray: ...


@dataclass(frozen=True)
class RayleighSampler:
    """Circularly-symmetric complex Gaussian entries, E|h|^2 = 1."""

    def draw(self, rng: np.random.Generator, shape: tuple[int, ...]) -> ComplexArray:
        return _complex_normal(rng, shape)


@dataclass(frozen=True)
class RicianSampler:
    """Line-of-sight plus scattered component, E|h|^2 = 1.

    The line-of-sight phase is uniform per entry so the law stays continuous.
    ``k_factor`` = 0 reduces to Rayleigh fading.
    """

    k_factor: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.k_factor) and self.k_factor >= 0):
            raise ValueError(f"k_factor must be finite and >= 0, got {self.k_factor}")

    def draw(self, rng: np.random.Generator, shape: tuple[int, ...]) -> ComplexArray:
        k = self.k_factor
        scatter = _complex_normal(rng, shape)
        phase = rng.uniform(0.0, 2.0 * math.pi, size=shape)
        los = np.exp(1j * phase)
        return np.asarray(
            math.sqrt(k / (k + 1.0)) * los + math.sqrt(1.0 / (k + 1.0)) * scatter,
            dtype=np.complex128,
        )


RAYLEIGH = RayleighSampler()


def sampler_for(cfg: ExperimentConfig) -> ChannelSampler:
    if cfg.fading is FadingLaw.RICIAN:
        return RicianSampler(k_factor=cfg.k_factor)
    return RAYLEIGH


def sample_channel_mimo(
    nr: int, nt: int, rng: np.random.Generator, sampler: ChannelSampler = RAYLEIGH
) -> ComplexArray:
    """Nr x Nt channel matrix H; rows are receive antennas."""
    if nr < 1 or nt < 1:
        raise ChannelError(f"Channel dimensions must be >= 1, got {nr}x{nt}")
    return sampler.draw(rng, (nr, nt))


def sample_channel_relay(
    n: int, rng: np.random.Generator, sampler: ChannelSampler = RAYLEIGH
) -> RelayLinkSet:
    """Source->relay f and relay->destination g, drawn independently (f first)."""
    if n < 1:
        raise ChannelError(f"Relay antenna count must be >= 1, got {n}")
    f = sampler.draw(rng, (n,))
    g = sampler.draw(rng, (n,))
    return RelayLinkSet(f=f, g=g)
