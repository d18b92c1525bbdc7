"""Amplify-and-forward relay antenna selection.

With relay k forwarding w_k y_k / gamma_k, gamma_k = sqrt(|f_k|^2 + 1), the
destination SNR for a subset T and unit-norm weights w is the Rayleigh
quotient

    SNR_T(w) = (w^H D D^H w) / (w^H B w),
    D_k = g_k f_k / gamma_k,  B = diag(|g_k|^2 / gamma_k^2) + I.

The numerator is rank-1, so max_w SNR_T = D^H B^-1 D = sum_k q_k with
q_k = |g_k|^2 |f_k|^2 / (|f_k|^2 + |g_k|^2 + 1). The objective is modular and
greedy selection (top-L by q) is optimal.
"""

from __future__ import annotations

import math

import numpy as np
import structlog

from ..linalg.constants import GAIN_CLAMP
from ..linalg.hermitian import HermitianPD, rank1_rayleigh_max, rayleigh_quotient
from .types import (
    AntennaSubset,
    RelayGainTable,
    RelayLinkSet,
    RelaySnrDecomposition,
    SelectionTrace,
    SubsetError,
    TraceStep,
    WeightVector,
)

logger = structlog.get_logger()


def relay_gain_table(links: RelayLinkSet) -> RelayGainTable:
    f2 = np.abs(links.f) ** 2
    g2 = np.abs(links.g) ** 2
    return RelayGainTable(gains=g2 * f2 / (f2 + g2 + 1.0))


def _check_subset(links: RelayLinkSet, subset: AntennaSubset) -> None:
    if subset.universe_size != links.num_antennas:
        raise SubsetError(
            f"Subset universe {subset.universe_size} does not match {links.num_antennas} relay antennas"
        )


def relay_decomposition(links: RelayLinkSet, subset: AntennaSubset) -> RelaySnrDecomposition:
    """Delta and B of the SNR Rayleigh quotient restricted to ``subset``."""
    _check_subset(links, subset)
    idx = subset.as_array()
    f = links.f[idx]
    g = links.g[idx]
    gamma = links.gamma[idx]
    delta = g * f / gamma
    noise = np.abs(g) ** 2 / gamma**2
    b = HermitianPD.from_matrix(np.diag(noise + 1.0).astype(np.complex128))
    return RelaySnrDecomposition(subset=subset, delta=delta, noise_diag=noise, b=b)


def relay_snr_closed_form(links: RelayLinkSet, subset: AntennaSubset) -> float:
    """max_w SNR over ``subset`` as the modular sum of q_i; 0 when empty."""
    _check_subset(links, subset)
    return relay_gain_table(links).total(subset)


def relay_optimal_weights(
    links: RelayLinkSet, subset: AntennaSubset
) -> tuple[WeightVector, float]:
    """Unit-norm w proportional to B^-1 D and the SNR it achieves.

    The achieved SNR is the Rayleigh quotient evaluated numerically at w, not
    the closed form. A subset of dead links (every q_i = 0) returns zero
    weights flagged ``degenerate`` and SNR 0.

    Raises:
        SubsetError: If ``subset`` is empty
    """
    if not len(subset):
        raise SubsetError("Optimal weights need a non-empty subset")
    decomposition = relay_decomposition(links, subset)
    best = rank1_rayleigh_max(decomposition.delta, decomposition.b)
    if best.degenerate:
        logger.debug("Relay subset has no live links", subset=subset.indices)
        return WeightVector(weights=best.argmax, subset=subset, degenerate=True), 0.0

    w = best.argmax / np.linalg.norm(best.argmax)
    achieved = rayleigh_quotient(w, decomposition.delta, decomposition.b)
    return WeightVector(weights=w, subset=subset), achieved


def _max_snr(links: RelayLinkSet, subset: AntennaSubset) -> float:
    if not len(subset):
        return 0.0
    decomposition = relay_decomposition(links, subset)
    return rank1_rayleigh_max(decomposition.delta, decomposition.b).value


def greedy_select_relay(
    links: RelayLinkSet,
    count: int,
    *,
    literal: bool = False,
) -> tuple[AntennaSubset, SelectionTrace]:
    """GARS: pick ``count`` relay antennas greedily.

    By default this is top-L selection on the gain table (ties to the lowest
    index). ``literal=True`` runs the step-wise argmax over numerically
    maximized SNR(T + i) instead; both give the same subset on tie-free links.
    """
    n = links.num_antennas
    if not 1 <= count <= n:
        raise SubsetError(f"L must be in [1, {n}], got {count}")

    table = relay_gain_table(links)
    steps = _literal_steps(links, count) if literal else _ranked_steps(table, count)
    subset = AntennaSubset.of((s.antenna for s in steps), n)
    trace = SelectionTrace(steps=tuple(steps), final_value=table.total(subset))
    logger.debug("Greedy relay selection finished", order=trace.order, literal=literal)
    return subset, trace


def _ranked_steps(table: RelayGainTable, count: int) -> list[TraceStep]:
    order = table.ranking()[:count]
    return [
        TraceStep(step=k + 1, antenna=int(i), gain=float(table.gains[i]))
        for k, i in enumerate(order)
    ]


def _literal_steps(links: RelayLinkSet, count: int) -> list[TraceStep]:
    subset = AntennaSubset.empty(links.num_antennas)
    current = 0.0
    steps: list[TraceStep] = []
    for step in range(1, count + 1):
        best_index = -1
        best_value = -math.inf
        for i in subset.complement():
            value = _max_snr(links, subset.with_added(i))
            if value > best_value:
                best_index, best_value = i, value
        gain = best_value - current
        steps.append(TraceStep(step=step, antenna=best_index, gain=0.0 if gain < GAIN_CLAMP else gain))
        subset = subset.with_added(best_index)
        current = best_value
    return steps


def relay_capacity(snr: float) -> float:
    """ln(1 + SNR) in nats.

    Raises:
        ValueError: If ``snr`` is negative or NaN
    """
    if not snr >= 0.0:
        raise ValueError(f"SNR must be non-negative, got {snr}")
    return math.log1p(snr)
