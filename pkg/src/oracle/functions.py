"""Set-function handles over concrete instances, for the property checkers."""

from __future__ import annotations

import numpy as np
import numpy.typing as npt

from ..linalg.hermitian import as_complex_matrix, gaussian_entropy
from ..selection.mimo import check_transmit_width, mimo_capacity, transmit_capacity
from ..selection.relay import relay_gain_table
from ..selection.types import AntennaSubset, RelayLinkSet, TransmitConfig
from .properties import SetFunction, Subset


def mimo_capacity_function(h: npt.ArrayLike, cfg: TransmitConfig) -> SetFunction:
    channel = as_complex_matrix(h, name="H")
    check_transmit_width(channel, cfg)
    nr = channel.shape[0]

    def evaluate(subset: Subset) -> float:
        return mimo_capacity(channel, AntennaSubset(indices=subset, universe_size=nr), cfg)

    return SetFunction(name="mimo-capacity", universe_size=nr, evaluate=evaluate)


def entropy_function(h: npt.ArrayLike, cfg: TransmitConfig) -> SetFunction:
    """h(x_S) for covariance I + (P/Nt) H_S H_S^H.

    Equals half the capacity plus the modular term |S| ln(2 pi e) / 2, so it
    is sub-modular exactly when the capacity is.
    """
    channel = as_complex_matrix(h, name="H")
    check_transmit_width(channel, cfg)
    scale = cfg.per_antenna_power

    def evaluate(subset: Subset) -> float:
        rows = channel[np.asarray(subset, dtype=np.intp)]
        sigma = np.eye(len(subset), dtype=np.complex128) + scale * (rows @ rows.conj().T)
        return gaussian_entropy(sigma)

    return SetFunction(name="gaussian-entropy", universe_size=channel.shape[0], evaluate=evaluate)


def relay_snr_function(links: RelayLinkSet) -> SetFunction:
    table = relay_gain_table(links)
    return SetFunction(
        name="relay-snr",
        universe_size=links.num_antennas,
        evaluate=table.total,
        modular=True,
    )


def transmit_capacity_function(h: npt.ArrayLike, power: float) -> SetFunction:
    """Capacity over transmit subsets with the power split P/|T|; not monotone."""
    channel = as_complex_matrix(h, name="H")
    nt = channel.shape[1]

    def evaluate(subset: Subset) -> float:
        return transmit_capacity(channel, AntennaSubset(indices=subset, universe_size=nt), power)

    return SetFunction(name="transmit-capacity", universe_size=nt, evaluate=evaluate)


def max_function(values: npt.ArrayLike, *, claim_modular: bool = True) -> SetFunction:
    """f(S) = max_{i in S} v_i (0 when empty): sub-modular but not modular.

    Flagged modular by default so the equality branch of the checker has a
    function it must reject.
    """
    v = np.asarray(values, dtype=np.float64)

    def evaluate(subset: Subset) -> float:
        return float(np.max(v[list(subset)])) if subset else 0.0

    return SetFunction(
        name="max-function",
        universe_size=int(v.shape[0]),
        evaluate=evaluate,
        modular=claim_modular,
    )
