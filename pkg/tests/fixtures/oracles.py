"""Independent reference computations for checking the library."""

from __future__ import annotations

import cmath
import itertools
import math
from typing import Any

import numpy as np
import numpy.typing as npt


def cofactor_det(matrix: npt.ArrayLike) -> complex:
    """Determinant by Laplace expansion along the first row (dim <= 4)."""
    m = np.asarray(matrix, dtype=np.complex128)
    n = m.shape[0]
    if n == 0:
        return 1.0 + 0.0j
    if n == 1:
        return complex(m[0, 0])
    total = 0.0 + 0.0j
    for j in range(n):
        minor = np.delete(np.delete(m, 0, axis=0), j, axis=1)
        total += (-1) ** j * complex(m[0, j]) * cofactor_det(minor)
    return total


def cofactor_logdet(matrix: npt.ArrayLike) -> float:
    det = cofactor_det(matrix)
    return math.log(abs(det)) if det != 0 else -math.inf


def full_capacity(h: npt.NDArray[Any], subset: tuple[int, ...], per_antenna_power: float) -> float:
    """log det(I + s H_S H_S^H) on the |S| x |S| side, via numpy slogdet."""
    if not subset:
        return 0.0
    rows = h[list(subset)]
    m = np.eye(len(subset)) + per_antenna_power * rows @ rows.conj().T
    sign, logdet = np.linalg.slogdet(m)
    assert abs(sign - 1.0) < 1e-9
    return float(logdet)


def exhaustive_best(values: dict[tuple[int, ...], float]) -> tuple[tuple[int, ...], float]:
    """Lexicographically smallest argmax over an explicit table."""
    best = max(values.values())
    winner = min(s for s, v in values.items() if v == best)
    return winner, best


def all_subsets(n: int, k: int) -> list[tuple[int, ...]]:
    return list(itertools.combinations(range(n), k))


def dense_rayleigh_max(delta: npt.ArrayLike, b: npt.ArrayLike) -> float:
    """Largest eigenvalue of B^-1/2 D D^H B^-1/2 via a dense Hermitian eigensolve."""
    d = np.asarray(delta, dtype=np.complex128)
    bm = np.asarray(b, dtype=np.complex128)
    w, v = np.linalg.eigh(bm)
    inv_sqrt = v @ np.diag(1.0 / np.sqrt(w)) @ v.conj().T
    c = inv_sqrt @ np.outer(d, d.conj()) @ inv_sqrt
    return float(np.max(np.linalg.eigvalsh(c)))


def phase(theta: float) -> complex:
    return cmath.exp(1j * theta)
