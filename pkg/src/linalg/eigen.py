"""Dominant-eigenvalue oracle used to cross-check the rank-1 closed forms."""

from __future__ import annotations

import numpy as np
import numpy.typing as npt
import scipy.linalg as la

from .constants import POWER_ITERATION_MAX_ITER, POWER_ITERATION_TOL
from .hermitian import (
    ComplexArray,
    DimensionMismatchError,
    HermitianPD,
    as_complex_vector,
)


def power_iteration_max(
    matrix: npt.ArrayLike,
    *,
    max_iter: int = POWER_ITERATION_MAX_ITER,
    tol: float = POWER_ITERATION_TOL,
    seed: int = 0,
) -> tuple[float, ComplexArray]:
    """Dominant eigenpair of a Hermitian PSD matrix by power iteration.

    Stops when the residual ||C x - lambda x|| drops below ``tol`` times
    max(1, |lambda|). Returns (0, x) for the zero matrix.
    """
    c = np.asarray(matrix, dtype=np.complex128)
    n = c.shape[0]
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    x /= np.linalg.norm(x)

    lam = 0.0
    for _ in range(max_iter):
        y = c @ x
        y_norm = float(np.linalg.norm(y))
        if y_norm == 0.0:
            return 0.0, x
        lam = float(np.real(np.vdot(x, y)))
        x = y / y_norm
        residual = float(np.linalg.norm(c @ x - lam * x))
        if residual < tol * max(1.0, abs(lam)):
            break
    lam = float(np.real(np.vdot(x, c @ x)))
    return lam, x


def whitened_rank1(delta: npt.ArrayLike, b: HermitianPD) -> ComplexArray:
    """Build C = L^-1 D D^H L^-H for B = L L^H.

    C shares its spectrum with B^-1/2 D D^H B^-1/2, and is rank-1 with
    trace D^H B^-1 D.
    """
    d = as_complex_vector(delta, name="Delta")
    if d.shape[0] != b.dim:
        raise DimensionMismatchError(f"Delta has length {d.shape[0]}, B has dim {b.dim}")
    v = la.solve_triangular(b.factor, d, lower=True)
    return np.asarray(np.outer(v, v.conj()), dtype=np.complex128)
