"""Kernel for complex Hermitian positive-definite matrices.

Everything downstream (capacities, greedy gains, relay beamforming) reduces to
three primitives on matrices of the form I + PSD:

- ``logdet_pd``: natural log-determinant from the lower Cholesky factor
  (twice the sum of log pivots, so the determinant itself never overflows).
- ``solve_pd``: triangular solves against the cached factor.
- ``rank1_rayleigh_max``: maximum of (w^H D D^H w) / (w^H B w) for a rank-1
  numerator, equal to D^H B^-1 D and attained at w = B^-1 D.

Values are immutable once built: ``HermitianPD`` freezes both the matrix and
its factor, so instances can be shared across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np
import numpy.typing as npt
import scipy.linalg as la
import structlog

from .constants import HERMITIAN_RTOL, PD_PIVOT_RTOL

logger = structlog.get_logger()

ComplexArray = npt.NDArray[np.complex128]
RealArray = npt.NDArray[np.float64]


class NotPositiveDefiniteError(ValueError):
    """Factorization failed: the matrix is not positive definite within tolerance."""

    def __init__(self, minor: int, pivot: float | None = None) -> None:
        self.minor = minor
        self.pivot = pivot
        detail = f" (pivot {pivot:.3e})" if pivot is not None else ""
        super().__init__(f"Leading minor {minor} is not positive definite{detail}")


class DimensionMismatchError(ValueError):
    """Operand shapes do not agree."""

    pass


class ChannelError(ValueError):
    """Channel data is malformed or contains non-finite entries."""

    pass


def as_complex_matrix(data: npt.ArrayLike, *, name: str = "matrix") -> ComplexArray:
    """Coerce to a finite 2-D complex128 array.

    Raises:
        ChannelError: If the input is not 2-D or holds NaN/Inf entries
    """
    arr = np.asarray(data, dtype=np.complex128)
    if arr.ndim != 2:
        raise ChannelError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ChannelError(f"{name} contains non-finite entries")
    return arr


def as_complex_vector(data: npt.ArrayLike, *, name: str = "vector") -> ComplexArray:
    """Coerce to a finite 1-D complex128 array."""
    arr = np.asarray(data, dtype=np.complex128)
    if arr.ndim != 1:
        raise ChannelError(f"{name} must be 1-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ChannelError(f"{name} contains non-finite entries")
    return arr


def _frozen(arr: npt.NDArray[Any]) -> npt.NDArray[Any]:
    arr.setflags(write=False)
    return arr


def cholesky_lower(matrix: ComplexArray) -> ComplexArray:
    """Lower Cholesky factor with a relative pivot floor.

    Uses LAPACK ``potrf`` directly so the offending leading minor is known
    when the factorization breaks down.

    Raises:
        NotPositiveDefiniteError: On breakdown or a pivot below
            ``PD_PIVOT_RTOL`` times the largest diagonal entry
    """
    n = matrix.shape[0]
    if n == 0:
        return np.zeros((0, 0), dtype=np.complex128)

    (potrf,) = la.get_lapack_funcs(("potrf",), (matrix,))
    factor, info = potrf(matrix, lower=True, clean=True, overwrite_a=False)
    if info > 0:
        logger.debug("Factorization breakdown", minor=int(info), dim=n)
        raise NotPositiveDefiniteError(minor=int(info))
    if info < 0:
        raise ValueError(f"potrf rejected argument {-info}")

    pivots = np.real(np.diag(factor)) ** 2
    floor = PD_PIVOT_RTOL * float(np.max(np.real(np.diag(matrix))))
    low = np.flatnonzero(pivots < floor)
    if low.size:
        k = int(low[0])
        raise NotPositiveDefiniteError(minor=k + 1, pivot=float(pivots[k]))
    return np.asarray(factor, dtype=np.complex128)


@dataclass(frozen=True, eq=False)
class HermitianPD:
    """A Hermitian positive-definite matrix together with its lower factor.

    Build with ``from_matrix`` (validates and factorizes) or ``from_factor``
    (trusts an already-updated factor, e.g. after a rank-1 update).
    """

    matrix: ComplexArray
    factor: ComplexArray

    @classmethod
    def from_matrix(cls, data: npt.ArrayLike) -> HermitianPD:
        """Validate Hermitian symmetry and factorize.

        Raises:
            DimensionMismatchError: If the matrix is not square
            ValueError: If the matrix is not Hermitian within tolerance
            NotPositiveDefiniteError: If factorization fails
        """
        matrix = np.array(data, dtype=np.complex128)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionMismatchError(f"Expected a square matrix, got shape {matrix.shape}")
        if not np.all(np.isfinite(matrix)):
            raise ChannelError("matrix contains non-finite entries")

        if matrix.size:
            scale = float(np.max(np.abs(matrix)))
            asym = float(np.max(np.abs(matrix - matrix.conj().T)))
            if asym > HERMITIAN_RTOL * max(scale, 1.0):
                raise ValueError(f"Matrix is not Hermitian (max asymmetry {asym:.3e})")
            # Symmetrize exactly so the diagonal is real
            matrix = 0.5 * (matrix + matrix.conj().T)

        factor = cholesky_lower(matrix)
        return cls(matrix=_frozen(matrix), factor=_frozen(factor))

    @classmethod
    def from_factor(cls, factor: npt.ArrayLike) -> HermitianPD:
        lower = np.array(factor, dtype=np.complex128)
        matrix = lower @ lower.conj().T
        return cls(matrix=_frozen(matrix), factor=_frozen(lower))

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])


def _ensure_pd(m: HermitianPD | npt.ArrayLike) -> HermitianPD:
    return m if isinstance(m, HermitianPD) else HermitianPD.from_matrix(m)


def logdet_pd(m: HermitianPD | npt.ArrayLike) -> float:
    """Natural log-determinant (nats) of a Hermitian positive-definite matrix."""
    pd = _ensure_pd(m)
    if pd.dim == 0:
        return 0.0
    return float(2.0 * np.sum(np.log(np.real(np.diag(pd.factor)))))


def solve_pd(m: HermitianPD | npt.ArrayLike, b: npt.ArrayLike) -> ComplexArray:
    """Solve M x = b using the cached factor.

    Raises:
        DimensionMismatchError: If b does not have M.dim rows
    """
    pd = _ensure_pd(m)
    rhs = np.asarray(b, dtype=np.complex128)
    if rhs.ndim == 0 or rhs.shape[0] != pd.dim:
        raise DimensionMismatchError(
            f"Right-hand side has {rhs.shape[0] if rhs.ndim else 0} rows, matrix dim is {pd.dim}"
        )
    if pd.dim == 0:
        return rhs.copy()
    return np.asarray(la.cho_solve((pd.factor, True), rhs), dtype=np.complex128)


@dataclass(frozen=True, eq=False)
class RayleighMax:
    """Result of a rank-1 Rayleigh quotient maximization."""

    value: float
    argmax: ComplexArray
    degenerate: bool = False


def rank1_rayleigh_max(delta: npt.ArrayLike, b: HermitianPD | npt.ArrayLike) -> RayleighMax:
    """Maximize (w^H D D^H w) / (w^H B w) over w.

    The numerator is rank-1, so lambda_max of the whitened matrix equals its
    trace D^H B^-1 D and the (unnormalized) maximizer is w = B^-1 D. A zero D
    yields value 0 with a zero argmax flagged ``degenerate``.
    """
    pd = _ensure_pd(b)
    d = as_complex_vector(delta, name="Delta")
    if d.shape[0] != pd.dim:
        raise DimensionMismatchError(f"Delta has length {d.shape[0]}, B has dim {pd.dim}")

    if not np.any(d):
        return RayleighMax(value=0.0, argmax=_frozen(np.zeros_like(d)), degenerate=True)

    w = solve_pd(pd, d)
    value = max(float(np.real(np.vdot(d, w))), 0.0)
    return RayleighMax(value=value, argmax=_frozen(w))


def rayleigh_quotient(
    w: npt.ArrayLike, delta: npt.ArrayLike, b: HermitianPD | npt.ArrayLike
) -> float:
    """Evaluate (w^H D D^H w) / (w^H B w) numerically."""
    pd = _ensure_pd(b)
    wv = np.asarray(w, dtype=np.complex128)
    d = np.asarray(delta, dtype=np.complex128)
    numerator = abs(complex(np.vdot(d, wv))) ** 2
    denominator = float(np.real(np.vdot(wv, pd.matrix @ wv)))
    if denominator <= 0.0:
        return 0.0
    return numerator / denominator


def cholesky_rank1_update(factor: npt.ArrayLike, x: npt.ArrayLike) -> ComplexArray:
    """Return the lower factor of L L^H + x x^H without refactorizing.

    Standard O(n^2) sweep; the diagonal stays real and positive.
    """
    lower = np.array(factor, dtype=np.complex128)
    v = np.array(x, dtype=np.complex128)
    n = lower.shape[0]
    if v.shape != (n,):
        raise DimensionMismatchError(f"Update vector has shape {v.shape}, factor dim is {n}")

    for k in range(n):
        lkk = float(np.real(lower[k, k]))
        r = math.hypot(lkk, abs(complex(v[k])))
        c = r / lkk
        s = v[k] / lkk
        lower[k, k] = r
        if k + 1 < n:
            old = lower[k + 1 :, k].copy()
            lower[k + 1 :, k] = (old + np.conj(s) * v[k + 1 :]) / c
            v[k + 1 :] = (v[k + 1 :] - s * old) / c
    return lower


def gaussian_entropy(sigma: HermitianPD | npt.ArrayLike) -> float:
    """Differential entropy h = log sqrt((2 pi e)^L det(Sigma)) in nats.

    Treated as a formal identity on det(Sigma); the Gaussian vector itself is
    never sampled.
    """
    pd = _ensure_pd(sigma)
    return 0.5 * (pd.dim * math.log(2.0 * math.pi * math.e) + logdet_pd(pd))
