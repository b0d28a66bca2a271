"""Dense linear-algebra kernels every other module builds on.

Factorizations are delegated to LAPACK (via numpy/scipy) and then
normalized to the package's deterministic conventions. The spectral norm
is deliberately an independent route (power iteration on A^T A) so tests
can cross-check it against the SVD.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg

from ._validate import as_matrix, check_count
from .errors import NumericalError

EPS = float(np.finfo(np.float64).eps)

# Start vector for the power iteration: fixed-seed Gaussian, so the norm of a
# given matrix is a pure function of its entries. A deterministic all-ones
# start could land orthogonal to the top singular subspace.
_POWER_SEED = 0x5EED

# Relative tolerance and iteration cap for the power iteration.
_POWER_TOL = 1e-10
_POWER_MAXIT = 10_000


@dataclass(frozen=True)
class SvdFactors:
    """Economy SVD triple: A ~ U @ diag(S) @ V.T with V stored column-wise."""

    U: np.ndarray
    S: np.ndarray
    V: np.ndarray

    def __post_init__(self):
        if self.U.ndim != 2 or self.V.ndim != 2 or self.S.ndim != 1:
            raise ValueError("SvdFactors expects 2-D U, V and 1-D S")
        r = self.S.shape[0]
        if self.U.shape[1] != r or self.V.shape[1] != r:
            raise ValueError(
                f"inconsistent factor shapes: U {self.U.shape}, S ({r},), V {self.V.shape}"
            )

    @property
    def rank_bound(self) -> int:
        return self.S.shape[0]


class MatrixNorms(NamedTuple):
    spectral: float
    frobenius: float


def rank_cutoff(shape: tuple[int, int], sigma_max: float) -> float:
    """Singular values at or below this are treated as zero."""
    return max(shape) * EPS * sigma_max


def orth(A) -> np.ndarray:
    """Orthonormal basis of range(A) via economy QR with column pivoting.

    Columns are sign-normalized (retained R diagonal >= 0) and trimmed to the
    numerical rank. Raises NumericalError("zero range") on an all-zero input.
    """
    A = as_matrix(A, "A")
    Q, R, _ = scipy.linalg.qr(A, mode="economic", pivoting=True)
    diag = np.diag(R)
    mags = np.abs(diag)
    if mags.size == 0 or mags[0] == 0.0:
        raise NumericalError("zero range")
    r = int(np.count_nonzero(mags > max(A.shape) * EPS * mags[0]))
    if r == 0:
        raise NumericalError("zero range")
    signs = np.where(diag[:r] < 0, -1.0, 1.0)
    return Q[:, :r] * signs


def svd(A) -> SvdFactors:
    """Economy SVD with a deterministic sign convention.

    In each column of U the entry of largest magnitude is made nonnegative,
    with the matching column of V flipped to preserve the product.
    """
    A = as_matrix(A, "A")
    try:
        U, S, Vt = np.linalg.svd(A, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        # LAPACK's bidiagonal QR gave up at its internal sweep limit; LAPACK
        # does not expose the count, so report the limit it enforces.
        raise NumericalError(f"svd did not converge: {exc}", iterations=30 * min(A.shape)) from exc
    lead = np.argmax(np.abs(U), axis=0)
    flip = U[lead, np.arange(U.shape[1])] < 0
    U[:, flip] *= -1.0
    Vt[flip, :] *= -1.0
    return SvdFactors(U=U, S=S, V=np.ascontiguousarray(Vt.T))


def truncate(F: SvdFactors, r) -> np.ndarray:
    """Best rank-r reconstruction from the factors; spectral error is S[r]."""
    r = check_count(r, "r", minimum=1)
    if r > F.S.shape[0]:
        raise ValueError(f"r={r} exceeds the {F.S.shape[0]} available singular values")
    return (F.U[:, :r] * F.S[:r]) @ F.V[:, :r].T


def pinv(A) -> np.ndarray:
    """Moore-Penrose inverse, reciprocating only singular values above the rank cutoff."""
    A = as_matrix(A, "A")
    F = svd(A)
    tol = rank_cutoff(A.shape, float(F.S[0]) if F.S.size else 0.0)
    inv = np.zeros_like(F.S)
    keep = F.S > tol
    inv[keep] = 1.0 / F.S[keep]
    return (F.V * inv) @ F.U.T


def spectral_norm(A) -> float:
    """Largest singular value via power iteration on A^T A.

    Relative tolerance 1e-10 on the square of the estimate, at most 10000
    iterations; raises NumericalError carrying the iteration count if the
    estimate has not settled by then.
    """
    A = as_matrix(A, "A")
    if not A.any():
        return 0.0
    v = make_rng_vector(A.shape[1])
    lam = 0.0
    for it in range(1, _POWER_MAXIT + 1):
        w = A @ v
        v = A.T @ w
        nv = float(np.linalg.norm(v))
        if nv == 0.0:
            # v fell into the null space; the remaining mass is zero.
            return 0.0
        v /= nv
        lam_new = nv  # |A^T A v| with unit v: converges to sigma_1^2
        if abs(lam_new - lam) <= _POWER_TOL * lam_new:
            return math.sqrt(lam_new)
        lam = lam_new
    raise NumericalError(
        f"spectral norm power iteration did not converge in {_POWER_MAXIT} iterations",
        iterations=_POWER_MAXIT,
    )


def make_rng_vector(n: int) -> np.ndarray:
    from .rng import make_rng

    v = make_rng(_POWER_SEED).standard_normal(n)
    return v / np.linalg.norm(v)


def norms(A) -> MatrixNorms:
    """(spectral, frobenius) pair; (0, 0) for the zero matrix."""
    A = as_matrix(A, "A")
    fro = float(np.sqrt(np.sum(A * A)))
    if fro == 0.0:
        return MatrixNorms(0.0, 0.0)
    return MatrixNorms(spectral_norm(A), fro)
