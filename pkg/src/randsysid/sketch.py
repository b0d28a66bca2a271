"""Randomized range finding and approximate SVD.

The pipeline is the classic sample / orthonormalize / project one:
draw a test matrix Omega, take Y = (A A^T)^q A Omega without ever forming
A A^T, orthonormalize to P, factor the small projection P^T A exactly, and
lift. ``basis_error_bound`` evaluates the printed expected-error bound for
the Gaussian path, verbatim.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from ._validate import as_matrix, check_count
from .errors import NumericalError
from .linalg import SvdFactors, orth, svd
from .rng import make_rng

KINDS = ("gaussian", "srft")


@dataclass(frozen=True)
class RsvdConfig:
    """Sketching parameters: target rank, oversampling, power passes, test-matrix kind."""

    rank: int
    oversample: int = 10
    power: int = 0
    kind: str = "gaussian"
    seed: int = 0
    stabilized: bool = False

    def __post_init__(self):
        check_count(self.rank, "rank", minimum=1)
        check_count(self.oversample, "oversample", minimum=1)
        check_count(self.power, "power", minimum=0)
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")

    def validate_for(self, shape: tuple[int, int]) -> None:
        w = self.rank + self.oversample
        if w > min(shape):
            raise ValueError(
                f"rank+oversample = {w} exceeds min{shape} = {min(shape)}"
            )


def gaussian_test_matrix(n: int, w: int, seed) -> np.ndarray:
    """n x w matrix of i.i.d. standard normal entries from the seeded generator."""
    n = check_count(n, "n")
    w = check_count(w, "w")
    return make_rng(seed).standard_normal((n, w))


def _srft_complex(n: int, w: int, rng: np.random.Generator) -> np.ndarray:
    # sqrt(n/w) * D * F * R: random unit-modulus diagonal, unitary DFT,
    # then w columns sampled without replacement.
    angles = rng.uniform(0.0, 2.0 * math.pi, size=n)
    d = np.exp(1j * angles)
    cols = rng.choice(n, size=w, replace=False)
    rows = np.arange(n)[:, None]
    F = np.exp((-2j * math.pi / n) * rows * cols[None, :]) / math.sqrt(n)
    return math.sqrt(n / w) * (d[:, None] * F)


def srft_test_matrix(n: int, w: int, seed) -> np.ndarray:
    """Subsampled random Fourier test matrix, realified as the n x 2w block [Re | Im].

    The real span of the two blocks contains the complex column span, so any
    residual bound for the complex sketch remains valid for the real one.
    """
    n = check_count(n, "n")
    w = check_count(w, "w")
    if w > n:
        raise ValueError(f"srft needs w <= n, got w={w} > n={n}")
    omega = _srft_complex(n, w, make_rng(seed))
    return np.hstack([omega.real, omega.imag])


def test_matrix(n: int, w: int, kind: str, seed) -> np.ndarray:
    if kind == "gaussian":
        return gaussian_test_matrix(n, w, seed)
    if kind == "srft":
        return srft_test_matrix(n, w, seed)
    raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")


def range_finder(A, cfg: RsvdConfig) -> np.ndarray:
    """Orthonormal basis P for the sampled range of (A A^T)^power A.

    Power passes multiply alternately by A and A^T; A A^T itself is never
    formed. With cfg.stabilized and power >= 2, each half-step is
    re-orthonormalized to stop rounding from flattening the small
    singular directions.
    """
    A = as_matrix(A, "A")
    cfg.validate_for(A.shape)
    omega = test_matrix(A.shape[1], cfg.rank + cfg.oversample, cfg.kind, cfg.seed)
    Y = A @ omega
    if cfg.stabilized and cfg.power >= 2:
        Y = orth(Y)
        for _ in range(cfg.power):
            Y = orth(A.T @ Y)
            Y = orth(A @ Y)
        return Y
    for _ in range(cfg.power):
        Y = A @ (A.T @ Y)
    return orth(Y)


def rsvd(A, cfg: RsvdConfig) -> SvdFactors:
    """Approximate truncated SVD from a randomized range basis.

    Factors the projection M = P^T A exactly, so before truncation the
    reconstruction equals P P^T A; the returned factors keep at most
    cfg.rank columns (fewer only if the data has lower numerical rank).
    """
    A = as_matrix(A, "A")
    P = range_finder(A, cfg)
    M = P.T @ A
    F = svd(M)
    k = min(cfg.rank, F.S.shape[0])
    return SvdFactors(
        U=np.ascontiguousarray((P @ F.U)[:, :k]),
        S=F.S[:k].copy(),
        V=np.ascontiguousarray(F.V[:, :k]),
    )


def adaptive_range_finder(A, eps: float, probes: int = 10, seed=0) -> np.ndarray:
    """Grow an orthonormal basis until the probe estimator certifies ||(I-PP^T)A|| <= eps.

    The estimator is 10*sqrt(2/pi) times the largest of the last ``probes``
    residual sample norms ||(I-PP^T)A w||; it over-estimates the true
    residual with probability at least 1 - 10^-probes per check.
    """
    A = as_matrix(A, "A")
    if eps <= 0:
        raise ValueError(f"eps must be > 0, got {eps}")
    probes = check_count(probes, "probes", minimum=5)
    rows, cols = A.shape
    limit = min(rows, cols)
    scale = 10.0 * math.sqrt(2.0 / math.pi)
    rng = make_rng(seed)

    samples = [A @ rng.standard_normal(cols) for _ in range(probes)]
    basis: list[np.ndarray] = []

    def deflate(v: np.ndarray) -> np.ndarray:
        for q in basis:
            v = v - q * (q @ v)
        return v

    while True:
        if scale * max(float(np.linalg.norm(y)) for y in samples) <= eps:
            if not basis:
                return np.zeros((rows, 0))
            return np.column_stack(basis)
        if len(basis) >= limit:
            raise NumericalError("tolerance unreachable", iterations=len(basis))
        y = deflate(samples.pop(0))
        ny = float(np.linalg.norm(y))
        if ny > 0.0:
            q = y / ny
            basis.append(q)
            samples = [s - q * (q @ s) for s in samples]
        samples.append(deflate(A @ rng.standard_normal(cols)))


def basis_error_bound(k: int, l: int, q: int, rows: int, cols: int, sigma_next: float) -> float:
    """Printed expected spectral error of the randomized basis, evaluated verbatim.

    [1 + sqrt(k/(l-1)) + (e sqrt(k+l)/l) sqrt(min(rows,cols)-k)]^(1/(2q+1)) * sigma_next.
    """
    k = check_count(k, "k", minimum=2)
    l = check_count(l, "l", minimum=2)
    q = check_count(q, "q", minimum=0)
    if k + l > min(rows, cols):
        raise ValueError(f"k+l = {k + l} exceeds min(rows, cols) = {min(rows, cols)}")
    if sigma_next < 0:
        raise ValueError("sigma_next must be >= 0")
    bracket = (
        1.0
        + math.sqrt(k / (l - 1.0))
        + (math.e * math.sqrt(k + l) / l) * math.sqrt(min(rows, cols) - k)
    )
    return bracket ** (1.0 / (2 * q + 1)) * sigma_next


def srft_basis_bound(k: int, l: int, cols: int, sigma_next: float) -> float:
    """Per-trial spectral error bound for the SRFT sketch on a raw matrix.

    (1 + sqrt(1 + 7*cols/(k+l))) * sigma_next; the Hankel-space variant lives
    in bounds.stochastic_bounds as srft_bound.
    """
    k = check_count(k, "k")
    l = check_count(l, "l")
    if sigma_next < 0:
        raise ValueError("sigma_next must be >= 0")
    return (1.0 + math.sqrt(1.0 + 7.0 * cols / (k + l))) * sigma_next


class RandomizedSVD(BaseEstimator):
    """Estimator wrapper over :func:`rsvd` with the TruncatedSVD surface.

    After ``fit(X)``: ``components_`` (rank x n_features), ``singular_values_``,
    ``U_``. ``transform`` projects onto the right singular directions.
    """

    def __init__(self, rank=2, oversample=10, power=0, test_matrix="gaussian",
                 seed=0, stabilized=False):
        self.rank = rank
        self.oversample = oversample
        self.power = power
        self.test_matrix = test_matrix
        self.seed = seed
        self.stabilized = stabilized

    def _config(self) -> RsvdConfig:
        return RsvdConfig(
            rank=self.rank,
            oversample=self.oversample,
            power=self.power,
            kind=self.test_matrix,
            seed=self.seed,
            stabilized=self.stabilized,
        )

    def fit(self, X, y=None):
        F = rsvd(X, self._config())
        self.U_ = F.U
        self.singular_values_ = F.S
        self.components_ = F.V.T
        return self

    def fit_transform(self, X, y=None):
        self.fit(X)
        return self.U_ * self.singular_values_

    def transform(self, X):
        if not hasattr(self, "components_"):
            raise NotFittedError("RandomizedSVD is not fitted yet; call fit first")
        X = as_matrix(X, "X")
        return X @ self.components_.T

    def inverse_transform(self, X):
        if not hasattr(self, "components_"):
            raise NotFittedError("RandomizedSVD is not fitted yet; call fit first")
        return np.asarray(X, dtype=float) @ self.components_
