"""Data generation and Markov-parameter estimation.

The estimation step is ordinary least squares over all rollouts jointly:
stack outputs into Y (p x NT), stack per-rollout input Toeplitz blocks into
U (mT x NT), and solve min ||Y - G U||_F for the horizontal block row
G = [G_0 G_1 ... G_{T-1}].  The solve goes through a least-squares routine,
never through an explicit inverse of U U^T.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from ._validate import check_count, check_nonneg
from .errors import NumericalError
from .hankel import MarkovParams
from .realize import StateSpace
from .rng import make_rng, spawn_rngs

_RADIUS_TOL = 1e-12
_RADIUS_MAXIT = 10_000


@dataclass(frozen=True)
class RolloutDataset:
    """Input/output trajectories for N rollouts of horizon T.

    ``inputs`` is (N, T, m), ``outputs`` is (N, T, p).  The sigma fields
    record how the data was generated; loaders leave them as None.
    """

    inputs: np.ndarray
    outputs: np.ndarray
    sigma_u: float | None = None
    sigma_w: float | None = None
    sigma_v: float | None = None

    def __post_init__(self):
        u = np.ascontiguousarray(np.asarray(self.inputs, dtype=float))
        y = np.ascontiguousarray(np.asarray(self.outputs, dtype=float))
        if u.ndim != 3 or y.ndim != 3:
            raise ValueError("inputs and outputs must be (N, T, dim) arrays")
        if u.shape[:2] != y.shape[:2]:
            raise ValueError(f"rollout/horizon mismatch: inputs {u.shape[:2]}, outputs {y.shape[:2]}")
        if u.shape[0] < 1 or u.shape[1] < 1 or u.shape[2] < 1 or y.shape[2] < 1:
            raise ValueError("dataset dimensions must all be positive")
        if not (np.isfinite(u).all() and np.isfinite(y).all()):
            raise ValueError("dataset contains non-finite values")
        object.__setattr__(self, "inputs", u)
        object.__setattr__(self, "outputs", y)

    @property
    def N(self) -> int:
        return self.inputs.shape[0]

    @property
    def T(self) -> int:
        return self.inputs.shape[1]

    @property
    def m(self) -> int:
        return self.inputs.shape[2]

    @property
    def p(self) -> int:
        return self.outputs.shape[2]


def _dominant_scale(A: np.ndarray) -> float:
    """Spectral radius of an entrywise-positive matrix by power iteration."""
    n = A.shape[0]
    v = np.full(n, 1.0 / np.sqrt(n))
    lam = 0.0
    for _ in range(_RADIUS_MAXIT):
        w = A @ v
        lam_new = float(np.linalg.norm(w))
        if lam_new == 0.0:
            raise NumericalError("power iteration collapsed on a zero vector")
        v = w / lam_new
        if abs(lam_new - lam) <= _RADIUS_TOL * lam_new:
            return lam_new
        lam = lam_new
    raise NumericalError(
        f"power iteration did not converge in {_RADIUS_MAXIT} steps",
        iterations=_RADIUS_MAXIT,
    )


def random_system(n: int, m: int, p: int, seed=0, spectral_radius: float = 0.9) -> StateSpace:
    """Random integer-entry test system, rescaled to the given spectral radius.

    A starts with entries drawn uniformly from {1..5}; strictly positive
    entries make the dominant eigenvalue real and simple, so the power
    iteration in the rescale is guaranteed to converge.  B, C, D get
    entries from {-2..2}.
    """
    n = check_count(n, "n")
    m = check_count(m, "m")
    p = check_count(p, "p")
    if not 0 < spectral_radius:
        raise ValueError("spectral_radius must be positive")
    rng = make_rng(seed)
    A = rng.integers(1, 6, size=(n, n)).astype(float)
    B = rng.integers(-2, 3, size=(n, m)).astype(float)
    C = rng.integers(-2, 3, size=(p, n)).astype(float)
    D = rng.integers(-2, 3, size=(p, m)).astype(float)
    A *= spectral_radius / _dominant_scale(A)
    return StateSpace(A=A, B=B, C=C, D=D)


def run_rollout(
    ss: StateSpace,
    u: np.ndarray,
    w: np.ndarray | None = None,
    v: np.ndarray | None = None,
) -> np.ndarray:
    """Simulate one rollout from x_0 = 0; returns the (T, p) output.

    y_t = C x_t + D u_t + v_t,  x_{t+1} = A x_t + B u_t + w_t.
    """
    u = np.asarray(u, dtype=float)
    if u.ndim != 2 or u.shape[1] != ss.m:
        raise ValueError(f"u must be (T, {ss.m}), got {u.shape}")
    T = u.shape[0]
    if w is None:
        w = np.zeros((T, ss.n))
    if v is None:
        v = np.zeros((T, ss.p))
    w = np.asarray(w, dtype=float)
    v = np.asarray(v, dtype=float)
    if w.shape != (T, ss.n):
        raise ValueError(f"w must be (T, {ss.n}), got {w.shape}")
    if v.shape != (T, ss.p):
        raise ValueError(f"v must be (T, {ss.p}), got {v.shape}")
    x = np.zeros(ss.n)
    y = np.empty((T, ss.p))
    for t in range(T):
        y[t] = ss.C @ x + ss.D @ u[t] + v[t]
        x = ss.A @ x + ss.B @ u[t] + w[t]
    return y


def simulate_rollouts(
    ss: StateSpace,
    N: int,
    T: int,
    sigma_u: float = 1.0,
    sigma_w: float = 0.0,
    sigma_v: float = 0.0,
    seed=0,
) -> RolloutDataset:
    """N independent rollouts with Gaussian inputs and noises.

    Each rollout gets its own spawned stream.  All three noise blocks are
    drawn before scaling, so datasets at different sigma settings but the
    same seed share the identical underlying sample.
    """
    N = check_count(N, "N")
    T = check_count(T, "T")
    check_nonneg(sigma_u, "sigma_u")
    check_nonneg(sigma_w, "sigma_w")
    check_nonneg(sigma_v, "sigma_v")
    inputs = np.empty((N, T, ss.m))
    outputs = np.empty((N, T, ss.p))
    for i, rng in enumerate(spawn_rngs(seed, N)):
        u = rng.standard_normal((T, ss.m)) * sigma_u
        w = rng.standard_normal((T, ss.n)) * sigma_w
        v = rng.standard_normal((T, ss.p)) * sigma_v
        inputs[i] = u
        outputs[i] = run_rollout(ss, u, w, v)
    return RolloutDataset(
        inputs=inputs, outputs=outputs, sigma_u=sigma_u, sigma_w=sigma_w, sigma_v=sigma_v
    )


def toeplitz_inputs(u: np.ndarray) -> np.ndarray:
    """Lower-triangular block Toeplitz regressor for one rollout.

    For u of shape (T, m) the result X has shape (m*T, T) with block
    (i, j) equal to u_{j-i} for i <= j and zero below the block diagonal,
    so column t stacks u_t, u_{t-1}, ..., u_0 on top of zeros and
    y_t = [G_0 ... G_{T-1}] X[:, t] for noise-free data.
    """
    u = np.asarray(u, dtype=float)
    if u.ndim != 2:
        raise ValueError(f"u must be 2-D (T, m), got shape {u.shape}")
    T, m = u.shape
    X = np.zeros((m * T, T))
    for d in range(T):
        for i in range(T - d):
            X[i * m:(i + 1) * m, i + d] = u[d]
    return X


def estimate_markov(data: RolloutDataset) -> MarkovParams:
    """Least-squares Markov parameter estimate from rollout data.

    Raises NumericalError("insufficient excitation") when the stacked
    regressor is rank deficient and the outputs are not identically zero.
    An all-zero output (e.g. every sigma zero) estimates to zero blocks.
    """
    N, T, m, p = data.N, data.T, data.m, data.p
    Y = data.outputs.reshape(N * T, p)
    if not Y.any():
        return MarkovParams(np.zeros((T, p, m)))
    X = np.empty((N * T, m * T))
    for i in range(N):
        X[i * T:(i + 1) * T] = toeplitz_inputs(data.inputs[i]).T
    G_t, _, rank, _ = np.linalg.lstsq(X, Y, rcond=None)
    if rank < m * T:
        raise NumericalError(
            f"insufficient excitation: regressor rank {rank} < {m * T}; need more rollouts"
        )
    flat = np.ascontiguousarray(G_t.T)
    return MarkovParams.from_flat(flat, m)


class MarkovLeastSquares(BaseEstimator):
    """Estimator wrapper over :func:`estimate_markov`.

    fit(X) with X a RolloutDataset sets ``markov_`` (a MarkovParams) and
    ``residual_``, the relative Frobenius misfit of the regression.
    """

    def fit(self, X: RolloutDataset, y=None):
        if not isinstance(X, RolloutDataset):
            raise TypeError("MarkovLeastSquares.fit expects a RolloutDataset")
        G = estimate_markov(X)
        self.markov_ = G
        Y = X.outputs.reshape(X.N * X.T, X.p)
        denom = np.linalg.norm(Y)
        if denom == 0.0:
            self.residual_ = 0.0
        else:
            fitted = np.empty_like(Y)
            for i in range(X.N):
                fitted[i * X.T:(i + 1) * X.T] = toeplitz_inputs(X.inputs[i]).T @ G.flat.T
            self.residual_ = float(np.linalg.norm(Y - fitted) / denom)
        return self
