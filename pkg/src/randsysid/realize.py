"""State-space realization from Markov parameters.

Both branches factor the unshifted Hankel half, split the factorization
symmetrically into observability and controllability factors, and read the
model off the shifted half:

    O = U sqrt(S),  Q = sqrt(S) V^T,
    C = first p rows of O,  B = first m columns of Q,
    A = pinv(O) Hplus pinv(Q),  D = G_0 (copied, never recomputed).

The deterministic branch takes a full SVD and truncates; the stochastic
branch uses the randomized SVD with the target rank forced to the order.
Because U and V have orthonormal columns, the pseudoinverses reduce to
pinv(O) = S^{-1/2} U^T and pinv(Q) = V S^{-1/2}; no second factorization.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from ._validate import as_matrix, check_count
from .errors import NumericalError
from .hankel import HankelPair, MarkovParams, build_hankel, default_split, markov_from_ss
from .linalg import rank_cutoff, svd
from .sketch import RsvdConfig, rsvd

MODES = ("det", "rsvd")


@dataclass(frozen=True)
class StateSpace:
    """Discrete-time LTI model (A, B, C, D)."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        A = as_matrix(self.A, "A")
        B = as_matrix(self.B, "B")
        C = as_matrix(self.C, "C")
        D = as_matrix(self.D, "D")
        n = A.shape[0]
        if A.shape != (n, n):
            raise ValueError(f"A must be square, got {A.shape}")
        if B.shape[0] != n:
            raise ValueError(f"B has {B.shape[0]} rows, expected {n}")
        if C.shape[1] != n:
            raise ValueError(f"C has {C.shape[1]} columns, expected {n}")
        if D.shape != (C.shape[0], B.shape[1]):
            raise ValueError(f"D must be {C.shape[0]}x{B.shape[1]}, got {D.shape}")
        for name, M in (("A", A), ("B", B), ("C", C), ("D", D)):
            object.__setattr__(self, name, M)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    @property
    def p(self) -> int:
        return self.C.shape[0]


@dataclass(frozen=True)
class RealizationResult:
    """Realized model plus the factorization it came from.

    ``sing_values`` holds the singular values the factorization produced
    (the full spectrum in det mode, the leading ``order`` in rsvd mode).
    ``seconds`` times the factorization call only. L is lazily O @ Q.
    """

    ss: StateSpace
    O: np.ndarray
    Q: np.ndarray
    sing_values: np.ndarray
    mode: str
    seconds: float
    hankel: HankelPair

    @property
    def L(self) -> np.ndarray:
        return self.O @ self.Q

    @property
    def order(self) -> int:
        return self.ss.n


def suggest_order(sing_values) -> int:
    """Order guess: position of the largest ratio gap in the spectrum.

    Exposed as a helper only; nothing in the package applies it implicitly.
    """
    s = np.asarray(sing_values, dtype=float)
    if s.ndim != 1 or s.size < 2:
        raise ValueError("need at least two singular values")
    floor = np.finfo(float).tiny
    ratios = s[:-1] / np.maximum(s[1:], floor)
    return int(np.argmax(ratios)) + 1


def ho_kalman(
    G_hat: MarkovParams,
    order: int,
    t1: int | None = None,
    t2: int | None = None,
    mode: str = "det",
    cfg: RsvdConfig | None = None,
) -> RealizationResult:
    """Realize a state-space model of the given order from Markov parameters.

    Parameters
    ----------
    G_hat : MarkovParams
        Estimated (or exact) impulse-response blocks, T of them.
    order : int
        System order n; must satisfy n <= min(t1, t2).
    t1, t2 : int, optional
        Hankel split. Both or neither; default ceil((T-1)/2), T-1-t1.
    mode : {"det", "rsvd"}
        Full SVD plus truncation, or randomized SVD.
    cfg : RsvdConfig, required iff mode == "rsvd"
        Sketch parameters. Its rank is forced to ``order``.

    Raises
    ------
    NumericalError
        If sigma_order of the factorization falls at or below the rank
        cutoff ("order too high for data").
    """
    order = check_count(order, "order")
    if (t1 is None) != (t2 is None):
        raise ValueError("pass both t1 and t2, or neither")
    if t1 is None:
        t1, t2 = default_split(G_hat.T)
    if order > min(t1, t2):
        raise ValueError(f"order too high for the split: order={order} > min(t1,t2)={min(t1, t2)}")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")

    pair = build_hankel(G_hat, t1, t2)
    if mode == "det":
        start = time.perf_counter()
        F = svd(pair.Hminus)
        seconds = time.perf_counter() - start
    else:
        if cfg is None:
            raise ValueError("mode='rsvd' requires an RsvdConfig")
        cfg = replace(cfg, rank=order)
        start = time.perf_counter()
        F = rsvd(pair.Hminus, cfg)
        seconds = time.perf_counter() - start

    sing = F.S
    cutoff = rank_cutoff(pair.Hminus.shape, float(sing[0]) if sing.size else 0.0)
    if sing.size < order or sing[order - 1] <= cutoff:
        raise NumericalError(
            f"order too high for data: sigma_{order} of the factorization is below the rank cutoff"
        )

    root = np.sqrt(sing[:order])
    U = F.U[:, :order]
    V = F.V[:, :order]
    O = U * root
    Q = (V * root).T
    p, m = G_hat.p, G_hat.m
    C = O[:p].copy()
    B = Q[:, :m].copy()
    # pinv(O) @ Hplus @ pinv(Q) with the factor-based pseudoinverses.
    A = (U / root).T @ pair.Hplus @ (V / root)
    D = G_hat.blocks[0].copy()
    ss = StateSpace(A=A, B=B, C=C, D=D)
    return RealizationResult(
        ss=ss, O=O, Q=Q, sing_values=sing.copy(), mode=mode, seconds=seconds, hankel=pair
    )


class HoKalman(BaseEstimator):
    """Estimator wrapper over :func:`ho_kalman`.

    ``fit`` takes a MarkovParams and exposes A_, B_, C_, D_, O_, Q_,
    singular_values_, and result_.
    """

    def __init__(self, order=1, t1=None, t2=None, mode="det", oversample=10,
                 power=0, test_matrix="gaussian", seed=0, stabilized=False):
        self.order = order
        self.t1 = t1
        self.t2 = t2
        self.mode = mode
        self.oversample = oversample
        self.power = power
        self.test_matrix = test_matrix
        self.seed = seed
        self.stabilized = stabilized

    def fit(self, X: MarkovParams, y=None):
        if not isinstance(X, MarkovParams):
            raise TypeError("HoKalman.fit expects a MarkovParams")
        cfg = None
        if self.mode == "rsvd":
            cfg = RsvdConfig(
                rank=self.order,
                oversample=self.oversample,
                power=self.power,
                kind=self.test_matrix,
                seed=self.seed,
                stabilized=self.stabilized,
            )
        result = ho_kalman(X, self.order, self.t1, self.t2, self.mode, cfg)
        self.result_ = result
        self.A_ = result.ss.A
        self.B_ = result.ss.B
        self.C_ = result.ss.C
        self.D_ = result.ss.D
        self.O_ = result.O
        self.Q_ = result.Q
        self.singular_values_ = result.sing_values
        return self

    def markov(self, T: int) -> MarkovParams:
        """Impulse-response blocks of the fitted model."""
        if not hasattr(self, "result_"):
            raise NotFittedError("HoKalman is not fitted yet; call fit first")
        return markov_from_ss(self.result_.ss, T)
