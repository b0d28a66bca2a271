"""Markov-parameter containers and block-Hankel geometry."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._validate import check_count


@dataclass(frozen=True)
class MarkovParams:
    """Impulse-response blocks G_0..G_{T-1}, stored as an array of shape (T, p, m).

    G_0 is the feedthrough D; G_k = C A^{k-1} B for k >= 1.
    """

    blocks: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.blocks, dtype=float)
        if b.ndim != 3 or b.shape[0] < 1:
            raise ValueError(f"blocks must have shape (T, p, m) with T >= 1, got {b.shape}")
        if not np.all(np.isfinite(b)):
            raise ValueError("blocks contain non-finite entries")
        object.__setattr__(self, "blocks", b)

    @property
    def T(self) -> int:
        return self.blocks.shape[0]

    @property
    def p(self) -> int:
        return self.blocks.shape[1]

    @property
    def m(self) -> int:
        return self.blocks.shape[2]

    @property
    def flat(self) -> np.ndarray:
        """The p x (T*m) matrix [G_0 G_1 ... G_{T-1}]."""
        T, p, m = self.blocks.shape
        return self.blocks.transpose(1, 0, 2).reshape(p, T * m)

    @classmethod
    def from_flat(cls, flat: np.ndarray, m: int) -> "MarkovParams":
        flat = np.asarray(flat, dtype=float)
        if flat.ndim != 2:
            raise ValueError("flat must be 2-D")
        p, tm = flat.shape
        m = check_count(m, "m")
        if tm % m != 0:
            raise ValueError(f"column count {tm} is not a multiple of m={m}")
        T = tm // m
        return cls(flat.reshape(p, T, m).transpose(1, 0, 2))


@dataclass(frozen=True)
class HankelPair:
    """The Hankel matrix and its two one-block-column shifts.

    Hminus drops the last block column, Hplus the first; both are views
    into H, so no extra memory is held.
    """

    t1: int
    t2: int
    H: np.ndarray
    Hminus: np.ndarray
    Hplus: np.ndarray


def markov_from_ss(ss, T: int) -> MarkovParams:
    """Markov blocks of a state-space model by iterated multiplication (never A^k)."""
    T = check_count(T, "T")
    n, m, p = ss.n, ss.m, ss.p
    blocks = np.empty((T, p, m))
    blocks[0] = ss.D
    reach = ss.B.copy()
    for k in range(1, T):
        blocks[k] = ss.C @ reach
        reach = ss.A @ reach
    return MarkovParams(blocks)


def default_split(T: int) -> tuple[int, int]:
    """The (T1, T2) split used when only the horizon is given: T1 + T2 + 1 = T."""
    T = check_count(T, "T", minimum=3)
    t1 = math.ceil((T - 1) / 2)
    return t1, T - 1 - t1


def build_hankel(G: MarkovParams, t1: int, t2: int) -> HankelPair:
    """Assemble the pT1 x m(T2+1) block Hankel; block (i, j) holds G_{i+j+1}.

    G_0 never enters H. Requires t1 + t2 + 1 == G.T exactly.
    """
    t1 = check_count(t1, "t1")
    t2 = check_count(t2, "t2")
    if t1 + t2 + 1 != G.T:
        raise ValueError(f"horizon mismatch: t1+t2+1 = {t1 + t2 + 1} but T = {G.T}")
    p, m = G.p, G.m
    H = np.zeros((p * t1, m * (t2 + 1)))
    for i in range(t1):
        row = H[i * p:(i + 1) * p]
        for j in range(t2 + 1):
            row[:, j * m:(j + 1) * m] = G.blocks[i + j + 1]
    return HankelPair(t1=t1, t2=t2, H=H, Hminus=H[:, : m * t2], Hplus=H[:, m:])
