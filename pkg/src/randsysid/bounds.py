"""Executable error bounds and error metrics for Hankel realizations.

Every bound here is evaluated exactly as printed in its source formula,
with the Markov-parameter error ``gnorm`` = ||G - G_hat|| (spectral norm
of the flat p x mT difference) as the driving quantity:

* ``perturbation_bounds``  deterministic Hankel/truncation bounds plus the
  measured Hankel-difference norms they dominate.
* ``stochastic_bounds``    average-case, power-scheme, deviation, and
  structured-transform bounds for the sketched factorization, collected in
  a BoundReport.
* ``realization_check``    the factor-wise robustness inequalities for a
  realized model against an exact one, with the alignment unitary supplied
  by orthogonal Procrustes.
* ``hinf_error``           normalized worst-case transfer-function error
  over a unit-circle grid.
"""

from __future__ import annotations

import math
from dataclasses import MISSING, dataclass, fields

import numpy as np

from ._validate import as_matrix, check_count, check_nonneg
from .errors import NumericalError
from .hankel import MarkovParams, build_hankel
from .linalg import norms, svd
from .realize import RealizationResult, StateSpace

DEFAULT_GRID = 1024
_CHUNK = 256

_INT_FIELDS = ("n", "l", "q", "p", "m", "t1", "t2")


@dataclass(frozen=True)
class PerturbationBounds:
    """Deterministic bounds and measured norms for a Markov perturbation.

    The chain is: each shifted-half error <= ``h_err`` <= ``hankel_bound``,
    and the rank-n truncation error <= 2*``hminus_err`` <= ``trunc_bound``.
    """

    gnorm: float
    hankel_bound: float
    trunc_bound: float
    h_err: float
    hminus_err: float
    hplus_err: float


def perturbation_bounds(G: MarkovParams, G_hat: MarkovParams, t1: int, t2: int) -> PerturbationBounds:
    """Evaluate the deterministic perturbation bounds at a given split."""
    if (G.p, G.m, G.T) != (G_hat.p, G_hat.m, G_hat.T):
        raise ValueError(
            f"shape mismatch: (p,m,T)=({G.p},{G.m},{G.T}) vs ({G_hat.p},{G_hat.m},{G_hat.T})"
        )
    gnorm = norms(G.flat - G_hat.flat).spectral
    pair = build_hankel(G, t1, t2)
    pair_hat = build_hankel(G_hat, t1, t2)
    h_err = norms(pair.H - pair_hat.H).spectral
    hminus_err = norms(pair.Hminus - pair_hat.Hminus).spectral
    hplus_err = norms(pair.Hplus - pair_hat.Hplus).spectral
    return PerturbationBounds(
        gnorm=gnorm,
        hankel_bound=math.sqrt(min(t1, t2 + 1)) * gnorm,
        trunc_bound=2.0 * math.sqrt(min(t1, t2)) * gnorm,
        h_err=h_err,
        hminus_err=hminus_err,
        hplus_err=hplus_err,
    )


@dataclass(frozen=True)
class BoundReport:
    """Evaluated constants and bound right-hand sides for one configuration.

    ``dev_bound_el`` is present only for l >= 4 (its lemma assumes that);
    the transition fields are present only when sigma_min_L (and, for the
    bound itself, hplus_norm) were supplied.
    """

    n: int
    l: int
    q: int
    p: int
    m: int
    t1: int
    t2: int
    gnorm: float
    tail_const: float
    split_const: float
    hankel_bound: float
    trunc_bound: float
    avg_bound: float
    avg_bound_power: float
    dev_bound_ll: float
    srft_bound: float
    factor_bound: float
    dev_bound_el: float | None = None
    transition_const: float | None = None
    transition_bound: float | None = None

    def to_text(self) -> str:
        """Flat key=value serialization; None fields are omitted."""
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            if f.name in _INT_FIELDS:
                lines.append(f"{f.name}={value}")
            else:
                lines.append(f"{f.name}={format(value, '.17g')}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "BoundReport":
        known = {f.name for f in fields(cls)}
        kv: dict[str, float | int] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            key = key.strip()
            if not sep or not key:
                raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
            if key not in known:
                raise ValueError(f"line {lineno}: unknown key {key!r}")
            if key in kv:
                raise ValueError(f"line {lineno}: duplicate key {key!r}")
            try:
                kv[key] = int(value) if key in _INT_FIELDS else float(value)
            except ValueError:
                raise ValueError(f"line {lineno}: bad value for {key!r}: {value!r}") from None
        required = {f.name for f in fields(cls) if f.default is MISSING} - set(kv)
        if required:
            raise ValueError(f"missing keys: {sorted(required)}")
        return cls(**kv)


def stochastic_bounds(
    n: int,
    l: int,
    q: int,
    p: int,
    m: int,
    t1: int,
    t2: int,
    gnorm: float,
    sigma_min_L: float | None = None,
    hplus_norm: float | None = None,
) -> BoundReport:
    """Evaluate every sketch-error bound for one configuration.

    ``gnorm`` is ||G - G_hat||; the optional ``sigma_min_L`` and
    ``hplus_norm`` unlock the transition-matrix constant and bound.
    """
    n = check_count(n, "n")
    l = check_count(l, "l")
    p = check_count(p, "p")
    m = check_count(m, "m")
    t1 = check_count(t1, "t1")
    t2 = check_count(t2, "t2")
    if q < 0 or int(q) != q:
        raise ValueError(f"q must be a nonnegative integer, got {q}")
    q = int(q)
    if l < 2:
        raise ValueError(f"oversampling must be at least 2 for the bounds, got l={l}")
    check_nonneg(gnorm, "gnorm")
    window = min(p * t1, m * t2)
    if n + l > window:
        raise ValueError(
            f"oversampled rank exceeds the sketch window: n+l={n + l} > min(p*t1, m*t2)={window}"
        )
    if sigma_min_L is not None and not sigma_min_L > 0:
        raise ValueError(f"sigma_min_L must be positive, got {sigma_min_L}")
    if hplus_norm is not None:
        check_nonneg(hplus_norm, "hplus_norm")

    c1 = math.sqrt(window - n)
    c2 = math.sqrt(min(t1, t2))
    e = math.e
    avg_bound = 2.0 * c2 * (2.0 + math.sqrt(n / (l - 1)) + e * math.sqrt(n + l) / l * c1) * gnorm
    avg_bound_power = (
        4.0
        * c2
        * (1.0 + 0.5 * math.sqrt(n / (l - 1)) + e * math.sqrt(n + l) / (2 * l) * c1)
        ** (1.0 / (2 * q + 1))
        * gnorm
    )
    dev_bound_el = None
    if l >= 4:
        dev_bound_el = (
            2.0
            * c2
            * (2.0 + 16.0 * math.sqrt(1.0 + n / (l - 1)) + 8.0 * math.sqrt(n + l) / (l + 1) * c1)
            * gnorm
        )
    dev_bound_ll = (
        c2 * (2.0 + 6.0 * math.sqrt((n + l) * l * math.log(l)) + 3.0 * math.sqrt(n + l) * c1) * gnorm
    )
    hankel_bound = math.sqrt(min(t1, t2 + 1)) * gnorm
    srft_bound = (1.0 + math.sqrt(1.0 + 7.0 * m * t2 / (l + n))) * 2.0 * c2 * gnorm
    factor_bound = math.sqrt(5.0 * n * avg_bound)
    transition_const = None
    transition_bound = None
    if sigma_min_L is not None:
        transition_const = 14.0 * math.sqrt(n) / sigma_min_L
        if hplus_norm is not None:
            transition_bound = transition_const * (
                math.sqrt(avg_bound / sigma_min_L) * (hplus_norm + hankel_bound) + hankel_bound
            )
    return BoundReport(
        n=n,
        l=l,
        q=q,
        p=p,
        m=m,
        t1=t1,
        t2=t2,
        gnorm=gnorm,
        tail_const=c1,
        split_const=c2,
        hankel_bound=hankel_bound,
        trunc_bound=2.0 * c2 * gnorm,
        avg_bound=avg_bound,
        avg_bound_power=avg_bound_power,
        dev_bound_ll=dev_bound_ll,
        srft_bound=srft_bound,
        factor_bound=factor_bound,
        dev_bound_el=dev_bound_el,
        transition_const=transition_const,
        transition_bound=transition_bound,
    )


def align_unitary(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Orthogonal S minimizing ||X - Y S||_F (orthogonal Procrustes).

    Raises NumericalError when Y^T X = 0 (no alignment information).
    """
    X = as_matrix(X, "X")
    Y = as_matrix(Y, "Y")
    if X.shape != Y.shape:
        raise ValueError(f"X and Y must have the same shape, got {X.shape} vs {Y.shape}")
    M = Y.T @ X
    if not M.any():
        raise NumericalError("alignment is degenerate: Y^T X is the zero matrix")
    F = svd(M)
    return F.U @ F.V.T


@dataclass(frozen=True)
class RealizationCheck:
    """Per-trial robustness verdict for a realized model.

    When ``applicable`` is False (truncation error beyond half the smallest
    retained singular value) every other numeric field is NaN and
    ``passed`` is False; failures of an applicable check are data, not
    errors.
    """

    applicable: bool
    trunc_err: float
    sigma_min_L: float
    c_err: float
    o_err: float
    b_err: float
    q_err: float
    a_err: float
    factor_rhs: float
    transition_rhs: float
    factor_c_ok: bool
    factor_b_ok: bool
    transition_ok: bool

    @property
    def passed(self) -> bool:
        return self.applicable and self.factor_c_ok and self.factor_b_ok and self.transition_ok


def realization_check(
    truth: RealizationResult, est: RealizationResult, report: BoundReport
) -> RealizationCheck:
    """Check the three factor-alignment inequalities for one trial.

    The expectation in each printed inequality is substituted with this
    trial's measured truncation error; Monte Carlo means over many trials
    are the caller's job.  The alignment unitary comes from Procrustes on
    the observability factors and is reused for all three checks.
    """
    n = truth.order
    if est.order != n:
        raise ValueError(f"order mismatch: truth n={n}, estimate n={est.order}")
    if report.n != n:
        raise ValueError(f"report is for n={report.n}, realizations have n={n}")
    if truth.O.shape != est.O.shape or truth.Q.shape != est.Q.shape:
        raise ValueError("realizations use different Hankel splits")

    sigma_min_L = float(truth.sing_values[n - 1])
    trunc_err = norms(truth.L - est.L).spectral
    if not trunc_err <= sigma_min_L / 2.0:
        nan = float("nan")
        return RealizationCheck(
            applicable=False,
            trunc_err=trunc_err,
            sigma_min_L=sigma_min_L,
            c_err=nan, o_err=nan, b_err=nan, q_err=nan, a_err=nan,
            factor_rhs=nan, transition_rhs=nan,
            factor_c_ok=False, factor_b_ok=False, transition_ok=False,
        )

    S = align_unitary(truth.O, est.O)
    c_err = float(np.linalg.norm(truth.ss.C - est.ss.C @ S))
    o_err = float(np.linalg.norm(truth.O - est.O @ S))
    b_err = float(np.linalg.norm(truth.ss.B - S.T @ est.ss.B))
    q_err = float(np.linalg.norm(truth.Q - S.T @ est.Q))
    a_err = float(np.linalg.norm(truth.ss.A - S.T @ est.ss.A @ S))
    factor_rhs = math.sqrt(5.0 * n * trunc_err)
    hplus_norm = norms(truth.hankel.Hplus).spectral
    hplus_err = norms(truth.hankel.Hplus - est.hankel.Hplus).spectral
    c3 = 14.0 * math.sqrt(n) / sigma_min_L
    transition_rhs = c3 * (
        math.sqrt(trunc_err / sigma_min_L) * (hplus_norm + hplus_err) + hplus_err
    )
    return RealizationCheck(
        applicable=True,
        trunc_err=trunc_err,
        sigma_min_L=sigma_min_L,
        c_err=c_err,
        o_err=o_err,
        b_err=b_err,
        q_err=q_err,
        a_err=a_err,
        factor_rhs=factor_rhs,
        transition_rhs=transition_rhs,
        factor_c_ok=bool(c_err <= o_err <= factor_rhs),
        factor_b_ok=bool(b_err <= q_err <= factor_rhs),
        transition_ok=bool(a_err <= transition_rhs),
    )


def _freq_response(ss: StateSpace, z: np.ndarray) -> np.ndarray:
    """Transfer function C (zI - A)^{-1} B + D on a batch of points z."""
    k = z.shape[0]
    eye = np.eye(ss.n)
    M = z[:, None, None] * eye - ss.A
    rhs = np.broadcast_to(ss.B.astype(complex), (k, ss.n, ss.m))
    X = np.linalg.solve(M, rhs)
    return ss.C @ X + ss.D


def _spectral_radius(A: np.ndarray) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(A)))) if A.size else 0.0


def hinf_error(truth: StateSpace, est: StateSpace, grid_points: int = DEFAULT_GRID) -> float:
    """Normalized worst-case frequency-response error on the unit circle.

    max_theta sigma_1(est(z) - truth(z)) / max_theta sigma_1(truth(z)) over
    z = exp(i theta) on a uniform grid.  Both systems must be Schur stable;
    the metric has no meaning otherwise.
    """
    if grid_points < 64:
        raise ValueError(f"grid_points must be at least 64, got {grid_points}")
    if (truth.m, truth.p) != (est.m, est.p):
        raise ValueError(
            f"input/output dims differ: ({truth.p},{truth.m}) vs ({est.p},{est.m})"
        )
    for name, ss in (("truth", truth), ("estimate", est)):
        rho = _spectral_radius(ss.A)
        if rho >= 1.0:
            raise NumericalError(f"unstable {name} system: spectral radius {rho:.6g} >= 1")
    theta = 2.0 * np.pi * np.arange(grid_points) / grid_points
    z = np.exp(1j * theta)
    num = 0.0
    den = 0.0
    for start in range(0, grid_points, _CHUNK):
        zc = z[start:start + _CHUNK]
        resp_truth = _freq_response(truth, zc)
        resp_est = _freq_response(est, zc)
        s_truth = np.linalg.svd(resp_truth, compute_uv=False)[:, 0]
        s_diff = np.linalg.svd(resp_est - resp_truth, compute_uv=False)[:, 0]
        den = max(den, float(s_truth.max()))
        num = max(num, float(s_diff.max()))
    if den == 0.0:
        raise NumericalError("reference transfer function is zero on the whole grid")
    return num / den
