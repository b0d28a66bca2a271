"""Benchmark harness: seeded experiment sweeps written as plot-ready CSV.

A config file is flat ``key=value`` text with one ``[experiment]`` section
per row family; keys before the first section set defaults for every
experiment.  Duplicate section names are expected (they are anonymous), so
this is deliberately not an INI dialect.

Each (experiment, mode, l, q, trial) combination yields one CSV row; after
the trials of a combination an aggregate row with ``trial=mean`` follows.
Deterministic mode is skipped with a ``time_s=inf`` marker whenever the
projected dense-SVD workload exceeds ``det_flop_cap``.

Reruns with the same config are byte-identical except the ``time_s``
column; nothing else in a row depends on the clock.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bounds import DEFAULT_GRID, hinf_error, stochastic_bounds
from .errors import FileFormatError, NumericalError
from .hankel import MarkovParams, build_hankel, default_split, markov_from_ss
from .linalg import norms
from .matio import _fmt
from .realize import ho_kalman
from .rng import make_rng
from .sketch import KINDS, RsvdConfig
from .sysid import estimate_markov, random_system, simulate_rollouts

DET_FLOP_CAP = 5e12
ERR_L_MAX_ENTRIES = 4_000_000

COLUMNS = (
    "example", "n", "m", "p", "T",
    "dimHminus_rows", "dimHminus_cols",
    "mode", "l", "q", "seed", "time_s", "err_hinf", "err_markov",
    "trial", "gnorm", "err_L",
    "hankel_bound", "trunc_bound",
    "avg_bound", "avg_bound_power", "dev_bound_el", "dev_bound_ll", "srft_bound",
)


@dataclass(frozen=True)
class Experiment:
    """One experiment row family: a system geometry plus its sweeps."""

    name: str
    n: int
    m: int
    p: int
    T: int
    N: int = 5
    sigma_u: float = 1.0
    sigma_w: float = 1.0
    sigma_v: float = 0.5
    modes: tuple[str, ...] = ("det", "rsvd")
    l_sweep: tuple[int, ...] = (10,)
    q_sweep: tuple[int, ...] = (1,)
    trials: int = 5
    seed: int = 0
    ghat: str = "ols"
    kind: str = "gaussian"
    grid: int = DEFAULT_GRID

    def __post_init__(self):
        t1, t2 = default_split(self.T)
        if self.n > min(t1, t2):
            raise ValueError(
                f"experiment {self.name!r}: order n={self.n} exceeds min(t1,t2)="
                f"{min(t1, t2)} under the default split of T={self.T}"
            )
        for mode in self.modes:
            if mode not in ("det", "rsvd"):
                raise ValueError(f"experiment {self.name!r}: unknown mode {mode!r}")
        if not self.modes:
            raise ValueError(f"experiment {self.name!r}: empty mode list")
        if self.kind not in KINDS:
            raise ValueError(f"experiment {self.name!r}: unknown test-matrix kind {self.kind!r}")
        window = min(self.p * t1, self.m * t2)
        if "rsvd" in self.modes:
            for l in self.l_sweep:
                if l < 1:
                    raise ValueError(f"experiment {self.name!r}: oversampling must be >= 1")
                if self.n + l > window:
                    raise ValueError(
                        f"experiment {self.name!r}: n+l={self.n + l} exceeds the sketch "
                        f"window min(p*t1, m*t2)={window}"
                    )
            for q in self.q_sweep:
                if q < 0:
                    raise ValueError(f"experiment {self.name!r}: power q must be >= 0")
        _parse_ghat(self.ghat, self.name)
        if self.ghat == "ols" and self.N < self.m:
            raise ValueError(
                f"experiment {self.name!r}: least-squares estimation needs at least "
                f"m={self.m} rollouts, got N={self.N}"
            )
        if self.trials < 1:
            raise ValueError(f"experiment {self.name!r}: trials must be >= 1")

    @property
    def split(self) -> tuple[int, int]:
        return default_split(self.T)


@dataclass(frozen=True)
class BenchConfig:
    experiments: tuple[Experiment, ...]
    det_flop_cap: float = DET_FLOP_CAP


def _parse_ghat(spec: str, name: str) -> float | None:
    """Validate a ghat source; returns the perturbation size or None."""
    if spec in ("ols", "true"):
        return None
    head, sep, tail = spec.partition(":")
    if head == "perturb" and sep:
        try:
            eps = float(tail)
        except ValueError:
            eps = -1.0
        if eps > 0:
            return eps
    raise ValueError(
        f"experiment {name!r}: ghat must be 'ols', 'true', or 'perturb:<eps>', got {spec!r}"
    )


_INT_KEYS = ("n", "m", "p", "T", "N", "trials", "seed", "grid")
_FLOAT_KEYS = ("sigma_u", "sigma_w", "sigma_v")
_STR_KEYS = ("name", "ghat", "kind")
_LIST_KEYS = ("modes", "l", "q")
_TOP_KEYS = ("det_flop_cap",)
_ALL_KEYS = _INT_KEYS + _FLOAT_KEYS + _STR_KEYS + _LIST_KEYS


def _convert(path, key: str, value: str, lineno: int):
    try:
        if key in _INT_KEYS:
            return int(value)
        if key in _FLOAT_KEYS or key in _TOP_KEYS:
            return float(value)
        if key == "modes":
            return tuple(part.strip() for part in value.split(",") if part.strip())
        if key in ("l", "q"):
            return tuple(int(part) for part in value.split(",") if part.strip())
        return value
    except ValueError:
        raise FileFormatError(path, lineno, f"bad value for {key!r}: {value!r}") from None


def parse_bench_config(path) -> BenchConfig:
    """Parse a benchmark config file; see the module docstring for the format."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FileFormatError(path, 1, f"cannot read config: {exc}") from None
    defaults: dict[str, object] = {}
    sections: list[dict[str, object]] = []
    current = defaults
    top = {"det_flop_cap": DET_FLOP_CAP}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line == "[experiment]":
            sections.append({})
            current = sections[-1]
            continue
        if line.startswith("["):
            raise FileFormatError(path, lineno, f"unknown section {line!r}")
        key, sep, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not sep or not key:
            raise FileFormatError(path, lineno, f"expected key=value, got {raw!r}")
        if key in _TOP_KEYS:
            if current is not defaults:
                raise FileFormatError(path, lineno, f"{key!r} is a top-level key")
            top[key] = _convert(path, key, value, lineno)
            continue
        if key not in _ALL_KEYS:
            raise FileFormatError(path, lineno, f"unknown key {key!r}")
        if key in current:
            raise FileFormatError(path, lineno, f"duplicate key {key!r}")
        current[key] = _convert(path, key, value, lineno)
    if not sections:
        raise FileFormatError(path, len(text.splitlines()) + 1, "config has no [experiment] section")

    experiments = []
    for index, section in enumerate(sections):
        merged = dict(defaults)
        merged.update(section)
        merged.setdefault("name", str(index + 1))
        for key in ("n", "m", "p", "T"):
            if key not in merged:
                raise FileFormatError(path, 1, f"experiment {index + 1}: missing key {key!r}")
        kwargs = {
            "name": merged["name"],
            "n": merged["n"], "m": merged["m"], "p": merged["p"], "T": merged["T"],
        }
        for key, field in (("N", "N"), ("sigma_u", "sigma_u"), ("sigma_w", "sigma_w"),
                           ("sigma_v", "sigma_v"), ("modes", "modes"), ("l", "l_sweep"),
                           ("q", "q_sweep"), ("trials", "trials"), ("seed", "seed"),
                           ("ghat", "ghat"), ("kind", "kind"), ("grid", "grid")):
            if key in merged:
                kwargs[field] = merged[key]
        try:
            experiments.append(Experiment(**kwargs))
        except ValueError as exc:
            raise FileFormatError(path, 1, str(exc)) from None
    return BenchConfig(experiments=tuple(experiments), det_flop_cap=top["det_flop_cap"])


def parse_bounds_config(path) -> dict:
    """Parse a flat key=value config for the bound-report command."""
    ints = ("n", "l", "q", "p", "m", "t1", "t2")
    floats = ("gnorm", "sigma_min_L", "hplus_norm")
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FileFormatError(path, 1, f"cannot read config: {exc}") from None
    out: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not sep or not key:
            raise FileFormatError(path, lineno, f"expected key=value, got {raw!r}")
        if key in out:
            raise FileFormatError(path, lineno, f"duplicate key {key!r}")
        if key not in ints and key not in floats:
            raise FileFormatError(path, lineno, f"unknown key {key!r}")
        try:
            out[key] = int(value) if key in ints else float(value)
        except ValueError:
            raise FileFormatError(path, lineno, f"bad value for {key!r}: {value!r}") from None
    missing = [key for key in ints + ("gnorm",) if key not in out]
    if missing:
        raise FileFormatError(path, len(text.splitlines()) + 1, f"missing keys: {missing}")
    return out


def _markov_error(G_true: MarkovParams, ss, T: int) -> float:
    realized = markov_from_ss(ss, T)
    denom = float(np.linalg.norm(G_true.flat))
    if denom == 0.0:
        return float("nan")
    return float(np.linalg.norm(realized.flat - G_true.flat)) / denom


def _make_ghat(exp: Experiment, system, G_true: MarkovParams, s: int):
    """Markov estimate per the experiment's ghat source, plus its error norm."""
    if exp.ghat == "true":
        return G_true, 0.0
    if exp.ghat == "ols":
        data = simulate_rollouts(
            system, exp.N, exp.T, exp.sigma_u, exp.sigma_w, exp.sigma_v, seed=(s, 1)
        )
        G_hat = estimate_markov(data)
        return G_hat, norms(G_true.flat - G_hat.flat).spectral
    eps = _parse_ghat(exp.ghat, exp.name)
    rng = make_rng((s, 1))
    E = rng.standard_normal(G_true.flat.shape)
    E *= eps / norms(E).spectral
    flat_hat = G_true.flat + E
    return MarkovParams.from_flat(flat_hat, exp.m), norms(flat_hat - G_true.flat).spectral


def _base_row(exp: Experiment, mode: str, l: int, q: int) -> dict:
    t1, t2 = exp.split
    return {
        "example": exp.name, "n": exp.n, "m": exp.m, "p": exp.p, "T": exp.T,
        "dimHminus_rows": exp.p * t1, "dimHminus_cols": exp.m * t2,
        "mode": mode, "l": l, "q": q,
        **{key: None for key in COLUMNS[10:]},
    }


def _trial_rows(exp: Experiment, det_flop_cap: float, trial: int) -> dict:
    """All rows of one trial, keyed by (mode, l, q)."""
    t1, t2 = exp.split
    s = exp.seed + trial
    system = random_system(exp.n, exp.m, exp.p, seed=(s, 0))
    G_true = markov_from_ss(system, exp.T)
    G_hat, gnorm = _make_ghat(exp, system, G_true, s)
    small = (exp.p * t1) * (exp.m * t2) <= ERR_L_MAX_ENTRIES
    Hminus_true = build_hankel(G_true, t1, t2).Hminus if small else None

    hankel_bound = math.sqrt(min(t1, t2 + 1)) * gnorm
    trunc_bound = 2.0 * math.sqrt(min(t1, t2)) * gnorm
    window = min(exp.p * t1, exp.m * t2)

    rows: dict[tuple, dict] = {}
    for mode, l, q in _combos(exp):
        row = _base_row(exp, mode, l, q)
        row.update(trial=trial, seed=s, gnorm=gnorm,
                   hankel_bound=hankel_bound, trunc_bound=trunc_bound)
        if mode == "rsvd" and l >= 2 and exp.n + l <= window:
            report = stochastic_bounds(exp.n, l, q, exp.p, exp.m, t1, t2, gnorm)
            row.update(avg_bound=report.avg_bound, avg_bound_power=report.avg_bound_power,
                       dev_bound_el=report.dev_bound_el, dev_bound_ll=report.dev_bound_ll,
                       srft_bound=report.srft_bound)
        if mode == "det":
            rdim, cdim = exp.p * t1, exp.m * t2
            if 4.0 * rdim * cdim * min(rdim, cdim) > det_flop_cap:
                row["time_s"] = float("inf")
                rows[(mode, l, q)] = row
                continue
            result = ho_kalman(G_hat, exp.n, t1, t2, mode="det")
        else:
            # stabilized kicks in only for q >= 2, where the plain power pass
            # would flatten small singular directions below the rank cutoff
            cfg = RsvdConfig(rank=exp.n, oversample=l, power=q, kind=exp.kind,
                             seed=(s, 2), stabilized=True)
            result = ho_kalman(G_hat, exp.n, t1, t2, mode="rsvd", cfg=cfg)
        row["time_s"] = result.seconds
        row["err_markov"] = _markov_error(G_true, result.ss, exp.T)
        try:
            row["err_hinf"] = hinf_error(system, result.ss, exp.grid)
        except NumericalError:
            row["err_hinf"] = float("nan")
        if Hminus_true is not None:
            row["err_L"] = norms(Hminus_true - result.L).spectral
        rows[(mode, l, q)] = row
    return rows


def _combos(exp: Experiment):
    for mode in exp.modes:
        if mode == "det":
            yield ("det", 0, 0)
        else:
            for l in exp.l_sweep:
                for q in exp.q_sweep:
                    yield ("rsvd", l, q)


def _mean_row(group: list[dict]) -> dict:
    out = dict(group[0])
    out["seed"] = None
    out["trial"] = "mean"
    for key in ("time_s", "err_hinf", "err_markov", "gnorm", "err_L",
                "hankel_bound", "trunc_bound", "avg_bound", "avg_bound_power",
                "dev_bound_el", "dev_bound_ll", "srft_bound"):
        values = [row[key] for row in group if row[key] is not None]
        out[key] = math.fsum(values) / len(values) if values else None
    return out


def run_bench(config: BenchConfig, out_path, parallel: bool = False) -> list[dict]:
    """Run every experiment and write the results CSV; returns the rows."""
    rows: list[dict] = []
    for exp in config.experiments:
        if parallel and exp.trials > 1:
            with ThreadPoolExecutor() as pool:
                per_trial = list(
                    pool.map(lambda j: _trial_rows(exp, config.det_flop_cap, j),
                             range(exp.trials))
                )
        else:
            per_trial = [_trial_rows(exp, config.det_flop_cap, j) for j in range(exp.trials)]
        for key in _combos(exp):
            group = [per_trial[j][key] for j in range(exp.trials)]
            rows.extend(group)
            rows.append(_mean_row(group))
    _write_csv(out_path, rows)
    return rows


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(value)
    return _fmt(float(value))


def _write_csv(path, rows: list[dict]) -> None:
    lines = [",".join(COLUMNS)]
    lines += [",".join(_cell(row[col]) for col in COLUMNS) for row in rows]
    Path(path).write_text("\n".join(lines) + "\n")
