"""CSV file formats.

Four formats, all plain text, all round-trip exact (17 significant digits):

* matrix        ``# rows=<r> cols=<c>`` then r lines of c comma-separated values
* Markov blocks ``# p=<p> m=<m> T=<T>`` then the p x (T*m) matrix body
* state space   four matrix sections introduced by ``# A``, ``# B``, ``# C``, ``# D``
* dataset       ``# N=<N> T=<T> m=<m> p=<p>``, a column-name row, then one row
                per (rollout, t): ``rollout,t,u_1..u_m,y_1..y_p``

Readers raise FileFormatError with the 1-based offending line number.
No writer emits timestamps, so re-writing identical data is byte-identical.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import FileFormatError
from .hankel import MarkovParams
from .realize import StateSpace
from .sysid import RolloutDataset


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _matrix_lines(A: np.ndarray) -> list[str]:
    lines = [f"# rows={A.shape[0]} cols={A.shape[1]}"]
    lines.extend(",".join(_fmt(v) for v in row) for row in A)
    return lines


def _parse_header(path, lineno: int, line: str, keys: tuple[str, ...]) -> dict[str, int]:
    if not line.startswith("#"):
        raise FileFormatError(path, lineno, f"expected header '# {keys[0]}=...'")
    out = {}
    for tok in line[1:].split():
        if "=" not in tok:
            raise FileFormatError(path, lineno, f"bad header token {tok!r}")
        k, _, v = tok.partition("=")
        try:
            out[k] = int(v)
        except ValueError:
            raise FileFormatError(path, lineno, f"non-integer header value {tok!r}") from None
    missing = [k for k in keys if k not in out]
    if missing:
        raise FileFormatError(path, lineno, f"header missing {missing}")
    return out


def _parse_rows(path, lines, start: int, rows: int, cols: int) -> np.ndarray:
    A = np.empty((rows, cols))
    for i in range(rows):
        lineno = start + i
        if lineno > len(lines):
            raise FileFormatError(path, len(lines) + 1, f"expected {rows} data rows, file ended after {i}")
        parts = lines[lineno - 1].split(",")
        if len(parts) != cols:
            raise FileFormatError(path, lineno, f"expected {cols} values, got {len(parts)}")
        try:
            A[i] = [float(v) for v in parts]
        except ValueError as exc:
            raise FileFormatError(path, lineno, str(exc)) from None
        if not np.all(np.isfinite(A[i])):
            raise FileFormatError(path, lineno, "non-finite value")
    return A


def _read_lines(path) -> list[str]:
    return Path(path).read_text().splitlines()


def save_matrix(path, A: np.ndarray) -> None:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    Path(path).write_text("\n".join(_matrix_lines(A)) + "\n")


def load_matrix(path) -> np.ndarray:
    lines = _read_lines(path)
    if not lines:
        raise FileFormatError(path, 1, "empty file")
    hdr = _parse_header(path, 1, lines[0], ("rows", "cols"))
    A = _parse_rows(path, lines, 2, hdr["rows"], hdr["cols"])
    if len(lines) > 1 + hdr["rows"]:
        raise FileFormatError(path, 2 + hdr["rows"], "trailing content after data rows")
    return A


def save_markov(path, G: MarkovParams) -> None:
    lines = [f"# p={G.p} m={G.m} T={G.T}"]
    lines.extend(",".join(_fmt(v) for v in row) for row in G.flat)
    Path(path).write_text("\n".join(lines) + "\n")


def load_markov(path) -> MarkovParams:
    lines = _read_lines(path)
    if not lines:
        raise FileFormatError(path, 1, "empty file")
    hdr = _parse_header(path, 1, lines[0], ("p", "m", "T"))
    p, m, T = hdr["p"], hdr["m"], hdr["T"]
    flat = _parse_rows(path, lines, 2, p, T * m)
    return MarkovParams.from_flat(flat, m)


_SS_SECTIONS = ("A", "B", "C", "D")


def save_statespace(path, ss: StateSpace) -> None:
    lines: list[str] = []
    for name in _SS_SECTIONS:
        lines.append(f"# {name}")
        lines.extend(_matrix_lines(getattr(ss, name)))
    Path(path).write_text("\n".join(lines) + "\n")


def load_statespace(path) -> StateSpace:
    lines = _read_lines(path)
    mats = {}
    i = 0
    for name in _SS_SECTIONS:
        if i >= len(lines) or lines[i].strip() != f"# {name}":
            raise FileFormatError(path, i + 1, f"expected section marker '# {name}'")
        i += 1
        if i >= len(lines):
            raise FileFormatError(path, i + 1, f"missing matrix header for section {name}")
        hdr = _parse_header(path, i + 1, lines[i], ("rows", "cols"))
        mats[name] = _parse_rows(path, lines, i + 2, hdr["rows"], hdr["cols"])
        i += 1 + hdr["rows"]
    if i < len(lines):
        raise FileFormatError(path, i + 1, "trailing content after the D section")
    return StateSpace(A=mats["A"], B=mats["B"], C=mats["C"], D=mats["D"])


def save_dataset(path, data: RolloutDataset) -> None:
    N, T, m, p = data.N, data.T, data.m, data.p
    lines = [f"# N={N} T={T} m={m} p={p}"]
    names = ["rollout", "t"]
    names += [f"u_{j + 1}" for j in range(m)]
    names += [f"y_{j + 1}" for j in range(p)]
    lines.append(",".join(names))
    for i in range(N):
        for t in range(T):
            vals = [str(i), str(t)]
            vals += [_fmt(v) for v in data.inputs[i, t]]
            vals += [_fmt(v) for v in data.outputs[i, t]]
            lines.append(",".join(vals))
    Path(path).write_text("\n".join(lines) + "\n")


def load_dataset(path) -> RolloutDataset:
    lines = _read_lines(path)
    if not lines:
        raise FileFormatError(path, 1, "empty file")
    hdr = _parse_header(path, 1, lines[0], ("N", "T", "m", "p"))
    N, T, m, p = hdr["N"], hdr["T"], hdr["m"], hdr["p"]
    if len(lines) < 2:
        raise FileFormatError(path, 2, "missing column-name row")
    ncols = 2 + m + p
    inputs = np.zeros((N, T, m))
    outputs = np.zeros((N, T, p))
    seen = np.zeros((N, T), dtype=bool)
    for lineno in range(3, 3 + N * T):
        if lineno > len(lines):
            raise FileFormatError(path, len(lines) + 1, f"expected {N * T} data rows")
        parts = lines[lineno - 1].split(",")
        if len(parts) != ncols:
            raise FileFormatError(path, lineno, f"expected {ncols} values, got {len(parts)}")
        try:
            i, t = int(parts[0]), int(parts[1])
            vals = [float(v) for v in parts[2:]]
        except ValueError as exc:
            raise FileFormatError(path, lineno, str(exc)) from None
        if not (0 <= i < N and 0 <= t < T):
            raise FileFormatError(path, lineno, f"rollout/t index ({i},{t}) out of range")
        if seen[i, t]:
            raise FileFormatError(path, lineno, f"duplicate row for rollout {i}, t={t}")
        seen[i, t] = True
        inputs[i, t] = vals[:m]
        outputs[i, t] = vals[m:]
    if len(lines) > 2 + N * T:
        raise FileFormatError(path, 3 + N * T, "trailing content after data rows")
    if not seen.all():
        raise FileFormatError(path, len(lines) + 1, "missing (rollout, t) rows")
    return RolloutDataset(inputs=inputs, outputs=outputs)
