"""Exception types shared across the package.

Two failure families matter to callers: bad input (files, flags,
dimensions), which maps to exit code 1 in the CLI, and numerical
failure discovered while computing, which maps to exit code 2.
"""

from __future__ import annotations


class NumericalError(RuntimeError):
    """A computation failed numerically (non-convergence, rank collapse, instability).

    ``iterations`` records how many iterations ran before giving up, when the
    failing kernel is iterative; None otherwise.
    """

    def __init__(self, message: str, iterations: int | None = None):
        super().__init__(message)
        self.iterations = iterations


class FileFormatError(ValueError):
    """A data file violates its format. Carries the 1-based offending line number."""

    def __init__(self, path, line: int, message: str):
        super().__init__(f"{path}: line {line}: {message}")
        self.path = str(path)
        self.line = line
