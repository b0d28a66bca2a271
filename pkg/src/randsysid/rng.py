"""Seeded random number generation.

All randomness in the package flows through Philox, a counter-based bit
generator, so that results are reproducible across runs and platforms and
sub-streams can be derived without correlation. A seed may be a plain int
or a tuple of ints; tuples are how the CLI and the bench harness derive
independent streams (system draw, data noise, sketching) from one user seed.
"""

from __future__ import annotations

import numpy as np

SeedLike = "int | tuple[int, ...] | np.random.SeedSequence"


def make_rng(seed) -> np.random.Generator:
    """Fresh Philox generator for the given seed (int, tuple of ints, or SeedSequence)."""
    if isinstance(seed, np.random.SeedSequence):
        ss = seed
    else:
        ss = np.random.SeedSequence(seed)
    return np.random.Generator(np.random.Philox(ss))


def spawn_rngs(seed, n: int) -> list[np.random.Generator]:
    """n independent generators derived from one seed; order-stable, scheduling-free."""
    if isinstance(seed, np.random.SeedSequence):
        ss = seed
    else:
        ss = np.random.SeedSequence(seed)
    return [np.random.Generator(np.random.Philox(child)) for child in ss.spawn(n)]
