"""Randomized and deterministic state-space realization from Markov parameters.

The package has three layers:

* dense kernels and sketches: :mod:`randsysid.linalg`, :mod:`randsysid.sketch`
* system identification: :mod:`randsysid.hankel`, :mod:`randsysid.realize`,
  :mod:`randsysid.sysid`
* analysis and tooling: :mod:`randsysid.bounds`, :mod:`randsysid.bench`,
  :mod:`randsysid.matio`, :mod:`randsysid.cli`

Everything is deterministic given a seed; random streams use the Philox
counter-based generator throughout.
"""

from .bench import BenchConfig, Experiment, parse_bench_config, run_bench
from .bounds import (
    BoundReport,
    PerturbationBounds,
    RealizationCheck,
    align_unitary,
    hinf_error,
    perturbation_bounds,
    realization_check,
    stochastic_bounds,
)
from .errors import FileFormatError, NumericalError
from .hankel import HankelPair, MarkovParams, build_hankel, default_split, markov_from_ss
from .linalg import MatrixNorms, SvdFactors, norms, orth, pinv, spectral_norm, svd, truncate
from .matio import (
    load_dataset,
    load_markov,
    load_matrix,
    load_statespace,
    save_dataset,
    save_markov,
    save_matrix,
    save_statespace,
)
from .realize import HoKalman, RealizationResult, StateSpace, ho_kalman, suggest_order
from .rng import make_rng, spawn_rngs
from .sketch import (
    RandomizedSVD,
    RsvdConfig,
    adaptive_range_finder,
    basis_error_bound,
    gaussian_test_matrix,
    range_finder,
    rsvd,
    srft_basis_bound,
    srft_test_matrix,
    test_matrix,
)
from .sysid import (
    MarkovLeastSquares,
    RolloutDataset,
    estimate_markov,
    random_system,
    run_rollout,
    simulate_rollouts,
    toeplitz_inputs,
)

__version__ = "0.1.0"

__all__ = [
    "BenchConfig",
    "BoundReport",
    "Experiment",
    "FileFormatError",
    "HankelPair",
    "HoKalman",
    "MarkovLeastSquares",
    "MarkovParams",
    "MatrixNorms",
    "NumericalError",
    "PerturbationBounds",
    "RandomizedSVD",
    "RealizationCheck",
    "RealizationResult",
    "RolloutDataset",
    "RsvdConfig",
    "StateSpace",
    "SvdFactors",
    "adaptive_range_finder",
    "align_unitary",
    "basis_error_bound",
    "build_hankel",
    "default_split",
    "estimate_markov",
    "gaussian_test_matrix",
    "hinf_error",
    "ho_kalman",
    "load_dataset",
    "load_markov",
    "load_matrix",
    "load_statespace",
    "make_rng",
    "markov_from_ss",
    "norms",
    "orth",
    "parse_bench_config",
    "perturbation_bounds",
    "pinv",
    "random_system",
    "range_finder",
    "realization_check",
    "rsvd",
    "run_bench",
    "run_rollout",
    "save_dataset",
    "save_markov",
    "save_matrix",
    "save_statespace",
    "simulate_rollouts",
    "spawn_rngs",
    "spectral_norm",
    "srft_basis_bound",
    "srft_test_matrix",
    "stochastic_bounds",
    "suggest_order",
    "svd",
    "test_matrix",
    "toeplitz_inputs",
    "truncate",
    "__version__",
]
