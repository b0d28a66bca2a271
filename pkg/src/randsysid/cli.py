"""Command-line front end.

Five subcommands: simulate, estimate, realize, bench, bounds.  Exit codes:
0 success, 1 usage or file-format problems, 2 numerical failures.
"""

from __future__ import annotations

import argparse
import sys

from .bench import parse_bench_config, parse_bounds_config, run_bench
from .bounds import stochastic_bounds
from .errors import FileFormatError, NumericalError
from .matio import _fmt, load_dataset, load_markov, save_dataset, save_markov, save_statespace
from .realize import MODES, ho_kalman
from .sketch import KINDS, RsvdConfig
from .sysid import estimate_markov, random_system, simulate_rollouts

_SPECTRUM_CAP = 64


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad flags; we reserve 2 for numerics."""

    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="randsysid", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", help="simulate rollouts of a seeded random system")
    sim.add_argument("--n", type=int, required=True, help="state dimension")
    sim.add_argument("--m", type=int, required=True, help="input dimension")
    sim.add_argument("--p", type=int, required=True, help="output dimension")
    sim.add_argument("--T", type=int, required=True, help="rollout horizon")
    sim.add_argument("--N", type=int, required=True, help="number of rollouts")
    sim.add_argument("--sigma-u", type=float, default=1.0, help="input std (default 1)")
    sim.add_argument("--sigma-w", type=float, default=0.0, help="process noise std (default 0)")
    sim.add_argument("--sigma-v", type=float, default=0.0, help="measurement noise std (default 0)")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out", required=True, help="dataset CSV path")
    sim.add_argument("--system-out", help="optionally save the true system here")
    sim.set_defaults(func=cmd_simulate)

    est = sub.add_parser("estimate", help="least-squares Markov parameters from a dataset")
    est.add_argument("--data", required=True, help="dataset CSV from simulate")
    est.add_argument("--out", required=True, help="Markov CSV path")
    est.set_defaults(func=cmd_estimate)

    rea = sub.add_parser("realize", help="state-space realization from Markov parameters")
    rea.add_argument("--markov", required=True, help="Markov CSV path")
    rea.add_argument("--order", type=int, required=True, help="model order n")
    rea.add_argument("--t1", type=int, help="Hankel row horizon (default split)")
    rea.add_argument("--t2", type=int, help="Hankel column horizon (default split)")
    rea.add_argument("--mode", choices=MODES, default="det")
    rea.add_argument("--oversample", type=int, default=10, help="sketch oversampling l")
    rea.add_argument("--power", type=int, default=0, help="power passes q")
    rea.add_argument("--test-matrix", choices=KINDS, default="gaussian")
    rea.add_argument("--seed", type=int, default=0)
    rea.add_argument("--out", required=True, help="state-space CSV path")
    rea.set_defaults(func=cmd_realize)

    ben = sub.add_parser("bench", help="run a benchmark config, write a results CSV")
    ben.add_argument("--config", required=True)
    ben.add_argument("--out", required=True)
    ben.add_argument("--parallel", action="store_true", help="parallelize across trials")
    ben.set_defaults(func=cmd_bench)

    bou = sub.add_parser("bounds", help="evaluate every bound for one configuration")
    bou.add_argument("--config", required=True, help="flat key=value config")
    bou.add_argument("--out", required=True, help="report path (key=value text)")
    bou.set_defaults(func=cmd_bounds)
    return parser


def cmd_simulate(args) -> int:
    system = random_system(args.n, args.m, args.p, seed=(args.seed, 0))
    data = simulate_rollouts(
        system, args.N, args.T,
        sigma_u=args.sigma_u, sigma_w=args.sigma_w, sigma_v=args.sigma_v,
        seed=(args.seed, 1),
    )
    save_dataset(args.out, data)
    if args.system_out:
        save_statespace(args.system_out, system)
    return 0


def cmd_estimate(args) -> int:
    data = load_dataset(args.data)
    save_markov(args.out, estimate_markov(data))
    return 0


def cmd_realize(args) -> int:
    G_hat = load_markov(args.markov)
    cfg = None
    if args.mode == "rsvd":
        cfg = RsvdConfig(
            rank=args.order, oversample=args.oversample, power=args.power,
            kind=args.test_matrix, seed=args.seed, stabilized=True,
        )
    result = ho_kalman(G_hat, args.order, args.t1, args.t2, mode=args.mode, cfg=cfg)
    save_statespace(args.out, result.ss)
    t1, t2 = result.hankel.t1, result.hankel.t2
    print(f"mode={result.mode} order={result.order} t1={t1} t2={t2} time_s={_fmt(result.seconds)}")
    shown = [_fmt(v) for v in result.sing_values[:_SPECTRUM_CAP]]
    if result.sing_values.size > _SPECTRUM_CAP:
        shown.append("...")
    print("sigma_spectrum=" + ",".join(shown))
    return 0


def cmd_bench(args) -> int:
    config = parse_bench_config(args.config)
    run_bench(config, args.out, parallel=args.parallel)
    return 0


def cmd_bounds(args) -> int:
    kwargs = parse_bounds_config(args.config)
    report = stochastic_bounds(**kwargs)
    with open(args.out, "w") as fh:
        fh.write(report.to_text())
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except FileFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())
