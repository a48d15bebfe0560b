"""Command-line entry point.

Exit codes: 0 success, 1 validation error, 2 numerical failure.
"""

import argparse
import logging
import sys

from .channels import ConfigError, read_kv
from .experiments import ExperimentSpec, run_convergence, run_sweep_n, run_sweep_pj
from .optim import NumericalFailure
from .selftest import run_selftest
from .stiefel import DecompositionError, DimensionError, NoSolutionError

COMMANDS = {
    "convergence": ("convergence", run_convergence),
    "sweep-n": ("sweep_n", run_sweep_n),
    "sweep-pj": ("sweep_pj", run_sweep_pj),
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="covert-rsvrg",
        description="AN basis design for multi-jammer covert communication via R-SVRG.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="key=value configuration file (e.g. a manifest.txt)")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, help="master seed (dataset, init, sampling)")
        p.add_argument("--threads", type=int, help="parallel scenario jobs")
        p.add_argument("--variant", choices=["rsvrg", "rsgd", "rgd"])
    st = sub.add_parser("geometry-selftest")
    st.add_argument("--seed", type=int, default=0)
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def load_spec(args, kind):
    kv = read_kv(args.config) if args.config else {}
    kv["kind"] = kind
    if args.seed is not None:
        kv["seed"] = str(args.seed)
    if args.threads is not None:
        kv["threads"] = str(args.threads)
    if args.variant is not None:
        kv["variant"] = args.variant
    return ExperimentSpec.from_kv(kv)


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    if args.command == "geometry-selftest":
        return 0 if run_selftest(args.seed) else 2
    kind, fn = COMMANDS[args.command]
    try:
        spec = load_spec(args, kind)
        result = fn(spec, args.out)
    except (ConfigError, DimensionError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (NumericalFailure, DecompositionError, NoSolutionError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if isinstance(result, list):
        for path in result:
            print(path)
    else:
        print(result)
    return 0


if __name__ == "__main__":
    sys.exit(main())
