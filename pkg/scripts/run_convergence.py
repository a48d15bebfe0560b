"""Convergence traces for each p at fixed n, then a short summary per trace.

    python scripts/run_convergence.py --config scripts/configs/desk.txt --out runs/convergence
"""

import argparse
import csv
from pathlib import Path

from covert_rsvrg.experiments import ExperimentSpec, run_convergence


def summarize(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    first, last = rows[0], rows[-1]
    ratio = float(last["grad_norm"]) / float(first["grad_norm"])
    print(f"{path.name}: iters={last['iter']} total {float(first['total']):.4f} -> {float(last['total']):.4f}, "
          f"grad_norm^2 ratio {ratio:.3e}")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--config", default=str(Path(__file__).parent / "configs" / "desk.txt"))
    ap.add_argument("--out", default="runs/convergence")
    ap.add_argument("--threads", type=int, default=3)
    args = ap.parse_args()
    spec = ExperimentSpec.from_file(args.config, kind="convergence", threads=args.threads)
    for path in run_convergence(spec, args.out):
        summarize(path)


if __name__ == "__main__":
    main()
