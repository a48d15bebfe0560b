"""Sweeps over the number of jammers n and the jamming power P_j.

    python scripts/run_sweeps.py --config scripts/configs/desk.txt --out runs/sweeps
"""

import argparse
from pathlib import Path

from covert_rsvrg.experiments import ExperimentSpec, read_summary_csv, run_sweep_n, run_sweep_pj


def show(path):
    header, rows = read_summary_csv(path)
    print(path)
    print("  " + "  ".join(f"{h:>11}" for h in header))
    for r in rows:
        print("  " + "  ".join(f"{r[h]:>11.4f}" for h in header))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--config", default=str(Path(__file__).parent / "configs" / "desk.txt"))
    ap.add_argument("--out", default="runs/sweeps")
    ap.add_argument("--threads", type=int, default=4)
    args = ap.parse_args()
    out = Path(args.out)
    spec_n = ExperimentSpec.from_file(args.config, kind="sweep_n", threads=args.threads)
    show(run_sweep_n(spec_n, out / "n"))
    spec_pj = ExperimentSpec.from_file(args.config, kind="sweep_pj", threads=args.threads)
    path = run_sweep_pj(spec_pj, out / "pj")
    show(path)
    if spec_pj.pa_zero_row:
        show(path.with_name("sweep_pj_pa0.csv"))


if __name__ == "__main__":
    main()
