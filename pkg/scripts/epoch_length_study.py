"""Gradient-norm decay of R-SVRG against epoch length and baselines.

Runs the desk instance for a fixed inner-iteration budget and prints the
final and smallest ||grad f||^2 relative to the start for several epoch
lengths m_l, plus R-SGD and RGD for reference.

    python scripts/epoch_length_study.py --budget 2000 --seeds 0 1 2
"""

import argparse
from dataclasses import replace

import numpy as np

from covert_rsvrg.channels import SystemConfig, sample_dataset
from covert_rsvrg.optim import OptimizerOptions, run
from covert_rsvrg.stiefel import random_point


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--budget", type=int, default=2000)
    ap.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    ap.add_argument("--m-l", type=int, nargs="+", default=[5000, 1000, 200])
    args = ap.parse_args()
    cfg = SystemConfig().materialize()
    base = OptimizerOptions(max_epochs=10**6, max_iters=args.budget, log_every=10, grad_tol=0.0)
    settings = [("rsvrg", m) for m in args.m_l] + [("rsgd", cfg.T), ("rgd", args.budget)]
    print(f"{'variant':>8} {'m_l':>6} {'seed':>5} {'final':>10} {'min':>10} {'argmin':>7}")
    for variant, m_l in settings:
        for seed in args.seeds:
            ds = sample_dataset(cfg, seed)
            opts = replace(base, variant=variant, m_l=m_l, seed=seed)
            g = run((ds, cfg), random_point(cfg.n, cfg.p, seed), opts)
            r = g.grad_norm2 / g.grad_norm2[0]
            k = int(np.argmin(r))
            print(f"{variant:>8} {m_l:>6} {seed:>5} {r[-1]:>10.2e} {r[k]:>10.2e} {g.k1[k]:>7}")


if __name__ == "__main__":
    main()
