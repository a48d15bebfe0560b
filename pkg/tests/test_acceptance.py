"""Acceptance criteria, one test each, with one PASS/FAIL line per criterion.

The lines are collected in RESULTS and printed in the pytest terminal
summary (see conftest.py). Running this file directly prints them as well.
"""

from dataclasses import replace

import numpy as np

from covert_rsvrg import stiefel as st
from covert_rsvrg.channels import SystemConfig, sample_dataset, simulate_willie
from covert_rsvrg.experiments import ExperimentSpec, read_summary_csv, run_sweep_n, run_sweep_pj
from covert_rsvrg.objective import euclidean_grad_full, objective_full, variances
from covert_rsvrg.optim import (
    OptimizerOptions,
    riemannian_full_gradient,
    run,
    svrg_gradient,
    variance_reduction_ratio,
)
from covert_rsvrg.rng import complex_normal

RESULTS = {}

DESK = SystemConfig(n=18, p=6, T=1000)
DESK_OPTS = OptimizerOptions(alpha0=1e-3, lambda_decay=20.0, m_l=5 * DESK.T, grad_tol=0.0, seed=0)


def report(number, title, ok, detail):
    line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
    RESULTS[number] = line
    print(line)
    assert ok, line


def crandn(rng, shape):
    return complex_normal(rng, shape)


def test_criterion_1_geometry():
    worst = dict(tangency=0.0, idempotence=0.0, retraction=0.0, rigidity=0.0, transport=0.0, real_lift=0.0, roundtrip=0.0)
    for seed, (n, p) in enumerate([(1, 1), (3, 1), (4, 2), (6, 6), (8, 4), (18, 6), (9, 5)] * 3):
        rng = np.random.default_rng(seed)
        x = st.random_point(n, p, seed)
        xi = st.tangent_project(x, crandn(rng, (n, p)))
        eta = st.tangent_project(x, crandn(rng, (n, p)))
        worst["tangency"] = max(worst["tangency"], st.tangency_residual(x, xi))
        worst["idempotence"] = max(worst["idempotence"], float(np.linalg.norm(st.tangent_project(x, xi) - xi)))
        y = st.retract(x, xi)
        worst["retraction"] = max(worst["retraction"], st.check_feasibility(y))
        unit = xi / st.norm(xi)
        t = 1e-6
        worst["rigidity"] = max(worst["rigidity"], float(np.linalg.norm((st.retract(x, t * unit) - x) / t - unit)))
        a, b = rng.standard_normal(2)
        lin = st.transport(y, a * xi + b * eta) - a * st.transport(y, xi) - b * st.transport(y, eta)
        worst["transport"] = max(worst["transport"], float(np.linalg.norm(lin)), st.tangency_residual(y, st.transport(y, eta)))
        xb = st.real_representation(x)
        worst["real_lift"] = max(worst["real_lift"], float(np.linalg.norm(xb.T @ xb - np.eye(2 * p))))
        small = 0.5 * rng.uniform() * unit
        target = st.retract(x, small)
        worst["roundtrip"] = max(
            worst["roundtrip"], float(np.linalg.norm(st.retract(x, st.inverse_retract(x, target)) - target))
        )
    limits = dict(tangency=1e-10, idempotence=1e-12, retraction=1e-10, rigidity=1e-4, transport=1e-12, real_lift=1e-10,
                  roundtrip=1e-8)
    ok = all(worst[k] < limits[k] for k in limits)
    detail = ", ".join(f"{k} {worst[k]:.1e}<{limits[k]:.0e}" for k in limits)
    report(1, "geometry suite", ok, detail)


def test_criterion_2_gradients():
    worst = 0.0
    for n, p in [(4, 2), (8, 4), (18, 6)]:
        rng = np.random.default_rng(n)
        cfg = SystemConfig(n=n, p=p, T=25, mu=2.0, Pa_dbm=3.0, Pj_dbm=0.0).materialize()
        ds = sample_dataset(cfg, n)
        x = st.random_point(n, p, n)
        grad = euclidean_grad_full(x, ds, cfg)
        h = 1e-6
        for _ in range(20):
            d = crandn(rng, (n, p))
            fd = (objective_full(x + h * d, ds, cfg).total - objective_full(x - h * d, ds, cfg).total) / (2 * h)
            an = float(np.real(np.vdot(grad, d)))
            worst = max(worst, abs(fd - an) / max(abs(an), 1e-12))
    report(2, "Euclidean gradient vs central differences", worst < 1e-5, f"max relative error {worst:.2e} < 1e-5")


def test_criterion_3_estimator_identity():
    cfg = SystemConfig(n=8, p=4, T=32).materialize()
    ds = sample_dataset(cfg, 0)
    rng = np.random.default_rng(0)
    anchor = st.random_point(8, 4, 0)
    xi = st.tangent_project(anchor, crandn(rng, (8, 4)))
    cur = st.retract(anchor, 0.3 * xi / st.norm(xi))
    full_anchor = riemannian_full_gradient(anchor, ds, cfg)
    avg = np.mean([svrg_gradient(cur, anchor, t, ds, cfg, full_anchor) for t in range(1, 33)], axis=0)
    err = float(np.max(np.abs(avg - riemannian_full_gradient(cur, ds, cfg))))
    report(3, "variance-reduced estimator averages to the full gradient", err < 1e-12, f"max abs error {err:.1e} < 1e-12")


def test_criterion_4_willie_monte_carlo():
    worst_rel, worst_gap = 0.0, 0.0
    for k, (n, p) in enumerate([(6, 2), (18, 6), (8, 8)]):
        rng = np.random.default_rng(40 + k)
        cfg = SystemConfig(n=n, p=p)
        x = st.random_point(n, p, 40 + k)
        h_aw = complex(crandn(rng, ()))
        h_jw = crandn(rng, (n,))
        lam0, lam1 = variances(x, h_aw, h_jw, cfg)
        p0 = float(np.mean(np.abs(simulate_willie(x, h_aw, h_jw, cfg, 100_000, k)) ** 2))
        p1 = float(np.mean(np.abs(simulate_willie(x, h_aw, h_jw, cfg, 100_000, k, alice_active=True)) ** 2))
        worst_rel = max(worst_rel, abs(p0 / lam0 - 1), abs(p1 / lam1 - 1))
        worst_gap = max(worst_gap, abs((lam1 - lam0) - cfg.Pa * abs(h_aw) ** 2))
    ok = worst_rel < 0.03 and worst_gap <= 1e-12
    report(4, "received-power Monte Carlo", ok, f"max relative mismatch {worst_rel:.4f} < 0.03, lambda gap {worst_gap:.1e} <= 1e-12")


def test_criterion_5_convergence():
    cfg = DESK.materialize()
    ds = sample_dataset(cfg, 0)
    opts = replace(DESK_OPTS, max_epochs=1, max_iters=2000, log_every=100)
    trace = run((ds, cfg), st.random_point(cfg.n, cfg.p, 0), opts)
    g = trace.grad_norm2
    ratio = g[-1] / g[0]
    # per-sample gradient work beyond the per-epoch anchor passes, in units of one full gradient (T samples)
    extra = trace.sample_grad_evals / cfg.T
    ok = trace.k1[-1] <= 2000 and ratio < 0.01 and extra <= 2.0
    detail = (f"||grad||^2 ratio {ratio:.3e} after {trace.k1[-1]} inner iterations (need < 0.01), "
              f"extra work {extra:.2f} full gradients (need <= 2)")
    report(5, "R-SVRG convergence at desk scale", ok, detail)


def test_criterion_6_interference_power(tmp_path):
    spec = ExperimentSpec(kind="sweep_n", system=DESK, n_values=(18,), p_rule=3, seed=0)
    _, rows = read_summary_csv(run_sweep_n(spec, tmp_path))
    opt = next(r for r in rows if r["p"] == 6)
    report(6, "optimized interference power at n=18, p=6", opt["Pi_db"] <= -3.0, f"P_i {opt['Pi_db']:.3f} dB <= -3 dB")


def test_criterion_7_pj_trends(tmp_path):
    spec = ExperimentSpec(kind="sweep_pj", system=DESK, pj_values=(0.0, 5.0, 10.0, 15.0), seed=0, pa_zero_row=True)
    _, rows = read_summary_csv(run_sweep_pj(spec, tmp_path))
    _, zero = read_summary_csv(tmp_path / "sweep_pj_pa0.csv")
    rate = [r["covert_rate"] for r in rows]
    pe = [r["pe_lower"] for r in rows]
    dec = all(b < a for a, b in zip(rate, rate[1:]))
    nondec = all(b >= a for a, b in zip(pe, pe[1:]))
    silent = all(r["pe_lower"] == 1.0 for r in zero)
    detail = (f"rate {', '.join(f'{v:.4f}' for v in rate)} strictly decreasing={dec}; "
              f"pe {', '.join(f'{v:.4f}' for v in pe)} non-decreasing={nondec}; pe at P_a=0 equals 1={silent}")
    report(7, "P_j sweep trends", dec and nondec and silent, detail)


def test_criterion_8_variance_reduction():
    cfg = DESK.materialize()
    ds = sample_dataset(cfg, 0)
    # anchor: start of the third epoch; current point: 50 variance-reduced steps later
    anchor = run((ds, cfg), st.random_point(cfg.n, cfg.p, 0), replace(DESK_OPTS, max_epochs=2, log_every=DESK_OPTS.m_l)).x_final
    cur = run((ds, cfg), anchor, replace(DESK_OPTS, max_epochs=1, max_iters=50, log_every=50, seed=1)).x_final
    ratio = variance_reduction_ratio(cur, anchor, ds, cfg)
    report(8, "variance reduction at a late-epoch anchor", ratio < 0.9, f"variance ratio {ratio:.3f} < 0.9")


if __name__ == "__main__":
    import sys
    import tempfile
    from pathlib import Path

    failed = 0
    for name, fn in sorted((k, v) for k, v in globals().items() if k.startswith("test_criterion_")):
        kwargs = {}
        if "tmp_path" in fn.__code__.co_varnames[: fn.__code__.co_argcount]:
            kwargs["tmp_path"] = Path(tempfile.mkdtemp())
        try:
            fn(**kwargs)
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
