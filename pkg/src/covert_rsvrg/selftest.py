"""Quick manifold and gradient property checks behind ``geometry-selftest``."""

import numpy as np

from . import stiefel as st
from .channels import SystemConfig, sample_dataset
from .objective import euclidean_grad_full, objective_full
from .rng import complex_normal, make_rng


def _checks(seed):
    rng = make_rng(seed, "noise")
    for n, p in [(4, 2), (8, 4), (6, 6)]:
        x = st.random_point(n, p, seed)
        g = complex_normal(rng, (n, p))
        xi = st.tangent_project(x, g)
        eta = st.tangent_project(x, complex_normal(rng, (n, p)))
        tag = f"n={n},p={p}"
        yield f"tangency {tag}", st.tangency_residual(x, xi), 1e-10
        yield f"idempotence {tag}", np.linalg.norm(st.tangent_project(x, xi) - xi), 1e-12
        yield f"orthogonal split {tag}", abs(st.metric(xi, g - xi)), 1e-10
        y = st.retract(x, xi)
        yield f"retraction feasibility {tag}", st.check_feasibility(y), 1e-10
        t = 1e-6
        slope = (st.retract(x, t * xi) - x) / t
        yield f"retraction rigidity {tag}", np.linalg.norm(slope - xi), 1e-4
        a, b = 0.7, -1.3
        lin = st.transport(y, a * xi + b * eta) - a * st.transport(y, xi) - b * st.transport(y, eta)
        yield f"transport linearity {tag}", np.linalg.norm(lin), 1e-12
        yield f"transport tangency {tag}", st.tangency_residual(y, st.transport(y, xi)), 1e-10
        xbar = st.real_representation(x)
        yield f"real representation {tag}", np.linalg.norm(xbar.T @ xbar - np.eye(2 * p)), 1e-10
        near = st.retract(x, 0.5 * xi / max(st.norm(xi), 1.0))
        back = st.retract(x, st.inverse_retract(x, near))
        yield f"inverse retraction {tag}", np.linalg.norm(back - near), 1e-8

    cfg = SystemConfig(n=8, p=4, T=16, mu=1.5).materialize()
    ds = sample_dataset(cfg, seed)
    x = st.random_point(8, 4, seed)
    g = euclidean_grad_full(x, ds, cfg)
    worst = 0.0
    for _ in range(20):
        d = complex_normal(rng, (8, 4))
        h = 1e-6
        fd = (objective_full(x + h * d, ds, cfg).total - objective_full(x - h * d, ds, cfg).total) / (2 * h)
        an = float(np.real(np.vdot(g, d)))
        worst = max(worst, abs(fd - an) / max(abs(an), 1e-12))
    yield "euclidean gradient vs finite differences", worst, 1e-5


def run_selftest(seed=0, out=print):
    """Print one PASS/FAIL line per check; return True if all pass."""
    ok = True
    for name, value, tol in _checks(seed):
        passed = bool(value < tol)
        ok &= passed
        out(f"{'PASS' if passed else 'FAIL'}  {name}: {value:.3e} (tol {tol:.0e})")
    return ok
