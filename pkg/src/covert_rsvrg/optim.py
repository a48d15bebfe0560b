"""Riemannian SVRG on the complex Stiefel manifold, plus R-SGD and RGD baselines."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import stiefel
from .objective import euclidean_grad_batch, euclidean_grad_full, objective_full
from .rng import make_rng
from .stiefel import FEAS_TOL, check_feasibility, tangent_project, tangent_project_batch, transport

VARIANTS = ("rsvrg", "rsgd", "rgd")


class NumericalFailure(ArithmeticError):
    """Non-finite objective or iterate; carries the trace up to the failure."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class InfeasiblePointError(ValueError):
    pass


@dataclass(frozen=True)
class OptimizerOptions:
    """Solver settings.

    The step size is alpha0 / (1 + alpha0 * lambda_decay * floor(k1 / m_l)),
    where k1 counts inner iterations. ``log_every`` controls how often the
    full objective and gradient norm are recorded (diagnostics only, not
    counted as solver work). ``max_iters`` optionally caps the total number
    of inner iterations.
    """

    alpha0: float = 1e-3
    lambda_decay: float = 20.0
    m_l: int = 5000
    max_epochs: int = 50
    grad_tol: float = 1e-4
    seed: int = 0
    variant: str = "rsvrg"
    log_every: int = 1
    max_iters: int | None = None

    def __post_init__(self):
        if not self.alpha0 > 0:
            raise ValueError("alpha0 must be positive")
        if not self.lambda_decay > 0:
            raise ValueError("lambda_decay must be positive")
        if self.m_l < 1:
            raise ValueError("m_l must be >= 1")
        if not self.grad_tol >= 0:
            raise ValueError("grad_tol must be nonnegative")
        if self.max_epochs < 0:
            raise ValueError("max_epochs must be nonnegative")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")
        if self.log_every < 1:
            raise ValueError("log_every must be >= 1")
        if self.max_iters is not None and self.max_iters < 0:
            raise ValueError("max_iters must be nonnegative")


@dataclass
class TraceRecord:
    k1: int
    epoch: int
    q: int
    g1_mean: float
    g2_mean: float
    total: float
    grad_norm2: float
    step: float
    feasibility: float


@dataclass
class OptimizerTrace:
    records: list = field(default_factory=list)
    x_final: np.ndarray | None = None
    epochs: int = 0
    # solver work: per-sample gradients in inner loops, full-gradient passes
    sample_grad_evals: int = 0
    full_grad_evals: int = 0
    stop_reason: str = ""

    @property
    def grad_norm2(self):
        return np.array([r.grad_norm2 for r in self.records])

    @property
    def k1(self):
        return np.array([r.k1 for r in self.records])

    @property
    def totals(self):
        return np.array([r.total for r in self.records])

    def final_grad_norm(self):
        return math.sqrt(self.records[-1].grad_norm2) if self.records else math.nan


def step_size(k1, opts):
    if k1 < 0:
        raise ValueError("k1 must be nonnegative")
    return opts.alpha0 / (1.0 + opts.alpha0 * opts.lambda_decay * (k1 // opts.m_l))


def riemannian_full_gradient(x, ds, cfg, scaled=True):
    return tangent_project(x, euclidean_grad_full(x, ds, cfg, scaled))


def riemannian_sample_gradient(x, ds, cfg, t, scaled=True):
    g = euclidean_grad_batch(x, ds, cfg, scaled, idx=[t])[0]
    return tangent_project(x, g)


def svrg_gradient(x_cur, x_anchor, sample_index, ds, cfg, full_grad_anchor, scaled=True):
    """Variance-reduced direction at ``x_cur``.

    grad f_t(X) - T(grad f_t(X~) - grad f(X~)), with ``sample_index`` in
    1..T and the transport onto the tangent space at ``x_cur``.
    """
    if not 1 <= sample_index <= len(ds):
        raise IndexError(f"sample_index {sample_index} outside 1..{len(ds)}")
    t = sample_index - 1
    cur = riemannian_sample_gradient(x_cur, ds, cfg, t, scaled)
    anc = riemannian_sample_gradient(x_anchor, ds, cfg, t, scaled)
    return cur - transport(x_cur, anc - full_grad_anchor)


def svrg_gradient_all(x_cur, x_anchor, ds, cfg, full_grad_anchor=None, scaled=True):
    """Variance-reduced directions for every sample index, shape (T, n, p)."""
    if full_grad_anchor is None:
        full_grad_anchor = riemannian_full_gradient(x_anchor, ds, cfg, scaled)
    cur = tangent_project_batch(x_cur, euclidean_grad_batch(x_cur, ds, cfg, scaled))
    anc = tangent_project_batch(x_anchor, euclidean_grad_batch(x_anchor, ds, cfg, scaled))
    return cur - tangent_project_batch(x_cur, anc - full_grad_anchor[None])


def _record(trace, x, ds, cfg, scaled, k1, epoch, q, step):
    val = objective_full(x, ds, cfg, scaled)
    g = riemannian_full_gradient(x, ds, cfg, scaled)
    rec = TraceRecord(
        k1=k1,
        epoch=epoch,
        q=q,
        g1_mean=val.g1_mean,
        g2_mean=val.g2_mean,
        total=val.total,
        grad_norm2=stiefel.metric(g, g),
        step=step,
        feasibility=check_feasibility(x),
    )
    if not all(math.isfinite(v) for v in (rec.total, rec.grad_norm2)):
        trace.x_final = x
        raise NumericalFailure(f"non-finite objective at k1={k1}", trace)
    trace.records.append(rec)
    return rec


def run(problem, x0, opts):
    """Minimize the sample-average objective from ``x0``.

    ``problem`` is a ``(dataset, config)`` pair. Each epoch starts with a full
    Riemannian gradient at the anchor; the run stops at an epoch boundary
    once its norm is <= grad_tol, or after ``max_epochs`` epochs of ``m_l``
    inner steps (or ``max_iters`` inner steps in total).
    """
    ds, cfg = problem
    scaled = True
    x = np.array(x0, dtype=complex)
    if x.shape != (cfg.n, cfg.p) or check_feasibility(x) > FEAS_TOL:
        raise InfeasiblePointError("initial point is not on the Stiefel manifold")
    T = len(ds)
    rng = make_rng(opts.seed, "sampling")
    trace = OptimizerTrace()
    k1 = 0

    _record(trace, x, ds, cfg, scaled, k1, 0, 0, step_size(0, opts))
    for epoch in range(1, opts.max_epochs + 1):
        anchor = x
        anchor_grads = None
        if opts.variant == "rsvrg":
            # the per-sample anchor gradients are a by-product of the full gradient pass
            anchor_grads = tangent_project_batch(anchor, euclidean_grad_batch(anchor, ds, cfg, scaled))
            full_anchor = anchor_grads.mean(axis=0)
        else:
            full_anchor = riemannian_full_gradient(anchor, ds, cfg, scaled)
        trace.full_grad_evals += 1
        if stiefel.norm(full_anchor) <= opts.grad_tol:
            trace.stop_reason = "grad_tol"
            break
        for q in range(1, opts.m_l + 1):
            alpha = step_size(k1, opts)
            if opts.variant == "rgd":
                xi = full_anchor if q == 1 else riemannian_full_gradient(x, ds, cfg, scaled)
                if q > 1:
                    trace.full_grad_evals += 1
            else:
                t = int(rng.integers(T))
                cur = tangent_project(x, euclidean_grad_batch(x, ds, cfg, scaled, idx=[t])[0])
                trace.sample_grad_evals += 1
                if opts.variant == "rsvrg":
                    xi = cur - transport(x, anchor_grads[t] - full_anchor)
                else:
                    xi = cur
            try:
                x = stiefel.retract(x, -alpha * xi)
            except stiefel.DecompositionError as exc:
                trace.x_final = x
                raise NumericalFailure(f"retraction failed at k1={k1 + 1}: {exc}", trace) from exc
            k1 += 1
            if not np.all(np.isfinite(x)):
                trace.x_final = x
                raise NumericalFailure(f"non-finite iterate at k1={k1}", trace)
            capped = opts.max_iters is not None and k1 >= opts.max_iters
            if k1 % opts.log_every == 0 or q == opts.m_l or capped:
                _record(trace, x, ds, cfg, scaled, k1, epoch, q, alpha)
            if capped:
                break
        trace.epochs = epoch
        if opts.max_iters is not None and k1 >= opts.max_iters:
            trace.stop_reason = "max_iters"
            break
    else:
        trace.stop_reason = "max_epochs"
    trace.x_final = x
    return trace


def variance_reduction_ratio(x_cur, x_anchor, ds, cfg, scaled=True):
    """Spread of the variance-reduced directions relative to plain sample gradients.

    Both estimators average to the full Riemannian gradient at ``x_cur``;
    the ratio compares their mean squared deviations (metric norm) over all
    T sample indices.
    """
    svrg = svrg_gradient_all(x_cur, x_anchor, ds, cfg, scaled=scaled)
    plain = tangent_project_batch(x_cur, euclidean_grad_batch(x_cur, ds, cfg, scaled))
    full = plain.mean(axis=0)
    var_svrg = float(np.mean(np.sum(np.abs(svrg - full) ** 2, axis=(1, 2))))
    var_plain = float(np.mean(np.sum(np.abs(plain - full) ** 2, axis=(1, 2))))
    return var_svrg / var_plain
