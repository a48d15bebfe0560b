"""Sample-average covert objective, its Euclidean gradients and performance metrics.

All functions take X on the unit Stiefel manifold. With ``scaled=True`` (the
default) the transmitted AN basis is sqrt(n/p) X, so every X X^H in the
formulas becomes (n/p) X X^H.

Euclidean gradients follow the convention D f(X)[xi] = Re tr(grad^H xi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class DomainError(ValueError):
    """Raised for arguments outside a function's mathematical domain."""


class DegenerateDataError(ValueError):
    """Raised for empty datasets or zero-power baselines."""


@dataclass(frozen=True)
class ObjectiveValue:
    g1_mean: float
    g2_mean: float
    total: float


@dataclass(frozen=True)
class CovertMetrics:
    lambda0: float
    lambda1: float
    kl: float
    pe_lower: float
    covert_rate: float
    interference_db: float


def _factor(x, scaled):
    n, p = x.shape
    return n / p if scaled else 1.0


def _check_vec(x, h):
    if h.shape[-1] != x.shape[0]:
        raise ValueError(f"channel length {h.shape[-1]} does not match n={x.shape[0]}")


def _quad(x, h, s):
    """s * ||X^H h||^2 for a single vector or each row of a (T, n) array."""
    proj = h.conj() @ x
    return s * np.sum(np.abs(proj) ** 2, axis=-1)


def _require_nonempty(ds):
    if len(ds) == 0:
        raise DegenerateDataError("empty dataset")


def g1_sample(x, h_jb, scaled=True):
    """Interference power at Bob, h^H X X^H h (times n/p when scaled)."""
    h_jb = np.asarray(h_jb)
    _check_vec(x, h_jb)
    return float(_quad(x, h_jb, _factor(x, scaled)))


def _g2_from_parts(c, lam0):
    # ln(1 + r) - r / (1 + r), r = c / lam0
    r = c / lam0
    return np.log1p(r) - r / (1.0 + r)


def g2_sample(x, h_aw, h_jw, cfg, scaled=True):
    """KL divergence D(P1 || P0) at Willie for one channel realization."""
    h_jw = np.asarray(h_jw)
    _check_vec(x, h_jw)
    lam0 = cfg.Pj * _quad(x, h_jw, _factor(x, scaled)) + cfg.sigma_w2
    c = cfg.Pa * abs(h_aw) ** 2
    return float(_g2_from_parts(c, lam0))


def per_sample_parts(x, ds, cfg, scaled=True):
    """Vectors (g1[t], g2[t]) over the whole dataset."""
    _check_vec(x, ds.h_jb)
    s = _factor(x, scaled)
    g1 = _quad(x, ds.h_jb, s)
    lam0 = cfg.Pj * _quad(x, ds.h_jw, s) + cfg.sigma_w2
    c = cfg.Pa * np.abs(ds.h_aw) ** 2
    return g1, _g2_from_parts(c, lam0)


def objective_full(x, ds, cfg, scaled=True):
    _require_nonempty(ds)
    g1, g2 = per_sample_parts(x, ds, cfg, scaled)
    g1m = float(np.mean(g1))
    g2m = float(np.mean(g2))
    return ObjectiveValue(g1m, g2m, g1m + cfg.mu * g2m)


def _g2_weight(x, h_aw, h_jw, cfg, s):
    """d g2 / d q with q = s ||X^H h_jw||^2 multiplied by P_j.

    P_j (1/lam1 - 1/lam0 + c/lam1^2) simplifies to -P_j c^2 / (lam0 lam1^2).
    """
    lam0 = cfg.Pj * _quad(x, h_jw, s) + cfg.sigma_w2
    c = cfg.Pa * np.abs(h_aw) ** 2
    lam1 = c + lam0
    return -cfg.Pj * c * c / (lam0 * lam1 * lam1)


def euclidean_grad_sample(x, sample, cfg, scaled=True):
    """Gradient of g1 + mu * g2 for one ChannelSample."""
    h_jb = np.asarray(sample.h_jb)
    h_jw = np.asarray(sample.h_jw)
    _check_vec(x, h_jb)
    _check_vec(x, h_jw)
    s = _factor(x, scaled)
    w = _g2_weight(x, sample.h_aw, h_jw, cfg, s)
    g = np.outer(h_jb, h_jb.conj() @ x) + (cfg.mu * w) * np.outer(h_jw, h_jw.conj() @ x)
    return 2.0 * s * g


def euclidean_grad_batch(x, ds, cfg, scaled=True, idx=None):
    """Per-sample Euclidean gradients stacked into shape (T, n, p)."""
    h_jb, h_aw, h_jw = ds.h_jb, ds.h_aw, ds.h_jw
    if idx is not None:
        h_jb, h_aw, h_jw = h_jb[idx], h_aw[idx], h_jw[idx]
    _check_vec(x, h_jb)
    s = _factor(x, scaled)
    w = _g2_weight(x, h_aw, h_jw, cfg, s)
    pb = h_jb.conj() @ x
    pw = h_jw.conj() @ x
    g = h_jb[:, :, None] * pb[:, None, :]
    g = g + (cfg.mu * w)[:, None, None] * (h_jw[:, :, None] * pw[:, None, :])
    return 2.0 * s * g


def euclidean_grad_full(x, ds, cfg, scaled=True):
    """Average of the per-sample gradients, computed as two (n x n) Gram products."""
    _require_nonempty(ds)
    _check_vec(x, ds.h_jb)
    s = _factor(x, scaled)
    t = len(ds)
    w = _g2_weight(x, ds.h_aw, ds.h_jw, cfg, s)
    gram_b = ds.h_jb.T @ ds.h_jb.conj()
    gram_w = (ds.h_jw.T * (cfg.mu * w)) @ ds.h_jw.conj()
    return (2.0 * s / t) * ((gram_b + gram_w) @ x)


def variances(x, h_aw, h_jw, cfg, scaled=True):
    """Received-signal variances (lambda0, lambda1) at Willie under H0 / H1."""
    h_jw = np.asarray(h_jw)
    _check_vec(x, h_jw)
    lam0 = float(cfg.Pj * _quad(x, h_jw, _factor(x, scaled)) + cfg.sigma_w2)
    return lam0, float(cfg.Pa * abs(h_aw) ** 2 + lam0)


def kl_divergence(lambda0, lambda1):
    """ln(lambda1/lambda0) + lambda0/lambda1 - 1."""
    if lambda0 <= 0 or lambda1 <= 0:
        raise DomainError("variances must be positive")
    return math.log(lambda1 / lambda0) + lambda0 / lambda1 - 1.0


def pe_lower_bound(kl_mean):
    """Pinsker lower bound max(0, 1 - sqrt(D / 2)) on P_FA + P_MD."""
    if kl_mean < 0:
        raise DomainError("KL divergence must be nonnegative")
    return max(0.0, 1.0 - math.sqrt(kl_mean / 2.0))


def covert_rate(x, ds, cfg, scaled=True):
    """0.5 * log2(1 + P_a |h_ab|^2 / (P_j * mean g1 + sigma_b^2)), bits/channel use."""
    _require_nonempty(ds)
    cfg = cfg.materialize()
    g1m = float(np.mean(_quad(x, ds.h_jb, _factor(x, scaled))))
    snr = cfg.Pa * abs(cfg.h_ab) ** 2 / (cfg.Pj * g1m + cfg.sigma_b2)
    return 0.5 * math.log2(1.0 + snr)


def interference_power_db(x, ds, scaled=True):
    """10 log10 of mean interference under X relative to the identity basis."""
    _require_nonempty(ds)
    base = float(np.mean(np.sum(np.abs(ds.h_jb) ** 2, axis=1)))
    if base <= 0:
        raise DegenerateDataError("zero baseline interference power")
    g1m = float(np.mean(_quad(x, ds.h_jb, _factor(x, scaled))))
    return 10.0 * math.log10(g1m / base)


def evaluate(x, ds, cfg, scaled=True):
    """All covert-performance metrics of basis X on a dataset.

    ``lambda0`` / ``lambda1`` are dataset means; ``kl`` is the mean per-sample
    KL divergence, and ``pe_lower`` is the bound applied to that mean.
    """
    _require_nonempty(ds)
    s = _factor(x, scaled)
    lam0 = cfg.Pj * _quad(x, ds.h_jw, s) + cfg.sigma_w2
    c = cfg.Pa * np.abs(ds.h_aw) ** 2
    kl = float(np.mean(_g2_from_parts(c, lam0)))
    return CovertMetrics(
        lambda0=float(np.mean(lam0)),
        lambda1=float(np.mean(lam0 + c)),
        kl=kl,
        pe_lower=pe_lower_bound(max(kl, 0.0)),
        covert_rate=covert_rate(x, ds, cfg, scaled),
        interference_db=interference_power_db(x, ds, scaled),
    )
