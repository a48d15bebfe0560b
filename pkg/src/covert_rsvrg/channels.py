"""System configuration, Monte Carlo channel datasets and AN signal draws."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .rng import complex_normal, make_rng


class ConfigError(ValueError):
    """Raised for invalid system or experiment configuration."""


def dbm_to_mw(dbm):
    """10^(dBm/10); -inf maps to exactly 0 mW."""
    if dbm == -math.inf:
        return 0.0
    return 10.0 ** (dbm / 10.0)


@dataclass(frozen=True)
class SystemConfig:
    """Powers are given in dBm and converted to mW on access.

    ``h_ab`` and ``h_jb_hat`` default to None, in which case ``materialize``
    draws them once from CN(0, 1) on the ``known`` stream of ``known_seed``.
    Variance vectors may be given as scalars and are broadcast to length n.
    """

    n: int = 18
    p: int = 6
    Pa_dbm: float = 15.0
    Pj_dbm: float = 10.0
    sigma_w2_dbm: float = 0.0
    sigma_b2_dbm: float = 0.0
    h_ab: complex | None = None
    h_jb_hat: tuple | None = None
    sigma_jb2: float | tuple = 1.0
    sigma_aw2: float = 1.0
    sigma_jw2: float | tuple = 1.0
    mu: float = 1.0
    T: int = 1000
    known_seed: int = 0

    def __post_init__(self):
        if not (1 <= self.p <= self.n):
            raise ConfigError(f"need 1 <= p <= n, got n={self.n}, p={self.p}")
        if self.T < 1:
            raise ConfigError("T must be >= 1")
        if not self.mu >= 0:
            raise ConfigError("mu must be nonnegative")
        if self.Pa < 0 or self.Pj < 0:
            raise ConfigError("powers must be nonnegative")
        if not (self.sigma_w2 > 0 and self.sigma_b2 > 0):
            raise ConfigError("noise variances must be positive")
        if self.h_jb_hat is not None and len(self.h_jb_hat) != self.n:
            raise ConfigError("h_jb_hat must have length n")
        for name in ("sigma_jb2", "sigma_jw2"):
            v = np.asarray(getattr(self, name), dtype=float)
            if v.ndim == 1 and v.shape[0] != self.n:
                raise ConfigError(f"{name} must be a scalar or have length n")
            if np.any(v < 0):
                raise ConfigError(f"{name} must be nonnegative")
        if self.sigma_aw2 < 0:
            raise ConfigError("sigma_aw2 must be nonnegative")

    @property
    def Pa(self):
        return dbm_to_mw(self.Pa_dbm)

    @property
    def Pj(self):
        return dbm_to_mw(self.Pj_dbm)

    @property
    def sigma_w2(self):
        return dbm_to_mw(self.sigma_w2_dbm)

    @property
    def sigma_b2(self):
        return dbm_to_mw(self.sigma_b2_dbm)

    @property
    def scale2(self):
        """n / p, the squared AN basis scaling."""
        return self.n / self.p

    def var_jb(self):
        return np.broadcast_to(np.asarray(self.sigma_jb2, dtype=float), (self.n,))

    def var_jw(self):
        return np.broadcast_to(np.asarray(self.sigma_jw2, dtype=float), (self.n,))

    def materialize(self):
        """Return a copy with the known channel parts filled in."""
        if self.h_ab is not None and self.h_jb_hat is not None:
            return self
        rng = make_rng(self.known_seed, "known")
        h_ab = complex(complex_normal(rng, ()))
        h_hat = complex_normal(rng, (self.n,))
        return replace(
            self,
            h_ab=self.h_ab if self.h_ab is not None else h_ab,
            h_jb_hat=self.h_jb_hat if self.h_jb_hat is not None else tuple(complex(v) for v in h_hat),
        )

    def to_kv(self):
        out = {}
        for f in fields(self):
            out[f.name] = _format_value(getattr(self, f.name))
        return out

    @classmethod
    def from_kv(cls, kv):
        kwargs = {}
        for f in fields(cls):
            if f.name in kv:
                kwargs[f.name] = _parse_field(f.name, kv[f.name])
        return cls(**kwargs)


_INT_FIELDS = {"n", "p", "T", "known_seed"}
_COMPLEX_FIELDS = {"h_ab"}
_VECTOR_FIELDS = {"h_jb_hat", "sigma_jb2", "sigma_jw2"}


def _format_scalar(v):
    if isinstance(v, (complex, np.complexfloating)):
        return repr(complex(v)).strip("()")
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _format_value(v):
    if v is None:
        return "none"
    if isinstance(v, (tuple, list, np.ndarray)):
        return ",".join(_format_scalar(x) for x in v)
    return _format_scalar(v)


def _parse_field(name, text):
    text = text.strip()
    if text.lower() == "none":
        return None
    if name in _INT_FIELDS:
        return int(text)
    if name in _COMPLEX_FIELDS:
        return complex(text)
    if name in _VECTOR_FIELDS:
        parts = [s.strip() for s in text.split(",")]
        if name == "h_jb_hat":
            return tuple(complex(s) for s in parts)
        if len(parts) == 1:
            return float(parts[0])
        return tuple(float(s) for s in parts)
    return float(text)


def read_kv(path):
    """Read a flat ``key = value`` text file; ``#`` starts a comment."""
    kv = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, value = line.split("=", 1)
        kv[key.strip()] = value.strip()
    return kv


def write_kv(path, kv):
    Path(path).write_text("".join(f"{k}={v}\n" for k, v in kv.items()))


@dataclass(frozen=True)
class ChannelSample:
    h_jb: np.ndarray
    h_aw: complex
    h_jw: np.ndarray


@dataclass(frozen=True)
class ChannelDataset:
    """T joint channel draws stored column-wise.

    ``h_jb`` and ``h_jw`` have shape (T, n); ``h_aw`` has shape (T,). The
    vectors are the ones entering the quadratic forms h^H X X^H h.
    """

    h_jb: np.ndarray
    h_aw: np.ndarray
    h_jw: np.ndarray
    seed: int = field(default=-1)

    def __post_init__(self):
        t, n = self.h_jb.shape
        if self.h_jw.shape != (t, n) or self.h_aw.shape != (t,):
            raise ConfigError("inconsistent dataset array shapes")
        for a in (self.h_jb, self.h_aw, self.h_jw):
            a.setflags(write=False)

    def __len__(self):
        return self.h_jb.shape[0]

    def __getitem__(self, t):
        return ChannelSample(self.h_jb[t], complex(self.h_aw[t]), self.h_jw[t])

    @property
    def T(self):
        return self.h_jb.shape[0]

    @property
    def n(self):
        return self.h_jb.shape[1]

    def subset(self, idx):
        idx = np.atleast_1d(idx)
        return ChannelDataset(
            self.h_jb[idx].copy(), self.h_aw[idx].copy(), self.h_jw[idx].copy(), self.seed
        )


def sample_dataset(cfg, seed, stream="train"):
    """Draw T i.i.d. channel blocks.

    h_jb[t] = h_jb_hat + CN(0, sigma_jb2), h_aw[t] ~ CN(0, sigma_aw2),
    h_jw[t] ~ CN(0, sigma_jw2), all independent.
    """
    cfg = cfg.materialize()
    rng = make_rng(seed, stream)
    t, n = cfg.T, cfg.n
    h_hat = np.asarray(cfg.h_jb_hat, dtype=complex)
    h_jb = h_hat[np.newaxis, :] + complex_normal(rng, (t, n), cfg.var_jb())
    h_aw = complex_normal(rng, (t,), cfg.sigma_aw2)
    h_jw = complex_normal(rng, (t, n), cfg.var_jw())
    return ChannelDataset(h_jb, h_aw, h_jw, int(seed))


def dataset_header(n):
    cols = ["t"]
    cols += [f"{part}_hjb_{k}" for k in range(1, n + 1) for part in ("re", "im")]
    cols += ["re_haw", "im_haw"]
    cols += [f"{part}_hjw_{k}" for k in range(1, n + 1) for part in ("re", "im")]
    return cols


def save_dataset_csv(ds, path):
    n = ds.n
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(dataset_header(n))
        for t in range(ds.T):
            row = [t + 1]
            for v in ds.h_jb[t]:
                row += [repr(float(v.real)), repr(float(v.imag))]
            row += [repr(float(ds.h_aw[t].real)), repr(float(ds.h_aw[t].imag))]
            for v in ds.h_jw[t]:
                row += [repr(float(v.real)), repr(float(v.imag))]
            w.writerow(row)


def load_dataset_csv(path, seed=-1):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    ncols = len(header)
    if (ncols - 3) % 4 != 0:
        raise ConfigError(f"{path}: malformed dataset header")
    n = (ncols - 3) // 4
    if header != dataset_header(n):
        raise ConfigError(f"{path}: unexpected dataset header")
    data = np.array([[float(v) for v in r[1:]] for r in body]).reshape(len(body), -1)
    h_jb = data[:, 0 : 2 * n : 2] + 1j * data[:, 1 : 2 * n : 2]
    h_aw = data[:, 2 * n] + 1j * data[:, 2 * n + 1]
    off = 2 * n + 2
    h_jw = data[:, off : off + 2 * n : 2] + 1j * data[:, off + 1 : off + 2 * n : 2]
    return ChannelDataset(h_jb, h_aw, h_jw, seed)


def generate_an_signal(x, scale, seed=None, rng=None):
    """One AN vector v = scale * X a with a ~ CN(0, I_p)."""
    if rng is None:
        rng = make_rng(seed, "an")
    a = complex_normal(rng, (x.shape[1],))
    return scale * (x @ a)


def verify_symbol_power(x, draws, seed=None, rng=None):
    """Monte Carlo per-symbol AN power (1/n) mean ||sqrt(n/p) X a||^2."""
    if draws < 1:
        raise ConfigError("draws must be >= 1")
    if rng is None:
        rng = make_rng(seed, "an")
    n, p = x.shape
    a = complex_normal(rng, (draws, p))
    v = math.sqrt(n / p) * (a @ x.T)
    return float(np.mean(np.sum(np.abs(v) ** 2, axis=1)) / n)


def simulate_willie(x, h_aw, h_jw, cfg, draws, seed, alice_active=False):
    """Draws of Willie's received sample for fixed channels.

    y = sqrt(P_j) h_jw^H v + n_w, plus sqrt(P_a) h_aw s_a when Alice transmits,
    with v = sqrt(n/p) X a, a ~ CN(0, I_p), s_a ~ CN(0, 1), n_w ~ CN(0, sigma_w^2).
    """
    n, p = x.shape
    rng_an = make_rng(seed, "an")
    rng_noise = make_rng(seed, "noise")
    a = complex_normal(rng_an, (draws, p))
    v = math.sqrt(n / p) * (a @ x.T)
    y = math.sqrt(cfg.Pj) * (v @ np.conj(h_jw))
    y = y + complex_normal(rng_noise, (draws,), cfg.sigma_w2)
    if alice_active:
        s = complex_normal(rng_noise, (draws,))
        y = y + math.sqrt(cfg.Pa) * h_aw * s
    return y
