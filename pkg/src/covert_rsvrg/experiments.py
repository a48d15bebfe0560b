"""Experiment families: convergence traces, sweeps over n and over P_j.

Each run writes plain CSV files plus ``manifest.txt``, a key=value file that
reproduces the run when passed back through ``--config``.
"""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .channels import ConfigError, SystemConfig, read_kv, sample_dataset, write_kv
from .objective import evaluate
from .optim import OptimizerOptions, run
from .stiefel import random_point

log = logging.getLogger(__name__)

TRACE_HEADER = ["iter", "g1_mean", "g2_mean", "total", "grad_norm", "step", "feasibility"]
SUMMARY_HEADER = ["n", "p", "Pj_dbm", "Pi_db", "pe_lower", "covert_rate"]
KINDS = ("convergence", "sweep_n", "sweep_pj")


def _ints(text):
    return tuple(int(s) for s in str(text).split(",") if s.strip())


def _floats(text):
    return tuple(float(s) for s in str(text).split(",") if s.strip())


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything needed to reproduce one experiment family.

    ``p_values`` are the p scenarios of the convergence run (n fixed by the
    system config); ``p_rule`` is the divisor d of the sweep-n rule p = n/d.
    ``m_l_factor`` sets the epoch length m_l = factor * T unless ``m_l`` is
    given explicitly in the options.
    """

    kind: str = "convergence"
    system: SystemConfig = field(default_factory=SystemConfig)
    options: OptimizerOptions = field(default_factory=lambda: OptimizerOptions(max_epochs=4, log_every=10))
    p_values: tuple = (3, 6, 9)
    n_values: tuple = (18, 24, 30, 36)
    p_rule: int = 3
    pj_values: tuple = (0.0, 5.0, 10.0, 15.0)
    seed: int = 0
    eval_seed: int = 1
    share_eval: bool = False
    pa_zero_row: bool = False
    m_l_factor: float = 5.0
    threads: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.kind == "convergence":
            if not self.p_values:
                raise ConfigError("p_values must be non-empty")
            for p in self.p_values:
                if not 1 <= p <= self.system.n:
                    raise ConfigError(f"p={p} invalid for n={self.system.n}")
        if self.kind == "sweep_n":
            if not self.n_values:
                raise ConfigError("n_values must be non-empty")
            for n in self.n_values:
                if self.p_rule < 1 or n % self.p_rule != 0:
                    raise ConfigError(f"p = n/{self.p_rule} is not an integer for n={n}")
        if self.kind == "sweep_pj" and not self.pj_values:
            raise ConfigError("pj_values must be non-empty")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")

    def options_for(self, cfg):
        return replace(
            self.options, m_l=max(1, int(round(self.m_l_factor * cfg.T))), seed=self.seed
        )

    def to_kv(self):
        kv = {"kind": self.kind}
        kv.update(self.system.materialize().to_kv())
        opts = self.options_for(self.system)
        for f in fields(opts):
            kv[f.name] = str(getattr(opts, f.name))
        kv.update(
            p_values=",".join(map(str, self.p_values)),
            n_values=",".join(map(str, self.n_values)),
            p_rule=str(self.p_rule),
            pj_values=",".join(repr(float(v)) for v in self.pj_values),
            seed=str(self.seed),
            eval_seed=str(self.eval_seed),
            share_eval=str(self.share_eval).lower(),
            pa_zero_row=str(self.pa_zero_row).lower(),
            m_l_factor=repr(float(self.m_l_factor)),
            threads=str(self.threads),
            stop_rule="epoch-boundary full-gradient norm <= grad_tol or max_epochs",
        )
        return kv

    @classmethod
    def from_kv(cls, kv, **overrides):
        kv = dict(kv)
        system = SystemConfig.from_kv(kv)
        opt_kwargs = {}
        for f in fields(OptimizerOptions):
            if f.name in kv:
                v = kv[f.name].strip()
                if f.name == "variant":
                    opt_kwargs[f.name] = v
                elif f.type == "int | None":
                    opt_kwargs[f.name] = None if v.lower() == "none" else int(v)
                else:
                    opt_kwargs[f.name] = int(v) if f.type == "int" else float(v)
        base_opts = OptimizerOptions(max_epochs=4, log_every=10)
        options = replace(base_opts, **opt_kwargs)
        kwargs = dict(system=system, options=options)
        conv = {
            "kind": str,
            "p_values": _ints,
            "n_values": _ints,
            "p_rule": int,
            "pj_values": _floats,
            "seed": int,
            "eval_seed": int,
            "share_eval": lambda s: s.strip().lower() in ("1", "true", "yes"),
            "pa_zero_row": lambda s: s.strip().lower() in ("1", "true", "yes"),
            "m_l_factor": float,
            "threads": int,
        }
        for key, fn in conv.items():
            if key in kv:
                kwargs[key] = fn(kv[key])
        if "m_l" in kv and "m_l_factor" not in kv:
            kwargs["m_l_factor"] = int(kv["m_l"]) / system.T
        kwargs.update(overrides)
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path, **overrides):
        return cls.from_kv(read_kv(path), **overrides)


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if not math.isfinite(v):
        raise ValueError(f"non-finite value {v!r} in CSV output")
    return repr(v)


def _write_csv(path, header, rows):
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([_fmt(v) for v in row])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def write_trace_csv(trace, path):
    rows = [
        (r.k1, r.g1_mean, r.g2_mean, r.total, r.grad_norm2, r.step, r.feasibility)
        for r in trace.records
    ]
    _write_csv(path, TRACE_HEADER, rows)


def write_point_csv(x, path, meta):
    """X as rows of interleaved real/imag parts, with a key=value sidecar."""
    n, p = x.shape
    header = [f"{part}_{k}" for k in range(1, p + 1) for part in ("re", "im")]
    rows = [[v for z in x[i] for v in (z.real, z.imag)] for i in range(n)]
    _write_csv(path, header, rows)
    write_kv(Path(path).with_suffix(".meta"), {k: str(v) for k, v in meta.items()})


def read_point_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))[1:]
    data = np.array([[float(v) for v in r] for r in rows])
    return data[:, 0::2] + 1j * data[:, 1::2]


def _datasets(spec, cfg):
    train = sample_dataset(cfg, spec.seed, stream="train")
    if spec.share_eval:
        return train, train
    return train, sample_dataset(cfg, spec.eval_seed, stream="eval")


def optimize(spec, cfg):
    """Optimize one scenario; returns (trace, train dataset, eval dataset)."""
    cfg = cfg.materialize()
    train, ev = _datasets(spec, cfg)
    x0 = random_point(cfg.n, cfg.p, spec.seed)
    trace = run((train, cfg), x0, spec.options_for(cfg))
    return trace, train, ev


def _prepare_out(spec, out_dir):
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    write_kv(out / "manifest.txt", spec.to_kv())
    return out


def _map(spec, fn, items):
    if spec.threads == 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=spec.threads) as pool:
        return list(pool.map(fn, items))


def run_convergence(spec, out_dir):
    """One trace CSV (and final point) per p scenario at the configured n."""
    if spec.kind != "convergence":
        raise ConfigError("spec.kind must be 'convergence'")
    out = _prepare_out(spec, out_dir)

    def job(p):
        cfg = replace(spec.system, p=p).materialize()
        trace, _, _ = optimize(spec, cfg)
        stem = f"n{cfg.n}_p{p}"
        write_trace_csv(trace, out / f"trace_{stem}.csv")
        write_point_csv(
            trace.x_final,
            out / f"x_{stem}.csv",
            {
                "n": cfg.n,
                "p": p,
                "seed": spec.seed,
                "epochs": trace.epochs,
                "final_grad_norm": repr(trace.final_grad_norm()),
            },
        )
        log.info("convergence n=%d p=%d: %d records", cfg.n, p, len(trace.records))
        return out / f"trace_{stem}.csv"

    return _map(spec, job, spec.p_values)


def summary_row(x, cfg, ds):
    m = evaluate(x, ds, cfg)
    return (cfg.n, x.shape[1], cfg.Pj_dbm, m.interference_db, m.pe_lower, m.covert_rate)


def run_sweep_n(spec, out_dir):
    """Rows for the optimized basis (p = n / p_rule) and the identity baseline (p = n)."""
    if spec.kind != "sweep_n":
        raise ConfigError("spec.kind must be 'sweep_n'")
    out = _prepare_out(spec, out_dir)

    def job(n):
        cfg = replace(spec.system, n=n, p=n // spec.p_rule, h_jb_hat=None).materialize()
        trace, _, ev = optimize(spec, cfg)
        base_cfg = replace(cfg, p=n)
        return [summary_row(trace.x_final, cfg, ev), summary_row(np.eye(n, dtype=complex), base_cfg, ev)]

    rows = [r for pair in _map(spec, job, spec.n_values) for r in pair]
    path = out / "sweep_n.csv"
    _write_csv(path, SUMMARY_HEADER, rows)
    return path


def run_sweep_pj(spec, out_dir):
    """One row per P_j value, re-optimizing X for each."""
    if spec.kind != "sweep_pj":
        raise ConfigError("spec.kind must be 'sweep_pj'")
    out = _prepare_out(spec, out_dir)

    def job(pj):
        cfg = replace(spec.system, Pj_dbm=pj).materialize()
        trace, _, ev = optimize(spec, cfg)
        row = summary_row(trace.x_final, cfg, ev)
        zero = None
        if spec.pa_zero_row:
            zcfg = replace(cfg, Pa_dbm=-math.inf)
            zero = summary_row(trace.x_final, zcfg, ev)
        return row, zero

    results = _map(spec, job, spec.pj_values)
    path = out / "sweep_pj.csv"
    _write_csv(path, SUMMARY_HEADER, [r for r, _ in results])
    if spec.pa_zero_row:
        _write_csv(out / "sweep_pj_pa0.csv", SUMMARY_HEADER, [z for _, z in results])
    return path


def read_summary_csv(path):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames
        rows = [{k: float(v) for k, v in r.items()} for r in reader]
    return header, rows
