"""Experiment orchestration: configuration, simulation runs, persistence.

A run is one process marching one state forward while sampling norm records
and the ray profile gamma(t, v); everything lands in a run directory:

    config.txt     the exact configuration text
    manifest.json  code version, config hash, seed, grid
    norms.csv      one row per norm sample
    gamma.csv      rows (t, v, Re gamma, Im gamma, |e|, |cubic|)
    state_*.txt    checkpoints (final state always written)

Configuration is flat `key = value` text with strict unknown-key rejection.
"""

import hashlib
import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .errors import InsufficientSamples, UsageError
from .grid import GridSpec
from .diagnostics import SIGMA_DEFAULT, control_norms, decay_fit, weighted_energy
from .dynamics import (
    StepperConfig,
    WaveState,
    hamiltonian,
    load_state,
    packet_data,
    plateau_data,
    save_state,
    step,
)
from .normalform import nf_rate, para_nf, scaling_fields
from .packets import (
    asymptotic_residual,
    build_packet,
    cubic_coefficient,
    gamma_rate,
    gamma_value,
    omega0_band,
    omega0_grid,
)

_DEFAULTS = {
    "grid.n": 2048,
    "grid.length": 400.0 * math.pi,
    "grid.dealias": 2.0 / 3.0,
    "step.dt": 0.2,
    "step.scheme": "rk4_integrating_factor",
    "data.kind": "plateau",
    "data.eps": 1e-3,
    "data.velocity": 1.0,
    "data.width": 24.0,
    "data.center": 0.0,
    "data.plateau": 0.15,
    "data.ramp": 0.05,
    "run.t_end": 50.0,
    "run.norm_every": 5.0,
    "run.checkpoint_every": 25.0,
    "gamma.enabled": True,
    "gamma.every": 10.0,
    "gamma.start": 20.0,
    "gamma.velocities": 9,
    "sigma": SIGMA_DEFAULT,
    "seed": 1234,
}

_TYPES = {k: type(v) for k, v in _DEFAULTS.items()}


@dataclass
class RunConfig:
    values: dict = field(default_factory=lambda: dict(_DEFAULTS))

    def __getitem__(self, key):
        return self.values[key]

    @classmethod
    def parse(cls, text):
        values = dict(_DEFAULTS)
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"line {lineno}: expected 'key = value'")
            key, _, val = (s.strip() for s in line.partition("="))
            if key not in values:
                raise UsageError(f"line {lineno}: unknown key {key!r}")
            kind = _TYPES[key]
            try:
                if kind is bool:
                    values[key] = val.lower() in ("1", "true", "yes", "on")
                else:
                    values[key] = kind(val)
            except ValueError as exc:
                raise UsageError(f"line {lineno}: bad value for {key}: {exc}")
        cfg = cls(values)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.parse(fh.read())

    def text(self):
        return "\n".join(f"{k} = {self.values[k]}" for k in sorted(self.values)) + "\n"

    def sha256(self):
        return hashlib.sha256(self.text().encode()).hexdigest()

    def validate(self):
        self.grid()  # GridSpec validates itself
        self.stepper().validate(self.grid())
        if self["data.eps"] < 0:
            raise UsageError("data.eps must be nonnegative")
        if self["sigma"] <= 2.75:
            raise UsageError("sigma must exceed 11/4")
        if self["run.t_end"] <= 0:
            raise UsageError("run.t_end must be positive")
        if self["data.kind"] not in ("packet", "plateau"):
            raise UsageError(f"unknown data.kind {self['data.kind']!r}")

    def grid(self):
        return GridSpec(self["grid.length"], self["grid.n"], self["grid.dealias"])

    def stepper(self):
        return StepperConfig(self["step.dt"], self["step.scheme"])

    def initial_state(self):
        grid = self.grid()
        if self["data.kind"] == "packet":
            return packet_data(
                grid,
                self["data.eps"],
                velocity=self["data.velocity"],
                width=self["data.width"] or None,
                center=self["data.center"],
            )
        return plateau_data(
            grid,
            self["data.eps"],
            center=-1.0 / (4.0 * self["data.velocity"] ** 2),
            plateau=self["data.plateau"],
            ramp=self["data.ramp"],
        )


def _norm_header(sigma):
    from .diagnostics import NormRecord

    return ",".join(NormRecord.CSV_FIELDS) + f",hs_0.25,hs_{sigma - 1.0:g},energy"


def _gamma_samples(state, cfg):
    """gamma, its analytic rate, and the cubic term on the velocity grid."""
    t = state.t
    grid = state.grid
    vs = omega0_grid(t, count=cfg["gamma.velocities"])
    nf = para_nf(state)
    dwt, dqt = nf_rate(state)
    rows = []
    for v in vs:
        frame = build_packet(grid, t, v)
        gam = gamma_value(nf.wt, nf.qt, frame)
        rate = gamma_rate(nf.wt, nf.qt, dwt, dqt, frame)
        cubic = cubic_coefficient(gam, t, v)
        rows.append((t, v, gam, rate - cubic, cubic))
    return rows


def simulate(cfg, out_dir, resume_state=None):
    """Run the configured experiment into `out_dir`; returns the directory."""
    os.makedirs(out_dir, exist_ok=True)
    grid = cfg.grid()
    stepper = cfg.stepper()
    sigma = cfg["sigma"]
    state = resume_state if resume_state is not None else cfg.initial_state()

    with open(os.path.join(out_dir, "config.txt"), "w") as fh:
        fh.write(cfg.text())
    manifest = {
        "version": __version__,
        "config_sha256": cfg.sha256(),
        "seed": cfg["seed"],
        "grid": {"length": grid.length, "n": grid.n, "dealias": grid.dealias},
        "resumed_from_t": None if resume_state is None else resume_state.t,
    }
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=1)

    mode = "a" if resume_state is not None else "w"
    norms_path = os.path.join(out_dir, "norms.csv")
    gamma_path = os.path.join(out_dir, "gamma.csv")
    norm_fh = open(norms_path, mode)
    gamma_fh = open(gamma_path, mode)
    if resume_state is None:
        norm_fh.write(_norm_header(sigma) + "\n")
        gamma_fh.write("t,v,re_gamma,im_gamma,abs_residual,abs_cubic\n")

    def sample_norms(st):
        rec = control_norms(st, sigma=sigma)
        if st.t > 0:
            rec.wh_sharp = weighted_energy(st, scaling_fields(st), sigma=sigma)
        energy = hamiltonian(st).real
        row = rec.csv_row(hs_keys=(0.25, sigma - 1.0))
        norm_fh.write(row + f",{energy:.12e}\n")

    def sample_gamma(st):
        lo, hi = omega0_band(st.t)
        if st.t < cfg["gamma.start"]:
            return
        for t, v, gam, resid, cubic in _gamma_samples(st, cfg):
            gamma_fh.write(
                f"{t:.6f},{v:.8f},{gam.real:.12e},{gam.imag:.12e},"
                f"{abs(resid):.12e},{abs(cubic):.12e}\n"
            )

    t_end = cfg["run.t_end"]
    next_norm = state.t if resume_state is None else state.t + cfg["run.norm_every"]
    next_gamma = max(cfg["gamma.start"], state.t)
    next_ckpt = state.t + cfg["run.checkpoint_every"]
    eps = 1e-9

    if cfg["data.eps"] == 0.0:
        state = WaveState(state.t, state.w, state.q)

    while True:
        if state.t >= next_norm - eps:
            sample_norms(state)
            next_norm += cfg["run.norm_every"]
        if cfg["gamma.enabled"] and state.t >= next_gamma - eps and state.t >= 4.0:
            sample_gamma(state)
            next_gamma += cfg["gamma.every"]
        if state.t >= next_ckpt - eps:
            save_state(os.path.join(out_dir, f"state_{state.t:012.4f}.txt"), state,
                       extra={"eps": cfg["data.eps"], "scheme": cfg["step.scheme"]})
            next_ckpt += cfg["run.checkpoint_every"]
        if state.t >= t_end - eps:
            break
        state = step(state, stepper)

    save_state(os.path.join(out_dir, "state_final.txt"), state,
               extra={"eps": cfg["data.eps"], "scheme": cfg["step.scheme"]})
    norm_fh.close()
    gamma_fh.close()
    return out_dir


def resume(run_dir, out_dir):
    """Continue a finished or interrupted run from its last checkpoint."""
    cfg = RunConfig.load(os.path.join(run_dir, "config.txt"))
    candidates = sorted(
        f for f in os.listdir(run_dir) if f.startswith("state_") and f != "state_final.txt"
    )
    if not candidates:
        raise UsageError(f"no checkpoints in {run_dir}")
    state, _ = load_state(os.path.join(run_dir, candidates[-1]))
    return simulate(cfg, out_dir, resume_state=state)


def read_series(run_dir, column):
    path = os.path.join(run_dir, "norms.csv")
    if not os.path.exists(path):
        raise UsageError(f"no norms.csv in {run_dir}")
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if column not in header:
            raise UsageError(
                f"unknown norm {column!r}; available: {', '.join(header[1:])}"
            )
        idx = header.index(column)
        ts, vals = [], []
        for line in fh:
            parts = line.strip().split(",")
            if len(parts) != len(header):
                continue
            ts.append(float(parts[0]))
            vals.append(float(parts[idx]))
    return np.asarray(ts), np.asarray(vals)


@dataclass
class FitReport:
    norm: str
    slope: float
    stderr: float
    samples: int
    table_path: str


def fit(run_dir, norm_id, out_path=None):
    """Log-log decay fit of one stored norm series."""
    ts, vals = read_series(run_dir, norm_id)
    keep = ts > 0
    slope, stderr = decay_fit(ts[keep], vals[keep])
    out_path = out_path or os.path.join(run_dir, f"fit_{norm_id}.txt")
    with open(out_path, "w") as fh:
        fh.write(f"# {norm_id}: slope {slope:.6f} stderr {stderr:.6f}\n")
        for t, v in zip(ts, vals):
            fh.write(f"{t:.6f} {v:.12e}\n")
    return FitReport(norm_id, slope, stderr, int(keep.sum()), out_path)


def output_root(default="runs"):
    return os.environ.get("HOLOWW_OUT", default)
