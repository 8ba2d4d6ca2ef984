"""Scenario harness: wires plants, controllers, estimators, and references.

A scenario runs in simulated time only.  Each control tick reads the (noisy)
measurements, evaluates the references, re-estimates F, commands u through
the iP law (or the PID baseline), maps u to volts, and sub-steps the plant
to the next tick.  Perturbation events (added mass) fire at their times
without touching any controller state.

Everything a run produces lands in a ``ScenarioRecord``: the full per-tick
time series plus summary metrics.  Records are bitwise reproducible from
(config, seed) and can be exported to / re-read from CSV losslessly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from itertools import product

import numpy as np

from .controller import (
    ActuatorMap,
    IpChannel,
    PidController,
    PidGains,
    Setpoint,
    actuator_map,
    mimo_step,
    pid_control,
)
from .errors import ConfigError, CsvIoError, DivergenceError
from .estimator import UltraLocalConfig
from .plants import NOISE_NONE, NoiseSpec, inject_noise
from .trajectories import ReferenceSpec, eval_reference

CONTROLLER_KINDS = ("ip", "pid")


@dataclass(frozen=True)
class ChannelConfig:
    """Gains and estimator settings of one control channel."""

    alpha: float
    kp: float
    tau: float
    estimator_kind: str = "integral"


@dataclass(frozen=True)
class AddedMassEvent:
    """Mid-run perturbation: attach ``mass`` kg at ``arm`` m at time ``time``."""

    time: float
    mass: float
    arm: float = 0.2
    kind: str = "added_mass"


@dataclass
class ScenarioConfig:
    """Everything needed to reproduce one run."""

    name: str
    plant_factory: object  # zero-arg callable returning a fresh plant
    channels: list
    references: list
    actuator: ActuatorMap
    dt_control: float
    duration: float
    noises: list = None
    seed: int = 0
    events: list = field(default_factory=list)
    controller: str = "ip"
    pid_gains: list = None

    def validate(self) -> None:
        if self.dt_control <= 0.0:
            raise ConfigError("dt_control must be positive")
        if self.duration < 10.0 * self.dt_control:
            raise ConfigError("duration must be at least 10 control ticks")
        if self.controller not in CONTROLLER_KINDS:
            raise ConfigError(f"controller must be one of {CONTROLLER_KINDS}")
        m = len(self.channels)
        if m < 1 or len(self.references) != m:
            raise ConfigError("need one reference spec per channel")
        if self.noises is not None and len(self.noises) != m:
            raise ConfigError("need one noise spec per channel")
        for c in self.channels:
            if c.tau < 2.0 * self.dt_control:
                raise ConfigError("tau must be at least 2 control ticks")
        if self.controller == "pid":
            if self.pid_gains is None or len(self.pid_gains) != m:
                raise ConfigError("pid controller needs one PidGains per channel")
        for ev in self.events:
            if not 0.0 <= ev.time <= self.duration:
                raise ConfigError("event times must fall inside the run")

    def noise_specs(self):
        if self.noises is None:
            return [NOISE_NONE] * len(self.channels)
        return list(self.noises)


class ScenarioRecord:
    """Per-tick time series of one run plus summary metrics and metadata."""

    def __init__(self, columns, data, summary, metadata):
        self.columns = list(columns)
        self.data = {k: np.asarray(v, dtype=float) for k, v in data.items()}
        self.summary = summary
        self.metadata = metadata

    def __len__(self):
        return len(self.data["t"])

    @property
    def t(self):
        return self.data["t"]

    def channel(self, i, name):
        return self.data[f"{name}{i}"]

    def equal(self, other) -> bool:
        """Bitwise equality of columns and summary values."""
        if self.columns != other.columns or len(self) != len(other):
            return False
        return all(np.array_equal(self.data[c], other.data[c]) for c in self.columns)


def _derive_noise(spec: NoiseSpec, run_seed: int) -> NoiseSpec:
    if spec.kind != "uniform":
        return spec
    return replace(spec, seed=spec.seed + 1_000_003 * run_seed)


def run_scenario(cfg: ScenarioConfig) -> ScenarioRecord:
    """Execute one scenario and log every tick.

    Plant divergence aborts the run and returns the partial record with
    metadata["diverged"] = True; configuration violations raise before the
    loop starts.
    """
    cfg.validate()
    plant = cfg.plant_factory()
    m = len(cfg.channels)
    if plant.n_outputs != m:
        raise ConfigError(
            f"plant has {plant.n_outputs} outputs but {m} channels configured"
        )
    dt = cfg.dt_control
    n_ticks = int(round(cfg.duration / dt))
    noises = [_derive_noise(sp, cfg.seed) for sp in cfg.noise_specs()]

    if cfg.controller == "ip":
        loops = [
            IpChannel(UltraLocalConfig(c.alpha, c.tau), c.kp, c.estimator_kind, dt)
            for c in cfg.channels
        ]
    else:
        loops = [PidController(g) for g in cfg.pid_gains]

    gains_pre = _gain_snapshot(cfg)
    events = sorted(cfg.events, key=lambda e: e.time)
    next_event = 0

    cols = ["t"]
    for i in range(1, m + 1):
        cols += [f"y{i}", f"y_star{i}", f"y_star_dot{i}", f"e{i}", f"f_est{i}", f"u{i}", f"v{i}"]
    data = {c: np.zeros(n_ticks) for c in cols}

    diverged = False
    n_done = 0
    for k in range(n_ticks):
        t = k * dt
        while next_event < len(events) and events[next_event].time <= t:
            ev = events[next_event]
            plant.apply_added_mass(ev.mass, ev.arm)
            next_event += 1

        y_true = plant.outputs()
        ys = [inject for inject in _measure(y_true, noises, t)]
        sps = [eval_reference(ref, t) for ref in cfg.references]

        if cfg.controller == "ip":
            us = mimo_step(loops, sps, ys, t)
            f_ests = [ch.last_f_est.value for ch in loops]
        else:
            us = [pid_control(pc, sp, y, dt) for pc, sp, y in zip(loops, sps, ys)]
            f_ests = [0.0] * m
        vs = [actuator_map(u, cfg.actuator) for u in us]

        data["t"][k] = t
        for i in range(m):
            data[f"y{i + 1}"][k] = ys[i]
            data[f"y_star{i + 1}"][k] = sps[i].y_star
            data[f"y_star_dot{i + 1}"][k] = sps[i].y_star_dot
            data[f"e{i + 1}"][k] = ys[i] - sps[i].y_star
            data[f"f_est{i + 1}"][k] = f_ests[i]
            data[f"u{i + 1}"][k] = us[i]
            data[f"v{i + 1}"][k] = vs[i]
        n_done = k + 1

        try:
            plant.step(vs, dt)
        except DivergenceError:
            diverged = True
            break

    if n_done < n_ticks:
        data = {c: a[:n_done] for c, a in data.items()}

    summary = {}
    for i in range(1, m + 1):
        e = data[f"e{i}"]
        v = data[f"v{i}"]
        f = data[f"f_est{i}"]
        summary[f"rmse{i}"] = float(np.sqrt(np.mean(e**2))) if n_done else math.nan
        summary[f"max_abs_e{i}"] = float(np.max(np.abs(e))) if n_done else math.nan
        summary[f"saturation_fraction{i}"] = (
            float(np.mean(np.abs(v) >= cfg.actuator.saturation - 1e-12)) if n_done else math.nan
        )
        summary[f"f_est_variance{i}"] = float(np.var(f)) if n_done else math.nan

    metadata = {
        "name": cfg.name,
        "seed": cfg.seed,
        "dt_control": dt,
        "duration": cfg.duration,
        "controller": cfg.controller,
        "diverged": diverged,
        "gains_pre": gains_pre,
        "gains_post": _gain_snapshot(cfg),
        "events": [(e.time, e.kind, e.mass, e.arm) for e in events],
    }
    return ScenarioRecord(cols, data, summary, metadata)


def _measure(y_true, noises, t):
    return [inject_noise(y, sp, t) for y, sp in zip(y_true, noises)]


def _gain_snapshot(cfg: ScenarioConfig):
    if cfg.controller == "ip":
        return tuple((c.alpha, c.kp, c.tau, c.estimator_kind) for c in cfg.channels)
    return tuple(
        (g.kp, g.ki, g.kd, g.deriv_tau, g.windup_limit) for g in cfg.pid_gains
    )


def tracking_rmse(record: ScenarioRecord, channel: int, t0=None, t1=None) -> float:
    """RMS of the tracking error on [t0, t1) (defaults to the whole run)."""
    t = record.t
    e = record.channel(channel, "e")
    mask = np.ones(len(t), dtype=bool)
    if t0 is not None:
        mask &= t >= t0
    if t1 is not None:
        mask &= t < t1
    if not np.any(mask):
        raise ValueError("empty time window")
    return float(np.sqrt(np.mean(e[mask] ** 2)))


def reference_range(record: ScenarioRecord, channel: int) -> float:
    y_star = record.channel(channel, "y_star")
    return float(np.max(y_star) - np.min(y_star))


def error_dynamics_residual(record: ScenarioRecord, channel: int, kp: float, f_true) -> float:
    """RMS residual of edot + kp*e - (F - F_est) from logged data.

    The derivative is the per-tick forward difference, which estimates edot
    at the interval midpoint; e and the true F are evaluated there too, and
    F_est is the estimate actually applied over the interval.
    """
    t = record.t
    e = record.channel(channel, "e")
    f_est = record.channel(channel, "f_est")
    dt = t[1] - t[0]
    t_mid = t[:-1] + 0.5 * dt
    e_mid = 0.5 * (e[:-1] + e[1:])
    edot = np.diff(e) / dt
    f_mid = np.asarray([f_true(tm) for tm in t_mid])
    r = edot + kp * e_mid - (f_mid - f_est[:-1])
    return float(np.sqrt(np.mean(r**2)))


def verify_causality(cfg: ScenarioConfig, record: ScenarioRecord) -> bool:
    """Recompute every logged u from the logged prefix alone.

    Rebuilds fresh channels and replays the recorded (t, y, reference)
    stream through the same control path; each tick's command must
    reproduce the logged one bitwise, proving u_k depends only on data with
    t <= t_k.
    """
    if cfg.controller != "ip":
        raise ConfigError("causality replay is defined for the ip controller")
    m = len(cfg.channels)
    dt = cfg.dt_control
    loops = [
        IpChannel(UltraLocalConfig(c.alpha, c.tau), c.kp, c.estimator_kind, dt)
        for c in cfg.channels
    ]
    t = record.t
    for k in range(len(record)):
        sps = [
            Setpoint(record.channel(i, "y_star")[k], record.channel(i, "y_star_dot")[k])
            for i in range(1, m + 1)
        ]
        ys = [record.channel(i, "y")[k] for i in range(1, m + 1)]
        us = mimo_step(loops, sps, ys, float(t[k]))
        for i in range(1, m + 1):
            if us[i - 1] != record.channel(i, "u")[k]:
                return False
    return True


# ---------------------------------------------------------------------------
# controller comparison


@dataclass
class ComparisonResult:
    records: dict
    pre_rmse: dict
    post_rmse: dict
    degradation: dict
    combined_degradation: dict
    split_time: float
    startup_skip: float

    def table(self) -> str:
        labels = list(self.records)
        m = len(self.pre_rmse[labels[0]])
        lines = [
            f"{'variant':<10} {'channel':>8} {'rmse pre':>12} {'rmse post':>12} {'factor':>8}"
        ]
        for lab in labels:
            for i in range(m):
                lines.append(
                    f"{lab:<10} {i + 1:>8d} {self.pre_rmse[lab][i]:>12.5g} "
                    f"{self.post_rmse[lab][i]:>12.5g} {self.degradation[lab][i]:>8.3f}"
                )
            lines.append(
                f"{lab:<10} {'combined':>8} {'':>12} {'':>12} "
                f"{self.combined_degradation[lab]:>8.3f}"
            )
        return "\n".join(lines)

    def worst_degradation(self, label: str) -> float:
        return max(self.degradation[label])


def compare_controllers(
    cfg: ScenarioConfig,
    pid_gains,
    variants=("ip", "pid"),
    startup_skip: float = 2.0,
) -> ComparisonResult:
    """Run each controller variant on the identical scenario and tabulate RMSE.

    RMSE is split at the first perturbation event (or mid-run when there is
    none); the first ``startup_skip`` seconds are excluded from the pre
    window.  Each variant gets per-channel degradation factors plus one
    combined factor, the ratio of range-normalized RMSE sums, which is the
    headline number for perturbed-vs-nominal comparisons (channels the
    perturbation does not touch contribute only noise to their own ratios).
    Variants may repeat (useful for identity checks).
    """
    split = min((e.time for e in cfg.events), default=cfg.duration / 2.0)
    startup_skip = min(startup_skip, 0.5 * split)
    m = len(cfg.channels)
    records, pre, post, factor, combined = {}, {}, {}, {}, {}
    for idx, var in enumerate(variants):
        label = var if var not in records else f"{var}{idx}"
        run_cfg = replace(cfg, controller=var, pid_gains=pid_gains if var == "pid" else None)
        rec = run_scenario(run_cfg)
        records[label] = rec
        pre[label] = [tracking_rmse(rec, i, startup_skip, split) for i in range(1, m + 1)]
        post[label] = [tracking_rmse(rec, i, split, None) for i in range(1, m + 1)]
        factor[label] = [post[label][i] / pre[label][i] for i in range(m)]
        ranges = [max(reference_range(rec, i), 1e-30) for i in range(1, m + 1)]
        combined[label] = sum(
            post[label][i] / ranges[i] for i in range(m)
        ) / sum(pre[label][i] / ranges[i] for i in range(m))
    return ComparisonResult(records, pre, post, factor, combined, split, startup_skip)


# Declared PID tuning protocol: per-channel coordinate descent over a fixed
# grid on the nominal scenario, minimizing the sum of range-normalized
# tracking RMSEs (2 s startup excluded).  Both channels start at the grid
# midpoint; channel 1 is tuned first with channel 2 held, then channel 2
# with channel 1's winner held.
PID_TUNE_GRIDS = (
    {"kp": (1600.0, 3200.0, 6400.0), "ki": (0.0, 400.0, 1200.0), "kd": (0.0, 0.5)},
    {"kp": (100.0, 200.0, 400.0), "ki": (30.0, 90.0, 270.0), "kd": (5.0, 15.0, 40.0)},
)


def tune_pid_grid(cfg: ScenarioConfig, grids=None, startup_skip: float = 2.0):
    """Grid-tune one PidGains per channel on the nominal (event-free) scenario."""
    grids = PID_TUNE_GRIDS if grids is None else grids
    m = len(cfg.channels)
    if len(grids) != m:
        raise ConfigError("need one tuning grid per channel")
    base = replace(cfg, controller="pid", events=[])

    def mid(g):
        return PidGains(
            kp=g["kp"][len(g["kp"]) // 2],
            ki=g["ki"][len(g["ki"]) // 2],
            kd=g["kd"][len(g["kd"]) // 2],
        )

    gains = [mid(g) for g in grids]

    def score(gs):
        rec = run_scenario(replace(base, pid_gains=list(gs)))
        if rec.metadata["diverged"]:
            return math.inf
        total = 0.0
        for i in range(1, m + 1):
            rng = reference_range(rec, i)
            total += tracking_rmse(rec, i, startup_skip, None) / (rng if rng > 0 else 1.0)
        return total

    for ch in range(m):
        best, best_score = gains[ch], math.inf
        for kp, ki, kd in product(grids[ch]["kp"], grids[ch]["ki"], grids[ch]["kd"]):
            trial = list(gains)
            trial[ch] = PidGains(kp=kp, ki=ki, kd=kd)
            s = score(trial)
            if s < best_score:
                best, best_score = trial[ch], s
        gains[ch] = best
    return gains


# ---------------------------------------------------------------------------
# CSV export / import

CSV_FLOAT_FORMAT = "%.17g"


def export_csv(record: ScenarioRecord, path) -> None:
    """Write header plus one row per tick; round-trips float64 exactly."""
    try:
        with open(path, "w", newline="") as fh:
            fh.write(",".join(record.columns) + "\n")
            cols = [record.data[c] for c in record.columns]
            for k in range(len(record)):
                fh.write(",".join(CSV_FLOAT_FORMAT % col[k] for col in cols) + "\n")
    except OSError as exc:
        raise CsvIoError(f"writing {path}: {exc}") from exc


def read_csv(path) -> ScenarioRecord:
    """Re-read an exported record (time series only; summaries recomputed upstream)."""
    try:
        with open(path, "r", newline="") as fh:
            header = fh.readline().strip()
            if not header:
                raise CsvIoError(f"reading {path}: empty file")
            columns = header.split(",")
            rows = [line.strip().split(",") for line in fh if line.strip()]
    except OSError as exc:
        raise CsvIoError(f"reading {path}: {exc}") from exc
    data = {
        c: np.array([float(r[j]) for r in rows]) for j, c in enumerate(columns)
    }
    return ScenarioRecord(columns, data, summary={}, metadata={"name": str(path)})


# ---------------------------------------------------------------------------
# estimator benchmark

def bench_estimator(taus, dts, noise_amps, noise_freq: float = 170.0, horizon: float = 2.0):
    """Sweep (tau, dt, noise amplitude) on a synthetic known-F signal.

    The signal is ydot = F(t) + alpha*u(t) with F(t) = 1 + 0.5 sin(2 pi t / 5)
    and u(t) = cos(2 pi t), alpha = 1, integrated in closed form.  Returns one
    dict per combination with the RMS and max error of the windowed estimate
    against the true F over the horizon (first full window excluded).
    """
    from .estimator import Sample, SlidingWindow, estimate_f_integral

    alpha = 1.0
    w_f = 2.0 * math.pi / 5.0
    w_u = 2.0 * math.pi

    def f_true(t):
        return 1.0 + 0.5 * math.sin(w_f * t)

    def y_true(t):
        return t - 0.5 / w_f * (math.cos(w_f * t) - 1.0) + alpha / w_u * math.sin(w_u * t)

    rows = []
    for tau in taus:
        for dt in dts:
            for amp in noise_amps:
                spec = (
                    NoiseSpec(kind="sinusoid", amplitude=amp, frequency=noise_freq)
                    if amp > 0.0
                    else NOISE_NONE
                )
                win = SlidingWindow(tau)
                errs = []
                n = int(round(horizon / dt))
                for k in range(n + 1):
                    t = k * dt
                    y = inject_noise(y_true(t), spec, t)
                    win.push(Sample(t, math.cos(w_u * t), y))
                    if len(win) >= 2 and t >= tau:
                        est = estimate_f_integral(win, UltraLocalConfig(alpha, tau))
                        errs.append(est.value - f_true(t))
                err = np.asarray(errs)
                rows.append(
                    {
                        "tau": tau,
                        "dt": dt,
                        "noise_amplitude": amp,
                        "rms_error": float(np.sqrt(np.mean(err**2))),
                        "max_error": float(np.max(np.abs(err))),
                    }
                )
    return rows
