"""Intelligent-proportional control, actuator mapping, and a PID baseline.

The iP law cancels the estimated disturbance and imposes first-order error
dynamics:

    u = -(F_est - ydot_ref + kp * e) / alpha,   e = y - y_ref

so that substituting into the ultra-local model gives
edot + kp*e = F - F_est.  Multi-channel plants are handled by running one
independent channel per output; cross-couplings land in each channel's F.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError, NonFiniteValueError
from .estimator import (
    FEstimate,
    LoopSample,
    Sample,
    SlidingWindow,
    UltraLocalConfig,
    estimate_f_closed_loop,
    estimate_f_integral,
)

ESTIMATOR_KINDS = ("integral", "closed_loop")


@dataclass(frozen=True)
class Setpoint:
    """Reference value and its time derivative at one instant."""

    y_star: float
    y_star_dot: float


@dataclass(frozen=True)
class ActuatorMap:
    """Offset-plus-clamp voltage map.

    Positive commands map to offset + u, negative to -offset + u, zero to
    zero volts; the result is clamped to +-saturation.  The offset
    compensates motor stiction-like behavior on the physical rig.
    """

    offset: float = 10.0
    saturation: float = 24.0

    def __post_init__(self):
        if not (0.0 <= self.offset < self.saturation):
            raise ValueError("require 0 <= offset < saturation")


def actuator_map(u: float, m: ActuatorMap) -> float:
    if not math.isfinite(u):
        raise NonFiniteValueError(f"actuator command is not finite: {u}")
    if u > 0.0:
        v = m.offset + u
    elif u < 0.0:
        v = -m.offset + u
    else:
        v = 0.0
    return min(max(v, -m.saturation), m.saturation)


def ip_law(f_est: float, y_star_dot: float, kp: float, e: float, alpha: float) -> float:
    """The bare iP feedback law on already-known quantities."""
    return -(f_est - y_star_dot + kp * e) / alpha


class IpChannel:
    """Per-channel state of one intelligent-proportional loop.

    Owns the sliding window its estimator consumes and remembers the last
    commanded input so each new measurement can be paired with the input
    that was active when it was taken.  A channel is owned by a single
    control loop; distinct channels may run concurrently.
    """

    def __init__(
        self,
        cfg: UltraLocalConfig,
        kp: float,
        estimator_kind: str = "integral",
        dt_nominal: float = 0.0,
    ):
        if not math.isfinite(kp) or kp <= 0.0:
            raise ValueError("kp must be finite and positive")
        if estimator_kind not in ESTIMATOR_KINDS:
            raise ValueError(f"estimator_kind must be one of {ESTIMATOR_KINDS}")
        self.cfg = cfg
        self.kp = float(kp)
        self.estimator_kind = estimator_kind
        self.window = SlidingWindow(cfg.tau, dt_nominal)
        self.last_f_est: FEstimate | None = None
        self.u_prev = 0.0

    def reset(self) -> None:
        self.window.clear()
        self.last_f_est = None
        self.u_prev = 0.0


def ip_control(channel: IpChannel, sp: Setpoint, y: float, t: float) -> float:
    """One iP control step: ingest the measurement, re-estimate F, command u.

    The pushed sample pairs the fresh measurement with the input that was
    being applied while it was taken (the previous command; 0 before the
    first step).  Until the window holds 2 samples F_est = 0, which bounds
    the startup kick; callers may pre-fill the window to avoid it.
    """
    if not (math.isfinite(y) and math.isfinite(sp.y_star) and math.isfinite(sp.y_star_dot)):
        raise NonFiniteValueError("ip_control inputs must be finite")
    e = y - sp.y_star
    if channel.estimator_kind == "integral":
        channel.window.push(Sample(t, channel.u_prev, y))
        if len(channel.window) >= 2:
            f_est = estimate_f_integral(channel.window, channel.cfg)
        else:
            f_est = FEstimate(0.0, t, 0.0)
    else:
        channel.window.push(LoopSample(t, sp.y_star_dot, channel.u_prev, e))
        if len(channel.window) >= 2:
            f_est = estimate_f_closed_loop(channel.window, channel.cfg, channel.kp)
        else:
            f_est = FEstimate(0.0, t, 0.0)
    channel.last_f_est = f_est
    u = ip_law(f_est.value, sp.y_star_dot, channel.kp, e, channel.cfg.alpha)
    channel.u_prev = u
    return u


def mimo_step(channels, sps, ys, t: float):
    """Apply ip_control independently on every channel.

    Cross-coupling between outputs is absorbed into each channel's F
    estimate; no explicit decoupling is computed.
    """
    if not (len(channels) == len(sps) == len(ys)) or len(channels) < 1:
        raise ConfigError(
            f"channel/setpoint/measurement counts differ: "
            f"{len(channels)}/{len(sps)}/{len(ys)}"
        )
    return [ip_control(ch, sp, y, t) for ch, sp, y in zip(channels, sps, ys)]


@dataclass(frozen=True)
class PidGains:
    """Classical PID gains with a derivative filter and an integrator clamp."""

    kp: float
    ki: float = 0.0
    kd: float = 0.0
    deriv_tau: float = 0.02
    windup_limit: float = 30.0

    def __post_init__(self):
        for v in (self.kp, self.ki, self.kd, self.deriv_tau, self.windup_limit):
            if not math.isfinite(v):
                raise ValueError("PID gains must be finite")
        if self.windup_limit <= 0.0:
            raise ValueError("windup_limit must be positive")
        if self.deriv_tau < 0.0:
            raise ValueError("deriv_tau must be non-negative")


class PidController:
    """Discrete positional PID with derivative-on-measurement and clamped integrator."""

    def __init__(self, gains: PidGains):
        self.gains = gains
        self.integral = 0.0
        self._y_filt: float | None = None

    def reset(self) -> None:
        self.integral = 0.0
        self._y_filt = None


def pid_control(state: PidController, sp: Setpoint, y: float, dt: float) -> float:
    """One PID step.  The error convention is setpoint minus measurement."""
    if dt <= 0.0 or not math.isfinite(dt):
        raise ValueError("dt must be finite and positive")
    if not (math.isfinite(y) and math.isfinite(sp.y_star)):
        raise NonFiniteValueError("pid_control inputs must be finite")
    g = state.gains
    e = sp.y_star - y

    if state._y_filt is None:
        state._y_filt = y
    a = dt / (g.deriv_tau + dt) if g.deriv_tau > 0.0 else 1.0
    y_f = state._y_filt + a * (y - state._y_filt)
    d_meas = (y_f - state._y_filt) / dt
    state._y_filt = y_f

    state.integral += g.ki * e * dt
    state.integral = min(max(state.integral, -g.windup_limit), g.windup_limit)

    return g.kp * e + state.integral - g.kd * d_meas
