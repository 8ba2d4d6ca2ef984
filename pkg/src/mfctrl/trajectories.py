"""Reference trajectory generation with analytically consistent derivatives.

References are built from held levels, cubic-smoothstep transitions
(h(s) = 3s^2 - 2s^3 over each transition window, so the profile is C1), and
optional sinusoid components.  ``eval_reference`` always returns the value
and its exact derivative as one ``Setpoint``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .controller import Setpoint
from .errors import ConfigError

REFERENCE_KINDS = ("hold", "smoothed_step_sequence", "sinusoid_mix")


@dataclass(frozen=True)
class Segment:
    """One smoothed step: begin at ``start`` s, reach ``target`` after ``duration`` s."""

    start: float
    target: float
    duration: float


@dataclass(frozen=True)
class Sinusoid:
    amplitude: float
    frequency: float
    phase: float = 0.0


@dataclass(frozen=True)
class ReferenceSpec:
    kind: str
    initial: float = 0.0
    segments: tuple = ()
    sinusoids: tuple = ()

    def __post_init__(self):
        if self.kind not in REFERENCE_KINDS:
            raise ConfigError(f"reference kind must be one of {REFERENCE_KINDS}")
        prev_end = -math.inf
        for seg in self.segments:
            if seg.duration <= 0.0:
                raise ConfigError("transition duration must be positive")
            if seg.start < prev_end:
                raise ConfigError("segments must be ordered and non-overlapping")
            prev_end = seg.start + seg.duration
        if self.kind == "hold" and (self.segments or self.sinusoids):
            raise ConfigError("hold references take no segments or sinusoids")
        if self.kind == "smoothed_step_sequence" and self.sinusoids:
            raise ConfigError("smoothed_step_sequence takes no sinusoids")


def hold(value: float) -> ReferenceSpec:
    return ReferenceSpec(kind="hold", initial=value)


def eval_reference(spec: ReferenceSpec, t: float) -> Setpoint:
    """Evaluate (y_ref, ydot_ref) at time t >= 0."""
    y = spec.initial
    ydot = 0.0
    level = spec.initial
    for seg in spec.segments:
        if t >= seg.start + seg.duration:
            level = seg.target
            y = level
        elif t >= seg.start:
            s = (t - seg.start) / seg.duration
            h = s * s * (3.0 - 2.0 * s)
            dh = 6.0 * s * (1.0 - s)
            y = level + (seg.target - level) * h
            ydot = (seg.target - level) * dh / seg.duration
            break
        else:
            break
    for c in spec.sinusoids:
        arg = 2.0 * math.pi * c.frequency * t + c.phase
        y += c.amplitude * math.sin(arg)
        ydot += c.amplitude * 2.0 * math.pi * c.frequency * math.cos(arg)
    return Setpoint(y_star=y, y_star_dot=ydot)


def derivative_consistency_check(
    spec: ReferenceSpec, t0: float, t1: float, dt: float
) -> float:
    """Max |central difference of y_ref - ydot_ref| over the grid [t0, t1].

    Second-order small wherever the profile is twice differentiable; grid
    points that straddle a transition boundary see the curvature jump and
    are only first-order there.
    """
    if t1 <= t0 or dt <= 0.0:
        raise ValueError("need t1 > t0 and dt > 0")
    worst = 0.0
    n = int(round((t1 - t0) / dt))
    for k in range(1, n):
        t = t0 + k * dt
        ym = eval_reference(spec, t - dt).y_star
        yp = eval_reference(spec, t + dt).y_star
        dev = abs((yp - ym) / (2.0 * dt) - eval_reference(spec, t).y_star_dot)
        worst = max(worst, dev)
    return worst
