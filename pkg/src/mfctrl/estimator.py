"""Windowed algebraic estimation of the lumped disturbance term.

The ultra-local model

    ydot(t) = F(t) + alpha * u(t)

treats everything the controller does not know about the plant -- internal
dynamics, couplings, external disturbances -- as a single time-varying term
F.  This module maintains short sliding windows of timestamped samples and
recovers F from them in real time.

Two estimators are provided.  ``estimate_f_integral`` evaluates, in local
window time sigma in [0, T],

    F_est = -(6 / T**3) * integral_0^T [ (T - 2*sigma) * y(sigma)
                                         + alpha * sigma * (T - sigma) * u(sigma) ] dsigma

which annihilates the unknown initial condition and low-pass filters
measurement noise.  ``estimate_f_closed_loop`` is only valid while the loop
is closed with the intelligent-proportional law and averages
(ydot_ref - alpha*u - kp*e) over the window.

Quadrature: the sampled data are taken piecewise-linear between samples and
the polynomial weights are integrated exactly on every segment (two-point
Gauss-Legendre, exact through cubic integrands).  The estimate is therefore
exact for data generated by constant F and constant u, and second-order
accurate in the sample spacing otherwise, including on jittered grids.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, fields

import numpy as np

from .errors import (
    InsufficientDataError,
    NonFiniteValueError,
    OutOfOrderSampleError,
    UndefinedScaleError,
)

_SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class Sample:
    """One timestamped input-output pair.

    t is in seconds, u is the commanded controller output (pre actuator map),
    y is the measured plant output.
    """

    t: float
    u: float
    y: float


@dataclass(frozen=True)
class LoopSample:
    """Closed-loop record (reference derivative, input, tracking error)."""

    t: float
    y_star_dot: float
    u: float
    e: float


@dataclass(frozen=True)
class UltraLocalConfig:
    """Constants of the ultra-local model: scaling alpha, horizon tau.

    Only first-order derivation (n = 1) is supported.
    """

    alpha: float
    tau: float
    n: int = 1

    def __post_init__(self):
        if not math.isfinite(self.alpha) or self.alpha == 0.0:
            raise ValueError("alpha must be finite and nonzero")
        if not math.isfinite(self.tau) or self.tau <= 0.0:
            raise ValueError("tau must be finite and positive")
        if self.n != 1:
            raise ValueError("only n = 1 ultra-local models are supported")


@dataclass(frozen=True)
class FEstimate:
    """Estimated disturbance term, the time it applies to, and the data span used."""

    value: float
    t: float
    window_span: float


class SlidingWindow:
    """Bounded, strictly time-ordered sample buffer.

    Samples older than ``capacity_duration`` seconds behind the newest one are
    evicted on push.  Any record type with finite float fields and a leading
    ``t`` attribute can be stored (``Sample`` for the integral estimator,
    ``LoopSample`` for the closed-loop one).

    One control-loop thread owns a window; instances share no state, so
    distinct windows may be used concurrently without coordination.
    """

    def __init__(self, capacity_duration: float, dt_nominal: float = 0.0):
        if not math.isfinite(capacity_duration) or capacity_duration <= 0.0:
            raise ValueError("capacity_duration must be finite and positive")
        self.capacity_duration = float(capacity_duration)
        self.dt_nominal = float(dt_nominal)
        self._samples: deque = deque()

    def __len__(self) -> int:
        return len(self._samples)

    @property
    def samples(self) -> tuple:
        return tuple(self._samples)

    @property
    def span(self) -> float:
        if len(self._samples) < 2:
            return 0.0
        return self._samples[-1].t - self._samples[0].t

    def newest_time(self):
        return self._samples[-1].t if self._samples else None

    def field_array(self, name: str) -> np.ndarray:
        return np.fromiter(
            (getattr(s, name) for s in self._samples), float, len(self._samples)
        )

    def push(self, s) -> "SlidingWindow":
        for f in fields(s):
            if not math.isfinite(getattr(s, f.name)):
                raise NonFiniteValueError(f"non-finite field in sample {s!r}")
        if s.t < 0.0:
            raise ValueError(f"sample time must be non-negative, got {s.t}")
        if self._samples and s.t <= self._samples[-1].t:
            raise OutOfOrderSampleError(
                f"sample at t={s.t} is not after newest t={self._samples[-1].t}"
            )
        self._samples.append(s)
        cutoff = s.t - self.capacity_duration
        while self._samples[0].t < cutoff:
            self._samples.popleft()
        return self

    def clear(self) -> None:
        self._samples.clear()


def push_sample(window: SlidingWindow, s: Sample) -> SlidingWindow:
    """Append a sample, evicting everything older than the capacity horizon."""
    return window.push(s)


def _local_window(window: SlidingWindow, tau: float, names: tuple):
    """Local coordinates sigma in [0, T] plus field arrays over [t_new - T, t_new].

    T = min(tau, actual span).  If the stored span exceeds tau, a virtual
    boundary sample is linearly interpolated at t_new - T so the estimate
    only sees the requested horizon.
    """
    if len(window) < 2:
        raise InsufficientDataError(
            f"estimates need at least 2 samples, window has {len(window)}"
        )
    t = window.field_array("t")
    span = t[-1] - t[0]
    if span <= 0.0:
        raise InsufficientDataError("window span is not positive")
    fields = [window.field_array(n) for n in names]
    if span <= tau:
        T = span
        sigma = t - t[0]
    else:
        T = tau
        start = t[-1] - T
        i = int(np.searchsorted(t, start, side="right"))
        i = min(max(i, 1), len(t) - 1)
        frac = (start - t[i - 1]) / (t[i] - t[i - 1])
        sigma = np.concatenate(([0.0], t[i:] - start))
        fields = [
            np.concatenate(([f[i - 1] + frac * (f[i] - f[i - 1])], f[i:]))
            for f in fields
        ]
    return T, sigma, fields


def estimate_f_integral(window: SlidingWindow, cfg: UltraLocalConfig) -> FEstimate:
    """Estimate F from the weighted integral of windowed (u, y) data.

    Exact (up to rounding) whenever y is affine in t and u is constant over
    the window, i.e. for any data produced by constant F and constant input.
    """
    T, sigma, (u, y) = _local_window(window, cfg.tau, ("u", "y"))

    s0, s1 = sigma[:-1], sigma[1:]
    y0, y1 = y[:-1], y[1:]
    u0, u1 = u[:-1], u[1:]
    h = s1 - s0
    mid = 0.5 * (s0 + s1)
    off = 0.5 * h / _SQRT3

    acc = np.zeros_like(h)
    for x in (mid - off, mid + off):
        lam = (x - s0) / h
        yx = y0 + lam * (y1 - y0)
        ux = u0 + lam * (u1 - u0)
        acc += (T - 2.0 * x) * yx + cfg.alpha * x * (T - x) * ux
    integral = float(np.sum(0.5 * h * acc))

    value = -6.0 / T**3 * integral
    if not math.isfinite(value):
        raise NonFiniteValueError("integral estimate is not finite")
    return FEstimate(value=value, t=float(window.newest_time()), window_span=float(T))


def estimate_f_closed_loop(
    window_cl: SlidingWindow, cfg: UltraLocalConfig, kp: float
) -> FEstimate:
    """Estimate F as the windowed mean of (ydot_ref - alpha*u - kp*e).

    Valid only while the loop is closed with the intelligent-proportional
    law; the window holds ``LoopSample`` records.  By construction the
    integrand equals the estimate the loop actually applied at each instant,
    so this operation recovers F when the observed loop tracks well (it is
    the natural consistency check against ``estimate_f_integral``) but it
    cannot correct a biased loop on its own.
    """
    T, sigma, (yds, u, e) = _local_window(window_cl, cfg.tau, ("y_star_dot", "u", "e"))
    z = yds - cfg.alpha * u - kp * e
    integral = float(np.sum(0.5 * np.diff(sigma) * (z[:-1] + z[1:])))
    value = integral / T
    if not math.isfinite(value):
        raise NonFiniteValueError("closed-loop estimate is not finite")
    return FEstimate(value=value, t=float(window_cl.newest_time()), window_span=float(T))


def suggest_alpha(u_history, y_history, dt: float) -> float:
    """Pick alpha so the model terms have comparable magnitude.

    Matches median(|alpha*u|) to median(|ydot|) computed by finite
    differences and signs alpha so alpha*u correlates positively with ydot.
    Degenerate histories (all-zero input, or an output that never moves)
    raise UndefinedScaleError rather than guessing a scale.
    """
    u = np.asarray(u_history, dtype=float)
    y = np.asarray(y_history, dtype=float)
    if u.size == 0 or u.shape != y.shape or u.ndim != 1:
        raise ValueError("histories must be equal-length 1-d sequences")
    if u.size < 2:
        raise InsufficientDataError("need at least 2 points to difference y")
    if dt <= 0.0 or not math.isfinite(dt):
        raise ValueError("dt must be finite and positive")
    if not (np.all(np.isfinite(u)) and np.all(np.isfinite(y))):
        raise NonFiniteValueError("histories contain non-finite values")
    if not np.any(u != 0.0):
        raise UndefinedScaleError("input history is identically zero")

    ydot = np.diff(y) / dt
    u_mid = 0.5 * (u[:-1] + u[1:])
    mag_y = float(np.median(np.abs(ydot)))
    mag_u = float(np.median(np.abs(u_mid)))
    if mag_u == 0.0:
        raise UndefinedScaleError("input history has zero median magnitude")
    if mag_y == 0.0:
        raise UndefinedScaleError("output history carries no rate information")
    sign = 1.0 if float(np.dot(u_mid, ydot)) >= 0.0 else -1.0
    return sign * mag_y / mag_u
