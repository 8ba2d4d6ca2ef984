"""Simulated plants with a uniform step contract.

All plants advance one time step under a held input and expose their
outputs; none of them is known to the controller, which only ever sees the
(u, y) stream.  Included:

* ``step_lti`` -- scalar first-order linear plant ydot = a*y + b*u + d with
  an exact exponential discretization.
* ``step_half_quadrotor`` -- a 2-DOF aero-body surrogate (azimuth rate and
  pitch angle driven by two rotor voltages) with cross-coupling, viscous
  friction, a gravity restoring torque, gyroscopic coupling, and an optional
  added-mass torque, integrated by one RK4 step:

      I_az * omega_dot = k11*v1 + k12*v2 - c_az*omega - g_gyro*theta_dot
      I_p  * theta_ddot = k22*v2 + k21*v1 - c_p*theta_dot
                          - m_g*sin(theta) - tau_mass*cos(theta) + g_gyro*omega

* measurement-noise injection (sinusoid or seeded uniform), kept
  deterministic per (seed, t) so whole runs replay bitwise.

Angles are rad, rates rad/s, torques N*m, voltages V.  Azimuth velocity is
standardized to rad/s throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, DivergenceError, NonFiniteValueError

BLOWUP_LIMIT = 1e6
GRAVITY = 9.81

NOISE_KINDS = ("none", "sinusoid", "uniform")


@dataclass(frozen=True)
class NoiseSpec:
    """Measurement-noise description.

    ``sinusoid`` adds amplitude*sin(2*pi*frequency*t); ``uniform`` adds a
    zero-mean draw on [-amplitude, amplitude] derived deterministically from
    (seed, t).
    """

    kind: str = "none"
    amplitude: float = 0.0
    frequency: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"noise kind must be one of {NOISE_KINDS}")
        if self.amplitude < 0.0:
            raise ValueError("noise amplitude must be non-negative")
        if self.kind == "sinusoid" and self.frequency <= 0.0:
            raise ValueError("sinusoid noise needs frequency > 0")


NOISE_NONE = NoiseSpec()

_M64 = (1 << 64) - 1


def _splitmix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & _M64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return z ^ (z >> 31)


def inject_noise(y: float, spec: NoiseSpec, t: float) -> float:
    """Add the configured perturbation to one measurement.

    The uniform variant hashes (seed, bit pattern of t) through SplitMix64,
    so the same seed and the same query times always reproduce the same
    values with no shared state between channels, runs, or call order.
    """
    if spec.kind == "none" or spec.amplitude == 0.0:
        return y
    if spec.kind == "sinusoid":
        return y + spec.amplitude * math.sin(2.0 * math.pi * spec.frequency * t)
    t_bits = int(np.float64(t).view(np.uint64))
    word = _splitmix64(_splitmix64(spec.seed & _M64) ^ t_bits)
    return y + spec.amplitude * (2.0 * (word / 2.0**64) - 1.0)


def step_lti(y: float, a: float, b: float, d: float, u: float, dt: float) -> float:
    """Advance ydot = a*y + b*u + d by dt exactly (zero-order-hold input).

    Uses expm1 so the a -> 0 limit y + (b*u + d)*dt is reproduced without
    cancellation.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    if a == 0.0:
        return y + (b * u + d) * dt
    g = math.expm1(a * dt)
    return y + g * y + (b * u + d) * (g / a)


@dataclass(frozen=True)
class PlantState:
    """Generic simulated-plant state: a state vector and the current time."""

    x: tuple
    t: float


@dataclass(frozen=True)
class HalfQuadrotorParams:
    """Physical constants of the 2-DOF surrogate.

    ``thrust_*`` are the own-axis torque gains (N*m per volt), ``cross_*``
    the opposite-axis ones.  ``added_mass_torque`` is zero until a mass is
    attached.
    """

    inertia_azimuth: float
    inertia_pitch: float
    thrust_azimuth: float
    thrust_pitch: float
    cross_azimuth: float
    cross_pitch: float
    friction_azimuth: float
    friction_pitch: float
    gravity_torque: float
    gyro_coupling: float
    added_mass_torque: float = 0.0

    def __post_init__(self):
        if self.inertia_azimuth <= 0.0 or self.inertia_pitch <= 0.0:
            raise ValueError("inertias must be positive")
        if self.friction_azimuth < 0.0 or self.friction_pitch < 0.0:
            raise ValueError("frictions must be non-negative")


# Defaults sized so the reference gains (alpha1=0.001, kp1=0.5, alpha2=5,
# kp2=500 at 10 ms updates) give a stable, well-tracking loop at rad/s scale.
DEFAULT_HALF_QUADROTOR = HalfQuadrotorParams(
    inertia_azimuth=0.02,
    inertia_pitch=0.015,
    thrust_azimuth=2.4e-5,
    thrust_pitch=3.75e-3,
    cross_azimuth=2.0e-6,
    cross_pitch=1.0e-4,
    friction_azimuth=4.0e-4,
    friction_pitch=0.54,
    gravity_torque=0.30,
    gyro_coupling=5.0e-5,
)

HALF_QUADROTOR_AT_REST = PlantState(x=(0.0, 0.0, 0.0, 0.0), t=0.0)


def _hq_rates(x, p: HalfQuadrotorParams, v1: float, v2: float):
    omega, theta, theta_dot, _psi = x
    domega = (
        p.thrust_azimuth * v1
        + p.cross_azimuth * v2
        - p.friction_azimuth * omega
        - p.gyro_coupling * theta_dot
    ) / p.inertia_azimuth
    dtheta_dot = (
        p.thrust_pitch * v2
        + p.cross_pitch * v1
        - p.friction_pitch * theta_dot
        - p.gravity_torque * math.sin(theta)
        - p.added_mass_torque * math.cos(theta)
        + p.gyro_coupling * omega
    ) / p.inertia_pitch
    return (domega, theta_dot, dtheta_dot, omega)


def step_half_quadrotor(
    state: PlantState,
    params: HalfQuadrotorParams,
    v,
    noise,
    dt: float,
) -> tuple:
    """One RK4 step under held voltages; returns (state', (y1, y2)).

    y1 is the azimuth rate, y2 the pitch angle, each with its channel's
    measurement noise evaluated at the new time.  Raises DivergenceError
    once any state magnitude exceeds the blow-up guard.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    v1, v2 = float(v[0]), float(v[1])
    if not (math.isfinite(v1) and math.isfinite(v2)):
        raise NonFiniteValueError("voltages must be finite")

    x = state.x
    k1 = _hq_rates(x, params, v1, v2)
    x2 = tuple(xi + 0.5 * dt * ki for xi, ki in zip(x, k1))
    k2 = _hq_rates(x2, params, v1, v2)
    x3 = tuple(xi + 0.5 * dt * ki for xi, ki in zip(x, k2))
    k3 = _hq_rates(x3, params, v1, v2)
    x4 = tuple(xi + dt * ki for xi, ki in zip(x, k3))
    k4 = _hq_rates(x4, params, v1, v2)
    x_new = tuple(
        xi + dt / 6.0 * (a + 2.0 * b + 2.0 * c + d)
        for xi, a, b, c, d in zip(x, k1, k2, k3, k4)
    )

    for xi in x_new:
        if not math.isfinite(xi) or abs(xi) > BLOWUP_LIMIT:
            raise DivergenceError(f"half-quadrotor state diverged: {x_new}")

    t_new = state.t + dt
    noise = (NOISE_NONE, NOISE_NONE) if noise is None else noise
    y1 = inject_noise(x_new[0], noise[0], t_new)
    y2 = inject_noise(x_new[1], noise[1], t_new)
    return PlantState(x=x_new, t=t_new), (y1, y2)


def apply_added_mass(
    params: HalfQuadrotorParams, mass: float, arm: float = 0.2
) -> HalfQuadrotorParams:
    """Attach a point mass at ``arm`` meters from the pitch axis.

    Adds mass*g*arm of restoring torque and mass*arm**2 of pitch inertia.
    Controller gains are untouched; the loop must absorb the change through
    its disturbance estimate alone.
    """
    if mass < 0.0 or not math.isfinite(mass):
        raise ValueError(f"mass must be non-negative, got {mass}")
    if arm < 0.0 or not math.isfinite(arm):
        raise ValueError(f"arm must be non-negative, got {arm}")
    return replace(
        params,
        added_mass_torque=params.added_mass_torque + mass * GRAVITY * arm,
        inertia_pitch=params.inertia_pitch + mass * arm * arm,
    )


class HalfQuadrotorPlant:
    """Stateful wrapper used by the scenario harness.

    Sub-steps the RK4 integrator ``substeps`` times per control tick with
    the voltages held (zero-order hold between ticks).
    """

    n_outputs = 2

    def __init__(
        self,
        params: HalfQuadrotorParams = DEFAULT_HALF_QUADROTOR,
        substeps: int = 10,
        state: PlantState = HALF_QUADROTOR_AT_REST,
    ):
        if substeps < 1:
            raise ConfigError("substeps must be >= 1")
        self.params = params
        self.substeps = int(substeps)
        self.state = state

    def outputs(self) -> tuple:
        return (self.state.x[0], self.state.x[1])

    def step(self, v, dt: float) -> tuple:
        h = dt / self.substeps
        st = self.state
        for _ in range(self.substeps):
            st, _y = step_half_quadrotor(st, self.params, v, None, h)
        self.state = st
        return self.outputs()

    def apply_added_mass(self, mass: float, arm: float) -> None:
        self.params = apply_added_mass(self.params, mass, arm)


class FirstOrderPlant:
    """Scalar plant ydot = a*y + b*u + d(t) behind the harness step contract.

    ``d`` may be a constant or a callable of time; when ``d_integral`` (an
    antiderivative of d) is supplied together with a = 0 the update is
    exact, otherwise the drive term is sub-stepped.
    """

    n_outputs = 1

    def __init__(self, a=0.0, b=1.0, d=0.0, y0=0.0, d_integral=None, substeps=10):
        self.a = float(a)
        self.b = float(b)
        self.d = d
        self.d_integral = d_integral
        self.y = float(y0)
        self.t = 0.0
        self.substeps = int(substeps)

    def outputs(self) -> tuple:
        return (self.y,)

    def step(self, v, dt: float) -> tuple:
        u = float(v[0])
        if not callable(self.d):
            self.y = step_lti(self.y, self.a, self.b, float(self.d), u, dt)
        elif self.a == 0.0 and self.d_integral is not None:
            drive = self.d_integral(self.t + dt) - self.d_integral(self.t)
            self.y = self.y + self.b * u * dt + drive
        else:
            h = dt / self.substeps
            for i in range(self.substeps):
                t0 = self.t + i * h
                self.y = step_lti(self.y, self.a, self.b, float(self.d(t0 + 0.5 * h)), u, h)
        self.t += dt
        if not math.isfinite(self.y) or abs(self.y) > BLOWUP_LIMIT:
            raise DivergenceError(f"first-order plant diverged: y={self.y}")
        return self.outputs()

    def apply_added_mass(self, mass: float, arm: float) -> None:
        raise ConfigError("added-mass events only apply to the half-quadrotor plant")
