"""Plain-text scenario configuration files.

Configs are INI-style key-value sections, diff-able and language-neutral,
with a mandatory ``[meta] schema_version`` key.  One canonical file ships
with the package for each of the four reference scenarios
(``scenario1`` .. ``scenario4``); ``load_config`` accepts either a builtin
name or a filesystem path, plus ``section.key=value`` overrides.

Layout (m channels, numbered from 1):

    [meta]      schema_version, name
    [run]       dt_control, duration, seed, plant_substeps
    [plant]     kind = half_quadrotor | lti, followed by its parameters
    [actuator]  offset, saturation
    [channelN]  alpha, kp, tau, estimator
    [referenceN] kind, initial, segments = start:target:duration, ...
                 sinusoids = amplitude:frequency:phase, ...
    [noiseN]    kind = none | sinusoid | uniform, amplitude, frequency, seed
    [perturbations] added_mass = time:mass:arm, ...   (optional)
    [pidN]      kp, ki, kd, deriv_tau, windup_limit   (optional)
"""

from __future__ import annotations

import configparser
from importlib import resources

from .controller import ActuatorMap, PidGains
from .errors import ConfigError
from .harness import AddedMassEvent, ChannelConfig, ScenarioConfig
from .plants import (
    FirstOrderPlant,
    HalfQuadrotorParams,
    HalfQuadrotorPlant,
    NoiseSpec,
)
from .trajectories import ReferenceSpec, Segment, Sinusoid

SCHEMA_VERSION = 1
BUILTIN_SCENARIOS = ("scenario1", "scenario2", "scenario3", "scenario4")


def _triples(text: str):
    out = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(":")
        if len(parts) != 3:
            raise ConfigError(f"expected 'a:b:c' triples, got {chunk!r}")
        out.append(tuple(float(p) for p in parts))
    return out


def _load_parser(path_or_name, overrides=()):
    parser = configparser.ConfigParser()
    name = str(path_or_name)
    if name in BUILTIN_SCENARIOS:
        text = resources.files("mfctrl").joinpath(f"configs/{name}.ini").read_text()
        parser.read_string(text)
    else:
        read = parser.read(name)
        if not read:
            raise ConfigError(f"config file not found: {name}")
    for ov in overrides:
        if "=" not in ov:
            raise ConfigError(f"override must be section.key=value, got {ov!r}")
        key, value = ov.split("=", 1)
        if "." not in key:
            raise ConfigError(f"override key must be section.key, got {key!r}")
        section, option = key.split(".", 1)
        if not parser.has_section(section):
            parser.add_section(section)
        parser.set(section.strip(), option.strip(), value.strip())
    return parser


def _build_plant_factory(parser, substeps):
    kind = parser.get("plant", "kind")
    if kind == "half_quadrotor":
        params = HalfQuadrotorParams(
            inertia_azimuth=parser.getfloat("plant", "inertia_azimuth"),
            inertia_pitch=parser.getfloat("plant", "inertia_pitch"),
            thrust_azimuth=parser.getfloat("plant", "thrust_azimuth"),
            thrust_pitch=parser.getfloat("plant", "thrust_pitch"),
            cross_azimuth=parser.getfloat("plant", "cross_azimuth"),
            cross_pitch=parser.getfloat("plant", "cross_pitch"),
            friction_azimuth=parser.getfloat("plant", "friction_azimuth"),
            friction_pitch=parser.getfloat("plant", "friction_pitch"),
            gravity_torque=parser.getfloat("plant", "gravity_torque"),
            gyro_coupling=parser.getfloat("plant", "gyro_coupling"),
            added_mass_torque=parser.getfloat("plant", "added_mass_torque", fallback=0.0),
        )
        return lambda: HalfQuadrotorPlant(params=params, substeps=substeps), 2
    if kind == "lti":
        a = parser.getfloat("plant", "a", fallback=0.0)
        b = parser.getfloat("plant", "b", fallback=1.0)
        d = parser.getfloat("plant", "d", fallback=0.0)
        y0 = parser.getfloat("plant", "y0", fallback=0.0)
        return lambda: FirstOrderPlant(a=a, b=b, d=d, y0=y0), 1
    raise ConfigError(f"unknown plant kind {kind!r}")


def _build_reference(parser, section):
    if not parser.has_section(section):
        raise ConfigError(f"missing section [{section}]")
    kind = parser.get(section, "kind")
    initial = parser.getfloat(section, "initial", fallback=0.0)
    segments = tuple(
        Segment(start=s, target=v, duration=d)
        for s, v, d in _triples(parser.get(section, "segments", fallback=""))
    )
    sinusoids = tuple(
        Sinusoid(amplitude=a, frequency=f, phase=p)
        for a, f, p in _triples(parser.get(section, "sinusoids", fallback=""))
    )
    return ReferenceSpec(kind=kind, initial=initial, segments=segments, sinusoids=sinusoids)


def _build_noise(parser, section):
    if not parser.has_section(section):
        return NoiseSpec()
    return NoiseSpec(
        kind=parser.get(section, "kind", fallback="none"),
        amplitude=parser.getfloat(section, "amplitude", fallback=0.0),
        frequency=parser.getfloat(section, "frequency", fallback=0.0),
        seed=parser.getint(section, "seed", fallback=0),
    )


def load_pid_gains(parser_or_path, n_channels=None, overrides=()):
    """Read optional [pidN] sections; returns a list or None when absent."""
    parser = (
        parser_or_path
        if isinstance(parser_or_path, configparser.ConfigParser)
        else _load_parser(parser_or_path, overrides)
    )
    gains = []
    i = 1
    while parser.has_section(f"pid{i}"):
        sec = f"pid{i}"
        gains.append(
            PidGains(
                kp=parser.getfloat(sec, "kp"),
                ki=parser.getfloat(sec, "ki", fallback=0.0),
                kd=parser.getfloat(sec, "kd", fallback=0.0),
                deriv_tau=parser.getfloat(sec, "deriv_tau", fallback=0.02),
                windup_limit=parser.getfloat(sec, "windup_limit", fallback=30.0),
            )
        )
        i += 1
    if not gains:
        return None
    if n_channels is not None and len(gains) != n_channels:
        raise ConfigError(f"found {len(gains)} [pidN] sections for {n_channels} channels")
    return gains


def load_config(path_or_name, overrides=(), seed=None) -> ScenarioConfig:
    """Build a ScenarioConfig from a builtin name or a config file path."""
    parser = _load_parser(path_or_name, overrides)
    try:
        version = parser.getint("meta", "schema_version")
    except (configparser.Error, ValueError) as exc:
        raise ConfigError(f"config lacks [meta] schema_version: {exc}") from exc
    if version != SCHEMA_VERSION:
        raise ConfigError(
            f"unsupported schema_version {version} (this build reads {SCHEMA_VERSION})"
        )
    name = parser.get("meta", "name", fallback=str(path_or_name))

    dt = parser.getfloat("run", "dt_control")
    duration = parser.getfloat("run", "duration")
    cfg_seed = parser.getint("run", "seed", fallback=0)
    substeps = parser.getint("run", "plant_substeps", fallback=10)

    plant_factory, n_outputs = _build_plant_factory(parser, substeps)

    channels, references, noises = [], [], []
    i = 1
    while parser.has_section(f"channel{i}"):
        sec = f"channel{i}"
        channels.append(
            ChannelConfig(
                alpha=parser.getfloat(sec, "alpha"),
                kp=parser.getfloat(sec, "kp"),
                tau=parser.getfloat(sec, "tau"),
                estimator_kind=parser.get(sec, "estimator", fallback="integral"),
            )
        )
        references.append(_build_reference(parser, f"reference{i}"))
        noises.append(_build_noise(parser, f"noise{i}"))
        i += 1
    if len(channels) != n_outputs:
        raise ConfigError(
            f"config defines {len(channels)} channels but plant has {n_outputs} outputs"
        )

    actuator = ActuatorMap(
        offset=parser.getfloat("actuator", "offset", fallback=10.0),
        saturation=parser.getfloat("actuator", "saturation", fallback=24.0),
    )

    events = []
    if parser.has_section("perturbations"):
        for t, mass, arm in _triples(parser.get("perturbations", "added_mass", fallback="")):
            events.append(AddedMassEvent(time=t, mass=mass, arm=arm))

    cfg = ScenarioConfig(
        name=name,
        plant_factory=plant_factory,
        channels=channels,
        references=references,
        noises=noises,
        actuator=actuator,
        dt_control=dt,
        duration=duration,
        seed=cfg_seed if seed is None else seed,
        events=events,
        pid_gains=load_pid_gains(parser, len(channels)),
    )
    cfg.validate()
    return cfg
