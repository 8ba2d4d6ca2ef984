"""Model-free control toolkit.

Ultra-local models, windowed algebraic disturbance estimation,
intelligent-proportional control, simulated plants, and a reproducible
scenario harness.
"""

from .controller import (
    ActuatorMap,
    IpChannel,
    PidController,
    PidGains,
    Setpoint,
    actuator_map,
    ip_control,
    ip_law,
    mimo_step,
    pid_control,
)
from .errors import (
    ConfigError,
    CsvIoError,
    DivergenceError,
    InsufficientDataError,
    MfcError,
    NonFiniteValueError,
    OutOfOrderSampleError,
    UndefinedScaleError,
)
from .estimator import (
    FEstimate,
    LoopSample,
    Sample,
    SlidingWindow,
    UltraLocalConfig,
    estimate_f_closed_loop,
    estimate_f_integral,
    push_sample,
    suggest_alpha,
)
from .harness import (
    AddedMassEvent,
    ChannelConfig,
    ComparisonResult,
    ScenarioConfig,
    ScenarioRecord,
    bench_estimator,
    compare_controllers,
    error_dynamics_residual,
    export_csv,
    read_csv,
    reference_range,
    run_scenario,
    tracking_rmse,
    tune_pid_grid,
    verify_causality,
)
from .configio import BUILTIN_SCENARIOS, load_config, load_pid_gains
from .plants import (
    DEFAULT_HALF_QUADROTOR,
    FirstOrderPlant,
    HalfQuadrotorParams,
    HalfQuadrotorPlant,
    NoiseSpec,
    PlantState,
    apply_added_mass,
    inject_noise,
    step_half_quadrotor,
    step_lti,
)
from .trajectories import (
    ReferenceSpec,
    Segment,
    Sinusoid,
    derivative_consistency_check,
    eval_reference,
    hold,
)

__version__ = "0.1.0"

__all__ = [
    "ActuatorMap",
    "AddedMassEvent",
    "BUILTIN_SCENARIOS",
    "ChannelConfig",
    "ComparisonResult",
    "ConfigError",
    "CsvIoError",
    "DEFAULT_HALF_QUADROTOR",
    "DivergenceError",
    "FEstimate",
    "FirstOrderPlant",
    "HalfQuadrotorParams",
    "HalfQuadrotorPlant",
    "InsufficientDataError",
    "IpChannel",
    "LoopSample",
    "MfcError",
    "NoiseSpec",
    "NonFiniteValueError",
    "OutOfOrderSampleError",
    "PidController",
    "PidGains",
    "PlantState",
    "ReferenceSpec",
    "Sample",
    "ScenarioConfig",
    "ScenarioRecord",
    "Segment",
    "Setpoint",
    "Sinusoid",
    "SlidingWindow",
    "UltraLocalConfig",
    "UndefinedScaleError",
    "actuator_map",
    "apply_added_mass",
    "bench_estimator",
    "compare_controllers",
    "derivative_consistency_check",
    "error_dynamics_residual",
    "estimate_f_closed_loop",
    "estimate_f_integral",
    "eval_reference",
    "export_csv",
    "hold",
    "inject_noise",
    "ip_control",
    "ip_law",
    "load_config",
    "load_pid_gains",
    "mimo_step",
    "pid_control",
    "push_sample",
    "read_csv",
    "reference_range",
    "run_scenario",
    "step_half_quadrotor",
    "step_lti",
    "suggest_alpha",
    "tracking_rmse",
    "tune_pid_grid",
    "verify_causality",
]
