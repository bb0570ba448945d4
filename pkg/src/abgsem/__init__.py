"""Link-quality modeling and power allocation for learned communication systems."""

from .channel import (
    RNG_ALGORITHM,
    ChannelModel,
    LinkState,
    make_stream,
    sample_gain,
    snr,
)
from .errors import (
    AbgsemError,
    EmptyUserSetError,
    InfeasibleBoxError,
    InfeasibleError,
    InsufficientSamplesError,
    IterationLimitError,
    LevelUnreachableError,
    NoDescentError,
    NonFiniteSampleError,
    TargetUnreachableError,
    ZeroChannelError,
)
from .experiments import (
    SCENARIOS,
    CdfTable,
    ExperimentConfig,
    build_manifest,
    calibrate_fixed_power,
    run_ee_sweep,
    run_maxmin_sweep,
    run_outage_cdf,
)
from .fitting import FitOptions, FitResult, fit_abg, fit_upper_bound
from .model import (
    POSITIVITY_FLOOR,
    AbgParams,
    BitScalingParams,
    MetricSample,
    ParamRecord,
    below_metric_floor,
    eval_abg,
    eval_upper_bound,
    load_reference_params,
    out_of_unit_range,
    reference_params,
    required_snr,
    sse,
)
from .multi_user import (
    Allocation,
    UserLink,
    feasible,
    maxmin_bisection,
    min_power_for_level,
)
from .single_user import (
    DinkelbachTrace,
    EeProblem,
    ParametricMax,
    adaptive_power,
    dinkelbach,
    energy_efficiency,
    maximize_parametric,
    rate_floor_power,
)

try:
    from importlib.metadata import version as _version

    __version__ = _version("abgsem")
except Exception:  # pragma: no cover - not installed
    __version__ = "0.0.0"

__all__ = [
    "AbgParams",
    "AbgsemError",
    "Allocation",
    "BitScalingParams",
    "CdfTable",
    "ChannelModel",
    "DinkelbachTrace",
    "EeProblem",
    "EmptyUserSetError",
    "ExperimentConfig",
    "FitOptions",
    "FitResult",
    "InfeasibleBoxError",
    "InfeasibleError",
    "InsufficientSamplesError",
    "IterationLimitError",
    "LevelUnreachableError",
    "LinkState",
    "MetricSample",
    "NoDescentError",
    "NonFiniteSampleError",
    "POSITIVITY_FLOOR",
    "ParamRecord",
    "ParametricMax",
    "RNG_ALGORITHM",
    "SCENARIOS",
    "TargetUnreachableError",
    "UserLink",
    "ZeroChannelError",
    "adaptive_power",
    "below_metric_floor",
    "build_manifest",
    "calibrate_fixed_power",
    "dinkelbach",
    "energy_efficiency",
    "eval_abg",
    "eval_upper_bound",
    "feasible",
    "fit_abg",
    "fit_upper_bound",
    "load_reference_params",
    "make_stream",
    "maximize_parametric",
    "maxmin_bisection",
    "min_power_for_level",
    "out_of_unit_range",
    "reference_params",
    "required_snr",
    "run_ee_sweep",
    "run_maxmin_sweep",
    "run_outage_cdf",
    "sample_gain",
    "snr",
    "sse",
]
