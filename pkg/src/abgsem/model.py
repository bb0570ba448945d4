"""Saturating link-quality model and its bit-depth ceiling.

End-to-end quality of a learned image/inference link is an S-shaped
function of the receive SNR: it degrades to ``alpha - gamma`` as SNR
goes to zero and saturates at the ceiling ``alpha`` as SNR grows.  The
four-parameter form

    phi(rho) = alpha - gamma / (1 + (beta * rho)^tau)

captures that with a scale ``beta`` (transition location) and a shape
``tau`` (transition steepness).  The ceiling itself rises with the
encoder's quantization depth ``n_b`` following the same functional
shape, ``c1 - c3 / (1 + (c2 * n_b)^c4)``.

SNR ``rho`` is linear (not dB) everywhere in this module.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import TargetUnreachableError

# Strict positivity floor for all shape parameters.
POSITIVITY_FLOOR = 1e-12


def _require_positive(name: str, value: float) -> None:
    if not np.isfinite(value) or value < POSITIVITY_FLOOR:
        raise ValueError(f"{name} must be finite and >= {POSITIVITY_FLOOR}, got {value!r}")


@dataclass(frozen=True)
class AbgParams:
    """Parameters of the metric-vs-SNR curve.

    alpha: saturation ceiling of the metric
    beta:  SNR scale; transition sits near rho = 1/beta
    gamma: total depth of the curve (ceiling minus zero-SNR floor)
    tau:   transition steepness
    """

    alpha: float
    beta: float
    gamma: float
    tau: float

    def __post_init__(self):
        _require_positive("alpha", self.alpha)
        _require_positive("beta", self.beta)
        _require_positive("gamma", self.gamma)
        _require_positive("tau", self.tau)


@dataclass(frozen=True)
class BitScalingParams:
    """Parameters of the ceiling-vs-quantization-depth curve."""

    c1: float
    c2: float
    c3: float
    c4: float

    def __post_init__(self):
        _require_positive("c1", self.c1)
        _require_positive("c2", self.c2)
        _require_positive("c3", self.c3)
        _require_positive("c4", self.c4)


@dataclass(frozen=True)
class MetricSample:
    """One measured point (abscissa, metric value, nonnegative weight)."""

    x: float
    y: float
    weight: float = 1.0

    def __post_init__(self):
        # NaN fails both comparisons, so it is rejected here as well.
        if not self.x >= 0.0:
            raise ValueError(f"x must be >= 0, got {self.x!r}")
        if not self.weight >= 0.0:
            raise ValueError(f"weight must be >= 0, got {self.weight!r}")


def eval_abg(params: AbgParams, rho):
    """Evaluate the metric curve at linear SNR ``rho`` (scalar or array).

    Values are returned unclamped; use :func:`out_of_unit_range` to check
    whether a normalized metric left [0, 1].
    """
    rho_arr = np.asarray(rho, dtype=float)
    if not np.all(rho_arr >= 0.0):
        raise ValueError("rho must be nonnegative and finite")
    with np.errstate(over="ignore"):
        value = params.alpha - params.gamma / (1.0 + (params.beta * rho_arr) ** params.tau)
    if np.ndim(rho) == 0:
        return float(value)
    return value


def out_of_unit_range(value) -> bool | np.ndarray:
    """True where a normalized metric value lies outside [0, 1]."""
    arr = np.asarray(value, dtype=float)
    flagged = (arr < 0.0) | (arr > 1.0)
    if np.ndim(value) == 0:
        return bool(flagged)
    return flagged


def eval_upper_bound(params: BitScalingParams, n_bits):
    """Evaluate the metric ceiling at quantization depth ``n_bits``.

    ``n_bits`` is physically an integer bit count but any positive value
    is accepted so the curve can be evaluated on a continuous axis.
    """
    n_arr = np.asarray(n_bits, dtype=float)
    if not np.all(n_arr > 0.0):
        raise ValueError("n_bits must be positive")
    with np.errstate(over="ignore"):
        value = params.c1 - params.c3 / (1.0 + (params.c2 * n_arr) ** params.c4)
    if np.ndim(n_bits) == 0:
        return float(value)
    return value


def below_metric_floor(params: AbgParams, target: float) -> bool:
    """True when ``target`` is already met at zero SNR (target <= alpha - gamma)."""
    return target <= params.alpha - params.gamma


def required_snr(params: AbgParams, target: float) -> float:
    """Minimum linear SNR at which the curve reaches ``target``.

    Inverts phi(rho) = target.  Raises TargetUnreachableError when the
    target sits at or above the ceiling alpha; returns 0.0 when the
    zero-SNR floor already meets the target (see below_metric_floor).
    """
    if not np.isfinite(target):
        raise ValueError("target must be finite")
    if target >= params.alpha:
        raise TargetUnreachableError(
            f"target {target} unreachable: ceiling alpha is {params.alpha}"
        )
    depth = params.gamma / (params.alpha - target) - 1.0
    if depth <= 0.0:
        return 0.0
    return depth ** (1.0 / params.tau) / params.beta


def sse(params, samples) -> float:
    """Weighted sum of squared residuals of the model against samples.

    Dispatches on the parameter type: AbgParams evaluates the SNR curve,
    BitScalingParams the bit-depth ceiling.
    """
    x = np.array([s.x for s in samples], dtype=float)
    y = np.array([s.y for s in samples], dtype=float)
    w = np.array([s.weight for s in samples], dtype=float)
    if isinstance(params, AbgParams):
        predicted = eval_abg(params, x)
    elif isinstance(params, BitScalingParams):
        predicted = eval_upper_bound(params, x)
    else:
        raise TypeError(f"unsupported parameter type {type(params).__name__}")
    return float(np.sum(w * (predicted - y) ** 2))


@dataclass(frozen=True)
class ParamRecord:
    """One published parameter set for a (model, task, channel) combination."""

    model: str
    task: str
    channel: str
    metric: str
    abg: AbgParams
    abg_sse: float
    bit_scaling: BitScalingParams
    bit_scaling_sse: float
    validity_range: tuple[float, float] | None


def load_reference_params() -> list[ParamRecord]:
    """Load the bundled table of published fit parameters."""
    text = resources.files("abgsem").joinpath("fixtures/published_params.json").read_text()
    records = []
    for row in json.loads(text)["records"]:
        vr = row["validity_range"]
        records.append(
            ParamRecord(
                model=row["model"],
                task=row["task"],
                channel=row["channel"],
                metric=row["metric"],
                abg=AbgParams(**row["abg"]),
                abg_sse=row["abg_sse"],
                bit_scaling=BitScalingParams(**row["bit_scaling"]),
                bit_scaling_sse=row["bit_scaling_sse"],
                validity_range=None if vr is None else (vr[0], vr[1]),
            )
        )
    return records


def reference_params(model: str, task: str = "reconstruction") -> ParamRecord:
    """Look up one bundled parameter record by model name and task."""
    for record in load_reference_params():
        if record.model == model and record.task == task:
            return record
    raise KeyError(f"no bundled parameters for model={model!r} task={task!r}")
