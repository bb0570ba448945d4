"""Weighted least-squares fitting of the saturating curve family.

Both curves in :mod:`abgsem.model` share the functional form
``f(x) = a - g / (1 + (b x)^t)``, so one damped least-squares engine
serves them.  Parameters live in log space, which keeps them strictly
positive without constrained steps, and the Jacobian is analytic.
Randomized multistart makes the non-convex landscape tractable; with a
fixed seed the whole fit is bitwise reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientSamplesError, NoDescentError, NonFiniteSampleError
from .model import POSITIVITY_FLOOR, AbgParams, BitScalingParams

_DEFAULT_BOUNDS = ((POSITIVITY_FLOOR, math.inf),) * 4

# Below this spread the data carry no depth information and gamma is
# unidentifiable; the fit short-circuits to a flat curve instead.
FLAT_SPREAD = 1e-6

# Cap on log-parameters so exp() stays finite.
_LOG_CAP = 700.0


@dataclass(frozen=True)
class FitOptions:
    """Knobs of the least-squares engine.

    bounds is a box ((lo, hi), ...) over (a, b, g, t) in natural units,
    matching the field order of the fitted parameter type.
    """

    max_iterations: int = 200
    tolerance: float = 1e-10
    multistart_count: int = 16
    seed: int = 0
    bounds: tuple[tuple[float, float], ...] = _DEFAULT_BOUNDS

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.tolerance > 0.0:
            raise ValueError("tolerance must be > 0")
        if self.multistart_count < 1:
            raise ValueError("multistart_count must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be >= 0")
        if len(self.bounds) != 4:
            raise ValueError("bounds must give (lo, hi) for all four parameters")
        for lo, hi in self.bounds:
            if not (lo >= POSITIVITY_FLOOR and hi > lo):
                raise ValueError(f"invalid bound ({lo!r}, {hi!r})")


@dataclass(frozen=True)
class FitResult:
    """Outcome of a fit: best parameters plus convergence diagnostics.

    validity_range is the abscissa span of the data actually fitted;
    degenerate marks the flat-data short circuit where only the ceiling
    is identifiable.
    """

    params: AbgParams | BitScalingParams
    sse: float
    iterations: int
    converged: bool
    validity_range: tuple[float, float]
    degenerate: bool = False


def _family(theta: np.ndarray, x: np.ndarray) -> np.ndarray:
    a, b, g, t = theta
    with np.errstate(over="ignore"):
        z = (b * x) ** t
    return a - g / (1.0 + z)


def _jacobian_log(theta: np.ndarray, x: np.ndarray, sqrt_w: np.ndarray) -> np.ndarray:
    """Jacobian of the weighted residuals w.r.t. log-parameters.

    Columns follow (a, b, g, t).  The ratio z/(1+z)^2 is computed from
    whichever of z and 1/z is small so huge (b x)^t never turns into
    inf/inf.
    """
    a, b, g, t = theta
    bx = b * x
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        z = bx**t
        ratio = np.where(z <= 1.0, z / (1.0 + z) ** 2, (1.0 / z) / (1.0 + 1.0 / z) ** 2)
        log_bx = np.where(x > 0.0, np.log(np.where(x > 0.0, bx, 1.0)), 0.0)
        d_a = np.ones_like(x)
        d_b = g * t * ratio / b
        d_g = -1.0 / (1.0 + z)
        d_t = g * ratio * log_bx
    jac = np.column_stack([d_a, d_b, d_g, d_t])
    jac *= theta[np.newaxis, :]  # chain rule d theta / d log theta
    jac *= sqrt_w[:, np.newaxis]
    return jac


def _levenberg_step_loop(x, y, sqrt_w, u0, u_lo, u_hi, options):
    """Damped normal-equation descent from one start.

    Returns (theta, sse, iterations, converged) or None when the start
    never produced a finite objective.
    """
    def weighted_cost(theta):
        # Trial steps may overflow; inf cost just means "reject".
        with np.errstate(over="ignore"):
            res = sqrt_w * (_family(theta, x) - y)
            return res, float(res @ res)

    u = np.clip(u0, u_lo, u_hi)
    theta = np.exp(u)
    residual, cost = weighted_cost(theta)
    if not math.isfinite(cost):
        return None

    lam = 1e-3
    converged = False
    iterations = 0
    for _ in range(options.max_iterations):
        iterations += 1
        jac = _jacobian_log(theta, x, sqrt_w)
        grad = jac.T @ residual
        normal = jac.T @ jac
        diag = np.maximum(np.diag(normal), 1e-14)

        accepted = False
        for _ in range(40):
            try:
                step = np.linalg.solve(normal + lam * np.diag(diag), -grad)
            except np.linalg.LinAlgError:
                lam = min(lam * 10.0, 1e14)
                continue
            u_new = np.clip(u + step, u_lo, u_hi)
            theta_new = np.exp(u_new)
            residual_new, cost_new = weighted_cost(theta_new)
            if math.isfinite(cost_new) and cost_new <= cost:
                accepted = True
                break
            lam = min(lam * 10.0, 1e14)
        if not accepted:
            # No improving direction even with heavy damping: stationary
            # to float precision.
            converged = True
            break

        reduction = cost - cost_new
        step_size = float(np.max(np.abs(np.clip(u + step, u_lo, u_hi) - u)))
        u, theta, residual, cost = u_new, theta_new, residual_new, cost_new
        lam = max(lam / 3.0, 1e-12)

        if step_size <= 1e-12 or reduction <= options.tolerance * max(cost, 1e-300):
            converged = True
            break

    return theta, cost, iterations, converged


def _check_samples(samples):
    x = np.array([s.x for s in samples], dtype=float)
    y = np.array([s.y for s in samples], dtype=float)
    w = np.array([s.weight for s in samples], dtype=float)
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y)) and np.all(np.isfinite(w))):
        raise NonFiniteSampleError("samples contain non-finite values")
    if len(x) < 5 or len(np.unique(x)) < 3:
        raise InsufficientSamplesError(
            f"need >= 5 samples with >= 3 distinct x, got {len(x)} samples, "
            f"{len(np.unique(x))} distinct"
        )
    return x, y, w


def _fit_family(samples, options: FitOptions):
    """Shared engine; returns (theta, sse, iterations, converged, degenerate, span)."""
    x, y, w = _check_samples(samples)
    span = (float(np.min(x)), float(np.max(x)))
    sqrt_w = np.sqrt(w)

    lo = np.array([b[0] for b in options.bounds])
    hi = np.array([b[1] for b in options.bounds])
    u_lo = np.log(lo)
    u_hi = np.minimum(np.log(hi), _LOG_CAP)

    x_pos = x[x > 0.0]
    spread = float(np.max(y) - np.min(y))

    if spread < FLAT_SPREAD:
        # Flat data: only the ceiling is identifiable, pin gamma at its
        # lower bound and report the weighted mean as the ceiling.
        total_w = float(np.sum(w))
        level = float(np.sum(w * y) / total_w) if total_w > 0.0 else float(np.mean(y))
        beta0 = 1.0 / math.sqrt(float(x_pos.min()) * float(x_pos.max()))
        theta = np.clip(np.array([max(level, POSITIVITY_FLOOR), beta0, lo[2], 1.0]),
                        lo, np.exp(u_hi))
        residual = sqrt_w * (_family(theta, x) - y)
        return theta, float(residual @ residual), 0, True, True, span

    rng = np.random.default_rng(options.seed)
    count = options.multistart_count
    # Ceiling start: the largest observed value, guarded to stay positive
    # for curves measured entirely below zero.
    a0 = max(float(np.max(y)), 0.01 * spread, 1e-6)
    g0 = spread
    b_lo, b_hi = 1.0 / float(x_pos.max()), 1.0 / float(x_pos.min())
    b0s = np.exp(rng.uniform(math.log(b_lo), math.log(b_hi), size=count))
    t0s = np.exp(rng.uniform(math.log(0.25), math.log(4.0), size=count))

    best = None
    for b0, t0 in zip(b0s, t0s):
        theta0 = np.array([a0, b0, g0, t0])
        outcome = _levenberg_step_loop(x, y, sqrt_w, np.log(theta0), u_lo, u_hi, options)
        if outcome is None:
            continue
        theta, cost, iterations, converged = outcome
        key = (cost, theta[3], theta[1])  # sse, then flattest, then smallest scale
        if best is None or key < best[0]:
            best = (key, theta, cost, iterations, converged)

    if best is None:
        raise NoDescentError("all multistart fits failed to produce a finite objective")
    _, theta, cost, iterations, converged = best
    return theta, cost, iterations, converged, False, span


def fit_abg(samples, options: FitOptions | None = None) -> FitResult:
    """Fit the metric-vs-SNR curve to samples with x as linear SNR."""
    options = options or FitOptions()
    theta, cost, iterations, converged, degenerate, span = _fit_family(samples, options)
    params = AbgParams(alpha=float(theta[0]), beta=float(theta[1]),
                       gamma=float(theta[2]), tau=float(theta[3]))
    return FitResult(params, cost, iterations, converged, span, degenerate)


def fit_upper_bound(samples, options: FitOptions | None = None) -> FitResult:
    """Fit the ceiling-vs-quantization-depth curve to samples with x as bit count."""
    options = options or FitOptions()
    theta, cost, iterations, converged, degenerate, span = _fit_family(samples, options)
    params = BitScalingParams(c1=float(theta[0]), c2=float(theta[1]),
                              c3=float(theta[2]), c4=float(theta[3]))
    return FitResult(params, cost, iterations, converged, span, degenerate)
