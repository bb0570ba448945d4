"""Single-link power control: target tracking and energy efficiency.

Two regimes are covered.  Adaptive power control inverts the quality
curve to hold a metric target under the instantaneous channel.  Energy
efficiency maximization solves max phi(p) / (p + p_cir) over a power box
whose floor comes from a Shannon rate constraint; the fractional program
is handled by the classic parametric iteration, with each inner
subproblem solved globally by stationary-point enumeration so the outer
loop keeps its convergence guarantee even where phi is not concave.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import LinkState, require_nonzero_gain, snr
from .errors import InfeasibleBoxError, IterationLimitError
from .model import AbgParams, eval_abg, required_snr

# Steepness cap: the subproblem bracket grid resolves every sign change
# of F' only for transitions no sharper than this.
MAX_TAU = 16.0

# Log-spaced bracket grid for stationary-point search.
_GRID_POINTS = 512
_GRID_FLOOR_FRACTION = 1e-9
_BISECT_REL_TOL = 1e-12


@dataclass(frozen=True)
class EeProblem:
    """Energy-efficiency instance: curve, link, and operating constraints.

    Powers are in watts, bandwidth in Hz, min_rate in bit/s.  p_cir is
    the circuit power consumed regardless of transmit power.
    """

    abg: AbgParams
    link: LinkState
    p_cir: float
    bandwidth: float
    min_rate: float
    p_max: float

    def __post_init__(self):
        if not (np.isfinite(self.p_cir) and self.p_cir >= 0.0):
            raise ValueError(f"p_cir must be finite and >= 0, got {self.p_cir!r}")
        if not (np.isfinite(self.bandwidth) and self.bandwidth > 0.0):
            raise ValueError(f"bandwidth must be finite and > 0, got {self.bandwidth!r}")
        if not (np.isfinite(self.min_rate) and self.min_rate >= 0.0):
            raise ValueError(f"min_rate must be finite and >= 0, got {self.min_rate!r}")
        if not (np.isfinite(self.p_max) and self.p_max > 0.0):
            raise ValueError(f"p_max must be finite and > 0, got {self.p_max!r}")
        if self.abg.tau > MAX_TAU:
            raise ValueError(f"tau above {MAX_TAU} is outside the supported steepness range")


@dataclass(frozen=True)
class ParametricMax:
    """Global maximizer of F(p, v) over the power box.

    stationary_count > 1 means F had several interior stationary points;
    the reported maximizer is still global over all of them plus the box
    endpoints.
    """

    p: float
    f_value: float
    stationary_count: int


@dataclass(frozen=True)
class DinkelbachTrace:
    """Iteration record of the parametric outer loop.

    rows holds (iter, v, p, F) per iteration, in CSV column order.  The
    v sequence is nondecreasing by construction; construction rejects
    anything else as a solver defect.
    """

    rows: tuple[tuple[int, float, float, float], ...]
    p_star: float
    psi_star: float
    iterations: int
    converged: bool

    def __post_init__(self):
        vs = [row[1] for row in self.rows]
        if any(b < a for a, b in zip(vs, vs[1:])):
            raise ValueError("v sequence must be nondecreasing")


def adaptive_power(abg: AbgParams, link: LinkState, eta: float) -> float:
    """Transmit power holding metric target eta under the current channel.

    Inverts the quality curve at eta and scales by noise over gain.
    Raises TargetUnreachableError when eta is at or above the ceiling and
    ZeroChannelError when the link has no gain; returns 0.0 when the
    zero-SNR floor already meets eta.
    """
    require_nonzero_gain(link)
    rho = required_snr(abg, eta)
    return rho * link.noise_var / link.gain_sq


def energy_efficiency(abg: AbgParams, link: LinkState, power, p_cir: float):
    """Metric per consumed watt, phi(snr(p)) / (p + p_cir), scalar or array."""
    p = np.asarray(power, dtype=float)
    if not np.all(p >= 0.0):
        raise ValueError("power must be nonnegative")
    denom = p + p_cir
    if not np.all(denom > 0.0):
        raise ValueError("p + p_cir must be positive")
    value = eval_abg(abg, snr(p, link)) / denom
    if np.ndim(power) == 0:
        return float(value)
    return value


def rate_floor_power(problem: EeProblem) -> float:
    """Smallest power meeting the Shannon rate floor, (2^(r/B) - 1) sigma^2 / |h|^2.

    Raises InfeasibleBoxError when that floor exceeds p_max.
    """
    require_nonzero_gain(problem.link)
    floor = (2.0 ** (problem.min_rate / problem.bandwidth) - 1.0)
    p_low = floor * problem.link.noise_var / problem.link.gain_sq
    if p_low > problem.p_max:
        raise InfeasibleBoxError(
            f"rate floor needs {p_low:.6g} W but the power cap is {problem.p_max:.6g} W"
        )
    return p_low


def _phi_slope(problem: EeProblem, p: np.ndarray) -> np.ndarray:
    """d phi / d p at p > 0, stable for huge (beta * snr)^tau."""
    abg = problem.abg
    scale = abg.beta * problem.link.gain_sq / problem.link.noise_var
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        z = (scale * p) ** abg.tau
        ratio = np.where(z <= 1.0, z / (1.0 + z) ** 2, (1.0 / z) / (1.0 + 1.0 / z) ** 2)
    return abg.gamma * abg.tau * ratio / p


def _objective(problem: EeProblem, v: float, p) -> float | np.ndarray:
    phi = eval_abg(problem.abg, snr(p, problem.link))
    return phi - v * (np.asarray(p, dtype=float) + problem.p_cir)


def maximize_parametric(problem: EeProblem, v: float) -> ParametricMax:
    """Globally maximize F(p, v) = phi(p) - v (p + p_cir) over the power box.

    F' sign changes are bracketed on a log grid over the box and each
    bracket is refined by bisection; the best of all stationary points
    and the two endpoints is returned, preferring the smallest power on
    ties.
    """
    if not (np.isfinite(v) and v >= 0.0):
        raise ValueError(f"v must be finite and >= 0, got {v!r}")
    p_low = rate_floor_power(problem)
    p_high = problem.p_max

    candidates = [p_low, p_high]
    stationary = []
    if p_high > p_low:
        grid_lo = max(p_low, _GRID_FLOOR_FRACTION * p_high)
        grid = np.geomspace(grid_lo, p_high, _GRID_POINTS)
        slope = _phi_slope(problem, grid) - v

        exact = grid[slope == 0.0]
        stationary.extend(float(p) for p in exact)
        flips = np.nonzero(slope[:-1] * slope[1:] < 0.0)[0]
        for i in flips:
            lo, hi = float(grid[i]), float(grid[i + 1])
            sign_lo = slope[i] > 0.0
            while hi - lo > _BISECT_REL_TOL * hi:
                mid = 0.5 * (lo + hi)
                d_mid = float(_phi_slope(problem, np.asarray(mid)) - v)
                if d_mid == 0.0:
                    lo = hi = mid
                elif (d_mid > 0.0) == sign_lo:
                    lo = mid
                else:
                    hi = mid
            stationary.append(0.5 * (lo + hi))
        candidates.extend(stationary)

    best_p = None
    best_f = -math.inf
    for p in sorted(candidates):
        f = float(_objective(problem, v, p))
        if f > best_f:
            best_p, best_f = p, f
    return ParametricMax(p=best_p, f_value=best_f, stationary_count=len(stationary))


def dinkelbach(problem: EeProblem, xi: float = 1e-8) -> DinkelbachTrace:
    """Maximize energy efficiency by the parametric (Dinkelbach) iteration.

    Starting from v = 0, each round globally maximizes F(p, v) and sets
    the next v to the efficiency at the maximizer; the loop stops once
    the subproblem value falls to xi.  Because every subproblem is solved
    globally, the limit is the global efficiency optimum regardless of
    the curve's curvature.
    """
    if not (np.isfinite(xi) and xi >= 0.0):
        raise ValueError(f"xi must be finite and >= 0, got {xi!r}")
    rows = []
    v = 0.0
    for n in range(1, 1001):
        result = maximize_parametric(problem, v)
        p = result.p
        rows.append((n, v, p, result.f_value))
        if result.f_value <= xi:
            psi = energy_efficiency(problem.abg, problem.link, p, problem.p_cir)
            return DinkelbachTrace(tuple(rows), p, psi, iterations=n, converged=True)
        v = energy_efficiency(problem.abg, problem.link, p, problem.p_cir)
    psi = energy_efficiency(problem.abg, problem.link, p, problem.p_cir)
    raise IterationLimitError(
        f"no convergence to xi={xi} within 1000 iterations",
        trace=DinkelbachTrace(tuple(rows), p, psi, iterations=len(rows), converged=False),
    )
