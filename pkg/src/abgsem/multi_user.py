"""Max-min quality power allocation across orthogonal users.

Each user occupies its own subchannel, so for a common quality level nu
the cheapest admissible powers decouple: user i needs exactly the power
that puts its curve at nu (zero if its floor already clears nu).  The
largest level whose total minimal power fits the budget is found by
bisection on nu; no coupled program has to be solved because the
per-level feasibility test is closed form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import LinkState
from .errors import (
    EmptyUserSetError,
    InfeasibleBoxError,
    LevelUnreachableError,
    ZeroChannelError,
)
from .model import AbgParams, eval_abg, required_snr

# Offset keeping the bisection ceiling strictly below every user's alpha.
_CEILING_MARGIN = 1e-9


@dataclass(frozen=True)
class UserLink:
    """One user's curve and physical link."""

    abg: AbgParams
    gain_sq: float
    noise_var: float

    def __post_init__(self):
        # Same physical-domain checks as LinkState; a zero gain is legal
        # to describe but rejected by the allocation ops.
        LinkState(self.gain_sq, self.noise_var)

    @property
    def link(self) -> LinkState:
        return LinkState(self.gain_sq, self.noise_var)


@dataclass(frozen=True)
class Allocation:
    """Result of an allocation: per-user powers and achieved levels."""

    powers: tuple[float, ...]
    nu: float
    achieved: tuple[float, ...]
    total: float
    iterations: int

    def __post_init__(self):
        if len(self.powers) != len(self.achieved):
            raise ValueError("powers and achieved must have equal length")
        if any(not p >= 0.0 for p in self.powers):
            raise ValueError("powers must be nonnegative")
        if self.achieved and self.nu > min(self.achieved) + 1e-9:
            raise ValueError("nu may not exceed the worst achieved level")


def min_power_for_level(user: UserLink, nu: float) -> float:
    """Cheapest power putting this user's metric at level nu.

    Zero when the user's zero-SNR floor already meets nu.  Raises
    LevelUnreachableError at or above the user's ceiling and
    ZeroChannelError when the link has no gain.
    """
    if user.gain_sq == 0.0:
        raise ZeroChannelError("user channel gain_sq is zero")
    if nu >= user.abg.alpha:
        raise LevelUnreachableError(
            f"level {nu} unreachable: user ceiling alpha is {user.abg.alpha}"
        )
    rho = required_snr(user.abg, nu)
    return rho * user.noise_var / user.gain_sq


def feasible(users, nu: float, budget: float):
    """Whether level nu fits the budget; returns (ok, per-user minimal powers).

    powers is None when some user cannot reach nu at any power.
    """
    try:
        powers = np.array([min_power_for_level(u, nu) for u in users], dtype=float)
    except LevelUnreachableError:
        return False, None
    return bool(powers.sum() <= budget), powers


def maxmin_bisection(users, budget: float, delta: float = 1e-6) -> Allocation:
    """Maximize the worst user's quality level under a total power budget.

    Bisects the level on [0, min(1, min_i alpha_i - 1e-9)] down to width
    delta.  Interior solutions then spend the leftover budget by scaling
    all powers proportionally, so the returned total saturates the
    budget; when even the ceiling level is affordable the minimal powers
    are returned as-is and the slack stays unspent.
    """
    users = tuple(users)
    if not users:
        raise EmptyUserSetError("at least one user is required")
    if not (np.isfinite(budget) and budget > 0.0):
        raise ValueError(f"budget must be finite and > 0, got {budget!r}")
    if not (np.isfinite(delta) and delta > 0.0):
        raise ValueError(f"delta must be finite and > 0, got {delta!r}")
    for user in users:
        if user.gain_sq == 0.0:
            raise ZeroChannelError("user channel gain_sq is zero")

    nu_lo = 0.0
    nu_hi = min(1.0, min(u.abg.alpha for u in users) - _CEILING_MARGIN)
    if nu_hi <= nu_lo:
        raise ValueError("user ceilings leave no level above 0 to search")

    ok, powers_lo = feasible(users, nu_lo, budget)
    if not ok:
        raise InfeasibleBoxError(
            f"budget {budget} cannot bring every user to level 0"
        )

    ok_hi, powers_hi = feasible(users, nu_hi, budget)
    if ok_hi:
        # Every user can afford its ceiling: return minimal powers and
        # leave the remaining budget unspent.
        return _allocation(users, nu_hi, powers_hi, iterations=0)

    iterations = 0
    while nu_hi - nu_lo > delta:
        iterations += 1
        nu_mid = 0.5 * (nu_lo + nu_hi)
        ok, powers = feasible(users, nu_mid, budget)
        if ok:
            nu_lo, powers_lo = nu_mid, powers
        else:
            nu_hi = nu_mid

    total = float(powers_lo.sum())
    if total > 0.0:
        powers_lo = powers_lo * (budget / total)
    return _allocation(users, nu_lo, powers_lo, iterations=iterations)


def _allocation(users, nu: float, powers: np.ndarray, iterations: int) -> Allocation:
    achieved = tuple(
        float(eval_abg(u.abg, p * u.gain_sq / u.noise_var))
        for u, p in zip(users, powers)
    )
    return Allocation(
        powers=tuple(float(p) for p in powers),
        nu=float(nu),
        achieved=achieved,
        total=float(np.sum(powers)),
        iterations=iterations,
    )
