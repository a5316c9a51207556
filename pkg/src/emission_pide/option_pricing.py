"""European calls on the allowance price.

The call value ``f(t, x) = E[(alpha(tau_opt, X_tau_opt) - K)^+ | X_t = x]``
solves the linear version of the price equation: the same operator with the
rate frozen at ``r(alpha(t, x))`` read from a solved price surface, and
terminal data ``(alpha(tau_opt, x) - K)^+``.  With jumps the jump integral is
applied to ``f`` with ghost values ``0`` (left) and ``pi - K`` (right); this
option equation is a construction of this package, not a quoted formula.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fd_engine import PriceSurface, _read_csv, _write_csv, interpolate_rows, invert_alpha, march
from .model import ModelParams


@dataclass(frozen=True)
class CallSpec:
    strike: float
    maturity: float
    valuation_time: float = 0.0

    def check(self, params: ModelParams):
        if not 0.0 <= self.strike <= params.penalty:
            raise ValueError("strike must lie in [0, penalty]")
        if not 0.0 <= self.valuation_time <= self.maturity <= params.horizon:
            raise ValueError("need 0 <= valuation time <= maturity <= T")


@dataclass(frozen=True, eq=False)
class CallSurface:
    """Call values on the price grid for levels ``start_level..M``.

    Row ``m`` is calendar time ``T - tau_{start_level + m}``; row 0 is the
    payoff at maturity.
    """

    alpha: PriceSurface
    spec: CallSpec
    start_level: int
    values: np.ndarray
    warnings: tuple = field(default=())

    @property
    def upper(self) -> float:
        return self.alpha.penalty - self.spec.strike

    def __call__(self, t: float, x):
        return interpolate_rows(self.values, self.start_level, self.alpha.grid, t, x, self.upper)

    def to_csv(self, path):
        grid = self.alpha.grid
        _write_csv(path, "tau", grid.tau[self.start_level:], grid, self.values)

    @staticmethod
    def read_csv(path):
        """Raw ``(x, tau, values)`` arrays of a written call surface."""
        return _read_csv(path)


def solve_call_surface(alpha: PriceSurface, spec: CallSpec, params: ModelParams) -> CallSurface:
    spec.check(params)
    grid = alpha.grid
    start = grid.level(spec.maturity)
    if abs(grid.time_of_level(start) - spec.maturity) > 1e-9 * max(1.0, grid.T):
        raise ValueError(f"maturity {spec.maturity} is not a time level of the grid (dt = {grid.dt})")
    upper = params.penalty - spec.strike
    payoff = np.maximum(alpha.values[start] - spec.strike, 0.0)
    values, notes = march(params, grid, start, payoff, upper, frozen=alpha.values)
    return CallSurface(alpha, spec, start, values, tuple(notes))


def price_call(alpha: PriceSurface, call_surface: CallSurface, t: float, a: float) -> float:
    """Call price at time ``t`` given the spot allowance price ``a``."""
    grid = alpha.grid
    if grid.level(t) < call_surface.start_level:
        raise ValueError("valuation time lies after the option maturity")
    if grid.level(t) == call_surface.start_level:
        # expiring contract: f = (alpha(tau, x) - K)^+ with alpha(tau, x) = a
        if not 0.0 < a < alpha.penalty:
            raise ValueError("spot price must lie strictly between 0 and the penalty")
        return max(a - call_surface.spec.strike, 0.0)
    x = invert_alpha(alpha, t, a).x
    return float(call_surface(t, x))
