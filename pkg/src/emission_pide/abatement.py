"""Abatement (reduction-rate) functions.

An abatement function maps an allowance price ``a`` to the rate at which
emissions are reduced when one allowance costs ``a``.  Three constructions are
supported: linear ``r(a) = c*a``, monotone tabulated samples, and the locally
optimal response to a convex cost curve, ``r(a) = argmax_{0<=x<=E} a*x - C(x)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True, eq=False)
class ConvexCost:
    """Strictly convex cost ``C(x)`` of reducing ``x`` units, with cap ``E``.

    ``fn`` must accept numpy arrays.  ``C(0) = 0`` and convexity are
    spot-checked on construction.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    cap: float = np.inf

    def __post_init__(self):
        if not self.cap > 0:
            raise ValueError(f"cost cap must be positive, got {self.cap}")
        c0 = float(self.fn(np.zeros(1))[0])
        if abs(c0) > 1e-12:
            raise ValueError(f"cost must vanish at zero reduction, C(0) = {c0}")
        span = self.cap if np.isfinite(self.cap) else 10.0
        x = np.linspace(0.0, span, 33)
        lo, hi = x[:-2], x[2:]
        mid = 0.5 * (lo + hi)
        c_mid = self(mid)
        c_avg = 0.5 * (self(lo) + self(hi))
        if np.any(c_mid >= c_avg):
            raise ValueError("cost function is not strictly convex on sampled triples")

    def __call__(self, x):
        return np.asarray(self.fn(np.asarray(x, dtype=float)), dtype=float)

    @classmethod
    def quadratic(cls, slope: float, cap: float = np.inf) -> "ConvexCost":
        """``C(x) = x**2 / (2*slope)``; its unconstrained response is ``slope*a``."""
        if not slope > 0:
            raise ValueError("quadratic cost slope must be positive")
        return cls(lambda x: x * x / (2.0 * slope), cap)


def _slope(cost: ConvexCost, x: np.ndarray, a: np.ndarray) -> np.ndarray:
    # a - C'(x) by central differences; one-sided at the left end of the domain
    h = 1e-5 * np.maximum(1.0, x)
    left = np.maximum(x - h, 0.0)
    return a - (cost(x + h) - cost(left)) / (x + h - left)


def reduction_from_cost(cost: ConvexCost, a):
    """Locally optimal reduction volume ``argmax{a*x - C(x) : 0 <= x <= E}``.

    Vectorized over ``a``.  The maximizer is bracketed by golden-section
    search and then polished by bisection on the sign of the marginal profit
    ``a - C'(x)``; flat stretches resolve to the smallest maximizer.  The
    bisection runs to ``1e-12 * max(1, E)`` (``E`` replaced by the search
    bracket when the cap is infinite), leaving the result well inside
    ``1e-10 * max(1, E)`` once finite-difference slope error is included.
    """
    scalar = np.ndim(a) == 0
    a = np.atleast_1d(np.asarray(a, dtype=float))
    if np.any(a < 0) or not np.all(np.isfinite(a)):
        raise ValueError("allowance price must be finite and non-negative")

    if np.isfinite(cost.cap):
        hi = np.full_like(a, cost.cap)
    else:
        hi = np.ones_like(a)
        for _ in range(1100):
            grow = _slope(cost, hi, a) > 0
            if not grow.any():
                break
            hi = np.where(grow, 2.0 * hi, hi)
        else:
            raise ValueError("could not bracket the optimal reduction (cost grows too slowly)")
    tol = 1e-12 * np.maximum(1.0, hi)

    def objective(x):
        return a * x - cost(x)

    # golden section down to a width comfortably above objective round-off
    lo = np.zeros_like(a)
    up = hi.copy()
    x1 = up - _GOLDEN * (up - lo)
    x2 = lo + _GOLDEN * (up - lo)
    f1, f2 = objective(x1), objective(x2)
    target = 1e-6 * np.maximum(1.0, hi)
    while np.any(up - lo > target):
        left = f1 >= f2
        up = np.where(left, x2, up)
        lo = np.where(left, lo, x1)
        x1_new = up - _GOLDEN * (up - lo)
        x2_new = lo + _GOLDEN * (up - lo)
        x1, x2 = x1_new, x2_new
        f1, f2 = objective(x1), objective(x2)

    # the golden bracket can be off by a few of its widths near flat optima
    width = up - lo
    lo = np.maximum(lo - 4.0 * width, 0.0)
    up = np.minimum(up + 4.0 * width, hi)
    lo = np.where(_slope(cost, lo, a) > 0, lo, 0.0)
    up = np.where(_slope(cost, up, a) <= 0, up, hi)
    while np.any(up - lo > tol):
        mid = 0.5 * (lo + up)
        rising = _slope(cost, mid, a) > 0
        lo = np.where(rising, mid, lo)
        up = np.where(rising, up, mid)
    x = up
    x = np.where(_slope(cost, hi, a) >= 0, hi, x)
    x = np.where(_slope(cost, np.zeros_like(a), a) <= 0, 0.0, x)
    return float(x[0]) if scalar else x


@dataclass(frozen=True, eq=False)
class AbatementFunction:
    """Non-decreasing continuous map from allowance price to reduction rate.

    Build with :meth:`linear`, :meth:`tabulated`, :meth:`from_cost` or
    :func:`aggregate`; instances are callable on scalars or arrays.
    """

    kind: str
    slope: float = 0.0
    prices: np.ndarray | None = None
    rates: np.ndarray | None = None
    cost: ConvexCost | None = None
    parts: tuple = field(default=())

    @classmethod
    def linear(cls, c: float) -> "AbatementFunction":
        if not c >= 0 or not np.isfinite(c):
            raise ValueError(f"linear abatement slope must be finite and >= 0, got {c}")
        return cls("linear", slope=float(c))

    @classmethod
    def tabulated(cls, prices: Sequence[float], rates: Sequence[float]) -> "AbatementFunction":
        """Piecewise-linear interpolation of samples, constant beyond the ends."""
        p = np.asarray(prices, dtype=float)
        r = np.asarray(rates, dtype=float)
        if p.ndim != 1 or p.shape != r.shape or p.size < 2:
            raise ValueError("tabulated abatement needs matching 1-d price/rate samples (>= 2)")
        if np.any(np.diff(p) <= 0):
            raise ValueError("tabulated prices must be strictly increasing")
        if np.any(np.diff(r) < 0):
            raise ValueError("tabulated rates must be non-decreasing")
        if r[0] < 0:
            raise ValueError("reduction rate must be non-negative")
        return cls("tabulated", prices=p, rates=r)

    @classmethod
    def from_cost(cls, cost: ConvexCost) -> "AbatementFunction":
        return cls("from_cost", cost=cost)

    def __call__(self, a):
        if self.kind == "linear":
            return self.slope * np.asarray(a, dtype=float)
        if self.kind == "tabulated":
            return np.interp(a, self.prices, self.rates)
        if self.kind == "from_cost":
            return reduction_from_cost(self.cost, np.maximum(a, 0.0))
        if self.kind == "sum":
            return sum(part(a) for part in self.parts)
        raise ValueError(f"unknown abatement kind {self.kind!r}")


def aggregate(reductions: Sequence[AbatementFunction]) -> AbatementFunction:
    """Total reduction of several agents: the pointwise sum."""
    reductions = list(reductions)
    if not reductions:
        raise ValueError("cannot aggregate an empty list of abatement functions")
    if len(reductions) == 1:
        return reductions[0]
    if all(r.kind == "linear" for r in reductions):
        return AbatementFunction.linear(sum(r.slope for r in reductions))
    return AbatementFunction("sum", parts=tuple(reductions))
