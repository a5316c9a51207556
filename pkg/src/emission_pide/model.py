"""Model parameters, jump specification and the finite-difference grid.

Conventions used throughout the package:

* ``t`` is calendar time in ``[0, T]``; the solvers march in reversed time
  ``tau = T - t`` and store ``beta(tau, x) = alpha(T - tau, x)``.
* User callables (volatility ``sigma(t, x)`` and the jump map
  ``a(t, x, y)``) always receive calendar time and must broadcast over
  numpy arrays.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
from scipy import special

from .abatement import AbatementFunction

SigmaLike = Union[float, Callable[[float, np.ndarray], np.ndarray]]
JumpMap = Callable[[float, np.ndarray, np.ndarray], np.ndarray]


# -- jump-size distributions -------------------------------------------------

@dataclass(frozen=True)
class NormalJumps:
    mean: float = 0.0
    std: float = 1.0

    def __post_init__(self):
        if not self.std > 0:
            raise ValueError("normal jump distribution needs std > 0")

    def cdf(self, y):
        return special.ndtr((np.asarray(y, dtype=float) - self.mean) / self.std)

    def sf(self, y):
        return special.ndtr((self.mean - np.asarray(y, dtype=float)) / self.std)

    def ppf(self, q):
        return self.mean + self.std * special.ndtri(q)

    def sample(self, rng: np.random.Generator, size):
        return rng.normal(self.mean, self.std, size)

    @property
    def first_moment(self) -> float:
        return self.mean

    @property
    def second_moment(self) -> float:
        return self.mean ** 2 + self.std ** 2


@dataclass(frozen=True)
class PointMassJumps:
    loc: float = 0.0

    def cdf(self, y):
        return (np.asarray(y, dtype=float) >= self.loc).astype(float)

    def sf(self, y):
        return 1.0 - self.cdf(y)

    def ppf(self, q):
        return np.full(np.shape(q), self.loc, dtype=float) if np.ndim(q) else self.loc

    def sample(self, rng: np.random.Generator, size):
        return np.full(size, self.loc, dtype=float)

    @property
    def first_moment(self) -> float:
        return self.loc

    @property
    def second_moment(self) -> float:
        return self.loc ** 2


@dataclass(frozen=True, eq=False)
class TabulatedJumps:
    """Jump density given on a grid; treated as piecewise linear, zero outside."""

    y: np.ndarray
    density: np.ndarray
    _cum: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float)
        d = np.asarray(self.density, dtype=float)
        if y.ndim != 1 or y.shape != d.shape or y.size < 2 or np.any(np.diff(y) <= 0):
            raise ValueError("tabulated jump density needs increasing 1-d nodes")
        if np.any(d < 0):
            raise ValueError("jump density must be non-negative")
        cum = np.concatenate([[0.0], np.cumsum(0.5 * (d[1:] + d[:-1]) * np.diff(y))])
        if not cum[-1] > 0:
            raise ValueError("jump density has zero mass")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "density", d / cum[-1])
        object.__setattr__(self, "_cum", cum / cum[-1])

    def cdf(self, y):
        return np.interp(y, self.y, self._cum, left=0.0, right=1.0)

    def sf(self, y):
        return 1.0 - self.cdf(y)

    def ppf(self, q):
        return np.interp(q, self._cum, self.y)

    def sample(self, rng: np.random.Generator, size):
        return self.ppf(rng.random(size))

    @property
    def first_moment(self) -> float:
        return float(np.trapezoid(self.y * self.density, self.y))

    @property
    def second_moment(self) -> float:
        return float(np.trapezoid(self.y ** 2 * self.density, self.y))


def shift_map(t, x, y):
    """Default jump map ``a(t, x, y) = y``: compensated compound Poisson jumps."""
    return np.broadcast_to(np.asarray(y, dtype=float), np.broadcast(x, y).shape)


@dataclass(frozen=True, eq=False)
class JumpSpec:
    """Jump intensity, jump-size law and jump map.

    ``terminals`` is the truncation interval ``[K1, K2]`` of the jump
    integral; by default the ``tail`` and ``1 - tail`` quantiles of the
    jump distribution.
    """

    intensity: float
    distribution: object = field(default_factory=NormalJumps)
    jump_map: Optional[JumpMap] = None
    terminals: Optional[tuple[float, float]] = None
    tail: float = 1e-6

    def __post_init__(self):
        if not self.intensity > 0:
            raise ValueError("jump intensity must be positive (omit jumps for lambda = 0)")
        if not 0 < self.tail < 0.5:
            raise ValueError("quadrature tail probability must lie in (0, 0.5)")
        if self.terminals is not None and not self.terminals[0] < self.terminals[1]:
            raise ValueError("jump quadrature terminals need K1 < K2")

    @property
    def is_shift(self) -> bool:
        return self.jump_map is None or self.jump_map is shift_map

    def displacement(self, t, x, y):
        fn = shift_map if self.jump_map is None else self.jump_map
        return np.broadcast_to(np.asarray(fn(t, x, y), dtype=float), np.broadcast(x, y).shape)

    def quadrature_interval(self) -> tuple[float, float]:
        if self.terminals is not None:
            return float(self.terminals[0]), float(self.terminals[1])
        k1 = float(self.distribution.ppf(self.tail))
        k2 = float(self.distribution.ppf(1.0 - self.tail))
        if k1 == k2:
            # degenerate law: any non-empty interval around the atom
            k1, k2 = k1 - 1e-12, k2 + 1e-12
        return k1, k2

    def compensator(self, t, x):
        """Jump compensator drift ``lambda * E[a(t, x, Y)]``."""
        if self.is_shift:
            return self.intensity * self.distribution.first_moment * np.ones_like(np.asarray(x, dtype=float))
        q = (np.arange(200) + 0.5) / 200.0
        ys = np.asarray(self.distribution.ppf(q), dtype=float)
        x = np.asarray(x, dtype=float)
        return self.intensity * self.displacement(t, x[..., None], ys).mean(axis=-1)


# -- model parameters ---------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ModelParams:
    """Complete problem description.

    ``sigma`` is either a positive constant or a callable ``sigma(t, x)``.  For
    callables the linear growth constants ``growth = (a, b)`` with
    ``sigma(t, x)**2 <= a + b*x**2`` must be declared; a constant ``sigma``
    defaults to ``(sigma**2, 0)``.
    """

    horizon: float
    penalty: float
    sigma: SigmaLike
    abatement: AbatementFunction
    jumps: Optional[JumpSpec] = None
    initial_state: float = 0.0
    growth: Optional[tuple[float, float]] = None

    def __post_init__(self):
        if not self.horizon > 0:
            raise ValueError(f"horizon T must be positive, got {self.horizon}")
        if not self.penalty > 0:
            raise ValueError(f"penalty must be positive, got {self.penalty}")
        if not np.isfinite(self.initial_state):
            raise ValueError("initial state must be finite")
        if callable(self.sigma):
            if self.growth is None:
                raise ValueError("state-dependent sigma requires declared growth constants (a, b)")
        else:
            # zero is allowed for frozen-noise simulations; validate() rejects it for solving
            if not float(self.sigma) >= 0:
                raise ValueError(f"sigma must be non-negative, got {self.sigma}")
            if self.growth is None:
                object.__setattr__(self, "growth", (float(self.sigma) ** 2, 0.0))
        a, b = self.growth
        if a < 0 or b < 0:
            raise ValueError("growth constants must be non-negative")
        if float(self.abatement(0.0)) < 0:
            raise ValueError("abatement must satisfy r(0) >= 0")

    @property
    def intensity(self) -> float:
        return 0.0 if self.jumps is None else self.jumps.intensity

    def sigma_at(self, t, x):
        x = np.asarray(x, dtype=float)
        if callable(self.sigma):
            return np.broadcast_to(np.asarray(self.sigma(t, x), dtype=float), x.shape)
        return np.full(x.shape, float(self.sigma))

    def reduction(self, a):
        return self.abatement(a)


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid ``x_i = -l + i*dx`` (``i < N``), ``tau_n = n*dt`` (``n <= M``).

    Structural sanity (``l, T > 0``, ``N, M >= 1``) is enforced here; the
    numerical requirement ``N >= 3`` is reported by :func:`validate`.
    """

    l: float
    N: int
    M: int
    T: float

    def __post_init__(self):
        if not self.l > 0 or not self.T > 0:
            raise ValueError("grid needs l > 0 and T > 0")
        if int(self.N) != self.N or int(self.M) != self.M or self.N < 1 or self.M < 1:
            raise ValueError("grid needs integer N >= 1 and M >= 1")

    @classmethod
    def from_steps(cls, l: float, dx: float, T: float, dt: float) -> "GridSpec":
        N = int(round(2 * l / dx))
        M = int(round(T / dt))
        if abs(N * dx - 2 * l) > 1e-9 * l or abs(M * dt - T) > 1e-9 * T:
            raise ValueError("step sizes must divide 2l and T")
        return cls(l, N, M, T)

    @property
    def dx(self) -> float:
        return 2.0 * self.l / self.N

    @property
    def dt(self) -> float:
        return self.T / self.M

    @property
    def x(self) -> np.ndarray:
        # written as l*(2i - N)/N so that x = 0 is hit exactly for even N
        return self.l * (2.0 * np.arange(self.N) - self.N) / self.N

    @property
    def tau(self) -> np.ndarray:
        return self.T * np.arange(self.M + 1) / self.M

    def level(self, t: float) -> int:
        """Nearest reversed-time level for calendar time ``t``."""
        return int(np.clip(round((self.T - t) / self.dt), 0, self.M))

    def time_of_level(self, n: int) -> float:
        return self.T - self.T * n / self.M


@dataclass
class ValidationReport:
    problems: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems

    def __bool__(self):
        return self.ok

    def raise_if_failed(self):
        if self.problems:
            raise ValueError("invalid model/grid: " + "; ".join(self.problems))


def validate(params: ModelParams, grid: GridSpec, allow_zero_sigma: bool = False) -> ValidationReport:
    """Check the parameter/grid combination; an empty report means usable.

    ``allow_zero_sigma`` accepts ``sigma = 0`` for jump-free models, where the
    scheme degenerates to monotone upwind transport; simulation front-ends use
    it for frozen-noise runs.
    """
    report = ValidationReport()
    if grid.N < 3:
        report.problems.append("N >= 3 violated")
    if abs(grid.T - params.horizon) > 1e-12 * params.horizon:
        report.problems.append("grid horizon differs from model horizon")

    x = grid.x
    a, b = params.growth
    sig_min = np.inf
    growth_ok = True
    for n in range(grid.M + 1):
        s = params.sigma_at(grid.time_of_level(n), x)
        sig_min = min(sig_min, float(s.min()))
        if np.any(s ** 2 > (a + b * x ** 2) * (1 + 1e-12)):
            growth_ok = False
    degenerate_ok = allow_zero_sigma and params.jumps is None and sig_min == 0
    if not (sig_min > 0 or degenerate_ok):
        report.problems.append("sigma > 0 violated on grid")
    if not growth_ok:
        report.problems.append("sigma^2 <= a + b x^2 violated on grid")

    prices = np.linspace(0.0, params.penalty, 65)
    rates = np.asarray(params.abatement(prices), dtype=float)
    if rates[0] < 0 or np.any(np.diff(rates) < -1e-9 * max(1.0, abs(rates).max())):
        report.problems.append("abatement not non-negative and non-decreasing on [0, penalty]")

    if params.jumps is not None and sig_min > 0:
        from .fd_engine import check_grid_condition

        if not check_grid_condition(params, grid):
            report.problems.append("grid condition -Sigma* dx <= sigma*^2 / (2 lambda) violated")
    return report
