"""Semi-implicit finite differences for the allowance-price P(I)DE.

In reversed time ``tau = T - t`` the price ``beta(tau, x)`` solves

    beta_tau = -r(beta) beta_x + sigma^2/2 beta_xx
               + lambda * int [beta(x + a) - beta - a beta_x] nu(dy)

with ``beta(0, x) = pi * 1(x >= 0)``.  Each step is one tridiagonal solve:
diffusion, upwind advection and the local jump terms are implicit, the
nonlinear rate ``r(beta)`` and the non-local jump sum are taken from the
known level.  Values outside the truncated domain ``|x| < l`` are the ghost
values ``0`` (left) and ``pi`` (right).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .model import GridSpec, JumpSpec, ModelParams, validate

logger = logging.getLogger(__name__)

#: out-of-range slack tolerated (and clamped) when checking a computed level
RANGE_SLACK = 1e-9


class GridConditionError(ValueError):
    """A coefficient of the discrete operator turned negative."""


class MaxPrincipleError(RuntimeError):
    """A computed level left ``[0, upper]`` by more than :data:`RANGE_SLACK`."""


# -- jump quadrature -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Quadrature:
    """Cell masses ``nu_j`` of the jump law on cells centred at ``j*dx``."""

    dx: float
    J1: int
    J2: int
    weights: np.ndarray

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.J1, self.J2 + 1)

    @property
    def nodes(self) -> np.ndarray:
        return self.indices * self.dx


def quadrature_weights(distribution, dx: float, K1: float, K2: float) -> Quadrature:
    if not (hasattr(distribution, "cdf") and hasattr(distribution, "sf")):
        raise TypeError("jump distribution must provide cdf/sf")
    if not K1 < K2:
        raise ValueError("quadrature terminals need K1 < K2")
    if not dx > 0:
        raise ValueError("dx must be positive")
    J1 = int(np.floor(K1 / dx + 0.5))
    J2 = int(np.ceil(K2 / dx - 0.5))
    j = np.arange(J1, J2 + 1)
    lo, hi = (j - 0.5) * dx, (j + 0.5) * dx
    # differences of the upper tail on the right half keep tail cells accurate
    w = np.where(j > 0, distribution.sf(lo) - distribution.sf(hi),
                 distribution.cdf(hi) - distribution.cdf(lo))
    w = np.clip(np.asarray(w, dtype=float), 0.0, None)
    total = w.sum()
    if total > 1.0:
        w = w / total
    return Quadrature(dx, J1, J2, w)


def jump_quadrature(jumps: JumpSpec, grid: GridSpec) -> Quadrature:
    K1, K2 = jumps.quadrature_interval()
    return quadrature_weights(jumps.distribution, grid.dx, K1, K2)


def _targets(grid: GridSpec, jumps: JumpSpec, quad: Quadrature, n: int) -> np.ndarray:
    # nearest node to x_i + a, ties to the lower index: ceil(i + a/dx - 1/2)
    i = np.arange(grid.N)
    if jumps.is_shift:
        shift = np.ceil(quad.nodes / grid.dx - 0.5).astype(np.int64)
        return i[:, None] + shift[None, :]
    a = jumps.displacement(grid.time_of_level(n), grid.x[:, None], quad.nodes[None, :])
    return np.ceil(i[:, None] + a / grid.dx - 0.5).astype(np.int64)


def jump_target_index(i: int, j: int, n: int, grid: GridSpec, jumps: JumpSpec) -> int:
    """Grid index nearest to ``x_i + a(t_n, x_i, y_j)`` with ``y_j = j*dx``.

    Indices outside ``0..N-1`` are returned as they are; lookups there use
    the ghost values.
    """
    a = float(jumps.displacement(grid.time_of_level(n), grid.x[i], j * grid.dx))
    return int(np.ceil(i + a / grid.dx - 0.5))


def _ghost_lookup(row: np.ndarray, k: np.ndarray, upper: float) -> np.ndarray:
    N = row.size
    inside = row[np.clip(k, 0, N - 1)]
    return np.where(k < 0, 0.0, np.where(k >= N, upper, inside))


class _JumpOperator:
    """Per-level jump drift sums ``Sigma_i^n`` and quadrature sums."""

    def __init__(self, params: ModelParams, grid: GridSpec, quad: Optional[Quadrature] = None):
        self.grid = grid
        self.jumps = params.jumps
        self.quad = quad if quad is not None else jump_quadrature(self.jumps, grid)
        self._shift_targets = None

    def drift_sum(self, n: int) -> np.ndarray:
        q = self.quad
        if self.jumps.is_shift:
            return np.full(self.grid.N, float(q.nodes @ q.weights))
        t = self.grid.time_of_level(n)
        a = self.jumps.displacement(t, self.grid.x[:, None], q.nodes[None, :])
        return a @ q.weights

    def targets(self, n: int) -> np.ndarray:
        if self.jumps.is_shift:
            if self._shift_targets is None:
                self._shift_targets = _targets(self.grid, self.jumps, self.quad, n)
            return self._shift_targets
        return _targets(self.grid, self.jumps, self.quad, n)

    def gather(self, n: int, row: np.ndarray, upper: float) -> np.ndarray:
        vals = _ghost_lookup(row, self.targets(n), upper)
        return vals @ self.quad.weights


# -- one time step -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TridiagonalSystem:
    """``M(n) beta^{n+1} = y_n``.

    ``sub[i]`` multiplies ``beta_{i-1}`` and ``sup[i]`` multiplies
    ``beta_{i+1}``; ``sub[0]`` and ``sup[-1]`` couple to ghost values, which
    are already folded into ``rhs``, and are skipped by the solver.
    """

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray
    rhs: np.ndarray
    F: np.ndarray
    G: np.ndarray
    H: np.ndarray
    intensity: float
    dt: float

    def dominance_margin(self) -> np.ndarray:
        return np.abs(self.diag) - np.abs(self.sub) - np.abs(self.sup)

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.diag * v
        out[1:] += self.sub[1:] * v[:-1]
        out[:-1] += self.sup[:-1] * v[1:]
        return out


def assemble_step(n: int, row: np.ndarray, params: ModelParams, grid: GridSpec,
                  jump_op: Optional[_JumpOperator] = None, drift: Optional[np.ndarray] = None,
                  upper: Optional[float] = None) -> TridiagonalSystem:
    """Build the system advancing level ``n`` to ``n + 1``.

    ``drift`` overrides the lagged rate ``r(row)`` (used for the linear
    option equation, where the rate is frozen from the price surface) and
    ``upper`` the right ghost value (``pi`` by default).
    """
    row = np.asarray(row, dtype=float)
    upper = params.penalty if upper is None else upper
    lam = params.intensity
    dx, dt = grid.dx, grid.dt
    s2 = params.sigma_at(grid.time_of_level(n + 1), grid.x) ** 2
    rate = np.asarray(params.reduction(row) if drift is None else drift, dtype=float)
    if lam > 0:
        if jump_op is None:
            jump_op = _JumpOperator(params, grid)
        jsum = jump_op.drift_sum(n + 1)
    else:
        jsum = np.zeros(grid.N)

    H = s2 / (2.0 * dx * dx)
    F = s2 / (2.0 * dx * dx) + rate / dx + lam * jsum / dx
    G = s2 / (dx * dx) + rate / dx + lam * jsum / dx + lam
    if np.any(F < 0) or np.any(G < 0) or np.any(H < 0):
        raise GridConditionError(f"negative scheme coefficient at level {n} (grid condition violated)")

    rhs = row.copy()
    if lam > 0:
        rhs += lam * dt * jump_op.gather(n, row, upper)
    rhs[-1] += H[-1] * dt * upper
    return TridiagonalSystem(-F * dt, 1.0 + G * dt, -H * dt, rhs, F, G, H, lam, dt)


def thomas_solve(system: TridiagonalSystem) -> np.ndarray:
    """Forward elimination / back substitution for a tridiagonal system."""
    a = system.sub.tolist()
    b = system.diag.tolist()
    c = system.sup.tolist()
    d = system.rhs.tolist()
    n = len(b)
    cp = [0.0] * n
    dp = [0.0] * n
    if b[0] == 0.0:
        raise ZeroDivisionError("zero pivot in tridiagonal solve (dominance violated)")
    cp[0] = c[0] / b[0]
    dp[0] = d[0] / b[0]
    for i in range(1, n):
        denom = b[i] - a[i] * cp[i - 1]
        if denom == 0.0:
            raise ZeroDivisionError("zero pivot in tridiagonal solve (dominance violated)")
        cp[i] = c[i] / denom
        dp[i] = (d[i] - a[i] * dp[i - 1]) / denom
    x = [0.0] * n
    x[-1] = dp[-1]
    for i in range(n - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return np.array(x)


# -- surfaces ------------------------------------------------------------------

def interpolate_rows(values: np.ndarray, first_level: int, grid: GridSpec, t: float, x,
                     upper: float) -> np.ndarray:
    """Bilinear lookup in a block of levels ``first_level..`` of a surface.

    Times outside the block use the nearest row; ``x`` outside the domain
    gets the ghost values ``0`` / ``upper``.
    """
    u = (grid.T - t) / grid.dt - first_level
    u = min(max(u, 0.0), values.shape[0] - 1.0)
    lo = int(np.floor(u))
    hi = min(lo + 1, values.shape[0] - 1)
    w = u - lo
    row = values[lo] if w == 0.0 else (1.0 - w) * values[lo] + w * values[hi]
    xs = np.append(grid.x, grid.l)
    ys = np.append(row, upper)
    return np.interp(x, xs, ys, left=0.0, right=upper)


def _write_csv(path, label: str, coords: np.ndarray, grid: GridSpec, values: np.ndarray):
    header = ",".join([label] + [f"{v:.17g}" for v in grid.x])
    body = np.column_stack([coords, values])
    np.savetxt(path, body, fmt="%.17g", delimiter=",", header=header, comments="")


def _read_csv(path):
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    x = np.array([float(v) for v in header[1:]])
    return x, data[:, 0], data[:, 1:]


@dataclass(frozen=True, eq=False)
class PriceSurface:
    """Solved grid ``values[n, i] = beta(tau_n, x_i) = alpha(T - tau_n, x_i)``."""

    grid: GridSpec
    values: np.ndarray
    penalty: float
    warnings: tuple = field(default=())

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    @property
    def tau(self) -> np.ndarray:
        return self.grid.tau

    def row(self, t: float) -> np.ndarray:
        """``alpha(t, .)`` on the nodes, at the level nearest to ``t``."""
        return self.values[self.grid.level(t)]

    def __call__(self, t: float, x):
        """``alpha(t, x)`` by bilinear interpolation with ghost values."""
        return interpolate_rows(self.values, 0, self.grid, t, x, self.penalty)

    def to_csv(self, path):
        _write_csv(path, "tau", self.tau, self.grid, self.values)

    @classmethod
    def from_csv(cls, path, penalty: float) -> "PriceSurface":
        x, tau, values = _read_csv(path)
        N = x.size
        grid = GridSpec(l=-float(x[0]), N=N, M=tau.size - 1, T=float(tau[-1]))
        return cls(grid, values, penalty)


def _check_level(level: np.ndarray, upper: float, n: int, notes: list) -> np.ndarray:
    lo, hi = float(level.min()), float(level.max())
    if lo < -RANGE_SLACK or hi > upper + RANGE_SLACK:
        raise MaxPrincipleError(f"level {n} left [0, {upper}]: min {lo:.3e}, max {hi:.6g}")
    if lo < 0.0 or hi > upper:
        notes.append(f"level {n}: clamped round-off excursion (min {lo:.3e}, max-upper {hi - upper:.3e})")
        level = np.clip(level, 0.0, upper)
    return level


def march(params: ModelParams, grid: GridSpec, start: int, row: np.ndarray, upper: float,
          frozen: Optional[np.ndarray] = None, jump_op: Optional[_JumpOperator] = None):
    """Advance ``row`` from level ``start`` to ``M``.

    With ``frozen`` (a full price surface array) the rate is ``r(frozen[n])``,
    giving the linear option equation; otherwise ``r(row)`` (the price
    equation).  Returns the stacked levels and any range notes.
    """
    if params.intensity > 0 and jump_op is None:
        jump_op = _JumpOperator(params, grid)
    rows = [row]
    notes: list[str] = []
    for n in range(start, grid.M):
        drift = None if frozen is None else params.reduction(frozen[n])
        system = assemble_step(n, row, params, grid, jump_op, drift=drift, upper=upper)
        row = _check_level(thomas_solve(system), upper, n + 1, notes)
        rows.append(row)
    return np.array(rows), notes


def solve_surface(params: ModelParams, grid: GridSpec, allow_zero_sigma: bool = False) -> PriceSurface:
    """Solve the price equation on ``grid``; raises if validation fails."""
    validate(params, grid, allow_zero_sigma).raise_if_failed()
    initial = np.where(grid.x >= 0.0, params.penalty, 0.0)
    values, notes = march(params, grid, 0, initial, params.penalty)
    for note in notes:
        logger.debug(note)
    return PriceSurface(grid, values, params.penalty, tuple(notes))


def check_grid_condition(params: ModelParams, grid: GridSpec) -> bool:
    """``-Sigma* dx <= sigma*^2 / (2 lambda)``; vacuous without jumps."""
    lam = params.intensity
    if lam == 0:
        return True
    op = _JumpOperator(params, grid)
    sigma_min = np.inf
    jump_min = np.inf
    for n in range(grid.M + 1):
        sigma_min = min(sigma_min, float(np.min(params.sigma_at(grid.time_of_level(n), grid.x) ** 2)))
        jump_min = min(jump_min, float(np.min(op.drift_sum(n))))
    return bool(-jump_min * grid.dx <= sigma_min / (2.0 * lam))


def check_max_principle(surface) -> bool:
    v = surface.values
    return bool(np.all(v >= 0.0) and np.all(v <= surface.penalty))


@dataclass(frozen=True)
class Inversion:
    x: float
    level: int
    time: float


def invert_alpha(surface: PriceSurface, t: float, a: float) -> Inversion:
    """State ``x`` with ``alpha(t, x) = a``, read off the nearest time level."""
    if not 0.0 < a < surface.penalty:
        raise ValueError(f"price must lie strictly between 0 and the penalty, got {a}")
    grid = surface.grid
    n = grid.level(t)
    row = surface.values[n]
    above = row >= a
    if not above.any():
        raise ValueError(f"price {a} not attained at t={t} on the truncated domain")
    k = int(np.argmax(above))
    if k == 0:
        if row[0] == a:
            return Inversion(float(grid.x[0]), n, grid.time_of_level(n))
        raise ValueError(f"price {a} not attained at t={t} on the truncated domain")
    if np.any(row[k:] < a) or (k >= 2 and row[k - 2] > row[k - 1]):
        raise ValueError(f"price row at t={t} is not monotone around the crossing")
    if row[k] == a:
        x = float(grid.x[k])
    else:
        w = (a - row[k - 1]) / (row[k] - row[k - 1])
        x = float(grid.x[k - 1] + w * grid.dx)
    return Inversion(x, n, grid.time_of_level(n))
