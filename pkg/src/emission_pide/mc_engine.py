"""Forward-Euler simulation of the state process and Monte Carlo pricing.

One step of length ``dt`` is

    X <- X - r(alpha(t, X)) dt + sigma(t, X) sqrt(dt) Z
           + sum of a(t, X, Y_k) over the jumps in the step - compensator * dt

with a Poisson(lambda dt) jump count.  Path ``k`` draws all its randomness
from its own stream ``SeedSequence(seed, spawn_key=(k,))``, so results do not
depend on how paths are batched or ordered.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .fd_engine import PriceSurface, invert_alpha
from .model import ModelParams
from .option_pricing import CallSpec


class PathExitError(RuntimeError):
    """A simulated path left the truncated domain ``[-l, l]``."""


@dataclass(frozen=True, eq=False)
class PathBundle:
    times: np.ndarray
    states: np.ndarray  # (n_paths, n_steps + 1)
    jump_counts: np.ndarray  # (n_paths, n_steps), jumps in (t_k, t_{k+1}]
    jump_sizes: list  # per path, sizes in draw order
    exited: np.ndarray  # (n_paths,) bool

    @property
    def exit_fraction(self) -> float:
        return float(self.exited.mean())


@dataclass(frozen=True, eq=False)
class SimulatedPath:
    times: np.ndarray
    states: np.ndarray
    prices: np.ndarray
    jump_times: np.ndarray
    jump_sizes: np.ndarray

    @property
    def jump_flags(self) -> np.ndarray:
        flags = np.zeros(self.times.size, dtype=int)
        idx = np.searchsorted(self.times, self.jump_times)
        np.add.at(flags, idx, 1)
        return flags

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "X", "A", "jump_flag"])
            for row in zip(self.times, self.states, self.prices, self.jump_flags):
                w.writerow([f"{row[0]:.17g}", f"{row[1]:.17g}", f"{row[2]:.17g}", int(row[3])])


@dataclass(frozen=True)
class McEstimate:
    mean: float
    half_width_95: float
    n_samples: int
    seed: int

    @property
    def ci_low(self) -> float:
        return self.mean - self.half_width_95

    @property
    def ci_high(self) -> float:
        return self.mean + self.half_width_95

    @classmethod
    def from_samples(cls, samples: np.ndarray, seed: int) -> "McEstimate":
        n = samples.size
        mean = float(np.mean(samples))
        std = float(np.std(samples, ddof=1)) if n > 1 else 0.0
        return cls(mean, float(1.96 * std / np.sqrt(n)), n, seed)


def write_estimates_csv(path, estimates):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["mean", "ci_low", "ci_high", "n", "seed"])
        for e in estimates:
            w.writerow([f"{e.mean:.17g}", f"{e.ci_low:.17g}", f"{e.ci_high:.17g}", e.n_samples, e.seed])


def _n_steps(t_start: float, t_end: float, dt: float) -> int:
    if not dt > 0:
        raise ValueError("time step must be positive")
    if t_end < t_start:
        raise ValueError("t_end must not precede t_start")
    k = int(round((t_end - t_start) / dt))
    if abs(k * dt - (t_end - t_start)) > 1e-9 * max(1.0, t_end - t_start):
        raise ValueError("time step must divide the simulation interval")
    return k


def _path_draws(params: ModelParams, seed: int, path: int, n_steps: int, dt: float):
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(path,)))
    z = rng.standard_normal(n_steps)
    if params.jumps is None:
        return z, np.zeros(n_steps, dtype=np.int64), np.empty(0)
    counts = rng.poisson(params.intensity * dt, n_steps)
    sizes = np.asarray(params.jumps.distribution.sample(rng, int(counts.sum())), dtype=float)
    return z, counts, sizes


def simulate_paths(alpha: PriceSurface, params: ModelParams, x_start: float, t_start: float,
                   t_end: float, dt: float, n_paths: int, seed: int,
                   bound: float | None = None) -> PathBundle:
    """Simulate ``n_paths`` independent paths; ``exited`` flags ``|X| > bound``.

    ``bound`` defaults to the surface half-width ``l``.  Exited paths keep
    evolving; price lookups beyond the grid use the ghost values.
    """
    if not np.isfinite(x_start):
        raise ValueError("starting state must be finite")
    n_steps = _n_steps(t_start, t_end, dt)
    bound = alpha.grid.l if bound is None else bound
    times = t_start + dt * np.arange(n_steps + 1)
    if n_steps:
        times[-1] = t_end

    z = np.empty((n_paths, n_steps))
    counts = np.zeros((n_paths, n_steps), dtype=np.int64)
    sizes_per_path = []
    for k in range(n_paths):
        z[k], counts[k], s = _path_draws(params, seed, k, n_steps, dt)
        sizes_per_path.append(s)

    max_c = int(counts.max()) if counts.size else 0
    padded = np.full((n_paths, n_steps, max_c), np.nan)
    for k, s in enumerate(sizes_per_path):
        if s.size:
            steps = np.repeat(np.arange(n_steps), counts[k])
            slot = np.arange(s.size) - np.repeat(np.cumsum(counts[k]) - counts[k], counts[k])
            padded[k, steps, slot] = s

    X = np.empty((n_paths, n_steps + 1))
    X[:, 0] = x_start
    exited = np.abs(X[:, 0]) > bound
    sqdt = np.sqrt(dt)
    jumps = params.jumps
    for k in range(n_steps):
        t = times[k]
        x = X[:, k]
        price = alpha(t, x)
        step = -params.reduction(price) * dt + params.sigma_at(t, x) * sqdt * z[:, k]
        if jumps is not None:
            if max_c:
                ys = padded[:, k, :]
                disp = jumps.displacement(t, x[:, None], np.nan_to_num(ys))
                step = step + np.where(np.isnan(ys), 0.0, disp).sum(axis=1)
            step = step - jumps.compensator(t, x) * dt
        X[:, k + 1] = x + step
        exited |= np.abs(X[:, k + 1]) > bound
    return PathBundle(times, X, counts, sizes_per_path, exited)


def simulate_path(alpha: PriceSurface, params: ModelParams, x_start: float, t_start: float,
                  t_end: float, dt: float, seed: int) -> SimulatedPath:
    """A single recorded path (the stream of path index 0 for ``seed``)."""
    bundle = simulate_paths(alpha, params, x_start, t_start, t_end, dt, 1, seed)
    if bundle.exited[0]:
        raise PathExitError(f"path left [-{alpha.grid.l}, {alpha.grid.l}]; enlarge l")
    states = bundle.states[0]
    prices = np.array([float(alpha(t, x)) for t, x in zip(bundle.times, states)])
    counts = bundle.jump_counts[0]
    jump_times = np.repeat(bundle.times[1:], counts)
    return SimulatedPath(bundle.times, states, prices, jump_times, bundle.jump_sizes[0])


def _reject_exits(bundle: PathBundle):
    if bundle.exit_fraction > 0.01:
        raise PathExitError(f"{100 * bundle.exit_fraction:.2f}% of paths left the domain; enlarge l")


def price_call_mc(alpha: PriceSurface, params: ModelParams, spec: CallSpec, a: float,
                  n_mc: int, dt: float, seed: int) -> McEstimate:
    """Monte Carlo call price given spot ``a`` at ``spec.valuation_time``."""
    if not 0.0 < a < params.penalty:
        raise ValueError("spot price must lie strictly between 0 and the penalty")
    spec.check(params)
    t, tau = spec.valuation_time, spec.maturity
    if tau == t:
        return McEstimate(max(a - spec.strike, 0.0), 0.0, n_mc, seed)
    x = invert_alpha(alpha, t, a).x
    bundle = simulate_paths(alpha, params, x, t, tau, dt, n_mc, seed)
    _reject_exits(bundle)
    payoff = np.maximum(alpha(tau, bundle.states[:, -1]) - spec.strike, 0.0)
    return McEstimate.from_samples(payoff, seed)


def mc_martingale_check(alpha: PriceSurface, params: ModelParams, t: float, x: float, tau: float,
                        n_mc: int, dt: float, seed: int) -> McEstimate:
    """Estimate ``E[alpha(tau, X_tau) | X_t = x]``; compare with ``alpha(t, x)``."""
    if not t <= tau <= params.horizon:
        raise ValueError("need t <= tau <= T")
    if tau == t:
        return McEstimate(float(alpha(t, x)), 0.0, n_mc, seed)
    bundle = simulate_paths(alpha, params, x, t, tau, dt, n_mc, seed)
    _reject_exits(bundle)
    return McEstimate.from_samples(alpha(tau, bundle.states[:, -1]), seed)


def martingale_holds(estimate: McEstimate, target: float, penalty: float) -> bool:
    """``|mean - alpha(t, x)| <= half_width_95 + 0.01 * penalty``."""
    return abs(estimate.mean - target) <= estimate.half_width_95 + 1e-2 * penalty
