"""Flat ``key = value`` run configuration.

Blank lines and ``#`` comments are ignored; list values are comma separated;
unknown keys are errors.  Recognised keys (defaults in brackets):

model
    ``horizon``, ``penalty``, ``sigma`` (required); ``growth_a``,
    ``growth_b`` [sigma^2, 0]; ``initial_state`` [0]
abatement
    ``abatement`` = linear | tabulated | quadratic_cost [linear];
    ``abatement_c`` [0]; ``abatement_prices``, ``abatement_rates``;
    ``cost_slope``, ``cost_cap`` [inf]
jumps
    ``jump_intensity`` [0 = none]; ``jump_distribution`` = normal | point
    [normal]; ``jump_mean`` [0]; ``jump_std`` [1]; ``jump_k1``, ``jump_k2``
    [quantiles]; ``jump_tail`` [1e-6]
grid
    ``l``, ``dx``, ``dt`` (required for solving)
truncation
    ``eps1``, ``eps2`` [0.05]
solve
    ``slice_times`` [T/5, 2T/5, ..., T]
price
    ``strike``, ``spot``, ``maturities`` (required); ``valuation_time`` [0];
    ``n_mc`` [10000]; ``mc_dt`` [0.02]; ``seed`` [0]
simulate
    ``path_start`` [initial_state]; ``path_t_start`` [0]; ``path_t_end`` [T]
compare
    ``compare_pairs`` as ``sigma:lambda, ...``; ``compare_time`` [0.8]
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

from .abatement import AbatementFunction, ConvexCost
from .model import GridSpec, JumpSpec, ModelParams, NormalJumps, PointMassJumps


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _pairs(text: str) -> list[tuple[float, float]]:
    out = []
    for item in text.split(","):
        if item.strip():
            s, lam = item.split(":")
            out.append((float(s), float(lam)))
    return out


_PARSERS = {
    "horizon": float, "penalty": float, "sigma": float, "growth_a": float, "growth_b": float,
    "initial_state": float,
    "abatement": str, "abatement_c": float, "abatement_prices": _floats, "abatement_rates": _floats,
    "cost_slope": float, "cost_cap": float,
    "jump_intensity": float, "jump_distribution": str, "jump_mean": float, "jump_std": float,
    "jump_k1": float, "jump_k2": float, "jump_tail": float,
    "l": float, "dx": float, "dt": float,
    "eps1": float, "eps2": float,
    "slice_times": _floats,
    "strike": float, "spot": float, "maturities": _floats, "valuation_time": float,
    "n_mc": int, "mc_dt": float, "seed": int,
    "path_start": float, "path_t_start": float, "path_t_end": float,
    "compare_pairs": _pairs, "compare_time": float,
}


def parse_config(text: str) -> dict[str, Any]:
    values: dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _PARSERS:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        try:
            values[key] = _PARSERS[key](value)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: bad value for {key!r}: {exc}") from None
    return values


@dataclass
class RunConfig:
    values: dict

    @classmethod
    def load(cls, path) -> "RunConfig":
        with open(path) as fh:
            return cls(parse_config(fh.read()))

    def get(self, key, default=None):
        return self.values.get(key, default)

    def require(self, key):
        if key not in self.values:
            raise ValueError(f"config key {key!r} is required")
        return self.values[key]

    def abatement(self) -> AbatementFunction:
        kind = self.get("abatement", "linear")
        if kind == "linear":
            return AbatementFunction.linear(self.get("abatement_c", 0.0))
        if kind == "tabulated":
            return AbatementFunction.tabulated(self.require("abatement_prices"),
                                               self.require("abatement_rates"))
        if kind == "quadratic_cost":
            cost = ConvexCost.quadratic(self.require("cost_slope"), self.get("cost_cap", math.inf))
            return AbatementFunction.from_cost(cost)
        raise ValueError(f"unknown abatement kind {kind!r}")

    def jumps(self, intensity: float | None = None) -> JumpSpec | None:
        lam = self.get("jump_intensity", 0.0) if intensity is None else intensity
        if lam == 0:
            return None
        kind = self.get("jump_distribution", "normal")
        if kind == "normal":
            dist = NormalJumps(self.get("jump_mean", 0.0), self.get("jump_std", 1.0))
        elif kind == "point":
            dist = PointMassJumps(self.get("jump_mean", 0.0))
        else:
            raise ValueError(f"unknown jump distribution {kind!r}")
        terminals = None
        if "jump_k1" in self.values or "jump_k2" in self.values:
            terminals = (self.require("jump_k1"), self.require("jump_k2"))
        return JumpSpec(lam, dist, terminals=terminals, tail=self.get("jump_tail", 1e-6))

    def model(self, sigma: float | None = None, intensity: float | None = None) -> ModelParams:
        sig = self.require("sigma") if sigma is None else sigma
        growth = None
        if sigma is None and ("growth_a" in self.values or "growth_b" in self.values):
            growth = (self.get("growth_a", sig ** 2), self.get("growth_b", 0.0))
        return ModelParams(
            horizon=self.require("horizon"),
            penalty=self.require("penalty"),
            sigma=sig,
            abatement=self.abatement(),
            jumps=self.jumps(intensity),
            initial_state=self.get("initial_state", 0.0),
            growth=growth,
        )

    def grid(self) -> GridSpec:
        return GridSpec.from_steps(self.require("l"), self.require("dx"),
                                   self.require("horizon"), self.require("dt"))
