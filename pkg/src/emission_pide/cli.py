"""Batch front-end writing CSV data for every reproduction run.

Usage::

    emission-pide {solve,price,simulate,truncate,compare} --config FILE [--out DIR] [--seed N]
"""
from __future__ import annotations

import argparse
import csv
import os
import sys

import numpy as np

from .config import RunConfig
from .fd_engine import solve_surface
from .mc_engine import price_call_mc, simulate_path
from .option_pricing import CallSpec, price_call, solve_call_surface
from .truncation import TruncationInputs, truncation_report


def _fmt(v) -> str:
    return f"{float(v):.17g}"


def _write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


def cmd_solve(config: RunConfig, out: str) -> list[str]:
    params, grid = config.model(), config.grid()
    surface = solve_surface(params, grid)
    T = params.horizon
    times = config.get("slice_times") or [T * k / 5 for k in range(1, 6)]
    surface_path = os.path.join(out, "alpha_surface.csv")
    surface.to_csv(surface_path)
    slices_path = os.path.join(out, "alpha_slices.csv")
    _write_rows(slices_path, ["t"] + [_fmt(x) for x in grid.x],
                [[float(t)] + [float(v) for v in surface.row(t)] for t in times])
    return [surface_path, slices_path]


def cmd_price(config: RunConfig, out: str, seed: int | None = None) -> list[str]:
    params, grid = config.model(), config.grid()
    surface = solve_surface(params, grid)
    strike, spot = config.require("strike"), config.require("spot")
    t0 = config.get("valuation_time", 0.0)
    seed = config.get("seed", 0) if seed is None else seed
    n_mc, mc_dt = config.get("n_mc", 10_000), config.get("mc_dt", 0.02)
    rows = []
    for tau in config.require("maturities"):
        spec = CallSpec(strike, tau, t0)
        pde = price_call(surface, solve_call_surface(surface, spec, params), t0, spot)
        mc = price_call_mc(surface, params, spec, spot, n_mc, mc_dt, seed)
        rows.append([float(tau), float(pde), mc.mean, mc.ci_low, mc.ci_high])
    path = os.path.join(out, "call_prices.csv")
    _write_rows(path, ["tau", "pde_price", "mc_mean", "mc_ci_low", "mc_ci_high"], rows)
    return [path]


def cmd_simulate(config: RunConfig, out: str, seed: int | None = None) -> list[str]:
    params, grid = config.model(), config.grid()
    surface = solve_surface(params, grid, allow_zero_sigma=True)
    seed = config.get("seed", 0) if seed is None else seed
    path = simulate_path(surface, params, config.get("path_start", params.initial_state),
                         config.get("path_t_start", 0.0), config.get("path_t_end", params.horizon),
                         config.get("mc_dt", 0.02), seed)
    path_file = os.path.join(out, "path.csv")
    path.to_csv(path_file)
    summary_file = os.path.join(out, "path_summary.csv")
    _write_rows(summary_file, ["statistic", "value"], [
        ["n_steps", path.times.size - 1],
        ["n_jumps", path.jump_times.size],
        ["seed", seed],
        ["X_min", float(path.states.min())],
        ["X_max", float(path.states.max())],
        ["X_final", float(path.states[-1])],
        ["A_min", float(path.prices.min())],
        ["A_max", float(path.prices.max())],
        ["A_final", float(path.prices[-1])],
    ])
    return [path_file, summary_file]


def cmd_truncate(config: RunConfig, out: str) -> list[str]:
    params = config.model()
    inputs = TruncationInputs.from_params(params, config.get("eps1", 0.05), config.get("eps2", 0.05))
    rep = truncation_report(inputs)
    path = os.path.join(out, "truncation.csv")
    _write_rows(path, ["kappa_T", "zeta_T", "l", "eps1", "eps2"],
                [[rep.kappa_T, rep.zeta_T, rep.l, rep.eps1, rep.eps2]])
    for label, value in (("kappa_T", rep.kappa_T), ("zeta_T", rep.zeta_T), ("l", rep.l),
                         ("eps1", rep.eps1), ("eps2", rep.eps2)):
        print(f"{label:>8}  {value:.10g}")
    return [path]


def cmd_compare(config: RunConfig, out: str) -> list[str]:
    grid = config.grid()
    t = config.get("compare_time", 0.8)
    rows = []
    for sigma, lam in config.require("compare_pairs"):
        surface = solve_surface(config.model(sigma=sigma, intensity=lam), grid)
        rows.append([float(sigma), float(lam)] + [float(v) for v in surface.row(t)])
    path = os.path.join(out, "comparison.csv")
    _write_rows(path, ["sigma", "lambda"] + [_fmt(x) for x in grid.x], rows)
    return [path]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="emission-pide", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=["solve", "price", "simulate", "truncate", "compare"])
    parser.add_argument("--config", required=True, help="key = value configuration file")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="override the configured seed")
    args = parser.parse_args(argv)

    try:
        config = RunConfig.load(args.config)
        os.makedirs(args.out, exist_ok=True)
        if args.command in ("price", "simulate"):
            written = globals()[f"cmd_{args.command}"](config, args.out, args.seed)
        else:
            written = globals()[f"cmd_{args.command}"](config, args.out)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"emission-pide {args.command}: error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
