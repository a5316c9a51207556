"""European calls on the allowance price, PDE against Monte Carlo.

The call solves the linear version of the price equation with the rate
frozen from the solved price surface.  At the compliance date the allowance
is worth 0 or the penalty, so a call struck at 25 on an allowance trading at
25 is worth 75 times the risk-neutral probability of a shortfall, 1/4.

Run:  python demos/allowance_calls.py
"""
import numpy as np

from emission_pide import (AbatementFunction, CallSpec, GridSpec, ModelParams, price_call,
                           price_call_mc, solve_call_surface, solve_surface)

params = ModelParams(2.0, 100.0, 4.0, AbatementFunction.linear(0.02))
surface = solve_surface(params, GridSpec.from_steps(20.0, 0.02, 2.0, 0.01))
strike, spot = 25.0, 25.0

print(" maturity      PDE      MC    95% CI")
for tau in np.arange(0.0, 2.01, 0.25):
    spec = CallSpec(strike, float(tau))
    pde = price_call(surface, solve_call_surface(surface, spec, params), 0.0, spot)
    mc = price_call_mc(surface, params, spec, spot, 10_000, 0.01, seed=11)
    print(f"{tau:9.2f} {pde:8.3f} {mc.mean:7.3f}  [{mc.ci_low:.3f}, {mc.ci_high:.3f}]")
