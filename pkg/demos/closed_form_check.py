"""Finite differences against the closed form for linear abatement.

With r(a) = c*a and constant sigma the price equation linearises under the
Hopf-Cole substitution, so the numerical surface can be checked pointwise.
The digital payoff is the hard part: the first few implicit steps smear the
jump at x = 0, and the error there shrinks with the time step.

Run:  python demos/closed_form_check.py
"""
import numpy as np

from emission_pide import AbatementFunction, GridSpec, ModelParams, invert_alpha, solve_surface
from emission_pide.analytic import HopfColeParams, hopf_cole_alpha

T, SIGMA, C, PENALTY = 2.0, 4.0, 0.02, 100.0
exact = HopfColeParams(T, SIGMA, C, PENALTY)
params = ModelParams(T, PENALTY, SIGMA, AbatementFunction.linear(C))


def errors_by_level(surface, taus):
    g = surface.grid
    inner = np.abs(g.x) <= 10
    out = []
    for tau in taus:
        n = int(round(tau / g.dt))
        out.append(np.max(np.abs(surface.values[n, inner] - hopf_cole_alpha(exact, T - tau, g.x[inner]))))
    return out


surface = solve_surface(params, GridSpec.from_steps(20.0, 0.02, T, 0.02))

print("price slices alpha(t, x), dx = dtau = 0.02")
xs = np.array([-6.0, -3.0, -1.0, 0.0, 1.0, 3.0])
print("   t  " + "".join(f"{x:>9.1f}" for x in xs))
for t in (1.9, 1.6, 1.3, 1.0, 0.7, 0.4):
    print(f"{t:4.1f}  " + "".join(f"{v:9.3f}" for v in surface(t, xs)))

print("\nmax error over |x| <= 10 at selected tau")
taus = [0.1, 0.2, 0.4, 0.8, 1.6]
print(f"{'   grid':<21}" + "".join(f"{tau:>8.1f}" for tau in taus))
for dx, dt in [(0.04, 0.04), (0.02, 0.02), (0.01, 0.01), (0.02, 0.002)]:
    s = solve_surface(params, GridSpec.from_steps(20.0, dx, T, dt))
    print(f"   dx={dx:<5} dt={dt:<6}" + "".join(f"{e:8.3f}" for e in errors_by_level(s, taus)))

x_atm = invert_alpha(surface, 0.0, 25.0).x
print(f"\nstate at which alpha(0, x) = 25: x = {x_atm:.4f}")
