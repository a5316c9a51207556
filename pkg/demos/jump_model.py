"""Jump-diffusion shortfall: prices, domain truncation and sample paths.

Takes r(a) = a, penalty 1, unit volatility and standard normal jumps at unit
rate.  Shows price slices, how little the answer depends on the truncation
radius once it is large, a simulated state/price path, and how volatility and
jumps shape the price near the compliance date.

Run:  python demos/jump_model.py
"""
import numpy as np

from emission_pide import (AbatementFunction, GridSpec, JumpSpec, ModelParams, NormalJumps,
                           TruncationInputs, simulate_path, solve_surface, truncation_radius)


def model(sigma=1.0, intensity=1.0):
    jumps = JumpSpec(intensity, NormalJumps(0.0, 1.0)) if intensity > 0 else None
    return ModelParams(1.0, 1.0, sigma, AbatementFunction.linear(1.0), jumps=jumps)


params = model()
surfaces = {l: solve_surface(params, GridSpec.from_steps(l, 0.02, 1.0, 0.02)) for l in (20.0, 30.0)}
surface = surfaces[30.0]

xs = np.array([-3.0, -1.0, 0.0, 1.0, 3.0])
print("price slices alpha(t, x)")
print("   t  " + "".join(f"{x:>8.1f}" for x in xs))
for t in (0.2, 0.4, 0.6, 0.8, 1.0):
    print(f"{t:4.1f}  " + "".join(f"{v:8.4f}" for v in surface(t, xs)))

l_bound = truncation_radius(TruncationInputs.from_params(params))
inner20 = np.abs(surfaces[20.0].x) <= 11
inner30 = np.abs(surfaces[30.0].x) <= 11
gap = np.abs(surfaces[20.0].values[:, inner20] - surfaces[30.0].values[:, inner30])
print(f"\nsecond-moment truncation radius for 5% tails: l = {l_bound:.4f}")
print(f"L1 gap between l = 20 and l = 30 on |x| <= 11: {gap.sum() * 0.02 * 0.02:.2e}")

path = simulate_path(surface, params, 0.0, 0.0, 1.0, 0.02, seed=7)
print(f"\nsample path: {path.jump_times.size} jump(s), final state {path.states[-1]:.3f}, "
      f"final price {path.prices[-1]:.3f}")
for k in range(0, path.times.size, 10):
    print(f"   t={path.times[k]:.2f}  X={path.states[k]:7.3f}  A={path.prices[k]:.4f}")

print("\nalpha(0.8, x) for several (sigma, lambda)")
print(" sigma lambda" + "".join(f"{x:>8.1f}" for x in xs))
for sigma, lam in [(1.0, 1.0), (1.0, 0.0), (0.3, 1.0), (0.3, 0.0)]:
    s = solve_surface(model(sigma, lam), GridSpec.from_steps(15.0, 0.02, 1.0, 0.02))
    print(f"{sigma:6.1f} {lam:6.1f}" + "".join(f"{v:8.4f}" for v in s(0.8, xs)))
