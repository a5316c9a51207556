"""Allowance prices in emission markets from nonlinear P(I)DEs.

Finite-difference price surfaces for diffusion and jump-diffusion shortfall
dynamics, the closed form for linear abatement, European calls on the
allowance price, Monte Carlo paths and domain-truncation bounds.
"""
from .abatement import AbatementFunction, ConvexCost, aggregate, reduction_from_cost
from .analytic import (HopfColeParams, digital_alpha_no_abatement, heat_v, heat_v_dx,
                       hopf_cole_alpha)
from .fd_engine import (PriceSurface, assemble_step, check_grid_condition, check_max_principle,
                        invert_alpha, jump_target_index, quadrature_weights, solve_surface,
                        thomas_solve)
from .mc_engine import (McEstimate, mc_martingale_check, price_call_mc, simulate_path,
                        simulate_paths)
from .model import (GridSpec, JumpSpec, ModelParams, NormalJumps, PointMassJumps, TabulatedJumps,
                    validate)
from .option_pricing import CallSpec, price_call, solve_call_surface
from .truncation import TruncationInputs, kappa, truncation_radius, zeta

__version__ = "0.1.0"
