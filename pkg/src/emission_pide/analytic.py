"""Closed-form allowance price for linear abatement and constant volatility.

With ``r(a) = c*a`` and constant ``sigma`` the pricing equation is a viscous
Burgers equation.  The price is ``alpha = -(sigma**2/c) * v_x / v`` where
``v`` solves the backward heat equation with terminal data
``1(x < 0) + 1(x >= 0) * exp(-c*pi*x/sigma**2)``.

All products of a normal distribution function with the exponential factor
are formed in log space so the formulas stay finite for any ``x``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

_LOG_SQRT_2PI = 0.5 * np.log(2.0 * np.pi)


@dataclass(frozen=True)
class HopfColeParams:
    T: float
    sigma: float
    c: float
    penalty: float

    def __post_init__(self):
        for name in ("T", "sigma", "c", "penalty"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")


def _pieces(p: HopfColeParams, t, x):
    t = np.asarray(t, dtype=float)
    if np.any(t >= p.T) or np.any(t < 0):
        raise ValueError("closed form is defined for 0 <= t < T only")
    x = np.asarray(x, dtype=float)
    rem = p.T - t
    s = p.sigma * np.sqrt(rem)
    k = p.c * p.penalty
    z1 = -x / s
    z2 = (x - k * rem) / s
    expo = -k * x / p.sigma ** 2 + k ** 2 * rem / (2.0 * p.sigma ** 2)
    return s, z1, z2, expo


def log_heat_v(p: HopfColeParams, t, x):
    """``log v(t, x)``, finite even where ``v`` itself under/overflows."""
    _, z1, z2, expo = _pieces(p, t, x)
    return np.logaddexp(special.log_ndtr(z1), special.log_ndtr(z2) + expo)


def heat_v(p: HopfColeParams, t, x):
    return np.exp(log_heat_v(p, t, x))


def heat_v_dx(p: HopfColeParams, t, x):
    """Space derivative of :func:`heat_v` (three-term expression)."""
    s, z1, z2, expo = _pieces(p, t, x)
    k = p.c * p.penalty
    log_phi1 = -0.5 * z1 ** 2 - _LOG_SQRT_2PI
    log_phi2 = -0.5 * z2 ** 2 - _LOG_SQRT_2PI
    return (
        -np.exp(log_phi1) / s
        + np.exp(log_phi2 + expo) / s
        - k / p.sigma ** 2 * np.exp(special.log_ndtr(z2) + expo)
    )


def hopf_cole_alpha(p: HopfColeParams, t, x):
    """Allowance price ``alpha(t, x)`` in ``(0, penalty)``.

    The two density terms of ``v_x`` cancel identically, leaving
    ``alpha = pi * e*Phi(z2) / (Phi(z1) + e*Phi(z2))``, evaluated as a
    logistic of the log-ratio.
    """
    _, z1, z2, expo = _pieces(p, t, x)
    return p.penalty * special.expit(special.log_ndtr(z2) + expo - special.log_ndtr(z1))


def digital_alpha_no_abatement(sigma: float, penalty: float, T: float, t, x):
    """Price with no abatement (``r = 0``): ``pi * Phi(x / (sigma*sqrt(T-t)))``."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    t = np.asarray(t, dtype=float)
    if np.any(t >= T) or np.any(t < 0):
        raise ValueError("defined for 0 <= t < T only")
    return penalty * special.ndtr(np.asarray(x, dtype=float) / (sigma * np.sqrt(T - t)))
