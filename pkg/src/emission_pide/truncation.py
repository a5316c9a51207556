"""Choice of the spatial truncation radius from second-moment bounds.

With ``sigma^2 <= a + b x^2``, jump second moment ``E Y^2`` and drift bounded
by ``r(pi)``, the Gronwall bound on ``E X_t^2`` is

    kappa_t = (1/b)(A + 2 r^2/b) e^{bt} - (1/b)(A + 2 r^2 t + 2 r^2/b),
    A = a + lambda E Y^2,

and ``zeta_t = kappa_t + r^2 t^2`` bounds ``E M_t^2`` of the martingale part.
Kolmogorov-Doob then gives ``P(inf X <= -l) <= kappa_T / l^2`` and
``P(sup X >= l) <= zeta_T / l^2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .model import ModelParams


@dataclass(frozen=True)
class TruncationInputs:
    a: float
    b: float
    intensity: float
    jump_second_moment: float
    max_reduction: float
    horizon: float
    eps1: float = 0.05
    eps2: float = 0.05
    x0: float = 0.0

    def __post_init__(self):
        for name in ("a", "b", "intensity", "jump_second_moment", "max_reduction", "horizon"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if not (0 < self.eps1 < 1 and 0 < self.eps2 < 1):
            raise ValueError("tail tolerances must lie in (0, 1)")

    @classmethod
    def from_params(cls, params: ModelParams, eps1: float = 0.05, eps2: float = 0.05) -> "TruncationInputs":
        a, b = params.growth
        second = params.jumps.distribution.second_moment if params.jumps is not None else 0.0
        return cls(a, b, params.intensity, second, float(params.reduction(params.penalty)),
                   params.horizon, eps1, eps2, params.initial_state)


def _phi1(z: float) -> float:
    # (e^z - 1)/z
    return 1.0 if z == 0 else math.expm1(z) / z


def _phi2(z: float) -> float:
    # (e^z - 1 - z)/z^2, by series where the direct form cancels
    if abs(z) < 1e-3:
        return 0.5 + z / 6.0 + z * z / 24.0 + z ** 3 / 120.0
    return (math.expm1(z) - z) / (z * z)


def kappa(inputs: TruncationInputs, t: float) -> float:
    """Gronwall bound on ``E X_t^2``.

    Rearranged as ``A t phi1(bt) + 2 r^2 t^2 phi2(bt)``, which is the same
    expression but stays accurate as ``b -> 0`` (limit ``A t + r^2 t^2``).
    """
    if not 0 <= t <= inputs.horizon:
        raise ValueError("t must lie in [0, T]")
    A = inputs.a + inputs.intensity * inputs.jump_second_moment
    r2 = inputs.max_reduction ** 2
    z = inputs.b * t
    return A * t * _phi1(z) + 2.0 * r2 * t * t * _phi2(z)


def zeta(inputs: TruncationInputs, t: float) -> float:
    return kappa(inputs, t) + inputs.max_reduction ** 2 * t * t


def truncation_radius(inputs: TruncationInputs) -> float:
    """Smallest ``l`` with both tail bounds at most ``eps1``, ``eps2``.

    A nonzero start shifts the radius by ``|x0|``.
    """
    T = inputs.horizon
    l = max(math.sqrt(kappa(inputs, T) / inputs.eps1), math.sqrt(zeta(inputs, T) / inputs.eps2))
    return l + abs(inputs.x0)


@dataclass(frozen=True)
class TruncationReport:
    kappa_T: float
    zeta_T: float
    l: float
    eps1: float
    eps2: float


def truncation_report(inputs: TruncationInputs) -> TruncationReport:
    T = inputs.horizon
    return TruncationReport(kappa(inputs, T), zeta(inputs, T), truncation_radius(inputs),
                            inputs.eps1, inputs.eps2)
