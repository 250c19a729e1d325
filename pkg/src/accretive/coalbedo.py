# src/accretive/coalbedo.py
"""
Co-albedo profile of the energy balance model.

    beta(U) = beta_i                                              U < 0
    beta(U) = beta_i + (beta_w - beta_i) * theta(U) / theta(delta)  0 <= U <= delta
    beta(U) = beta_w                                              U > delta

with theta(U) = U ln(1/U). The profile is not Lipschitz at 0 but satisfies
|beta(U) - beta(V)| <= C theta(|U - V|) with C = (beta_w - beta_i)/|delta ln delta|.
"""

import math
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from .errors import InvalidParameterError
from .majorant import INV_E, ThetaFunction


@dataclass(frozen=True)
class CoAlbedo:
    """
    Attributes:
        beta_ice: Co-albedo on ice, 0 < beta_ice < beta_water
        beta_water: Co-albedo on open water
        delta: Transition width, 0 < delta < e^-1
        insolation: Solar constant S0 > 0

    Example:
        >>> round(CoAlbedo(0.3, 0.8, 0.1)(0.05), 5)
        0.62526
    """
    beta_ice: float = 0.3
    beta_water: float = 0.8
    delta: float = 0.1
    insolation: float = 1.0

    def __post_init__(self) -> None:
        if not 0 < self.beta_ice < self.beta_water:
            raise InvalidParameterError(
                f"co-albedo needs 0 < beta_ice < beta_water, got {self.beta_ice}, {self.beta_water}"
            )
        if not 0 < self.delta < INV_E:
            raise InvalidParameterError(f"delta must lie in (0, e^-1), got {self.delta}")
        if not self.insolation > 0:
            raise InvalidParameterError(f"insolation must be positive, got {self.insolation}")

    @property
    def constant(self) -> float:
        """C = (beta_w - beta_i)/|delta ln delta|."""
        return (self.beta_water - self.beta_ice) / abs(self.delta * math.log(self.delta))

    def kernel(self) -> ThetaFunction:
        """C * theta as a scalar kernel (log kernel with constant tail)."""
        return ThetaFunction.log_osgood().scaled(self.constant)

    def __call__(self, U):
        return coalbedo_eval(self, U)


def coalbedo_eval(beta: CoAlbedo, U):
    """Vectorised profile; scalars in, float out."""
    u = np.asarray(U, dtype=float)
    inside = np.clip(u, 0.0, beta.delta)
    with np.errstate(divide="ignore", invalid="ignore"):
        theta = np.where(inside > 0, inside * np.log(1.0 / np.where(inside > 0, inside, 1.0)), 0.0)
    ramp = beta.beta_ice + (beta.beta_water - beta.beta_ice) * theta / (beta.delta * math.log(1.0 / beta.delta))
    out = np.where(u < 0, beta.beta_ice, np.where(u > beta.delta, beta.beta_water, ramp))
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class ModulusCheckReport:
    holds: bool
    worst_margin: float
    witness: Optional[Tuple[float, float]]
    per_regime: Dict[str, float]


def coalbedo_modulus_check(beta: CoAlbedo, samples: int = 200, seed: int = 0,
                           slack: float = 1e-12) -> ModulusCheckReport:
    """
    Sample |beta(U) - beta(V)| <= C theta(|U - V|) across the five regimes.

    Regimes: both below 0, straddling 0, both in [0, delta], straddling
    delta, both above delta. ``per_regime`` holds the smallest margin seen
    in each regime.
    """
    rng = np.random.default_rng(seed)
    d = beta.delta
    draws = {
        "both_negative": (rng.uniform(-2.0, 0.0, samples), rng.uniform(-2.0, 0.0, samples)),
        "straddle_zero": (rng.uniform(-1.0, 0.0, samples), rng.uniform(0.0, d, samples)),
        "both_ramp": (rng.uniform(0.0, d, samples), rng.uniform(0.0, d, samples)),
        "straddle_delta": (rng.uniform(0.0, d, samples), rng.uniform(d, 2.0, samples)),
        "both_water": (rng.uniform(d, 2.0, samples), rng.uniform(d, 2.0, samples)),
    }
    kernel = beta.kernel()
    per_regime: Dict[str, float] = {}
    witness = None
    worst = math.inf
    for name, (U, V) in draws.items():
        margin = kernel(np.abs(U - V)) - np.abs(coalbedo_eval(beta, U) - coalbedo_eval(beta, V))
        j = int(np.argmin(margin))
        per_regime[name] = float(margin[j])
        if margin[j] < worst:
            worst = float(margin[j])
            if worst < -slack:
                witness = (float(U[j]), float(V[j]))
    return ModulusCheckReport(worst >= -slack, worst, witness, per_regime)
