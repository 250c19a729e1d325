# src/accretive/criteria.py
"""
Numerical uniqueness criteria for the scalar kernel theta.

Each check is a sampled heuristic that returns a report object; none of
them proves anything. The Osgood classifier has an explicit Inconclusive
verdict and never overclaims.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np
from scipy import integrate

from .errors import InvalidParameterError
from .majorant import INV_E, Gauge, PhiFunction, ThetaFunction

logger = logging.getLogger(__name__)


class OsgoodVerdict(str, Enum):
    DIVERGES = "Diverges"
    CONVERGES = "Converges"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class OsgoodReport:
    """
    Attributes:
        verdict: Classification of int_0 ds/theta(s)
        integrals: I(10^-k) = int_{10^-k}^c ds/theta(s) for k = 2..12
        increments: Per-decade growth I(10^-k) - I(10^-(k-1)) for k = 3..12
    """
    verdict: OsgoodVerdict
    integrals: Dict[int, float]
    increments: Dict[int, float]


def _reciprocal_integral(theta: ThetaFunction, a: float, b: float) -> float:
    """int_a^b ds/theta(s) in the variable x = ln s; inf when theta vanishes on [a, b]."""
    levels = np.geomspace(a, b, 33)
    if np.any(np.asarray(theta(levels)) <= 0):
        return math.inf
    value, _ = integrate.quad(lambda x: math.exp(x) / float(theta(math.exp(x))),
                              math.log(a), math.log(b), epsabs=0.0, epsrel=1e-12, limit=200)
    return float(value)


def osgood_classify(theta: ThetaFunction) -> OsgoodReport:
    """
    Classify the Osgood integral int_0^c ds/theta(s), c = min(e^-1, domain cap).

    Diverges when the per-decade increments over the last five decades decay
    no faster than harmonically (k * increment >= 0.5 for k = 8..12);
    Converges when I(1e-12) - I(1e-7) <= 1e-3; Inconclusive otherwise.

    Example:
        >>> osgood_classify(ThetaFunction.power(0.5)).verdict
        <OsgoodVerdict.CONVERGES: 'Converges'>
    """
    top = min(INV_E, theta.domain_cap)
    decades = list(range(2, 13))
    segments = {}
    previous = top
    for k in decades:
        eps = 10.0 ** (-k)
        segments[k] = _reciprocal_integral(theta, eps, previous) if previous > eps else 0.0
        previous = eps
    integrals, running = {}, 0.0
    for k in decades:
        running += segments[k]
        integrals[k] = running
    increments = {k: segments[k] for k in decades[1:]}

    if all(k * increments[k] >= 0.5 for k in range(8, 13)):
        verdict = OsgoodVerdict.DIVERGES
    elif integrals[12] - integrals[7] <= 1e-3:
        verdict = OsgoodVerdict.CONVERGES
    else:
        verdict = OsgoodVerdict.INCONCLUSIVE
    logger.debug(f"[NOTICE] osgood_classify({theta.label}) -> {verdict.value}")
    return OsgoodReport(verdict, integrals, increments)


@dataclass(frozen=True)
class NagumoReport:
    holds: bool
    radii: np.ndarray
    margins: np.ndarray

    @property
    def worst_margin(self) -> float:
        return float(np.min(self.margins))


def nagumo_check(theta: ThetaFunction, r_star: float = 1.0, points: int = 50) -> NagumoReport:
    """
    Check int_0^r theta(s)/s ds <= r on log-spaced radii in (0, r_star].

    The integral is taken as int_{-inf}^{ln r} theta(e^x) dx, which extends
    the integrand at s = 0 by its limit automatically.
    """
    if not r_star > 0:
        raise InvalidParameterError(f"r_star must be positive, got {r_star}")
    radii = np.geomspace(r_star * 1e-6, r_star, points)
    margins = np.empty(points)
    for j, r in enumerate(radii):
        value, _ = integrate.quad(lambda x: float(theta(math.exp(x))), -np.inf, math.log(r),
                                  epsabs=1e-300, epsrel=1e-12, limit=200)
        margins[j] = r - value
    holds = bool(np.all(margins >= -1e-10 * radii))
    return NagumoReport(holds, radii, margins)


@dataclass(frozen=True)
class DiniReport:
    holds: bool
    products: Dict[int, float]


def dini_check(theta: ThetaFunction) -> DiniReport:
    """theta(U)|ln U| at U = 10^-k, k = 3..12: strictly decreasing and finally <= 1e-3."""
    products = {k: float(theta(10.0 ** (-k))) * k * math.log(10.0) for k in range(3, 13)}
    values = [products[k] for k in range(3, 13)]
    decreasing = all(b < a for a, b in zip(values, values[1:]))
    return DiniReport(bool(decreasing and values[-1] <= 1e-3), products)


@dataclass(frozen=True)
class SubadditivityReport:
    """
    Attributes:
        holds: theta(U) + theta(W) >= theta(U + W) on every sampled pair
        witness: First failing pair (U, W) when the check fails
        transfer_exponent: Some m in (0, 1] with theta(U)/U^m nonincreasing on the samples, if found
    """
    holds: bool
    witness: Optional[Tuple[float, float]] = None
    transfer_exponent: Optional[float] = None


def subadditivity_check(theta: ThetaFunction, samples: int = 200, seed: int = 0,
                        upper: float = 10.0) -> SubadditivityReport:
    """
    Sampled subadditivity test with the transfer test for theta(U)/U^m.

    The pair (1, 1) is checked first, then log-uniform random pairs on
    [1e-6, upper].
    """
    if samples < 100:
        raise InvalidParameterError(f"subadditivity needs at least 100 sample pairs, got {samples}")
    rng = np.random.default_rng(seed)
    pairs = np.vstack([[1.0, 1.0], np.exp(rng.uniform(math.log(1e-6), math.log(upper), size=(samples, 2)))])
    U, W = pairs[:, 0], pairs[:, 1]
    gap = theta(U) + theta(W) - theta(U + W)
    failing = np.flatnonzero(gap < -1e-10)
    witness = None if failing.size == 0 else (float(U[failing[0]]), float(W[failing[0]]))

    grid = np.geomspace(1e-6, upper, 400)
    values = np.asarray(theta(grid))
    transfer = None
    for m in (1.0, 0.75, 0.5, 0.25, 0.1):
        ratio = values / grid ** m
        if np.all(np.diff(ratio) <= 1e-12 * np.maximum(ratio[:-1], 1.0)):
            transfer = m
            break
    return SubadditivityReport(witness is None, witness, transfer)


@dataclass(frozen=True)
class CombinedCriterionSpec:
    """
    Mixed kernel K(t, U) <= w_O * theta_t(t) * theta_O(U) + w_N * (psi'/psi)(t) * theta_N(U).

    Attributes:
        weight_osgood: w_O >= 0
        weight_nagumo: w_N in [0, 1)
        theta_osgood: Kernel expected to satisfy the Osgood condition
        theta_nagumo: Kernel expected to satisfy the Nagumo condition
        time_factor: theta_t, integrable on [0, T]
        gauge: psi
        r_star: Radius for the Nagumo check
    """
    weight_osgood: float
    weight_nagumo: float
    theta_osgood: ThetaFunction
    theta_nagumo: ThetaFunction
    time_factor: PhiFunction
    gauge: Gauge = field(default_factory=Gauge.linear)
    r_star: float = 1.0

    def __post_init__(self) -> None:
        if self.weight_osgood < 0:
            raise InvalidParameterError(f"weight_osgood must be >= 0, got {self.weight_osgood}")
        if not 0 <= self.weight_nagumo < 1:
            raise InvalidParameterError(
                f"weight_nagumo must lie in [0, 1), got {self.weight_nagumo}; "
                "run the pure Nagumo case through nagumo_check"
            )


@dataclass(frozen=True)
class CombinedCriterionReport:
    holds: bool
    hypotheses: Dict[str, bool]
    details: Dict[str, float]

    @property
    def failures(self) -> List[str]:
        return [name for name, ok in self.hypotheses.items() if not ok]


def _gauge_valid(gauge: Gauge, horizon: float) -> bool:
    t = np.geomspace(1e-12 * horizon, horizon, 200)
    values, slopes = gauge(t), gauge.derivative(t)
    return bool(np.all(values > 0) and np.all(slopes > 0) and values[0] < 1e-6 and slopes[0] > 0)


def _ratio_sums(spec: CombinedCriterionSpec, levels: int = 9) -> List[float]:
    """Left sums of theta_t/psi on doubling resolutions; the t = 0 value is the limit at 1e-12 T."""
    horizon = spec.time_factor.grid.horizon
    phi, gauge = spec.time_factor, spec.gauge

    def ratio(t: float) -> float:
        s = max(t, 1e-12 * horizon)
        return phi.value(s) / float(gauge(s))

    sums = []
    for level in range(levels):
        cells = 64 * 2 ** level
        h = horizon / cells
        sums.append(h * sum(ratio(i * h) for i in range(cells)))
    return sums


def combined_criterion_check(spec: CombinedCriterionSpec) -> CombinedCriterionReport:
    """
    Verify each hypothesis of the mixed Osgood/Nagumo criterion and report failures.

    The pure Osgood edge (weight_nagumo = 0) needs neither the gauge nor the
    ratio theta_t/psi.
    """
    hypotheses: Dict[str, bool] = {"weight_nagumo<1": spec.weight_nagumo < 1}
    details: Dict[str, float] = {}
    if spec.weight_osgood > 0:
        hypotheses["osgood"] = osgood_classify(spec.theta_osgood).verdict is OsgoodVerdict.DIVERGES
    if spec.weight_nagumo > 0:
        nagumo = nagumo_check(spec.theta_nagumo, spec.r_star)
        hypotheses["nagumo"] = nagumo.holds
        details["nagumo_worst_margin"] = nagumo.worst_margin
        hypotheses["gauge"] = _gauge_valid(spec.gauge, spec.time_factor.grid.horizon)
        if spec.weight_osgood > 0:
            sums = _ratio_sums(spec)
            gap = abs(sums[-1] - sums[-2])
            details["ratio_integral"] = sums[-1]
            details["ratio_cauchy_gap"] = gap
            hypotheses["ratio_integrable"] = bool(math.isfinite(sums[-1]) and gap <= 1e-4)
    holds = all(hypotheses.values())
    if not holds:
        logger.info(f"[NOTICE] combined criterion failed: {[k for k, v in hypotheses.items() if not v]}")
    return CombinedCriterionReport(holds, hypotheses, details)


@dataclass(frozen=True)
class CriterionRow:
    name: str
    osgood: OsgoodVerdict
    nagumo: bool
    dini: bool
    subadditive: bool


def criterion_matrix(kernels: Mapping[str, ThetaFunction], r_star: float = 1.0,
                     seed: int = 0) -> List[CriterionRow]:
    """Run every classifier on every kernel, one row per kernel in mapping order."""
    rows = []
    for name, theta in kernels.items():
        rows.append(CriterionRow(
            name=name,
            osgood=osgood_classify(theta).verdict,
            nagumo=nagumo_check(theta, r_star).holds,
            dini=dini_check(theta).holds,
            subadditive=subadditivity_check(theta, seed=seed).holds,
        ))
    return rows


def default_kernels() -> Dict[str, ThetaFunction]:
    return {
        "identity": ThetaFunction.identity(),
        "power_0.5": ThetaFunction.power(0.5),
        "power_2": ThetaFunction.power(2.0),
        "log_osgood": ThetaFunction.log_osgood(),
    }
