# src/accretive/majorant.py
"""
Scalar majorant machinery.

The comparison equation U(t) = U0 + int_0^t phi(s) theta(U(s)) ds is solved
two ways: numerically as the ODE U' = phi*theta(U) (explicit midpoint with
substeps and a Richardson error estimate), and implicitly through the
transform Psi(U) = int_{U0}^U ds/theta(s) with U(t) = Psi^{-1}(int_0^t phi).
Closed forms for the Gronwall and power-law kernels, blow-up horizons and
the gauge-extended bound live here too.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy import integrate, optimize

from .banach import TimeGrid
from .config import SolverDefaults
from .errors import (
    AmbiguousSolutionError,
    BlowUpError,
    GridMismatchError,
    HorizonExceededError,
    InvalidParameterError,
)

logger = logging.getLogger(__name__)

INV_E = math.exp(-1.0)


class ThetaKind(str, Enum):
    IDENTITY = "identity"
    POWER = "power"
    LOG_OSGOOD = "log_osgood"
    LOG_GROWTH = "log_growth"
    TABLE = "table"


@dataclass(frozen=True, eq=False)
class ThetaFunction:
    """
    Nondecreasing kernel theta >= 0 with theta(0) = 0, optionally scaled.

    Kinds:
        identity:   theta(U) = U
        power:      theta(U) = U^m, m > 0
        log_osgood: theta(U) = U ln(1/U) on (0, e^-1], constant e^-1 above
        log_growth: theta(U) = U ln U for U >= 1, 0 below (large-data kernel)
        table:      piecewise-linear through monotone samples, linear to 0
                    below the first knot, linear extrapolation above the last

    Example:
        >>> ThetaFunction.power(2.0)(3.0)
        9.0
    """
    kind: ThetaKind
    exponent: float = 1.0
    knots: Optional[np.ndarray] = None
    values: Optional[np.ndarray] = None
    scale: float = 1.0

    def __post_init__(self) -> None:
        if not (np.isfinite(self.scale) and self.scale > 0):
            raise InvalidParameterError(f"kernel scale must be positive, got {self.scale}")
        if self.kind is ThetaKind.POWER and not self.exponent > 0:
            raise InvalidParameterError(f"power kernel needs m > 0, got {self.exponent}")
        if self.kind is ThetaKind.TABLE:
            u = np.asarray(self.knots, dtype=float)
            v = np.asarray(self.values, dtype=float)
            if u.ndim != 1 or u.shape != v.shape or u.size < 2:
                raise InvalidParameterError("table kernel needs matching 1-D knot and value arrays")
            if np.any(np.diff(u) <= 0) or u[0] < 0:
                raise InvalidParameterError("table knots must be nonnegative and strictly increasing")
            if np.any(v < 0) or np.any(np.diff(v) < 0):
                raise InvalidParameterError("table values must be nonnegative and nondecreasing")
            if u[0] == 0 and v[0] != 0:
                raise InvalidParameterError("table kernel must vanish at 0")
            if u[0] > 0:
                u, v = np.concatenate([[0.0], u]), np.concatenate([[0.0], v])
            u.setflags(write=False)
            v.setflags(write=False)
            object.__setattr__(self, "knots", u)
            object.__setattr__(self, "values", v)

    @classmethod
    def identity(cls) -> "ThetaFunction":
        return cls(ThetaKind.IDENTITY)

    @classmethod
    def power(cls, m: float) -> "ThetaFunction":
        return cls(ThetaKind.POWER, exponent=float(m))

    @classmethod
    def log_osgood(cls) -> "ThetaFunction":
        return cls(ThetaKind.LOG_OSGOOD)

    @classmethod
    def log_growth(cls) -> "ThetaFunction":
        return cls(ThetaKind.LOG_GROWTH)

    @classmethod
    def table(cls, knots: Sequence[float], values: Sequence[float]) -> "ThetaFunction":
        return cls(ThetaKind.TABLE, knots=np.asarray(knots, dtype=float), values=np.asarray(values, dtype=float))

    @classmethod
    def parse(cls, name: str, exponent: float = 1.0) -> "ThetaFunction":
        kind = ThetaKind(name.lower())
        if kind is ThetaKind.TABLE:
            raise InvalidParameterError("table kernels cannot be built from a name")
        return cls(kind, exponent=float(exponent))

    def scaled(self, factor: float) -> "ThetaFunction":
        return ThetaFunction(self.kind, self.exponent, self.knots, self.values, self.scale * factor)

    @property
    def label(self) -> str:
        base = f"power({self.exponent:g})" if self.kind is ThetaKind.POWER else self.kind.value
        return base if self.scale == 1.0 else f"{self.scale:g}*{base}"

    @property
    def domain_cap(self) -> float:
        if self.kind is ThetaKind.TABLE:
            return float(self.knots[-1])
        return math.inf

    def __call__(self, U):
        s = np.maximum(np.asarray(U, dtype=float), 0.0)
        if self.kind is ThetaKind.IDENTITY:
            out = s
        elif self.kind is ThetaKind.POWER:
            out = s ** self.exponent
        elif self.kind is ThetaKind.LOG_OSGOOD:
            with np.errstate(divide="ignore", invalid="ignore"):
                inner = np.where(s > 0, s * np.log(1.0 / np.where(s > 0, s, 1.0)), 0.0)
            out = np.where(s <= INV_E, inner, INV_E)
        elif self.kind is ThetaKind.LOG_GROWTH:
            out = np.where(s >= 1.0, s * np.log(np.maximum(s, 1.0)), 0.0)
        else:
            u, v = self.knots, self.values
            slope = (v[-1] - v[-2]) / (u[-1] - u[-2])
            out = np.where(s <= u[-1], np.interp(s, u, v), v[-1] + slope * (s - u[-1]))
        out = self.scale * out
        return float(out) if np.ndim(out) == 0 else out

    def tail_integral(self, U0: float) -> float:
        """Closed form of int_{U0}^inf ds/theta(s); inf when the integral diverges."""
        if self.kind is ThetaKind.POWER and self.exponent > 1:
            return U0 ** (1.0 - self.exponent) / ((self.exponent - 1.0) * self.scale)
        return math.inf


class PhiFunction:
    """
    Nonnegative time weight phi on [0, T], sampled at grid nodes.

    Integrals use the left-endpoint rule of the time-stepping scheme. A
    constant phi keeps its closed form and is valid for every t >= 0.

    Args:
        grid: Sampling grid
        samples: phi(t_k) per node
        constant: The constant value when phi is constant
        source: The sampled function, used for off-grid point values
    """

    def __init__(self, grid: TimeGrid, samples: Sequence[float], constant: Optional[float] = None,
                 source: Optional[Callable[[float], float]] = None) -> None:
        values = np.array(samples, dtype=float).reshape(-1)
        if values.size != grid.steps + 1:
            raise GridMismatchError(f"phi needs {grid.steps + 1} samples, got {values.size}")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise InvalidParameterError("phi samples must be finite and nonnegative")
        values.setflags(write=False)
        self.grid = grid
        self.samples = values
        self.constant_value = constant
        self.source = source

    @classmethod
    def constant(cls, value: float, grid: TimeGrid) -> "PhiFunction":
        if not value >= 0:
            raise InvalidParameterError(f"phi must be nonnegative, got {value}")
        return cls(grid, np.full(grid.steps + 1, float(value)), float(value))

    @classmethod
    def sample(cls, fn: Callable[[float], float], grid: TimeGrid) -> "PhiFunction":
        return cls(grid, [float(fn(float(t))) for t in grid.nodes], source=fn)

    @property
    def is_constant(self) -> bool:
        return self.constant_value is not None

    def value(self, t: float) -> float:
        if self.is_constant:
            return self.constant_value
        if self.source is not None:
            return float(self.source(float(t)))
        return float(self.samples[self.grid.index_of(t)])

    def cell_value(self, k: int) -> float:
        """phi on the cell [t_k, t_{k+1})."""
        return float(self.samples[min(k, self.grid.steps)])

    def integrals(self) -> np.ndarray:
        """Left-endpoint integral of phi at every node."""
        return np.concatenate([[0.0], np.cumsum(self.samples[:-1]) * self.grid.step])

    def integral(self, t: float) -> float:
        if t < 0:
            raise InvalidParameterError(f"integral upper limit must be nonnegative, got {t}")
        if self.is_constant:
            return self.constant_value * t
        k = self.grid.index_of(t)
        return float(self.integrals()[k] + (t - self.grid.nodes[k]) * self.samples[k])

    def lp_norm(self, p: float) -> float:
        """L^p(0, T) norm of the piecewise-constant phi; p = inf gives the sup."""
        cells = self.samples[:-1]
        if math.isinf(p):
            return float(np.max(cells))
        return float((self.grid.step * np.sum(cells ** p)) ** (1.0 / p))

    def sup(self) -> float:
        return float(np.max(self.samples))

    def scaled(self, factor: float) -> "PhiFunction":
        constant = None if self.constant_value is None else self.constant_value * factor
        return PhiFunction(self.grid, self.samples * factor, constant)


@dataclass(frozen=True, eq=False)
class ScalarCurve:
    """
    Nonnegative scalar function sampled on a grid.

    Attributes:
        grid: The time grid
        values: One value per node
        error_estimate: Discretization error reported by the producing solver
        residual: Per-node residual of the integral form (when produced by a solver)
    """
    grid: TimeGrid
    values: np.ndarray
    error_estimate: float = 0.0
    residual: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float).reshape(-1)
        if values.size != self.grid.steps + 1:
            raise GridMismatchError(f"curve needs {self.grid.steps + 1} values, got {values.size}")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise InvalidParameterError("scalar curve values must be finite and nonnegative")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, grid: TimeGrid) -> "ScalarCurve":
        return cls(grid, np.zeros(grid.steps + 1))

    def at(self, k: int) -> float:
        return float(self.values[k])

    def __len__(self) -> int:
        return self.values.size


class PsiTransform:
    """
    Psi(U) = int_{U0}^U ds/theta(s) for U >= U0 > 0, with its inverse.

    Integrals are taken in the variable x = ln s with adaptive quadrature and
    cached at log-spaced breakpoints, so repeated evaluations and the brentq
    inverse only integrate over one short segment.

    Example:
        >>> round(PsiTransform(ThetaFunction.power(2.0), 1.0).psi(2.0), 10)
        0.5
    """

    def __init__(self, theta: ThetaFunction, U0: float, points_per_decade: int = 8) -> None:
        if not (np.isfinite(U0) and U0 > 0):
            raise InvalidParameterError(f"Psi needs U0 > 0, got {U0}")
        self.theta = theta
        self.U0 = float(U0)
        self.ratio = 10.0 ** (1.0 / points_per_decade)
        self._nodes: List[float] = [self.U0]
        self._table: List[float] = [0.0]
        self.limit = theta.tail_integral(self.U0)

    def _segment(self, a: float, b: float) -> float:
        if b <= a:
            return 0.0
        theta = self.theta

        def integrand(x: float) -> float:
            s = math.exp(x)
            value = float(theta(s))
            return s / value if value > 0 else math.inf

        if float(theta(a)) <= 0:
            raise HorizonExceededError(f"theta vanishes at {a:.3e}; Psi is infinite there")
        result, _ = integrate.quad(integrand, math.log(a), math.log(b), epsabs=0.0, epsrel=1e-13, limit=200)
        return float(result)

    def _extend_to(self, U: float) -> None:
        while self._nodes[-1] < U:
            if self._nodes[-1] >= SolverDefaults.PSI_MAX_U:
                raise HorizonExceededError(f"Psi table exhausted at U={self._nodes[-1]:.3e}")
            nxt = self._nodes[-1] * self.ratio
            self._table.append(self._table[-1] + self._segment(self._nodes[-1], nxt))
            self._nodes.append(nxt)

    def psi(self, U: float) -> float:
        if U < self.U0:
            raise InvalidParameterError(f"Psi is evaluated on U >= U0 = {self.U0}, got {U}")
        self._extend_to(U)
        j = int(np.searchsorted(self._nodes, U, side="right")) - 1
        return self._table[j] + self._segment(self._nodes[j], U)

    def psi_inverse(self, y: float) -> float:
        """
        Raises:
            HorizonExceededError: y at or beyond int_{U0}^inf ds/theta
        """
        if y < 0:
            raise InvalidParameterError(f"Psi inverse is evaluated on y >= 0, got {y}")
        if y >= self.limit:
            raise HorizonExceededError(f"y={y:.6g} exceeds the Psi limit {self.limit:.6g}")
        if y == 0:
            return self.U0
        while self._table[-1] < y:
            self._extend_to(self._nodes[-1] * self.ratio)
        j = int(np.searchsorted(self._table, y, side="left"))
        lo, hi = self._nodes[max(j - 1, 0)], self._nodes[j]
        base = self._table[max(j - 1, 0)]
        return float(optimize.brentq(lambda u: base + self._segment(lo, u) - y, lo, hi, xtol=1e-300, rtol=1e-15))


def psi(transform: PsiTransform, U: float) -> float:
    return transform.psi(U)


def psi_inverse(transform: PsiTransform, y: float) -> float:
    return transform.psi_inverse(y)


def solve_via_psi(transform: PsiTransform, phi: PhiFunction, t: float) -> float:
    """U(t) = Psi^{-1}(int_0^t phi)."""
    return transform.psi_inverse(phi.integral(t))


def horizon(theta: ThetaFunction, phi: PhiFunction, U0: float) -> float:
    """
    Largest T with int_0^T phi <= int_{U0}^inf ds/theta; math.inf when no blow-up.

    For a sampled phi whose integral stays below the limit up to its last
    node, no blow-up occurs on the grid and math.inf is returned.

    Example:
        >>> horizon(ThetaFunction.power(2.0), PhiFunction.constant(1.0, TimeGrid(1.0, 10)), 2.0)
        0.5
    """
    if not U0 > 0:
        raise InvalidParameterError(f"horizon needs U0 > 0, got {U0}")
    limit = theta.tail_integral(U0)
    if math.isinf(limit):
        return math.inf
    if phi.is_constant:
        return math.inf if phi.constant_value == 0 else limit / phi.constant_value
    cumulative = phi.integrals()
    if cumulative[-1] < limit:
        return math.inf
    k = int(np.searchsorted(cumulative, limit, side="left")) - 1
    rate = phi.samples[k]
    return float(phi.grid.nodes[k] + (limit - cumulative[k]) / rate)


def gronwall_bound(phi: PhiFunction, U0: float, t: float) -> float:
    """U0 * exp(int_0^t phi); the exact solution for the identity kernel."""
    if U0 < 0:
        raise InvalidParameterError(f"U0 must be nonnegative, got {U0}")
    return U0 * math.exp(phi.integral(t))


def power_solution(m: float, phi: PhiFunction, U0: float, t: float) -> float:
    """
    (U0^{1-m} - (m-1) int_0^t phi)^{1/(1-m)} for the kernel U^m, m > 1.

    Raises:
        HorizonExceededError: t at or past the blow-up horizon
    """
    if not m > 1:
        raise InvalidParameterError(f"power solution needs m > 1, got {m}")
    if not U0 > 0:
        raise InvalidParameterError(f"power solution needs U0 > 0, got {U0}")
    base = U0 ** (1.0 - m) - (m - 1.0) * phi.integral(t)
    if base <= 0:
        raise HorizonExceededError(f"t={t} is at or past the blow-up horizon")
    return base ** (1.0 / (1.0 - m))


def _midpoint_run(phi: PhiFunction, theta: ThetaFunction, U0: float, grid: TimeGrid, substeps: int,
                  offset: Optional[PhiFunction]) -> np.ndarray:
    h = grid.step / substeps
    cap = SolverDefaults.IE_BLOWUP_CAP
    values = np.empty(grid.steps + 1)
    values[0] = U = float(U0)
    for k in range(grid.steps):
        rate = phi.cell_value(k)
        source = offset.cell_value(k) if offset is not None else 0.0
        for j in range(substeps):
            mid = U + 0.5 * h * (source + rate * theta(U))
            U = U + h * (source + rate * theta(mid))
            if not math.isfinite(U) or U > cap:
                t_hit = grid.nodes[k] + (j + 1) * h
                raise BlowUpError(float(t_hit), values[: k + 1].copy())
        values[k + 1] = U
    return values


def _integral_residual(values: np.ndarray, phi: PhiFunction, theta: ThetaFunction,
                       offset: Optional[PhiFunction]) -> np.ndarray:
    """|U_k - U_0 - int_0^{t_k} K(s, U)| with the trapezoid rule per cell."""
    grid = phi.grid
    rates = phi.samples[:-1]
    sources = offset.samples[:-1] if offset is not None else 0.0
    thetas = theta(values)
    cells = grid.step * (sources + rates * 0.5 * (thetas[:-1] + thetas[1:]))
    integral = np.concatenate([[0.0], np.cumsum(cells)])
    return np.abs(values - values[0] - integral)


def solve_scalar_ie(phi: PhiFunction, theta: ThetaFunction, U0: float, grid: TimeGrid,
                    substeps: int = SolverDefaults.IE_SUBSTEPS,
                    offset: Optional[PhiFunction] = None) -> ScalarCurve:
    """
    Numeric solution of U' = b(t) + phi(t) theta(U), U(0) = U0.

    Explicit midpoint with ``substeps`` steps per grid cell; phi and the
    optional source b are constant on each cell. The run is repeated with
    doubled substeps and the finer result is returned with a Richardson error
    estimate. The integral-form residual is recorded per node and a warning
    is logged when it exceeds the grid-dependent tolerance.

    For U0 = 0 without a source the zero curve is returned when the kernel
    passes the Osgood test; otherwise the problem is ambiguous and refused.

    Raises:
        BlowUpError: U exceeded the blow-up cap before T (carries the partial curve)
        AmbiguousSolutionError: U0 = 0 with a kernel that is not Osgood-divergent
        GridMismatchError: phi or the source live on another grid

    Example:
        >>> grid = TimeGrid(1.0, 100)
        >>> curve = solve_scalar_ie(PhiFunction.constant(1.0, grid), ThetaFunction.identity(), 1.0, grid)
        >>> round(curve.values[-1], 6)
        2.718282
    """
    if U0 < 0 or not math.isfinite(U0):
        raise InvalidParameterError(f"U0 must be finite and nonnegative, got {U0}")
    if int(substeps) != substeps or substeps < 1:
        raise InvalidParameterError(f"substeps must be >= 1, got {substeps}")
    grid.check_same(phi.grid)
    if offset is not None:
        grid.check_same(offset.grid)
        if not np.any(offset.samples > 0):
            offset = None

    if U0 == 0 and offset is None:
        from .criteria import OsgoodVerdict, osgood_classify

        verdict = osgood_classify(theta).verdict
        if verdict is OsgoodVerdict.DIVERGES:
            return ScalarCurve.zeros(grid)
        raise AmbiguousSolutionError(
            f"U0 = 0 with kernel {theta.label} classified {verdict.value}; use horizon/psi instead"
        )

    coarse = _midpoint_run(phi, theta, U0, grid, int(substeps), offset)
    fine = _midpoint_run(phi, theta, U0, grid, 2 * int(substeps), offset)
    error = float(np.max(np.abs(fine - coarse)) / 3.0)
    residual = _integral_residual(fine, phi, theta, offset)
    scale = max(1.0, float(np.max(fine)))
    tolerance = SolverDefaults.IE_RESIDUAL_FACTOR * grid.step ** 2 * scale * (1.0 + phi.sup()) ** 2
    if np.max(residual) > tolerance:
        logger.warning(
            f"[NOTICE] solve_scalar_ie: integral residual {np.max(residual):.3e} above {tolerance:.3e}; refine the grid"
        )
    return ScalarCurve(grid, fine, error, residual)


def uniqueness_majorant(theta: ThetaFunction, phi: PhiFunction, eps: float, grid: TimeGrid,
                        offset: Optional[PhiFunction] = None) -> ScalarCurve:
    """Majorant of ||u - u_hat|| for initial data eps apart; zero curve for eps = 0 under Osgood."""
    if eps < 0:
        raise InvalidParameterError(f"eps must be nonnegative, got {eps}")
    return solve_scalar_ie(phi, theta, eps, grid, offset=offset)


@dataclass(frozen=True)
class Gauge:
    """
    Gauge psi(t) = scale * t^exponent, exponent in (0, 1].

    psi(0+) = 0, psi' > 0 and psi'(0+) > 0 hold for every such exponent.
    """
    exponent: float = 1.0
    scale: float = 1.0

    def __post_init__(self) -> None:
        if not 0 < self.exponent <= 1:
            raise InvalidParameterError(f"gauge exponent must lie in (0, 1], got {self.exponent}")
        if not self.scale > 0:
            raise InvalidParameterError(f"gauge scale must be positive, got {self.scale}")

    @classmethod
    def linear(cls) -> "Gauge":
        return cls(1.0)

    def __call__(self, t):
        return self.scale * np.asarray(t, dtype=float) ** self.exponent

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            return self.scale * self.exponent * t ** (self.exponent - 1.0)


def gauge_majorant(theta: ThetaFunction, gauge: Gauge, U0: float, t: float) -> float:
    """
    Bound for U <= U0 + int_0^t (psi'/psi) theta(U): the U with Psi_{U0}(U) = psi(t).

    Returns math.inf past the horizon of theta.
    """
    try:
        return PsiTransform(theta, U0).psi_inverse(float(gauge(t)))
    except HorizonExceededError:
        return math.inf


def null_envelope(theta: ThetaFunction, phi: PhiFunction, grid: TimeGrid,
                  seeds: Sequence[float] = (1e-20, 1e-50, 1e-100, 1e-200, 1e-300)) -> ScalarCurve:
    """
    Envelope of solutions of U <= int_0^t phi theta(U) started from zero.

    Any such U is dominated by the solution from every U0 = eps > 0, so the
    pointwise minimum over shrinking seeds bounds it. Under the Osgood
    condition the envelope collapses to zero.
    """
    best = np.full(grid.steps + 1, np.inf)
    for eps in seeds:
        try:
            curve = solve_scalar_ie(phi, theta, eps, grid)
        except BlowUpError as exc:
            logger.debug(f"[NOTICE] null_envelope: seed {eps:.1e} blew up at t={exc.horizon:.4g}")
            continue
        best = np.minimum(best, curve.values)
    if not np.all(np.isfinite(best)):
        raise BlowUpError(grid.horizon, best[np.isfinite(best)])
    return ScalarCurve(grid, best)


@dataclass(frozen=True)
class LogKernelComparison:
    """Numeric oracle for U' = rate * U ln(1/U), U(0) = eps, against two candidate closed forms."""
    times: np.ndarray
    oracle: np.ndarray
    growth_form: np.ndarray
    decay_form: np.ndarray
    growth_error: float
    decay_error: float

    @property
    def preferred(self) -> str:
        return "decay" if self.decay_error <= self.growth_error else "growth"


def log_kernel_closed_forms(eps: float, rate: float, grid: TimeGrid) -> LogKernelComparison:
    """
    Compare eps^{exp(rate t)} and eps^{exp(-rate t)} with the numeric solution.

    Errors are maximal relative deviations over the grid nodes. Only the
    second form solves the equation while U stays below e^-1.
    """
    if not 0 < eps < INV_E:
        raise InvalidParameterError(f"eps must lie in (0, e^-1), got {eps}")
    phi = PhiFunction.constant(rate, grid)
    oracle = solve_scalar_ie(phi, ThetaFunction.log_osgood(), eps, grid).values
    t = grid.nodes
    growth = eps ** np.exp(rate * t)
    decay = eps ** np.exp(-rate * t)
    return LogKernelComparison(
        times=t,
        oracle=oracle,
        growth_form=growth,
        decay_form=decay,
        growth_error=float(np.max(np.abs(growth - oracle) / oracle)),
        decay_error=float(np.max(np.abs(decay - oracle) / oracle)),
    )


def z_space_ratio(curve: ScalarCurve, gauge: Gauge) -> np.ndarray:
    """Sampled U(t_k)/psi(t_k) for k >= 1; tends to 0 for curves in the weighted Nagumo space."""
    return curve.values[1:] / gauge(curve.grid.nodes[1:])


def closed_form_psi(theta: ThetaFunction, U0: float, U: float) -> Optional[float]:
    """Psi in closed form where one is known (None otherwise)."""
    c = theta.scale
    if theta.kind is ThetaKind.IDENTITY:
        return math.log(U / U0) / c
    if theta.kind is ThetaKind.POWER:
        m = theta.exponent
        if m == 1:
            return math.log(U / U0) / c
        return (U ** (1.0 - m) - U0 ** (1.0 - m)) / ((1.0 - m) * c)
    if theta.kind is ThetaKind.LOG_GROWTH and U0 > 1:
        return math.log(math.log(U) / math.log(U0)) / c
    if theta.kind is ThetaKind.LOG_OSGOOD and U <= INV_E:
        return (math.log(math.log(1.0 / U0)) - math.log(math.log(1.0 / U))) / c
    return None
