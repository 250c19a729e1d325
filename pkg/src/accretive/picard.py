# src/accretive/picard.py
"""
Fixed-point machinery for u' + A u = F(t, u).

The integral operator

    G^{u0} u (t_k) = S(t_k) u0 + sum_{i<k} lambda S(t_k - t_i) F(t_i, u(t_i))

is discretised on the working grid: S(t_k - t_i) is realised by the
exponential formula J_{lambda/s}^{s(k-i)} with s substeps per cell, which
matches the implicit Euler scheme exactly for s = 1 and linear J.
Successive approximations u_{n+1} = G u_n start from the constant
trajectory u0 and stop on the plain sup-node norm. The Euler sweep
(``SweepScheme.EULER``) replaces the Duhamel sum by the implicit Euler run
with frozen forcing, whose limit is the mild solution for nonlinear A.
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Tuple, Union

import numpy as np

from .banach import (
    ArrayLike,
    NormKind,
    StateVector,
    TimeGrid,
    Trajectory,
    as_array,
    bielecki_norm,
    norm,
    running_sup,
)
from .config import SolverDefaults
from .errors import (
    DimensionMismatchError,
    InvalidParameterError,
    ModulusViolationError,
    PicardConvergenceError,
)
from .evolution import ForcingTerm, implicit_euler
from .majorant import PhiFunction, ScalarCurve, ThetaFunction
from .operators import DEFAULT_SOLVER, OperatorSpec, ResolventSolverConfig, resolvent_batch

logger = logging.getLogger(__name__)

ScalarMap = Callable[[np.ndarray], np.ndarray]


class Modulus(ABC):
    """The function K(t, U) bounding ||F(t, u) - F(t, v)|| by K(t, ||u - v||)."""

    @abstractmethod
    def __call__(self, t: float, U):
        """K(t, U), vectorised in U."""


@dataclass(frozen=True, eq=False)
class SeparableModulus(Modulus):
    """K(t, U) = phi(t) * theta(U); a float phi stands for a constant weight."""
    phi: Union[PhiFunction, float]
    theta: ThetaFunction

    def weight(self, t: float) -> float:
        if isinstance(self.phi, PhiFunction):
            return self.phi.value(t)
        return float(self.phi)

    def __call__(self, t, U):
        return self.weight(t) * self.theta(U)


@dataclass(frozen=True, eq=False)
class TableModulus(Modulus):
    """
    K sampled on a (time x level) table.

    Piecewise constant in t (left convention) and linear in U, with K(t, 0) = 0
    and nondecreasing rows enforced at construction.
    """
    times: np.ndarray
    levels: np.ndarray
    table: np.ndarray

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        levels = np.asarray(self.levels, dtype=float)
        table = np.asarray(self.table, dtype=float)
        if table.shape != (times.size, levels.size):
            raise InvalidParameterError(f"table shape {table.shape} vs {times.size} times x {levels.size} levels")
        if levels[0] != 0 or np.any(np.diff(levels) <= 0):
            raise InvalidParameterError("levels must start at 0 and increase strictly")
        if np.any(table[:, 0] != 0):
            raise InvalidParameterError("K(t, 0) must vanish")
        if np.any(np.diff(table, axis=1) < 0):
            raise InvalidParameterError("K(t, .) must be nondecreasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "table", table)

    def __call__(self, t, U):
        row = max(int(np.searchsorted(self.times, t, side="right")) - 1, 0)
        values = self.table[row]
        slope = (values[-1] - values[-2]) / (self.levels[-1] - self.levels[-2])
        s = np.asarray(U, dtype=float)
        out = np.where(s <= self.levels[-1], np.interp(s, self.levels, values),
                       values[-1] + slope * (s - self.levels[-1]))
        return float(out) if np.ndim(out) == 0 else out


class Perturbation(ABC):
    """The right-hand side F(t, u) with its declared modulus K."""

    modulus: Modulus

    @abstractmethod
    def __call__(self, t: float, u: np.ndarray) -> np.ndarray:
        """F(t, u) for a state (d,) or a batch (b, d)."""

    def on_trajectory(self, u: Trajectory) -> np.ndarray:
        """F(t_k, u(t_k)) for every node, shape (n+1, d)."""
        return np.stack([np.asarray(self(float(t), u.values[k]), dtype=float)
                         for k, t in enumerate(u.grid.nodes)])

    def validate(self, grid: TimeGrid, dim: int, norm_kind: NormKind = NormKind(),
                 samples: int = SolverDefaults.MODULUS_SAMPLES, seed: int = 0,
                 spread: float = 1.0) -> None:
        """
        Sampled check of K(t, 0) = 0, monotonicity of K and the structural inequality.

        Raises:
            ModulusViolationError: a sample breaks one of the conditions
        """
        nodes = grid.nodes
        for t in nodes:
            if float(self.modulus(float(t), 0.0)) != 0.0:
                raise ModulusViolationError(f"K(t, 0) != 0 at t={t:.6g}", (float(t), 0.0))
        levels = np.geomspace(1e-10, 10.0, 64)
        for t in nodes[:: max(1, grid.steps // 16)]:
            values = np.asarray(self.modulus(float(t), levels))
            if np.any(np.diff(values) < -SolverDefaults.MODULUS_SLACK):
                raise ModulusViolationError(f"K(t, .) decreases at t={t:.6g}", (float(t),))

        rng = np.random.default_rng(seed)
        picks = rng.integers(0, grid.steps + 1, size=samples)
        U = rng.uniform(-spread, spread, size=(samples, dim))
        gaps = np.exp(rng.uniform(math.log(1e-8), math.log(spread), size=(samples, 1)))
        V = U + gaps * rng.uniform(-1.0, 1.0, size=(samples, dim))
        for j in range(samples):
            t = float(nodes[picks[j]])
            lhs = float(norm(np.asarray(self(t, U[j])) - np.asarray(self(t, V[j])), norm_kind))
            distance = float(norm(U[j] - V[j], norm_kind))
            rhs = float(self.modulus(t, distance))
            if lhs > rhs + SolverDefaults.MODULUS_SLACK:
                raise ModulusViolationError(
                    f"||F(t,u) - F(t,v)|| = {lhs:.6g} > K(t, {distance:.3e}) = {rhs:.6g} at t={t:.6g}",
                    (t, distance, lhs, rhs),
                )


class PointwiseScalar(Perturbation):
    """F(t, u) = g(u) componentwise (e.g. u -> S0 * beta(u))."""

    def __init__(self, g: ScalarMap, modulus: Modulus) -> None:
        self.g = g
        self.modulus = modulus

    def __call__(self, t, u):
        return np.asarray(self.g(np.asarray(u, dtype=float)), dtype=float)


class TimeModulated(Perturbation):
    """F(t, u) = phi(t) * g(u)."""

    def __init__(self, phi: PhiFunction, g: ScalarMap, modulus: Modulus) -> None:
        self.phi = phi
        self.g = g
        self.modulus = modulus

    def __call__(self, t, u):
        return self.phi.value(t) * np.asarray(self.g(np.asarray(u, dtype=float)), dtype=float)


class Affine(Perturbation):
    """F(t, u) = a*u + b; the default modulus is |a| * U."""

    def __init__(self, b: ArrayLike, coefficient: float = 0.0, modulus: Optional[Modulus] = None) -> None:
        self.b = StateVector.of(b)
        self.coefficient = float(coefficient)
        self.modulus = modulus or SeparableModulus(abs(self.coefficient), ThetaFunction.identity())

    def __call__(self, t, u):
        u = np.asarray(u, dtype=float)
        if u.shape[-1] != self.b.dim:
            raise DimensionMismatchError(f"affine offset has dimension {self.b.dim}, state has {u.shape[-1]}")
        return self.coefficient * u + self.b.components


class SweepScheme(str, Enum):
    """How one application of G turns the frozen forcing into a trajectory."""
    DUHAMEL = "duhamel"   # S(t_k)u0 + sum lambda S(t_k - t_i) F_i
    EULER = "euler"       # implicit Euler with the forcing F_i frozen


def apply_G(spec: OperatorSpec, u0: ArrayLike, F: Perturbation, u: Trajectory, substeps: int = 1,
            cfg: ResolventSolverConfig = DEFAULT_SOLVER,
            scheme: SweepScheme = SweepScheme.DUHAMEL) -> Trajectory:
    """
    One sweep of the integral operator on the grid of ``u``.

    With the Duhamel scheme the batch [u0, F(t_0, u_0), ..., F(t_{n-1}, u_{n-1})]
    is propagated level by level; at level j every row still needed is
    advanced by J_{lambda/s}^s, and rows no longer needed are dropped.

    With the Euler scheme the sweep is the implicit Euler run whose forcing
    is frozen along ``u``, each cell split into s steps of J_{lambda/s}. Both
    schemes agree node-wise for linear operators and s = 1; for nonlinear
    operators only the Euler sweep converges to the limit of the scheme.

    Args:
        spec: The operator
        u0: Initial state, shared by every node of the image
        F: Perturbation evaluated along ``u`` at the left node of each cell
        u: Trajectory the forcing is frozen on; its grid is the working grid
        substeps: Resolvent substeps s per cell
        cfg: Resolvent solver settings
        scheme: Duhamel propagation or implicit Euler

    Returns:
        Trajectory G u on the grid of ``u``

    Raises:
        InvalidParameterError: substeps < 1
        DimensionMismatchError: u0 and u differ in dimension

    Example:
        >>> grid = TimeGrid(1.0, 4)
        >>> apply_G(ZeroOperator(), [1.0], Affine([0.0], 1.0), Trajectory.constant(grid, [1.0])).values[:, 0]
        array([1.  , 1.25, 1.5 , 1.75, 2.  ])
    """
    if int(substeps) != substeps or substeps < 1:
        raise InvalidParameterError(f"substeps must be >= 1, got {substeps}")
    start = np.array(as_array(u0), dtype=float).reshape(-1)
    if start.size != u.dim:
        raise DimensionMismatchError(f"initial state dimension {start.size} vs trajectory dimension {u.dim}")
    spec.check_dimension(start.size)
    grid = u.grid
    n, lam = grid.steps, grid.step
    step = lam / substeps

    forcing = F.on_trajectory(u)[:-1]
    if SweepScheme(scheme) is SweepScheme.EULER:
        out = np.empty((n + 1, start.size))
        out[0] = state = start
        for k in range(n):
            for _ in range(substeps):
                state = resolvent_batch(spec, step, state + step * forcing[k], cfg)
            out[k + 1] = state
        return Trajectory(grid, out, u.norm)

    level = np.vstack([start[None, :], forcing])
    out = np.zeros((n + 1, start.size))
    out[0] = start
    for j in range(1, n + 1):
        level = level[: n + 2 - j]
        for _ in range(substeps):
            level = np.atleast_2d(resolvent_batch(spec, step, level, cfg))
        out[j] += level[0]
        out[j:] += lam * level[1: n + 2 - j]
    return Trajectory(grid, out, u.norm)


@dataclass
class PicardDiagnostics:
    """
    Record of one Picard run.

    Attributes:
        iterations: Number of updates u_n -> u_{n+1} performed
        differences: R_n(T) = sup-node ||u_{n+1} - u_n|| per sweep, as computed
        difference_curves: R_n(t_k) running sups per sweep
        defect: ||u - G u|| of the returned trajectory
        converged: Whether the defect dropped below the tolerance
        bielecki_ratios: Successive Bielecki-norm contraction ratios (when a weight was given)
        trace: The iterates u_0, u_1, ... (when kept)
    """
    iterations: int = 0
    differences: List[float] = field(default_factory=list)
    difference_curves: List[np.ndarray] = field(default_factory=list)
    defect: float = math.inf
    converged: bool = False
    bielecki_ratios: List[float] = field(default_factory=list)
    trace: List[Trajectory] = field(default_factory=list)

    def is_monotone(self, slack: float = 1e-10) -> bool:
        """R_n(T) nonincreasing from n = 1 on."""
        tail = self.differences[1:]
        return all(b <= a + slack for a, b in zip(tail, tail[1:]))


def picard_iterate(spec: OperatorSpec, u0: ArrayLike, F: Perturbation, grid: TimeGrid,
                   tol: float = SolverDefaults.PICARD_TOLERANCE,
                   max_iter: int = SolverDefaults.PICARD_MAX_ITERATIONS,
                   norm_kind: Optional[NormKind] = None, substeps: int = 1,
                   cfg: ResolventSolverConfig = DEFAULT_SOLVER,
                   start: Optional[Trajectory] = None, validate: bool = False,
                   keep_trace: bool = True,
                   bielecki_gamma: Optional[float] = None,
                   scheme: SweepScheme = SweepScheme.DUHAMEL) -> Tuple[Trajectory, PicardDiagnostics]:
    """
    Successive approximations u_{n+1} = G u_n from the constant trajectory u0.

    Every sweep computes G u_n; its distance to u_n is both the successive
    difference R_n(T) and the fixed-point defect of u_n. The run stops at
    the first iterate whose defect is below ``tol`` and returns that iterate,
    so a restart from a converged fixed point performs no update.

    Args:
        spec: The operator
        u0: Initial state
        F: Perturbation
        grid: Working grid
        tol: Stopping bound on the sup-node difference
        max_iter: Update budget; the last iterate comes back flagged when exhausted
        norm_kind: Norm for differences (defaults to the operator's natural norm)
        substeps: Resolvent substeps per cell inside G
        start: Alternative initial iterate
        validate: Run the sampled modulus validation of F first
        keep_trace: Keep every iterate in the diagnostics
        bielecki_gamma: Weight for the diagnostic Bielecki contraction ratios
        scheme: How each sweep realises G

    Returns:
        (Trajectory, PicardDiagnostics): the last iterate and the per-sweep
        differences, Bielecki ratios, defect and optional trace

    Raises:
        InvalidParameterError: tol <= 0
        ModulusViolationError: ``validate`` is set and F breaks its modulus

    Example:
        >>> grid = TimeGrid(1.0, 2000)
        >>> u, diag = picard_iterate(ZeroOperator(), [1.0], Affine([0.0], 1.0), grid)
        >>> diag.converged, round(float(u.values[-1, 0]), 2)
        (True, 2.72)
    """
    if not tol > 0:
        raise InvalidParameterError(f"Picard tolerance must be positive, got {tol}")
    kind = norm_kind or spec.natural_norm
    start_state = np.array(as_array(u0), dtype=float).reshape(-1)
    if validate:
        F.validate(grid, start_state.size, kind)
    if start is None:
        current = Trajectory.constant(grid, start_state, kind)
    else:
        grid.check_same(start.grid)
        current = Trajectory(grid, start.values, kind)

    diagnostics = PicardDiagnostics()
    if keep_trace:
        diagnostics.trace.append(current)
    previous_gap: Optional[Trajectory] = None
    while True:
        image = apply_G(spec, start_state, F, current, substeps, cfg, scheme)
        gap = image - current
        curve = running_sup(gap)
        diagnostics.difference_curves.append(curve)
        diagnostics.differences.append(float(curve[-1]))
        if bielecki_gamma is not None and previous_gap is not None:
            denominator = bielecki_norm(previous_gap, bielecki_gamma)
            if denominator > 0:
                diagnostics.bielecki_ratios.append(bielecki_norm(gap, bielecki_gamma) / denominator)
        logger.debug(f"[NOTICE] picard sweep {len(diagnostics.differences)}: R={curve[-1]:.3e}")

        if curve[-1] < tol:
            diagnostics.converged = True
            diagnostics.defect = float(curve[-1])
            break
        if diagnostics.iterations >= max_iter:
            diagnostics.defect = float(curve[-1])
            logger.warning(
                f"[NOTICE] picard_iterate: no convergence after {max_iter} updates (defect {curve[-1]:.3e})"
            )
            break
        current = image
        previous_gap = gap
        diagnostics.iterations += 1
        if keep_trace:
            diagnostics.trace.append(current)
    return current, diagnostics


def bielecki_factor(phi: PhiFunction, p: float, gamma: float) -> float:
    """
    Contraction factor of G in the Bielecki norm for a Lipschitz weight phi in L^p.

    ||phi||_p / (p' gamma)^{1/p'} with 1/p + 1/p' = 1, or ||phi||_inf / gamma for
    p = inf. A gamma below the threshold that makes the factor useful is
    logged, and the factor is still returned.

    Example:
        >>> bielecki_factor(PhiFunction.constant(1.0, TimeGrid(1.0, 10)), 2.0, 2.0)
        0.5
    """
    if not p > 1:
        raise InvalidParameterError(f"Bielecki factor needs p > 1, got {p}")
    if not gamma > 0:
        raise InvalidParameterError(f"gamma must be positive, got {gamma}")
    size = phi.lp_norm(p)
    if math.isinf(p):
        threshold = size
        factor = size / gamma
    else:
        conjugate = p / (p - 1.0)
        threshold = ((p - 1.0) / p) * size ** conjugate
        factor = size / (conjugate * gamma) ** (1.0 / conjugate)
    if size > 0 and gamma <= threshold:
        logger.warning(f"[NOTICE] bielecki_factor: gamma={gamma:g} not above threshold {threshold:.6g}")
    return float(factor)


@dataclass(frozen=True)
class DominationReport:
    holds: bool
    worst_margin: float
    violations: List[Tuple[int, int]]


def majorant_domination(trace: List[Trajectory], U: ScalarCurve,
                        slack: Optional[float] = None) -> DominationReport:
    """
    Check sup_time_norm(u_n, k) <= U(t_k) + slack for every iterate and node.

    The default slack is the domination slack plus the solver's reported error.

    Args:
        trace: Picard iterates u_0, u_1, ...
        U: Scalar majorant on the same grid
        slack: Absolute allowance; None picks the default above

    Returns:
        DominationReport with the verdict, the smallest margin over all
        iterates and nodes and the (iterate, node) pairs that break it

    Raises:
        GridMismatchError: an iterate lives on another grid
    """
    allowance = SolverDefaults.DOMINATION_SLACK + U.error_estimate if slack is None else slack
    worst = math.inf
    violations = []
    for n, u in enumerate(trace):
        u.grid.check_same(U.grid)
        margins = U.values + allowance - running_sup(u)
        worst = min(worst, float(np.min(margins)))
        violations.extend((n, int(k)) for k in np.flatnonzero(margins < 0))
    return DominationReport(not violations, worst, violations)


def two_solution_gap(spec: OperatorSpec, F: Perturbation, u0: ArrayLike, u0_hat: ArrayLike,
                     grid: TimeGrid, **options) -> ScalarCurve:
    """
    Running sup of ||u - u_hat|| for the fixed points from two initial data.

    Args:
        spec: The operator
        F: Perturbation shared by both runs
        u0: First initial state
        u0_hat: Second initial state
        grid: Working grid
        **options: Passed to ``picard_iterate``; the trace is off by default

    Returns:
        ScalarCurve of the running-sup gap; the zero curve for equal data

    Raises:
        PicardConvergenceError: either run failed to converge

    Example:
        >>> grid = TimeGrid(1.0, 100)
        >>> gap = two_solution_gap(ZeroOperator(), Affine([0.0], 1.0), [1.0], [1.5], grid, tol=1e-12)
        >>> round(float(gap.values[-1]), 2)
        1.35
    """
    options.setdefault("keep_trace", False)
    u, first = picard_iterate(spec, u0, F, grid, **options)
    if not first.converged:
        raise PicardConvergenceError(first.iterations, first.defect)
    if np.array_equal(as_array(u0), as_array(u0_hat)):
        return ScalarCurve.zeros(grid)
    v, second = picard_iterate(spec, u0_hat, F, grid, **options)
    if not second.converged:
        raise PicardConvergenceError(second.iterations, second.defect)
    return ScalarCurve(grid, running_sup(u - v))


def frozen_forcing_euler(spec: OperatorSpec, u0: ArrayLike, F: Perturbation, u: Trajectory,
                         cfg: ResolventSolverConfig = DEFAULT_SOLVER) -> Trajectory:
    """Implicit Euler with the forcing g(t) = F(t, u(t)) frozen along ``u``."""
    forcing = ForcingTerm(u.grid, F.on_trajectory(u))
    return implicit_euler(spec, u0, forcing, u.grid, cfg, u.norm)


@dataclass(frozen=True)
class GEstimateReport:
    """
    Per-node sides of ||G^{u0}u - G^{v0}v||_{t_k} <= ||u0 - v0|| + sum_{i<k} lambda K(t_i, ||u - v||_{t_i}).
    """
    lhs: np.ndarray
    rhs: np.ndarray

    @property
    def slack(self) -> float:
        return float(np.min(self.rhs - self.lhs))

    @property
    def holds(self) -> bool:
        return bool(np.all(self.lhs <= self.rhs + 1e-8))


def g_estimate_gap(spec: OperatorSpec, F: Perturbation, u0: ArrayLike, v0: ArrayLike,
                   u: Trajectory, v: Trajectory, substeps: int = 1,
                   cfg: ResolventSolverConfig = DEFAULT_SOLVER,
                   scheme: SweepScheme = SweepScheme.DUHAMEL) -> GEstimateReport:
    """
    Evaluate both sides of the continuity estimate of G on a pair of trajectories.

    Args:
        spec: The operator
        F: Perturbation whose modulus K enters the right-hand side
        u0: Initial state of the first image
        v0: Initial state of the second image
        u: First trajectory
        v: Second trajectory on the same grid
        substeps: Resolvent substeps per cell inside G
        cfg: Resolvent solver settings
        scheme: How G is realised

    Returns:
        GEstimateReport with the running-sup gap of the images and the
        accumulated bound at every node

    Raises:
        GridMismatchError: u and v live on different grids
    """
    u.grid.check_same(v.grid)
    grid = u.grid
    lhs = running_sup(apply_G(spec, u0, F, u, substeps, cfg, scheme) - apply_G(spec, v0, F, v, substeps, cfg, scheme))
    distance = running_sup(u - v)
    increments = np.array([grid.step * float(F.modulus(float(t), distance[i]))
                           for i, t in enumerate(grid.nodes[:-1])])
    start_gap = float(norm(as_array(u0) - as_array(v0), u.norm))
    rhs = start_gap + np.concatenate([[0.0], np.cumsum(increments)])
    return GEstimateReport(lhs, rhs)
