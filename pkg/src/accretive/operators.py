# src/accretive/operators.py
"""
Canonical m-accretive operators with computable resolvents.

Every operator is represented through its resolvent J_lambda = (I + lambda A)^{-1}.
Multivalued operators never expose a set-valued apply; for subdifferential
operators the resolvent is the proximal map of the underlying convex energy.

Resolvents are vectorised: they accept a single state of shape ``(d,)`` or a
batch of shape ``(b, d)``, and the step ``lambda`` may be a scalar or one
value per batch row. The semigroup and Picard modules rely on this to push
many independent resolvent problems through one call.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable, Optional, Union

import numpy as np
import scipy.linalg

from .banach import ArrayLike, NormKind, StateVector, as_array, norm
from .config import SolverDefaults
from .errors import (
    DimensionMismatchError,
    InvalidParameterError,
    MultivaluedPointError,
    ResolventConvergenceError,
)

logger = logging.getLogger(__name__)

StepLike = Union[float, np.ndarray]


class DampingStrategy(str, Enum):
    """How the Newton resolvent solver safeguards its steps."""
    ARMIJO = "armijo"   # backtracking on energy or residual, gradient fallback
    NONE = "none"       # plain Newton steps


@dataclass(frozen=True)
class ResolventSolverConfig:
    """
    Settings for iterative resolvent solves.

    Attributes:
        tolerance: Sup norm bound on the inclusion residual y + lambda*A(y) - x
        max_iterations: Newton iteration budget per call
        damping: Step safeguard
    """
    tolerance: float = SolverDefaults.RESOLVENT_TOLERANCE
    max_iterations: int = SolverDefaults.RESOLVENT_MAX_ITERATIONS
    damping: DampingStrategy = DampingStrategy.ARMIJO

    def __post_init__(self) -> None:
        if not self.tolerance > 0:
            raise InvalidParameterError(f"resolvent tolerance must be positive, got {self.tolerance}")
        if self.max_iterations < 1:
            raise InvalidParameterError(f"max_iterations must be >= 1, got {self.max_iterations}")


DEFAULT_SOLVER = ResolventSolverConfig()


class OperatorSpec(ABC):
    """Base class of the bundled operator variants."""

    #: Dimension the operator is tied to, or None when it acts componentwise on any R^d.
    dim: Optional[int] = None

    @property
    def natural_norm(self) -> NormKind:
        """Norm in which the resolvent is guaranteed nonexpansive."""
        return NormKind.l2()

    @property
    def is_linear(self) -> bool:
        return False

    def check_dimension(self, d: int) -> None:
        if self.dim is not None and d != self.dim:
            raise DimensionMismatchError(f"{type(self).__name__} acts on R^{self.dim}, got dimension {d}")

    @abstractmethod
    def _resolve(self, lam: np.ndarray, X: np.ndarray, cfg: ResolventSolverConfig) -> np.ndarray:
        """Resolvent on a (b, d) batch with steps of shape (b, 1)."""

    @abstractmethod
    def _apply(self, Y: np.ndarray) -> np.ndarray:
        """Single-valued action on a (b, d) batch."""


@dataclass(frozen=True)
class ZeroOperator(OperatorSpec):
    """A = 0; the resolvent is the identity."""

    @property
    def is_linear(self) -> bool:
        return True

    def _resolve(self, lam, X, cfg):
        return X.copy()

    def _apply(self, Y):
        return np.zeros_like(Y)


@dataclass(frozen=True)
class LinearScalar(OperatorSpec):
    """A u = a*u componentwise, a >= 0."""
    a: float = 1.0

    def __post_init__(self) -> None:
        if not (np.isfinite(self.a) and self.a >= 0):
            raise InvalidParameterError(f"LinearScalar needs a >= 0, got {self.a}")

    @property
    def is_linear(self) -> bool:
        return True

    def _resolve(self, lam, X, cfg):
        return X / (1.0 + lam * self.a)

    def _apply(self, Y):
        return self.a * Y


@dataclass(frozen=True, eq=False)
class LinearMatrix(OperatorSpec):
    """
    A u = M u with M + M^T positive semidefinite (accretive in the L2 norm).

    The accretivity condition is checked at construction through the
    smallest eigenvalue of the symmetric part.
    """
    matrix: np.ndarray = field(default_factory=lambda: np.eye(1))

    def __post_init__(self) -> None:
        matrix = np.array(self.matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise InvalidParameterError(f"LinearMatrix needs a square matrix, got shape {matrix.shape}")
        smallest = scipy.linalg.eigvalsh(0.5 * (matrix + matrix.T))[0]
        if smallest < -SolverDefaults.ACCRETIVITY_EIGEN_SLACK:
            raise InvalidParameterError(
                f"M + M^T is not positive semidefinite (smallest eigenvalue {smallest:.3e})"
            )
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def is_linear(self) -> bool:
        return True

    def _resolve(self, lam, X, cfg):
        identity = np.eye(self.dim)
        steps = lam[:, 0]
        if np.all(steps == steps[0]):
            return scipy.linalg.solve(identity + steps[0] * self.matrix, X.T).T
        return np.stack([
            scipy.linalg.solve(identity + step * self.matrix, row) for step, row in zip(steps, X)
        ])

    def _apply(self, Y):
        return Y @ self.matrix.T


@dataclass(frozen=True)
class AbsSubdifferential(OperatorSpec):
    """
    The subdifferential of sum_i |u_i|, i.e. u -> sign(u) componentwise,
    multivalued ([-1, 1]) at zero components. Its resolvent is soft thresholding.
    """

    def _resolve(self, lam, X, cfg):
        return np.sign(X) * np.maximum(np.abs(X) - lam, 0.0)

    def _apply(self, Y):
        if np.any(Y == 0.0):
            raise MultivaluedPointError("sign(u) is multivalued at a zero component")
        return np.sign(Y)


@dataclass(frozen=True, eq=False)
class WeightedPLaplace1D(OperatorSpec):
    """
    Degenerate weighted p-Laplacian -((1 - x^2)|u'|^{p-2} u')' on [-1, 1].

    Discretised on ``dim`` uniform nodes with spacing h = 2/(dim-1). Fluxes
    live on cell edges (midpoints) with weight w = 1 - x^2 there. The weight
    function vanishes at x = +-1, so no boundary condition is imposed and the
    end cells couple only inward. The operator is the gradient of

        Phi_p(v) = (1/p) * sum_e w_e |(v_{e+1} - v_e)/h|^p h

    and its resolvent is the proximal map of lambda*Phi_p.

    Example:
        >>> spec = WeightedPLaplace1D(p=3.0, dim=16)
        >>> y = resolvent(spec, 0.1, 1.0 - spec.nodes ** 2)
    """
    p: float = 3.0
    dim: int = 16

    def __post_init__(self) -> None:
        if not (np.isfinite(self.p) and self.p > 1):
            raise InvalidParameterError(f"p-Laplace exponent must exceed 1, got {self.p}")
        if int(self.dim) != self.dim or self.dim < 2:
            raise InvalidParameterError(f"p-Laplace needs at least 2 spatial nodes, got {self.dim}")

    @cached_property
    def nodes(self) -> np.ndarray:
        nodes = np.linspace(-1.0, 1.0, self.dim)
        nodes.setflags(write=False)
        return nodes

    @property
    def spacing(self) -> float:
        return 2.0 / (self.dim - 1)

    @cached_property
    def edge_weights(self) -> np.ndarray:
        midpoints = 0.5 * (self.nodes[1:] + self.nodes[:-1])
        weights = 1.0 - midpoints ** 2
        weights.setflags(write=False)
        return weights

    @staticmethod
    def weight(x: np.ndarray) -> np.ndarray:
        return 1.0 - np.asarray(x) ** 2

    def slopes(self, V: np.ndarray) -> np.ndarray:
        return np.diff(V, axis=-1) / self.spacing

    def energy(self, V: np.ndarray) -> np.ndarray:
        s = self.slopes(V)
        return np.sum(self.edge_weights * np.abs(s) ** self.p, axis=-1) * self.spacing / self.p

    def _flux(self, V: np.ndarray) -> np.ndarray:
        s = self.slopes(V)
        return self.edge_weights * np.sign(s) * np.abs(s) ** (self.p - 1.0)

    def _apply(self, Y):
        q = self._flux(Y)
        G = np.zeros_like(Y)
        G[..., 1:] += q
        G[..., :-1] -= q
        return G

    def _curvature(self, V: np.ndarray) -> np.ndarray:
        s = self.slopes(V)
        if self.p >= 2.0:
            scale = np.abs(s) ** (self.p - 2.0)
        else:
            eps = SolverDefaults.PLAPLACE_REGULARIZATION
            scale = (s * s + eps * eps) ** ((self.p - 2.0) / 2.0)
        return self.edge_weights * (self.p - 1.0) * scale / self.spacing

    def _resolve(self, lam, X, cfg):
        return _newton_prox(self, lam, X, cfg)


def _solve_tridiagonal(lower: np.ndarray, diag: np.ndarray, upper: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Thomas algorithm, vectorised over the leading batch axis."""
    n = diag.shape[-1]
    c = np.zeros_like(diag)
    d = np.zeros_like(rhs)
    c[:, 0] = upper[:, 0] / diag[:, 0] if n > 1 else 0.0
    d[:, 0] = rhs[:, 0] / diag[:, 0]
    for i in range(1, n):
        denom = diag[:, i] - lower[:, i - 1] * c[:, i - 1]
        if i < n - 1:
            c[:, i] = upper[:, i] / denom
        d[:, i] = (rhs[:, i] - lower[:, i - 1] * d[:, i - 1]) / denom
    x = np.empty_like(rhs)
    x[:, -1] = d[:, -1]
    for i in range(n - 2, -1, -1):
        x[:, i] = d[:, i] - c[:, i] * x[:, i + 1]
    return x


def _newton_prox(spec: WeightedPLaplace1D, lam: np.ndarray, X: np.ndarray,
                 cfg: ResolventSolverConfig) -> np.ndarray:
    """
    Minimise 1/2 ||v - x||^2 + lambda*Phi_p(v) row by row with damped Newton.

    The Hessian I + lambda D^T diag(c) D is tridiagonal. Steps are accepted
    when they satisfy the Armijo condition on the energy or reduce the
    residual; rows where backtracking stalls take a gradient step instead.
    Starts from v = x.
    """
    V = X.copy()

    def energy(rows, Vr):
        return 0.5 * np.sum((Vr - X[rows]) ** 2, axis=1) + lam[rows, 0] * spec.energy(Vr)

    def gradient(rows, Vr):
        return Vr - X[rows] + lam[rows] * spec._apply(Vr)

    residual = np.max(np.abs(gradient(slice(None), V)), axis=1)
    for iteration in range(cfg.max_iterations):
        active = np.flatnonzero(residual > cfg.tolerance)
        if active.size == 0:
            return V
        Va = V[active]
        la = lam[active]
        grad = gradient(active, Va)

        c = spec._curvature(Va)
        diag = np.ones_like(Va)
        diag[:, :-1] += la * c
        diag[:, 1:] += la * c
        off = -la * c
        step = -_solve_tridiagonal(off, diag, off, grad)

        if cfg.damping is DampingStrategy.NONE:
            V[active] = Va + step
        else:
            E0 = energy(active, Va)
            slope = np.sum(grad * step, axis=1)
            res0 = residual[active]
            alpha = np.ones(active.size)
            accepted = np.zeros(active.size, dtype=bool)
            trial = Va.copy()
            for _ in range(SolverDefaults.LINE_SEARCH_HALVINGS):
                pending = ~accepted
                if not pending.any():
                    break
                rows = active[pending]
                candidate = Va[pending] + alpha[pending, None] * step[pending]
                e_new = energy(rows, candidate)
                r_new = np.max(np.abs(gradient(rows, candidate)), axis=1)
                ok = (e_new <= E0[pending] + SolverDefaults.ARMIJO_SLOPE * alpha[pending] * slope[pending]) \
                    | (r_new < res0[pending])
                idx = np.flatnonzero(pending)
                trial[idx[ok]] = candidate[ok]
                accepted[idx[ok]] = True
                alpha[idx[~ok]] *= 0.5
            if not accepted.all():
                stalled = np.flatnonzero(~accepted)
                # gradient fallback with step 1/L, L bounding the Hessian row sums
                bound = np.max(diag[stalled], axis=1) + 2.0 * np.max(np.abs(off[stalled]), axis=1, initial=0.0)
                trial[stalled] = Va[stalled] - grad[stalled] / bound[:, None]
                logger.debug(f"[NOTICE] p-Laplace prox: gradient fallback on {stalled.size} rows")
            V[active] = trial

        residual[active] = np.max(np.abs(gradient(active, V[active])), axis=1)

    worst = float(np.max(residual))
    if worst > cfg.tolerance:
        raise ResolventConvergenceError("p-Laplace resolvent did not converge", worst, cfg.max_iterations)
    return V


def _as_batch(x: ArrayLike):
    X = as_array(x)
    single = X.ndim == 1
    return np.atleast_2d(X).astype(float, copy=True), single


def _as_steps(lam: StepLike, rows: int) -> np.ndarray:
    steps = np.broadcast_to(np.asarray(lam, dtype=float).reshape(-1, 1), (rows, 1)).copy()
    if not np.all(steps > 0):
        raise InvalidParameterError(f"resolvent step lambda must be positive, got {lam}")
    return steps


def resolvent_batch(spec: OperatorSpec, lam: StepLike, X: ArrayLike,
                    cfg: ResolventSolverConfig = DEFAULT_SOLVER) -> np.ndarray:
    """
    Apply J_lambda to a single state or a (b, d) batch; returns an ndarray.

    Args:
        spec: Operator variant
        lam: One step size, or one per batch row
        X: A state of shape (d,) or a batch of shape (b, d)
        cfg: Tolerance, iteration budget and damping of the iterative solves

    Returns:
        Resolvent images with the shape of X

    Example:
        >>> resolvent_batch(AbsSubdifferential(), [0.5, 2.0], [[1.0, 0.2], [1.0, 3.0]])
        array([[0.5, 0. ],
               [0. , 1. ]])

    Raises:
        InvalidParameterError: lambda <= 0
        DimensionMismatchError: state dimension differs from the operator's
        ResolventConvergenceError: an iterative solve missed its tolerance
    """
    batch, single = _as_batch(X)
    spec.check_dimension(batch.shape[1])
    steps = _as_steps(lam, batch.shape[0])
    result = spec._resolve(steps, batch, cfg)
    return result[0] if single else result


def resolvent(spec: OperatorSpec, lam: float, x: ArrayLike,
              cfg: ResolventSolverConfig = DEFAULT_SOLVER) -> StateVector:
    """
    J_lambda x = (I + lambda A)^{-1} x.

    The returned y satisfies ||y + lambda z - x|| <= cfg.tolerance for the
    selection z = (x - y)/lambda in A(y).

    Args:
        spec: Operator variant
        lam: Step size lambda > 0
        x: State in R^d
        cfg: Solver settings for the p-Laplacian Newton solve

    Returns:
        StateVector holding J_lambda x

    Raises:
        InvalidParameterError: lambda <= 0
        ResolventConvergenceError: the Newton solve missed cfg.tolerance

    Example:
        >>> resolvent(LinearScalar(a=1.0), 1.0, [2.0]).components
        array([1.])
    """
    return StateVector(resolvent_batch(spec, lam, as_array(x).reshape(-1), cfg))


def apply_single_valued(spec: OperatorSpec, y: ArrayLike) -> StateVector:
    """
    The value A(y) for the single-valued variants.

    Args:
        spec: Operator variant
        y: Point of evaluation

    Returns:
        StateVector holding A(y)

    Raises:
        MultivaluedPointError: AbsSubdifferential at a point with a zero component

    Example:
        >>> apply_single_valued(AbsSubdifferential(), [2.0, -0.5]).components
        array([ 1., -1.])
    """
    Y = as_array(y).reshape(1, -1)
    spec.check_dimension(Y.shape[1])
    return StateVector(spec._apply(Y)[0])


def apply_batch(spec: OperatorSpec, Y: ArrayLike) -> np.ndarray:
    """Vectorised single-valued action on a (b, d) batch."""
    batch, single = _as_batch(Y)
    spec.check_dimension(batch.shape[1])
    result = spec._apply(batch)
    return result[0] if single else result


def plaplace_energy(spec: WeightedPLaplace1D, v: ArrayLike) -> float:
    """Phi_p(v) = (1/p) sum_e w_e |Dv_e/h|^p h; zero on constants, p-homogeneous."""
    values = as_array(v)
    spec.check_dimension(values.shape[-1])
    return float(spec.energy(values))


def resolvent_constant(spec: OperatorSpec, lam: float, points: Iterable[ArrayLike],
                       cfg: ResolventSolverConfig = DEFAULT_SOLVER,
                       norm_kind: Optional[NormKind] = None) -> float:
    """
    Empirical C in ||x - J_lambda x|| <= lambda*C over a bounded sample set.

    The constant is measured, not derived: the largest observed
    ||x - J_lambda x|| / lambda over the given points.

    Args:
        spec: Operator variant
        lam: Step size lambda > 0
        points: Sample states, all of the operator's dimension
        cfg: Resolvent solver settings
        norm_kind: Norm of the estimate; the operator's natural norm by default

    Returns:
        max ||x - J_lambda x|| / lambda over ``points``

    Example:
        >>> resolvent_constant(AbsSubdifferential(), 0.1, [[2.0], [-3.0]])
        1.0
    """
    X = np.atleast_2d(np.array([as_array(p) for p in points], dtype=float))
    kind = norm_kind or spec.natural_norm
    moved = norm(X - resolvent_batch(spec, lam, X, cfg), kind)
    return float(np.max(np.atleast_1d(moved)) / lam)


@dataclass(frozen=True)
class AccretivitySample:
    holds: bool
    worst_ratio: float
    witness: Optional[np.ndarray] = None


def is_accretive_sample(spec: OperatorSpec, dim: int, lam: float = 0.5, samples: int = 100, seed: int = 0,
                        spread: float = 1.0, cfg: ResolventSolverConfig = DEFAULT_SOLVER,
                        norm_kind: Optional[NormKind] = None) -> AccretivitySample:
    """
    Sampled nonexpansiveness of J_lambda: ||J x - J y|| <= ||x - y|| on random pairs.

    Args:
        spec: Operator variant
        dim: State dimension of the sample pairs
        lam: Step size of the resolvent
        samples: Number of pairs drawn uniformly from [-spread, spread]^d
        seed: Seed of the pair generator
        spread: Half-width of the sampling box
        cfg: Resolvent solver settings
        norm_kind: Norm of the check; the operator's natural norm by default

    Returns:
        AccretivitySample whose ``worst_ratio`` is the largest
        ||J x - J y|| / ||x - y|| seen and whose ``witness`` holds the
        offending pair stacked as (2, d) when the check fails

    Raises:
        InvalidParameterError: samples < 1

    Example:
        >>> is_accretive_sample(LinearScalar(a=2.0), dim=3).holds
        True
    """
    if samples < 1:
        raise InvalidParameterError(f"need at least one sample pair, got {samples}")
    spec.check_dimension(dim)
    kind = norm_kind or spec.natural_norm
    rng = np.random.default_rng(seed)
    X = rng.uniform(-spread, spread, size=(samples, dim))
    Y = rng.uniform(-spread, spread, size=(samples, dim))
    before = np.atleast_1d(norm(X - Y, kind))
    after = np.atleast_1d(norm(resolvent_batch(spec, lam, X, cfg) - resolvent_batch(spec, lam, Y, cfg), kind))
    ratios = after / np.maximum(before, 1e-300)
    j = int(np.argmax(ratios))
    holds = bool(np.all(after <= before * (1.0 + 1e-9) + cfg.tolerance))
    witness = None if holds else np.vstack([X[j], Y[j]])
    return AccretivitySample(holds, float(ratios[j]), witness)
