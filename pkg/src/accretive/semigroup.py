# src/accretive/semigroup.py
"""
The contraction semigroup S(t) generated by -A.

S(t)x is the limit of the exponential formula (I + t/n A)^{-n} x. No usable
rate is available in general, so the evaluator doubles n until two successive
evaluations agree to a target tolerance and reports the last successive
difference as an error estimate (an estimate, never a bound).
"""

import logging
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .banach import ArrayLike, NormKind, StateVector, as_array, norm
from .config import SolverDefaults
from .errors import InvalidParameterError
from .operators import DEFAULT_SOLVER, OperatorSpec, ResolventSolverConfig, resolvent_batch

logger = logging.getLogger(__name__)


def _power_batch(spec: OperatorSpec, times: np.ndarray, X: np.ndarray, n: int,
                 cfg: ResolventSolverConfig) -> np.ndarray:
    """J_{t_r/n}^n applied row by row; rows with t_r = 0 are returned untouched."""
    out = X.copy()
    moving = times > 0
    if not moving.any():
        return out
    steps = times[moving] / n
    Y = X[moving]
    for _ in range(n):
        Y = resolvent_batch(spec, steps, Y, cfg)
    out[moving] = Y
    return out


def exponential_formula(spec: OperatorSpec, t: float, x: ArrayLike, n: int,
                        cfg: ResolventSolverConfig = DEFAULT_SOLVER) -> StateVector:
    """
    J_{t/n} composed n times applied to x.

    Args:
        spec: Operator generating the semigroup
        t: Time, t >= 0 (t = 0 returns x exactly)
        x: Initial state
        n: Number of resolvent steps, n >= 1
        cfg: Resolvent solver settings

    Returns:
        StateVector: (I + t/n A)^{-n} x

    Raises:
        InvalidParameterError: t < 0 or n not a positive integer
        DimensionMismatchError: x does not fit the operator

    Example:
        >>> exponential_formula(LinearScalar(a=1.0), 1.0, [1.0], 4).components
        array([0.4096])
    """
    if t < 0:
        raise InvalidParameterError(f"semigroup time must be nonnegative, got {t}")
    if int(n) != n or n < 1:
        raise InvalidParameterError(f"exponential formula needs n >= 1, got {n}")
    row = as_array(x).reshape(1, -1).astype(float)
    spec.check_dimension(row.shape[1])
    return StateVector(_power_batch(spec, np.array([float(t)]), row, int(n), cfg)[0])


@dataclass(frozen=True)
class SemigroupEvaluator:
    """
    Adaptive evaluator of S(t)x.

    Attributes:
        spec: Operator generating the semigroup
        resolvent_config: Settings for each resolvent solve
        initial_steps: Starting n of the doubling schedule
        max_doublings: How many times n may double before giving up
        tolerance: Target Cauchy difference between successive evaluations
        norm: Norm used to measure that difference (defaults to the operator's natural norm)
    """
    spec: OperatorSpec
    resolvent_config: ResolventSolverConfig = DEFAULT_SOLVER
    initial_steps: int = SolverDefaults.SEMIGROUP_INITIAL_STEPS
    max_doublings: int = SolverDefaults.SEMIGROUP_MAX_DOUBLINGS
    tolerance: float = SolverDefaults.SEMIGROUP_TOLERANCE
    norm: NormKind = field(default=None)

    def __post_init__(self) -> None:
        if int(self.initial_steps) != self.initial_steps or self.initial_steps < 1:
            raise InvalidParameterError(f"initial n must be >= 1, got {self.initial_steps}")
        if self.max_doublings < 0:
            raise InvalidParameterError(f"doubling limit must be >= 0, got {self.max_doublings}")
        if not self.tolerance > 0:
            raise InvalidParameterError(f"semigroup tolerance must be positive, got {self.tolerance}")
        if self.norm is None:
            object.__setattr__(self, "norm", self.spec.natural_norm)


@dataclass(frozen=True)
class SemigroupResult:
    """Outcome of one adaptive evaluation; ``converged`` is False when the doubling limit was hit."""
    value: StateVector
    steps: int
    error_estimate: float
    converged: bool


@dataclass(frozen=True)
class SemigroupBatchResult:
    values: np.ndarray
    steps: int
    error_estimates: np.ndarray
    converged: bool


def semigroup_batch(evaluator: SemigroupEvaluator, times: Union[Sequence[float], np.ndarray],
                    X: ArrayLike) -> SemigroupBatchResult:
    """
    Adaptive S(t_r) x_r for a whole batch in one doubling schedule.

    All rows share the same n; the schedule stops when every row's successive
    difference is below the tolerance.

    Args:
        evaluator: Operator, tolerance, starting n and doubling budget
        times: One time t_r >= 0 per batch row
        X: States x_r stacked as (b, d)

    Returns:
        SemigroupBatchResult with the (b, d) values, the shared n, the last
        successive difference of every row and the convergence flag

    Example:
        >>> ev = SemigroupEvaluator(AbsSubdifferential(), tolerance=1e-8)
        >>> semigroup_batch(ev, [0.5, 2.0], [[1.0], [1.0]]).values
        array([[0.5],
               [0. ]])

    Raises:
        InvalidParameterError: a negative time or mismatched batch sizes
    """
    batch = np.atleast_2d(as_array(X)).astype(float)
    t = np.asarray(times, dtype=float).reshape(-1)
    if t.size != batch.shape[0]:
        raise InvalidParameterError(f"{t.size} times for a batch of {batch.shape[0]} states")
    if np.any(t < 0):
        raise InvalidParameterError("semigroup times must be nonnegative")
    spec = evaluator.spec
    spec.check_dimension(batch.shape[1])

    n = int(evaluator.initial_steps)
    if not np.any(t > 0):
        return SemigroupBatchResult(batch.copy(), n, np.zeros(t.size), True)

    current = _power_batch(spec, t, batch, n, evaluator.resolvent_config)
    errors = np.full(t.size, np.inf)
    for _ in range(evaluator.max_doublings):
        n *= 2
        refined = _power_batch(spec, t, batch, n, evaluator.resolvent_config)
        errors = np.atleast_1d(norm(refined - current, evaluator.norm))
        current = refined
        if np.all(errors < evaluator.tolerance):
            return SemigroupBatchResult(current, n, errors, True)

    logger.warning(
        f"[NOTICE] semigroup: doubling limit reached at n={n}, "
        f"error estimate {float(np.max(errors)):.3e} > {evaluator.tolerance:.1e}"
    )
    return SemigroupBatchResult(current, n, errors, False)


def semigroup(evaluator: SemigroupEvaluator, t: float, x: ArrayLike) -> SemigroupResult:
    """
    S(t)x by the exponential formula with adaptive n-doubling.

    When the doubling limit is hit first, the value is returned flagged
    ``converged=False`` instead of raising.

    Args:
        evaluator: Operator, tolerance, starting n and doubling budget
        t: Time, t >= 0
        x: Initial state

    Returns:
        SemigroupResult with the last iterate, the achieved n and the last
        successive difference as error estimate

    Raises:
        InvalidParameterError: t < 0

    Example:
        >>> ev = SemigroupEvaluator(LinearScalar(a=1.0), tolerance=1e-4)
        >>> round(float(semigroup(ev, 1.0, [1.0]).value.components[0]), 3)
        0.368
    """
    row = as_array(x).reshape(1, -1)
    result = semigroup_batch(evaluator, [t], row)
    return SemigroupResult(
        value=StateVector(result.values[0]),
        steps=result.steps,
        error_estimate=float(result.error_estimates[0]),
        converged=result.converged,
    )
