# src/accretive/errors.py
"""
Exception hierarchy for the accretive evolution toolkit.

Fatal conditions raise one of these; recoverable outcomes (non-converged
semigroup evaluations, unfinished Picard runs) come back as result objects
carrying a ``converged`` flag instead.
"""

from typing import Optional, Tuple

import numpy as np


class AccretiveError(Exception):
    """Base class for every error raised by the library."""


class InvalidParameterError(AccretiveError, ValueError):
    """A parameter violates its documented range (e.g. lambda <= 0)."""


class DimensionMismatchError(AccretiveError, ValueError):
    """Two objects that must share the state dimension do not."""


class GridMismatchError(AccretiveError, ValueError):
    """Two curves or trajectories live on different time grids."""


class MultivaluedPointError(AccretiveError):
    """A set-valued operator was asked for a single value where it has many."""


class ResolventConvergenceError(AccretiveError):
    """The resolvent solver did not reach its residual tolerance."""

    def __init__(self, message: str, residual: float, iterations: int) -> None:
        super().__init__(f"{message} (residual={residual:.3e}, iterations={iterations})")
        self.residual = residual
        self.iterations = iterations


class EulerStepError(AccretiveError):
    """A resolvent failure inside a time-stepping loop, tagged with the step."""

    def __init__(self, step: int, cause: ResolventConvergenceError) -> None:
        super().__init__(f"implicit Euler step {step} failed: {cause}")
        self.step = step
        self.cause = cause


class BlowUpError(AccretiveError):
    """The scalar majorant left every finite bound before the end of the grid."""

    def __init__(self, horizon: float, partial: np.ndarray) -> None:
        super().__init__(f"blow-up detected at t={horizon:.6g}")
        self.horizon = horizon
        self.partial = partial


class HorizonExceededError(AccretiveError):
    """A Psi-transform value lies beyond the integral of 1/theta to infinity."""


class AmbiguousSolutionError(AccretiveError):
    """U0 = 0 with a kernel that does not force the zero solution."""


class ModulusViolationError(AccretiveError):
    """A sampled pair breaks the declared structural inequality of F."""

    def __init__(self, message: str, witness: Optional[Tuple[float, ...]] = None) -> None:
        super().__init__(message)
        self.witness = witness


class PicardConvergenceError(AccretiveError):
    """A Picard run that a caller needs as a fixed point stopped short of its tolerance."""

    def __init__(self, iterations: int, defect: float) -> None:
        super().__init__(f"Picard iteration not converged after {iterations} updates (defect={defect:.3e})")
        self.iterations = iterations
        self.defect = defect
