# src/accretive/banach.py
"""
Finite-dimensional proxy for the Banach state space.

The abstract space is realised as R^d with a selectable norm. This module
defines the state vectors, uniform time grids and node-sampled trajectories
that every other module works with, plus the norms used throughout: the
pointwise norm, the running sup-over-time norm and the Bielecki norm.

All types are immutable after construction; the numpy buffers they hold are
flagged read-only.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DimensionMismatchError, GridMismatchError, InvalidParameterError

ArrayLike = Union[np.ndarray, Sequence[float], "StateVector"]


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


class NormTag(str, Enum):
    SUP = "sup"
    L1 = "l1"
    L2 = "l2"
    WEIGHTED_L2 = "weighted_l2"


@dataclass(frozen=True)
class NormKind:
    """
    Selects the norm of the proxy space.

    Attributes:
        tag: Which norm family to use
        weights: Positive weights, only for ``WEIGHTED_L2`` (one per component)

    Example:
        >>> norm([1.0, 1.0], NormKind.weighted_l2([4.0, 9.0]))
        3.605551275463989
    """
    tag: NormTag = NormTag.L2
    weights: Optional[Tuple[float, ...]] = None

    def __post_init__(self) -> None:
        if self.tag is NormTag.WEIGHTED_L2:
            if not self.weights:
                raise InvalidParameterError("WeightedL2 norm requires a weight list")
            if any(not np.isfinite(w) or w <= 0 for w in self.weights):
                raise InvalidParameterError(f"WeightedL2 weights must be strictly positive: {self.weights}")
        elif self.weights is not None:
            raise InvalidParameterError(f"{self.tag.value} norm takes no weights")

    @classmethod
    def sup(cls) -> "NormKind":
        return cls(NormTag.SUP)

    @classmethod
    def l1(cls) -> "NormKind":
        return cls(NormTag.L1)

    @classmethod
    def l2(cls) -> "NormKind":
        return cls(NormTag.L2)

    @classmethod
    def weighted_l2(cls, weights: Sequence[float]) -> "NormKind":
        return cls(NormTag.WEIGHTED_L2, tuple(float(w) for w in weights))

    @classmethod
    def parse(cls, name: str, weights: Optional[Sequence[float]] = None) -> "NormKind":
        """Build a norm from its config name (``sup``, ``l1``, ``l2``, ``weighted_l2``)."""
        tag = NormTag(name.lower())
        if tag is NormTag.WEIGHTED_L2:
            return cls.weighted_l2(weights or ())
        return cls(tag)


@dataclass(frozen=True)
class StateVector:
    """
    An element of the proxy state space R^d.

    Components must be finite; the dimension is fixed at construction.
    Instances convert transparently with ``np.asarray``.
    """
    components: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.components, dtype=float).reshape(-1)
        if values.size < 1:
            raise InvalidParameterError("a state vector needs at least one component")
        if not np.all(np.isfinite(values)):
            raise InvalidParameterError("state vector components must be finite")
        object.__setattr__(self, "components", _frozen(values))

    @classmethod
    def of(cls, values: ArrayLike) -> "StateVector":
        if isinstance(values, StateVector):
            return values
        return cls(np.asarray(values, dtype=float))

    @classmethod
    def zeros(cls, dim: int) -> "StateVector":
        return cls(np.zeros(dim))

    @property
    def dim(self) -> int:
        return int(self.components.size)

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.components
        return self.components.astype(dtype)

    def __len__(self) -> int:
        return self.dim


def as_array(x: ArrayLike) -> np.ndarray:
    """Return a float array view of a state vector, array or sequence."""
    if isinstance(x, StateVector):
        return x.components
    return np.asarray(x, dtype=float)


@dataclass(frozen=True)
class TimeGrid:
    """
    Uniform time grid t_k = k*T/n for k = 0..n.

    Attributes:
        horizon: Final time T > 0
        steps: Number of intervals n >= 1
    """
    horizon: float
    steps: int

    def __post_init__(self) -> None:
        if not (np.isfinite(self.horizon) and self.horizon > 0):
            raise InvalidParameterError(f"grid horizon must be positive, got {self.horizon}")
        if int(self.steps) != self.steps or self.steps < 1:
            raise InvalidParameterError(f"grid steps must be a positive integer, got {self.steps}")
        object.__setattr__(self, "steps", int(self.steps))
        object.__setattr__(self, "horizon", float(self.horizon))

    @property
    def step(self) -> float:
        """The Euler step lambda = T/n."""
        return self.horizon / self.steps

    @property
    def nodes(self) -> np.ndarray:
        nodes = np.arange(self.steps + 1, dtype=float) * self.step
        nodes[-1] = self.horizon
        return _frozen(nodes)

    def __len__(self) -> int:
        return self.steps + 1

    def index_of(self, t: float) -> int:
        """Index of the node whose interval [t_k, t_{k+1}) contains t (piecewise-constant convention)."""
        if t < 0 or t > self.horizon * (1 + 1e-12):
            raise InvalidParameterError(f"time {t} outside [0, {self.horizon}]")
        return min(int(np.floor(t / self.step + 1e-9)), self.steps)

    def check_same(self, other: "TimeGrid") -> None:
        if self.steps != other.steps or not np.isclose(self.horizon, other.horizon, rtol=1e-14, atol=0):
            raise GridMismatchError(f"grid mismatch: {self} vs {other}")


def norm(x: ArrayLike, kind: NormKind = NormKind()) -> Union[float, np.ndarray]:
    """
    Evaluate the selected norm along the last axis.

    A single vector returns a float; a ``(b, d)`` batch returns ``b`` norms.

    Raises:
        DimensionMismatchError: weight list length differs from the dimension
    """
    values = as_array(x)
    if kind.tag is NormTag.SUP:
        result = np.max(np.abs(values), axis=-1)
    elif kind.tag is NormTag.L1:
        result = np.sum(np.abs(values), axis=-1)
    elif kind.tag is NormTag.L2:
        result = np.sqrt(np.sum(values * values, axis=-1))
    else:
        weights = np.asarray(kind.weights, dtype=float)
        if weights.size != values.shape[-1]:
            raise DimensionMismatchError(
                f"weighted norm has {weights.size} weights for dimension {values.shape[-1]}"
            )
        result = np.sqrt(np.sum(weights * values * values, axis=-1))
    if np.ndim(result) == 0:
        return float(result)
    return result


@dataclass(frozen=True)
class Trajectory:
    """
    A curve in the state space sampled at the nodes of a time grid.

    Between nodes the curve is read as piecewise constant: u(t) = u(t_k)
    for t in [t_k, t_{k+1}).

    Attributes:
        grid: The time grid
        values: Array of shape (n+1, d), one state per node
        norm: Norm used by the time norms of this trajectory
    """
    grid: TimeGrid
    values: np.ndarray
    norm: NormKind = field(default_factory=NormKind)

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2 or values.shape[0] != self.grid.steps + 1:
            raise GridMismatchError(
                f"trajectory needs {self.grid.steps + 1} node values, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise InvalidParameterError("trajectory values must be finite")
        object.__setattr__(self, "values", _frozen(values))

    @classmethod
    def constant(cls, grid: TimeGrid, value: ArrayLike, norm_kind: NormKind = NormKind()) -> "Trajectory":
        row = as_array(value).reshape(1, -1)
        return cls(grid, np.repeat(row, grid.steps + 1, axis=0), norm_kind)

    @property
    def dim(self) -> int:
        return int(self.values.shape[1])

    def at(self, k: int) -> StateVector:
        return StateVector(self.values[k])

    def node_norms(self) -> np.ndarray:
        return norm(self.values, self.norm)

    def __sub__(self, other: "Trajectory") -> "Trajectory":
        self.grid.check_same(other.grid)
        if self.dim != other.dim:
            raise DimensionMismatchError(f"dimension {self.dim} vs {other.dim}")
        return Trajectory(self.grid, self.values - other.values, self.norm)


def sup_time_norm(u: Trajectory, up_to: Optional[int] = None) -> float:
    """
    The norm of the space of continuous curves on [0, t_k]: max_{j<=k} ||u(t_j)||.

    Args:
        u: Trajectory to measure
        up_to: Node index k (defaults to the last node)

    Raises:
        InvalidParameterError: k outside 0..n
    """
    k = u.grid.steps if up_to is None else up_to
    if not 0 <= k <= u.grid.steps:
        raise InvalidParameterError(f"node index {k} outside 0..{u.grid.steps}")
    return float(np.max(u.node_norms()[: k + 1]))


def running_sup(u: Trajectory) -> np.ndarray:
    """Vector of sup_time_norm(u, k) for every node k."""
    return np.maximum.accumulate(u.node_norms())


def bielecki_norm(u: Trajectory, gamma: float) -> float:
    """max_k exp(-gamma*t_k) * ||u(t_k)||; gamma must be positive."""
    if not gamma > 0:
        raise InvalidParameterError(f"Bielecki weight gamma must be positive, got {gamma}")
    weights = np.exp(-gamma * u.grid.nodes)
    return float(np.max(weights * u.node_norms()))
