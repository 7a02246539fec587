import io
import logging
import pathlib
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, NamedTuple, Tuple, Union

import numpy as np
from scipy import integrate

from .exceptions import *


logger = logging.getLogger(__name__)

DEFAULT_GRID_POINTS = 4001
DOMAIN_TOLERANCE = 1e-12

# pairwise scans: exhaustive up to this many nodes, strided above
EXHAUSTIVE_PAIR_LIMIT = 1024
MAX_PAIRS = 2 ** 20
_ROW_BLOCK = 256


@dataclass(frozen=True)
class Grid:

    n_points: int = DEFAULT_GRID_POINTS

    def __post_init__(self):
        if isinstance(self.n_points, bool) or not isinstance(self.n_points, (int, np.integer)):
            raise ConfigurationError(msg=f"grid size must be an integer, got {self.n_points!r}")
        if self.n_points < 3 or self.n_points % 2 == 0:
            raise ConfigurationError(msg=f"grid size must be odd and >= 3, got {self.n_points}")

    @cached_property
    def nodes(self) -> np.ndarray:
        nodes = np.linspace(-1.0, 1.0, self.n_points)
        nodes.setflags(write=False)
        return nodes

    @property
    def spacing(self) -> float:
        return 2.0 / (self.n_points - 1)


class GridFunction:
    """
    Values of a real function at the nodes of a uniform grid on [-1, 1].

    Between nodes the function is piecewise linear.  Instances are immutable:
    arithmetic returns new objects.
    """

    def __init__(self, grid: Grid, values):
        values = np.array(values, dtype=float)
        if values.shape != (grid.n_points,):
            raise ConfigurationError(msg=f"expected {grid.n_points} values, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise DomainError(msg="grid function values must be finite")

        values.setflags(write=False)
        self.grid = grid
        self.values = values

    @staticmethod
    def from_function(grid: Grid, function: Callable[[np.ndarray], np.ndarray]) -> 'GridFunction':
        return GridFunction(grid, np.broadcast_to(function(grid.nodes), (grid.n_points,)))

    @staticmethod
    def constant(grid: Grid, value: float = 1.0) -> 'GridFunction':
        return GridFunction(grid, np.full(grid.n_points, float(value)))

    @staticmethod
    def from_csv(path: Union[str, pathlib.Path]) -> 'GridFunction':
        try:
            table = np.loadtxt(path, delimiter=',', skiprows=1, ndmin=2)
        except (OSError, ValueError) as ex:
            raise ConfigurationError(msg=f"Could not read grid function: {ex}", context=str(path))

        grid = Grid(table.shape[0])
        if not np.allclose(table[:, 0], grid.nodes, rtol=0, atol=1e-14):
            raise ConfigurationError(msg="CSV nodes do not form a uniform grid on [-1, 1]", context=str(path))
        return GridFunction(grid, table[:, 1])

    @property
    def nodes(self) -> np.ndarray:
        return self.grid.nodes

    def to_csv_text(self, value_name: str = 'value') -> str:
        with io.StringIO() as buffer:
            np.savetxt(buffer, np.column_stack([self.nodes, self.values]), fmt='%.17g', delimiter=',',
                       header=f"x,{value_name}", comments='')
            return buffer.getvalue()

    def evaluate(self, x):
        return evaluate(self, x)

    def integrate_dm(self) -> float:
        return integrate_dm(self)

    def finite_diff(self, k: int = 1) -> 'GridFunction':
        return finite_diff(self, k)

    def holder_log_constant(self, gamma: float) -> float:
        return holder_log_constant(self, gamma)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def normalized(self) -> 'GridFunction':
        mass = integrate_dm(self)
        if mass == 0:
            raise DomainError(msg="cannot normalize a function with zero mass")
        return self / mass

    def _values_of(self, other) -> np.ndarray:
        if isinstance(other, GridFunction):
            if other.grid != self.grid:
                raise ConfigurationError(msg="grid functions live on different grids",
                                         context=f"{self.grid.n_points} vs {other.grid.n_points} points")
            return other.values
        return float(other)

    def __add__(self, other):
        return GridFunction(self.grid, self.values + self._values_of(other))

    __radd__ = __add__

    def __sub__(self, other):
        return GridFunction(self.grid, self.values - self._values_of(other))

    def __rsub__(self, other):
        return GridFunction(self.grid, self._values_of(other) - self.values)

    def __mul__(self, other):
        return GridFunction(self.grid, self.values * self._values_of(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return GridFunction(self.grid, self.values / self._values_of(other))

    def __neg__(self):
        return GridFunction(self.grid, -self.values)

    def __repr__(self):
        return f"GridFunction(n_points={self.grid.n_points}, min={self.values.min():.6g}, max={self.values.max():.6g})"


class HolderEstimate(NamedTuple):

    value: float
    exhaustive: bool
    stride: int


def evaluate(f: GridFunction, x):
    x_array = np.asarray(x, dtype=float)
    if np.any(np.abs(x_array) > 1 + DOMAIN_TOLERANCE):
        raise DomainError(msg="evaluation point outside of [-1, 1]")

    result = np.interp(np.clip(x_array, -1.0, 1.0), f.grid.nodes, f.values)
    if np.ndim(x) == 0:
        return float(result)
    return result


def integrate_dm(f: GridFunction) -> float:
    # m is dx / 2 on [-1, 1]
    return 0.5 * float(integrate.simpson(f.values, dx=f.grid.spacing))


def cumulative_dm(f: GridFunction) -> GridFunction:
    """ x_j -> integral of f over [-1, x_j] against m, by cumulative Simpson """
    return GridFunction(f.grid, 0.5 * integrate.cumulative_simpson(f.values, dx=f.grid.spacing, initial=0.0))


def finite_diff(f: GridFunction, k: int = 1) -> GridFunction:
    if k < 1:
        raise ConfigurationError(msg=f"derivative order must be >= 1, got {k}")
    if f.grid.n_points < 2 * k + 1:
        raise ConfigurationError(msg=f"a grid of {f.grid.n_points} points is too small for order {k}")

    values = f.values
    for _ in range(k):
        values = np.gradient(values, f.grid.spacing, edge_order=2)
    return GridFunction(f.grid, values)


def strided_indices(n_points: int) -> Tuple[np.ndarray, int]:
    """ node indices used by pairwise scans and the stride between them; both endpoints are always included """
    if n_points <= EXHAUSTIVE_PAIR_LIMIT:
        return np.arange(n_points), 1

    stride = 1
    while True:
        indices = np.arange(0, n_points, stride)
        if indices[-1] != n_points - 1:
            indices = np.append(indices, n_points - 1)
        count = len(indices)
        if count * (count - 1) // 2 <= MAX_PAIRS:
            return indices, stride
        stride += 1


def holder_log_estimate(f: GridFunction, gamma: float) -> HolderEstimate:
    if not 0 < gamma <= 1:
        raise DomainError(msg=f"gamma must lie in (0, 1], got {gamma}")
    if np.any(f.values <= 0):
        raise DomainError(msg="the log-Holder constant needs a strictly positive function")

    indices, stride = strided_indices(f.grid.n_points)
    nodes = f.grid.nodes[indices]
    logs = np.log(f.values[indices])

    count = len(indices)
    best = 0.0
    columns = np.arange(count)
    for start in range(0, count, _ROW_BLOCK):
        stop = min(start + _ROW_BLOCK, count)
        upper = columns[None, :] > np.arange(start, stop)[:, None]
        if not upper.any():
            continue
        distance = np.abs(nodes[None, :] - nodes[start:stop, None])[upper]
        jump = np.abs(logs[None, :] - logs[start:stop, None])[upper]
        best = max(best, float(np.max(jump / distance ** gamma)))

    return HolderEstimate(value=best, exhaustive=(stride == 1), stride=stride)


def holder_log_constant(f: GridFunction, gamma: float) -> float:
    estimate = holder_log_estimate(f, gamma)
    if not estimate.exhaustive:
        logger.debug(f"log-Holder constant scanned with stride {estimate.stride}: {estimate.value} is a lower bound")
    return estimate.value
