from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

import numpy as np

from .exceptions import *
from .gridfn import GridFunction, integrate_dm
from .system import IFSSystem, require_admissible, require_positive_epsilon


DEFAULT_T_NODES = 32


@dataclass(frozen=True)
class QuadratureSpec:

    t_nodes: int = DEFAULT_T_NODES

    def __post_init__(self):
        if isinstance(self.t_nodes, bool) or not isinstance(self.t_nodes, (int, np.integer)) or self.t_nodes < 2:
            raise ConfigurationError(msg=f"t_nodes must be an integer >= 2, got {self.t_nodes!r}")

    @property
    def unit_rule(self) -> Tuple[np.ndarray, np.ndarray]:
        """ Gauss-Legendre nodes and weights on [0, 1] """
        return _unit_gauss_legendre(self.t_nodes)


@lru_cache(maxsize=None)
def _unit_gauss_legendre(n: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(n)
    nodes = (nodes + 1.0) / 2.0
    weights = weights / 2.0
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def _check(sys: IFSSystem, *functions: GridFunction):
    require_positive_epsilon(sys)
    require_admissible(sys)
    grids = {f.grid for f in functions}
    if len(grids) > 1:
        raise ConfigurationError(msg="grid functions live on different grids")


def _interpolate(f: GridFunction, points: np.ndarray) -> np.ndarray:
    # points are in [-1, 1] by containment, up to rounding
    return np.interp(np.clip(points, -1.0, 1.0), f.grid.nodes, f.values)


def _forward_images(sys: IFSSystem, x: np.ndarray, t: np.ndarray):
    """ yields (branch, f_{k,t}(x)) with shape (len(x), len(t)) """
    for branch in sys.branches:
        yield branch, sys.lam * x[:, None] + branch.a + branch.b * t[None, :]


def apply_U(sys: IFSSystem, psi: GridFunction, quad: QuadratureSpec = QuadratureSpec()) -> GridFunction:
    _check(sys, psi)

    unit_nodes, unit_weights = quad.unit_rule
    t = sys.epsilon * unit_nodes
    weights = sys.epsilon * unit_weights * sys.noise.pdf(t)

    result = np.zeros(psi.grid.n_points)
    for branch, images in _forward_images(sys, psi.nodes, t):
        result += branch.p * np.sum(_interpolate(psi, images) * weights[None, :], axis=1)
    return GridFunction(psi.grid, result)


def apply_L(sys: IFSSystem, phi: GridFunction, quad: QuadratureSpec = QuadratureSpec()) -> GridFunction:
    _check(sys, phi)

    unit_nodes, unit_weights = quad.unit_rule
    y = phi.nodes
    eps = sys.epsilon

    result = np.zeros(phi.grid.n_points)
    for branch in sys.branches:
        # T(y) = {t in [0, eps] : |y - a - b t| <= lam}, an interval
        low = (y - branch.a - sys.lam) / branch.b
        high = (y - branch.a + sys.lam) / branch.b
        if branch.b < 0:
            low, high = high, low
        low = np.maximum(low, 0.0)
        high = np.minimum(high, eps)
        width = np.clip(high - low, 0.0, None)
        low = np.where(width > 0, low, 0.0)

        t = np.clip(low[:, None] + width[:, None] * unit_nodes[None, :], 0.0, eps)
        preimages = (y[:, None] - branch.a - branch.b * t) / sys.lam
        integrand = _interpolate(phi, preimages) * sys.noise.pdf(t)
        result += branch.p / sys.lam * np.sum(integrand * (width[:, None] * unit_weights[None, :]), axis=1)

    return GridFunction(phi.grid, result)


def apply_U_derivative(sys: IFSSystem, psi: GridFunction, quad: QuadratureSpec = QuadratureSpec()) -> GridFunction:
    """
    Derivative of U psi obtained by moving the x-derivative onto h, so psi
    itself needs no derivative:

        sum_i (p_i lam / b_i) [psi(f_{i,eps} x) h(eps) - psi(f_{i,0} x) h(0)]
      - sum_i (p_i lam / b_i) int psi(f_{i,t} x) h'(t) dt
    """
    _check(sys, psi)

    unit_nodes, unit_weights = quad.unit_rule
    noise = sys.noise
    x = psi.nodes
    t = sys.epsilon * unit_nodes
    weights = sys.epsilon * unit_weights * noise.derivative(t)

    result = np.zeros(psi.grid.n_points)
    for branch, images in _forward_images(sys, x, t):
        coefficient = branch.p * sys.lam / branch.b
        at_epsilon = _interpolate(psi, sys.lam * x + branch.a + branch.b * sys.epsilon)
        at_zero = _interpolate(psi, sys.lam * x + branch.a)
        integral = np.sum(_interpolate(psi, images) * weights[None, :], axis=1)
        result += coefficient * (at_epsilon * noise.heps - at_zero * noise.h0) - coefficient * integral
    return GridFunction(psi.grid, result)


def duality_residual(sys: IFSSystem, phi: GridFunction, psi: GridFunction,
                     quad: QuadratureSpec = QuadratureSpec()) -> float:
    _check(sys, phi, psi)

    transferred = integrate_dm(psi * apply_L(sys, phi, quad))
    averaged = integrate_dm(apply_U(sys, psi, quad) * phi)
    return abs(transferred - averaged)
