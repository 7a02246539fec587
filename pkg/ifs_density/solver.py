import math
import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from .exceptions import *
from .gridfn import Grid, GridFunction, cumulative_dm, integrate_dm
from .operators import QuadratureSpec, apply_L
from .system import IFSSystem, require_admissible, require_positive_epsilon


logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-10
DEFAULT_MAX_ITERATIONS = 500
RATE_TAIL = 10
MIN_RATE_POINTS = 5
# successive differences below this are rounding noise
DIFFERENCE_FLOOR = 1e-13


class GeometricFit(NamedTuple):

    rate: float
    r_squared: float
    points: int


@dataclass
class DensityResult:

    phi: GridFunction
    iterations: int
    residual_trace: List[float]
    mass_trace: List[float]
    fitted_rate: Optional[float]
    converged: bool
    history: Optional[List[GridFunction]] = None

    @property
    def final_residual(self) -> float:
        return self.residual_trace[-1]

    def to_json(self) -> Dict:
        return {
            'iterations': self.iterations,
            'converged': self.converged,
            'final_residual': self.final_residual,
            'fitted_rate': self.fitted_rate,
            'masses': list(self.mass_trace),
            'residuals': list(self.residual_trace)
        }


def geometric_fit(values: Sequence[float], tail: int = RATE_TAIL) -> GeometricFit:
    """ least-squares fit of log(values) on the last `tail` points """
    values = np.asarray(values, dtype=float)[-tail:]
    if len(values) < MIN_RATE_POINTS:
        raise ConfigurationError(msg=f"a rate needs at least {MIN_RATE_POINTS} points, got {len(values)}")
    if not np.all(np.isfinite(values)) or np.any(values <= 0):
        raise DomainError(msg="a geometric rate needs finite positive values")

    fit = stats.linregress(np.arange(len(values), dtype=float), np.log(values))
    return GeometricFit(rate=math.exp(fit.slope), r_squared=float(fit.rvalue) ** 2, points=len(values))


def convergence_rate(residuals: Sequence[float]) -> float:
    return geometric_fit(residuals).rate


def solve_density(sys: IFSSystem,
                  grid: Grid = Grid(),
                  quad: QuadratureSpec = QuadratureSpec(),
                  tol: float = DEFAULT_TOLERANCE,
                  max_iter: int = DEFAULT_MAX_ITERATIONS,
                  seed: Optional[Callable[[np.ndarray], np.ndarray]] = None,
                  renormalize: bool = True,
                  keep_history: bool = False) -> DensityResult:
    """
    Iterates phi_{n+1} = L phi_n until the sup-norm step is below `tol`.

    Parameters
    ----------
    seed: starting function of x (default: the constant 1); it is normalized
        to unit mass before the first step.
    renormalize: rescale every iterate to unit mass.  The mass before
        rescaling is always recorded in `mass_trace`.
    keep_history: store every iterate (including the seed) in the result.

    Returns
    -------
    A DensityResult; non convergence within `max_iter` is flagged, not raised.
    """
    require_positive_epsilon(sys)
    require_admissible(sys)
    if not tol > 0:
        raise ConfigurationError(msg=f"tolerance must be > 0, got {tol}")
    if max_iter < 1:
        raise ConfigurationError(msg=f"max_iter must be >= 1, got {max_iter}")

    if seed is None:
        phi = GridFunction.constant(grid, 1.0)
    else:
        phi = GridFunction.from_function(grid, seed)
        if integrate_dm(phi) <= 0:
            raise PreconditionError(msg="the seed function must have positive mass")
        phi = phi.normalized()

    history = [phi] if keep_history else None
    residuals = []
    masses = []
    converged = False

    for iteration in range(1, max_iter + 1):
        following = apply_L(sys, phi, quad)
        mass = integrate_dm(following)
        masses.append(mass)
        if renormalize:
            following = following / mass

        residual = float(np.max(np.abs(following.values - phi.values)))
        residuals.append(residual)
        phi = following
        if keep_history:
            history.append(phi)

        logger.debug(f"iteration {iteration}: residual {residual:.3e}, mass {mass:.15f}")
        if residual <= tol:
            converged = True
            break

    fitted_rate = None
    if len(residuals) >= MIN_RATE_POINTS and all(r > 0 for r in residuals[-RATE_TAIL:]):
        fitted_rate = convergence_rate(residuals)

    if converged:
        logger.info(f"density converged in {len(residuals)} iterations (residual {residuals[-1]:.3e}, rate {fitted_rate})")
    else:
        logger.warning(f"density did not converge in {max_iter} iterations (residual {residuals[-1]:.3e})")

    return DensityResult(phi=phi,
                         iterations=len(residuals),
                         residual_trace=residuals,
                         mass_trace=masses,
                         fitted_rate=fitted_rate,
                         converged=converged,
                         history=history)


def weak_integrals(result: DensityResult, psi: GridFunction,
                   history: Optional[List[GridFunction]] = None) -> List[float]:
    """ mu_n(psi) = int psi phi_n dm along the stored iterates """
    if history is None:
        history = result.history
    if not history:
        raise ConfigurationError(msg="no iterate history: solve with keep_history=True")
    return [integrate_dm(psi * phi) for phi in history]


def weak_integral_decay(values: Sequence[float], tail: int = RATE_TAIL) -> Optional[GeometricFit]:
    """
    Geometric fit of |mu_{n+1} - mu_n| over the last `tail` differences above
    the rounding floor.  None when the differences vanish (e.g. a moment that
    the dynamics preserve exactly).
    """
    differences = np.abs(np.diff(np.asarray(values, dtype=float)))
    below = np.flatnonzero(differences <= DIFFERENCE_FLOOR)
    if len(below):
        differences = differences[:below[0]]
    if len(differences) < MIN_RATE_POINTS:
        return None
    return geometric_fit(differences, tail)


def cauchy_gap_bound(sup_psi: float, theta_E: float) -> float:
    """ |mu_m(psi) - mu_n(psi)| <= sup psi |e^theta - 1| for unit-mass iterates theta apart """
    return abs(sup_psi) * abs(math.expm1(theta_E))


def _check_interval(interval: Tuple[float, float]) -> Tuple[float, float]:
    try:
        c, d = (float(v) for v in interval)
    except (TypeError, ValueError):
        raise DomainError(msg=f"malformed interval {interval!r}")
    if not (math.isfinite(c) and math.isfinite(d)) or not -1 <= c <= d <= 1:
        raise DomainError(msg=f"interval {interval!r} is not a sub-interval of [-1, 1]")
    return c, d


def invariance_residual(sys: IFSSystem, phi: GridFunction, intervals: Sequence[Tuple[float, float]],
                        quad: QuadratureSpec = QuadratureSpec()) -> float:
    """
    max over E = [c, d] of |mu(E) - sum_i p_i int mu(f_{i,t}^{-1}(E)) h(t) dt|
    with mu = phi dm.
    """
    require_positive_epsilon(sys)
    require_admissible(sys)
    checked = [_check_interval(interval) for interval in intervals]

    cdf = cumulative_dm(phi)
    nodes = phi.grid.nodes

    def measure(low, high):
        low = np.clip(low, -1.0, 1.0)
        high = np.clip(high, -1.0, 1.0)
        return np.interp(high, nodes, cdf.values) - np.interp(low, nodes, cdf.values)

    unit_nodes, unit_weights = quad.unit_rule
    noise = sys.noise
    worst = 0.0
    for c, d in checked:
        direct = float(measure(c, d))

        pulled_back = 0.0
        for branch in sys.branches:
            # the clipped preimage has kinks where an endpoint crosses -1 or 1
            kinks = [(edge - branch.a - side * sys.lam) / branch.b for edge in (c, d) for side in (-1, 1)]
            cuts = sorted({0.0, sys.epsilon} | {t for t in kinks if 0 < t < sys.epsilon})
            for start, stop in zip(cuts[:-1], cuts[1:]):
                t = start + (stop - start) * unit_nodes
                low = (c - branch.a - branch.b * t) / sys.lam
                high = (d - branch.a - branch.b * t) / sys.lam
                pulled_back += branch.p * (stop - start) * float(np.sum(unit_weights * measure(low, high) * noise.pdf(t)))

        worst = max(worst, abs(direct - pulled_back))

    return worst
