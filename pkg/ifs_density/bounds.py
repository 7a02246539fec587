import math
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from strenum import StrEnum

from .exceptions import *
from .gridfn import Grid, GridFunction, finite_diff, integrate_dm
from .noise import NoiseFamily
from .operators import QuadratureSpec
from .solver import DEFAULT_MAX_ITERATIONS, DEFAULT_TOLERANCE, solve_density
from .system import IFSSystem, require_admissible, require_positive_epsilon, validate_system


logger = logging.getLogger(__name__)

ACCEPTANCE_MAX_ORDER = 2
MAX_ORDER = 3


class Normalization(StrEnum):

    NORMALIZED_LEBESGUE = 'm'       # int phi dm = 1
    LEBESGUE = 'lebesgue'           # int phi dx = 1, i.e. phi / 2


def noise_factor(sys: IFSSystem) -> float:
    """ sum_i p_i / |b_i| (h(eps) + h(0) + eps sup|h'|) """
    require_positive_epsilon(sys)
    stats = sys.noise.stats()
    per_step = stats.heps + stats.h0 + sys.epsilon * stats.hprime_sup
    return sum(branch.p / abs(branch.b) for branch in sys.branches) * per_step


def theorem_bound(sys: IFSSystem, k: int) -> float:
    """ sup |phi^(k)| <= lam^{-(k+1)(k+2)/2} noise_factor^{k+1} """
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or k < 0:
        raise ConfigurationError(msg=f"derivative order must be an integer >= 0, got {k!r}")
    require_positive_epsilon(sys)
    require_admissible(sys)

    return sys.lam ** (-(k + 1) * (k + 2) / 2) * noise_factor(sys) ** (k + 1)


def u_derivative_bound(sys: IFSSystem, sup_psi: float) -> float:
    """ one step estimate sup |(U psi)'| <= sup|psi| lam noise_factor """
    require_positive_epsilon(sys)
    require_admissible(sys)
    return abs(sup_psi) * sys.lam * noise_factor(sys)


@dataclass(frozen=True)
class BoundRow:

    k: int
    normalization: Normalization
    bound: float
    observed: float
    passed: bool
    informational: bool

    def to_json(self) -> Dict:
        return {
            'k': self.k,
            'normalization': str(self.normalization),
            'bound': self.bound,
            'observed': self.observed,
            'passed': self.passed,
            'informational': self.informational
        }


@dataclass(frozen=True)
class ScalingRow:

    epsilon: float
    admissible: bool
    converged: bool = False
    sup_phi: Optional[float] = None
    eps_sup_phi: Optional[float] = None
    l2_norm: Optional[float] = None
    sqrt_eps_l2: Optional[float] = None
    eps_sup_bound: Optional[float] = None
    message: Optional[str] = None

    @property
    def within_bound(self) -> Optional[bool]:
        if not self.admissible:
            return None
        return self.eps_sup_phi <= self.eps_sup_bound and self.sqrt_eps_l2 <= math.sqrt(self.eps_sup_bound)

    def to_json(self) -> Dict:
        return {
            'epsilon': self.epsilon,
            'admissible': self.admissible,
            'converged': self.converged,
            'sup_phi': self.sup_phi,
            'eps_sup_phi': self.eps_sup_phi,
            'l2_norm': self.l2_norm,
            'sqrt_eps_l2': self.sqrt_eps_l2,
            'eps_sup_bound': self.eps_sup_bound,
            'within_bound': self.within_bound,
            'message': self.message
        }

    @staticmethod
    def csv_header() -> str:
        return "epsilon,admissible,converged,sup_phi,eps_sup_phi,l2_norm,sqrt_eps_l2,eps_sup_bound"

    def to_csv_line(self) -> str:
        def fmt(value):
            return "" if value is None else f"{value:.17g}"
        return ",".join([fmt(self.epsilon), str(int(self.admissible)), str(int(self.converged)),
                         fmt(self.sup_phi), fmt(self.eps_sup_phi), fmt(self.l2_norm), fmt(self.sqrt_eps_l2),
                         fmt(self.eps_sup_bound)])


@dataclass(frozen=True)
class BoundReport:

    rows: Tuple[BoundRow, ...] = field(default_factory=tuple)
    scaling: Tuple[ScalingRow, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        """ every acceptance row (k <= 2, both normalizations) passes """
        return all(row.passed for row in self.rows if not row.informational)

    def rows_for(self, normalization: Normalization) -> List[BoundRow]:
        return [row for row in self.rows if row.normalization == normalization]

    def to_json(self) -> Dict:
        return {
            'passed': self.passed,
            'rows': [row.to_json() for row in self.rows],
            'scaling': [row.to_json() for row in self.scaling]
        }


def observed_sup_derivative(phi: GridFunction, k: int) -> float:
    """ sup |phi^(k)| by finite differences; for k >= 2 the k outermost nodes on each side are left out """
    if k == 0:
        return phi.sup_norm()

    values = finite_diff(phi, k).values
    if k >= 2:
        values = values[k:-k]
    return float(np.max(np.abs(values)))


def check_smoothness(sys: IFSSystem, phi: GridFunction, k_max: int = ACCEPTANCE_MAX_ORDER) -> BoundReport:
    """
    Compares observed sup |phi^(k)| with theorem_bound(sys, k) for k = 0..k_max,
    for the density normalized against m and against Lebesgue measure.
    Orders above 2 are reported but do not count towards `passed`.
    """
    if not 0 <= k_max <= MAX_ORDER:
        raise ConfigurationError(msg=f"k_max must lie in [0, {MAX_ORDER}], got {k_max}")

    bounds = [theorem_bound(sys, k) for k in range(k_max + 1)]
    rows = []
    for normalization, density in ((Normalization.NORMALIZED_LEBESGUE, phi), (Normalization.LEBESGUE, phi / 2)):
        for k, bound in enumerate(bounds):
            observed = observed_sup_derivative(density, k)
            row = BoundRow(k=k, normalization=normalization, bound=bound, observed=observed,
                           passed=observed <= bound, informational=k > ACCEPTANCE_MAX_ORDER)
            if not row.passed:
                logger.warning(f"k={k} ({normalization}): observed {observed:.6g} exceeds the bound {bound:.6g}")
            rows.append(row)

    return BoundReport(rows=tuple(rows))


def epsilon_scaling_study(sys_template: IFSSystem, eps_list: Sequence[float],
                          grid: Grid = Grid(),
                          quad: QuadratureSpec = QuadratureSpec(),
                          tol: float = DEFAULT_TOLERANCE,
                          max_iter: int = DEFAULT_MAX_ITERATIONS) -> List[ScalingRow]:
    """
    Solves the template with uniform noise for every epsilon and reports
    sup phi, eps sup phi, ||phi||_2 and sqrt(eps) ||phi||_2 next to the k = 0
    bound eps * theorem_bound(sys, 0).  Inadmissible epsilons give flagged
    rows; the other rows are still computed.
    """
    rows = []
    for epsilon in eps_list:
        sys = sys_template.with_epsilon(float(epsilon), NoiseFamily.UNIFORM)
        report = validate_system(sys)
        if epsilon <= 0 or not report.is_admissible:
            message = "epsilon must be > 0" if epsilon <= 0 else str(report)
            logger.warning(f"scaling row epsilon={epsilon} skipped: {message}")
            rows.append(ScalingRow(epsilon=float(epsilon), admissible=False, message=message))
            continue

        result = solve_density(sys, grid, quad, tol=tol, max_iter=max_iter)
        sup_phi = result.phi.sup_norm()
        l2_norm = math.sqrt(integrate_dm(result.phi * result.phi))
        rows.append(ScalingRow(epsilon=float(epsilon),
                               admissible=True,
                               converged=result.converged,
                               sup_phi=sup_phi,
                               eps_sup_phi=epsilon * sup_phi,
                               l2_norm=l2_norm,
                               sqrt_eps_l2=math.sqrt(epsilon) * l2_norm,
                               eps_sup_bound=epsilon * theorem_bound(sys, 0)))
        logger.info(f"scaling row epsilon={epsilon}: eps sup phi = {epsilon * sup_phi:.6g}")

    return rows
