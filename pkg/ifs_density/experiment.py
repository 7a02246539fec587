import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .exceptions import *
from .bounds import BoundReport, ScalingRow, check_smoothness, epsilon_scaling_study, MAX_ORDER
from .cones import WitnessSet, cone_constants, theta_D, theta_E_lower_bound
from .config import RunConfig
from .gridfn import GridFunction
from .helpers import random_intervals, random_polynomial
from .operators import apply_L, apply_U, duality_residual
from .oracle import SampleSet, density_cdf, empirical_cdf, ks_distance, sample_chain
from .solver import DensityResult, cauchy_gap_bound, invariance_residual, solve_density
from .system import ValidationReport, validate_system

logger = logging.getLogger(__name__)

DUALITY_THRESHOLD = 1e-6
INVARIANCE_THRESHOLD = 1e-4
KS_THRESHOLD = 0.005


@dataclass(frozen=True)
class VerificationCheck:

    name: str
    value: float
    threshold: float

    @property
    def passed(self) -> bool:
        return self.value <= self.threshold

    def to_json(self) -> Dict:
        return {'name': self.name, 'value': self.value, 'threshold': self.threshold, 'passed': self.passed}


@dataclass(frozen=True)
class VerificationReport:

    checks: Tuple[VerificationCheck, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failed_checks(self) -> List[str]:
        return [check.name for check in self.checks if not check.passed]

    def raise_if_failed(self):
        if not self.passed:
            raise VerificationFailure(msg="verification checks failed", failed_checks=self.failed_checks)

    def to_json(self) -> Dict:
        return {'passed': self.passed, 'checks': [check.to_json() for check in self.checks]}


class Experiment:
    """
    Entry point for a run described by a RunConfig.

    The density is solved on first use and cached; the other operations
    (sampling, verification, metrics, bounds, scaling) reuse it.

    Example
    -------
        experiment = Experiment(RunConfig.from_json_file("s1.json"))
        phi = experiment.phi
        report = experiment.verify()
    """

    def __init__(self, config: RunConfig):
        self.config = config
        self.system = config.system
        self.grid = config.grid
        self.quadrature = config.quadrature
        self._density: Optional[DensityResult] = None
        self._phi: Optional[GridFunction] = None

    def __repr__(self) -> str:
        return f"Experiment({self.system!r}, grid={self.grid.n_points})"

    def validate(self) -> ValidationReport:
        return validate_system(self.system)

    @property
    def density(self) -> DensityResult:  # lazy solving of the invariant density
        if self._density is None:
            self._density = solve_density(self.system, self.grid, self.quadrature,
                                          tol=self.config.tol, max_iter=self.config.max_iter)
        return self._density

    @property
    def phi(self) -> GridFunction:
        if self._phi is not None:
            return self._phi
        return self.density.phi

    def use_density(self, phi: GridFunction):
        """ uses a density computed elsewhere (e.g. read back from a CSV) instead of solving """
        self._phi = phi

    def solve(self) -> DensityResult:
        return self.density

    def sample(self, count: Optional[int] = None, burn_in: Optional[int] = None,
               seed: Optional[int] = None) -> SampleSet:
        return sample_chain(self.system,
                            count=self.config.count if count is None else count,
                            burn_in=self.config.burn_in if burn_in is None else burn_in,
                            seed=self.config.seed if seed is None else seed)

    def verify(self, polynomial_pairs: int = 10, intervals: int = 50, degree: int = 5) -> VerificationReport:
        """
        Duality residuals on random polynomial pairs, invariance residuals on
        random intervals and the KS distance between the chain and the density.
        All random draws derive from the configured seed.
        """
        phi = self.phi
        polynomial_rng, interval_rng = (np.random.default_rng(s) for s in np.random.SeedSequence(self.config.seed).spawn(2))

        duality = 0.0
        for _ in range(polynomial_pairs):
            first = GridFunction.from_function(phi.grid, random_polynomial(polynomial_rng, degree))
            second = GridFunction.from_function(phi.grid, random_polynomial(polynomial_rng, degree))
            duality = max(duality, duality_residual(self.system, first, second, self.quadrature))

        invariance = invariance_residual(self.system, phi, random_intervals(interval_rng, intervals), self.quadrature)
        ks = ks_distance(empirical_cdf(self.sample()), density_cdf(phi))

        report = VerificationReport(checks=(VerificationCheck('duality', duality, DUALITY_THRESHOLD),
                                            VerificationCheck('invariance', invariance, INVARIANCE_THRESHOLD),
                                            VerificationCheck('ks', ks, KS_THRESHOLD)))
        logger.info(f"verification: duality {duality:.3e}, invariance {invariance:.3e}, KS {ks:.5f}")
        return report

    def metrics(self, witness_count: int = 12, iterations: int = 10) -> Dict:
        """
        Certified cone constants next to what is observed: the ratios
        theta_D(U rho1, U rho2) / theta_D(rho1, rho2) on consecutive witnesses,
        and theta_E between the iterates of two seeds together with the weak
        integral gap it implies for |psi| <= 1.
        """
        cone = self.config.cone_params
        constants = cone_constants(self.system.lam, cone)
        witnesses = WitnessSet.build(cone.a, cone.gamma, witness_count, self.grid)

        ratios = []
        for first, second in zip(witnesses.witnesses[:-1], witnesses.witnesses[1:]):
            before = theta_D(first, second, cone.a, cone.gamma)
            if before > 0:
                after = theta_D(apply_U(self.system, first, self.quadrature),
                                apply_U(self.system, second, self.quadrature), cone.a, cone.gamma)
                ratios.append(after / before)

        phi_a = GridFunction.constant(self.grid, 1.0)
        phi_b = GridFunction.from_function(self.grid, lambda x: 1 + 0.5 * x).normalized()
        theta_trace = [theta_E_lower_bound(phi_a, phi_b, witnesses, cone)]
        for _ in range(iterations):
            phi_a = apply_L(self.system, phi_a, self.quadrature).normalized()
            phi_b = apply_L(self.system, phi_b, self.quadrature).normalized()
            theta_trace.append(theta_E_lower_bound(phi_a, phi_b, witnesses, cone))

        return {
            'cone': cone.to_json(),
            'constants': constants.to_json(),
            'empirical_ratios': ratios,
            'max_empirical_ratio': max(ratios) if ratios else None,
            'theta_E_trace': theta_trace,
            'cauchy_gap': cauchy_gap_bound(1.0, theta_trace[-1])
        }

    def bounds(self, k_max: int = MAX_ORDER) -> BoundReport:
        return check_smoothness(self.system, self.phi, k_max)

    def scaling(self, eps_list: Sequence[float]) -> List[ScalingRow]:
        return epsilon_scaling_study(self.system, eps_list, self.grid, self.quadrature,
                                     tol=self.config.tol, max_iter=self.config.max_iter)
