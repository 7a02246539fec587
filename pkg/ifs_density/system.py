import json
import math
import logging
import pathlib
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from strenum import StrEnum

from .exceptions import *
from .noise import NoiseDensity, NoiseFamily, create_noise, parse_noise_json


logger = logging.getLogger(__name__)

# slack for rounding in the admissibility checks
CONTAINMENT_TOLERANCE = 1e-12
PROBABILITY_SUM_TOLERANCE = 1e-12


class ViolationRule(StrEnum):

    LAMBDA_RANGE = 'lambda-range'
    EPSILON_RANGE = 'epsilon-range'
    NO_BRANCHES = 'no-branches'
    NON_FINITE = 'non-finite'
    ZERO_COUPLING = 'zero-coupling'
    NON_POSITIVE_PROBABILITY = 'non-positive-probability'
    PROBABILITY_SUM = 'probability-sum'
    CONTAINMENT = 'containment'
    NOISE = 'noise'


@dataclass(frozen=True)
class Branch:

    a: float
    b: float
    p: float


@dataclass(frozen=True)
class Violation:

    rule: ViolationRule
    message: str
    branch_index: Optional[int] = None
    endpoint: Optional[float] = None

    def __str__(self):
        location = ""
        if self.branch_index is not None:
            location += f" [branch {self.branch_index}"
            if self.endpoint is not None:
                location += f", t={self.endpoint}"
            location += "]"
        return f"{self.rule}{location}: {self.message}"

    def to_json(self) -> Dict:
        return {
            'rule': str(self.rule),
            'message': self.message,
            'branch': self.branch_index,
            'endpoint': self.endpoint
        }


@dataclass(frozen=True)
class ValidationReport:

    violations: Tuple[Violation, ...] = field(default_factory=tuple)

    @property
    def is_admissible(self) -> bool:
        return len(self.violations) == 0

    def __str__(self):
        if self.is_admissible:
            return "system is admissible"
        return "system is not admissible:\n" + "\n".join(f"  - {v}" for v in self.violations)

    def to_json(self) -> Dict:
        return {
            'admissible': self.is_admissible,
            'violations': [v.to_json() for v in self.violations]
        }


class IFSSystem:
    """
    Random affine IFS on I = [-1, 1]: branch k is x -> lam * x + a_k + b_k * t,
    chosen with probability p_k, with t drawn from the noise density h on [0, epsilon].

    The object holds raw input; use `validate_system` to check admissibility.
    The noise density is built on first access.
    """

    def __init__(self, lam: float, branches: List[Branch], epsilon: float,
                 noise_family: Union[str, NoiseFamily] = NoiseFamily.UNIFORM,
                 noise_params: Optional[Dict[str, float]] = None):
        self.lam = float(lam)
        self.branches: Tuple[Branch, ...] = tuple(Branch(float(b.a), float(b.b), float(b.p)) for b in branches)
        self.epsilon = float(epsilon)
        self.noise_family = noise_family
        if noise_params is not None and not isinstance(noise_params, dict):
            raise ConfigurationError(msg=f"noise parameters must be an object, got {noise_params!r}")
        self.noise_params = dict(noise_params or {})
        self._noise: Optional[NoiseDensity] = None

    @staticmethod
    def from_json(json_system: Dict) -> 'IFSSystem':
        if not isinstance(json_system, dict):
            raise ConfigurationError(msg="A system description must be a JSON object")

        unknown = set(json_system.keys()) - {'lambda', 'epsilon', 'branches', 'noise'}
        if unknown:
            raise ConfigurationError(msg=f"Unknown key(s) {sorted(unknown)} in system description")
        for required in ['lambda', 'epsilon', 'branches']:
            if required not in json_system:
                raise ConfigurationError(msg=f"System description is missing '{required}'")

        if not isinstance(json_system['branches'], list):
            raise ConfigurationError(msg=f"'branches' must be a list of objects, got {json_system['branches']!r}")

        branches = []
        for index, json_branch in enumerate(json_system['branches']):
            if not isinstance(json_branch, dict):
                raise ConfigurationError(msg=f"Branch {index} must be an object with a, b, p")
            unknown = set(json_branch.keys()) - {'a', 'b', 'p'}
            if unknown:
                raise ConfigurationError(msg=f"Unknown key(s) {sorted(unknown)} in branch {index}")
            missing = {'a', 'b', 'p'} - set(json_branch.keys())
            if missing:
                raise ConfigurationError(msg=f"Branch {index} is missing {sorted(missing)}")
            branches.append(Branch(a=_to_float(json_branch['a'], f"branches[{index}].a"),
                                   b=_to_float(json_branch['b'], f"branches[{index}].b"),
                                   p=_to_float(json_branch['p'], f"branches[{index}].p")))

        json_noise = json_system.get('noise')
        if json_noise is None:
            json_noise = {'family': str(NoiseFamily.UNIFORM)}
        family, params = parse_noise_json(json_noise)

        return IFSSystem(lam=_to_float(json_system['lambda'], 'lambda'),
                         branches=branches,
                         epsilon=_to_float(json_system['epsilon'], 'epsilon'),
                         noise_family=family,
                         noise_params=params)

    @staticmethod
    def from_json_file(path: Union[str, pathlib.Path]) -> 'IFSSystem':
        try:
            with open(path, 'rt') as f:
                json_system = json.load(f)
        except (OSError, json.JSONDecodeError) as ex:
            raise ConfigurationError(msg=f"Could not read system description: {ex}", context=str(path))
        return IFSSystem.from_json(json_system)

    def to_json(self) -> Dict:
        return {
            'lambda': self.lam,
            'epsilon': self.epsilon,
            'branches': [{'a': b.a, 'b': b.b, 'p': b.p} for b in self.branches],
            'noise': {'family': str(self.noise_family), 'params': dict(self.noise_params)}
        }

    @property
    def noise(self) -> NoiseDensity:  # lazy creation of the noise density
        if self._noise is None:
            self._noise = create_noise(self.noise_family, epsilon=self.epsilon, params=self.noise_params)
        return self._noise

    @property
    def n_branches(self) -> int:
        return len(self.branches)

    @property
    def a(self) -> np.ndarray:
        return np.array([b.a for b in self.branches])

    @property
    def b(self) -> np.ndarray:
        return np.array([b.b for b in self.branches])

    @property
    def p(self) -> np.ndarray:
        return np.array([b.p for b in self.branches])

    def with_epsilon(self, epsilon: float, noise_family: Optional[Union[str, NoiseFamily]] = None) -> 'IFSSystem':
        if noise_family is None:
            return IFSSystem(self.lam, self.branches, epsilon, self.noise_family, self.noise_params)
        return IFSSystem(self.lam, self.branches, epsilon, noise_family, None)

    def __eq__(self, other):
        return isinstance(other, IFSSystem) and self.to_json() == other.to_json()

    def __hash__(self):
        return hash(json.dumps(self.to_json(), sort_keys=True))

    def __repr__(self):
        return f"IFSSystem(lam={self.lam}, epsilon={self.epsilon}, branches={list(self.branches)}, noise={self.noise_family})"


def _to_float(value, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigurationError(msg=f"'{name}' must be a number, got {value!r}")
    return float(value)


def validate_system(sys: IFSSystem) -> ValidationReport:
    violations = []

    values = [sys.lam, sys.epsilon] + [v for b in sys.branches for v in (b.a, b.b, b.p)]
    if not all(math.isfinite(v) for v in values):
        violations.append(Violation(ViolationRule.NON_FINITE, "all parameters must be finite numbers"))
        return ValidationReport(tuple(violations))

    if not 0 < sys.lam < 1:
        violations.append(Violation(ViolationRule.LAMBDA_RANGE, f"lambda must lie in (0, 1), got {sys.lam}"))

    if sys.epsilon < 0:
        violations.append(Violation(ViolationRule.EPSILON_RANGE, f"epsilon must be >= 0, got {sys.epsilon}"))

    if sys.n_branches == 0:
        violations.append(Violation(ViolationRule.NO_BRANCHES, "at least one branch is required"))

    for index, branch in enumerate(sys.branches):
        if branch.b == 0:
            violations.append(Violation(ViolationRule.ZERO_COUPLING, "noise coupling b must be non zero", branch_index=index))
        if branch.p <= 0:
            violations.append(Violation(ViolationRule.NON_POSITIVE_PROBABILITY, f"probability must be > 0, got {branch.p}",
                                        branch_index=index))

        # the constraint is affine in t so both endpoints are enough
        for t in sorted({0.0, max(sys.epsilon, 0.0)}):
            reach = sys.lam + abs(branch.a + branch.b * t)
            if reach > 1 + CONTAINMENT_TOLERANCE:
                violations.append(Violation(ViolationRule.CONTAINMENT,
                                            f"image leaves [-1, 1]: lambda + |a + b t| = {reach:.17g} > 1",
                                            branch_index=index, endpoint=t))

    if sys.n_branches > 0 and abs(sum(b.p for b in sys.branches) - 1) > PROBABILITY_SUM_TOLERANCE:
        violations.append(Violation(ViolationRule.PROBABILITY_SUM,
                                    f"probabilities must sum to 1, got {sum(b.p for b in sys.branches):.17g}"))

    if sys.epsilon >= 0:
        try:
            sys.noise
        except IfsDensityException as ex:
            violations.append(Violation(ViolationRule.NOISE, ex.msg))

    report = ValidationReport(tuple(violations))
    if not report.is_admissible:
        logger.debug(f"validation of {sys!r}: {report}")
    return report


def require_admissible(sys: IFSSystem):
    report = validate_system(sys)
    if not report.is_admissible:
        raise PreconditionError(msg="The system is not admissible", context=str(report))


def require_positive_epsilon(sys: IFSSystem):
    if sys.epsilon <= 0:
        raise UnsupportedConfiguration(msg="The transfer operators require epsilon > 0",
                                       context=f"epsilon = {sys.epsilon}")


def _check_branch_and_t(sys: IFSSystem, k: int, t: float):
    if not 0 <= k < sys.n_branches:
        raise DomainError(msg=f"branch index {k} out of range", context=f"{sys.n_branches} branches")
    if not 0 <= t <= sys.epsilon:
        raise DomainError(msg=f"t = {t} outside of [0, {sys.epsilon}]")


def map_apply(sys: IFSSystem, k: int, t: float, x: float) -> float:
    _check_branch_and_t(sys, k, t)
    if not -1 <= x <= 1:
        raise DomainError(msg=f"x = {x} outside of [-1, 1]")

    branch = sys.branches[k]
    return min(1.0, max(-1.0, sys.lam * x + branch.a + branch.b * t))


def map_inverse(sys: IFSSystem, k: int, t: float, y: float) -> float:
    _check_branch_and_t(sys, k, t)

    branch = sys.branches[k]
    offset = y - branch.a - branch.b * t
    if abs(offset) > sys.lam * (1 + CONTAINMENT_TOLERANCE):
        low, high = image_interval(sys, k, t)
        raise DomainError(msg=f"y = {y} outside of the image interval [{low}, {high}]")

    return min(1.0, max(-1.0, offset / sys.lam))


def image_interval(sys: IFSSystem, k: int, t: float) -> Tuple[float, float]:
    _check_branch_and_t(sys, k, t)

    center = sys.branches[k].a + sys.branches[k].b * t
    return center - sys.lam, center + sys.lam


def perturbed_bernoulli_convolution(lam: float, epsilon: float,
                                    noise_family: Union[str, NoiseFamily] = NoiseFamily.UNIFORM,
                                    noise_params: Optional[Dict[str, float]] = None) -> IFSSystem:
    """
    x -> lam x + (1 - lam) - t  and  x -> lam x - (1 - lam) + t, each with probability 1/2.

    Without noise this is the classical Bernoulli convolution on [-1, 1];
    the noise pushes both maps towards the center.
    """
    if not 0 < lam < 1:
        raise DomainError(msg=f"lambda must lie in (0, 1), got {lam}")
    if not 0 <= epsilon <= 2 * (1 - lam):
        raise PreconditionError(msg=f"epsilon = {epsilon} breaks containment", threshold=2 * (1 - lam))

    return IFSSystem(lam=lam,
                     branches=[Branch(a=1 - lam, b=-1.0, p=0.5), Branch(a=-(1 - lam), b=1.0, p=0.5)],
                     epsilon=epsilon,
                     noise_family=noise_family,
                     noise_params=noise_params)
