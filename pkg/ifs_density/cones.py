import math
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .exceptions import *
from .gridfn import Grid, GridFunction, integrate_dm, holder_log_constant, strided_indices


logger = logging.getLogger(__name__)

MEMBERSHIP_TOLERANCE = 1e-6
DEGENERATE_DENOMINATOR = 1e-12
WITNESS_AMPLITUDE_FRACTION = 0.9
_ROW_BLOCK = 256


@dataclass(frozen=True)
class ConeParams:

    a: float
    gamma: float = 1.0
    b: Optional[float] = None

    def __post_init__(self):
        if not math.isfinite(self.a) or self.a < 0:
            raise DomainError(msg=f"cone amplitude a must be >= 0, got {self.a}")
        if not 0 < self.gamma <= 1:
            raise DomainError(msg=f"cone exponent gamma must lie in (0, 1], got {self.gamma}")
        if self.b is not None and not (math.isfinite(self.b) and self.b > 0):
            raise DomainError(msg=f"E-cone modulus b must be > 0, got {self.b}")

    @staticmethod
    def from_json(json_cone: Dict) -> 'ConeParams':
        if not isinstance(json_cone, dict):
            raise ConfigurationError(msg="'cone' must be an object with a, gamma, b")
        unknown = set(json_cone.keys()) - {'a', 'gamma', 'b'}
        if unknown:
            raise ConfigurationError(msg=f"Unknown key(s) {sorted(unknown)} in 'cone'")
        if 'a' not in json_cone:
            raise ConfigurationError(msg="'cone' is missing 'a'")
        try:
            return ConeParams(a=float(json_cone['a']),
                              gamma=float(json_cone.get('gamma', 1.0)),
                              b=None if json_cone.get('b') is None else float(json_cone['b']))
        except (TypeError, ValueError) as ex:
            raise ConfigurationError(msg=f"Invalid cone parameters: {ex}")
        except DomainError as ex:
            raise ConfigurationError(msg=ex.msg)

    def to_json(self) -> Dict:
        return {'a': self.a, 'gamma': self.gamma, 'b': self.b}


@dataclass(frozen=True)
class ConeConstants:

    lambda0: float
    diameter_D: float
    b_min: float
    diameter_LE: Optional[float] = None
    lambda1: Optional[float] = None

    def to_json(self) -> Dict:
        return {
            'lambda0': self.lambda0,
            'diameter_D': self.diameter_D,
            'b_min': self.b_min,
            'diameter_LE': self.diameter_LE,
            'lambda1': self.lambda1
        }


def _check_contraction_inputs(lam: float, a: float, gamma: float):
    if not 0 < lam < 1:
        raise DomainError(msg=f"lambda must lie in (0, 1), got {lam}")
    if not math.isfinite(a) or a < 0:
        raise DomainError(msg=f"a must be >= 0, got {a}")
    if not 0 < gamma <= 1:
        raise DomainError(msg=f"gamma must lie in (0, 1], got {gamma}")


def birkhoff_factor(diameter: float) -> float:
    """ contraction factor tanh(D / 4) of a map whose image has diameter D """
    if diameter < 0:
        raise DomainError(msg=f"a diameter is >= 0, got {diameter}")
    if math.isinf(diameter):
        return 1.0
    return math.tanh(diameter / 4)


def contraction_constants(lam: float, a: float, gamma: float) -> ConeConstants:
    _check_contraction_inputs(lam, a, gamma)

    log_ratio = math.log((1 + lam) / (1 - lam))
    lambda0 = math.tanh(0.5 * log_ratio + 2 ** (gamma - 1) * lam * a)
    diameter_D = 2 * log_ratio + 2 ** (1 + gamma) * lam * a
    return ConeConstants(lambda0=lambda0, diameter_D=diameter_D, b_min=1 / (1 - lambda0))


def e_cone_diameter(lam: float, a: float, gamma: float, b: float) -> Tuple[float, float]:
    constants = contraction_constants(lam, a, gamma)
    if not b > constants.b_min:
        raise PreconditionError(msg=f"E-cone modulus b = {b} must exceed b_min", threshold=constants.b_min)

    b_lambda0 = b * constants.lambda0
    diameter_LE = (8 * b * math.log((1 + lam) / (1 - lam))
                   + 2 ** (3 + gamma) * lam * a * b
                   + 2 * math.log((b + 1 + b_lambda0) / (b - 1 - b_lambda0)))
    return diameter_LE, birkhoff_factor(diameter_LE)


def default_cone(lam: float, a: float = 0.5, gamma: float = 1.0) -> ConeParams:
    """ cone parameters with b = 2 b_min """
    return ConeParams(a=a, gamma=gamma, b=2 * contraction_constants(lam, a, gamma).b_min)


def cone_constants(lam: float, cone: ConeParams) -> ConeConstants:
    constants = contraction_constants(lam, cone.a, cone.gamma)
    if cone.b is None:
        return constants

    diameter_LE, lambda1 = e_cone_diameter(lam, cone.a, cone.gamma, cone.b)
    return ConeConstants(lambda0=constants.lambda0, diameter_D=constants.diameter_D, b_min=constants.b_min,
                         diameter_LE=diameter_LE, lambda1=lambda1)


def in_d_cone(rho: GridFunction, a: float, gamma: float, tolerance: float = MEMBERSHIP_TOLERANCE) -> bool:
    if np.any(rho.values <= 0):
        return False
    return holder_log_constant(rho, gamma) <= a + tolerance


def _require_d_cone(name: str, rho: GridFunction, a: float, gamma: float):
    if np.any(rho.values <= 0):
        raise DomainError(msg=f"{name} must be strictly positive")
    constant = holder_log_constant(rho, gamma)
    if constant > a + MEMBERSHIP_TOLERANCE:
        raise PreconditionError(msg=f"{name} is not in D(a={a}, gamma={gamma})",
                                context=f"log-Holder constant {constant}", threshold=a)


def theta_D(rho1: GridFunction, rho2: GridFunction, a: float, gamma: float) -> float:
    """
    Hilbert metric of D(a, gamma): log(beta / alpha) where beta (alpha) is the
    sup (inf) over nodes x and ordered pairs x != y of

        rho2(x) / rho1(x)
        (e^{a|x-y|^gamma} rho2(y) - rho2(x)) / (e^{a|x-y|^gamma} rho1(y) - rho1(x))

    Large grids are scanned with the same stride as the log-Holder constant.
    """
    if rho1.grid != rho2.grid:
        raise ConfigurationError(msg="rho1 and rho2 live on different grids")
    _require_d_cone('rho1', rho1, a, gamma)
    _require_d_cone('rho2', rho2, a, gamma)

    indices, _ = strided_indices(rho1.grid.n_points)
    x = rho1.grid.nodes[indices]
    r1 = rho1.values[indices]
    r2 = rho2.values[indices]

    ratio = r2 / r1
    beta = float(ratio.max())
    alpha = float(ratio.min())

    count = len(indices)
    columns = np.arange(count)
    for start in range(0, count, _ROW_BLOCK):
        stop = min(start + _ROW_BLOCK, count)
        weight = np.exp(a * np.abs(x[None, :] - x[start:stop, None]) ** gamma)
        numerator = weight * r2[None, :] - r2[start:stop, None]
        denominator = weight * r1[None, :] - r1[start:stop, None]
        keep = (np.abs(denominator) > DEGENERATE_DENOMINATOR) & (columns[None, :] != np.arange(start, stop)[:, None])
        if keep.any():
            quotients = numerator[keep] / denominator[keep]
            beta = max(beta, float(quotients.max()))
            alpha = min(alpha, float(quotients.min()))

    if alpha <= 0:
        return math.inf
    return math.log(beta / alpha)


def _van_der_corput(index: int) -> float:
    value, denominator = 0.0, 1.0
    while index > 0:
        denominator *= 2
        index, remainder = divmod(index, 2)
        value += remainder / denominator
    return value


def witness_family(a: float, gamma: float, count: int, grid: Optional[Grid] = None) -> List[GridFunction]:
    """
    Unit-mass members of D(a, gamma): the constant, the two exponential tilts
    e^{+-s x} and bumps e^{s (1 - |x - c|^gamma)} with centers spread over
    (-1, 1).  Amplitudes stay at 90% of the cone boundary.
    """
    if count < 1:
        raise ConfigurationError(msg=f"witness count must be >= 1, got {count}")
    grid = grid or Grid()
    x = grid.nodes

    # |x - y| <= 2 so a linear log has gamma-Holder constant s 2^(1 - gamma)
    tilt = WITNESS_AMPLITUDE_FRACTION * a / 2 ** (1 - gamma)
    bump = WITNESS_AMPLITUDE_FRACTION * a

    logs = [np.zeros_like(x), tilt * x, -tilt * x]
    index = 1
    while len(logs) < count:
        center = 2 * _van_der_corput(index) - 1
        logs.append(bump * (1 - np.abs(x - center) ** gamma))
        index += 1

    return [GridFunction(grid, np.exp(log_values)).normalized() for log_values in logs[:count]]


class WitnessSet:
    """
    A finite family of unit-mass witnesses in D(a, gamma).

    The pairwise theta_D matrix is computed on first use and reused by every
    E-cone evaluation on this set.
    """

    def __init__(self, witnesses: Sequence[GridFunction], a: float, gamma: float):
        if len(witnesses) == 0:
            raise ConfigurationError(msg="a witness set needs at least one witness")
        if len({w.grid for w in witnesses}) > 1:
            raise ConfigurationError(msg="witnesses live on different grids")

        self.witnesses = list(witnesses)
        self.a = a
        self.gamma = gamma
        self._theta_matrix: Optional[np.ndarray] = None

    @staticmethod
    def build(a: float, gamma: float, count: int, grid: Optional[Grid] = None) -> 'WitnessSet':
        return WitnessSet(witness_family(a, gamma, count, grid), a, gamma)

    def __len__(self):
        return len(self.witnesses)

    @property
    def grid(self) -> Grid:
        return self.witnesses[0].grid

    @property
    def theta_matrix(self) -> np.ndarray:  # lazy loading of the pairwise metric
        if self._theta_matrix is None:
            count = len(self.witnesses)
            matrix = np.zeros((count, count))
            for i in range(count):
                for j in range(i + 1, count):
                    matrix[i, j] = matrix[j, i] = theta_D(self.witnesses[i], self.witnesses[j], self.a, self.gamma)
            matrix.setflags(write=False)
            self._theta_matrix = matrix
            logger.debug(f"computed theta_D between {count} witnesses")
        return self._theta_matrix

    def integrals(self, phi: GridFunction) -> np.ndarray:
        if phi.grid != self.grid:
            raise ConfigurationError(msg="phi and the witnesses live on different grids")
        return np.array([integrate_dm(phi * rho) for rho in self.witnesses])


@dataclass(frozen=True)
class EConeMembership:

    member: bool
    failures: Tuple[str, ...] = field(default_factory=tuple)


def _as_witness_set(witnesses: Union[WitnessSet, Sequence[GridFunction]], cone: ConeParams) -> WitnessSet:
    if isinstance(witnesses, WitnessSet):
        return witnesses
    return WitnessSet(witnesses, cone.a, cone.gamma)


def _require_b(cone: ConeParams):
    if cone.b is None:
        raise PreconditionError(msg="E-cone work needs the modulus b in the cone parameters")


def e_cone_membership(phi: GridFunction, witnesses: Union[WitnessSet, Sequence[GridFunction]],
                      cone: ConeParams) -> EConeMembership:
    """ E(a, b, gamma) membership restricted to the witness set """
    _require_b(cone)
    witnesses = _as_witness_set(witnesses, cone)
    integrals = witnesses.integrals(phi)

    failures = [f"integral against witness {i} is {value:.6g} <= 0" for i, value in enumerate(integrals) if value <= 0]
    if not failures:
        logs = np.log(integrals)
        theta = witnesses.theta_matrix
        for i in range(len(witnesses)):
            for j in range(i + 1, len(witnesses)):
                if abs(logs[i] - logs[j]) >= cone.b * theta[i, j]:
                    failures.append(f"log-ratio on witnesses ({i}, {j}) is {abs(logs[i] - logs[j]):.6g} "
                                    f">= b theta_D = {cone.b * theta[i, j]:.6g}")

    return EConeMembership(member=not failures, failures=tuple(failures))


def theta_E_lower_bound(phi1: GridFunction, phi2: GridFunction,
                        witnesses: Union[WitnessSet, Sequence[GridFunction]], cone: ConeParams) -> float:
    """
    Lower bound of the Hilbert metric of E(a, b, gamma) between phi1 and phi2.

    alpha and beta are the inf and sup of the candidates

        int phi2 rho / int phi1 rho                         for each witness rho
        (E int phi2 rho2 - int phi2 rho1) / (E int phi1 rho2 - int phi1 rho1)
                                                            for ordered witness pairs,
        with E = exp(b theta_D(rho1, rho2))

    Restricting to a finite witness set can only raise alpha and lower beta,
    so the result never exceeds the true metric.  It is a measurement, not a
    certificate.
    """
    _require_b(cone)
    witnesses = _as_witness_set(witnesses, cone)

    first = witnesses.integrals(phi1)
    second = witnesses.integrals(phi2)
    for name, integrals in (('phi1', first), ('phi2', second)):
        for index, value in enumerate(integrals):
            if value <= 0:
                raise PreconditionError(msg=f"{name} fails E-cone positivity on witness {index}",
                                        context=f"integral = {value}")

    with np.errstate(over='ignore'):
        weight = np.exp(cone.b * witnesses.theta_matrix)
    numerator = weight * second[None, :] - second[:, None]
    denominator = weight * first[None, :] - first[:, None]
    off_diagonal = ~np.eye(len(witnesses), dtype=bool) & np.isfinite(weight)
    keep = off_diagonal & (denominator > DEGENERATE_DENOMINATOR)

    skipped = int(np.count_nonzero(off_diagonal & ~keep))
    if skipped:
        logger.warning(f"{skipped} witness pair(s) skipped: phi1 is on or outside the E-cone boundary for them")

    candidates = np.concatenate([second / first, numerator[keep] / denominator[keep]])
    beta = float(candidates.max())
    alpha = float(candidates.min())
    if alpha <= 0:
        return math.inf
    return math.log(beta / alpha)
