import math
import logging
from typing import Dict, NamedTuple, Optional, Tuple, Union

import numpy as np
from strenum import StrEnum

from ..exceptions import *


logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


class NoiseFamily(StrEnum):

    UNIFORM = 'uniform'
    LINEAR_RAMP = 'linear-ramp'
    RAISED_COSINE = 'raised-cosine'
    QUADRATIC_BUMP = 'quadratic-bump'


class NoiseStats(NamedTuple):

    h0: float
    heps: float
    hprime_sup: float
    mass: float


class NoiseDensity:
    """
    Density h of the noise parameter t on [0, epsilon].

    Every family is written in terms of a shape function g on [0, 1] with
    h(t) = g(t / epsilon) / epsilon, so that h(0), h(epsilon) and sup|h'| are
    exact and the family is normalized analytically.  Subclasses implement the
    `_shape*` methods and the closed-form boundary values.
    """

    family: NoiseFamily = None
    parameter_names: Tuple[str, ...] = ()

    def __init__(self, epsilon: float, params: Optional[Dict[str, float]] = None):
        if not math.isfinite(epsilon) or epsilon < 0:
            raise DomainError(msg=f"epsilon must be a finite value >= 0, got {epsilon}")

        self.epsilon = float(epsilon)
        self.params = self._parse_params(params or {})

    def _parse_params(self, params: Dict[str, float]) -> Dict[str, float]:
        if not isinstance(params, dict):
            raise ConfigurationError(msg=f"noise parameters must be an object, got {params!r}")
        unknown = set(params.keys()) - set(self.parameter_names)
        if unknown:
            raise ConfigurationError(msg=f"Unknown parameter(s) {sorted(unknown)} for noise family '{self.family}'",
                                     context=f"accepted: {list(self.parameter_names)}")

        parsed = {}
        for name, value in params.items():
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ConfigurationError(msg=f"noise parameter '{name}' must be a finite number, got {value!r}")
            parsed[name] = float(value)
        return parsed

    # shape functions on s in [0, 1]
    def _shape(self, s: np.ndarray) -> np.ndarray:
        raise NotImplementedError()

    def _shape_derivative(self, s: np.ndarray) -> np.ndarray:
        raise NotImplementedError()

    def _shape_cdf(self, s: np.ndarray) -> np.ndarray:
        raise NotImplementedError()

    def _shape_quantile(self, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError()

    def _shape_boundary_values(self) -> Tuple[float, float, float]:
        """ returns g(0), g(1), sup|g'| """
        raise NotImplementedError()

    def _require_positive_epsilon(self):
        if self.epsilon == 0:
            raise UnsupportedConfiguration(msg="The noise density degenerates to a point mass when epsilon = 0",
                                           context=f"family: {self.family}")

    def _to_shape_variable(self, t: ArrayLike) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) or np.any(t > self.epsilon):
            raise DomainError(msg=f"t must lie in [0, {self.epsilon}]")
        return t / self.epsilon

    def pdf(self, t: ArrayLike) -> ArrayLike:
        self._require_positive_epsilon()
        return _like_input(t, self._shape(self._to_shape_variable(t)) / self.epsilon)

    def derivative(self, t: ArrayLike) -> ArrayLike:
        self._require_positive_epsilon()
        return _like_input(t, self._shape_derivative(self._to_shape_variable(t)) / self.epsilon ** 2)

    def cdf(self, t: ArrayLike) -> ArrayLike:
        self._require_positive_epsilon()
        return _like_input(t, np.clip(self._shape_cdf(self._to_shape_variable(t)), 0.0, 1.0))

    def quantile(self, u: ArrayLike) -> ArrayLike:
        u_array = np.asarray(u, dtype=float)
        if np.any(u_array < 0) or np.any(u_array > 1):
            raise DomainError(msg="quantile levels must lie in [0, 1]")

        if self.epsilon == 0:
            return _like_input(u, np.zeros_like(u_array))

        return _like_input(u, np.clip(self.epsilon * self._shape_quantile(u_array), 0.0, self.epsilon))

    @property
    def h0(self) -> float:
        self._require_positive_epsilon()
        return self._shape_boundary_values()[0] / self.epsilon

    @property
    def heps(self) -> float:
        self._require_positive_epsilon()
        return self._shape_boundary_values()[1] / self.epsilon

    @property
    def hprime_sup(self) -> float:
        self._require_positive_epsilon()
        return self._shape_boundary_values()[2] / self.epsilon ** 2

    def stats(self) -> NoiseStats:
        # the families are normalized in closed form
        return NoiseStats(h0=self.h0, heps=self.heps, hprime_sup=self.hprime_sup, mass=1.0)

    def with_epsilon(self, epsilon: float) -> 'NoiseDensity':
        return self.__class__(epsilon=epsilon, params=self.params)

    def to_json(self) -> Dict:
        return {
            'family': str(self.family),
            'params': dict(self.params)
        }

    def __eq__(self, other):
        return isinstance(other, NoiseDensity) and self.family == other.family \
            and self.epsilon == other.epsilon and self.params == other.params

    def __hash__(self):
        return hash((self.family, self.epsilon, tuple(sorted(self.params.items()))))

    def __repr__(self):
        return f"{self.__class__.__name__}(epsilon={self.epsilon!r}, params={self.params!r})"


def _like_input(original: ArrayLike, result: np.ndarray) -> ArrayLike:
    if np.ndim(original) == 0:
        return float(result)
    return result
