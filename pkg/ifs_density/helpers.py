import json
import math
from typing import Callable, List, Tuple

import numpy as np

from .exceptions import ConfigurationError


def parse_float_list(text: str) -> List[float]:
    """ '0.2, 0.1,0.05' -> [0.2, 0.1, 0.05] """
    try:
        values = [float(item) for item in text.split(',') if item.strip()]
    except ValueError:
        raise ConfigurationError(msg=f"Not a comma separated list of numbers: '{text}'")
    if not values or not all(math.isfinite(v) for v in values):
        raise ConfigurationError(msg=f"Not a comma separated list of finite numbers: '{text}'")
    return values


def random_polynomial(rng: np.random.Generator, degree: int = 5) -> Callable[[np.ndarray], np.ndarray]:
    coefficients = rng.uniform(-1.0, 1.0, degree + 1)
    return np.polynomial.Polynomial(coefficients)


def random_intervals(rng: np.random.Generator, count: int) -> List[Tuple[float, float]]:
    ends = np.sort(rng.uniform(-1.0, 1.0, (count, 2)), axis=1)
    return [(float(c), float(d)) for c, d in ends]


def to_json_text(payload) -> str:
    # sorted keys keep reports byte-identical across runs
    return json.dumps(payload, sort_keys=True, indent=2, allow_nan=False) + "\n"
