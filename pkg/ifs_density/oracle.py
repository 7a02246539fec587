import io
import math
import logging
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np
from scipy import signal

from .exceptions import *
from .gridfn import GridFunction, cumulative_dm
from .system import IFSSystem, CONTAINMENT_TOLERANCE, require_admissible


logger = logging.getLogger(__name__)

DEFAULT_BURN_IN = 1000
DEFAULT_COUNT = 1_000_000
NEGATIVE_DENSITY_TOLERANCE = 1e-9
# two-sample KS heuristic: 3 * 1.36 / sqrt(count)
TWO_SAMPLE_FACTOR = 3 * 1.36


@dataclass(frozen=True)
class SampleSet:

    samples: np.ndarray
    seed: int
    burn_in: int
    count: int

    def to_csv_text(self) -> str:
        with io.StringIO() as buffer:
            np.savetxt(buffer, self.samples, fmt='%.17g')
            return buffer.getvalue()


def _check_count(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 0:
        raise ConfigurationError(msg=f"{name} must be an integer >= 0, got {value!r}")
    return int(value)


def sample_chain(sys: IFSSystem, count: int = DEFAULT_COUNT, burn_in: int = DEFAULT_BURN_IN,
                 seed: int = 0) -> SampleSet:
    """
    Runs x_{j+1} = f_{K_j, T_j}(x_j) from x_0 = 0 and keeps the states after `burn_in`.

    One uniform stream drives the chain: two draws per step, K first (inverse
    CDF of the branch probabilities) then T (quantile of the noise density).
    Works for epsilon = 0 (T is identically 0).
    """
    count = _check_count(count, 'count')
    burn_in = _check_count(burn_in, 'burn_in')
    seed = _check_count(seed, 'seed')
    require_admissible(sys)

    steps = burn_in + count
    uniforms = np.random.default_rng(seed).random(2 * steps)
    branch_indices = np.searchsorted(np.cumsum(sys.p), uniforms[0::2], side='right')
    branch_indices = np.minimum(branch_indices, sys.n_branches - 1)
    t = sys.noise.quantile(uniforms[1::2])

    # x_{j+1} = lam x_j + c_j is a first order recursive filter
    offsets = sys.a[branch_indices] + sys.b[branch_indices] * t
    states = signal.lfilter([1.0], [1.0, -sys.lam], offsets)

    if steps and np.max(np.abs(states)) > 1 + CONTAINMENT_TOLERANCE:
        raise DomainError(msg="the chain left [-1, 1]", context=f"max |x| = {np.max(np.abs(states))!r}")

    samples = np.clip(states[burn_in:], -1.0, 1.0)
    samples.setflags(write=False)
    logger.info(f"sampled {count} chain states (burn-in {burn_in}, seed {seed})")
    return SampleSet(samples=samples, seed=seed, burn_in=burn_in, count=count)


def sample_chains(sys: IFSSystem, chains: int, count: int = DEFAULT_COUNT, burn_in: int = DEFAULT_BURN_IN,
                  seed: int = 0) -> SampleSet:
    """ `chains` independent chains seeded seed, seed + 1, ..., merged and sorted """
    if chains < 1:
        raise ConfigurationError(msg=f"chains must be >= 1, got {chains}")

    parts = [sample_chain(sys, count, burn_in, seed + index).samples for index in range(chains)]
    merged = np.sort(np.concatenate(parts))
    merged.setflags(write=False)
    return SampleSet(samples=merged, seed=seed, burn_in=burn_in, count=chains * count)


class EmpiricalCDF:
    """ right-continuous step CDF of a sample """

    def __init__(self, samples):
        samples = np.sort(np.asarray(samples, dtype=float))
        if len(samples) == 0:
            raise ConfigurationError(msg="an empirical CDF needs at least one sample")
        samples.setflags(write=False)
        self.samples = samples

    @property
    def count(self) -> int:
        return len(self.samples)

    def evaluate(self, x):
        result = np.searchsorted(self.samples, x, side='right') / self.count
        return float(result) if np.ndim(x) == 0 else result

    def left_limit(self, x):
        result = np.searchsorted(self.samples, x, side='left') / self.count
        return float(result) if np.ndim(x) == 0 else result

    __call__ = evaluate


def empirical_cdf(s: Union[SampleSet, np.ndarray]) -> EmpiricalCDF:
    if isinstance(s, SampleSet):
        s = s.samples
    return EmpiricalCDF(s)


def density_cdf(phi: GridFunction) -> GridFunction:
    """ F(x_j) = int_{-1}^{x_j} phi dm """
    if np.min(phi.values) < -NEGATIVE_DENSITY_TOLERANCE:
        raise DomainError(msg="a density must be non negative", context=f"min = {np.min(phi.values)}")
    return cumulative_dm(phi)


CDF = Union[EmpiricalCDF, GridFunction]


def _breakpoints(F: CDF) -> np.ndarray:
    if isinstance(F, EmpiricalCDF):
        return F.samples
    return F.grid.nodes


def _right_values(F: CDF, x: np.ndarray) -> np.ndarray:
    if isinstance(F, EmpiricalCDF):
        return F.evaluate(x)
    return np.interp(x, F.grid.nodes, F.values)


def _left_values(F: CDF, x: np.ndarray) -> np.ndarray:
    if isinstance(F, EmpiricalCDF):
        return F.left_limit(x)
    return np.interp(x, F.grid.nodes, F.values)


def ks_distance(F1: CDF, F2: CDF) -> float:
    """
    sup |F1 - F2| over [-1, 1].  Both are monotone and either piecewise linear
    or steps, so the sup is attained at a breakpoint of one of them, from
    the right or from the left.
    """
    points = np.union1d(np.union1d(_breakpoints(F1), _breakpoints(F2)), [-1.0, 1.0])
    right = np.max(np.abs(_right_values(F1, points) - _right_values(F2, points)))
    left = np.max(np.abs(_left_values(F1, points) - _left_values(F2, points)))
    return float(max(right, left))


class TwoSampleCheck(NamedTuple):

    distance: float
    threshold: float
    consistent: bool


def two_sample_check(s1: Union[SampleSet, np.ndarray], s2: Union[SampleSet, np.ndarray]) -> TwoSampleCheck:
    """ KS between two samples against 3 * 1.36 / sqrt(n); a heuristic flag, never an error """
    first = empirical_cdf(s1)
    second = empirical_cdf(s2)
    distance = ks_distance(first, second)
    threshold = TWO_SAMPLE_FACTOR / math.sqrt(min(first.count, second.count))
    consistent = distance <= threshold
    if not consistent:
        logger.warning(f"two samples disagree: KS {distance:.5f} > {threshold:.5f}")
    return TwoSampleCheck(distance=distance, threshold=threshold, consistent=consistent)
