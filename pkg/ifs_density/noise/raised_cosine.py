import math

import numpy as np

from .noise_density import NoiseDensity, NoiseFamily


_BISECTION_STEPS = 60


class RaisedCosineNoise(NoiseDensity):

    family = NoiseFamily.RAISED_COSINE

    def _shape(self, s):
        return 1.0 - np.cos(2.0 * math.pi * s)

    def _shape_derivative(self, s):
        return 2.0 * math.pi * np.sin(2.0 * math.pi * s)

    def _shape_cdf(self, s):
        return s - np.sin(2.0 * math.pi * s) / (2.0 * math.pi)

    def _shape_quantile(self, u):
        # the cdf has no closed-form inverse; it is strictly increasing so a
        # fixed number of bisection steps gives a deterministic result
        low = np.zeros_like(u)
        high = np.ones_like(u)
        for _ in range(_BISECTION_STEPS):
            middle = 0.5 * (low + high)
            below = self._shape_cdf(middle) < u
            low = np.where(below, middle, low)
            high = np.where(below, high, middle)
        return 0.5 * (low + high)

    def _shape_boundary_values(self):
        return 0.0, 0.0, 2.0 * math.pi
