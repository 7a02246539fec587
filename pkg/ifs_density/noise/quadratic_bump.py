import numpy as np

from .noise_density import NoiseDensity, NoiseFamily


class QuadraticBumpNoise(NoiseDensity):

    family = NoiseFamily.QUADRATIC_BUMP

    def _shape(self, s):
        return 6.0 * s * (1.0 - s)

    def _shape_derivative(self, s):
        return 6.0 - 12.0 * s

    def _shape_cdf(self, s):
        return s * s * (3.0 - 2.0 * s)

    def _shape_quantile(self, u):
        # trigonometric root of 3s^2 - 2s^3 = u on [0, 1]
        return 0.5 - np.sin(np.arcsin(np.clip(1.0 - 2.0 * u, -1.0, 1.0)) / 3.0)

    def _shape_boundary_values(self):
        return 0.0, 0.0, 6.0
