import numpy as np

from .noise_density import NoiseDensity, NoiseFamily


class UniformNoise(NoiseDensity):

    family = NoiseFamily.UNIFORM

    def _shape(self, s):
        return np.ones_like(s)

    def _shape_derivative(self, s):
        return np.zeros_like(s)

    def _shape_cdf(self, s):
        return s

    def _shape_quantile(self, u):
        return u

    def _shape_boundary_values(self):
        return 1.0, 1.0, 0.0
