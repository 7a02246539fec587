import numpy as np

from .noise_density import NoiseDensity, NoiseFamily
from ..exceptions import *


class LinearRampNoise(NoiseDensity):
    """
    h(t) = (1 + c (2t/eps - 1)) / eps with slope c in [-1, 1].
    c = 1 is the rising ramp 2t/eps^2, c = -1 the falling one, c = 0 is uniform.
    """

    family = NoiseFamily.LINEAR_RAMP
    parameter_names = ('slope',)

    def _parse_params(self, params):
        params = super()._parse_params(params)
        slope = float(params.get('slope', 1.0))
        if not -1.0 <= slope <= 1.0:
            raise ConfigurationError(msg=f"linear-ramp slope must lie in [-1, 1], got {slope}")
        return {'slope': slope}

    @property
    def slope(self) -> float:
        return self.params['slope']

    def _shape(self, s):
        return 1.0 + self.slope * (2.0 * s - 1.0)

    def _shape_derivative(self, s):
        return np.full_like(s, 2.0 * self.slope)

    def _shape_cdf(self, s):
        return (1.0 - self.slope) * s + self.slope * s * s

    def _shape_quantile(self, u):
        c = self.slope
        # root of c s^2 + (1 - c) s - u = 0 written without cancellation
        denominator = (1.0 - c) + np.sqrt(np.clip((1.0 - c) ** 2 + 4.0 * c * u, 0.0, None))
        safe = np.where(denominator > 0, denominator, 1.0)
        return np.where(denominator > 0, 2.0 * u / safe, 0.0)

    def _shape_boundary_values(self):
        return 1.0 - self.slope, 1.0 + self.slope, 2.0 * abs(self.slope)
