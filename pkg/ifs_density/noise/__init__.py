from typing import Dict, Optional, Tuple

from .noise_density import NoiseDensity, NoiseFamily, NoiseStats
from .uniform import UniformNoise
from .linear_ramp import LinearRampNoise
from .raised_cosine import RaisedCosineNoise
from .quadratic_bump import QuadraticBumpNoise
from ..exceptions import ConfigurationError


_families = {
    NoiseFamily.UNIFORM: UniformNoise,
    NoiseFamily.LINEAR_RAMP: LinearRampNoise,
    NoiseFamily.RAISED_COSINE: RaisedCosineNoise,
    NoiseFamily.QUADRATIC_BUMP: QuadraticBumpNoise,
}


def create_noise(family: str, epsilon: float, params: Optional[Dict[str, float]] = None) -> NoiseDensity:
    try:
        noise_family = NoiseFamily(family)
    except ValueError:
        raise ConfigurationError(msg=f"Unknown noise family '{family}'",
                                 context=f"accepted: {[str(f) for f in NoiseFamily]}")
    return _families[noise_family](epsilon=epsilon, params=params)


def parse_noise_json(json_noise: Dict) -> Tuple[NoiseFamily, Dict]:
    """ checks a {family, params} document and returns the family and the raw parameters """
    if not isinstance(json_noise, dict):
        raise ConfigurationError(msg="'noise' must be an object with 'family' and 'params'")

    unknown = set(json_noise.keys()) - {'family', 'params'}
    if unknown:
        raise ConfigurationError(msg=f"Unknown key(s) {sorted(unknown)} in 'noise'")
    if 'family' not in json_noise:
        raise ConfigurationError(msg="'noise' is missing its 'family'")

    try:
        family = NoiseFamily(json_noise['family'])
    except ValueError:
        raise ConfigurationError(msg=f"Unknown noise family '{json_noise['family']}'",
                                 context=f"accepted: {[str(f) for f in NoiseFamily]}")

    params = json_noise.get('params')
    if params is None:
        params = {}
    if not isinstance(params, dict):
        raise ConfigurationError(msg=f"'params' of noise family '{family}' must be an object, got {params!r}")
    return family, params


def noise_from_json(json_noise: Dict, epsilon: float) -> NoiseDensity:
    family, params = parse_noise_json(json_noise)
    return create_noise(family, epsilon=epsilon, params=params)


def noise_stats(h: NoiseDensity) -> NoiseStats:
    return h.stats()
