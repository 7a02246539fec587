import json
import dataclasses
import pathlib
from dataclasses import dataclass
from typing import Dict, Optional, Union

import numpy as np

from .exceptions import *
from .cones import ConeParams, default_cone
from .gridfn import DEFAULT_GRID_POINTS, Grid
from .operators import DEFAULT_T_NODES, QuadratureSpec
from .oracle import DEFAULT_BURN_IN, DEFAULT_COUNT
from .solver import DEFAULT_MAX_ITERATIONS, DEFAULT_TOLERANCE
from .system import IFSSystem


_RUN_KEYS = {'system', 'grid_points', 't_nodes', 'tol', 'max_iter', 'seed', 'burn_in', 'count', 'cone'}


def _to_int(value, name: str, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < minimum:
        raise ConfigurationError(msg=f"'{name}' must be an integer >= {minimum}, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class RunConfig:
    """
    Everything a run needs: the system plus numerical and sampling settings.

    Objects are immutable; `with_overrides` returns a modified copy.
    """

    system: IFSSystem
    grid_points: int = DEFAULT_GRID_POINTS
    t_nodes: int = DEFAULT_T_NODES
    tol: float = DEFAULT_TOLERANCE
    max_iter: int = DEFAULT_MAX_ITERATIONS
    seed: int = 0
    burn_in: int = DEFAULT_BURN_IN
    count: int = DEFAULT_COUNT
    cone: Optional[ConeParams] = None

    def __post_init__(self):
        Grid(_to_int(self.grid_points, 'grid_points', 3))
        QuadratureSpec(_to_int(self.t_nodes, 't_nodes', 2))
        _to_int(self.max_iter, 'max_iter', 1)
        _to_int(self.seed, 'seed', 0)
        _to_int(self.burn_in, 'burn_in', 0)
        _to_int(self.count, 'count', 0)
        if isinstance(self.tol, bool) or not isinstance(self.tol, (int, float)) or not self.tol > 0:
            raise ConfigurationError(msg=f"'tol' must be a number > 0, got {self.tol!r}")

    @staticmethod
    def from_json(json_config: Dict) -> 'RunConfig':
        """ accepts a run document (with a 'system' key) or a bare system document """
        if not isinstance(json_config, dict):
            raise ConfigurationError(msg="A configuration must be a JSON object")
        if 'system' not in json_config:
            return RunConfig(system=IFSSystem.from_json(json_config))

        unknown = set(json_config.keys()) - _RUN_KEYS
        if unknown:
            raise ConfigurationError(msg=f"Unknown key(s) {sorted(unknown)} in run configuration")

        settings = {key: value for key, value in json_config.items() if key not in ('system', 'cone')}
        cone = None
        if json_config.get('cone') is not None:
            cone = ConeParams.from_json(json_config['cone'])
        return RunConfig(system=IFSSystem.from_json(json_config['system']), cone=cone, **settings)

    @staticmethod
    def from_json_file(path: Union[str, pathlib.Path]) -> 'RunConfig':
        try:
            with open(path, 'rt') as f:
                json_config = json.load(f)
        except (OSError, json.JSONDecodeError) as ex:
            raise ConfigurationError(msg=f"Could not read configuration: {ex}", context=str(path))
        return RunConfig.from_json(json_config)

    def to_json(self) -> Dict:
        return {
            'system': self.system.to_json(),
            'grid_points': self.grid_points,
            't_nodes': self.t_nodes,
            'tol': self.tol,
            'max_iter': self.max_iter,
            'seed': self.seed,
            'burn_in': self.burn_in,
            'count': self.count,
            'cone': None if self.cone is None else self.cone.to_json()
        }

    def with_overrides(self, **overrides) -> 'RunConfig':
        """ None values mean 'keep the current value' (unset command line flags) """
        return dataclasses.replace(self, **{key: value for key, value in overrides.items() if value is not None})

    @property
    def grid(self) -> Grid:
        return Grid(self.grid_points)

    @property
    def quadrature(self) -> QuadratureSpec:
        return QuadratureSpec(self.t_nodes)

    @property
    def cone_params(self) -> ConeParams:
        """ the configured cone (b defaults to 2 b_min) or a = 0.5, gamma = 1, b = 2 b_min """
        if self.cone is None:
            return default_cone(self.system.lam)
        if self.cone.b is None:
            return default_cone(self.system.lam, self.cone.a, self.cone.gamma)
        return self.cone
