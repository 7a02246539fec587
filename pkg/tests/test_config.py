import json
import pathlib
import tempfile
import unittest

from ifs_density import RunConfig, ConeParams, IFSSystem, Grid, default_cone, parse_float_list, to_json_text
from ifs_density.helpers_internal import write_text_atomically
import ifs_density.exceptions as ifs_exceptions

here = pathlib.Path(__file__).parent.resolve()


class TestRunConfig(unittest.TestCase):

    def test_run_document(self):
        config = RunConfig.from_json_file(here / "stimuli/run_s1.json")
        self.assertEqual(1001, config.grid_points)
        self.assertEqual(42, config.seed)
        self.assertEqual(20000, config.count)
        self.assertEqual(ConeParams(0.5, 1.0), config.cone)
        self.assertEqual(Grid(1001), config.grid)
        self.assertEqual(32, config.quadrature.t_nodes)
        self.assertEqual(0.4, config.system.lam)

        # b is filled in from the contraction constants
        self.assertEqual(default_cone(0.4), config.cone_params)
        self.assertEqual(config, RunConfig.from_json(config.to_json()))

    def test_bare_system_document(self):
        config = RunConfig.from_json_file(here / "stimuli/s1.json")
        self.assertEqual(4001, config.grid_points)
        self.assertEqual(1_000_000, config.count)
        self.assertIsNone(config.cone)
        self.assertEqual(default_cone(0.4), config.cone_params)
        self.assertEqual(IFSSystem.from_json_file(here / "stimuli/s1.json").to_json(), config.system.to_json())

    def test_overrides(self):
        config = RunConfig.from_json_file(here / "stimuli/run_s1.json")
        changed = config.with_overrides(seed=7, grid_points=None, count=100)
        self.assertEqual(7, changed.seed)
        self.assertEqual(100, changed.count)
        self.assertEqual(1001, changed.grid_points)
        self.assertEqual(42, config.seed)

        with self.assertRaises(ifs_exceptions.ConfigurationError):
            config.with_overrides(grid_points=1000)
        with self.assertRaises(ifs_exceptions.ConfigurationError):
            config.with_overrides(tol=-1.0)
        with self.assertRaises(ifs_exceptions.ConfigurationError):
            config.with_overrides(count=-5)

    def test_invalid_documents(self):
        run = json.loads((here / "stimuli/run_s1.json").read_text())
        with self.assertRaises(ifs_exceptions.ConfigurationError):
            RunConfig.from_json({**run, 'grid': 11})
        with self.assertRaises(ifs_exceptions.ConfigurationError):
            RunConfig.from_json({**run, 'max_iter': 0})
        with self.assertRaises(ifs_exceptions.ConfigurationError):
            RunConfig.from_json({**run, 'cone': {'gamma': 1}})
        with self.assertRaises(ifs_exceptions.ConfigurationError):
            RunConfig.from_json([1, 2])
        with self.assertRaises(ifs_exceptions.ConfigurationError):
            RunConfig.from_json_file(here / "stimuli/missing.json")

    def test_file_round_trip(self):
        config = RunConfig.from_json_file(here / "stimuli/run_s1.json")
        with tempfile.TemporaryDirectory() as folder:
            path = pathlib.Path(folder) / "nested" / "run.json"
            write_text_atomically(path, to_json_text(config.to_json()))
            self.assertEqual(config, RunConfig.from_json_file(path))
            self.assertEqual(["run.json"], [p.name for p in path.parent.iterdir()])


class TestHelpers(unittest.TestCase):

    def test_parse_float_list(self):
        self.assertEqual([0.2, 0.1, 0.05], parse_float_list("0.2, 0.1,0.05"))
        for text in ["", "0.1,abc", "0.1,nan"]:
            with self.assertRaises(ifs_exceptions.ConfigurationError):
                parse_float_list(text)

    def test_json_text(self):
        self.assertEqual('{\n  "a": 1,\n  "b": 2\n}\n', to_json_text({'b': 2, 'a': 1}))
        with self.assertRaises(ValueError):
            to_json_text({'a': float('nan')})


if __name__ == '__main__':
    unittest.main()
