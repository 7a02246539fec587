import json
import math
import pathlib
import unittest

from hypothesis import given, settings, strategies as st

from ifs_density import IFSSystem, Branch, ViolationRule, NoiseFamily, validate_system, map_apply, map_inverse, \
    image_interval, perturbed_bernoulli_convolution
from ifs_density.system import require_admissible, require_positive_epsilon
import ifs_density.exceptions as ifs_exceptions

here = pathlib.Path(__file__).parent.resolve()


def s1() -> IFSSystem:
    return IFSSystem.from_json_file(here / "stimuli/s1.json")


class TestSystem(unittest.TestCase):

    def test_load_reference_systems(self):
        sys = s1()
        self.assertEqual(0.4, sys.lam)
        self.assertEqual(0.1, sys.epsilon)
        self.assertEqual(2, sys.n_branches)
        self.assertEqual(NoiseFamily.UNIFORM, sys.noise_family)
        self.assertEqual([-0.3, 0.2], list(sys.a))

        s2 = IFSSystem.from_json_file(here / "stimuli/s2.json")
        self.assertEqual(NoiseFamily.UNIFORM, s2.noise_family)  # default family

        s3 = IFSSystem.from_json_file(here / "stimuli/s3.json")
        self.assertEqual(NoiseFamily.RAISED_COSINE, s3.noise_family)

        for name in ["s1", "s2", "s3"]:
            self.assertTrue(validate_system(IFSSystem.from_json_file(here / f"stimuli/{name}.json")).is_admissible)

    def test_json_round_trip(self):
        sys = s1()
        self.assertEqual(sys, IFSSystem.from_json(json.loads(json.dumps(sys.to_json()))))
        self.assertEqual(hash(sys), hash(IFSSystem.from_json(sys.to_json())))

    def test_unknown_keys_are_rejected(self):
        json_system = s1().to_json()
        json_system['lambda_'] = 0.3
        with self.assertRaises(ifs_exceptions.ConfigurationError):
            IFSSystem.from_json(json_system)

        json_system = s1().to_json()
        json_system['branches'][0]['q'] = 1
        with self.assertRaises(ifs_exceptions.ConfigurationError):
            IFSSystem.from_json(json_system)

        json_system = s1().to_json()
        json_system['noise'] = {'family': 'gaussian'}
        with self.assertRaises(ifs_exceptions.ConfigurationError):
            IFSSystem.from_json(json_system)

        json_system = s1().to_json()
        del json_system['epsilon']
        with self.assertRaises(ifs_exceptions.ConfigurationError):
            IFSSystem.from_json(json_system)

        json_system = s1().to_json()
        json_system['lambda'] = "0.4"
        with self.assertRaises(ifs_exceptions.ConfigurationError):
            IFSSystem.from_json(json_system)

    def test_malformed_values_are_rejected(self):
        json_system = s1().to_json()
        json_system['branches'] = 3
        with self.assertRaises(ifs_exceptions.ConfigurationError):
            IFSSystem.from_json(json_system)

        json_system = s1().to_json()
        json_system['noise'] = {'family': 'linear-ramp', 'params': [1, 2]}
        with self.assertRaises(ifs_exceptions.ConfigurationError):
            IFSSystem.from_json(json_system)

        json_system = s1().to_json()
        json_system['noise'] = {'params': {}}
        with self.assertRaises(ifs_exceptions.ConfigurationError):
            IFSSystem.from_json(json_system)

        with self.assertRaises(ifs_exceptions.ConfigurationError):
            IFSSystem(0.4, s1().branches, 0.1, NoiseFamily.LINEAR_RAMP, [1, 2])

    def test_bad_noise_parameters_are_reported(self):
        json_system = s1().to_json()
        json_system['noise'] = {'family': 'linear-ramp', 'params': {'slope': 'abc'}}
        sys = IFSSystem.from_json(json_system)

        report = validate_system(sys)
        self.assertFalse(report.is_admissible)
        self.assertEqual([ViolationRule.NOISE], [v.rule for v in report.violations])
        self.assertIn("slope", report.violations[0].message)
        with self.assertRaises(ifs_exceptions.PreconditionError):
            require_admissible(sys)

    def test_missing_file(self):
        with self.assertRaises(ifs_exceptions.ConfigurationError):
            IFSSystem.from_json_file(here / "stimuli/does-not-exist.json")

    def test_containment_violation(self):
        sys = IFSSystem.from_json_file(here / "stimuli/invalid_containment.json")
        report = validate_system(sys)

        self.assertFalse(report.is_admissible)
        rules = [v.rule for v in report.violations]
        self.assertIn(ViolationRule.CONTAINMENT, rules)
        containment = [v for v in report.violations if v.rule == ViolationRule.CONTAINMENT][0]
        self.assertEqual(0, containment.branch_index)
        self.assertEqual(0.0, containment.endpoint)
        self.assertIn("containment", str(report))

        with self.assertRaises(ifs_exceptions.PreconditionError):
            require_admissible(sys)

    def test_containment_boundary_is_admissible(self):
        # lambda + |a + b eps| = 1 exactly
        sys = IFSSystem(0.5, [Branch(0.4, 1.0, 1.0)], 0.1)
        self.assertTrue(validate_system(sys).is_admissible)

        sys = IFSSystem(0.5, [Branch(0.4, 1.0, 1.0)], 0.1 + 1e-6)
        self.assertFalse(validate_system(sys).is_admissible)

    def test_all_violations_are_reported(self):
        sys = IFSSystem(1.2, [Branch(0.0, 0.0, 0.4), Branch(0.0, 1.0, -0.1)], 0.1)
        rules = {v.rule for v in validate_system(sys).violations}

        self.assertIn(ViolationRule.LAMBDA_RANGE, rules)
        self.assertIn(ViolationRule.ZERO_COUPLING, rules)
        self.assertIn(ViolationRule.NON_POSITIVE_PROBABILITY, rules)
        self.assertIn(ViolationRule.PROBABILITY_SUM, rules)

    def test_probability_sum_tolerance(self):
        sys = IFSSystem(0.4, [Branch(-0.3, 1.0, 0.5), Branch(0.2, 1.0, 0.5 + 1e-13)], 0.1)
        self.assertTrue(validate_system(sys).is_admissible)

        sys = IFSSystem(0.4, [Branch(-0.3, 1.0, 0.5), Branch(0.2, 1.0, 0.5 + 1e-9)], 0.1)
        self.assertFalse(validate_system(sys).is_admissible)

    def test_non_finite_and_empty(self):
        sys = IFSSystem(0.4, [Branch(math.nan, 1.0, 1.0)], 0.1)
        self.assertEqual([ViolationRule.NON_FINITE], [v.rule for v in validate_system(sys).violations])

        sys = IFSSystem(0.4, [], 0.1)
        self.assertIn(ViolationRule.NO_BRANCHES, [v.rule for v in validate_system(sys).violations])

    def test_epsilon_zero_is_admissible_but_unsupported_by_operators(self):
        sys = IFSSystem(0.5, [Branch(0.5, 1.0, 1.0)], 0.0)
        self.assertTrue(validate_system(sys).is_admissible)
        with self.assertRaises(ifs_exceptions.UnsupportedConfiguration):
            require_positive_epsilon(sys)

    def test_map_apply_and_inverse(self):
        sys = s1()
        self.assertAlmostEqual(0.4 * 0.5 - 0.3 + 0.05, map_apply(sys, 0, 0.05, 0.5), places=15)
        self.assertAlmostEqual(0.5, map_inverse(sys, 0, 0.05, map_apply(sys, 0, 0.05, 0.5)), places=14)

        low, high = image_interval(sys, 1, 0.1)
        self.assertAlmostEqual(-0.1, low, places=15)
        self.assertAlmostEqual(0.7, high, places=15)

        with self.assertRaises(ifs_exceptions.DomainError):
            map_inverse(sys, 1, 0.1, -0.5)
        with self.assertRaises(ifs_exceptions.DomainError):
            map_apply(sys, 2, 0.0, 0.0)
        with self.assertRaises(ifs_exceptions.DomainError):
            map_apply(sys, 0, 0.2, 0.0)
        with self.assertRaises(ifs_exceptions.DomainError):
            map_apply(sys, 0, 0.0, 1.5)

    @given(x=st.floats(-1, 1), t=st.floats(0, 0.1), k=st.integers(0, 1))
    @settings(max_examples=200)
    def test_maps_stay_in_interval(self, x, t, k):
        sys = s1()
        y = map_apply(sys, k, t, x)
        self.assertTrue(-1 <= y <= 1)
        self.assertAlmostEqual(x, map_inverse(sys, k, t, y), delta=1e-12)

    def test_with_epsilon(self):
        sys = IFSSystem.from_json_file(here / "stimuli/s3.json")
        other = sys.with_epsilon(0.05)
        self.assertEqual(0.05, other.epsilon)
        self.assertEqual(NoiseFamily.RAISED_COSINE, other.noise_family)
        self.assertEqual(0.1, sys.epsilon)

        uniform = sys.with_epsilon(0.05, NoiseFamily.UNIFORM)
        self.assertEqual(NoiseFamily.UNIFORM, uniform.noise_family)
        self.assertAlmostEqual(20.0, uniform.noise.h0)

    @given(lam=st.floats(0.05, 0.95), fraction=st.floats(0, 1))
    def test_perturbed_bernoulli_convolution_is_admissible(self, lam, fraction):
        sys = perturbed_bernoulli_convolution(lam, fraction * 2 * (1 - lam))
        self.assertTrue(validate_system(sys).is_admissible, str(validate_system(sys)))

    def test_perturbed_bernoulli_convolution_limits(self):
        with self.assertRaises(ifs_exceptions.PreconditionError) as ctx:
            perturbed_bernoulli_convolution(0.5, 1.01)
        self.assertAlmostEqual(1.0, ctx.exception.threshold)

        with self.assertRaises(ifs_exceptions.DomainError):
            perturbed_bernoulli_convolution(1.0, 0.1)


if __name__ == '__main__':
    unittest.main()
