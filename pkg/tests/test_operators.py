import pathlib
import unittest

import numpy as np
from hypothesis import given, settings, strategies as st

from ifs_density import IFSSystem, Branch, Grid, GridFunction, QuadratureSpec, apply_U, apply_L, apply_U_derivative, \
    duality_residual, integrate_dm, finite_diff, NoiseFamily
from ifs_density.helpers import random_polynomial
import ifs_density.exceptions as ifs_exceptions

here = pathlib.Path(__file__).parent.resolve()


def load(name: str) -> IFSSystem:
    return IFSSystem.from_json_file(here / f"stimuli/{name}.json")


class TestOperators(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.s1 = load("s1")
        cls.s2 = load("s2")
        cls.s3 = load("s3")
        cls.grid = Grid(4001)
        cls.x = cls.grid.nodes

    def test_u_of_constant(self):
        for sys in [self.s1, self.s2, self.s3]:
            u_one = apply_U(sys, GridFunction.constant(self.grid, 1.0))
            self.assertTrue(np.allclose(1.0, u_one.values, rtol=0, atol=1e-13))

    def test_u_of_identity(self):
        # U x = lam x + sum_i p_i (a_i + b_i E[t]) with E[t] = eps / 2 for both noises
        identity = GridFunction.from_function(self.grid, lambda x: x)
        self.assertTrue(np.allclose(0.4 * self.x, apply_U(self.s1, identity).values, atol=1e-13))
        self.assertTrue(np.allclose(0.4 * self.x - 0.1, apply_U(self.s3, identity).values, atol=1e-13))
        self.assertTrue(np.allclose(0.5 * self.x + 0.05, apply_U(self.s2, identity).values, atol=1e-13))

    def test_l_conserves_mass(self):
        one = GridFunction.constant(self.grid, 1.0)
        for sys in [self.s1, self.s2]:
            self.assertAlmostEqual(1.0, integrate_dm(apply_L(sys, one)), delta=1e-10)
        # smooth noise: Simpson is no longer exact on the kinked transfer of 1
        self.assertAlmostEqual(1.0, integrate_dm(apply_L(self.s3, one)), delta=1e-9)

    def test_l_of_polynomial_conserves_mass(self):
        rng = np.random.default_rng(7)
        for _ in range(5):
            # |p| <= 6 so 7 + p is a positive density
            phi = GridFunction.from_function(self.grid, lambda x: 7 + random_polynomial(rng)(x)).normalized()
            self.assertAlmostEqual(1.0, integrate_dm(apply_L(self.s1, phi)), delta=1e-6)

    def test_l_is_positive(self):
        phi = GridFunction.from_function(self.grid, lambda x: np.exp(x))
        for sys in [self.s1, self.s2, self.s3]:
            self.assertTrue(np.all(apply_L(sys, phi).values >= 0))

    def test_l_support(self):
        # S2 moves mass into [-0.5, 0.6] after one step: lam [-1, 1] + [0, eps]
        transferred = apply_L(self.s2, GridFunction.constant(self.grid, 1.0))
        outside = (self.x < -0.5 - 1e-9) | (self.x > 0.6 + 1e-9)
        self.assertTrue(np.all(transferred.values[outside] == 0))
        self.assertTrue(np.all(transferred.values[(self.x > -0.45) & (self.x < 0.55)] > 0))

    def test_u_is_a_positive_contraction(self):
        rng = np.random.default_rng(11)
        observables = [GridFunction.from_function(self.grid, lambda x: np.cos(np.pi * x))]
        observables += [GridFunction.from_function(self.grid, random_polynomial(rng)) for _ in range(3)]
        square = GridFunction.from_function(self.grid, lambda x: x ** 2)
        for sys in [self.s1, self.s2, self.s3]:
            for psi in observables:
                self.assertLessEqual(apply_U(sys, psi).sup_norm(), psi.sup_norm() + 1e-12)
                # psi <= psi + x^2 carries over to the transfers
                gap = apply_U(sys, psi + square).values - apply_U(sys, psi).values
                self.assertTrue(np.all(gap >= -1e-12))

    def test_l_of_one_on_single_branch_system(self):
        # L1(y) = 2 |{t in [0, 0.1] : |y - t| <= 0.5}| / 0.1
        transferred = apply_L(self.s2, GridFunction.constant(self.grid, 1.0))
        width = np.clip(np.minimum(0.1, self.x + 0.5) - np.maximum(0.0, self.x - 0.5), 0.0, None)
        self.assertTrue(np.allclose(20 * width, transferred.values, rtol=0, atol=1e-12))

        self.assertAlmostEqual(2.0, transferred.evaluate(0.0), delta=1e-12)
        plateau = (self.x >= -0.4) & (self.x <= 0.5)
        self.assertTrue(np.allclose(2.0, transferred.values[plateau], rtol=0, atol=1e-12))
        self.assertAlmostEqual(1.0, transferred.evaluate(-0.45), delta=1e-9)
        self.assertAlmostEqual(1.0, transferred.evaluate(0.55), delta=1e-9)

    def test_l_vanishes_where_images_touch_the_boundary(self):
        one = GridFunction.constant(self.grid, 1.0)
        for family in [NoiseFamily.UNIFORM, NoiseFamily.RAISED_COSINE]:
            sys = IFSSystem(0.5, [Branch(0.5, -1.0, 0.5), Branch(-0.5, 1.0, 0.5)], 0.1, family)
            transferred = apply_L(sys, one).values
            self.assertAlmostEqual(0.0, transferred[0], delta=1e-12, msg=str(family))
            self.assertAlmostEqual(0.0, transferred[-1], delta=1e-12, msg=str(family))
            self.assertGreater(transferred[self.grid.n_points // 2], 0.0)

    def test_u_derivative_closed_forms(self):
        constant = GridFunction.constant(self.grid, 3.0)
        for sys in [self.s1, self.s2]:
            self.assertTrue(np.allclose(0.0, apply_U_derivative(sys, constant).values, rtol=0, atol=1e-12))
        self.assertTrue(np.allclose(0.0, apply_U_derivative(self.s3, constant).values, rtol=0, atol=1e-9))

        # uniform noise: the boundary terms sum to lam and h' = 0
        identity = GridFunction.from_function(self.grid, lambda x: x)
        for sys in [self.s1, self.s2]:
            self.assertTrue(np.allclose(sys.lam, apply_U_derivative(sys, identity).values, rtol=0, atol=1e-12))

    def test_duality_on_monomials(self):
        for power in [2, 3]:
            psi = GridFunction.from_function(self.grid, lambda x: x ** power)
            phi = GridFunction.constant(self.grid, 1.0)
            self.assertLess(duality_residual(self.s1, phi, psi), 1e-9)

    def test_duality_on_random_polynomials(self):
        rng = np.random.default_rng(2024)
        worst = 0.0
        for _ in range(10):
            phi = GridFunction.from_function(self.grid, random_polynomial(rng))
            psi = GridFunction.from_function(self.grid, random_polynomial(rng))
            worst = max(worst, duality_residual(self.s1, phi, psi))
        self.assertLess(worst, 1e-6)

    def test_u_derivative_identities(self):
        psi = GridFunction.from_function(self.grid, lambda x: np.cos(np.pi * x))
        psi_prime = GridFunction.from_function(self.grid, lambda x: -np.pi * np.sin(np.pi * x))
        interior = slice(1, -1)

        for sys in [self.s1, self.s3]:
            u_psi = apply_U(sys, psi)
            numeric = finite_diff(u_psi, 1).values[interior]

            moved_inside = sys.lam * apply_U(sys, psi_prime).values[interior]
            self.assertLess(np.max(np.abs(numeric - moved_inside)), 1e-4)

            moved_onto_h = apply_U_derivative(sys, psi).values[interior]
            self.assertLess(np.max(np.abs(numeric - moved_onto_h)), 1e-4)

    def test_l_derivative_identity(self):
        # phi vanishes with its derivative at -1 and 1, so no boundary terms appear
        phi = GridFunction.from_function(self.grid, lambda x: (1 - x ** 2) ** 2)
        phi_prime = GridFunction.from_function(self.grid, lambda x: -4 * x * (1 - x ** 2))

        numeric = finite_diff(apply_L(self.s1, phi), 1).values[2:-2]
        expected = apply_L(self.s1, phi_prime).values[2:-2] / self.s1.lam
        self.assertLess(np.max(np.abs(numeric - expected)), 1e-3)

    def test_negative_coupling(self):
        sys = IFSSystem(0.5, [Branch(0.5, -1.0, 0.5), Branch(-0.5, 1.0, 0.5)], 0.1)
        one = GridFunction.constant(self.grid, 1.0)
        self.assertAlmostEqual(1.0, integrate_dm(apply_L(sys, one)), delta=1e-10)
        psi = GridFunction.from_function(self.grid, lambda x: x ** 2)
        self.assertLess(duality_residual(sys, one, psi), 1e-9)

    def test_quadrature_spec(self):
        nodes, weights = QuadratureSpec(8).unit_rule
        self.assertAlmostEqual(1.0, float(np.sum(weights)), places=14)
        self.assertTrue(np.all((nodes > 0) & (nodes < 1)))
        self.assertAlmostEqual(1.0 / 3.0, float(np.sum(weights * nodes ** 2)), places=14)
        with self.assertRaises(ifs_exceptions.ConfigurationError):
            QuadratureSpec(1)

    def test_preconditions(self):
        one = GridFunction.constant(Grid(101), 1.0)
        with self.assertRaises(ifs_exceptions.UnsupportedConfiguration):
            apply_L(self.s1.with_epsilon(0.0), one)
        with self.assertRaises(ifs_exceptions.PreconditionError):
            apply_U(load("invalid_containment").with_epsilon(0.1), one)
        with self.assertRaises(ifs_exceptions.ConfigurationError):
            duality_residual(self.s1, one, GridFunction.constant(Grid(11), 1.0))

    @given(power=st.integers(0, 4), t_nodes=st.integers(2, 48))
    @settings(max_examples=15, deadline=None)
    def test_u_of_constant_any_quadrature(self, power, t_nodes):
        u_one = apply_U(self.s1, GridFunction.constant(Grid(101), 2.0 ** power), QuadratureSpec(t_nodes))
        self.assertTrue(np.allclose(2.0 ** power, u_one.values, rtol=1e-12, atol=0))


if __name__ == '__main__':
    unittest.main()
