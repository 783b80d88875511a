#!/usr/bin/env python3
"""
Test suite for the semispray, the nonlinear connection and the Cartan coefficients.
"""

import unittest

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

from engines import connection, dynamics, media, metric
from engines.media import GaussianMirage, GaussianRing, Uniform
from engines.metric import PhasePoint


class TestSemispray(unittest.TestCase):

    def setUp(self):
        self.mirage = GaussianMirage(epsilon=1.0, width=2.5, symmetry=media.CYLINDRICAL)
        self.point = PhasePoint([3.0, 0.0, 0.0], [0.4, 0.3, 0.2])

    def test_uniform_medium(self):
        """G vanishes in a uniform medium."""
        p = PhasePoint([1.0, -2.0, 0.5], [0.3, 0.7, -1.2])
        assert_array_equal(connection.semispray(Uniform(1.5), p), np.zeros(3))

    def test_at_rest(self):
        assert_array_equal(connection.semispray(self.mirage, self.point.with_y(np.zeros(3))), np.zeros(3))

    def test_equations_of_motion(self):
        """x'' + 2G = 0 and the explicit equations of motion agree."""
        G = connection.semispray(self.mirage, self.point)
        rhs = dynamics.motion_rhs(self.mirage, self.point.x, self.point.y)
        assert_allclose(G, -0.5 * rhs, atol=1e-12)


class TestNonlinearConnection(unittest.TestCase):

    def setUp(self):
        self.mirage = GaussianMirage(epsilon=1.0, width=2.5, symmetry=media.CYLINDRICAL)
        self.point = PhasePoint([3.0, 0.0, 0.0], [0.4, 0.3, 0.2])

    def test_uniform_medium(self):
        p = PhasePoint([0.5, 0.5, 0.5], [1.0, 0.0, -1.0])
        assert_array_equal(connection.nonlinear_connection(Uniform(1.3), p).N, np.zeros((3, 3)))

    def test_at_rest(self):
        nlc = connection.nonlinear_connection(self.mirage, self.point.with_y(np.zeros(3)))
        assert_array_equal(nlc.N, np.zeros((3, 3)))

    def test_matches_finite_differences(self):
        closed = connection.nonlinear_connection(self.mirage, self.point).N
        fd = connection.nonlinear_connection_fd(self.mirage, self.point)
        self.assertLess(np.max(np.abs(closed - fd)), 1e-6)

    def test_random_points(self):
        rng = np.random.default_rng(11)
        profiles = [self.mirage, GaussianMirage(0.5, 2.0, media.SPHERICAL), GaussianRing(1.0, 1.0, 2.0, 1.0)]
        worst = 0.0
        for i in range(30):
            profile = profiles[i % 3]
            x = rng.uniform(-4.0, 4.0, 3)
            if profile.symmetry_radius(x) < 0.2:
                continue
            p = PhasePoint(x, rng.uniform(-1.0, 1.0, 3))
            worst = max(worst, np.max(np.abs(connection.nonlinear_connection(profile, p).N
                                             - connection.nonlinear_connection_fd(profile, p))))
        self.assertLess(worst, 1e-6)
        print("✓ Closed-form N matches dG/dy")

    def test_lowered_contractions(self):
        nlc = connection.nonlinear_connection(self.mirage, self.point)
        y = self.point.y
        assert_array_equal(nlc.N_low, nlc.N.T)
        assert_allclose(nlc.N_i0, nlc.N.T @ y, rtol=1e-15)
        assert_allclose(nlc.N_0j, y @ nlc.N.T, rtol=1e-15)
        self.assertAlmostEqual(nlc.N_00, float(y @ nlc.N_i0), places=15)
        assert_array_equal(nlc.N_raised, nlc.N_low)

    def test_adapted_covector_annihilates_horizontal_lift(self):
        """delta y(delta/delta x^k) = 0: the lift (e_k, -N e_k) has no vertical part."""
        N = connection.nonlinear_connection(self.mirage, self.point).N
        for k in range(3):
            dx = np.eye(3)[k]
            assert_allclose(connection.adapted_covector(self.mirage, self.point, dx, -N @ dx),
                            np.zeros(3), atol=1e-15)

    def test_delta_derivative_of_constant_field(self):
        constant = lambda q: np.array([[1.0, 2.0], [3.0, 4.0]])
        result = connection.delta_gradient(constant, self.mirage, self.point)
        self.assertEqual(result.shape, (2, 2, 3))
        assert_array_equal(result, np.zeros((2, 2, 3)))
        assert_array_equal(connection.delta_x(constant, self.mirage, self.point, 1), np.zeros((2, 2)))

    def test_delta_derivative_of_energy(self):
        energy = lambda q: metric.energy(self.mirage, q)
        # x-independent in a uniform medium, where N = 0
        uniform = Uniform(1.2)
        assert_allclose(connection.delta_gradient(lambda q: metric.energy(uniform, q), uniform, self.point),
                        np.zeros(3), atol=1e-12)
        self.assertEqual(connection.delta_gradient(energy, self.mirage, self.point).shape, (3,))


class TestCartanCoefficients(unittest.TestCase):

    def setUp(self):
        self.mirage = GaussianMirage(epsilon=1.0, width=2.5, symmetry=media.CYLINDRICAL)
        self.point = PhasePoint([3.0, 0.5, -0.2], [0.4, 0.3, 0.2])

    def test_vacuum(self):
        cartan = connection.cartan_closed_form(Uniform(1.0), self.point)
        assert_array_equal(cartan.L, np.zeros((3, 3, 3)))
        assert_array_equal(cartan.C, np.zeros((3, 3, 3)))
        general = connection.cartan_general(Uniform(1.0), self.point)
        self.assertLess(np.max(np.abs(general.L)), 1e-8)
        self.assertLess(np.max(np.abs(general.C)), 1e-8)

    def test_uniform_medium(self):
        p = PhasePoint([0.0, 1.0, 2.0], [1.0, 0.0, 0.0])
        cartan = connection.cartan_closed_form(Uniform(1.3), p)
        self.assertLess(np.max(np.abs(cartan.L)), 1e-14)
        self.assertGreater(np.max(np.abs(cartan.C)), 0.1)
        self.assertLess(np.max(np.abs(connection.cartan_general(Uniform(1.3), p).L)), 1e-8)

    def test_closed_form_matches_general_formulas(self):
        for profile, p in ((self.mirage, self.point),
                           (GaussianMirage(0.5, 2.0, media.SPHERICAL), PhasePoint([0.5, -1.0, 1.2], [0.9, -0.2, 0.3])),
                           (GaussianRing(1.0, 1.0, 2.0, 1.0), PhasePoint([1.5, 1.0, 0.3], [-0.4, 0.6, 0.5]))):
            closed = connection.cartan_closed_form(profile, p)
            general = connection.cartan_general(profile, p)
            self.assertLess(np.max(np.abs(closed.L - general.L)), 1e-6)
            self.assertLess(np.max(np.abs(closed.C - general.C)), 1e-6)
        print("✓ Cartan closed forms agree with the general formulas")

    def test_geometry_bundle(self):
        bundle = connection.geometry_bundle(self.mirage, self.point)
        assert_allclose(bundle.g @ bundle.g_inv, np.eye(3), atol=1e-12)
        assert_allclose(bundle.N, connection.nonlinear_connection(self.mirage, self.point).N, rtol=1e-15)
        self.assertAlmostEqual(bundle.tau - bundle.sigma, 2.0 * bundle.gamma ** 2 * 0.29, places=12)


if __name__ == "__main__":
    unittest.main()
