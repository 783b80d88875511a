#!/usr/bin/env python3
"""
Test suite for the closed-form solution families: helices, circles,
generator lines, axis segments and the incompatible radial motion.
"""

import math
import unittest

import numpy as np
from numpy.testing import assert_allclose
from scipy import optimize

from engines import closedform, dynamics, media
from engines.dynamics import IntegratorConfig
from engines.errors import ConfigError, UnsupportedProfileError
from engines.media import CylindricalRadial, GaussianMirage, GaussianRing, Uniform


def _max_el_residual(profile, family, span, samples=50):
    return max(np.linalg.norm(dynamics.el_residual(profile, family.state, t))
               for t in np.linspace(0.0, span, samples))


class TestHelix(unittest.TestCase):
    """Helices on cylinders of a cylindrical mirage."""

    def setUp(self):
        self.profile = GaussianMirage(epsilon=1.0, width=2.5, symmetry=media.CYLINDRICAL)
        self.families = closedform.helix_omegas(self.profile, 4.0)

    def test_branches_exist(self):
        self.assertGreaterEqual(len(self.families), 2)
        for family in self.families:
            self.assertLess(family.residual, 1e-10)
            self.assertGreater(family.speed2, 1.0)
            self.assertLess(abs(closedform.helix_equation(self.profile, 4.0, family.omega0)), 1e-10)
        omegas = {family.omega0 for family in self.families}
        self.assertTrue(all(-w in omegas for w in omegas))
        print(f"✓ {len(self.families)} helix branches at rho=4")

    def test_bisection_oracle(self):
        """Each angular velocity is confirmed by an independent bracketing root finder."""
        for family in self.families:
            if family.omega0 <= 0.0:
                continue
            w = family.omega0
            root = optimize.bisect(lambda om: closedform.helix_equation(self.profile, 4.0, om),
                                   0.9 * w, 1.1 * w, xtol=1e-15)
            self.assertLess(abs(root - w), 1e-10)

    def test_el_residual_along_helix(self):
        family = max(self.families, key=lambda f: f.omega0)
        self.assertLess(_max_el_residual(self.profile, family, family.period()), 1e-8)

        perturbed = closedform.HelixFamily(rho0=4.0, omega0=family.omega0 * (1.0 + 1e-3), phi0=0.0,
                                           omega_sign=1, root_sign=family.root_sign, residual=0.0,
                                           profile=self.profile)
        self.assertGreater(np.linalg.norm(dynamics.el_residual(self.profile, perturbed.state, 0.0)), 1e-5)

    def test_integrator_tracks_helix(self):
        family = max(self.families, key=lambda f: f.omega0)
        x0, v0, _ = family.state(0.0)
        period = family.period()
        cfg = IntegratorConfig(t_span=(0.0, period), rel_tol=1e-12, abs_tol=1e-14, sample_every=period / 20.0)
        trajectory = dynamics.integrate(self.profile, x0, v0, cfg)
        exact = np.array([family.state(t)[0] for t in trajectory.t])
        self.assertLess(np.max(np.abs(trajectory.x - exact)), 1e-6)

    def test_parametrisation(self):
        trajectory = closedform.make_trajectory(self.families[0], (0.0, 5.0), 0.5)
        assert_allclose(trajectory.x[:, 2], trajectory.t, rtol=0.0, atol=0.0)
        radius2 = trajectory.x[:, 0] ** 2 + trajectory.x[:, 1] ** 2
        self.assertLess(np.max(np.abs(radius2 - 16.0)), 1e-13)

    def test_flat_slope_gives_no_helix(self):
        ring = GaussianRing(base=1.0, amplitude=1.0, center=2.0, width=1.0)
        self.assertEqual(closedform.helix_omegas(ring, 2.0), [])

    def test_window_diagnostics(self):
        diagnostics = closedform.helix_window_diagnostics(self.profile, 4.0)
        self.assertTrue(diagnostics["exact"])
        self.assertLess(diagnostics["f_prime"], 0.0)
        for key in ("k", "delta", "window_item_1", "window_item_2", "degenerate"):
            self.assertIn(key, diagnostics)

    def test_requires_cylindrical_profile(self):
        with self.assertRaises(UnsupportedProfileError):
            closedform.helix_omegas(GaussianMirage(1.0, 2.5, media.SPHERICAL), 4.0)
        with self.assertRaises(ConfigError):
            closedform.helix_omegas(self.profile, -1.0)


class TestRoots(unittest.TestCase):

    def test_bracket_roots(self):
        roots = closedform.bracket_roots(math.cos, (0.1, 10.0))
        assert_allclose(roots, [math.pi / 2, 3 * math.pi / 2, 5 * math.pi / 2], atol=1e-10)

    def test_invalid_bracket(self):
        with self.assertRaises(ConfigError):
            closedform.bracket_roots(math.cos, (2.0, 1.0))
        with self.assertRaises(ConfigError):
            closedform.bracket_roots(math.cos, (-1.0, 1.0))


class TestCircles(unittest.TestCase):

    def setUp(self):
        self.cylindrical = GaussianMirage(epsilon=1.0, width=2.5, symmetry=media.CYLINDRICAL)
        self.spherical = GaussianMirage(epsilon=1.0, width=2.5, symmetry=media.SPHERICAL)

    def test_circle_radii(self):
        families = closedform.circle_radii(self.cylindrical, (0.1, 10.0))
        self.assertGreaterEqual(len(families), 1)
        for family in families:
            self.assertEqual(family.kind, closedform.HORIZONTAL)
            self.assertLess(family.residual, 1e-10)
            self.assertLess(_max_el_residual(self.cylindrical, family, 2 * math.pi), 1e-8)

    def test_symmetries_share_roots(self):
        cylindrical = [f.radius for f in closedform.circle_radii(self.cylindrical, (0.1, 10.0))]
        spherical = [f.radius for f in closedform.circle_radii(self.spherical, (0.1, 10.0))]
        self.assertEqual(len(cylindrical), len(spherical))
        assert_allclose(cylindrical, spherical, rtol=0.0, atol=1e-12)

    def test_orbit_closure(self):
        family = closedform.circle_radii(self.cylindrical, (0.1, 10.0))[0]
        x0, v0, _ = family.state(0.0)
        cfg = IntegratorConfig(t_span=(0.0, 2 * math.pi), rel_tol=1e-12, abs_tol=1e-14)
        trajectory = dynamics.integrate(self.cylindrical, x0, v0, cfg)
        self.assertLess(np.max(np.abs(trajectory.x[-1] - x0)), 1e-6)
        print("✓ Circular orbit closes after 2 pi")

    def test_positive_product_has_no_circle(self):
        # f f' >= 0 everywhere on (0, 2) for a ring centred at 2
        ring = GaussianRing(base=1.0, amplitude=1.0, center=2.0, width=1.0)
        self.assertEqual(closedform.circle_radii(ring, (0.1, 1.9)), [])

    def test_sphere_families(self):
        families = closedform.sphere_circle_families(self.spherical, (0.1, 10.0), phi0=math.pi / 2)
        equatorial = [f for f in families if f.kind == closedform.EQUATORIAL]
        vertical = [f for f in families if f.kind == closedform.VERTICAL]
        self.assertGreaterEqual(len(equatorial), 1)
        self.assertEqual(len(vertical), len(equatorial))
        self.assertFalse(any(f.kind == closedform.LATITUDE for f in families))
        for family in equatorial + vertical:
            self.assertLess(_max_el_residual(self.spherical, family, 2 * math.pi), 1e-8)
        for t in np.linspace(0.0, 2 * math.pi, 13):
            x = vertical[0].state(t)[0]
            self.assertLess(abs(math.sin(math.pi / 2) * x[0] - math.cos(math.pi / 2) * x[1]), 1e-12)

    def test_latitude_circles_are_flagged(self):
        ring = GaussianRing(base=1.0, amplitude=1.0, center=2.0, width=1.0, symmetry=media.SPHERICAL)
        latitude = [f for f in closedform.sphere_circle_families(ring, (0.1, 10.0))
                    if f.kind == closedform.LATITUDE]
        self.assertEqual(len(latitude), 1)
        self.assertAlmostEqual(latitude[0].radius, 2.0, delta=1e-10)
        self.assertFalse(latitude[0].geodesic)
        self.assertGreater(latitude[0].system_residual, 1.0)
        self.assertFalse(latitude[0].to_dict()["geodesic"])


class TestLines(unittest.TestCase):

    def test_generator_on_ring(self):
        ring = GaussianRing(base=1.0, amplitude=1.0, center=2.0, width=1.0)
        families = closedform.generator_radii(ring, (0.1, 10.0))
        self.assertEqual(len(families), 1)
        self.assertAlmostEqual(families[0].params["rho0"], 2.0, delta=1e-10)
        self.assertLess(_max_el_residual(ring, families[0], 1.0), 1e-10)

    def test_no_generator_in_mirage(self):
        mirage = GaussianMirage(epsilon=1.0, width=2.5, symmetry=media.CYLINDRICAL)
        self.assertEqual(closedform.generator_radii(mirage, (0.1, 10.0)), [])
        with self.assertRaises(UnsupportedProfileError):
            closedform.generator_radii(GaussianMirage(1.0, 2.5, media.SPHERICAL))

    def test_straight_line(self):
        family = closedform.straight_line(Uniform(1.3), [1.0, 0.0, 0.0], [0.0, 2.0, 0.0])
        trajectory = closedform.make_trajectory(family, (0.0, 2.0), 1.0)
        assert_allclose(trajectory.x, [[1.0, 0.0, 0.0], [1.0, 2.0, 0.0], [1.0, 4.0, 0.0]])
        with self.assertRaises(ConfigError):
            closedform.straight_line(GaussianMirage(1.0, 2.5), [0.0, 0.0, 0.0], [1.0, 0.0, 0.0])

    def test_axis_segment(self):
        profile = GaussianMirage(epsilon=0.5, width=2.0, symmetry=media.SPHERICAL)
        trajectory = closedform.make_trajectory(closedform.axis_family(profile, 1.0, 0.7), (0.0, 10.0))
        self.assertLess(np.max(np.abs(trajectory.x[:, :2])), 1e-10)
        self.assertLess(trajectory.energy_drift(), 1e-8)


class TestIncompatibility(unittest.TestCase):

    def setUp(self):
        self.profile = GaussianMirage(epsilon=1.0, width=2.5, symmetry=media.CYLINDRICAL)

    def test_inside_window(self):
        F = closedform.incompatibility_probe(self.profile, 3.5)
        self.assertIsNotNone(F)
        self.assertGreater(F, 0.0)
        curve = closedform.incompatibility_curve(self.profile, 3.5)
        self.assertGreater(np.linalg.norm(dynamics.el_residual(self.profile, curve, 0.0)), 1e-4)

    def test_outside_window(self):
        ring = GaussianRing(base=1.0, amplitude=1.0, center=2.0, width=1.0)
        self.assertIsNone(closedform.incompatibility_probe(ring, 2.0))
        self.assertIsNone(closedform.incompatibility_curve(ring, 2.0))

    def test_non_positive_radius(self):
        # undefined on the axis: no limit_at_zero
        profile = CylindricalRadial(lambda r: 1.0 + r, f_prime=lambda r: 1.0)
        self.assertIsNone(closedform.incompatibility_probe(profile, 0.0))
        self.assertIsNone(closedform.incompatibility_probe(profile, -1.0))
        self.assertIsNone(closedform.incompatibility_curve(profile, 0.0))


if __name__ == "__main__":
    unittest.main()
