#!/usr/bin/env python3
"""
Test suite for the invariant checks behind `Main.py verify`.

The dynamics and curvature suites are exercised by the command itself;
here only the cheaper suites run in full.
"""

import math
import unittest
from collections import Counter
from unittest.mock import patch

import numpy as np
import pandas as pd

from engines import verify
from engines.dynamics import Trajectory
from engines.errors import ConfigError
from engines.verify import Check
from utils import config


class TestCheck(unittest.TestCase):

    def test_relations(self):
        self.assertTrue(Check("s", "below", 1e-13, 1e-12).passed)
        self.assertFalse(Check("s", "below", 1e-11, 1e-12).passed)
        self.assertTrue(Check("s", "above", 1e-3, 1e-4, relation=">").passed)
        self.assertFalse(Check("s", "nan", math.nan, 1.0).passed)
        self.assertFalse(Check("s", "inf", math.inf, 1.0, relation=">").passed)


class TestHelpers(unittest.TestCase):

    def test_random_orthogonal(self):
        rng = np.random.default_rng(0)
        for _ in range(5):
            Q = verify.random_orthogonal(rng)
            np.testing.assert_allclose(Q @ Q.T, np.eye(3), atol=1e-14)

    def test_profile_families(self):
        families = verify.profile_families()
        self.assertEqual(len(families), 4)
        rng = np.random.default_rng(1)
        for profile in families.values():
            p = verify.sample_phase_point(rng, profile)
            self.assertEqual(p.x.shape, (3,))


class TestSuites(unittest.TestCase):

    def test_metric_suite_is_reproducible(self):
        first = verify.report(verify.run_suite("metric", seed=42))
        second = verify.report(verify.run_suite("metric", seed=42))
        pd.testing.assert_frame_equal(first, second)
        self.assertTrue((first["status"] == "PASS").all())
        self.assertEqual(list(first["check"]), sorted(first["check"]))
        print("✓ metric suite reproducible from its seed")

    def test_closedform_suite_passes(self):
        checks = verify.run_suite("closedform", seed=42)
        failed = [c for c in checks if not c.passed]
        self.assertEqual(failed, [])
        self.assertTrue(all(c.suite == "closedform" for c in checks))

    def test_energy_drift_covers_every_family(self):
        runs = Counter()

        def record(profile, x0, v0, cfg=None):
            if cfg is not None and cfg.t_span == (0.0, 20.0):
                runs[profile] += 1
            return Trajectory(t=np.zeros(1), x=np.array([x0], dtype=float), v=np.array([v0], dtype=float),
                              energy=np.zeros(1))

        with patch("engines.verify.dynamics.integrate", side_effect=record):
            verify.dynamics_suite(np.random.default_rng(0))
        self.assertEqual(set(runs), set(verify.profile_families().values()))
        self.assertTrue(all(count == config.VERIFY_DYNAMICS_ICS for count in runs.values()))

    def test_unknown_suite(self):
        with self.assertRaises(ConfigError):
            verify.run_suite("everything")

    def test_report_columns(self):
        table = verify.report([Check("metric", "x", 0.5, 1.0)])
        self.assertEqual(list(table.columns), ["suite", "check", "value", "relation", "tolerance", "status"])
        self.assertEqual(table.loc[0, "status"], "PASS")


if __name__ == "__main__":
    unittest.main()
