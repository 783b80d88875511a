#!/usr/bin/env python3
"""
Test suite for run configurations and trajectory files.
"""

import json
import os
import tempfile
import unittest

import numpy as np

from data import trajectory_io
from data.run_config import RunConfig, dump_run_config, load_run_config, parse_run_config
from engines import dynamics, media
from engines.dynamics import IntegratorConfig
from engines.errors import ConfigError
from engines.media import GaussianMirage, Uniform

CONFIG_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data", "configs")


class TestRunConfig(unittest.TestCase):

    def setUp(self):
        self.document = {
            "profile": {"kind": "gaussian-mirage", "symmetry": "cylindrical", "epsilon": 1.0, "width": 2.5},
            "initial": {"x": [4.0, 0.0, 0.0], "v": [0.0, 1.0, 1.0]},
            "integrator": {"t_span": [0.0, 20.0], "rel_tol": 1e-10, "abs_tol": 1e-12},
            "output": {"format": "csv", "path": "run.csv", "every": 0.25},
        }

    def test_parse_and_build(self):
        run_config = parse_run_config(self.document)
        self.assertEqual(run_config.build_profile(), GaussianMirage(1.0, 2.5, media.CYLINDRICAL))
        cfg = run_config.integrator_config()
        self.assertEqual(cfg.t_span, (0.0, 20.0))
        self.assertEqual(cfg.sample_every, 0.25)
        self.assertEqual(cfg.method, "dopri54")

    def test_round_trip(self):
        run_config = parse_run_config(self.document)
        self.assertEqual(parse_run_config(dump_run_config(run_config)), run_config)
        print("✓ RunConfig -> JSON -> RunConfig is the identity")

    def test_defaults(self):
        run_config = parse_run_config({"profile": {"kind": "uniform", "n0": 1.3}})
        self.assertIsNone(run_config.initial)
        self.assertEqual(run_config.build_profile(), Uniform(1.3))
        self.assertEqual(run_config.integrator_config(), IntegratorConfig())

    def test_rejections(self):
        bad_documents = [
            dict(self.document, extra_key=1),
            dict(self.document, integrator={"rel_tol": -1e-10}),
            dict(self.document, integrator={"t_span": [5.0, 1.0]}),
            dict(self.document, profile={"kind": "lens"}),
            dict(self.document, profile={"kind": "uniform", "n0": 0.5}),
            dict(self.document, profile={"kind": "gaussian-ring", "base": 1.0, "amplitude": -2.0,
                                         "center": 2.0, "width": 1.0}),
            dict(self.document, initial={"x": [0.0, 0.0], "v": [1.0, 0.0, 0.0]}),
            dict(self.document, output={"format": "xml"}),
        ]
        for document in bad_documents:
            with self.assertRaises(ConfigError):
                parse_run_config(document)

    def test_load_from_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "run.json")
            with open(path, "w", encoding="utf-8") as fh:
                json.dump(self.document, fh)
            self.assertIsInstance(load_run_config(path), RunConfig)
            with open(path, "w", encoding="utf-8") as fh:
                fh.write("{not json")
            with self.assertRaises(ConfigError):
                load_run_config(path)
            with self.assertRaises(ConfigError):
                load_run_config(os.path.join(tmp, "missing.json"))

    def test_sample_configs_are_valid(self):
        names = sorted(os.listdir(CONFIG_DIR))
        self.assertGreater(len(names), 0)
        for name in names:
            run_config = load_run_config(os.path.join(CONFIG_DIR, name))
            self.assertIsNotNone(run_config.initial)
            run_config.build_profile()


class TestTrajectoryFiles(unittest.TestCase):

    def setUp(self):
        cfg = IntegratorConfig(t_span=(0.0, 2.0), sample_every=0.5)
        self.trajectory = dynamics.integrate(GaussianMirage(0.5, 2.0), [1.0, 0.0, 0.5], [0.0, 0.6, 0.2], cfg)
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def test_csv_round_trip(self):
        path = trajectory_io.write_trajectory_csv(self.trajectory, os.path.join(self.tmp.name, "run.csv"))
        with open(path, encoding="utf-8") as fh:
            self.assertEqual(fh.readline().strip(), "t,x1,x2,x3,v1,v2,v3,energy")
        frame = trajectory_io.read_trajectory_csv(path)
        self.assertEqual(len(frame), len(self.trajectory))
        np.testing.assert_array_equal(frame[["x1", "x2", "x3"]].values, self.trajectory.x)
        np.testing.assert_array_equal(frame["energy"].values, self.trajectory.energy)

    def test_csv_is_bit_stable(self):
        cfg = IntegratorConfig(t_span=(0.0, 2.0), sample_every=0.5)
        again = dynamics.integrate(GaussianMirage(0.5, 2.0), [1.0, 0.0, 0.5], [0.0, 0.6, 0.2], cfg)
        self.assertEqual(trajectory_io.trajectory_to_csv(self.trajectory), trajectory_io.trajectory_to_csv(again))

    def test_json_document(self):
        document = json.loads(trajectory_io.trajectory_to_json(self.trajectory))
        self.assertEqual(document["columns"][0], "t")
        self.assertEqual(len(document["rows"]), len(self.trajectory))
        self.assertEqual(document["meta"]["profile"]["kind"], "gaussian-mirage")

    def test_malformed_csv(self):
        cases = {
            "header.csv": "t,x,y,z\n0,1,2,3\n",
            "empty.csv": "",
            "no_rows.csv": "t,x1,x2,x3,v1,v2,v3,energy\n",
            "text.csv": "t,x1,x2,x3,v1,v2,v3,energy\n0,a,0,0,0,0,0,0\n",
            "order.csv": "t,x1,x2,x3,v1,v2,v3,energy\n1,0,0,0,0,0,0,0\n0,0,0,0,0,0,0,0\n",
        }
        for name, text in cases.items():
            path = os.path.join(self.tmp.name, name)
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
            with self.assertRaises(ConfigError, msg=name):
                trajectory_io.read_trajectory_csv(path)
        with self.assertRaises(ConfigError):
            trajectory_io.read_trajectory_csv(os.path.join(self.tmp.name, "missing.csv"))

    def test_summary(self):
        result = trajectory_io.summary(self.trajectory)
        self.assertEqual(result["samples"], 5)
        self.assertFalse(result["truncated"])
        self.assertEqual(result["t_final"], 2.0)
        self.assertNotIn("error", trajectory_io.summary(self.trajectory))
        self.assertEqual(trajectory_io.summary(self.trajectory, error="boom")["error"], "boom")


if __name__ == "__main__":
    unittest.main()
