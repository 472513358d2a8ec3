import json
import os
import shutil
import tempfile
import unittest

from sparselab import DomainError, RunConfig
from sparselab.config import load_config_file


class TestRunConfig(unittest.TestCase):
    def test_defaults_are_valid(self):
        config = RunConfig("verify").validate()
        self.assertEqual(config.seed, 0x5EED)
        self.assertEqual(config.n, [2, 4, 8, 16])
        self.assertNotIn("explicit", RunConfig.option_names())

    def test_rejects_bad_values(self):
        bad = [
            {"dim": 0},
            {"depth": -1},
            {"dim": 3, "depth": 9},
            {"p": 0.9},
            {"p": float("inf")},
            {"n": []},
            {"n": [2, 0]},
            {"gamma": 1.5},
            {"delta": [0.5, 0.0]},
            {"seed": -1},
            {"ensemble": "spiral"},
            {"format": "xml"},
        ]
        for options in bad:
            with self.subTest(options=options):
                with self.assertRaises(DomainError):
                    RunConfig("scaling", **options).validate()

    def test_unknown_subcommand(self):
        with self.assertRaises(DomainError):
            RunConfig("plot").validate()


class TestConfigFile(unittest.TestCase):
    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()
        self.path = os.path.join(self.temp_dir, "run.json")

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def write(self, text):
        with open(self.path, "w", encoding="utf-8") as fh:
            fh.write(text)

    def test_reads_known_keys(self):
        self.write(json.dumps({"depth": 5, "delta": [0.5]}))
        self.assertEqual(load_config_file(self.path), {"depth": 5, "delta": [0.5]})

    def test_unknown_keys(self):
        self.write(json.dumps({"depht": 5}))
        with self.assertRaises(DomainError):
            load_config_file(self.path)

    def test_not_an_object(self):
        self.write("[1, 2]")
        with self.assertRaises(DomainError):
            load_config_file(self.path)

    def test_invalid_json(self):
        self.write("{depth: 5")
        with self.assertRaises(DomainError):
            load_config_file(self.path)

    def test_missing_file(self):
        with self.assertRaises(DomainError):
            load_config_file(os.path.join(self.temp_dir, "absent.json"))
