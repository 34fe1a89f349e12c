#!/usr/bin/env python3

import unittest
import os
import sys
import tempfile
import shutil
from unittest.mock import patch

# Add src directory to Python path
sys.path.append(os.path.join(os.path.dirname(os.path.dirname(__file__)), "src"))

from config import DEFAULT_REPORT_DB, Config, load_config
from errors import ValidationError

KEYS = ("PRIME", "MAX_GAMMA", "SEED", "REPORT_DB", "LOG_LEVEL")


class TestConfig(unittest.TestCase):
    def setUp(self):
        """Set up a temporary directory and a clean environment"""
        self.test_dir = tempfile.mkdtemp()
        self.env = patch.dict(os.environ, {}, clear=False)
        self.env.start()
        for key in KEYS:
            os.environ.pop(key, None)

    def tearDown(self):
        """Restore the environment"""
        self.env.stop()
        shutil.rmtree(self.test_dir)

    def write_env(self, text):
        path = os.path.join(self.test_dir, ".env")
        with open(path, "w") as f:
            f.write(text)
        return path

    def test_env_file(self):
        """Test that values come from an explicit .env file"""
        path = self.write_env("PRIME=7\nMAX_GAMMA=3\nSEED=11\nLOG_LEVEL=debug\n")
        config = load_config(path)
        self.assertEqual(config.prime, 7)
        self.assertEqual(config.max_gamma, 3)
        self.assertEqual(config.seed, 11)
        self.assertEqual(config.log_level, "DEBUG")
        self.assertEqual(config.report_db, DEFAULT_REPORT_DB)

    def test_missing_env_file(self):
        """Test that a named but missing .env file is an error"""
        with self.assertRaises(ValidationError):
            load_config(os.path.join(self.test_dir, "absent.env"))

    def test_bad_values(self):
        """Test that composite primes and non-integers are refused"""
        with self.assertRaises(ValidationError):
            load_config(self.write_env("PRIME=9\n"))
        os.environ.pop("PRIME", None)
        with self.assertRaises(ValidationError):
            load_config(self.write_env("SEED=x\n"))

    def test_override(self):
        """Test that command-line values win over the environment"""
        config = Config().override(prime=3, seed=4)
        self.assertEqual((config.prime, config.seed), (3, 4))
        base = Config()
        self.assertIs(base.override(), base)
        with self.assertRaises(ValidationError):
            Config().override(prime=4)
        with self.assertRaises(ValidationError):
            Config().override(max_gamma=1)


if __name__ == '__main__':
    unittest.main()
