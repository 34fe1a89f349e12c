#!/usr/bin/env python3

import unittest
import os
import sys

# Add src directory to Python path
sys.path.append(os.path.join(os.path.dirname(os.path.dirname(__file__)), "src"))

from checks import SUITES, run_suites
from errors import ValidationError


class TestSuites(unittest.TestCase):
    def test_small_runs_pass(self):
        """Every suite passes on a few seeded cases"""
        results = run_suites(seed=3, p=3, cases=3)
        self.assertEqual([r.name for r in results], list(SUITES))
        for r in results:
            self.assertTrue(r.ok, r.failures)
            self.assertGreater(r.cases, 0)

    def test_golden_counts_its_own_cases(self):
        """The golden suite ignores the case count"""
        (golden,) = run_suites(["golden"], cases=1)
        self.assertEqual(golden.cases, 6)
        self.assertEqual(golden.to_record()["ok"], True)

    def test_seed_is_reproducible(self):
        """The same seed gives the same case count"""
        a = run_suites(["complexes"], seed=9, p=2, cases=4)[0]
        b = run_suites(["complexes"], seed=9, p=2, cases=4)[0]
        self.assertEqual(a.cases, b.cases)

    def test_unknown_suite(self):
        """Unknown suite names are a validation error"""
        with self.assertRaises(ValidationError):
            run_suites(["nope"])


if __name__ == '__main__':
    unittest.main()
