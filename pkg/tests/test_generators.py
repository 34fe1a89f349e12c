#!/usr/bin/env python3

import unittest
import os
import sys

import numpy as np

# Add src directory to Python path
sys.path.append(os.path.join(os.path.dirname(os.path.dirname(__file__)), "src"))

from errors import PreconditionError
from generators import (RANDOM_SHAPES, gen_cube, gen_example01, gen_fan, gen_minimal,
                        random_diagram, random_double_complex, random_filtered_complex)


class TestExamples(unittest.TestCase):
    def test_cube_homology(self):
        """K(V,0) at the minimum, K(V,n-1) at the maximum, contractible elsewhere"""
        for n in (1, 2, 3):
            d = gen_cube(n, 2, 3)
            self.assertEqual(len(d.index), 2 ** n)
            self.assertEqual(d.objects["1" * n].betti(0), [2])
            self.assertEqual(d.objects["0" * n].homology(n - 1).dim, 2)
            for v in d.index.objects:
                if v not in ("1" * n, "0" * n):
                    self.assertEqual(sum(d.objects[v].betti()), 0)
            self.assertEqual(d.validate(), [])

    def test_ladder_homology(self):
        """M_n: V in degree 0 at alpha, V in degree n at omega, cones in between"""
        d = gen_minimal(3, 2, 5)
        self.assertEqual(d.objects["alpha"].betti(), [2, 0])
        self.assertEqual(d.objects["omega"].homology(3).dim, 2)
        self.assertEqual(sum(d.objects["omega"].betti(2)), 0)
        for i in range(3):
            self.assertEqual(sum(d.objects[f"CL{i}"].betti()), 0)
            self.assertEqual(sum(d.objects[f"C'L{i}"].betti()), 0)
        self.assertEqual(d.validate(), [])

    def test_square_models(self):
        """Standard and split squares differ only at the top"""
        standard = gen_example01(1, 5)
        split = gen_example01(1, 5, split=True)
        self.assertEqual(standard.objects["omega"].betti(), [0, 1, 0])
        self.assertEqual(split.objects["beta"].betti(), [0, 1, 0])
        self.assertEqual(split.index.objects, ("alpha", "gamma", "delta", "beta"))

    def test_fan(self):
        """The top of a fan is the colimit of its legs"""
        d = gen_fan(3, 1, 1, 5)
        self.assertEqual(d.objects["b"].homology(2).dim, 2)
        with self.assertRaises(PreconditionError):
            gen_fan(1, 1, 0, 5)

    def test_bad_parameters(self):
        """Dimensions and sizes are checked"""
        with self.assertRaises(PreconditionError):
            gen_cube(0, 1, 5)
        with self.assertRaises(PreconditionError):
            gen_minimal(1, -1, 5)


class TestRandom(unittest.TestCase):
    def test_random_diagrams_are_valid(self):
        """Random diagrams commute on every shape"""
        rng = np.random.default_rng(5)
        for shape in sorted(RANDOM_SHAPES):
            d = random_diagram(rng, 3, shape=shape)
            self.assertEqual(d.validate(), [])
            self.assertEqual(d.index.objects, RANDOM_SHAPES[shape].objects)

    def test_random_double_and_filtered(self):
        """Random double and filtered complexes have the requested shape"""
        rng = np.random.default_rng(2)
        dc = random_double_complex(rng, 5, width=3, height=2)
        self.assertEqual(dc.width, 3)
        self.assertLessEqual(dc.height, 2)
        fc = random_filtered_complex(rng, 5, stages=3)
        self.assertEqual(len(fc.stages), 3)
        self.assertEqual(len(fc.inclusions), 2)


if __name__ == '__main__':
    unittest.main()
