#!/usr/bin/env python3

import unittest
import os
import sys

import numpy as np

# Add src directory to Python path
sys.path.append(os.path.join(os.path.dirname(os.path.dirname(__file__)), "src"))

from chain import ChainMap, disk, sphere
from derived import (eval_value, global_derived, inclusion_exclusion, interval_operation,
                     interval_operations, kernels, relative_nerve, value_of)
from diagram import Diagram
from errors import DerivedError, PreconditionError
from exactalg import is_invertible
from generators import gen_cube, gen_example01, gen_fan, gen_minimal
from poset import PathObject, Poset, kernel_label

STANDARD = PathObject("alpha", ("CL0", "C'L0"), "omega")
SPLIT = PathObject("alpha", ("gamma", "delta"), "beta")


def half_dead_square(p=5):
    """A class of S^0 that dies entering d but survives entering g"""
    index = Poset(("a", "g", "d", "b"), (("a", "g"), ("a", "d"), ("g", "b"), ("d", "b")))
    s, c = sphere(1, 0, p), disk(1, 0, p)
    one = (np.array([[1]]),)
    return Diagram(index, {"a": s, "g": s, "d": c, "b": c},
                   {("a", "g"): ChainMap(s, s, one), ("a", "d"): ChainMap(s, c, one),
                    ("g", "b"): ChainMap(s, c, one), ("d", "b"): ChainMap(c, c, one + one)}, p)


class TestPairValues(unittest.TestCase):
    def test_example01_ranks(self):
        """The pair value has rank dim V on the standard square and 0 on the split one"""
        for p in (2, 5):
            for dim_v in (1, 2, 3):
                standard = eval_value(gen_example01(dim_v, p), STANDARD, 0)
                split = eval_value(gen_example01(dim_v, p, split=True), SPLIT, 0)
                self.assertEqual(standard.rank, dim_v)
                self.assertEqual(split.rank, 0)
                self.assertEqual(standard.kernel.dim, dim_v)
                self.assertEqual(standard.indeterminacy.dim, 0)

    def test_value_is_degree_one(self):
        """The value is a graded map of shift +1"""
        v = eval_value(gen_example01(2, 3), STANDARD, 0)
        self.assertEqual(v.value.shifts, [1])
        self.assertEqual(v.to_record()["rank"], 2)

    def test_value_of_single_class(self):
        """value_of agrees with the matrix column"""
        d = gen_example01(2, 5)
        v = eval_value(d, STANDARD, 0)
        x = v.kernel.basis[:, 0]
        self.assertTrue(np.array_equal(value_of(d, STANDARD, 0, x), v.matrix[:, 0]))

    def test_class_that_survives(self):
        """A class not dying at both gammas is refused"""
        d = half_dead_square()
        with self.assertRaises(DerivedError):
            value_of(d, PathObject("a", ("g", "d"), "b"), 0, np.array([1]))
        self.assertEqual(eval_value(d, PathObject("a", ("g", "d"), "b"), 0).kernel.dim, 0)

    def test_pair_preconditions(self):
        """eval_value needs exactly two incomparable gammas and a join"""
        d = gen_example01(1, 5)
        with self.assertRaises(PreconditionError):
            eval_value(d, PathObject("alpha", ("CL0", "C'L0")), 0)
        with self.assertRaises(PreconditionError):
            eval_value(d, PathObject("alpha", ("alpha", "CL0"), "omega"), 0)

    def test_kernels(self):
        """Kernels of the square and their monotonicity"""
        kf = kernels(gen_example01(2, 5), "alpha", 0)
        self.assertEqual(kf.of(("CL0",)).dim, 2)
        self.assertEqual(kf.of(("CL0", "C'L0")).dim, 2)
        self.assertTrue(kf.is_monotone())
        with self.assertRaises(PreconditionError):
            kf.of(("omega",))


class TestCubes(unittest.TestCase):
    def test_first_level_values_vanish_on_cube(self):
        """All pair values of D³_V land in zero groups"""
        for p in (2, 5):
            g = global_derived(gen_cube(3, 1, p))
            values = g.all_pair_values()
            self.assertTrue(values)
            self.assertTrue(all(v.rank == 0 for v in values))

    def test_third_order_operation_on_cube(self):
        """The order-3 operation from 111 to 000 is an isomorphism V -> H_2"""
        for dim_v in (1, 2):
            ops = interval_operation(gen_cube(3, dim_v, 5), "111", "000", 0, 3)
            self.assertEqual(len(ops), 1)
            self.assertEqual(ops[0].domain.dim, dim_v)
            self.assertEqual(ops[0].target_degree, 2)
            self.assertTrue(is_invertible(ops[0].matrix, 5))

    def test_ladder_operations(self):
        """On M_n only the order n+1 operation from alpha reaches H_n(omega)"""
        for n in (2, 3):
            d = gen_minimal(n, 1, 3)
            ops = interval_operation(d, "alpha", "omega", 0, n + 1)
            self.assertEqual(len(ops), 1)
            self.assertEqual(ops[0].rank, 1)
            lower = [op for op in interval_operations(d, n, min_order=2) if op.order <= n]
            self.assertEqual(lower, [])

    def test_ladder_pair_values_vanish(self):
        """Der^1 of M_2 has only zero pair values"""
        g = global_derived(gen_minimal(2, 1, 5))
        values = g.all_pair_values()
        self.assertTrue(values)
        self.assertTrue(all(v.rank == 0 for v in values))

    def test_relative_nerve_of_square(self):
        """[a, b) modulo (a, b) is a circle's worth of chains"""
        index = Poset(("a", "g", "d", "b"), (("a", "g"), ("a", "d"), ("g", "b"), ("d", "b")))
        nerve, by_length = relative_nerve(index, "a", "b", 5)
        self.assertEqual(nerve.dims, (1, 2))
        self.assertEqual(by_length[1], [("a", "g"), ("a", "d")])
        self.assertEqual(nerve.homology(1).dim, 1)

    def test_interval_operation_matches_pair_value(self):
        """Order 2 on the square reproduces eval_value up to sign"""
        d = gen_example01(2, 5)
        ops = interval_operation(d, "alpha", "omega", 0, 2)
        self.assertEqual(len(ops), 1)
        self.assertEqual(ops[0].rank, eval_value(d, STANDARD, 0).rank)


class TestFans(unittest.TestCase):
    def test_uniform_fans_are_exact(self):
        """Inclusion–exclusion is exact and H_{k+1} of the colimit is (m-1)·dim K"""
        for p in (2, 3, 5):
            for m in (2, 3, 4):
                gammas = tuple(f"g{i + 1}" for i in range(m))
                pd = inclusion_exclusion(gen_fan(m, 2, 1, p), PathObject("a", gammas, "b"), 1)
                self.assertTrue(pd.exact)
                self.assertEqual(pd.defect, 0)
                self.assertEqual(pd.hocolim_dim, (m - 1) * 2)
                self.assertEqual(len(pd.values), m * (m - 1) // 2)

    def test_fan_needs_a_join(self):
        """A family without an upper bound is refused"""
        with self.assertRaises(PreconditionError):
            inclusion_exclusion(gen_fan(3, 1, 0, 5), PathObject("a", ("g1", "g2")), 0)

    def test_global_derived_of_square(self):
        """One kernel object carrying the rank dim V value"""
        g = global_derived(gen_example01(2, 5))
        label = kernel_label("alpha", ("CL0", "C'L0"))
        self.assertEqual(list(g.pair_values), [label])
        self.assertEqual(g.pair_values[label][0].rank, 2)
        self.assertEqual(g.diagram.values[label].dims, (2,))
        self.assertEqual(g.to_record()["k"], 0)

    def test_global_derived_of_fan(self):
        """A three-legged fan records its inclusion–exclusion"""
        g = global_derived(gen_fan(3, 1, 0, 5))
        self.assertEqual(len(g.partials), 1)
        self.assertTrue(g.partials[0].exact)

    def test_fan_kernel_keeps_every_pair_value(self):
        """K(a;g1,g2,g3) records all three pair values and they add up along the fan"""
        p = 5
        g = global_derived(gen_fan(3, 1, 0, p))
        label = kernel_label("a", ("g1", "g2", "g3"))
        found = {v.gammas: v for v in g.fan_values[label]}
        self.assertEqual(set(found), {("g1", "g2"), ("g1", "g3"), ("g2", "g3")})
        self.assertTrue(all(v.rank == 1 and v.beta == "b" for v in found.values()))
        total = (found[("g1", "g2")].matrix + found[("g2", "g3")].matrix) % p
        self.assertTrue(np.array_equal(total, found[("g1", "g3")].matrix))
        edge = g.diagram.edges[(label, "b")].component(1, 0)
        self.assertTrue(np.array_equal(edge, found[("g1", "g2")].matrix))
        self.assertIn(label, g.to_record()["fan_values"])


if __name__ == '__main__':
    unittest.main()
