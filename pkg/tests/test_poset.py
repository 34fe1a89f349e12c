#!/usr/bin/env python3

import unittest
import os
import sys
from itertools import combinations

# Add src directory to Python path
sys.path.append(os.path.join(os.path.dirname(os.path.dirname(__file__)), "src"))

from errors import PreconditionError, ValidationError
from poset import (PathObject, Poset, colim_label, cube_poset, derived_index, incomparable_families,
                   ind2_index, kernel_label, path_morphisms, validate_lattice)


def square():
    return Poset(("a", "g", "d", "b"), (("a", "g"), ("a", "d"), ("g", "b"), ("d", "b"), ("a", "b")))


def fan(m):
    gammas = tuple(f"g{i + 1}" for i in range(m))
    rels = [("a", g) for g in gammas] + [(g, "b") for g in gammas]
    return Poset(("a",) + gammas + ("b",), tuple(rels))


class TestPoset(unittest.TestCase):
    def test_covers_drop_transitive_relations(self):
        """a < b follows from a < g < b and is not a cover"""
        p = square()
        self.assertEqual(set(p.covers), {("a", "g"), ("a", "d"), ("g", "b"), ("d", "b")})
        self.assertTrue(p.leq("a", "b"))
        self.assertFalse(p.comparable("g", "d"))

    def test_cycle_is_rejected(self):
        """A relation cycle is not a partial order"""
        with self.assertRaises(ValidationError):
            Poset(("x", "y"), (("x", "y"), ("y", "x")))

    def test_unknown_object(self):
        """Relations naming unknown objects carry the label"""
        with self.assertRaises(ValidationError) as ctx:
            Poset(("x",), (("x", "z"),))
        self.assertEqual(ctx.exception.label, "z")

    def test_order_queries(self):
        """Levels, extrema, bounds and chains on the square"""
        p = square()
        self.assertEqual(p.levels(), {"a": 0, "g": 1, "d": 1, "b": 2})
        self.assertEqual(p.topological_order(), ["a", "g", "d", "b"])
        self.assertEqual(p.minima(), ["a"])
        self.assertEqual(p.maxima(), ["b"])
        self.assertEqual(p.minimal_upper_bounds(["g", "d"]), ["b"])
        self.assertEqual(len(p.chains()), 11)
        self.assertEqual(set(p.subposet(["a", "b"]).covers), {("a", "b")})

    def test_validate_lattice(self):
        """The distance filtration increases along covers"""
        info = validate_lattice(square())
        self.assertEqual(info.minima, ["a"])
        self.assertEqual(info.filtration["b"], 2)

    def test_cube_poset(self):
        """The 3-cube has 8 vertices, 12 covers, minimum 111 and maximum 000"""
        c = cube_poset(3)
        self.assertEqual(len(c), 8)
        self.assertEqual(len(c.covers), 12)
        self.assertEqual(c.minima(), ["111"])
        self.assertEqual(c.maxima(), ["000"])
        self.assertTrue(c.lt("110", "100"))
        with self.assertRaises(PreconditionError):
            cube_poset(0)


class TestFamilies(unittest.TestCase):
    def test_square_family(self):
        """The square has one incomparable pair, joined at b"""
        fams = incomparable_families(square(), "a")
        self.assertEqual(fams, [PathObject("a", ("g", "d"), "b")])
        self.assertEqual(incomparable_families(square(), "g"), [])

    def test_fan_families(self):
        """A fan of three legs has three pairs and one triple"""
        fams = incomparable_families(fan(3), "a")
        self.assertEqual([len(f.gammas) for f in fams], [2, 2, 2, 3])
        self.assertTrue(all(f.beta == "b" for f in fams))

    def test_max_gamma(self):
        """Families larger than max_gamma are left out"""
        fams = incomparable_families(fan(3), "a", max_gamma=2)
        self.assertEqual([len(f.gammas) for f in fams], [2, 2, 2])

    def test_cube_at_its_minimum(self):
        """At 111 the facet vertices give three pairs and one triple"""
        fams = incomparable_families(cube_poset(3), "111")
        self.assertEqual([f.gammas for f in fams],
                         [("110", "101"), ("110", "011"), ("101", "011"), ("110", "101", "011")])
        self.assertEqual([f.beta for f in fams], ["100", "010", "001", "000"])

    def test_all_antichains_above(self):
        """Without immediate, every antichain strictly above alpha is a family"""
        c = cube_poset(3)
        fams = incomparable_families(c, "111", immediate=False)
        self.assertEqual(len(fams), 11)
        self.assertIn(PathObject("111", ("010", "001"), "000"), fams)
        self.assertTrue(all(c.is_antichain(f.gammas) for f in fams))
        brute = [s for n in range(2, 7) for s in combinations(c.above("111"), n) if c.is_antichain(s)]
        self.assertEqual(len({f.gammas for f in fams}), len(brute))

    def test_path_morphisms(self):
        """Each gamma goes to the first gamma above it"""
        p = cube_poset(3)
        small = PathObject("111", ("110", "101"), "100")
        big = PathObject("111", ("100", "001"), "000")
        self.assertEqual(path_morphisms(p, small, big), {"110": "100", "101": "100"})
        self.assertIsNone(path_morphisms(p, big, small))


class TestIndices(unittest.TestCase):
    def test_derived_index_of_square(self):
        """One kernel object K(a;g,d) sitting under a and b"""
        idx = derived_index(square())
        label = kernel_label("a", ("g", "d"))
        self.assertEqual(list(idx.kernel_objects), [label])
        self.assertEqual(idx.kind(label), "kernel")
        self.assertEqual(idx.kind("a"), "base")
        self.assertTrue(idx.poset.leq(label, "a"))
        self.assertTrue(idx.poset.leq(label, "b"))
        self.assertEqual(idx.pullback_objects, {})

    def test_ind2_index_of_square(self):
        """The formal colimit of the fan sits above a, g, d and below b"""
        idx = ind2_index(square())
        label = colim_label("a", ("g", "d"))
        self.assertEqual(idx.fan(label), ["a", "g", "d"])
        for member in ("a", "g", "d"):
            self.assertTrue(idx.poset.lt(member, label))
        self.assertTrue(idx.poset.lt(label, "b"))


if __name__ == '__main__':
    unittest.main()
