#!/usr/bin/env python3

import unittest
import os
import sys

import numpy as np

# Add src directory to Python path
sys.path.append(os.path.join(os.path.dirname(os.path.dirname(__file__)), "src"))

from chain import (ChainComplex, ChainMap, compose, cone, conn_cover, direct_sum, disk,
                   double_mapping_cylinder, fiber, identity_map, induced_map, is_quasi_iso,
                   mapping_cylinder, sphere, split_spheres_disks, standard_form, suspend,
                   truncate, zero_map)
from errors import PreconditionError, ValidationError
from exactalg import matmul


def circle(p):
    """Two vertices, two edges: H_0 = H_1 = F_p"""
    return ChainComplex.build([2, 2], {1: np.array([[1, 1], [p - 1, p - 1]])}, p)


class TestChainComplex(unittest.TestCase):
    def test_build_rejects_nonzero_square(self):
        """d∘d ≠ 0 is a validation error naming the degree"""
        with self.assertRaises(ValidationError) as ctx:
            ChainComplex.build([1, 1, 1], {1: np.array([[1]]), 2: np.array([[1]])}, 3)
        self.assertEqual(ctx.exception.degree, 2)

    def test_build_rejects_bad_shape(self):
        """A differential of the wrong shape is refused"""
        with self.assertRaises(ValueError):
            ChainComplex.build([1, 2], {1: np.array([[1, 0, 0]])}, 3)

    def test_sphere_and_disk(self):
        """Spheres carry homology in one degree, disks are acyclic"""
        s = sphere(3, 2, 5)
        self.assertEqual(s.betti(), [0, 0, 3, 0])
        self.assertEqual(disk(2, 1, 5).betti(), [0, 0, 0, 0])
        with self.assertRaises(PreconditionError):
            sphere(-1, 0, 5)

    def test_circle_homology(self):
        """A small simplicial circle"""
        c = circle(3)
        self.assertEqual(c.homology(0).dim, 1)
        self.assertEqual(c.homology(1).dim, 1)
        self.assertEqual(c.euler_characteristic(), 0)

    def test_homology_projection_kills_boundaries(self):
        """Projecting a boundary gives zero coordinates"""
        c = direct_sum(disk(1, 0, 5), sphere(1, 0, 5))
        h = c.homology(0)
        self.assertEqual(h.dim, 1)
        boundary = matmul(c.diff(1), np.array([[1]]), 5)[:, 0]
        self.assertFalse(np.any(h.project(boundary)))
        with self.assertRaises(PreconditionError):
            c.homology(1).project(np.array([1]))

    def test_trimmed_and_same_as(self):
        """Trailing zero degrees do not change a complex"""
        a = sphere(1, 1, 2)
        self.assertTrue(a.same_as(a.padded(4)))
        self.assertEqual(a.padded(4).trimmed().dims, (0, 1))


class TestChainMaps(unittest.TestCase):
    def test_map_must_commute(self):
        """Non-chain maps are refused"""
        d = disk(1, 0, 3)
        with self.assertRaises(ValidationError):
            ChainMap(d, d, (np.array([[1]]), np.array([[2]])))

    def test_induced_map_scales(self):
        """Multiplication by 2 on a sphere induces 2 on homology"""
        s = sphere(2, 1, 5)
        f = ChainMap(s, s, (np.zeros((0, 0), dtype=np.int64), 2 * np.eye(2, dtype=np.int64)))
        self.assertTrue(np.array_equal(induced_map(f, 1), 2 * np.eye(2, dtype=np.int64)))
        self.assertTrue(is_quasi_iso(f))

    def test_compose(self):
        """compose(f, g) is g ∘ f"""
        s = sphere(1, 0, 7)
        f = ChainMap(s, s, (np.array([[3]]),))
        g = ChainMap(s, s, (np.array([[5]]),))
        self.assertEqual(int(compose(f, g).component(0)[0, 0]), 1)

    def test_cone_of_identity_is_acyclic(self):
        """C(id) has no homology"""
        c = circle(5)
        self.assertEqual(cone(identity_map(c)).betti(), [0, 0, 0, 0])

    def test_suspension_shifts_homology(self):
        """Σ S^0 = S^1"""
        s = sphere(2, 0, 3)
        self.assertEqual(suspend(s).betti(), [0, 2, 0])
        self.assertEqual(suspend(s, 2).homology(2).dim, 2)

    def test_cone_long_exact_sequence(self):
        """dim H_k C(f) = dim coker H_k f + dim ker H_{k-1} f for the fold map"""
        s = sphere(1, 0, 5)
        two = direct_sum(s, s)
        fold = ChainMap(two, s, (np.array([[1, 1]]),))
        c = cone(fold)
        self.assertEqual(c.homology(0).dim, 0)
        self.assertEqual(c.homology(1).dim, 1)

    def test_mapping_cylinder(self):
        """The projection is a quasi-isomorphism and restricts to g on the source end"""
        s = sphere(1, 0, 5)
        g = ChainMap(s, circle(5), (np.array([[1], [0]]),))
        cyl = mapping_cylinder(g)
        self.assertTrue(is_quasi_iso(cyl.projection))
        back = compose(cyl.inclusion, cyl.projection)
        self.assertTrue(np.array_equal(back.component(0), g.component(0)))
        self.assertTrue(np.array_equal(compose(cyl.section, cyl.projection).component(0),
                                       np.eye(2, dtype=np.int64)))

    def test_double_mapping_cylinder(self):
        """The homotopy pushout of 0 <- S^0 -> 0 is S^1"""
        s = sphere(1, 0, 3)
        z = ChainComplex.zero(3)
        hp = double_mapping_cylinder(zero_map(s, z), zero_map(s, z))
        self.assertEqual(hp.betti(), [0, 1, 0])

    def test_double_mapping_cylinder_of_identities(self):
        """The homotopy pushout of S^0 <- S^0 -> S^0 along identities is S^0"""
        s = sphere(1, 0, 3)
        hp = double_mapping_cylinder(identity_map(s), identity_map(s))
        self.assertEqual(hp.homology(0).dim, 1)
        self.assertEqual(hp.homology(1).dim, 0)


class TestTruncationAndCovers(unittest.TestCase):
    def test_truncate(self):
        """τ_k keeps homology through degree k and kills it above"""
        c = direct_sum(sphere(1, 0, 5), sphere(2, 1, 5), sphere(1, 2, 5))
        t, proj = truncate(c, 1)
        self.assertEqual(t.betti(), [1, 2, 0])
        self.assertTrue(np.array_equal(induced_map(proj, 1), np.eye(2, dtype=np.int64)))
        with self.assertRaises(PreconditionError):
            truncate(c, -1)

    def test_conn_cover(self):
        """c⟨k⟩ keeps homology from degree k up"""
        c = direct_sum(sphere(1, 0, 5), disk(1, 0, 5), sphere(2, 2, 5))
        cover, incl = conn_cover(c, 1)
        self.assertEqual(cover.betti(), [0, 0, 2, 0])
        self.assertTrue(np.array_equal(induced_map(incl, 2), np.eye(2, dtype=np.int64)))

    def test_fiber_of_identity_is_acyclic(self):
        """Fib(id) has no homology"""
        c = sphere(1, 1, 5)
        fs = fiber(identity_map(c))
        self.assertTrue(all(b == 0 for b in fs.fiber.betti()))

    def test_fiber_of_map_to_zero(self):
        """Fib(A -> 0) is A"""
        a = direct_sum(sphere(1, 0, 3), sphere(2, 1, 3))
        fs = fiber(zero_map(a, ChainComplex.zero(3)))
        self.assertEqual(fs.fiber.betti(), [1, 2, 0])
        self.assertTrue(is_quasi_iso(fs.projection))


class TestSplitting(unittest.TestCase):
    def test_split_spheres_disks(self):
        """A disk plus a sphere splits into one of each"""
        c = direct_sum(disk(1, 0, 5), sphere(1, 1, 5))
        split = split_spheres_disks(c)
        self.assertEqual(split.summands, [("disk", 1, 0), ("sphere", 1, 1)])
        std = standard_form(c, split)
        self.assertEqual(std.betti(), c.betti())


if __name__ == '__main__':
    unittest.main()
