#!/usr/bin/env python3

import unittest
import os
import sys

import numpy as np

# Add src directory to Python path
sys.path.append(os.path.join(os.path.dirname(os.path.dirname(__file__)), "src"))

from errors import PreconditionError, ValidationError
from exactalg import (FieldSpec, Subspace, complement, image, intersect, inverse, is_invertible,
                      is_prime, kernel, matmul, preimage, quotient_basis, rank, rref_mod, solve,
                      subspace_sum)


class TestField(unittest.TestCase):
    def test_is_prime(self):
        """Primality on small values"""
        self.assertEqual([n for n in range(20) if is_prime(n)], [2, 3, 5, 7, 11, 13, 17, 19])

    def test_field_spec_rejects_composite(self):
        """FieldSpec refuses a non-prime characteristic"""
        with self.assertRaises(ValidationError):
            FieldSpec(6)
        self.assertEqual(FieldSpec(7).p, 7)


class TestRowReduction(unittest.TestCase):
    def test_rref_and_rank(self):
        """Rank depends on the characteristic"""
        a = np.array([[1, 1], [1, -1]], dtype=np.int64)
        self.assertEqual(rank(a, 2), 1)
        self.assertEqual(rank(a, 5), 2)
        r, pivots = rref_mod(a, 5)
        self.assertEqual(pivots, [0, 1])
        self.assertTrue(np.array_equal(r, np.eye(2, dtype=np.int64)))

    def test_rank_of_empty(self):
        """Empty matrices have rank 0"""
        self.assertEqual(rank(np.zeros((0, 3), dtype=np.int64), 3), 0)

    def test_solve_consistent_and_inconsistent(self):
        """solve returns a solution or None, never raises on inconsistency"""
        m = np.array([[1, 2], [2, 4]], dtype=np.int64)
        x = solve(m, np.array([3, 6]), 7)
        self.assertIsNotNone(x)
        self.assertTrue(np.array_equal(matmul(m, x.reshape(2, 1), 7).ravel(), [3, 6]))
        self.assertIsNone(solve(m, np.array([1, 0]), 7))

    def test_solve_wrong_length(self):
        """A target of the wrong length is a precondition error"""
        with self.assertRaises(PreconditionError):
            solve(np.eye(2, dtype=np.int64), np.array([1, 2, 3]), 5)

    def test_inverse(self):
        """inverse undoes matmul; singular matrices are refused"""
        a = np.array([[2, 1], [1, 1]], dtype=np.int64)
        self.assertTrue(np.array_equal(matmul(a, inverse(a, 3), 3), np.eye(2, dtype=np.int64)))
        self.assertFalse(is_invertible(np.array([[1, 1], [1, 1]]), 3))
        with self.assertRaises(PreconditionError):
            inverse(np.array([[1, 1], [1, 1]], dtype=np.int64), 3)


class TestSubspace(unittest.TestCase):
    def test_canonical_basis_is_generator_independent(self):
        """Different generating sets of one subspace give identical bases"""
        p = 5
        gens = np.array([[1, 0], [2, 1], [0, 3]], dtype=np.int64)
        other = np.array([[1, 2, 0], [3, 1, 1], [3, 1, 3]], dtype=np.int64)
        self.assertEqual(Subspace.span(gens, p), Subspace.span(other, p))
        self.assertTrue(np.array_equal(Subspace.span(gens, p).basis, Subspace.span(other, p).basis))

    def test_kernel_image_and_complement(self):
        """Rank-nullity and complement sizes"""
        p = 3
        m = np.array([[1, 2, 0, 1], [0, 0, 1, 1]], dtype=np.int64)
        self.assertEqual(kernel(m, p).dim + image(m, p).dim, 4)
        self.assertFalse(np.any(matmul(m, kernel(m, p).basis, p)))
        k = kernel(m, p)
        c = complement(k)
        self.assertEqual(k.dim + c.dim, 4)
        self.assertEqual(subspace_sum(k, c).dim, 4)
        self.assertEqual(intersect(k, c).dim, 0)

    def test_intersect_and_sum(self):
        """dim(A + B) + dim(A ∩ B) = dim A + dim B"""
        p = 7
        a = Subspace.span(np.array([[1, 0], [0, 1], [0, 0], [0, 0]]), p)
        b = Subspace.span(np.array([[0, 0], [1, 0], [0, 1], [0, 0]]), p)
        self.assertEqual(intersect(a, b).dim, 1)
        self.assertEqual(subspace_sum(a, b).dim, 3)
        self.assertTrue(intersect(a, b).contains(np.array([0, 1, 0, 0])))

    def test_quotient_basis(self):
        """quotient_basis completes a to b and needs a ⊆ b"""
        p = 2
        a = Subspace.span(np.array([[1], [1], [0]]), p)
        b = Subspace.full(3, p)
        extra = quotient_basis(a, b)
        self.assertEqual(extra.shape, (3, 2))
        self.assertEqual(subspace_sum(a, Subspace.span(extra, p)).dim, 3)
        with self.assertRaises(PreconditionError):
            quotient_basis(b, a)

    def test_preimage(self):
        """Preimage of a line under a projection"""
        p = 5
        m = np.array([[1, 0, 0], [0, 1, 0]], dtype=np.int64)
        line = Subspace.span(np.array([[1], [0]]), p)
        pre = preimage(m, line, p)
        self.assertEqual(pre.dim, 2)
        self.assertTrue(pre.contains(np.array([3, 0, 4])))
        self.assertFalse(pre.contains(np.array([0, 1, 0])))

    def test_coordinates_outside_subspace(self):
        """Coordinates of a vector outside the subspace are refused"""
        s = Subspace.span(np.array([[1], [0]]), 3)
        self.assertTrue(np.array_equal(s.coordinates(np.array([2, 0])), [2]))
        with self.assertRaises(PreconditionError):
            s.coordinates(np.array([0, 1]))

    def test_random_spans_fuzz(self):
        """Seeded fuzz: shuffled and recombined generators keep the canonical basis"""
        rng = np.random.default_rng(3)
        for _ in range(50):
            p = int(rng.choice([2, 3, 5, 7]))
            n = int(rng.integers(1, 6))
            gens = rng.integers(0, p, size=(n, 3), dtype=np.int64)
            mix = rng.integers(0, p, size=(3, 2), dtype=np.int64)
            more = np.concatenate([gens[:, ::-1], matmul(gens, mix, p)], axis=1)
            self.assertEqual(Subspace.span(gens, p), Subspace.span(more, p))


if __name__ == '__main__':
    unittest.main()
