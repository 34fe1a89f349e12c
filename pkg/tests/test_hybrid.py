#!/usr/bin/env python3

import unittest
import os
import sys
from dataclasses import replace

# Add src directory to Python path
sys.path.append(os.path.join(os.path.dirname(os.path.dirname(__file__)), "src"))

from diagram import extend_ind2
from errors import PreconditionError
from exactalg import is_invertible
from generators import gen_cube, gen_example01, gen_minimal
from hybrid import build_ledger, derived_k, expand, hybridize, verify_theorem_a
from poset import colim_label


class TestLedger(unittest.TestCase):
    def test_cube_kernels_are_all_shared(self):
        """Every kernel of H_0(111) is met by two incomparable vertices"""
        ledger = build_ledger(gen_cube(3, 1, 5), 0)
        self.assertEqual(ledger.verify(), [])
        self.assertEqual([e.stage for e in ledger.entries], [1, 2, 3])
        self.assertTrue(all(e.unique.shape[1] == 0 for e in ledger.entries))
        self.assertTrue(all(e.shared.dim == 1 for e in ledger.entries))

    def test_single_path_kernel_is_unique(self):
        """Along a single arrow the kernel has nothing to share"""
        d = gen_example01(2, 3).restrict(["alpha", "CL0"])
        ledger = build_ledger(d, 0)
        self.assertEqual(len(ledger.entries), 1)
        self.assertEqual(ledger.entries[0].unique.shape[1], 2)
        self.assertEqual(ledger.entries[0].shared.dim, 0)
        self.assertEqual(ledger.to_record()[0]["unique"], 2)


class TestHybridize(unittest.TestCase):
    def test_levels(self):
        """Each level raises k by one and reconstructs"""
        run = hybridize(gen_example01(1, 5), 1)
        self.assertEqual(run.hybrid.k, 1)
        self.assertEqual(len(run.levels), 1)
        step = run.levels[0]
        self.assertTrue(step.reconstruction.ok)
        self.assertEqual(step.expanded.k, 0)
        self.assertTrue(step.expanded.filtration())
        self.assertEqual(step.to_record()["k"], 1)

    def test_level_zero_is_the_minimal_model(self):
        """Hyb^0 has no formal part"""
        run = hybridize(gen_cube(2, 1, 3), 0)
        self.assertEqual(run.hybrid.k, 0)
        self.assertEqual(run.levels, [])

    def test_negative_levels(self):
        """Levels start at 0 for hybrids and at 1 for derived diagrams"""
        with self.assertRaises(PreconditionError):
            hybridize(gen_cube(2, 1, 3), -1)
        with self.assertRaises(PreconditionError):
            derived_k(gen_cube(2, 1, 3), 0)

    def test_expansion_reads_only_the_derived_diagram(self):
        """Dropping the chain-level source leaves the expansion unchanged"""
        g = derived_k(gen_cube(3, 1, 5), 1)
        full = expand(g)
        bare = expand(replace(g, source=None))
        self.assertEqual({o: c.dims for o, c in bare.diagram.objects.items()},
                         {o: c.dims for o, c in full.diagram.objects.items()})
        self.assertEqual(bare.ledger.to_record(), full.ledger.to_record())
        self.assertEqual(bare.ledger.to_record(), build_ledger(g.source, 0).to_record())

    def test_pushout_squares(self):
        """Each new pair value gives a commuting pushout square with the Mayer-Vietoris H_{k+1}"""
        step = hybridize(gen_example01(2, 5), 1).levels[0]
        self.assertEqual(len(step.pushouts), 1)
        square = step.pushouts[0]
        self.assertTrue(square.commutes)
        self.assertEqual(square.colimit, colim_label("alpha", ("CL0", "C'L0")))
        self.assertEqual((square.found, square.expected), (2, 2))
        self.assertEqual(step.to_record()["pushouts"][0]["found"], 2)
        cube = hybridize(gen_cube(3, 1, 3), 1).levels[0]
        self.assertEqual(len(cube.pushouts), 3)
        self.assertTrue(all(sq.ok and sq.found == 1 for sq in cube.pushouts))


class TestDerivedLevels(unittest.TestCase):
    def test_cube_first_level(self):
        """Der^1 of D³_V: every pair value vanishes"""
        g = derived_k(gen_cube(3, 1, 5), 1)
        values = g.all_pair_values()
        self.assertTrue(values)
        self.assertTrue(all(v.rank == 0 for v in values))

    def test_cube_second_level_sees_the_third_order_operation(self):
        """Der^2 of D³_V carries the order-3 operation 111 -> 000"""
        for p in (2, 5):
            g = derived_k(gen_cube(3, 1, p), 2)
            self.assertEqual(g.k, 1)
            ops = [op for op in g.higher if (op.alpha, op.beta) == ("111", "000")]
            self.assertEqual(len(ops), 1)
            self.assertEqual(ops[0].order, 3)
            self.assertEqual(ops[0].rank, 1)

    def test_ladder_top_level_is_an_isomorphism(self):
        """Der^n of M_n sends H_0(alpha) isomorphically onto H_n(omega) for n ≤ 5"""
        g = derived_k(gen_minimal(1, 2, 5), 1)
        self.assertEqual([v.rank for v in g.all_pair_values()], [2])
        for n in range(2, 6):
            g = derived_k(gen_minimal(n, 1, 5), n)
            self.assertEqual(g.k, n - 1)
            ops = [op for op in g.higher if (op.alpha, op.beta) == ("alpha", "omega")]
            self.assertEqual(len(ops), 1)
            self.assertEqual(ops[0].order, n + 1)
            self.assertTrue(is_invertible(ops[0].matrix, 5))

    def test_ladder_lower_levels_vanish(self):
        """Below the top level M_3 only has zero pair values and no higher operations"""
        for k in (1, 2):
            g = derived_k(gen_minimal(3, 1, 5), k)
            self.assertTrue(all(v.rank == 0 for v in g.all_pair_values()))
            self.assertEqual(g.higher, [])


class TestCertification(unittest.TestCase):
    def test_cube(self):
        """Hyb^k of D³_V recovers τ_k for k ≤ 3"""
        x = gen_cube(3, 1, 3)
        for k in (0, 1, 2, 3):
            report = verify_theorem_a(x, k)
            self.assertTrue(report.ok)
            self.assertEqual(report.problems, [])
            self.assertEqual(len(report.levels), k)

    def test_ladder(self):
        """Hyb^k of M_2 and M_3 recovers τ_k for k ≤ 3"""
        for n in (2, 3):
            x = gen_minimal(n, 1, 5)
            for k in (1, 2, 3):
                self.assertTrue(verify_theorem_a(x, k).ok)

    def test_colimits_match_the_fan_extension(self):
        """Every formal colimit of the expansion has the homology of the fan colimit of the input"""
        for x in (gen_cube(3, 1, 3), gen_minimal(2, 1, 5)):
            step = hybridize(x, 1).levels[0]
            extended, _ = extend_ind2(step.hybrid.source, step.expanded.index)
            for c in step.expanded.index.colimit_objects:
                for i in range(2):
                    self.assertEqual(step.expanded.diagram.objects[c].homology(i).dim,
                                     extended.objects[c].homology(i).dim)

    def test_square(self):
        """The standard and split squares are both certified at level 1"""
        for split in (False, True):
            report = verify_theorem_a(gen_example01(2, 5, split=split), 1)
            self.assertTrue(report.ok)
            self.assertGreater(report.checks, 0)
            self.assertEqual(report.to_record()["k"], 1)


if __name__ == '__main__':
    unittest.main()
