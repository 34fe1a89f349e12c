#!/usr/bin/env python3

import unittest
import os
import sys
import json
import tempfile
import shutil

import numpy as np

# Add src directory to Python path
sys.path.append(os.path.join(os.path.dirname(os.path.dirname(__file__)), "src"))

from chain import ChainComplex, ChainMap
from diagram_file import load, parse, save, serialize
from errors import ValidationError
from generators import gen_cube, gen_example01, random_double_complex
from specseq import FilteredComplex, filtered_to_cubes

SQUARE = """{
  "field": {"p": 3},
  "poset": {"objects": ["a", "b"], "relations": [["a", "b"]]},
  "complexes": {
    "a": {"dims": [1]},
    "b": {"dims": [1, 1], "d": {"1": [[1]]}}
  },
  "maps": {"a<b": {"0": [[1]]}}
}
"""


class TestParse(unittest.TestCase):
    def test_parse_small_diagram(self):
        """A point including into an interval"""
        x = parse(SQUARE)
        self.assertEqual(x.p, 3)
        self.assertEqual(x.diagram.objects["b"].betti(), [0, 0, 0])
        self.assertIsNone(x.double)
        self.assertIsNone(x.filtered)

    def test_prime_override(self):
        """--prime replaces the file's characteristic"""
        self.assertEqual(parse(SQUARE, prime=5).p, 5)
        with self.assertRaises(ValidationError):
            parse(SQUARE, prime=4)

    def test_malformed_json_reports_line(self):
        """JSON errors carry the line number"""
        with self.assertRaises(ValidationError) as ctx:
            parse('{\n  "field": {"p": 3},\n  oops\n}')
        self.assertEqual(ctx.exception.line, 3)

    def test_wrong_shape_names_the_object(self):
        """A differential of the wrong shape names its object and line"""
        bad = SQUARE.replace('"d": {"1": [[1]]}', '"d": {"1": [[1, 0]]}')
        with self.assertRaises(ValidationError) as ctx:
            parse(bad)
        self.assertEqual(ctx.exception.section, "complexes")
        self.assertEqual(ctx.exception.label, "b")
        self.assertEqual(ctx.exception.degree, 1)
        self.assertEqual(ctx.exception.line, 6)

    def test_map_must_be_a_cover(self):
        """Maps keyed by a non-cover are refused"""
        doc = json.loads(SQUARE)
        doc["maps"]["b<a"] = {}
        with self.assertRaises(ValidationError) as ctx:
            parse(json.dumps(doc))
        self.assertEqual(ctx.exception.label, "b<a")

    def test_missing_complex(self):
        """Every object needs a complex"""
        doc = json.loads(SQUARE)
        del doc["complexes"]["a"]
        with self.assertRaises(ValidationError) as ctx:
            parse(json.dumps(doc))
        self.assertEqual(ctx.exception.label, "a")

    def test_non_chain_map(self):
        """A map that does not commute with d is refused"""
        doc = json.loads(SQUARE)
        doc["complexes"]["a"] = {"dims": [1, 1], "d": {"1": [[1]]}}
        doc["maps"]["a<b"] = {"0": [[1]], "1": [[2]]}
        with self.assertRaises(ValidationError):
            parse(json.dumps(doc))

    def test_empty_file(self):
        """A file with only a field section has nothing to compute"""
        with self.assertRaises(ValidationError):
            parse('{"field": {"p": 2}}')
        with self.assertRaises(ValidationError):
            parse('{"poset": {"objects": []}}')

    def test_sections_must_be_objects(self):
        """A section of the wrong JSON type is refused with its position"""
        with self.assertRaises(ValidationError) as ctx:
            parse('{"field": 5, "poset": {"objects": ["a"]}, "complexes": {"a": {"dims": [1]}}}')
        self.assertEqual(ctx.exception.section, "field")
        self.assertEqual(ctx.exception.line, 1)
        doc = json.loads(SQUARE)
        doc["poset"] = []
        with self.assertRaises(ValidationError) as ctx:
            parse(json.dumps(doc))
        self.assertEqual(ctx.exception.section, "poset")
        doc = json.loads(SQUARE)
        doc["maps"]["a<b"] = [[1]]
        with self.assertRaises(ValidationError) as ctx:
            parse(json.dumps(doc))
        self.assertEqual(ctx.exception.label, "a<b")

    def test_integers_are_checked(self):
        """Non-integer characteristics and dimensions are refused with their line"""
        with self.assertRaises(ValidationError) as ctx:
            parse(SQUARE.replace('"p": 3', '"p": "x"'))
        self.assertEqual(ctx.exception.section, "field")
        self.assertEqual(ctx.exception.line, 2)
        with self.assertRaises(ValidationError):
            parse(SQUARE.replace('"p": 3', '"p": true'))
        with self.assertRaises(ValidationError) as ctx:
            parse(SQUARE.replace('"a": {"dims": [1]}', '"a": {"dims": ["x"]}'))
        self.assertEqual(ctx.exception.section, "complexes")
        self.assertEqual(ctx.exception.label, "a")
        self.assertEqual(ctx.exception.line, 5)
        with self.assertRaises(ValidationError):
            parse(SQUARE.replace('"a": {"dims": [1]}', '"a": {"dims": 1}'))
        with self.assertRaises(ValidationError) as ctx:
            parse(SQUARE.replace('"d": {"1": [[1]]}', '"d": {"one": [[1]]}'))
        self.assertEqual(ctx.exception.label, "b")

    def test_relations_are_pairs(self):
        """Relations must be pairs of object labels"""
        doc = json.loads(SQUARE)
        doc["poset"]["relations"] = [["a", "b", "c"]]
        with self.assertRaises(ValidationError) as ctx:
            parse(json.dumps(doc))
        self.assertEqual(ctx.exception.section, "poset")


class TestSerialize(unittest.TestCase):
    def setUp(self):
        """Set up a temporary directory"""
        self.test_dir = tempfile.mkdtemp()

    def tearDown(self):
        """Clean up test environment"""
        shutil.rmtree(self.test_dir)

    def test_serialize_is_deterministic(self):
        """Two generations of the same example give identical text"""
        self.assertEqual(serialize(gen_cube(3, 1, 2)), serialize(gen_cube(3, 1, 2)))

    def test_save_and_load_diagram(self):
        """A saved example reloads with the same homology"""
        path = os.path.join(self.test_dir, "square.json")
        d = gen_example01(2, 5)
        save(d, path)
        back = load(path).diagram
        self.assertEqual(back.index.objects, d.index.objects)
        for o in d.index.objects:
            self.assertEqual(back.objects[o].betti(), d.objects[o].betti())

    def test_double_section(self):
        """Double complexes keep their columns and horizontal maps"""
        dc = random_double_complex(np.random.default_rng(1), 3)
        back = parse(serialize(dc)).double
        self.assertEqual(back.width, dc.width)
        self.assertEqual(back.total().betti(), dc.total().betti())

    def test_longer_components_survive(self):
        """A column model with a component across two columns reloads with the same homology"""
        p = 5
        f0 = ChainComplex.build([0, 1], {}, p)
        f2 = ChainComplex.build([0, 1, 1], {2: np.array([[1]])}, p)
        empty = np.zeros((0, 0), dtype=np.int64)
        fc = FilteredComplex((f0, f0, f2), (ChainMap(f0, f0, (empty, np.array([[1]]))),
                                            ChainMap(f0, f2, (empty, np.array([[1]])))))
        dc, _ = filtered_to_cubes(fc, 2)
        doc = json.loads(serialize(dc))
        self.assertEqual(doc["double"]["higher"], {"2>0": {"0": [[1]]}})
        back = parse(serialize(dc)).double
        self.assertEqual(set(back.higher), {(2, 2)})
        self.assertEqual(back.total().betti(), dc.total().betti())

    def test_longer_component_key(self):
        """Longer components must drop at least two columns"""
        doc = json.loads(serialize(random_double_complex(np.random.default_rng(1), 3)))
        doc["double"]["higher"] = {"1>0": {}}
        with self.assertRaises(ValidationError) as ctx:
            parse(json.dumps(doc))
        self.assertEqual(ctx.exception.label, "1>0")


if __name__ == '__main__':
    unittest.main()
