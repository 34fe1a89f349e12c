#!/usr/bin/env python3

"""
Reading and writing diagram files.

A file is a JSON document with sections "field", "poset", "complexes", "maps" and the
optional "double" and "filtered". A double complex may carry "higher" components keyed "i>j" (i - j ≥ 2)
for filtered differentials that drop more than one column. Matrices are nested integer lists, row-major; a missing
differential or map component is zero. Maps are keyed by the Hasse cover "src<tgt" and degree.
"""

import json
import logging
import re
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from chain import ChainComplex, ChainMap
from diagram import Diagram
from errors import ValidationError
from exactalg import is_prime, zeros
from poset import Poset
from specseq import DoubleComplex, FilteredComplex

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DiagramFile:
    p: int
    diagram: Optional[Diagram] = None
    double: Optional[DoubleComplex] = None
    filtered: Optional[FilteredComplex] = None


def _line_of(text: str, needle: str, section: Optional[str] = None) -> Optional[int]:
    """1-based line of the first quoted occurrence of needle, after the section key when given"""
    start = 0
    if section is not None:
        head = re.search(re.escape(json.dumps(section)), text)
        start = head.end() if head else 0
    m = re.compile(re.escape(json.dumps(needle))).search(text, start)
    return text.count("\n", 0, m.start()) + 1 if m else None


_KINDS = {dict: "an object", list: "a list"}


def _where(text: str, section: str, label: Optional[str]) -> Optional[int]:
    return _line_of(text, label, section) if label else _line_of(text, section)


def _expect(raw, kind, *, what: str, section: str, label: Optional[str] = None, text: str):
    if not isinstance(raw, kind):
        raise ValidationError(f"{what} must be {_KINDS[kind]}", section=section, label=label,
                              line=_where(text, section, label))
    return raw


def _integer(raw, *, what: str, section: str, label: Optional[str] = None,
             degree: Optional[int] = None, text: str) -> int:
    if isinstance(raw, int) and not isinstance(raw, bool):
        return raw
    if isinstance(raw, str) and re.fullmatch(r"-?\d+", raw.strip()):
        return int(raw)
    raise ValidationError(f"{what} must be an integer, got {raw!r}", section=section, label=label,
                          degree=degree, line=_where(text, section, label))


def _matrix(raw, shape, *, section, label, degree, text) -> np.ndarray:
    try:
        m = np.asarray(raw, dtype=np.int64)
        if m.size == 0:
            m = m.reshape(shape)
    except (TypeError, ValueError) as e:
        raise ValidationError("Matrix entries must be integers", section=section, label=label,
                              degree=degree, line=_line_of(text, label, section)) from e
    if m.shape != tuple(shape):
        raise ValidationError(f"Matrix has shape {m.shape}, expected {tuple(shape)}", section=section,
                              label=label, degree=degree, line=_line_of(text, label, section))
    return m


def _complex(raw: Dict, p: int, *, section: str, label: str, text: str) -> ChainComplex:
    if not isinstance(raw, dict) or "dims" not in raw:
        raise ValidationError("Complex needs a 'dims' list", section=section, label=label,
                              line=_line_of(text, label, section))
    raw_dims = _expect(raw["dims"], list, what="'dims'", section=section, label=label, text=text)
    dims = [_integer(x, what="A dimension", section=section, label=label, degree=n, text=text)
            for n, x in enumerate(raw_dims)]
    if any(x < 0 for x in dims):
        raise ValidationError("Dimensions must be non-negative", section=section, label=label,
                              line=_line_of(text, label, section))
    diffs = {}
    raw_d = _expect(raw.get("d", {}), dict, what="'d'", section=section, label=label, text=text)
    for key, m in raw_d.items():
        n = _integer(key, what="A differential degree", section=section, label=label, text=text)
        if not 1 <= n < len(dims):
            raise ValidationError("Differential outside the complex", section=section, label=label,
                                  degree=n, line=_line_of(text, label, section))
        diffs[n] = _matrix(m, (dims[n - 1], dims[n]), section=section, label=label, degree=n, text=text)
    try:
        return ChainComplex.build(dims, diffs, p)
    except ValidationError as e:
        raise ValidationError(str(e), section=section, label=label, degree=e.degree,
                              line=_line_of(text, label, section)) from e


def _chain_map(raw: Dict, source: ChainComplex, target: ChainComplex, p: int, *, section: str,
               label: str, text: str) -> ChainMap:
    raw = _expect(raw, dict, what="A map", section=section, label=label, text=text)
    top = max(source.top, target.top)
    comps = []
    for n in range(top + 1):
        m = raw.get(str(n))
        shape = (target.dim(n), source.dim(n))
        comps.append(zeros(*shape) if m is None else
                     _matrix(m, shape, section=section, label=label, degree=n, text=text))
    try:
        return ChainMap(source, target, tuple(comps))
    except ValidationError as e:
        raise ValidationError(str(e), section=section, label=label, degree=e.degree,
                              line=_line_of(text, label, section)) from e


def parse(text: str, prime: Optional[int] = None) -> DiagramFile:
    """
    Parse a diagram file
    :param text: file contents
    :param prime: overrides the file's field characteristic
    :return: DiagramFile with whichever sections were present
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValidationError(f"Malformed file: {e.msg}", line=e.lineno) from e
    if not isinstance(doc, dict):
        raise ValidationError("File must hold a JSON object", line=1)

    raw_field = _expect(doc.get("field", {}), dict, what="Section 'field'", section="field", text=text)
    p = prime if prime is not None else raw_field.get("p")
    if p is None:
        raise ValidationError("Missing field characteristic", section="field", line=_line_of(text, "field"))
    p = _integer(p, what="Field characteristic", section="field", text=text)
    if not is_prime(p):
        raise ValidationError(f"Field characteristic {p} is not prime", section="field",
                              line=_line_of(text, "field"))

    diagram = None
    if "poset" in doc:
        raw_poset = _expect(doc["poset"], dict, what="Section 'poset'", section="poset", text=text)
        objects = _expect(raw_poset.get("objects", []), list, what="'objects'", section="poset", text=text)
        relations = _expect(raw_poset.get("relations", []), list, what="'relations'", section="poset",
                            text=text)
        for o in objects:
            if not isinstance(o, str):
                raise ValidationError(f"Object {o!r} is not a string label", section="poset",
                                      line=_line_of(text, "objects", "poset"))
        for r in relations:
            if not (isinstance(r, list) and len(r) == 2 and all(isinstance(x, str) for x in r)):
                raise ValidationError(f"Relation {r!r} is not a pair of labels", section="poset",
                                      line=_line_of(text, "relations", "poset"))
        index = Poset(tuple(objects), tuple(tuple(r) for r in relations))
        raw_complexes = _expect(doc.get("complexes", {}), dict, what="Section 'complexes'",
                                section="complexes", text=text)
        complexes = {}
        for o in index.objects:
            if o not in raw_complexes:
                raise ValidationError("Object has no complex", section="complexes", label=o,
                                      line=_line_of(text, o, "complexes"))
            complexes[o] = _complex(raw_complexes[o], p, section="complexes", label=o, text=text)
        raw_maps = _expect(doc.get("maps", {}), dict, what="Section 'maps'", section="maps", text=text)
        arrows = {}
        for a, b in index.covers:
            key = f"{a}<{b}"
            arrows[(a, b)] = _chain_map(raw_maps.get(key, {}), complexes[a], complexes[b], p,
                                        section="maps", label=key, text=text)
        extra = set(raw_maps) - {f"{a}<{b}" for a, b in index.covers}
        if extra:
            key = sorted(extra)[0]
            raise ValidationError("Map is not a Hasse cover of the poset", section="maps", label=key,
                                  line=_line_of(text, key, "maps"))
        diagram = Diagram(index, complexes, arrows, p)
        problems = diagram.validate()
        if problems:
            raise ValidationError(problems[0], section="maps", line=_line_of(text, "maps"))

    double = None
    if "double" in doc:
        raw = _expect(doc["double"], dict, what="Section 'double'", section="double", text=text)
        raw_columns = _expect(raw.get("columns", []), list, what="'columns'", section="double", text=text)
        columns = [_complex(c, p, section="double", label=f"column {i}", text=text)
                   for i, c in enumerate(raw_columns)]
        raw_horizontal = _expect(raw.get("horizontal", {}), dict, what="'horizontal'", section="double",
                                 text=text)
        maps = []
        for i in range(1, len(columns)):
            maps.append(_chain_map(raw_horizontal.get(str(i), {}), columns[i], columns[i - 1],
                                   p, section="double", label=str(i), text=text))
        higher = _longer_components(raw.get("higher", {}), columns, text)
        double = DoubleComplex(tuple(columns), tuple(maps), higher)

    filtered = None
    if "filtered" in doc:
        raw = _expect(doc["filtered"], dict, what="Section 'filtered'", section="filtered", text=text)
        raw_stages = _expect(raw.get("stages", []), list, what="'stages'", section="filtered", text=text)
        stages = [_complex(c, p, section="filtered", label=f"stage {i}", text=text)
                  for i, c in enumerate(raw_stages)]
        incs = _expect(raw.get("inclusions", []), list, what="'inclusions'", section="filtered", text=text)
        if len(incs) != max(len(stages) - 1, 0):
            raise ValidationError("Need one inclusion per consecutive pair of stages", section="filtered",
                                  line=_line_of(text, "filtered"))
        maps = [_chain_map(incs[i], stages[i], stages[i + 1], p, section="filtered", label=str(i), text=text)
                for i in range(len(incs))]
        filtered = FilteredComplex(tuple(stages), tuple(maps))

    if diagram is None and double is None and filtered is None:
        raise ValidationError("File has no poset, double or filtered section", line=1)
    logger.debug("Parsed file over F_%d", p)
    return DiagramFile(p, diagram, double, filtered)


def _longer_components(raw, columns, text: str) -> Dict:
    """'higher' maps "i>j" to per-degree matrices C_{i,q} -> C_{j,q+i-j-1}"""
    raw = _expect(raw, dict, what="'higher'", section="double", text=text)
    out = {}
    for key, comps in raw.items():
        m = re.fullmatch(r"(\d+)>(\d+)", key)
        if m is None or int(m.group(1)) - int(m.group(2)) < 2 or int(m.group(1)) >= len(columns):
            raise ValidationError("Longer component must be keyed 'i>j' with i - j ≥ 2", section="double",
                                  label=key, line=_line_of(text, key, "double"))
        col, low = int(m.group(1)), int(m.group(2))
        r = col - low
        comps = _expect(comps, dict, what="A longer component", section="double", label=key, text=text)
        out[(col, r)] = tuple(
            _matrix(comps[str(q)], (columns[low].dim(q + r - 1), columns[col].dim(q)), section="double",
                    label=key, degree=q, text=text)
            if str(q) in comps else zeros(columns[low].dim(q + r - 1), columns[col].dim(q))
            for q in range(columns[col].top + 1))
    return out


def load(path: str, prime: Optional[int] = None) -> DiagramFile:
    with open(path, "r", encoding="utf-8") as f:
        return parse(f.read(), prime)


def _complex_record(c: ChainComplex) -> Dict:
    record = {"dims": list(c.dims)}
    diffs = {str(n): c.diff(n).tolist() for n in range(1, c.top + 1) if np.any(c.diff(n))}
    if diffs:
        record["d"] = diffs
    return record


def _map_record(f: ChainMap) -> Dict:
    return {str(n): m.tolist() for n, m in enumerate(f.components) if np.any(m)}


def to_document(x: DiagramFile) -> Dict:
    doc: Dict = {"field": {"p": x.p}}
    if x.diagram is not None:
        d = x.diagram
        doc["poset"] = {"objects": list(d.index.objects), "relations": [list(c) for c in d.index.covers]}
        doc["complexes"] = {o: _complex_record(c) for o, c in d.objects.items()}
        doc["maps"] = {f"{a}<{b}": _map_record(f) for (a, b), f in d.arrows.items()}
    if x.double is not None:
        doc["double"] = {
            "columns": [_complex_record(c) for c in x.double.columns],
            "horizontal": {str(i + 1): _map_record(h) for i, h in enumerate(x.double.horizontal)},
        }
        if x.double.higher:
            doc["double"]["higher"] = {
                f"{col}>{col - r}": {str(q): m.tolist() for q, m in enumerate(comps) if np.any(m)}
                for (col, r), comps in sorted(x.double.higher.items())}
    if x.filtered is not None:
        doc["filtered"] = {
            "stages": [_complex_record(c) for c in x.filtered.stages],
            "inclusions": [_map_record(f) for f in x.filtered.inclusions],
        }
    return doc


def serialize(x) -> str:
    """Deterministic text for a DiagramFile, Diagram, DoubleComplex or FilteredComplex"""
    if isinstance(x, Diagram):
        x = DiagramFile(x.p, diagram=x)
    elif isinstance(x, DoubleComplex):
        x = DiagramFile(x.p, double=x)
    elif isinstance(x, FilteredComplex):
        x = DiagramFile(x.p, filtered=x)
    return json.dumps(to_document(x), sort_keys=True, indent=2) + "\n"


def save(x, path: str):
    with open(path, "w", encoding="utf-8") as f:
        f.write(serialize(x))
