#!/usr/bin/env python3

"""Example diagrams: Koszul cubes, the M_n ladder, Example 0.1 squares, fans, and seeded random inputs."""

import logging
from itertools import combinations
from typing import Dict, List, Optional, Tuple

import numpy as np

from chain import ChainComplex, ChainMap, compose, direct_sum, disk, sphere
from diagram import Diagram, colimit_over, truncate_diagram
from errors import PreconditionError
from exactalg import identity, inverse, is_invertible, kernel, matmul, vstack, zeros
from poset import Poset, cube_poset
from specseq import DoubleComplex, FilteredComplex

logger = logging.getLogger(__name__)


def _block_identity(dimV: int, rows: List, cols: List) -> np.ndarray:
    """Inclusion between two bases of labelled V-blocks: block j of cols goes to its label in rows"""
    out = zeros(len(rows) * dimV, len(cols) * dimV)
    where = {label: i for i, label in enumerate(rows)}
    for j, label in enumerate(cols):
        i = where[label]
        out[i * dimV:(i + 1) * dimV, j * dimV:(j + 1) * dimV] = identity(dimV)
    return out


def _cube_cells(n: int, ones: str) -> List[List[Tuple[int, ...]]]:
    """Per degree, the subsets S of the free coordinates spanning X(vertex)"""
    free = [i for i in range(n) if ones[i] == "0"]
    cells = [list(combinations(free, j)) for j in range(len(free) + 1)]
    if len(free) == n:
        cells = cells[:n]
    return cells


def gen_cube(n: int, dimV: int, p: int) -> Diagram:
    """
    D^n_V on the n-cube. The vertex with zero set A is the Koszul complex on the coordinates
    outside A: K(V, 0) at 11…1, contractible in between, and the boundary ≃ K(V, n-1) at 00…0.
    All maps are inclusions.
    """
    if n < 1 or dimV < 0:
        raise PreconditionError(f"gen_cube needs n ≥ 1 and dimV ≥ 0, got n={n}, dimV={dimV}")
    index = cube_poset(n)
    cells = {v: _cube_cells(n, v) for v in index.objects}
    objects = {}
    for v, per in cells.items():
        dims = [len(c) * dimV for c in per]
        diffs = {}
        for j in range(1, len(per)):
            block = zeros(dims[j - 1], dims[j])
            where = {s: i for i, s in enumerate(per[j - 1])}
            for col, s in enumerate(per[j]):
                for pos, i in enumerate(s):
                    face = s[:pos] + s[pos + 1:]
                    row = where[face]
                    block[row * dimV:(row + 1) * dimV, col * dimV:(col + 1) * dimV] = \
                        ((-1) ** pos * identity(dimV)) % p
            diffs[j] = block
        objects[v] = ChainComplex.build(dims, diffs, p)
    arrows = {}
    for a, b in index.covers:
        comps = tuple(_block_identity(dimV, cells[b][j], cells[a][j]) for j in range(len(cells[a])))
        arrows[(a, b)] = ChainMap(objects[a], objects[b], comps)
    logger.debug("Generated D^%d with dim V = %d", n, dimV)
    return Diagram(index, objects, arrows, p)


def _ladder(k: int, dimV: int, p: int, extra: bool) -> ChainComplex:
    """
    L^k: V in degree 0, V(i) ⊕ V'(i) in degrees 1..k, d(a, b) = z(a + b) with z(c) = (c, -c).
    With extra, one more V in degree k+1 bounding z(c): the cone CL^k.
    """
    dims = [dimV] + [2 * dimV] * k + ([dimV] if extra else [])
    I = identity(dimV)
    z_first = np.hstack([I, I]) if dimV else zeros(dimV, 2 * dimV)
    z_next = np.vstack([np.hstack([I, I]), np.hstack([-I, -I])]) % p if dimV else zeros(2 * dimV, 2 * dimV)
    diffs = {}
    for i in range(1, k + 1):
        diffs[i] = z_first if i == 1 else z_next
    if extra:
        diffs[k + 1] = I if k == 0 else np.vstack([I, -I]) % p
    return ChainComplex.build(dims, diffs, p)


def _ladder_map(source: ChainComplex, target: ChainComplex, top: int, block: Optional[int],
                dimV: int) -> ChainMap:
    """Identity through degree `top`; the cone cell in degree top+1 goes to V (block 0) or V' (block 1)"""
    comps = [identity(source.dim(n)) for n in range(top + 1)]
    if block is not None:
        cell = zeros(target.dim(top + 1), dimV)
        cell[block * dimV:(block + 1) * dimV] = identity(dimV)
        comps.append(cell)
    return ChainMap(source, target, tuple(comps))


def gen_minimal(n: int, dimV: int, p: int) -> Diagram:
    """
    M_n: alpha = L^0 below the cones CL^i, C'L^i on each level i < n, all below omega = L^n.
    Every object of level i maps to both of level i+1; the maps are inclusions.
    """
    if n < 1 or dimV < 0:
        raise PreconditionError(f"gen_minimal needs n ≥ 1 and dimV ≥ 0, got n={n}, dimV={dimV}")
    levels = [(f"CL{i}", f"C'L{i}") for i in range(n)]
    objects = {"alpha": _ladder(0, dimV, p, False), "omega": _ladder(n, dimV, p, False)}
    for i, (c, c2) in enumerate(levels):
        objects[c] = _ladder(i, dimV, p, True)
        objects[c2] = _ladder(i, dimV, p, True)
    arrows = {}
    for c in levels[0]:
        arrows[("alpha", c)] = _ladder_map(objects["alpha"], objects[c], 0, None, dimV)
    for i in range(n - 1):
        for src, block in zip(levels[i], (0, 1)):
            for tgt in levels[i + 1]:
                arrows[(src, tgt)] = _ladder_map(objects[src], objects[tgt], i, block, dimV)
    for src, block in zip(levels[n - 1], (0, 1)):
        arrows[(src, "omega")] = _ladder_map(objects[src], objects["omega"], n - 1, block, dimV)
    names = ["alpha"] + [o for pair in levels for o in pair] + ["omega"]
    index = Poset(tuple(names), tuple(arrows))
    logger.debug("Generated M_%d with dim V = %d", n, dimV)
    return Diagram(index, objects, arrows, p)


def gen_example01(dimV: int, p: int, split: bool = False) -> Diagram:
    """
    The square alpha < gamma, delta < beta with alpha = K(V, 0) and both gammas coning it off.
    Standard: beta is the pushout, so H_1(beta) = V is hit by the pair class.
    Split: beta = CK(V, 0) ⊕ K(V, 1) with both cones landing on the same disk.
    """
    if dimV < 0:
        raise PreconditionError(f"dimV must be ≥ 0, got {dimV}")
    if not split:
        return gen_minimal(1, dimV, p)
    index = Poset(("alpha", "gamma", "delta", "beta"),
                  (("alpha", "gamma"), ("alpha", "delta"), ("gamma", "beta"), ("delta", "beta")))
    a = sphere(dimV, 0, p)
    cone = disk(dimV, 0, p)
    beta = direct_sum(cone, sphere(dimV, 1, p))
    into_disk = ChainMap(a, cone, (identity(dimV),))
    to_beta = ChainMap(cone, beta, tuple(vstack([identity(cone.dim(n)), zeros(beta.dim(n) - cone.dim(n),
                                                                              cone.dim(n))], cone.dim(n))
                                         for n in range(2)))
    objects = {"alpha": a, "gamma": cone, "delta": cone, "beta": beta}
    arrows = {("alpha", "gamma"): into_disk, ("alpha", "delta"): into_disk,
              ("gamma", "beta"): to_beta, ("delta", "beta"): to_beta}
    return Diagram(index, objects, arrows, p)


def gen_fan(m: int, dimK: int, k: int, p: int) -> Diagram:
    """K(K, k) below m cones on it, all below their colimit"""
    if m < 2 or dimK < 0 or k < 0:
        raise PreconditionError(f"gen_fan needs m ≥ 2, dimK ≥ 0 and k ≥ 0, got {m}, {dimK}, {k}")
    gammas = [f"g{i + 1}" for i in range(m)]
    base = sphere(dimK, k, p)
    cone = disk(dimK, k, p)
    leg = ChainMap(base, cone, tuple(identity(base.dim(n)) for n in range(k + 1)))
    fan_index = Poset(tuple(["a"] + gammas), tuple(("a", g) for g in gammas))
    fan = Diagram(fan_index, {"a": base, **{g: cone for g in gammas}},
                  {("a", g): leg for g in gammas}, p)
    col = colimit_over(fan, fan_index.objects)
    index = Poset(tuple(["a"] + gammas + ["b"]),
                  tuple([("a", g) for g in gammas] + [(g, "b") for g in gammas]))
    objects = {"a": base, "b": col.complex, **{g: cone for g in gammas}}
    arrows = {("a", g): leg for g in gammas}
    arrows.update({(g, "b"): col.legs[g] for g in gammas})
    return Diagram(index, objects, arrows, p)


RANDOM_SHAPES: Dict[str, Poset] = {
    "chain": Poset(("a", "b", "c"), (("a", "b"), ("b", "c"))),
    "square": Poset(("a", "g", "d", "b"), (("a", "g"), ("a", "d"), ("g", "b"), ("d", "b"))),
    "fan3": Poset(("a", "g1", "g2", "g3", "b"),
                  tuple([("a", g) for g in ("g1", "g2", "g3")] + [(g, "b") for g in ("g1", "g2", "g3")])),
    "cube": cube_poset(3),
}


def _random_invertible(rng: np.random.Generator, n: int, p: int) -> np.ndarray:
    while True:
        m = rng.integers(0, p, size=(n, n), dtype=np.int64)
        if is_invertible(m, p):
            return m


def _attach_cells(base: ChainComplex, rng: np.random.Generator, top: int, max_new: int,
                  start: int = 0) -> ChainComplex:
    """base plus random new cells in each degree from start on, each bounding a random cycle below"""
    p = base.p
    top = max(top, base.top)
    dims = [base.dim(n) for n in range(top + 1)]
    diffs = {n: base.diff(n) for n in range(1, top + 1)}
    for n in range(start, top + 1):
        extra = int(rng.integers(0, max_new + 1))
        if not extra:
            continue
        old = dims[n]
        dims[n] += extra
        if n >= 1:
            below = ChainComplex.build(dims[:n], {i: diffs[i] for i in range(1, n)}, p)
            cycles = kernel(below.diff(n - 1), p).basis
            coeffs = rng.integers(0, p, size=(cycles.shape[1], extra), dtype=np.int64)
            new_cols = matmul(cycles, coeffs, p) if cycles.shape[1] else zeros(dims[n - 1], extra)
            diffs[n] = np.hstack([diffs[n], new_cols])
        if n + 1 <= top:
            diffs[n + 1] = np.vstack([diffs[n + 1], zeros(extra, dims[n + 1])])
        logger.debug("Attached %d cells in degree %d on top of %d", extra, n, old)
    return ChainComplex.build(dims, diffs, p)


def random_diagram(rng: np.random.Generator, p: int, shape: Optional[str] = None, top: int = 2,
                   max_new: int = 2, truncate_prob: float = 0.5) -> Diagram:
    """
    A random diagram on one of RANDOM_SHAPES: each object is the colimit of everything below it
    plus random cells. With probability truncate_prob the result is truncated at a random
    degree, which usually destroys latching injectivity.
    """
    if shape is None:
        shape = str(rng.choice(sorted(RANDOM_SHAPES)))
    index = RANDOM_SHAPES[shape]
    objects: Dict[str, ChainComplex] = {}
    arrows: Dict[Tuple[str, str], ChainMap] = {}
    for y in index.topological_order():
        preds = index.below(y)
        sub = index.subposet(preds)
        partial = Diagram(sub, {o: objects[o] for o in preds}, {e: arrows[e] for e in sub.covers}, p)
        col = colimit_over(partial, preds)
        model = _attach_cells(col.complex, rng, top, max_new)
        incl = ChainMap(col.complex, model, tuple(
            vstack([identity(col.complex.dim(n)), zeros(model.dim(n) - col.complex.dim(n),
                                                         col.complex.dim(n))], col.complex.dim(n))
            for n in range(model.top + 1)))
        objects[y] = model
        for a in index.lower_covers(y):
            arrows[(a, y)] = compose(col.legs[a], incl)
    d = Diagram(index, objects, arrows, p)
    if rng.random() < truncate_prob:
        d, _ = truncate_diagram(d, int(rng.integers(0, top)))
    return d


def _double_from_pieces(dims: Dict[Tuple[int, int], int], vert: Dict, horiz: Dict, width: int,
                        height: int, p: int) -> DoubleComplex:
    columns = []
    for col in range(width):
        cdims = [dims.get((col, q), 0) for q in range(height + 1)]
        cdiffs = {q: vert.get((col, q), zeros(cdims[q - 1], cdims[q])) for q in range(1, height + 1)}
        columns.append(ChainComplex.build(cdims, cdiffs, p))
    maps = []
    for col in range(1, width):
        comps = tuple(horiz.get((col, q), zeros(columns[col - 1].dim(q), columns[col].dim(q)))
                      for q in range(height + 1))
        maps.append(ChainMap(columns[col], columns[col - 1], comps))
    return DoubleComplex(tuple(columns), tuple(maps))


def random_double_complex(rng: np.random.Generator, p: int, width: int = 4, height: int = 3,
                          max_dim: int = 3, pieces: int = 6) -> DoubleComplex:
    """
    Sum of random indecomposable pieces (dots, vertical and horizontal pairs, squares and
    staircases x_0 -∂-> y_1 = d x_1, x_1 -∂-> y_2 = d x_2, ...) in a random basis per bidegree.
    """
    cells: List[Tuple[int, int]] = []
    vert_edges: List[Tuple[int, int, int]] = []
    horiz_edges: List[Tuple[int, int, int]] = []

    def room(*spots):
        counts: Dict[Tuple[int, int], int] = {}
        for s in spots:
            if not (0 <= s[0] < width and 0 <= s[1] <= height):
                return False
            counts[s] = counts.get(s, 0) + 1
        return all(cells.count(s) + c <= max_dim for s, c in counts.items())

    def add(spot):
        cells.append(spot)
        return len(cells) - 1

    for _ in range(pieces):
        kind = rng.integers(0, 5)
        col = int(rng.integers(0, width))
        q = int(rng.integers(0, height + 1))
        if kind == 0 and room((col, q)):
            add((col, q))
        elif kind == 1 and room((col, q), (col, q - 1)):
            a, b = add((col, q)), add((col, q - 1))
            vert_edges.append((a, b, 1))
        elif kind == 2 and room((col, q), (col - 1, q)):
            a, b = add((col, q)), add((col - 1, q))
            horiz_edges.append((a, b, 1))
        elif kind == 3 and room((col, q), (col - 1, q), (col, q - 1), (col - 1, q - 1)):
            a, b, c, d = add((col, q)), add((col - 1, q)), add((col, q - 1)), add((col - 1, q - 1))
            horiz_edges += [(a, b, 1), (c, d, 1)]
            vert_edges += [(a, c, 1), (b, d, 1)]
        elif kind == 4:
            length = int(rng.integers(2, width + 1))
            spots = [(col, q)]
            for i in range(1, length):
                spots += [(col - i, q + i - 1), (col - i, q + i)]
            spots.append((col - length, q + length - 1))
            if not room(*spots):
                continue
            x = add(spots[0])
            for i in range(1, length):
                y, nxt = add(spots[2 * i - 1]), add(spots[2 * i])
                horiz_edges.append((x, y, 1))
                vert_edges.append((nxt, y, 1))
                x = nxt
            horiz_edges.append((x, add(spots[-1]), 1))

    # position of each cell inside its bidegree
    dims: Dict[Tuple[int, int], int] = {}
    slot = []
    for spot in cells:
        slot.append(dims.get(spot, 0))
        dims[spot] = dims.get(spot, 0) + 1
    vert: Dict[Tuple[int, int], np.ndarray] = {}
    horiz: Dict[Tuple[int, int], np.ndarray] = {}
    for a, b, coeff in vert_edges:
        col, q = cells[a]
        m = vert.setdefault((col, q), zeros(dims.get((col, q - 1), 0), dims[(col, q)]))
        m[slot[b], slot[a]] = coeff % p
    for a, b, coeff in horiz_edges:
        col, q = cells[a]
        m = horiz.setdefault((col, q), zeros(dims.get((col - 1, q), 0), dims[(col, q)]))
        m[slot[b], slot[a]] = coeff % p

    change = {spot: _random_invertible(rng, n, p) for spot, n in dims.items()}
    inverse_change = {spot: inverse(g, p) for spot, g in change.items()}
    for (col, q), m in list(vert.items()):
        if (col, q - 1) in change:
            vert[(col, q)] = matmul(change[(col, q - 1)], matmul(m, inverse_change[(col, q)], p), p)
    for (col, q), m in list(horiz.items()):
        if (col - 1, q) in change:
            horiz[(col, q)] = matmul(change[(col - 1, q)], matmul(m, inverse_change[(col, q)], p), p)
    return _double_from_pieces(dims, vert, horiz, width, height, p)


def random_filtered_complex(rng: np.random.Generator, p: int, stages: int = 2, top: int = 2,
                            max_new: int = 2) -> FilteredComplex:
    """Nested random complexes; stage i only adds cells in degrees ≥ i"""
    complexes = [_attach_cells(ChainComplex.zero(p), rng, top, max_new)]
    inclusions = []
    for i in range(1, stages):
        prev = complexes[-1]
        grown = _attach_cells(prev, rng, top, max_new, start=i)
        incl = ChainMap(prev, grown, tuple(
            vstack([identity(prev.dim(n)), zeros(grown.dim(n) - prev.dim(n), prev.dim(n))], prev.dim(n))
            for n in range(grown.top + 1)))
        complexes.append(grown)
        inclusions.append(incl)
    return FilteredComplex(tuple(complexes), tuple(inclusions))
