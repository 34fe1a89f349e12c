#!/usr/bin/env python3

"""Diagrams of chain complexes indexed by finite posets."""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from chain import (ChainComplex, ChainMap, GradedMap, GradedVS, Homology, compose, graded_identity,
                   conn_cover, identity_map, induced_map, is_quasi_iso, mapping_cylinder,
                   split_spheres_disks, truncate)
from errors import ExpansionError, InvariantBreach, PreconditionError, ValidationError
from exactalg import (Subspace, complement, hstack, identity, image, kernel, matmul, rank,
                      solve_matrix, vstack, zeros)
from poset import IndIndex2, Poset

logger = logging.getLogger(__name__)

Edge = Tuple[str, str]


def _same_map(f: ChainMap, g: ChainMap) -> bool:
    top = max(f.source.top, f.target.top, g.source.top, g.target.top)
    return all(np.array_equal(f.component(n), g.component(n)) for n in range(top + 1))


@dataclass(frozen=True, eq=False)
class Diagram:
    """A functor from a poset to chain complexes, given on the Hasse covers"""
    index: Poset
    objects: Dict[str, ChainComplex]
    arrows: Dict[Edge, ChainMap]
    p: int
    _maps: Dict[Edge, ChainMap] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        for o in self.index.objects:
            if o not in self.objects:
                raise ValidationError("Diagram has no complex for object", label=o)
        for edge in self.index.covers:
            if edge not in self.arrows:
                raise ValidationError(f"Diagram has no map for cover {edge[0]}<{edge[1]}",
                                      label=edge[1])
        for (a, b), f in self.arrows.items():
            if (a, b) not in self.index.covers:
                raise ValidationError(f"Map {a}<{b} is not a cover of the index", label=a)
            if not (f.source.same_as(self.objects[a]) and f.target.same_as(self.objects[b])):
                raise ValidationError(f"Map {a}<{b} has the wrong source or target", label=a)

    def map_between(self, a: str, b: str) -> ChainMap:
        """Composite along the first Hasse path from a to b"""
        if (a, b) in self._maps:
            return self._maps[(a, b)]
        if a == b:
            f = identity_map(self.objects[a])
        elif not self.index.leq(a, b):
            raise PreconditionError(f"No map {a} -> {b} in the index", label=a)
        else:
            c = next(c for c in self.index.lower_covers(b) if self.index.leq(a, c))
            f = compose(self.map_between(a, c), self.arrows[(c, b)])
        self._maps[(a, b)] = f
        return f

    def validate(self) -> List[str]:
        """Every problem found; empty when all Hasse paths agree"""
        problems = []
        for b in self.index.topological_order():
            for a in self.index.objects:
                if a == b or not self.index.leq(a, b):
                    continue
                reference = self.map_between(a, b)
                for c in self.index.lower_covers(b):
                    if not self.index.leq(a, c):
                        continue
                    other = compose(self.map_between(a, c), self.arrows[(c, b)])
                    if not _same_map(reference, other):
                        problems.append(f"Square {a}->{b} does not commute through {c}")
        return problems

    def ensure_valid(self) -> "Diagram":
        problems = self.validate()
        if problems:
            raise ValidationError(problems[0], section="maps")
        return self

    def restrict(self, objs: Iterable[str]) -> "Diagram":
        sub = self.index.subposet(objs)
        arrows = {(a, b): self.map_between(a, b) for a, b in sub.covers}
        return Diagram(sub, {o: self.objects[o] for o in sub.objects}, arrows, self.p)

    @property
    def top(self) -> int:
        return max((c.top for c in self.objects.values()), default=-1)


@dataclass(frozen=True, eq=False)
class GradedDiagram:
    """
    Graded vector spaces over a poset with GradedMap edges.
    Edges are generating relations a < b, not necessarily covers; only the
    shift-0 parts of parallel composites are required to agree.
    """
    index: Poset
    values: Dict[str, GradedVS]
    edges: Dict[Edge, GradedMap]
    p: int

    def map_between(self, a: str, b: str) -> GradedMap:
        if a == b:
            return graded_identity(self.values[a])
        for (c, e), f in sorted(self.edges.items(), key=lambda kv: self.index.index(kv[0][0])):
            if e == b and self.index.leq(a, c):
                return self.map_between(a, c).then(f)
        raise PreconditionError(f"No edge path {a} -> {b}", label=a)

    def validate(self) -> List[str]:
        problems = []
        for (c, b), f in self.edges.items():
            for a in self.index.objects:
                if not self.index.leq(a, c):
                    continue
                ref = self.map_between(a, b)
                other = self.map_between(a, c).then(f)
                for n in range(len(self.values[a].dims)):
                    if not np.array_equal(ref.component(0, n), other.component(0, n)):
                        problems.append(f"Primary square {a}->{b} through {c} fails in degree {n}")
        return problems

    def to_record(self) -> Dict:
        return {
            "objects": {o: list(v.dims) for o, v in self.values.items()},
            "edges": [
                {"edge": f"{a}<{b}", "shift": s, "degree": n, "matrix": m.tolist()}
                for (a, b), f in sorted(self.edges.items())
                for s in f.shifts for n, m in sorted(f.components[s].items())
            ],
        }


def homology_diagram(d: Diagram, upto: Optional[int] = None) -> GradedDiagram:
    """Objectwise homology through degree upto with induced maps on the covers"""
    top = d.top if upto is None else upto
    values = {o: GradedVS(tuple(c.homology(n).dim for n in range(top + 1)), d.p)
              for o, c in d.objects.items()}
    edges = {}
    for (a, b), f in d.arrows.items():
        edges[(a, b)] = GradedMap(values[a], values[b],
                                  {0: {n: induced_map(f, n) for n in range(top + 1)}})
    return GradedDiagram(d.index, values, edges, d.p)


@dataclass(frozen=True, eq=False)
class Colimit:
    """
    Degreewise colimit over a sub-poset, realized on the direct sum over its maxima.
    section[n] picks representatives in that sum; projection[n] is its left inverse modulo relations.
    """
    sub: Tuple[str, ...]
    maxima: Tuple[str, ...]
    complex: ChainComplex
    legs: Dict[str, ChainMap]
    section: Tuple[np.ndarray, ...]
    projection: Tuple[np.ndarray, ...]
    offsets: Tuple[Dict[str, int], ...]


def colimit_over(d: Diagram, sub: Iterable[str]) -> Colimit:
    p = d.p
    sub = d.index.sort(set(sub))
    maxima = tuple(m for m in sub if not any(d.index.lt(m, s) for s in sub))
    top = max((d.objects[m].top for m in maxima), default=-1)
    sections, projections, offsets, dims = [], [], [], []
    for n in range(top + 1):
        off, pos = {}, 0
        for m in maxima:
            off[m] = pos
            pos += d.objects[m].dim(n)
        relations = []
        for w in sub:
            over = [m for m in maxima if d.index.leq(w, m)]
            dw = d.objects[w].dim(n)
            for m1, m2 in zip(over, over[1:]):
                col = zeros(pos, dw)
                col[off[m1]:off[m1] + d.objects[m1].dim(n)] = d.map_between(w, m1).component(n)
                col[off[m2]:off[m2] + d.objects[m2].dim(n)] -= d.map_between(w, m2).component(n)
                relations.append(col % p)
        rel = Subspace.span(hstack(relations, pos), p, pos)
        comp = complement(rel)
        frame = hstack([rel.basis, comp.basis], pos)
        proj = solve_matrix(frame, identity(pos), p)[rel.dim:]
        sections.append(comp.basis)
        projections.append(proj)
        offsets.append(off)
        dims.append(comp.dim)

    def total_diff(n):
        rows = sum(d.objects[m].dim(n - 1) for m in maxima)
        out = zeros(rows, sum(d.objects[m].dim(n) for m in maxima))
        r = c = 0
        for m in maxima:
            x = d.objects[m]
            out[r:r + x.dim(n - 1), c:c + x.dim(n)] = x.diff(n)
            r += x.dim(n - 1)
            c += x.dim(n)
        return out

    diffs = {n: matmul(projections[n - 1], matmul(total_diff(n), sections[n], p), p)
             for n in range(1, top + 1)}
    colim = ChainComplex.build(dims, diffs, p)
    legs = {}
    for s in sub:
        m = next(m for m in maxima if d.index.leq(s, m))
        f = d.map_between(s, m)
        comps = []
        for n in range(top + 1):
            block = zeros(sum(d.objects[x].dim(n) for x in maxima), d.objects[s].dim(n))
            block[offsets[n][m]:offsets[n][m] + d.objects[m].dim(n)] = f.component(n)
            comps.append(matmul(projections[n], block, p))
        legs[s] = ChainMap(d.objects[s], colim, tuple(comps))
    return Colimit(sub, maxima, colim, legs, tuple(sections), tuple(projections), tuple(offsets))


def cocone_map(col: Colimit, maps: Dict[str, ChainMap], target: ChainComplex) -> ChainMap:
    """The map out of a colimit induced by compatible maps from its maxima"""
    p = target.p
    top = max(col.complex.top, target.top)
    comps = []
    for n in range(top + 1):
        if n > col.complex.top:
            comps.append(zeros(target.dim(n), 0))
            continue
        block = hstack([maps[m].component(n) for m in col.maxima], target.dim(n))
        comps.append(matmul(block, col.section[n], p))
    return ChainMap(col.complex, target, tuple(comps))


def colimit_comparison(d: Diagram, col: Colimit, target: str) -> ChainMap:
    return cocone_map(col, {m: d.map_between(m, target) for m in col.maxima}, d.objects[target])


def latching(d: Diagram, beta: str) -> Tuple[Colimit, ChainMap]:
    """Colimit over the strict predecessors of beta and its map to X(beta)"""
    col = colimit_over(d, d.index.below(beta))
    return col, colimit_comparison(d, col, beta)


def _injective(f: ChainMap) -> bool:
    return all(rank(f.component(n), f.p) == f.source.dim(n) for n in range(f.source.top + 1))


def reedy_cofibrant_replace(d: Diagram) -> Tuple[Diagram, Dict[str, ChainMap]]:
    """
    Replace objects in topological order so every latching map is injective.
    Objects whose latching map already is injective are kept; the others become
    mapping cylinders of the latching map.
    :return: (replacement, objectwise quasi-isomorphisms replacement -> d)
    """
    p = d.p
    objects: Dict[str, ChainComplex] = {}
    arrows: Dict[Edge, ChainMap] = {}
    back: Dict[str, ChainMap] = {}
    for beta in d.index.topological_order():
        preds = d.index.below(beta)
        if not preds:
            objects[beta] = d.objects[beta]
            back[beta] = identity_map(d.objects[beta])
            continue
        partial = Diagram(d.index.subposet(preds), {o: objects[o] for o in preds},
                          {e: arrows[e] for e in d.index.subposet(preds).covers}, p)
        col = colimit_over(partial, preds)
        latch = cocone_map(col, {m: compose(back[m], d.map_between(m, beta)) for m in col.maxima},
                           d.objects[beta])
        if _injective(latch):
            objects[beta] = d.objects[beta]
            back[beta] = identity_map(d.objects[beta])
            for a in d.index.lower_covers(beta):
                arrows[(a, beta)] = compose(back[a], d.map_between(a, beta))
        else:
            logger.debug("Replacing %s with a mapping cylinder", beta)
            cyl = mapping_cylinder(latch)
            objects[beta] = cyl.complex
            back[beta] = cyl.projection
            for a in d.index.lower_covers(beta):
                arrows[(a, beta)] = compose(col.legs[a], cyl.inclusion)
    return Diagram(d.index, objects, arrows, p), back


def hocolim(d: Diagram, sub: Optional[Iterable[str]] = None) -> Colimit:
    """Homotopy colimit as the colimit of the Reedy replacement"""
    part = d if sub is None else d.restrict(sub)
    replaced, _ = reedy_cofibrant_replace(part)
    return colimit_over(replaced, replaced.index.objects)


Block = Tuple[Tuple[str, ...], int]


@dataclass(frozen=True, eq=False)
class BarComplex:
    """
    Simplicial replacement: B_n = ⊕_σ X(y0)_{n-s} over chains σ = (y0 < ... < ys).
    blocks[n] maps (σ, internal degree) to (offset, size) inside degree n.
    """
    complex: ChainComplex
    chains: Tuple[Tuple[str, ...], ...]
    blocks: Tuple[Dict[Block, Tuple[int, int]], ...]

    def embed(self, chain: Tuple[str, ...], vec: np.ndarray, n: int) -> np.ndarray:
        """The element chain ⊗ vec of total degree n"""
        out = zeros(self.complex.dim(n), 1)[:, 0]
        off, size = self.blocks[n][(chain, n - (len(chain) - 1))]
        out[off:off + size] = vec
        return out

    def block(self, vec: np.ndarray, chain: Tuple[str, ...], n: int) -> np.ndarray:
        """The X(y0) coordinates of vec on the chain's block"""
        off, size = self.blocks[n][(chain, n - (len(chain) - 1))]
        return vec[off:off + size]


def bar_complex(d: Diagram, sub: Optional[Iterable[str]] = None) -> BarComplex:
    p = d.p
    objs = d.index.objects if sub is None else d.index.sort(set(sub))
    chains = tuple(d.index.chains(objs))
    top = max((len(c) - 1 + d.objects[c[0]].top for c in chains), default=-1)
    blocks: List[Dict[Block, Tuple[int, int]]] = []
    dims = []
    for n in range(top + 1):
        off, pos = {}, 0
        for c in chains:
            q = n - (len(c) - 1)
            if q < 0:
                continue
            size = d.objects[c[0]].dim(q)
            off[(c, q)] = (pos, size)
            pos += size
        blocks.append(off)
        dims.append(pos)
    diffs = {}
    for n in range(1, top + 1):
        m = zeros(dims[n - 1], dims[n])
        for (c, q), (col, width) in blocks[n].items():
            if width == 0:
                continue
            x = d.objects[c[0]]
            s = len(c) - 1
            for i in range(s + 1 if s else 0):
                face = c[:i] + c[i + 1:]
                row, _ = blocks[n - 1][(face, q)]
                piece = d.map_between(c[0], c[1]).component(q) if i == 0 else identity(width)
                sign = -1 if i % 2 else 1
                m[row:row + piece.shape[0], col:col + width] += sign * piece
            if q >= 1:
                row, _ = blocks[n - 1][(c, q - 1)]
                sign = -1 if s % 2 else 1
                m[row:row + x.dim(q - 1), col:col + width] += sign * x.diff(q)
        diffs[n] = m % p
    return BarComplex(ChainComplex.build(dims, diffs, p), chains, tuple(blocks))


def bar_cocone(d: Diagram, bar: BarComplex, target: str) -> ChainMap:
    """Augmentation B -> X(target): f_{y0,target} on length-one chains, zero elsewhere"""
    p = d.p
    tgt = d.objects[target]
    comps = []
    for n in range(bar.complex.top + 1):
        m = zeros(tgt.dim(n), bar.complex.dim(n))
        for (c, q), (off, size) in bar.blocks[n].items():
            if len(c) == 1 and size:
                m[:, off:off + size] = d.map_between(c[0], target).component(n)
        comps.append(m % p)
    return ChainMap(bar.complex, tgt, tuple(comps))


def bar_inclusion(small: BarComplex, big: BarComplex) -> ChainMap:
    """Inclusion of the bar complex of a sub-poset"""
    comps = []
    for n in range(small.complex.top + 1):
        m = zeros(big.complex.dim(n), small.complex.dim(n))
        for key, (off, size) in small.blocks[n].items():
            big_off, _ = big.blocks[n][key]
            m[big_off:big_off + size, off:off + size] = identity(size)
        comps.append(m)
    return ChainMap(small.complex, big.complex, tuple(comps))


def minimal_cofibrant_check(d: Diagram) -> List[str]:
    """
    Problems with (a) sphere/disk splitting, (b) zero differential on X(β)/im λ,
    (c) injective latching maps. Empty when minimally cofibrant.
    """
    p = d.p
    problems = []
    for beta in d.index.topological_order():
        x = d.objects[beta]
        try:
            split_spheres_disks(x)
        except InvariantBreach as e:
            problems.append(f"{beta}: no sphere/disk splitting ({e})")
        col, latch = latching(d, beta)
        if not _injective(latch):
            problems.append(f"{beta}: latching map is not injective")
        for n in range(1, x.top + 1):
            new = image(x.diff(n), p)
            old = image(latch.component(n - 1), p)
            if not old.contains_space(new):
                problems.append(f"{beta}: disk in degree {n - 1} not coned off a predecessor")
    return problems


def minimal_cofibrant_replace(d: Diagram) -> Tuple[Diagram, Dict[str, ChainMap]]:
    """
    Minimal model built along the filtration. Each object is its latching colimit L
    plus new spheres for the homology not hit from L and new top cells killing the
    classes of L that die in X(β).
    :return: (minimal model, objectwise quasi-isomorphisms model -> d)
    """
    p = d.p
    objects: Dict[str, ChainComplex] = {}
    arrows: Dict[Edge, ChainMap] = {}
    back: Dict[str, ChainMap] = {}
    for beta in d.index.topological_order():
        x = d.objects[beta]
        preds = d.index.below(beta)
        sub = d.index.subposet(preds)
        partial = Diagram(sub, {o: objects[o] for o in preds}, {e: arrows[e] for e in sub.covers}, p)
        col = colimit_over(partial, preds)
        latch = cocone_map(col, {m: compose(back[m], d.map_between(m, beta)) for m in col.maxima}, x)
        L = col.complex
        top = max(L.top, x.top) + 1
        spheres, kills = [], []
        for n in range(top + 1):
            hl, hx = L.homology(n), x.homology(n)
            h_latch = hx.project(matmul(latch.component(n), hl.cycle_reps, p)).reshape(hx.dim, hl.dim)
            spheres.append(matmul(hx.cycle_reps, complement(image(h_latch, p)).basis, p))
            kills.append(matmul(hl.cycle_reps, kernel(h_latch, p).basis, p))
        dims, diffs, comps = [], {}, []
        for n in range(top + 1):
            tops_n = kills[n - 1].shape[1] if n >= 1 else 0
            dims.append(L.dim(n) + spheres[n].shape[1] + tops_n)
        while len(dims) > 1 and dims[-1] == 0:
            dims.pop()
        top = len(dims) - 1
        for n in range(1, top + 1):
            rows_l = L.dim(n - 1)
            block = zeros(dims[n - 1], dims[n])
            block[:rows_l, :L.dim(n)] = L.diff(n)
            block[:rows_l, L.dim(n) + spheres[n].shape[1]:] = kills[n - 1]
            diffs[n] = block
        model = ChainComplex.build(dims, diffs, p)
        for n in range(top + 1):
            lifts = zeros(x.dim(n), 0)
            if n >= 1 and kills[n - 1].shape[1]:
                lifts = solve_matrix(x.diff(n), matmul(latch.component(n - 1), kills[n - 1], p), p)
                if lifts is None:
                    raise ExpansionError(f"Cannot bound a dying class at {beta} in degree {n - 1}")
            comps.append(hstack([latch.component(n), spheres[n], lifts], x.dim(n)))
        q = ChainMap(model, x, tuple(comps))
        if not is_quasi_iso(q):
            raise ExpansionError(f"Minimal model at {beta} is not quasi-isomorphic to the input")
        incl = ChainMap(L, model, tuple(
            vstack([identity(L.dim(n)), zeros(dims[n] - L.dim(n), L.dim(n))], L.dim(n))
            for n in range(top + 1)))
        objects[beta] = model
        back[beta] = q
        for a in d.index.lower_covers(beta):
            arrows[(a, beta)] = compose(col.legs[a], incl)
        logger.debug("Minimal model at %s: dims %s", beta, model.dims)
    return Diagram(d.index, objects, arrows, p), back


def truncate_diagram(d: Diagram, k: int) -> Tuple[Diagram, Dict[str, ChainMap]]:
    """Objectwise τ_k with induced maps, plus the natural surjections X -> τ_k X"""
    p = d.p
    objects, maps, sections = {}, {}, {}
    for o, c in d.objects.items():
        objects[o], maps[o] = truncate(c, k)
        sections[o] = complement(image(c.diff(k + 1), p)).basis
    arrows = {}
    for (a, b), f in d.arrows.items():
        comps = [f.component(n) for n in range(k)]
        comps.append(matmul(maps[b].component(k), matmul(f.component(k), sections[a], p), p))
        arrows[(a, b)] = ChainMap(objects[a], objects[b], tuple(comps))
    return Diagram(d.index, objects, arrows, p), maps


def conn_cover_diagram(d: Diagram, k: int) -> Tuple[Diagram, Dict[str, ChainMap]]:
    """Objectwise X⟨k⟩ with induced maps, plus the natural injections X⟨k⟩ -> X"""
    p = d.p
    objects, maps, cycles = {}, {}, {}
    for o, c in d.objects.items():
        objects[o], maps[o] = conn_cover(c, k)
        cycles[o] = kernel(c.diff(k), p)
    arrows = {}
    for (a, b), f in d.arrows.items():
        top = max(objects[a].top, objects[b].top)
        comps = [zeros(0, 0) for _ in range(k)]
        comps.append(cycles[b].coordinates(matmul(f.component(k), cycles[a].basis, p))
                     .reshape(cycles[b].dim, cycles[a].dim))
        comps += [f.component(n) for n in range(k + 1, top + 1)]
        arrows[(a, b)] = ChainMap(objects[a], objects[b], tuple(comps))
    return Diagram(d.index, objects, arrows, p), maps


@dataclass(frozen=True)
class FormalDifferential:
    """A degree +1 formal arrow from H_degree(source) onto the kernel carried by target"""
    source: str
    target: str
    degree: int
    matrix: np.ndarray


@dataclass(frozen=True, eq=False)
class HybridDiagram:
    """
    Homology below degree k, a minimally cofibrant diagram in degrees ≥ k.
    to_source[o][i] is H_i(high(o)) -> H_i(source(o)) for the base objects.
    """
    index: Poset
    k: int
    low: GradedDiagram
    high: Diagram
    seam: Dict[str, Homology]
    source: Diagram
    base: Tuple[str, ...]
    formal: List[FormalDifferential] = field(default_factory=list)
    to_source: Dict[str, Dict[int, np.ndarray]] = field(default_factory=dict)
    history: Tuple = ()

    @property
    def p(self) -> int:
        return self.high.p


def is_k_formal(x, k: int) -> bool:
    if isinstance(x, GradedDiagram):
        return True
    if isinstance(x, HybridDiagram):
        return k <= x.k
    return all(not np.any(c.diff(i)) for c in x.objects.values() for i in range(1, k + 1))


def is_k_hybrid(x, k: int) -> bool:
    if not is_k_formal(x, k):
        return False
    if isinstance(x, GradedDiagram):
        return True
    high = x.high if isinstance(x, HybridDiagram) else conn_cover_diagram(x, k)[0]
    return not minimal_cofibrant_check(high)


def to_hybrid(x: Diagram, k: int) -> HybridDiagram:
    """Split x into H_{<k} and a minimal model of x⟨k⟩"""
    cover, incl = conn_cover_diagram(x, k)
    high, back = minimal_cofibrant_replace(cover)
    low = homology_diagram(x, upto=k - 1) if k > 0 else GradedDiagram(
        x.index, {o: GradedVS((), x.p) for o in x.index.objects}, {}, x.p)
    seam = {o: x.objects[o].homology(k) for o in x.index.objects}
    to_source = {}
    for o in x.index.objects:
        total = compose(back[o], incl[o])
        ident = {i: identity(x.objects[o].homology(i).dim) for i in range(k)}
        ident.update({i: induced_map(total, i) for i in range(k, max(x.objects[o].top, k) + 2)})
        to_source[o] = ident
    return HybridDiagram(x.index, k, low, high, seam, x, x.index.objects, [], to_source)


def extend_ind2(d: Diagram, idx: IndIndex2) -> Tuple[Diagram, Dict[str, Colimit]]:
    """Value every formal colimit object as the colimit of its fan"""
    p = d.p
    colims = {label: colimit_over(d, idx.fan(label)) for label in idx.colimit_objects}
    objects = dict(d.objects)
    objects.update({label: c.complex for label, c in colims.items()})
    arrows = {}
    for a, b in idx.poset.covers:
        if a in colims and b in colims:
            arrows[(a, b)] = cocone_map(colims[a], {m: colims[b].legs[m] for m in colims[a].maxima},
                                        colims[b].complex)
        elif a in colims:
            arrows[(a, b)] = colimit_comparison(d, colims[a], b)
        elif b in colims:
            arrows[(a, b)] = colims[b].legs[a]
        else:
            arrows[(a, b)] = d.map_between(a, b)
    return Diagram(idx.poset, objects, arrows, p), colims
