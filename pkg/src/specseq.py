#!/usr/bin/env python3

"""
Spectral sequences of double and filtered complexes.

Pages are computed two ways: directly as subquotients of the total complex, and by
chasing classes along the associated cube of columns. cross_check compares them.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from chain import ChainComplex, ChainMap, FiberSequence, compose, fiber, induced_map, zero_map
from diagram import Diagram
from errors import InvariantBreach, PreconditionError, SpectralError, ValidationError
from exactalg import (Subspace, hstack, image, image_of, intersect, kernel, matmul, preimage,
                      quotient_basis, rank, solve_matrix, subspace_sum, zeros)
from poset import cube_poset

logger = logging.getLogger(__name__)

Bidegree = Tuple[int, int]


@dataclass(frozen=True, eq=False)
class _Filtration:
    """A complex with an increasing filtration F_0 ⊆ ... ⊆ F_top = total, degreewise"""
    total: ChainComplex
    stages: Tuple[Tuple[Subspace, ...], ...]

    @property
    def length(self) -> int:
        return len(self.stages)

    def F(self, s: int, m: int) -> Subspace:
        dim = self.total.dim(m)
        if s < 0 or m < 0 or m > self.total.top:
            return Subspace.zero(dim, self.total.p)
        return self.stages[min(s, self.length - 1)][m]


@dataclass(frozen=True, eq=False)
class DoubleComplex:
    """
    Columns C_0, ..., C_w with horizontal chain maps; horizontal[i] is ∂: C_{i+1} -> C_i.
    The total complex uses D = ∂ + (-1)^p d on column p, plus the longer components
    higher[(p, r)]: C_{p,q} -> C_{p-r,q+r-1} (r ≥ 2) of a filtered differential, listed by q.
    With longer components present the horizontal maps need not compose to zero; only D∘D = 0 is checked.
    """
    columns: Tuple[ChainComplex, ...]
    horizontal: Tuple[ChainMap, ...]
    higher: Dict[Tuple[int, int], Tuple[np.ndarray, ...]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "horizontal", tuple(self.horizontal))
        higher = {(int(col), int(r)): tuple(np.asarray(m, dtype=np.int64) for m in comps)
                  for (col, r), comps in dict(self.higher).items()}
        object.__setattr__(self, "higher", higher)
        if not self.columns:
            raise ValidationError("Double complex needs at least one column", section="double")
        if len(self.horizontal) != len(self.columns) - 1:
            raise ValidationError(f"Expected {len(self.columns) - 1} horizontal maps, "
                                  f"got {len(self.horizontal)}", section="double")
        for i, h in enumerate(self.horizontal):
            if not (h.source.same_as(self.columns[i + 1]) and h.target.same_as(self.columns[i])):
                raise ValidationError(f"Horizontal map {i + 1}->{i} has the wrong ends",
                                      section="double", label=str(i + 1))
        if self.higher:
            self._check_higher()
            return
        for i in range(1, len(self.horizontal)):
            twice = compose(self.horizontal[i], self.horizontal[i - 1])
            for n, comp in enumerate(twice.components):
                if np.any(comp):
                    raise ValidationError(f"Horizontal maps {i + 1}->{i}->{i - 1} do not compose to zero",
                                          section="double", degree=n)

    def _check_higher(self):
        for (col, r), comps in self.higher.items():
            if r < 2 or not 0 <= col - r < col < self.width:
                raise ValidationError(f"No component of length {r} leaves column {col}",
                                      section="double", label=str(col))
            for q, m in enumerate(comps):
                expected = (self.dim(col - r, q + r - 1), self.dim(col, q))
                if m.shape != expected:
                    raise ValidationError(f"Component {col}->{col - r} has shape {m.shape}, "
                                          f"expected {expected}", section="double", label=str(col), degree=q)
        try:
            self.total()
        except ValidationError as e:
            raise ValidationError(f"Total differential fails: {e}", section="double", degree=e.degree) from e

    def longer(self, col: int, r: int, q: int) -> np.ndarray:
        """The component C_{col,q} -> C_{col-r,q+r-1}; zero when absent"""
        comps = self.higher.get((col, r), ())
        if 0 <= q < len(comps):
            return comps[q]
        return zeros(self.dim(col - r, q + r - 1), self.dim(col, q))

    @property
    def p(self) -> int:
        return self.columns[0].p

    @property
    def width(self) -> int:
        return len(self.columns)

    @property
    def height(self) -> int:
        return max(c.top for c in self.columns)

    def dim(self, col: int, q: int) -> int:
        return self.columns[col].dim(q) if 0 <= col < self.width else 0

    def offsets(self, m: int) -> Dict[int, int]:
        """Start of column p's block inside Tot_m"""
        out, pos = {}, 0
        for col in range(self.width):
            out[col] = pos
            pos += self.dim(col, m - col)
        return out

    def total(self) -> ChainComplex:
        p = self.p
        top = self.width - 1 + self.height
        dims = [sum(self.dim(col, m - col) for col in range(self.width)) for m in range(top + 1)]
        diffs = {}
        for m in range(1, top + 1):
            src, tgt = self.offsets(m), self.offsets(m - 1)
            block = zeros(dims[m - 1], dims[m])
            for col in range(self.width):
                q = m - col
                n_src = self.dim(col, q)
                if n_src == 0:
                    continue
                if q >= 1:
                    sign = 1 if col % 2 == 0 else -1
                    r0 = tgt[col]
                    block[r0:r0 + self.dim(col, q - 1), src[col]:src[col] + n_src] = \
                        (sign * self.columns[col].diff(q)) % p
                if col >= 1:
                    r0 = tgt[col - 1]
                    block[r0:r0 + self.dim(col - 1, q), src[col]:src[col] + n_src] = \
                        self.horizontal[col - 1].component(q)
                for r in range(2, col + 1):
                    if (col, r) in self.higher:
                        r0 = tgt[col - r]
                        block[r0:r0 + self.dim(col - r, q + r - 1), src[col]:src[col] + n_src] = \
                            self.longer(col, r, q)
            diffs[m] = block
        return ChainComplex.build(dims, diffs, p)

    def column_block(self, vec: np.ndarray, m: int, col: int) -> np.ndarray:
        off = self.offsets(m)[col]
        return vec[off:off + self.dim(col, m - col)]

    def _filtration(self) -> _Filtration:
        total = self.total()
        stages = []
        for s in range(self.width):
            per = []
            for m in range(total.top + 1):
                off = self.offsets(m)
                rows = off[s] + self.dim(s, m - s)
                basis = zeros(total.dim(m), rows)
                basis[:rows, :rows] = np.eye(rows, dtype=np.int64)
                per.append(Subspace.span(basis, self.p, total.dim(m)))
            stages.append(tuple(per))
        return _Filtration(total, tuple(stages))


@dataclass(frozen=True, eq=False)
class FilteredComplex:
    """F_0 ↪ F_1 ↪ ... ↪ F_top; inclusions[i] is F_i -> F_{i+1}, degreewise injective"""
    stages: Tuple[ChainComplex, ...]
    inclusions: Tuple[ChainMap, ...]

    def __post_init__(self):
        object.__setattr__(self, "stages", tuple(self.stages))
        object.__setattr__(self, "inclusions", tuple(self.inclusions))
        if len(self.inclusions) != len(self.stages) - 1:
            raise ValidationError("Filtered complex needs one inclusion per consecutive pair",
                                  section="filtered")
        for i, f in enumerate(self.inclusions):
            if not (f.source.same_as(self.stages[i]) and f.target.same_as(self.stages[i + 1])):
                raise ValidationError(f"Inclusion {i}->{i + 1} has the wrong ends",
                                      section="filtered", label=str(i))
            for n, comp in enumerate(f.components):
                if rank(comp, f.p) != f.source.dim(n):
                    raise ValidationError(f"Filtration map {i}->{i + 1} is not injective",
                                          section="filtered", degree=n)

    @property
    def p(self) -> int:
        return self.stages[0].p

    def _filtration(self) -> _Filtration:
        total = self.stages[-1]
        stages = []
        for s in range(len(self.stages)):
            f = None
            for inc in self.inclusions[s:]:
                f = inc if f is None else compose(f, inc)
            per = []
            for m in range(total.top + 1):
                if f is None:
                    per.append(Subspace.full(total.dim(m), self.p))
                else:
                    per.append(image(f.component(m), self.p))
            stages.append(tuple(per))
        return _Filtration(total, tuple(stages))


AnyFiltered = Union[DoubleComplex, FilteredComplex]


@dataclass(frozen=True, eq=False)
class SSPage:
    """
    E^r with representatives in the total complex.
    differentials[(p, q)] maps E^r_{p,q} to E^r_{p-r, q+r-1} in representative coordinates.
    """
    r: int
    entries: Dict[Bidegree, int]
    reps: Dict[Bidegree, np.ndarray]
    differentials: Dict[Bidegree, np.ndarray]
    prime: int = 2

    def dim(self, p: int, q: int) -> int:
        return self.entries.get((p, q), 0)

    def rank(self, p: int, q: int) -> int:
        d = self.differentials.get((p, q))
        return 0 if d is None else rank(d, self.prime)

    def to_record(self) -> Dict:
        return {
            "r": self.r,
            "entries": [{"p": p, "q": q, "dim": d, "rank": self.rank(p, q)}
                        for (p, q), d in sorted(self.entries.items()) if d],
        }


class _PageBuilder:
    """Z^r_s = {x ∈ F_s : D x ∈ F_{s-r}} and E^r_s = Z^r_s / (Z^{r-1}_{s-1} + D Z^{r-1}_{s+r-1})"""

    def __init__(self, filt: _Filtration):
        self.filt = filt
        self.p = filt.total.p
        self._z: Dict[Tuple[int, int, int], Subspace] = {}

    def Z(self, r: int, s: int, m: int) -> Subspace:
        key = (r, s, m)
        if key not in self._z:
            total = self.filt.total
            fs = self.filt.F(s, m)
            if m == 0 or r <= 0:
                self._z[key] = fs
            else:
                self._z[key] = intersect(fs, preimage(total.diff(m), self.filt.F(s - r, m - 1), self.p))
        return self._z[key]

    def denominator(self, r: int, s: int, m: int) -> Subspace:
        total = self.filt.total
        low = self.Z(r - 1, s - 1, m)
        high = self.Z(r - 1, s + r - 1, m + 1)
        return subspace_sum(low, image_of(total.diff(m + 1), high, self.p))

    def page(self, r: int) -> SSPage:
        total = self.filt.total
        entries, reps, dens = {}, {}, {}
        for s in range(self.filt.length):
            for m in range(total.top + 1):
                den = self.denominator(r, s, m)
                basis = quotient_basis(den, self.Z(r, s, m))
                entries[(s, m - s)] = basis.shape[1]
                reps[(s, m - s)] = basis
                dens[(s, m - s)] = den
        diffs = {}
        for (s, q), basis in reps.items():
            m = s + q
            if not basis.shape[1] or s - r < 0 or (s - r, q + r - 1) not in reps:
                continue
            tgt = (s - r, q + r - 1)
            image_vecs = matmul(total.diff(m), basis, self.p)
            frame = hstack([dens[tgt].basis, reps[tgt]], total.dim(m - 1))
            coords = solve_matrix(frame, image_vecs, self.p)
            if coords is None:
                raise InvariantBreach(f"d^{r} leaves the page at ({s}, {q})")
            diffs[(s, q)] = coords[dens[tgt].dim:]
        return SSPage(r, entries, reps, diffs, self.p)


def classical_pages(x: AnyFiltered, r_max: int) -> List[SSPage]:
    """E^1 ... E^{r_max} as subquotients of the total complex, checked page to page"""
    if r_max < 1:
        raise SpectralError(f"Page number must be ≥ 1, got {r_max}")
    builder = _PageBuilder(x._filtration())
    pages = [builder.page(r) for r in range(1, r_max + 1)]
    for page in pages:
        _check_square_zero(page)
    for before, after in zip(pages, pages[1:]):
        _check_next_page(before, after)
    logger.info("Computed E^1..E^%d", r_max)
    return pages


def _check_square_zero(page: SSPage):
    r = page.r
    for (s, q), d in page.differentials.items():
        nxt = page.differentials.get((s - r, q + r - 1))
        if nxt is not None and np.any(matmul(nxt, d, page.prime)):
            raise InvariantBreach(f"d^{r}∘d^{r} ≠ 0 at ({s}, {q})")


def _check_next_page(page: SSPage, nxt: SSPage):
    r = page.r
    for (s, q), dim in page.entries.items():
        out = page.rank(s, q)
        into = page.rank(s + r, q - r + 1)
        if nxt.dim(s, q) != dim - out - into:
            raise InvariantBreach(f"E^{r + 1}_({s},{q}) is not the homology of d^{r}")


def e_infinity(x: AnyFiltered) -> Dict[Bidegree, int]:
    filt = x._filtration()
    page = _PageBuilder(filt).page(filt.length + 1)
    return {k: v for k, v in page.entries.items() if v}


def graded_homology(x: AnyFiltered) -> Dict[Bidegree, int]:
    """dim gr_s H_m(total) under the filtration, indexed (s, m - s)"""
    filt = x._filtration()
    total = filt.total
    p = total.p
    out = {}
    for m in range(total.top + 1):
        cycles = kernel(total.diff(m), p)
        bounds = image(total.diff(m + 1), p)
        prev = bounds.dim
        for s in range(filt.length):
            here = subspace_sum(intersect(filt.F(s, m), cycles), bounds).dim
            if here - prev:
                out[(s, m - s)] = here - prev
            prev = here
    return out


@dataclass(frozen=True, eq=False)
class CubeSS:
    """
    The columns lo..hi placed on the staircase of an n-cube (n = hi - lo), zero elsewhere.
    Column lo+i sits at the vertex whose first i bits are 1.
    """
    n: int
    segment: Tuple[int, int]
    double: DoubleComplex
    diagram: Diagram
    staircase: Dict[str, int]
    extended: Dict[str, FiberSequence] = field(default_factory=dict)
    chase_state: Dict[Tuple[int, int, int], "ChaseResult"] = field(default_factory=dict)

    def to_record(self) -> Dict:
        return {
            "n": self.n,
            "segment": list(self.segment),
            "staircase": dict(sorted(self.staircase.items())),
            "fibers": {label: list(seq.fiber.dims) for label, seq in sorted(self.extended.items())},
        }


def double_to_cube(dc: DoubleComplex, segment: Optional[Sequence[int]] = None) -> CubeSS:
    lo, hi = (0, dc.width - 1) if segment is None else (int(segment[0]), int(segment[1]))
    if not 0 <= lo < hi < dc.width:
        raise SpectralError(f"Segment [{lo}, {hi}] is not inside columns 0..{dc.width - 1}")
    n = hi - lo
    index = cube_poset(n)
    stair = {"1" * i + "0" * (n - i): lo + i for i in range(n + 1)}
    empty = ChainComplex.zero(dc.p)
    objects = {v: dc.columns[stair[v]] if v in stair else empty for v in index.objects}
    arrows = {}
    for a, b in index.covers:
        if a in stair and b in stair:
            arrows[(a, b)] = dc.horizontal[stair[b]]
        else:
            arrows[(a, b)] = zero_map(objects[a], objects[b])
    diagram = Diagram(index, objects, arrows, dc.p).ensure_valid()
    return CubeSS(n, (lo, hi), dc, diagram, stair)


def extend_cube(c: CubeSS) -> CubeSS:
    """Adjoin the fiber of every cover arrow and check each fiber sequence on homology"""
    extended = {}
    for a, b in c.diagram.index.covers:
        f = c.diagram.arrows[(a, b)]
        seq = fiber(f)
        top = max(seq.fiber.top, f.source.top, f.target.top)
        for k in range(top + 1):
            hk = induced_map(f, k)
            hk1 = induced_map(f, k + 1)
            expected = (hk.shape[1] - rank(hk, f.p)) + (hk1.shape[0] - rank(hk1, f.p))
            if seq.fiber.homology(k).dim != expected:
                raise InvariantBreach(f"Fiber of {a}->{b} breaks the long exact sequence in degree {k}")
        extended[f"F({a}>{b})"] = seq
    logger.debug("Extended %d-cube with %d fibers", c.n, len(extended))
    return CubeSS(c.n, c.segment, c.double, c.diagram, c.staircase, extended, c.chase_state)


@dataclass(frozen=True, eq=False)
class ChaseResult:
    """
    d^r on E^1 classes of column p in vertical degree q. classes, value and indeterminacy
    are in vertical-homology coordinates; lifts holds the solved lower components.
    """
    r: int
    p: int
    q: int
    classes: np.ndarray
    value: np.ndarray
    indeterminacy: Subspace
    lifts: np.ndarray

    def to_record(self) -> Dict:
        return {"r": self.r, "p": self.p, "q": self.q, "classes": int(self.classes.shape[1]),
                "rank": int(rank(self.value, self.indeterminacy.p)) if self.value.size else 0,
                "indeterminacy": self.indeterminacy.dim}


def _chase_system(dc: DoubleComplex, r: int, p: int, q: int):
    """
    Unknowns: Tot_m restricted to columns p-r+1..p-1; constraints: the same columns of Tot_{m-1}.
    Returns (rows, cols) index lists into the total bases.
    """
    m = p + q
    src_off, tgt_off = dc.offsets(m), dc.offsets(m - 1)
    cols, rows = [], []
    for col in range(p - r + 1, p):
        cols.extend(range(src_off[col], src_off[col] + dc.dim(col, m - col)))
        rows.extend(range(tgt_off[col], tgt_off[col] + dc.dim(col, m - 1 - col)))
    return rows, cols


def chase_d(c: CubeSS, r: int, p: int, q: int, classes: Optional[np.ndarray] = None) -> ChaseResult:
    """
    Lift classes of H_q(C_p) through the r-1 columns below by one linear solve, then read
    the column p-r component. Lift choices contribute the indeterminacy.
    Without classes, every d^{<r}-cycle class is chased.
    """
    dc = c.double
    lo, hi = c.segment
    if r < 1:
        raise SpectralError(f"Page number must be ≥ 1, got {r}")
    if p > hi or p - r < lo:
        raise SpectralError(f"d^{r} from column {p} needs columns {p - r}..{p} on the cube; "
                            f"segment is [{lo}, {hi}] (length {hi - lo + 1}, need {r + 1})")
    pr = dc.p
    total = dc.total()
    m = p + q
    source = dc.columns[p].homology(q)
    target = dc.columns[p - r].homology(q + r - 1)
    rows, cols = _chase_system(dc, r, p, q)
    D = total.diff(m)
    A = D[np.ix_(rows, cols)] if rows and cols else zeros(len(rows), len(cols))

    off = dc.offsets(m)[p]
    embed = zeros(total.dim(m), source.dim)
    embed[off:off + dc.dim(p, q)] = source.cycle_reps
    B = matmul(D, embed, pr)[rows] if rows else zeros(0, source.dim)

    reachable = preimage(B, image(A, pr), pr)
    if classes is None:
        classes = reachable.basis
    else:
        classes = np.asarray(classes, dtype=np.int64).reshape(source.dim, -1) % pr
        if not reachable.contains(classes):
            raise PreconditionError(f"Class in E^1_({p},{q}) is not a d^{{<{r}}}-cycle",
                                    label=str(p), degree=q)

    u = solve_matrix(A, (-matmul(B, classes, pr)) % pr, pr) if cols else zeros(0, classes.shape[1])
    lifted = matmul(embed, classes, pr)
    if cols:
        lifted[cols] = (lifted[cols] + u) % pr
    image_vecs = matmul(D, lifted, pr)
    value = target.project(dc.column_block(image_vecs, m - 1, p - r)).reshape(target.dim, classes.shape[1])

    ker = kernel(A, pr) if cols else Subspace.zero(0, pr)
    free = zeros(total.dim(m), ker.dim)
    if cols and ker.dim:
        free[cols] = ker.basis
    spread = dc.column_block(matmul(D, free, pr), m - 1, p - r)
    indet = Subspace.span(target.project(spread).reshape(target.dim, ker.dim), pr, target.dim)

    result = ChaseResult(r, p, q, classes, value, indet, lifted)
    c.chase_state[(r, p, q)] = result
    logger.debug("Chased d^%d from (%d, %d): %d classes", r, p, q, classes.shape[1])
    return result


def filtered_to_cubes(fc: FilteredComplex, n: int) -> Tuple[DoubleComplex, CubeSS]:
    """
    Columns C_i = Σ^{-i}(F_i/F_{i-1}) with ∂ induced by the connecting map, i = 0..n.
    The splitting uses the canonical complements of F_{i-1} in F_i. Components of the
    differential that drop the filtration by r ≥ 2 are kept as the model's longer
    components, so its total complex is the filtered complex in split coordinates.
    """
    if n < 1 or n + 1 > len(fc.stages):
        raise SpectralError(f"Need an {n + 1}-stage segment, filtration has {len(fc.stages)} stages")
    filt = fc._filtration()
    total = filt.total
    p = fc.p
    sections = [[quotient_basis(filt.F(i - 1, m), filt.F(i, m)) for m in range(total.top + 1)]
                for i in range(n + 1)]
    for i in range(n + 1):
        for m in range(min(i, total.top + 1)):
            if sections[i][m].shape[1]:
                raise PreconditionError(f"F_{i}/F_{i - 1} is nonzero below degree {i}",
                                        label=str(i), degree=m)

    def sec(i, m):
        return sections[i][m] if 0 <= i <= n and 0 <= m <= total.top else zeros(total.dim(m), 0)

    vert: List[Dict[int, np.ndarray]] = [dict() for _ in range(n + 1)]
    horiz: List[Dict[int, np.ndarray]] = [dict() for _ in range(n + 1)]
    longer: Dict[Tuple[int, int], Dict[int, np.ndarray]] = {}
    for i in range(n + 1):
        for m in range(max(i, 1), total.top + 1):
            blocks = [sec(j, m - 1) for j in range(i + 1)]
            coords = solve_matrix(hstack(blocks, total.dim(m - 1)), matmul(total.diff(m), sec(i, m), p), p)
            if coords is None:
                raise InvariantBreach(f"Differential leaves F_{i}", label=str(i), degree=m)
            starts = np.cumsum([0] + [b.shape[1] for b in blocks])
            q = m - i
            sign = 1 if i % 2 == 0 else -1
            vert[i][q] = (sign * coords[starts[i]:starts[i + 1]]) % p
            if i >= 1:
                horiz[i][q] = coords[starts[i - 1]:starts[i]]
            for r in range(2, i + 1):
                part = coords[starts[i - r]:starts[i - r + 1]]
                if np.any(part):
                    longer.setdefault((i, r), {})[q] = part

    columns = []
    for i in range(n + 1):
        dims = [sec(i, q + i).shape[1] for q in range(total.top - i + 1)]
        columns.append(ChainComplex.build(dims, {q: vert[i][q] for q in range(1, len(dims))}, p))
    higher = {(i, r): tuple(by_q.get(q, zeros(columns[i - r].dim(q + r - 1), columns[i].dim(q)))
                            for q in range(columns[i].top + 1))
              for (i, r), by_q in longer.items()}
    maps = []
    try:
        for i in range(1, n + 1):
            comps = tuple(horiz[i].get(q, zeros(columns[i - 1].dim(q), columns[i].dim(q)))
                          for q in range(columns[i].top + 1))
            maps.append(ChainMap(columns[i], columns[i - 1], comps))
        dc = DoubleComplex(tuple(columns), tuple(maps), higher)
    except ValidationError as e:
        raise PreconditionError(f"Filtration does not split into columns: {e}") from e
    if higher:
        logger.debug("Column model keeps %d longer components", len(higher))
    return dc, double_to_cube(dc, (0, n))


@dataclass
class CrossCheckReport:
    r_max: int
    checked: int = 0
    failures: List[str] = field(default_factory=list)
    pages: List[Dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_record(self) -> Dict:
        return {"r_max": self.r_max, "ok": self.ok, "checked": self.checked,
                "failures": list(self.failures), "pages": self.pages}


def cross_check(x: AnyFiltered, r_max: int) -> CrossCheckReport:
    """Chased d^r against the subquotient pages, plus E^∞ against gr H(total)"""
    report = CrossCheckReport(r_max)
    if isinstance(x, FilteredComplex):
        dc, _ = filtered_to_cubes(x, len(x.stages) - 1)
        mine = classical_pages(x, r_max)
        theirs = classical_pages(dc, r_max)
        for a, b in zip(mine, theirs):
            report.checked += 1
            if {k: v for k, v in a.entries.items() if v} != {k: v for k, v in b.entries.items() if v}:
                report.failures.append(f"E^{a.r} of the filtration differs from its column model")
    else:
        dc = x
    if dc.width < 2:
        return report
    pages = classical_pages(dc, r_max)
    report.pages = [page.to_record() for page in pages]
    cube = extend_cube(double_to_cube(dc))
    total = dc.total()
    pr = dc.p
    for page in pages:
        r = page.r
        for (p, q), reps in sorted(page.reps.items()):
            if not reps.shape[1] or p - r < 0:
                continue
            m = p + q
            source = dc.columns[p].homology(q)
            classes = source.project(dc.column_block(reps, m, p)).reshape(source.dim, reps.shape[1])
            chased = chase_d(cube, r, p, q, classes)
            target = dc.columns[p - r].homology(q + r - 1)
            direct = target.project(dc.column_block(matmul(total.diff(m), reps, pr), m - 1, p - r))
            direct = direct.reshape(target.dim, reps.shape[1])
            report.checked += 1
            if not chased.indeterminacy.contains((chased.value - direct) % pr):
                report.failures.append(f"d^{r} from ({p}, {q}) disagrees with the chase")
    report.checked += 1
    if e_infinity(dc) != graded_homology(dc):
        report.failures.append("E^∞ differs from the associated graded of H(total)")
    if report.failures:
        logger.warning("Cross-check found %d disagreements", len(report.failures))
    return report
