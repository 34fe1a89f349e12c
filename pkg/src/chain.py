#!/usr/bin/env python3

"""Non-negatively graded chain complexes over F_p and their standard constructions."""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from errors import InvariantBreach, PreconditionError, ValidationError
from exactalg import (Subspace, block_diag, complement, hstack, identity, image,
                      inverse, is_invertible, kernel, matmul, mod_p, quotient_basis,
                      solve_matrix, vstack, zeros)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GradedVS:
    """A graded vector space: dimensions per degree, no differential"""
    dims: Tuple[int, ...]
    p: int

    def dim(self, n: int) -> int:
        return self.dims[n] if 0 <= n < len(self.dims) else 0

    @property
    def top(self) -> int:
        return len(self.dims) - 1


@dataclass(frozen=True, eq=False)
class ChainComplex:
    """
    A chain complex C_0 <- C_1 <- ... <- C_top.
    d[n] is the differential out of degree n, of shape (dims[n-1], dims[n]); d[0] is 0×dims[0].
    """
    dims: Tuple[int, ...]
    d: Tuple[np.ndarray, ...]
    p: int
    _homology: Dict[int, "Homology"] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(x) for x in self.dims))
        object.__setattr__(self, "d", tuple(mod_p(m, self.p) for m in self.d))
        if len(self.d) != len(self.dims):
            raise ValidationError(
                f"Expected {len(self.dims)} differentials, got {len(self.d)}")
        for n, m in enumerate(self.d):
            expected = (self.dim(n - 1), self.dim(n))
            if m.shape != expected:
                raise ValidationError(
                    f"Differential has shape {m.shape}, expected {expected}", degree=n)
        for n in range(2, len(self.dims)):
            if np.any(matmul(self.d[n - 1], self.d[n], self.p)):
                raise ValidationError("d∘d is not zero", degree=n)

    @classmethod
    def build(cls, dims: Sequence[int], diffs: Dict[int, np.ndarray], p: int) -> "ChainComplex":
        """Build from the nonzero differentials; missing ones are zero"""
        dims = tuple(int(x) for x in dims)
        d = []
        for n in range(len(dims)):
            shape = (dims[n - 1] if n >= 1 else 0, dims[n])
            d.append(np.asarray(diffs[n], dtype=np.int64).reshape(shape)
                     if n in diffs and n >= 1 else zeros(*shape))
        return cls(dims, tuple(d), p)

    @classmethod
    def zero(cls, p: int) -> "ChainComplex":
        return cls((), (), p)

    def dim(self, n: int) -> int:
        return self.dims[n] if 0 <= n < len(self.dims) else 0

    def diff(self, n: int) -> np.ndarray:
        if 1 <= n < len(self.dims):
            return self.d[n]
        return zeros(self.dim(n - 1), self.dim(n))

    @property
    def top(self) -> int:
        return len(self.dims) - 1

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    def is_zero(self) -> bool:
        return self.total_dim == 0

    def homology(self, k: int) -> "Homology":
        if k not in self._homology:
            self._homology[k] = homology(self, k)
        return self._homology[k]

    def betti(self, upto: Optional[int] = None) -> List[int]:
        top = self.top + 1 if upto is None else upto
        return [self.homology(n).dim for n in range(top + 1)]

    def euler_characteristic(self) -> int:
        return sum((-1) ** n * x for n, x in enumerate(self.dims))

    def trimmed(self) -> "ChainComplex":
        top = len(self.dims)
        while top > 0 and self.dims[top - 1] == 0:
            top -= 1
        return ChainComplex(self.dims[:top], self.d[:top], self.p)

    def padded(self, top: int) -> "ChainComplex":
        dims = [self.dim(n) for n in range(top + 1)]
        return ChainComplex.build(dims, {n: self.diff(n) for n in range(1, top + 1)}, self.p)

    def same_as(self, other: "ChainComplex") -> bool:
        a, b = self.trimmed(), other.trimmed()
        return a.dims == b.dims and all(np.array_equal(x, y) for x, y in zip(a.d, b.d))


@dataclass(frozen=True, eq=False)
class ChainMap:
    """A degree-0 chain map; components[n] has shape (target.dim(n), source.dim(n))"""
    source: ChainComplex
    target: ChainComplex
    components: Tuple[np.ndarray, ...]

    def __post_init__(self):
        p = self.source.p
        top = max(self.source.top, self.target.top)
        comps = []
        for n in range(top + 1):
            m = self.components[n] if n < len(self.components) else None
            shape = (self.target.dim(n), self.source.dim(n))
            if m is None:
                m = zeros(*shape)
            m = mod_p(m, p)
            if m.shape != shape:
                raise ValidationError(
                    f"Chain map component has shape {m.shape}, expected {shape}", degree=n)
            comps.append(m)
        object.__setattr__(self, "components", tuple(comps))
        for n in range(1, top + 1):
            lhs = matmul(comps[n - 1], self.source.diff(n), p)
            rhs = matmul(self.target.diff(n), comps[n], p)
            if not np.array_equal(lhs, rhs):
                raise ValidationError("Map does not commute with the differential", degree=n)

    @property
    def p(self) -> int:
        return self.source.p

    def component(self, n: int) -> np.ndarray:
        if 0 <= n < len(self.components):
            return self.components[n]
        return zeros(self.target.dim(n), self.source.dim(n))


@dataclass(frozen=True, eq=False)
class GradedMap:
    """
    A map of graded objects allowing positive shifts.
    components[s][n] sends degree n of the source to degree n+s of the target.
    """
    source: GradedVS
    target: GradedVS
    components: Dict[int, Dict[int, np.ndarray]]

    def __post_init__(self):
        p = self.source.p
        clean = {}
        for s, per_degree in self.components.items():
            if s < 0:
                raise ValidationError(f"Graded maps only allow shifts ≥ 0, got {s}")
            comps = {}
            for n, m in per_degree.items():
                shape = (self.target.dim(n + s), self.source.dim(n))
                m = mod_p(m, p)
                if m.shape != shape:
                    raise ValidationError(
                        f"Shift {s} component has shape {m.shape}, expected {shape}", degree=n)
                if m.size and np.any(m):
                    comps[n] = m
            if comps:
                clean[s] = comps
        object.__setattr__(self, "components", clean)

    @property
    def p(self) -> int:
        return self.source.p

    @property
    def shifts(self) -> List[int]:
        return sorted(self.components)

    def component(self, shift: int, n: int) -> np.ndarray:
        m = self.components.get(shift, {}).get(n)
        if m is None:
            return zeros(self.target.dim(n + shift), self.source.dim(n))
        return m

    def then(self, other: "GradedMap") -> "GradedMap":
        """other ∘ self; shifts add"""
        p = self.p
        out: Dict[int, Dict[int, np.ndarray]] = {}
        for a, fa in self.components.items():
            for b, gb in other.components.items():
                for n, m in fa.items():
                    g = gb.get(n + a)
                    if g is None:
                        continue
                    slot = out.setdefault(a + b, {})
                    prod = matmul(g, m, p)
                    slot[n] = (slot[n] + prod) % p if n in slot else prod
        return GradedMap(self.source, other.target, out)

    def is_zero(self) -> bool:
        return not self.components


def graded_identity(v: GradedVS) -> GradedMap:
    return GradedMap(v, v, {0: {n: identity(x) for n, x in enumerate(v.dims) if x}})


@dataclass(frozen=True, eq=False)
class Homology:
    """H_k of a complex with deterministic cycle representatives"""
    degree: int
    dim: int
    cycle_reps: np.ndarray
    cycles: Subspace
    boundaries: Subspace
    p: int
    _frame: np.ndarray = field(repr=False, default=None)

    def project(self, v: np.ndarray) -> np.ndarray:
        """
        Homology coordinates of cycles (vector or columns of a matrix).
        Vanishes on boundaries.
        """
        v = np.asarray(v, dtype=np.int64)
        single = v.ndim == 1
        cols = v.reshape(self.cycles.ambient_dim, 1) if single else v
        x = solve_matrix(self._frame, cols, self.p)
        if x is None:
            raise PreconditionError("Projected vector is not a cycle", degree=self.degree)
        coords = x[self.boundaries.dim:]
        return coords[:, 0] if single else coords

    def contains_boundary(self, v: np.ndarray) -> bool:
        return self.boundaries.contains(v)


def homology(c: ChainComplex, k: int) -> Homology:
    if k < 0:
        raise PreconditionError(f"Homology degree must be ≥ 0, got {k}")
    cycles = kernel(c.diff(k), c.p)
    boundaries = image(c.diff(k + 1), c.p)
    reps = quotient_basis(boundaries, cycles)
    frame = hstack([boundaries.basis, reps], c.dim(k))
    return Homology(k, reps.shape[1], reps, cycles, boundaries, c.p, frame)


def induced_map(f: ChainMap, k: int) -> np.ndarray:
    """Matrix of H_k(f) in the deterministic homology bases"""
    hs = f.source.homology(k)
    ht = f.target.homology(k)
    return ht.project(matmul(f.component(k), hs.cycle_reps, f.p)).reshape(ht.dim, hs.dim)


def sphere(dimV: int, n: int, p: int) -> ChainComplex:
    """K(V, n): V concentrated in degree n"""
    if dimV < 0 or n < 0:
        raise PreconditionError("sphere needs dimV ≥ 0 and n ≥ 0")
    dims = [0] * n + [dimV]
    return ChainComplex.build(dims, {}, p)


def disk(dimV: int, m: int, p: int) -> ChainComplex:
    """CK(V, m): V in degrees m and m+1 joined by the identity"""
    if dimV < 0 or m < 0:
        raise PreconditionError("disk needs dimV ≥ 0 and m ≥ 0")
    dims = [0] * m + [dimV, dimV]
    return ChainComplex.build(dims, {m + 1: identity(dimV)}, p)


def direct_sum(*cs: ChainComplex) -> ChainComplex:
    p = cs[0].p
    top = max(c.top for c in cs)
    dims = [sum(c.dim(n) for c in cs) for n in range(top + 1)]
    diffs = {n: block_diag(*[c.diff(n) for c in cs]) for n in range(1, top + 1)}
    return ChainComplex.build(dims, diffs, p)


def identity_map(c: ChainComplex) -> ChainMap:
    return ChainMap(c, c, tuple(identity(x) for x in c.dims))


def zero_map(source: ChainComplex, target: ChainComplex) -> ChainMap:
    return ChainMap(source, target, ())


def compose(f: ChainMap, g: ChainMap) -> ChainMap:
    """g ∘ f"""
    top = max(f.source.top, g.target.top, f.target.top)
    return ChainMap(f.source, g.target,
                    tuple(matmul(g.component(n), f.component(n), f.p) for n in range(top + 1)))


def add_maps(f: ChainMap, g: ChainMap, sign: int = 1) -> ChainMap:
    top = max(f.source.top, f.target.top)
    return ChainMap(f.source, f.target,
                    tuple((f.component(n) + sign * g.component(n)) % f.p for n in range(top + 1)))


def is_quasi_iso(f: ChainMap) -> bool:
    top = max(f.source.top, f.target.top)
    for k in range(top + 1):
        hs, ht = f.source.homology(k).dim, f.target.homology(k).dim
        if hs != ht or not is_invertible(induced_map(f, k), f.p):
            return False
    return True


def cone(f: ChainMap) -> ChainComplex:
    """cone_n = target_n ⊕ source_{n-1}, d(t, s) = (d t + f s, -d s)"""
    src, tgt, p = f.source, f.target, f.p
    top = max(tgt.top, src.top + 1)
    dims = [tgt.dim(n) + src.dim(n - 1) for n in range(top + 1)]
    diffs = {}
    for n in range(1, top + 1):
        upper = hstack([tgt.diff(n), f.component(n - 1)], tgt.dim(n - 1))
        lower = hstack([zeros(src.dim(n - 2), tgt.dim(n)), (-src.diff(n - 1)) % p],
                       src.dim(n - 2))
        diffs[n] = vstack([upper, lower], dims[n])
    return ChainComplex.build(dims, diffs, p)


def cone_inclusion(f: ChainMap) -> ChainMap:
    """target -> cone(f)"""
    c = cone(f)
    return ChainMap(f.target, c, tuple(
        vstack([identity(f.target.dim(n)), zeros(f.source.dim(n - 1), f.target.dim(n))],
               f.target.dim(n))
        for n in range(c.top + 1)))


def _shift(c: ChainComplex, k: int, sign: int) -> ChainComplex:
    dims = [0] * k + list(c.dims)
    diffs = {n + k: (sign * c.diff(n)) % c.p for n in range(1, c.top + 1)}
    return ChainComplex.build(dims, diffs, c.p)


def reduced_suspend(c: ChainComplex, k: int = 1) -> ChainComplex:
    """Shift every degree up by k, keeping the differential"""
    return _shift(c, k, 1)


def suspend(c: ChainComplex, k: int = 1) -> ChainComplex:
    """k-fold cone on the map to zero"""
    out = c
    for _ in range(k):
        out = cone(zero_map(out, ChainComplex.zero(c.p)))
    return out


def truncate(c: ChainComplex, k: int) -> Tuple[ChainComplex, ChainMap]:
    """
    τ_k c: degrees < k unchanged, degree k the cokernel of d_{k+1}, zero above.
    :return: (truncation, surjection p_k: c -> τ_k c)
    """
    if k < 0:
        raise PreconditionError(f"Truncation degree must be ≥ 0, got {k}")
    p = c.p
    boundaries = image(c.diff(k + 1), p)
    q = complement(boundaries)
    dims = [c.dim(n) for n in range(k)] + [q.dim]
    diffs = {n: c.diff(n) for n in range(1, k)}
    if k >= 1:
        diffs[k] = matmul(c.diff(k), q.basis, p)
    trunc = ChainComplex.build(dims, diffs, p)
    frame = hstack([boundaries.basis, q.basis], c.dim(k))
    coords = solve_matrix(frame, identity(c.dim(k)), p)
    comps = [identity(c.dim(n)) for n in range(k)] + [coords[boundaries.dim:]]
    return trunc, ChainMap(c, trunc, tuple(comps))


def conn_cover(c: ChainComplex, k: int) -> Tuple[ChainComplex, ChainMap]:
    """
    c⟨k⟩: degrees > k unchanged, degree k the cycles Z_k, zero below.
    :return: (cover, injection ι_k: cover -> c)
    """
    if k < 0:
        raise PreconditionError(f"Cover degree must be ≥ 0, got {k}")
    p = c.p
    cycles = kernel(c.diff(k), p)
    top = max(c.top, k)
    dims = [0] * k + [cycles.dim] + [c.dim(n) for n in range(k + 1, top + 1)]
    diffs = {n: c.diff(n) for n in range(k + 2, top + 1)}
    if top >= k + 1:
        diffs[k + 1] = cycles.coordinates(c.diff(k + 1)).reshape(cycles.dim, c.dim(k + 1))
    cover = ChainComplex.build(dims, diffs, p)
    comps = [zeros(c.dim(n), 0) for n in range(k)] + [cycles.basis] + \
            [identity(c.dim(n)) for n in range(k + 1, top + 1)]
    return cover, ChainMap(cover, c, tuple(comps))


@dataclass(frozen=True)
class SplitResult:
    """Sphere/disk decomposition of a complex"""
    summands: List[Tuple[str, int, int]]
    change_of_basis: Tuple[np.ndarray, ...]


def split_spheres_disks(c: ChainComplex) -> SplitResult:
    """
    Per degree n the basis [d(T_{n+1}) | H_n reps | T_n], T_n a complement of the cycles.
    In this basis d sends the T_n columns onto the d(T_n) columns of degree n-1.
    """
    p = c.p
    tops = [quotient_basis(kernel(c.diff(n), p), Subspace.full(c.dim(n), p))
            for n in range(c.top + 2)]
    bases = []
    summands: List[Tuple[str, int, int]] = []
    for n in range(c.top + 1):
        bounding = matmul(c.diff(n + 1), tops[n + 1], p)
        reps = c.homology(n).cycle_reps
        basis = hstack([bounding, reps, tops[n]], c.dim(n))
        if not is_invertible(basis, p):
            raise InvariantBreach(f"Sphere/disk splitting is not a basis in degree {n}")
        bases.append(basis)
        if reps.shape[1]:
            summands.append(("sphere", reps.shape[1], n))
        if bounding.shape[1]:
            summands.append(("disk", bounding.shape[1], n))
    summands.sort(key=lambda s: (s[2], s[0] != "disk"))
    return SplitResult(summands, tuple(bases))


def standard_form(c: ChainComplex, split: SplitResult) -> ChainComplex:
    """The differential written in the split basis"""
    p = c.p
    diffs = {}
    for n in range(1, c.top + 1):
        diffs[n] = matmul(inverse(split.change_of_basis[n - 1], p),
                          matmul(c.diff(n), split.change_of_basis[n], p), p)
    return ChainComplex.build(c.dims, diffs, p)


@dataclass(frozen=True, eq=False)
class FiberSequence:
    """Fib(f) -> source -> target, with the loop inclusion Ω target -> Fib(f)"""
    fiber: ChainComplex
    projection: ChainMap
    loop: ChainComplex
    loop_inclusion: ChainMap


def fiber(f: ChainMap) -> FiberSequence:
    """
    Mapping-path fiber Fib_n = source_n ⊕ target_{n+1}, d(s, t) = (d s, f s - d t).
    Degree 0 is the connective cover: the kernel of (s, t) ↦ f_0 s - d_1 t.
    """
    src, tgt, p = f.source, f.target, f.p
    top = max(src.top, tgt.top - 1, 0)

    def raw_diff(n):
        upper = hstack([src.diff(n), zeros(src.dim(n - 1), tgt.dim(n + 1))], src.dim(n - 1))
        lower = hstack([f.component(n), (-tgt.diff(n + 1)) % p], tgt.dim(n))
        return vstack([upper, lower], src.dim(n) + tgt.dim(n + 1))

    base = kernel(raw_diff(0), p)
    dims = [base.dim] + [src.dim(n) + tgt.dim(n + 1) for n in range(1, top + 1)]
    diffs = {n: raw_diff(n) for n in range(2, top + 1)}
    if top >= 1:
        diffs[1] = base.coordinates(raw_diff(1)).reshape(base.dim, dims[1])
    fib = ChainComplex.build(dims, diffs, p)

    proj = [matmul(hstack([identity(src.dim(0)), zeros(src.dim(0), tgt.dim(1))], src.dim(0)),
                   base.basis, p)]
    proj += [hstack([identity(src.dim(n)), zeros(src.dim(n), tgt.dim(n + 1))], src.dim(n))
             for n in range(1, top + 1)]

    # Ω target: degree n is target_{n+1} with differential -d, connective at degree 0
    cycles1 = kernel(tgt.diff(1), p)
    ldims = [cycles1.dim] + [tgt.dim(n + 1) for n in range(1, top + 1)]
    ldiffs = {n: (-tgt.diff(n + 1)) % p for n in range(2, top + 1)}
    if top >= 1:
        ldiffs[1] = cycles1.coordinates((-tgt.diff(2)) % p).reshape(cycles1.dim, ldims[1])
    loop = ChainComplex.build(ldims, ldiffs, p)
    incl0 = base.coordinates(
        vstack([zeros(src.dim(0), cycles1.dim), cycles1.basis], cycles1.dim)
    ).reshape(base.dim, cycles1.dim)
    incl = [incl0] + [vstack([zeros(src.dim(n), tgt.dim(n + 1)), identity(tgt.dim(n + 1))],
                             tgt.dim(n + 1)) for n in range(1, top + 1)]
    return FiberSequence(fib, ChainMap(fib, src, tuple(proj)), loop,
                         ChainMap(loop, fib, tuple(incl)))


def stack_maps(f: ChainMap, g: ChainMap, target: ChainComplex, sign: int = 1) -> ChainMap:
    """(f, sign·g): A -> B ⊕ C for f: A -> B, g: A -> C"""
    top = max(target.top, f.source.top)
    comps = tuple(vstack([f.component(n), (sign * g.component(n)) % f.p], f.source.dim(n))
                  for n in range(top + 1))
    return ChainMap(f.source, target, comps)


def double_mapping_cylinder(f: ChainMap, g: ChainMap) -> ChainComplex:
    """Homotopy pushout of B <- A -> C: the cone of (f, -g): A -> B ⊕ C"""
    total = direct_sum(f.target, g.target)
    return cone(stack_maps(f, g, total, sign=-1))


@dataclass(frozen=True, eq=False)
class Cylinder:
    """Mapping cylinder of g: A -> B with its inclusion of A and projection onto B"""
    complex: ChainComplex
    inclusion: ChainMap
    projection: ChainMap
    section: ChainMap


def mapping_cylinder(g: ChainMap) -> Cylinder:
    """Cyl_n = A_n ⊕ A_{n-1} ⊕ B_n, d(a, s, b) = (d a + s, -d s, d b - g s)"""
    a, b, p = g.source, g.target, g.p
    top = max(a.top + 1, b.top)
    dims = [a.dim(n) + a.dim(n - 1) + b.dim(n) for n in range(top + 1)]
    diffs = {}
    for n in range(1, top + 1):
        rows = [
            hstack([a.diff(n), identity(a.dim(n - 1)), zeros(a.dim(n - 1), b.dim(n))],
                   a.dim(n - 1)),
            hstack([zeros(a.dim(n - 2), a.dim(n)), (-a.diff(n - 1)) % p,
                    zeros(a.dim(n - 2), b.dim(n))], a.dim(n - 2)),
            hstack([zeros(b.dim(n - 1), a.dim(n)), (-g.component(n - 1)) % p, b.diff(n)],
                   b.dim(n - 1)),
        ]
        diffs[n] = vstack(rows, dims[n])
    cyl = ChainComplex.build(dims, diffs, p)
    inc = tuple(vstack([identity(a.dim(n)), zeros(a.dim(n - 1) + b.dim(n), a.dim(n))],
                       a.dim(n)) for n in range(top + 1))
    proj = tuple(hstack([g.component(n), zeros(b.dim(n), a.dim(n - 1)), identity(b.dim(n))],
                        b.dim(n)) for n in range(top + 1))
    sec = tuple(vstack([zeros(a.dim(n) + a.dim(n - 1), b.dim(n)), identity(b.dim(n))],
                       b.dim(n)) for n in range(top + 1))
    return Cylinder(cyl, ChainMap(a, cyl, inc), ChainMap(cyl, b, proj), ChainMap(b, cyl, sec))
