#!/usr/bin/env python3

"""
Secondary structure of a diagram: kernels along incomparable families,
the values of differentials on them, inclusion–exclusion over fans,
higher interval operations, and the global derived diagram.
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from chain import ChainComplex, GradedMap, GradedVS, induced_map
from diagram import (Diagram, GradedDiagram, HybridDiagram, bar_cocone, bar_complex,
                     colimit_comparison, colimit_over, to_hybrid)
from errors import DerivedError, InvariantBreach, PreconditionError
from exactalg import (Subspace, hstack, identity, image, image_of, intersect, inverse, kernel,
                      matmul, preimage, rank, restrict_to, solve_matrix, subspace_sum, zeros)
from poset import (DEFAULT_MAX_GAMMA, DerivedIndex, PathObject, Poset, derived_index,
                   incomparable_families, kernel_label, path_morphisms)

logger = logging.getLogger(__name__)

AnyDiagram = Union[Diagram, HybridDiagram]


def _chain_level(x: AnyDiagram, k: int) -> Diagram:
    if isinstance(x, HybridDiagram):
        if k < x.k:
            raise PreconditionError(f"Degree {k} lies in the formal part of a {x.k}-hybrid")
        return x.high
    return x


def homology_dim(x: AnyDiagram, obj: str, k: int) -> int:
    if isinstance(x, HybridDiagram) and k < x.k:
        return x.low.values[obj].dim(k)
    return _chain_level(x, k).objects[obj].homology(k).dim


def homology_map(x: AnyDiagram, a: str, b: str, k: int) -> np.ndarray:
    """H_k(a -> b) in the deterministic homology bases of x"""
    if isinstance(x, HybridDiagram) and k < x.k:
        return x.low.map_between(a, b).component(0, k)
    return induced_map(_chain_level(x, k).map_between(a, b), k)


@dataclass(frozen=True, eq=False)
class KernelFamily:
    """K^α_Γ' = ∩_{γ∈Γ'} Ker(H_k X(α) -> H_k X(γ)) for every nonempty Γ' of the families"""
    alpha: str
    degree: int
    kernels: Dict[Tuple[str, ...], Subspace]

    def of(self, gammas: Sequence[str]) -> Subspace:
        key = tuple(gammas)
        if key not in self.kernels:
            raise PreconditionError(f"No kernel recorded for {key}", label=self.alpha)
        return self.kernels[key]

    def is_monotone(self) -> bool:
        for big, kb in self.kernels.items():
            for small, ks in self.kernels.items():
                if set(small) < set(big) and not ks.contains_space(kb):
                    return False
        return True


def kernels(d: AnyDiagram, alpha: str, k: int, families: Optional[List[PathObject]] = None,
            max_gamma: int = DEFAULT_MAX_GAMMA) -> KernelFamily:
    p = d.p
    index = d.index
    if alpha not in index:
        raise PreconditionError("Kernel root is not in the index", label=alpha)
    if families is None:
        families = incomparable_families(index, alpha, max_gamma=max_gamma)
    single: Dict[str, Subspace] = {}
    out: Dict[Tuple[str, ...], Subspace] = {}
    for fam in families:
        if fam.alpha != alpha:
            raise PreconditionError("Family rooted elsewhere", label=fam.alpha)
        gammas = index.sort(fam.gammas)
        for g in gammas:
            if g not in single:
                single[g] = kernel(homology_map(d, alpha, g, k), p)
        for size in range(1, len(gammas) + 1):
            for sub in combinations(gammas, size):
                if sub in out:
                    continue
                acc = single[sub[0]]
                for g in sub[1:]:
                    acc = intersect(acc, single[g])
                out[sub] = acc
    return KernelFamily(alpha, k, out)


def _label_order(gammas: Sequence[str]) -> Tuple[str, str]:
    g, dl = sorted(gammas)
    return g, dl


def _chase(d: Diagram, alpha: str, gamma: str, delta: str, beta: str, k: int,
           xs: np.ndarray) -> np.ndarray:
    """Class of f_γβ b_γ - f_δβ b_δ for each column x of xs, with d b = f_α(z_x)"""
    p = d.p
    ha = d.objects[alpha].homology(k)
    hb = d.objects[beta].homology(k + 1)
    z = matmul(ha.cycle_reps, xs, p)
    total = zeros(d.objects[beta].dim(k + 1), xs.shape[1])
    for obj, sign in ((gamma, 1), (delta, -1)):
        target = matmul(d.map_between(alpha, obj).component(k), z, p)
        b = solve_matrix(d.objects[obj].diff(k + 1), target, p)
        if b is None:
            raise DerivedError(f"Class does not die entering {obj}", label=obj, degree=k)
        total = (total + sign * matmul(d.map_between(obj, beta).component(k + 1), b, p)) % p
    return hb.project(total).reshape(hb.dim, xs.shape[1])


@dataclass(frozen=True, eq=False)
class DifferentialValue:
    """
    Value of the pair differential on K^α_{γδ}: H_k -> H_{k+1}(β) of degree +1.
    matrix columns follow kernel.basis; gammas are in label order.
    """
    alpha: str
    gammas: Tuple[str, str]
    beta: str
    degree: int
    kernel: Subspace
    matrix: np.ndarray
    indeterminacy: Subspace

    @property
    def rank(self) -> int:
        return rank(self.matrix, self.kernel.p)

    @property
    def value(self) -> GradedMap:
        p = self.kernel.p
        src = GradedVS(tuple([0] * self.degree + [self.kernel.dim]), p)
        tgt = GradedVS(tuple([0] * (self.degree + 1) + [self.matrix.shape[0]]), p)
        return GradedMap(src, tgt, {1: {self.degree: self.matrix}})

    def to_record(self) -> Dict:
        return {
            "alpha": self.alpha,
            "gammas": list(self.gammas),
            "beta": self.beta,
            "degree": self.degree,
            "kernel_dim": self.kernel.dim,
            "rank": self.rank,
            "matrix": self.matrix.tolist(),
            "indeterminacy_dim": self.indeterminacy.dim,
        }


def _indeterminacy(d: Diagram, sources: Sequence[str], beta: str, degree: int) -> Subspace:
    p = d.p
    dim = d.objects[beta].homology(degree).dim
    gens = [induced_map(d.map_between(s, beta), degree) for s in sources]
    return Subspace.span(hstack(gens, dim), p, dim)


def _pair_value(d: Diagram, alpha: str, pair: Sequence[str], beta: str, k: int,
                kern: Subspace) -> DifferentialValue:
    gamma, delta = _label_order(pair)
    for g in (gamma, delta):
        if not d.index.leq(g, beta):
            raise PreconditionError(f"{beta} is not above {g}", label=beta)
    matrix = _chase(d, alpha, gamma, delta, beta, k, kern.basis)
    ind = _indeterminacy(d, (gamma, delta), beta, k + 1)
    return DifferentialValue(alpha, (gamma, delta), beta, k, kern, matrix, ind)


def eval_value(d: AnyDiagram, path: PathObject, k: int) -> DifferentialValue:
    """
    Chase each basis class x of K^α_{γδ} to H_{k+1}(β).
    The value is defined modulo the images of H_{k+1} of γ and δ, reported as indeterminacy.
    """
    if len(path.gammas) != 2 or path.beta is None:
        raise PreconditionError("eval_value needs a pair with an upper bound", label=path.alpha)
    chain = _chain_level(d, k)
    gamma, delta = path.gammas
    if chain.index.comparable(gamma, delta):
        raise PreconditionError(f"{gamma} and {delta} are comparable", label=path.alpha)
    pair = chain.index.sort(path.gammas)
    kern = kernels(d, path.alpha, k, [PathObject(path.alpha, pair, path.beta)]).of(pair)
    return _pair_value(chain, path.alpha, pair, path.beta, k, kern)


def value_of(d: AnyDiagram, path: PathObject, k: int, x: np.ndarray) -> np.ndarray:
    """Value on a single H_k(α) class; DerivedError when x does not die at both gammas"""
    chain = _chain_level(d, k)
    gamma, delta = _label_order(path.gammas)
    xs = np.asarray(x, dtype=np.int64).reshape(-1, 1)
    return _chase(chain, path.alpha, gamma, delta, path.beta, k, xs)[:, 0]


def relative_nerve(index: Poset, alpha: str, beta: str,
                   p: int) -> Tuple[ChainComplex, List[List[Tuple[str, ...]]]]:
    """
    Chains of [α, β) starting at α, modulo those of (α, β).
    Degree s holds the chains α < y1 < ... < ys, with boundary Σ_{i≥1} (-1)^i ∂_i.
    """
    inner = [y for y in index.objects if index.lt(alpha, y) and index.lt(y, beta)]
    by_length: List[List[Tuple[str, ...]]] = [[(alpha,)]]
    for c in index.chains(inner):
        s = len(c)
        while len(by_length) <= s:
            by_length.append([])
        by_length[s].append((alpha,) + c)
    pos = [{c: i for i, c in enumerate(level)} for level in by_length]
    diffs = {}
    for s in range(1, len(by_length)):
        m = zeros(len(by_length[s - 1]), len(by_length[s]))
        for col, c in enumerate(by_length[s]):
            for i in range(1, s + 1):
                face = c[:i] + c[i + 1:]
                m[pos[s - 1][face], col] += -1 if i % 2 else 1
        diffs[s] = m
    return ChainComplex.build([len(level) for level in by_length], diffs, p), by_length


@dataclass(frozen=True, eq=False)
class IntervalOperation:
    """
    A differential of order r from H_j X(α) to H_{j+r-1} X(β), attached to a class ζ
    of the relative nerve of [α, β) in degree r-1.
    """
    alpha: str
    beta: str
    order: int
    source_degree: int
    zeta: np.ndarray
    domain: Subspace
    matrix: np.ndarray
    indeterminacy: Subspace

    @property
    def target_degree(self) -> int:
        return self.source_degree + self.order - 1

    @property
    def rank(self) -> int:
        return rank(self.matrix, self.domain.p)

    def to_record(self) -> Dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "order": self.order,
            "source_degree": self.source_degree,
            "target_degree": self.target_degree,
            "domain_dim": self.domain.dim,
            "rank": self.rank,
            "matrix": self.matrix.tolist(),
            "indeterminacy_dim": self.indeterminacy.dim,
        }


def interval_operation(d: Diagram, alpha: str, beta: str, j: int, order: int) -> List[IntervalOperation]:
    """
    For each nerve class ζ: x ⊗ ζ has boundary in the bar complex of (α, β); where that boundary
    is itself a boundary y, the value is the class of -ε(y) in H_{j+order-1} X(β).
    """
    if order < 2:
        raise PreconditionError(f"Interval operations start at order 2, got {order}")
    if not d.index.lt(alpha, beta):
        raise PreconditionError(f"{alpha} is not below {beta}", label=alpha)
    p = d.p
    s = order - 1
    n = s + j
    nerve, by_length = relative_nerve(d.index, alpha, beta, p)
    if s >= len(by_length):
        return []
    hz = nerve.homology(s)
    ha = d.objects[alpha].homology(j)
    if hz.dim == 0 or ha.dim == 0:
        return []
    inner = [y for y in d.index.objects if d.index.lt(alpha, y) and d.index.lt(y, beta)]
    bar = bar_complex(d, inner)
    d_q = bar.complex.diff(n)
    eps = bar_cocone(d, bar, beta).component(n)
    hb = d.objects[beta].homology(n)
    ops = []
    for col in range(hz.dim):
        zeta = hz.cycle_reps[:, col]
        t = zeros(bar.complex.dim(n - 1), ha.dim)
        for idx, c in enumerate(by_length[s]):
            coeff = int(zeta[idx])
            if not coeff:
                continue
            pushed = matmul(d.map_between(alpha, c[1]).component(j), ha.cycle_reps, p)
            off, size = bar.blocks[n - 1][(c[1:], j)]
            t[off:off + size] = (t[off:off + size] + coeff * pushed) % p
        domain = preimage(t, image(d_q, p), p)
        ys = solve_matrix(d_q, matmul(t, domain.basis, p), p)
        if ys is None:
            raise InvariantBreach(f"Bar boundary for {alpha}<{beta} lost its preimage")
        values = (-matmul(eps, ys, p)) % p
        matrix = hb.project(values).reshape(hb.dim, domain.dim)
        cycles = kernel(d_q, p).basis
        ind_gens = hb.project(matmul(eps, cycles, p)).reshape(hb.dim, cycles.shape[1])
        ops.append(IntervalOperation(alpha, beta, order, j, zeta, domain, matrix,
                                     Subspace.span(ind_gens, p, hb.dim)))
    return ops


def interval_operations(d: Diagram, target_degree: int, min_order: int = 2) -> List[IntervalOperation]:
    """Every interval operation landing in H_target_degree whose source and target are nonzero"""
    out = []
    for alpha in d.index.objects:
        for beta in d.index.above(alpha):
            if d.objects[beta].homology(target_degree).dim == 0:
                continue
            for order in range(max(min_order, 2), target_degree + 2):
                j = target_degree - (order - 1)
                if j < 0 or d.objects[alpha].homology(j).dim == 0:
                    continue
                out.extend(interval_operation(d, alpha, beta, j, order))
    logger.debug("%d interval operations into degree %d", len(out), target_degree)
    return out


@dataclass(frozen=True, eq=False)
class PartialDerived:
    """
    One fan (α; Γ; β) in degree k.
    boundaries[t] sends ⊕_{|S|=t} K_S to ⊕_{|S|=t-1} K_S (t ≥ 3); pair_map sends ⊕_{|S|=2} K_S
    into H_{k+1} of the fan colimit, and psi carries that to H_{k+1}(β).
    """
    path: PathObject
    degree: int
    kernels: KernelFamily
    subsets: Dict[int, List[Tuple[str, ...]]]
    boundaries: Dict[int, np.ndarray]
    pair_map: np.ndarray
    psi: np.ndarray
    values: List[DifferentialValue]
    indeterminacy: Subspace
    hocolim_dim: int
    exact: bool
    defect: int

    def to_record(self) -> Dict:
        return {
            "path": self.path.label(),
            "degree": self.degree,
            "kernel_dims": {",".join(s): self.kernels.of(s).dim
                            for t in sorted(self.subsets) for s in self.subsets[t]},
            "hocolim_dim": self.hocolim_dim,
            "exact": self.exact,
            "defect": self.defect,
            "values": [v.to_record() for v in self.values],
            "indeterminacy_dim": self.indeterminacy.dim,
        }


def inclusion_exclusion(d: AnyDiagram, path: PathObject, k: int) -> PartialDerived:
    """
    Build the alternating chain of kernels over a fan and compare it with H_{k+1} of the fan
    colimit modulo the images of H_{k+1} X(γ). Pairs in index order carry b_first - b_second.
    """
    if len(path.gammas) < 2 or path.beta is None:
        raise PreconditionError("inclusion_exclusion needs |Γ| ≥ 2 and a join", label=path.alpha)
    chain = _chain_level(d, k)
    p = chain.p
    alpha, beta = path.alpha, path.beta
    gammas = chain.index.sort(path.gammas)
    kf = kernels(d, alpha, k, [PathObject(alpha, gammas, beta)])
    m = len(gammas)
    subsets = {t: list(combinations(gammas, t)) for t in range(1, m + 1)}

    def level_dim(t):
        return sum(kf.of(s).dim for s in subsets[t])

    boundaries = {}
    for t in range(3, m + 1):
        rows, cols = level_dim(t - 1), level_dim(t)
        out = zeros(rows, cols)
        row_off = {}
        pos = 0
        for s in subsets[t - 1]:
            row_off[s] = pos
            pos += kf.of(s).dim
        col = 0
        for s in subsets[t]:
            ks = kf.of(s)
            for i, g in enumerate(s):
                face = tuple(x for x in s if x != g)
                kface = kf.of(face)
                incl = restrict_to(identity(ks.ambient_dim), ks.basis, kface, p)
                sign = -1 if i % 2 else 1
                out[row_off[face]:row_off[face] + kface.dim, col:col + ks.dim] += sign * incl
            col += ks.dim
        boundaries[t] = out % p

    fan = [alpha] + list(gammas)
    col_fan = colimit_over(chain, fan)
    hc = col_fan.complex.homology(k + 1)
    ha = chain.objects[alpha].homology(k)
    pair_cols = []
    for s in subsets[2]:
        ks = kf.of(s)
        z = matmul(ha.cycle_reps, ks.basis, p)
        total = zeros(col_fan.complex.dim(k + 1), ks.dim)
        for obj, sign in ((s[0], 1), (s[1], -1)):
            target = matmul(chain.map_between(alpha, obj).component(k), z, p)
            b = solve_matrix(chain.objects[obj].diff(k + 1), target, p)
            if b is None:
                raise DerivedError("Kernel class does not die", label=obj, degree=k)
            total = (total + sign * matmul(col_fan.legs[obj].component(k + 1), b, p)) % p
        pair_cols.append(hc.project(total).reshape(hc.dim, ks.dim))
    pair_map = hstack(pair_cols, hc.dim)

    if 3 in boundaries and np.any(matmul(pair_map, boundaries[3], p)):
        raise InvariantBreach(f"Pair classes fail the cocycle identity over {path.label()}")
    for t in range(4, m + 1):
        if np.any(matmul(boundaries[t - 1], boundaries[t], p)):
            raise InvariantBreach(f"Kernel chain is not a complex at level {t}")

    legs_image = Subspace.span(hstack([induced_map(col_fan.legs[g], k + 1) for g in gammas], hc.dim),
                               p, hc.dim)
    reached = subspace_sum(legs_image, Subspace.span(pair_map, p, hc.dim))
    quotient_dim = hc.dim - legs_image.dim
    pair_rank = reached.dim - legs_image.dim
    defect = quotient_dim - pair_rank
    exact = defect == 0
    # kernel of the pair map modulo legs must be the image of the triple boundary
    joint = hstack([legs_image.basis, pair_map], hc.dim)
    pair_kernel = level_dim(2) - (rank(joint, p) - legs_image.dim)
    if pair_kernel != (rank(boundaries[3], p) if 3 in boundaries else 0):
        exact = False
    for t in range(3, m + 1):
        ker_dim = level_dim(t) - rank(boundaries[t], p)
        im_dim = rank(boundaries[t + 1], p) if t + 1 in boundaries else 0
        if ker_dim != im_dim:
            exact = False

    comparison = colimit_comparison(chain, col_fan, beta)
    psi = induced_map(comparison, k + 1)
    values = []
    for s in subsets[2]:
        kern = kf.of(s)
        v = _pair_value(chain, alpha, s, beta, k, kern)
        sign = 1 if v.gammas == s else -1
        offset = sum(kf.of(t).dim for t in subsets[2][:subsets[2].index(s)])
        composite = matmul(psi, pair_map[:, offset:offset + kern.dim], p)
        if not np.array_equal(composite, (sign * v.matrix) % p):
            raise InvariantBreach(f"Evaluation through the fan colimit disagrees for {s}")
        values.append(v)
    ind = _indeterminacy(chain, gammas, beta, k + 1)
    if not exact:
        logger.info("Fan %s is not coordinated by its pairs (defect %d)", path.label(), defect)
    return PartialDerived(PathObject(alpha, gammas, beta), k, kf, subsets, boundaries, pair_map,
                          psi, values, ind, hc.dim, exact, defect)


@dataclass(frozen=True, eq=False)
class GlobalDerived:
    """
    Derived diagram at level k over the derived index of the base lattice.
    Homology bases are those of the source diagram; shift +1 arrows carry pair values.
    The arrow from a kernel object of three or more gammas to its join carries the value of
    its first pair; fan_values keeps the value of every pair on that kernel.
    """
    index: DerivedIndex
    k: int
    diagram: GradedDiagram
    kernels: Dict[str, KernelFamily]
    pair_values: Dict[str, List[DifferentialValue]]
    partials: List[PartialDerived]
    higher: List[IntervalOperation]
    source: Diagram
    earlier: Tuple["GlobalDerived", ...] = ()
    fan_values: Dict[str, List[DifferentialValue]] = field(default_factory=dict)

    def all_pair_values(self) -> List[DifferentialValue]:
        out = [v for g in self.earlier for vs in g.pair_values.values() for v in vs]
        return out + [v for vs in self.pair_values.values() for v in vs]

    def to_record(self) -> Dict:
        return {
            "k": self.k,
            "index": {
                "objects": list(self.index.poset.objects),
                "kernel_objects": sorted(self.index.kernel_objects),
                "pullback_objects": sorted(self.index.pullback_objects),
            },
            "diagram": self.diagram.to_record(),
            "values": {label: [v.to_record() for v in vs]
                       for label, vs in sorted(self.pair_values.items())},
            "fan_values": {label: [v.to_record() for v in vs]
                           for label, vs in sorted(self.fan_values.items())},
            "fans": [pd.to_record() for pd in self.partials],
            "higher": [op.to_record() for op in self.higher],
        }


def _to_source(h: HybridDiagram, obj: str, degree: int) -> np.ndarray:
    return h.to_source[obj][degree]


def _convert_value(h: HybridDiagram, v: DifferentialValue, kern_x: Subspace) -> DifferentialValue:
    """Re-express a pair value computed on the chain-level part in source homology bases"""
    p = h.p
    t_alpha = _to_source(h, v.alpha, v.degree)
    t_beta = _to_source(h, v.beta, v.degree + 1)
    xs = matmul(inverse(t_alpha, p), kern_x.basis, p)
    matrix = matmul(t_beta, _chase(h.high, v.alpha, v.gammas[0], v.gammas[1], v.beta, v.degree, xs), p)
    return DifferentialValue(v.alpha, v.gammas, v.beta, v.degree, kern_x, matrix,
                             image_of(t_beta, v.indeterminacy, p))


def global_derived(h: AnyDiagram, max_gamma: int = DEFAULT_MAX_GAMMA) -> GlobalDerived:
    if isinstance(h, Diagram):
        h = to_hybrid(h, 0)
    p = h.p
    k = h.k
    src = h.source
    base = src.index
    if any(k + 1 not in h.to_source.get(o, {}) for o in base.objects):
        raise PreconditionError(f"Hybrid carries no degree {k + 1} identification")

    families: List[PathObject] = []
    kfams: Dict[str, KernelFamily] = {}
    for alpha in base.objects:
        if src.objects[alpha].homology(k).dim == 0:
            continue
        fams = incomparable_families(base, alpha, max_gamma=max_gamma)
        fams = [f for f in fams if f.beta is not None]
        if not fams:
            continue
        kf_high = kernels(h, alpha, k, fams)
        t_alpha = _to_source(h, alpha, k)
        kf = KernelFamily(alpha, k, {g: image_of(t_alpha, s, p) for g, s in kf_high.kernels.items()})
        keep = [f for f in fams if kf.of(f.gammas).dim]
        if keep:
            kfams[alpha] = kf
            families.extend(keep)
    dindex = derived_index(base, families, max_gamma=max_gamma)

    values: Dict[str, GradedVS] = {}
    for o in base.objects:
        values[o] = GradedVS(tuple(src.objects[o].homology(i).dim for i in range(k + 2)), p)

    def at_k(dim):
        return GradedVS(tuple([0] * k + [dim]), p)

    kern_of: Dict[str, Subspace] = {}
    for label, (alpha, gammas) in dindex.kernel_objects.items():
        kern_of[label] = kfams[alpha].of(gammas)
        values[label] = at_k(kern_of[label].dim)
    pulled: Dict[str, Subspace] = {}
    for label, (a_prime, klabel) in dindex.pullback_objects.items():
        alpha = dindex.kernel_objects[klabel][0]
        pulled[label] = preimage(induced_map(src.map_between(a_prime, alpha), k), kern_of[klabel], p)
        values[label] = at_k(pulled[label].dim)

    edges: Dict[Tuple[str, str], GradedMap] = {}
    for a, b in base.covers:
        comps = {}
        for i in range(k + 2):
            truth = induced_map(src.map_between(a, b), i)
            if i < k:
                mine = homology_map(h, a, b, i)
            else:
                mine = induced_map(h.high.map_between(a, b), i)
            conj = matmul(_to_source(h, b, i), matmul(mine, inverse(_to_source(h, a, i), p), p), p)
            if not np.array_equal(conj, truth):
                raise InvariantBreach(f"Hybrid is not natural along {a}<{b} in degree {i}")
            comps[i] = truth
        edges[(a, b)] = GradedMap(values[a], values[b], {0: comps})

    pair_values: Dict[str, List[DifferentialValue]] = {}
    fan_values: Dict[str, List[DifferentialValue]] = {}
    for label, (alpha, gammas) in dindex.kernel_objects.items():
        kern = kern_of[label]
        edges[(label, alpha)] = GradedMap(values[label], values[alpha], {0: {k: kern.basis}})
        if len(gammas) > 2:
            for drop in gammas:
                sub = tuple(g for g in gammas if g != drop)
                target = kernel_label(alpha, sub)
                edges[(label, target)] = GradedMap(values[label], values[target], {0: {
                    k: restrict_to(identity(kern.ambient_dim), kern.basis, kern_of[target], p)}})
        kern_high = image_of(inverse(_to_source(h, alpha, k), p), kern, p)
        for beta in dindex.kernel_joins.get(label, []):
            found = [_convert_value(h, _pair_value(h.high, alpha, pair, beta, k, kern_high), kern)
                     for pair in combinations(gammas, 2)]
            if len(gammas) == 2:
                pair_values.setdefault(label, []).extend(found)
            else:
                fan_values.setdefault(label, []).extend(found)
            edges[(label, beta)] = GradedMap(values[label], values[beta], {1: {k: found[0].matrix}})

    for la, (alpha, ga) in dindex.kernel_objects.items():
        for lb, (alpha_b, gb) in dindex.kernel_objects.items():
            if la == lb or alpha != alpha_b or len(ga) != len(gb):
                continue
            witness = path_morphisms(base, PathObject(alpha, ga), PathObject(alpha, gb))
            if witness is None or len(set(witness.values())) != len(gb):
                continue
            ka, kb = kern_of[la], kern_of[lb]
            edges[(la, lb)] = GradedMap(values[la], values[lb], {0: {
                k: restrict_to(identity(ka.ambient_dim), ka.basis, kb, p)}})
            if len(ga) == 2:
                _check_path_square(src, pair_values.get(la, []), pair_values.get(lb, []),
                                   witness, ka, p)

    for label, (a_prime, klabel) in dindex.pullback_objects.items():
        pb = pulled[label]
        alpha = dindex.kernel_objects[klabel][0]
        edges[(label, a_prime)] = GradedMap(values[label], values[a_prime], {0: {k: pb.basis}})
        pushed = induced_map(src.map_between(a_prime, alpha), k)
        edges[(label, klabel)] = GradedMap(values[label], values[klabel], {0: {
            k: restrict_to(pushed, pb.basis, kern_of[klabel], p)}})

    diagram = GradedDiagram(dindex.poset, values, edges, p)
    problems = diagram.validate()
    if problems:
        raise InvariantBreach(problems[0])

    partials = []
    for fam in families:
        if len(fam.gammas) >= 3:
            partials.append(inclusion_exclusion(h, fam, k))
    higher = interval_operations(src, k + 1, min_order=3)
    earlier = tuple(getattr(h, "history", ()))
    logger.info("Derived diagram at level %d: %d kernel objects, %d higher operations",
                k, len(dindex.kernel_objects), len(higher))
    return GlobalDerived(dindex, k, diagram, kfams, pair_values, partials, higher, src, earlier,
                         fan_values)


def _check_path_square(src: Diagram, small: List[DifferentialValue], big: List[DifferentialValue],
                       witness: Dict[str, str], ka: Subspace, p: int):
    """A path morphism carries values along H_{k+1}(β' -> β) up to indeterminacy"""
    for va in small:
        for vb in big:
            if not src.index.leq(va.beta, vb.beta):
                continue
            preserved = witness[va.gammas[0]] == vb.gammas[0]
            sign = 1 if preserved else -1
            push = induced_map(src.map_between(va.beta, vb.beta), va.degree + 1)
            lhs = matmul(push, va.matrix, p)
            coords = restrict_to(identity(ka.ambient_dim), ka.basis, vb.kernel, p)
            rhs = (sign * matmul(vb.matrix, coords, p)) % p
            if not vb.indeterminacy.contains((lhs - rhs) % p):
                raise InvariantBreach(
                    f"Path square {va.alpha};{','.join(va.gammas)} -> {','.join(vb.gammas)} fails")
