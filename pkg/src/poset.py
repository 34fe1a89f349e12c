#!/usr/bin/env python3

"""Finite indexing posets, incomparable families and the derived/Ind² indices built on them."""

import logging
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from errors import PreconditionError, ValidationError

logger = logging.getLogger(__name__)

DEFAULT_MAX_GAMMA = 4


@dataclass(frozen=True, eq=False)
class Poset:
    """
    A finite poset given by objects and generating relations.
    The stored covers are the Hasse edges of the transitive closure.
    """
    objects: Tuple[str, ...]
    relations: Tuple[Tuple[str, str], ...] = ()
    covers: Tuple[Tuple[str, str], ...] = field(init=False)
    order: np.ndarray = field(init=False, repr=False)
    _pos: Dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        objects = tuple(str(o) for o in self.objects)
        if len(set(objects)) != len(objects):
            raise ValidationError("Poset objects must be distinct", section="poset")
        pos = {o: i for i, o in enumerate(objects)}
        n = len(objects)
        leq = np.eye(n, dtype=bool)
        for a, b in self.relations:
            if a not in pos or b not in pos:
                missing = a if a not in pos else b
                raise ValidationError("Relation names an unknown object",
                                      section="poset", label=missing)
            leq[pos[a], pos[b]] = True
        # Warshall closure
        for k in range(n):
            leq |= np.outer(leq[:, k], leq[k, :])
        if np.any(leq & leq.T & ~np.eye(n, dtype=bool)):
            raise ValidationError("Relation is not antisymmetric (cycle among objects)",
                                  section="poset")
        strict = leq & ~np.eye(n, dtype=bool)
        # a < b is a cover when no c has a < c < b
        through = (strict.astype(np.int64) @ strict.astype(np.int64)) > 0
        hasse = strict & ~through
        covers = tuple((objects[i], objects[j]) for i in range(n) for j in range(n) if hasse[i, j])
        object.__setattr__(self, "objects", objects)
        object.__setattr__(self, "relations", tuple((str(a), str(b)) for a, b in self.relations))
        object.__setattr__(self, "order", leq)
        object.__setattr__(self, "_pos", pos)
        object.__setattr__(self, "covers", covers)

    def __len__(self):
        return len(self.objects)

    def __contains__(self, obj):
        return obj in self._pos

    def index(self, obj: str) -> int:
        try:
            return self._pos[obj]
        except KeyError as e:
            raise ValidationError("Unknown object", label=obj) from e

    def leq(self, a: str, b: str) -> bool:
        return bool(self.order[self.index(a), self.index(b)])

    def lt(self, a: str, b: str) -> bool:
        return a != b and self.leq(a, b)

    def comparable(self, a: str, b: str) -> bool:
        return self.leq(a, b) or self.leq(b, a)

    def upper_covers(self, a: str) -> List[str]:
        return [b for x, b in self.covers if x == a]

    def lower_covers(self, b: str) -> List[str]:
        return [a for a, y in self.covers if y == b]

    def above(self, a: str) -> List[str]:
        """Objects strictly above a, in object order"""
        return [b for b in self.objects if self.lt(a, b)]

    def below(self, b: str) -> List[str]:
        return [a for a in self.objects if self.lt(a, b)]

    def minima(self) -> List[str]:
        return [o for o in self.objects if not self.lower_covers(o)]

    def maxima(self) -> List[str]:
        return [o for o in self.objects if not self.upper_covers(o)]

    def levels(self) -> Dict[str, int]:
        """Length of the longest Hasse chain from a minimum"""
        level: Dict[str, int] = {}
        for o in self.topological_order():
            lows = self.lower_covers(o)
            level[o] = 1 + max(level[x] for x in lows) if lows else 0
        return level

    def topological_order(self) -> List[str]:
        """Kahn's algorithm, always taking the earliest ready object"""
        indegree = {o: len(self.lower_covers(o)) for o in self.objects}
        done: List[str] = []
        ready = [o for o in self.objects if indegree[o] == 0]
        while ready:
            o = min(ready, key=self.index)
            ready.remove(o)
            done.append(o)
            for b in self.upper_covers(o):
                indegree[b] -= 1
                if indegree[b] == 0:
                    ready.append(b)
        return done

    def is_antichain(self, objs: Sequence[str]) -> bool:
        return all(not self.comparable(a, b) for a, b in combinations(objs, 2))

    def upper_bounds(self, objs: Sequence[str]) -> List[str]:
        return [b for b in self.objects if all(self.leq(a, b) for a in objs)]

    def minimal_upper_bounds(self, objs: Sequence[str]) -> List[str]:
        ubs = self.upper_bounds(objs)
        return [b for b in ubs if not any(self.lt(c, b) for c in ubs)]

    def sort(self, objs: Iterable[str]) -> Tuple[str, ...]:
        return tuple(sorted(objs, key=self.index))

    def subposet(self, objs: Iterable[str]) -> "Poset":
        keep = self.sort(set(objs))
        rels = tuple((a, b) for a in keep for b in keep if self.lt(a, b))
        return Poset(keep, rels)

    def chains(self, objs: Optional[Iterable[str]] = None) -> List[Tuple[str, ...]]:
        """All nonempty strictly increasing chains inside objs, shortest first"""
        pool = list(self.objects) if objs is None else list(self.sort(set(objs)))
        out: List[Tuple[str, ...]] = []
        frontier = [(o,) for o in pool]
        while frontier:
            out.extend(frontier)
            frontier = [c + (b,) for c in frontier for b in pool if self.lt(c[-1], b)]
        return out


@dataclass(frozen=True)
class LatticeInfo:
    minima: List[str]
    maxima: List[str]
    filtration: Dict[str, int]


def validate_lattice(p: Poset) -> LatticeInfo:
    """Minima, maxima and the distance filtration; the order itself is validated by Poset"""
    levels = p.levels()
    for a, b in p.covers:
        if levels[a] >= levels[b]:
            raise ValidationError("Filtration is not monotone along a cover", label=b)
    return LatticeInfo(p.minima(), p.maxima(), levels)


def cube_poset(n: int) -> Poset:
    """
    The n-cube on bitstrings: clearing a 1 goes up, so 11…1 is the minimum and 00…0 the maximum.
    Objects are listed by increasing number of zeros.
    """
    if n < 1:
        raise PreconditionError(f"Cube dimension must be ≥ 1, got {n}")
    labels = sorted(("".join(bits) for bits in product("10", repeat=n)), key=lambda s: s.count("0"))
    relations = [(s, s[:i] + "0" + s[i + 1:]) for s in labels for i in range(n) if s[i] == "1"]
    return Poset(tuple(labels), tuple(relations))


@dataclass(frozen=True)
class PathObject:
    """A factorization of alpha -> beta through pairwise incomparable gammas"""
    alpha: str
    gammas: Tuple[str, ...]
    beta: Optional[str] = None

    def label(self) -> str:
        tail = f"->{self.beta}" if self.beta is not None else ""
        return f"{self.alpha};{','.join(self.gammas)}{tail}"


def incomparable_families(p: Poset, alpha: str, beta: Optional[str] = None,
                          max_gamma: int = DEFAULT_MAX_GAMMA,
                          immediate: bool = True) -> List[PathObject]:
    """
    Antichains of size ≥ 2 among the upper covers of alpha (and strictly below beta when given).
    Without beta, one PathObject is emitted per minimal common upper bound
    (beta None when the family has none). Families larger than max_gamma are left out.
    :param immediate: False draws the gammas from everything strictly above alpha
    """
    if alpha not in p:
        raise PreconditionError("Family root is not in the poset", label=alpha)
    pool = p.upper_covers(alpha) if immediate else p.above(alpha)
    if beta is not None:
        pool = [g for g in pool if p.lt(g, beta)]
    pool = list(p.sort(pool))
    families: List[PathObject] = []
    size = 2
    while size <= len(pool):
        found = [c for c in combinations(pool, size) if p.is_antichain(c)]
        if not found:
            break
        if size > max_gamma:
            logger.debug("Leaving out %d families of size %d above %s (max_gamma=%d)",
                         len(found), size, alpha, max_gamma)
            break
        for gammas in found:
            if beta is not None:
                families.append(PathObject(alpha, gammas, beta))
                continue
            joins = p.minimal_upper_bounds(gammas)
            if not joins:
                families.append(PathObject(alpha, gammas, None))
            for b in joins:
                families.append(PathObject(alpha, gammas, b))
        size += 1
    families.sort(key=lambda f: (len(f.gammas), [p.index(g) for g in f.gammas],
                                 -1 if f.beta is None else p.index(f.beta)))
    return families


def path_morphisms(p: Poset, p1: PathObject, p2: PathObject) -> Optional[Dict[str, str]]:
    """
    Witness of a morphism p1 -> p2: each gamma of p1 sent to the first gamma of p2 above it.
    :return: the assignment, or None when p1.beta ≰ p2.beta or some gamma has no image
    """
    if p1.alpha != p2.alpha:
        raise PreconditionError("Path morphisms need a common alpha", label=p1.alpha)
    if p1.beta is not None and p2.beta is not None and not p.leq(p1.beta, p2.beta):
        return None
    if p1.beta is None and p2.beta is not None:
        return None
    assignment = {}
    for g1 in p1.gammas:
        target = next((g2 for g2 in p2.gammas if p.leq(g1, g2)), None)
        if target is None:
            return None
        assignment[g1] = target
    return assignment


def kernel_label(alpha: str, gammas: Sequence[str]) -> str:
    return f"K({alpha};{','.join(gammas)})"


def colim_label(alpha: str, gammas: Sequence[str]) -> str:
    return f"colim({alpha};{','.join(gammas)})"


@dataclass(frozen=True, eq=False)
class DerivedIndex:
    """Base poset plus formal kernel objects and formal pullbacks"""
    base: Poset
    poset: Poset
    families: List[PathObject]
    kernel_objects: Dict[str, Tuple[str, Tuple[str, ...]]]
    kernel_joins: Dict[str, List[str]]
    pullback_objects: Dict[str, Tuple[str, str]]

    def kind(self, obj: str) -> str:
        if obj in self.kernel_objects:
            return "kernel"
        if obj in self.pullback_objects:
            return "pullback"
        return "base"


def derived_index(p: Poset, families: Optional[List[PathObject]] = None,
                  max_gamma: int = DEFAULT_MAX_GAMMA) -> DerivedIndex:
    """
    Kernel objects K(α;Γ') for every family (α,Γ,β) with a join and every Γ' ⊆ Γ, |Γ'| ≥ 2,
    with edges K → α, K_Γ → K_Γ' (one element dropped), K_Γ → β, same-size path morphisms,
    and one layer of formal pullbacks along the covers α' → α.
    """
    if families is None:
        families = [f for a in p.objects for f in incomparable_families(p, a, max_gamma=max_gamma)]
    families = [f for f in families if f.beta is not None]
    kernels: Dict[str, Tuple[str, Tuple[str, ...]]] = {}
    joins: Dict[str, List[str]] = {}
    relations: List[Tuple[str, str]] = list(p.covers)
    for fam in families:
        for size in range(2, len(fam.gammas) + 1):
            for sub in combinations(fam.gammas, size):
                label = kernel_label(fam.alpha, sub)
                kernels.setdefault(label, (fam.alpha, sub))
        top = kernel_label(fam.alpha, fam.gammas)
        joins.setdefault(top, [])
        if fam.beta not in joins[top]:
            joins[top].append(fam.beta)
    for label, (alpha, gammas) in kernels.items():
        relations.append((label, alpha))
        if len(gammas) > 2:
            for drop in gammas:
                sub = tuple(g for g in gammas if g != drop)
                relations.append((label, kernel_label(alpha, sub)))
        for beta in joins.get(label, []):
            relations.append((label, beta))
    # same-size path morphisms Γ' ≤ Γ pointwise give K_Γ' ⊆ K_Γ
    for la, (alpha, ga) in kernels.items():
        for lb, (alpha_b, gb) in kernels.items():
            if la == lb or alpha != alpha_b or len(ga) != len(gb):
                continue
            witness = path_morphisms(p, PathObject(alpha, ga), PathObject(alpha, gb))
            if witness is not None and len(set(witness.values())) == len(gb):
                relations.append((la, lb))
    pullbacks: Dict[str, Tuple[str, str]] = {}
    for label, (alpha, _) in kernels.items():
        for a_prime in p.lower_covers(alpha):
            pb = f"P({a_prime}|{label})"
            pullbacks[pb] = (a_prime, label)
            relations.append((pb, a_prime))
            relations.append((pb, label))
    objects = list(p.objects) + list(kernels) + list(pullbacks)
    full = Poset(tuple(objects), tuple(relations))
    logger.debug("Derived index: %d kernel objects, %d pullbacks", len(kernels), len(pullbacks))
    return DerivedIndex(p, full, families, kernels, joins, pullbacks)


@dataclass(frozen=True, eq=False)
class IndIndex2:
    """Base poset plus one formal colimit per fan {α} ∪ Γ"""
    base: Poset
    poset: Poset
    colimit_objects: Dict[str, Tuple[str, Tuple[str, ...]]]

    def fan(self, label: str) -> List[str]:
        alpha, gammas = self.colimit_objects[label]
        return [alpha] + list(gammas)


def ind2_index(p: Poset, families: Optional[List[PathObject]] = None,
               max_gamma: int = DEFAULT_MAX_GAMMA) -> IndIndex2:
    if families is None:
        families = [f for a in p.objects for f in incomparable_families(p, a, max_gamma=max_gamma)]
    colims: Dict[str, Tuple[str, Tuple[str, ...]]] = {}
    for fam in families:
        if fam.beta is None:
            continue
        for size in range(2, len(fam.gammas) + 1):
            for sub in combinations(fam.gammas, size):
                colims.setdefault(colim_label(fam.alpha, sub), (fam.alpha, sub))
    relations: List[Tuple[str, str]] = list(p.covers)
    for label, (alpha, gammas) in colims.items():
        for member in (alpha,) + gammas:
            relations.append((member, label))
        for ub in p.upper_bounds(gammas):
            relations.append((label, ub))
        if len(gammas) > 2:
            for drop in gammas:
                sub = tuple(g for g in gammas if g != drop)
                relations.append((colim_label(alpha, sub), label))
    full = Poset(tuple(list(p.objects) + list(colims)), tuple(relations))
    return IndIndex2(p, full, colims)
