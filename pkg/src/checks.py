#!/usr/bin/env python3

"""Seeded property suites run by the `check` command."""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from chain import cone, induced_map, is_quasi_iso, mapping_cylinder
from derived import eval_value, inclusion_exclusion
from diagram import (hocolim, latching, minimal_cofibrant_check, minimal_cofibrant_replace,
                     reedy_cofibrant_replace)
from errors import SimpleChainError, ValidationError
from exactalg import Subspace, complement, matmul, rank, subspace_sum
from generators import gen_example01, gen_fan, random_diagram, random_double_complex
from poset import PathObject
from specseq import cross_check

logger = logging.getLogger(__name__)


@dataclass
class SuiteResult:
    name: str
    cases: int = 0
    failures: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_record(self) -> Dict:
        return {"name": self.name, "cases": self.cases, "ok": self.ok, "failures": list(self.failures)}


def _square_zero(c) -> bool:
    return all(not np.any(matmul(c.diff(n - 1), c.diff(n), c.p)) for n in range(2, c.top + 1))


def suite_complexes(rng: np.random.Generator, p: int, cases: int) -> SuiteResult:
    """d∘d = 0 on random objects and on the cones and cylinders of their maps"""
    result = SuiteResult("complexes")
    for i in range(cases):
        d = random_diagram(rng, p)
        built = list(d.objects.values())
        for f in d.arrows.values():
            built.append(cone(f))
            built.append(mapping_cylinder(f).complex)
        for c in built:
            result.cases += 1
            if not _square_zero(c):
                result.failures.append(f"case {i}: d∘d ≠ 0 on a constructed complex")
    return result


def suite_cofibration(rng: np.random.Generator, p: int, cases: int) -> SuiteResult:
    """A -> B -> C(f) is exact on homology: dim H_k C(f) = dim coker H_k f + dim ker H_{k-1} f"""
    result = SuiteResult("cofibration")
    for i in range(cases):
        d = random_diagram(rng, p)
        for (a, b), f in d.arrows.items():
            c = cone(f)
            result.cases += 1
            for k in range(c.top + 1):
                hk = induced_map(f, k)
                hk1 = induced_map(f, k - 1) if k >= 1 else np.zeros((0, 0), dtype=np.int64)
                coker = hk.shape[0] - rank(hk, p)
                ker = hk1.shape[1] - rank(hk1, p)
                if c.homology(k).dim != coker + ker:
                    result.failures.append(f"case {i}: cone of {a}<{b} breaks exactness in degree {k}")
                    break
    return result


def suite_cofibrant(rng: np.random.Generator, p: int, cases: int) -> SuiteResult:
    """Reedy and minimal replacements: objectwise quasi-isomorphisms, injective latching maps"""
    result = SuiteResult("cofibrant")
    for i in range(cases):
        d = random_diagram(rng, p)
        result.cases += 1
        try:
            replaced, back = reedy_cofibrant_replace(d)
            for o, f in back.items():
                if not is_quasi_iso(f):
                    result.failures.append(f"case {i}: Reedy replacement of {o} is not a quasi-isomorphism")
            for o in replaced.index.objects:
                if replaced.index.lower_covers(o):
                    _, latch = latching(replaced, o)
                    if any(rank(latch.component(n), p) != latch.source.dim(n)
                           for n in range(latch.source.top + 1)):
                        result.failures.append(f"case {i}: latching map at {o} is not injective")
            minimal, mback = minimal_cofibrant_replace(d)
            for o, f in mback.items():
                if not is_quasi_iso(f):
                    result.failures.append(f"case {i}: minimal model of {o} is not a quasi-isomorphism")
            for problem in minimal_cofibrant_check(minimal):
                result.failures.append(f"case {i}: {problem}")
        except SimpleChainError as e:
            result.failures.append(f"case {i}: {e}")
    return result


def suite_canonicity(rng: np.random.Generator, p: int, cases: int) -> SuiteResult:
    """Spans of recombined generators have the same canonical basis; complements are complements"""
    result = SuiteResult("canonicity")
    for i in range(cases):
        n = int(rng.integers(1, 6))
        k = int(rng.integers(0, n + 2))
        gens = rng.integers(0, p, size=(n, k), dtype=np.int64)
        mix = rng.integers(0, p, size=(k, int(rng.integers(0, k + 2))), dtype=np.int64)
        extra = matmul(gens, mix, p) if k else np.zeros((n, 0), dtype=np.int64)
        order = rng.permutation(k)
        shuffled = np.concatenate([gens[:, order], extra], axis=1) if k else gens
        a = Subspace.span(gens, p, n)
        b = Subspace.span(shuffled, p, n)
        result.cases += 1
        if a != b:
            result.failures.append(f"case {i}: equal spans have different canonical bases")
        if subspace_sum(a, complement(a)).dim != n or a.dim + complement(a).dim != n:
            result.failures.append(f"case {i}: complement does not complete the subspace")
    return result


FAN_PRIMES = (2, 3, 5)


def suite_fans(rng: np.random.Generator, p: int, cases: int) -> SuiteResult:
    """Uniform fans: the kernel chain is exact and H_{k+1} of the hocolim has dim (m-1)·dim K"""
    result = SuiteResult("fans")
    for i in range(cases):
        m = int(rng.integers(2, 5))
        dim_k = int(rng.integers(1, 4))
        k = int(rng.integers(0, 2))
        q = int(rng.choice(FAN_PRIMES))
        d = gen_fan(m, dim_k, k, q)
        gammas = tuple(f"g{j + 1}" for j in range(m))
        result.cases += 1
        try:
            pd = inclusion_exclusion(d, PathObject("a", gammas, "b"), k)
            if not pd.exact:
                result.failures.append(f"case {i}: fan m={m} dim={dim_k} p={q} is not exact")
            expected = (m - 1) * dim_k
            direct = hocolim(d, ("a",) + gammas).complex.homology(k + 1).dim
            if pd.hocolim_dim != expected or direct != expected:
                result.failures.append(f"case {i}: hocolim H_{k + 1} is {direct}, expected {expected}")
        except SimpleChainError as e:
            result.failures.append(f"case {i}: {e}")
    return result


def suite_spectral(rng: np.random.Generator, p: int, cases: int) -> SuiteResult:
    """Chased d^2, d^3 agree with the subquotient pages; E^∞ matches gr H(Tot)"""
    result = SuiteResult("spectral")
    for i in range(cases):
        dc = random_double_complex(rng, p)
        result.cases += 1
        try:
            report = cross_check(dc, 3)
            result.failures.extend(f"case {i}: {msg}" for msg in report.failures)
        except SimpleChainError as e:
            result.failures.append(f"case {i}: {e}")
    return result


def suite_golden(rng: np.random.Generator, p: int, cases: int) -> SuiteResult:
    """The square's pair value has rank dim V in the standard model and 0 in the split one"""
    result = SuiteResult("golden")
    for q in (2, 5):
        for dim_v in (1, 2, 3):
            standard = eval_value(gen_example01(dim_v, q), PathObject("alpha", ("CL0", "C'L0"), "omega"), 0)
            split = eval_value(gen_example01(dim_v, q, split=True),
                               PathObject("alpha", ("gamma", "delta"), "beta"), 0)
            result.cases += 1
            if standard.rank != dim_v or split.rank != 0:
                result.failures.append(f"dim V={dim_v}, p={q}: ranks {standard.rank} and {split.rank}")
    return result


SUITES: Dict[str, Callable[[np.random.Generator, int, int], SuiteResult]] = {
    "complexes": suite_complexes,
    "cofibration": suite_cofibration,
    "cofibrant": suite_cofibrant,
    "canonicity": suite_canonicity,
    "fans": suite_fans,
    "spectral": suite_spectral,
    "golden": suite_golden,
}

DEFAULT_CASES = {"canonicity": 1000, "fans": 50, "spectral": 100}


def run_suites(names: Optional[List[str]] = None, seed: int = 0, p: int = 5,
               cases: Optional[int] = None) -> List[SuiteResult]:
    """
    Run the named suites (all by default), each from its own generator seeded with seed
    :param cases: per-suite case count; defaults to 200 except where DEFAULT_CASES says otherwise
    """
    names = list(SUITES) if not names else names
    results = []
    for name in names:
        if name not in SUITES:
            raise ValidationError(f"Unknown suite '{name}'; choose from {', '.join(SUITES)}")
        rng = np.random.default_rng(seed)
        n = cases if cases is not None else DEFAULT_CASES.get(name, 200)
        res = SUITES[name](rng, p, n)
        logger.info("Suite %s: %d cases, %d failures", name, res.cases, len(res.failures))
        results.append(res)
    return results
