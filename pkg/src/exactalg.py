#!/usr/bin/env python3

"""Exact linear algebra over a prime field F_p.

Matrices are numpy int64 arrays with entries reduced into [0, p).
Vectors are 1-D arrays. Every "choose a splitting" elsewhere in the
package goes through complement() so results are reproducible.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from errors import PreconditionError, ValidationError

logger = logging.getLogger(__name__)

DEFAULT_PRIME = 5


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class FieldSpec:
    """The ground field F_p"""
    p: int = DEFAULT_PRIME

    def __post_init__(self):
        if not isinstance(self.p, (int, np.integer)) or not is_prime(int(self.p)):
            raise ValidationError(f"Field characteristic must be prime, got {self.p!r}")


def mod_p(a, p: int) -> np.ndarray:
    return np.asarray(np.asarray(a, dtype=np.int64) % p, dtype=np.int64)


def zeros(rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, cols), dtype=np.int64)


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    # Entries stay below p, so int64 products cannot overflow at desk scale.
    return mod_p(np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64), p)


def inv_scalar(a: int, p: int) -> int:
    a = int(a) % p
    if a == 0:
        raise ZeroDivisionError("0 has no inverse in F_p")
    return pow(a, p - 2, p)


def as_column(v, n: int) -> np.ndarray:
    """View a vector or matrix with n rows as a 2-D matrix"""
    v = np.asarray(v, dtype=np.int64)
    if v.ndim == 1:
        return v.reshape(n, 1)
    return v


def hstack(blocks: List[np.ndarray], rows: int) -> np.ndarray:
    """Concatenate column blocks; an empty list gives a rows×0 matrix"""
    blocks = [as_column(b, rows) for b in blocks]
    if not blocks:
        return zeros(rows, 0)
    return np.concatenate(blocks, axis=1)


def vstack(blocks: List[np.ndarray], cols: int) -> np.ndarray:
    blocks = [np.asarray(b, dtype=np.int64) for b in blocks]
    blocks = [b.reshape(1, cols) if b.ndim == 1 else b for b in blocks]
    if not blocks:
        return zeros(0, cols)
    return np.concatenate(blocks, axis=0)


def block_diag(*mats: np.ndarray) -> np.ndarray:
    rows = sum(m.shape[0] for m in mats)
    cols = sum(m.shape[1] for m in mats)
    out = zeros(rows, cols)
    r = c = 0
    for m in mats:
        out[r:r + m.shape[0], c:c + m.shape[1]] = m
        r += m.shape[0]
        c += m.shape[1]
    return out


def rref_mod(a: np.ndarray, p: int, ncols: Optional[int] = None) -> Tuple[np.ndarray, List[int]]:
    """
    Reduced row echelon form over F_p
    :param a: matrix to reduce (not modified)
    :param p: field characteristic
    :param ncols: only pivot within the first ncols columns (augmented systems)
    :return: (R, pivot column indices)
    """
    A = mod_p(a, p).copy()
    m, n = A.shape
    limit = n if ncols is None else ncols
    r = 0
    pivots: List[int] = []
    for c in range(limit):
        if r >= m:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        A[r] = (A[r] * inv_scalar(A[r, c], p)) % p
        col = A[:, c].copy()
        col[r] = 0
        A = (A - np.outer(col, A[r])) % p
        pivots.append(c)
        r += 1
    return A, pivots


def rank(a: np.ndarray, p: int) -> int:
    a = np.asarray(a)
    if a.size == 0:
        return 0
    return len(rref_mod(a, p)[1])


def nullspace(a: np.ndarray, p: int) -> np.ndarray:
    """Right nullspace of a; the columns of the result form a basis"""
    a = mod_p(a, p)
    m, n = a.shape
    R, pivots = rref_mod(a, p)
    free = [j for j in range(n) if j not in set(pivots)]
    basis = zeros(n, len(free))
    for k, f in enumerate(free):
        basis[f, k] = 1
        for row, pc in enumerate(pivots):
            basis[pc, k] = (-R[row, f]) % p
    return basis


def solve_matrix(m: np.ndarray, targets: np.ndarray, p: int) -> Optional[np.ndarray]:
    """
    Solve m·X = targets column by column
    :return: canonical solutions (free coordinates zero), or None when some column is inconsistent
    """
    m = mod_p(m, p)
    rows, n = m.shape
    targets = as_column(mod_p(targets, p), rows)
    R, pivots = rref_mod(np.concatenate([m, targets], axis=1), p, ncols=n)
    r = len(pivots)
    if np.any(R[r:, n:] != 0):
        return None
    x = zeros(n, targets.shape[1])
    for row, pc in enumerate(pivots):
        x[pc] = R[row, n:]
    return x


def solve(m: np.ndarray, target: np.ndarray, p: int) -> Optional[np.ndarray]:
    """
    Canonical solution of m·v = target; None when target is not in the image.
    The result is linear in target.
    """
    m = np.asarray(m)
    target = np.asarray(target).ravel()
    if target.shape[0] != m.shape[0]:
        raise PreconditionError(
            f"Target length {target.shape[0]} does not match {m.shape[0]} rows")
    x = solve_matrix(m, target.reshape(m.shape[0], 1), p)
    return None if x is None else x[:, 0]


def inverse(a: np.ndarray, p: int) -> np.ndarray:
    n = a.shape[0]
    if a.shape != (n, n):
        raise PreconditionError(f"Cannot invert a non-square {a.shape} matrix")
    x = solve_matrix(a, identity(n), p)
    if x is None or rank(a, p) != n:
        raise PreconditionError("Matrix is singular over F_p")
    return x


def is_invertible(a: np.ndarray, p: int) -> bool:
    return a.shape[0] == a.shape[1] and rank(a, p) == a.shape[0]


@dataclass(frozen=True, eq=False)
class Subspace:
    """
    A subspace of F_p^ambient_dim in canonical form.

    The basis is the transpose of the nonzero rows of the RREF of the
    generators, so basis[pivots] is the identity and equal subspaces
    have identical basis matrices.
    """
    ambient_dim: int
    basis: np.ndarray
    p: int
    pivots: Tuple[int, ...] = field(default=())

    @classmethod
    def span(cls, gens: np.ndarray, p: int, ambient_dim: Optional[int] = None) -> "Subspace":
        gens = np.asarray(gens, dtype=np.int64)
        if ambient_dim is None:
            ambient_dim = gens.shape[0]
        gens = as_column(gens, ambient_dim)
        if ambient_dim == 0 or gens.shape[1] == 0:
            return cls.zero(ambient_dim, p)
        R, pivots = rref_mod(gens.T, p)
        basis = np.ascontiguousarray(R[:len(pivots)].T)
        return cls(ambient_dim, basis, p, tuple(pivots))

    @classmethod
    def zero(cls, n: int, p: int) -> "Subspace":
        return cls(n, zeros(n, 0), p, ())

    @classmethod
    def full(cls, n: int, p: int) -> "Subspace":
        return cls(n, identity(n), p, tuple(range(n)))

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return (self.ambient_dim == other.ambient_dim and self.p == other.p
                and np.array_equal(self.basis, other.basis))

    def __hash__(self):
        return hash((self.ambient_dim, self.p, self.basis.tobytes()))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim}, p={self.p})"

    def contains(self, v: np.ndarray) -> bool:
        """True when v (a vector or the columns of a matrix) lies in the subspace"""
        v = as_column(mod_p(v, self.p), self.ambient_dim)
        residual = (v - matmul(self.basis, v[list(self.pivots)], self.p)) % self.p
        return not np.any(residual)

    def contains_space(self, other: "Subspace") -> bool:
        return self.contains(other.basis)

    def coordinates(self, v: np.ndarray) -> np.ndarray:
        """Coordinates of v in the canonical basis; v must lie in the subspace"""
        v = mod_p(v, self.p)
        if not self.contains(v):
            raise PreconditionError("Vector is not in the subspace")
        if v.ndim == 1:
            return v[list(self.pivots)]
        return v[list(self.pivots), :]


def rank_kernel_image(m: np.ndarray, p: int) -> Tuple[int, Subspace, Subspace]:
    m = mod_p(m, p)
    rows, cols = m.shape
    kernel = Subspace.span(nullspace(m, p), p, cols)
    image = Subspace.span(m, p, rows)
    return image.dim, kernel, image


def kernel(m: np.ndarray, p: int) -> Subspace:
    m = np.asarray(m)
    return Subspace.span(nullspace(m, p), p, m.shape[1])


def image(m: np.ndarray, p: int) -> Subspace:
    m = np.asarray(m)
    return Subspace.span(m, p, m.shape[0])


def complement(s: Subspace) -> Subspace:
    """Span of the standard basis vectors at the non-pivot rows of s"""
    rest = [i for i in range(s.ambient_dim) if i not in set(s.pivots)]
    basis = zeros(s.ambient_dim, len(rest))
    for k, i in enumerate(rest):
        basis[i, k] = 1
    return Subspace(s.ambient_dim, basis, s.p, tuple(rest))


def _check_same(a: Subspace, b: Subspace):
    if a.ambient_dim != b.ambient_dim or a.p != b.p:
        raise PreconditionError(
            f"Subspaces live in different spaces ({a.ambient_dim} vs {b.ambient_dim})")


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    _check_same(a, b)
    return Subspace.span(np.concatenate([a.basis, b.basis], axis=1), a.p, a.ambient_dim)


def intersect(a: Subspace, b: Subspace) -> Subspace:
    _check_same(a, b)
    if a.dim == 0 or b.dim == 0:
        return Subspace.zero(a.ambient_dim, a.p)
    # Ax = By  <=>  (x, y) in ker [A | -B]
    joint = nullspace(np.concatenate([a.basis, (-b.basis) % a.p], axis=1), a.p)
    return Subspace.span(matmul(a.basis, joint[:a.dim], a.p), a.p, a.ambient_dim)


def quotient_basis(a: Subspace, b: Subspace) -> np.ndarray:
    """
    Columns that, together with a, span b (a ⊆ b required).
    Chosen greedily from b's canonical basis.
    """
    _check_same(a, b)
    if not b.contains_space(a):
        raise PreconditionError("quotient_basis requires a ⊆ b")
    chosen = []
    current = a
    for j in range(b.dim):
        col = b.basis[:, j]
        if not current.contains(col):
            chosen.append(col)
            current = subspace_sum(current, Subspace.span(col.reshape(-1, 1), a.p))
    if not chosen:
        return zeros(a.ambient_dim, 0)
    return np.stack(chosen, axis=1)


def image_of(m: np.ndarray, s: Subspace, p: int) -> Subspace:
    return Subspace.span(matmul(m, s.basis, p), p, m.shape[0])


def preimage(m: np.ndarray, s: Subspace, p: int) -> Subspace:
    """{v : m v ∈ s}"""
    m = mod_p(m, p)
    n = m.shape[1]
    joint = nullspace(np.concatenate([m, (-s.basis) % p], axis=1), p)
    return Subspace.span(joint[:n], p, n)


def restrict_to(m: np.ndarray, source: np.ndarray, target: Subspace, p: int) -> np.ndarray:
    """Matrix of m on the columns of source, written in target's coordinates"""
    return target.coordinates(matmul(m, source, p)).reshape(target.dim, source.shape[1])
