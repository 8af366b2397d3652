"""Small exact linear algebra over Z, Q and F_2 on tuple-based vectors."""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

from sympy import Matrix
from sympy.matrices.normalforms import smith_normal_decomp

Vec = tuple
Mat = tuple  # tuple of row tuples


class InvariantError(RuntimeError):
    """Raised when an internal structural invariant fails."""


def vadd(x: Sequence, y: Sequence) -> Vec:
    return tuple(a + b for a, b in zip(x, y))


def vsub(x: Sequence, y: Sequence) -> Vec:
    return tuple(a - b for a, b in zip(x, y))


def vneg(x: Sequence) -> Vec:
    return tuple(-a for a in x)


def vscale(c, x: Sequence) -> Vec:
    return tuple(c * a for a in x)


def dot(x: Sequence, y: Sequence):
    if len(x) != len(y):
        raise ValueError("dimension mismatch")
    return sum((a * b for a, b in zip(x, y)), 0)


def vsum(vectors: Iterable[Sequence], n: int) -> Vec:
    total = (0,) * n
    for v in vectors:
        total = vadd(total, v)
    return total


def normalize(x: Sequence) -> Vec:
    """Turn integral Fractions back into ints so equal vectors hash equally."""
    out = []
    for a in x:
        if isinstance(a, Fraction) and a.denominator == 1:
            a = a.numerator
        out.append(a)
    return tuple(out)


def identity(n: int) -> Mat:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def mat_vec(m: Mat, v: Sequence) -> Vec:
    return tuple(dot(row, v) for row in m)


def mat_mul(a: Mat, b: Mat) -> Mat:
    cols = list(zip(*b))
    return tuple(tuple(dot(row, col) for col in cols) for row in a)


def transpose(m: Mat) -> Mat:
    return tuple(zip(*m))


def mat_neg(m: Mat) -> Mat:
    return tuple(vneg(row) for row in m)


def mat_add(a: Mat, b: Mat) -> Mat:
    return tuple(vadd(r, s) for r, s in zip(a, b))


def mat_sub(a: Mat, b: Mat) -> Mat:
    return tuple(vsub(r, s) for r, s in zip(a, b))


def kernel_basis(m: Mat) -> list[Vec]:
    """Z-basis of the integer kernel {v in Z^n : m v = 0}, via Smith decomposition."""
    rows = len(m)
    n = len(m[0]) if rows else 0
    if n == 0:
        return []
    if rows == 0 or all(a == 0 for row in m for a in row):
        return [tuple(1 if i == j else 0 for i in range(n)) for j in range(n)]
    d, _, v = smith_normal_decomp(Matrix(m))
    rank = sum(1 for i in range(min(d.shape)) if d[i, i] != 0)
    basis = [tuple(int(v[i, j]) for i in range(n)) for j in range(rank, n)]
    for b in basis:
        if any(x != 0 for x in mat_vec(m, b)):
            raise InvariantError("kernel basis vector not in kernel")
    return sorted(basis)


def rank(vectors: Sequence[Sequence]) -> int:
    if not vectors:
        return 0
    return Matrix([list(v) for v in vectors]).rank()


class Coordinates:
    """Exact coordinates with respect to a linearly independent family."""

    def __init__(self, basis: Sequence[Sequence]):
        self.basis = [tuple(b) for b in basis]
        if self.basis:
            b = Matrix([list(v) for v in self.basis]).T
            if b.rank() != len(self.basis):
                raise ValueError("basis vectors are linearly dependent")
            self._left_inverse = (b.T * b).inv() * b.T
        else:
            self._left_inverse = None

    def __call__(self, v: Sequence) -> Vec:
        if not self.basis:
            if any(a != 0 for a in v):
                raise ValueError("vector outside the span of the empty basis")
            return ()
        c = self._left_inverse * Matrix([list(v)]).T
        coords = tuple(Fraction(int(x.p), int(x.q)) for x in c)
        back = vsum((vscale(a, b) for a, b in zip(coords, self.basis)), len(v))
        if tuple(back) != tuple(Fraction(a) for a in v):
            raise ValueError("vector outside the span of the basis")
        return normalize(coords)

    def integral(self, v: Sequence) -> tuple[int, ...]:
        c = self(v)
        if any(isinstance(a, Fraction) for a in c):
            raise ValueError("vector not in the lattice spanned by the basis")
        return tuple(int(a) for a in c)


def solve_mod2(rows: Sequence[Sequence[int]], rhs: Sequence[int], n: int) -> list[tuple[int, ...]]:
    """All solutions x in F_2^n of rows . x = rhs (mod 2), sorted."""
    eqs = [([a % 2 for a in r], b % 2) for r, b in zip(rows, rhs)]
    pivots: list[int] = []
    reduced: list[tuple[list[int], int]] = []
    for col in range(n):
        pick = next((k for k, (r, _) in enumerate(eqs) if r[col]), None)
        if pick is None:
            continue
        prow, pb = eqs.pop(pick)
        eqs = [(([x ^ y for x, y in zip(r, prow)], b ^ pb) if r[col] else (r, b)) for r, b in eqs]
        reduced = [(([x ^ y for x, y in zip(r, prow)], b ^ pb) if r[col] else (r, b)) for r, b in reduced]
        reduced.append((prow, pb))
        pivots.append(col)
    if any(b for r, b in eqs):
        return []
    free = [c for c in range(n) if c not in pivots]
    solutions = []
    for bits in product((0, 1), repeat=len(free)):
        x = [0] * n
        for c, b in zip(free, bits):
            x[c] = b
        for (r, b), col in zip(reduced, pivots):
            x[col] = (b + sum(r[c] * x[c] for c in free)) % 2
        solutions.append(tuple(x))
    return sorted(solutions)
