"""Based root data: roots, coroots, Weyl group, rho-shifts and dominance."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Optional, Sequence

from .linalg import (
    InvariantError,
    Mat,
    Vec,
    dot,
    identity,
    mat_mul,
    mat_vec,
    normalize,
    transpose,
    vadd,
    vscale,
    vsub,
    vsum,
)

CARTAN_MATRICES = {
    "A1": ((2,),),
    "A2": ((2, -1), (-1, 2)),
    "A3": ((2, -1, 0), (-1, 2, -1), (0, -1, 2)),
    "B2": ((2, -2), (-1, 2)),
    "C2": ((2, -1), (-2, 2)),
    "B3": ((2, -1, 0), (-1, 2, -2), (0, -1, 2)),
    "C3": ((2, -1, 0), (-1, 2, -1), (0, -2, 2)),
    "G2": ((2, -1), (-3, 2)),
}

DEFAULT_WEYL_BOUND = 10**6


def half_sum(weights: Iterable[Sequence], n: int) -> Vec:
    """rho of a multiset of weights: half its sum, kept exact."""
    return normalize(vscale(Fraction(1, 2), vsum(weights, n)))


@dataclass(frozen=True)
class WeylElement:
    """A Weyl group element: lex-least reduced word plus its matrix on X*."""

    index: int
    word: tuple[int, ...]
    matrix: Mat

    @property
    def length(self) -> int:
        return len(self.word)


class WeylGroup:
    """Exhaustively generated Weyl group of a based root datum."""

    def __init__(self, datum: "BasedRootDatum", bound: int = DEFAULT_WEYL_BOUND):
        gens = datum.reflection_matrices
        n = datum.rank
        ident = identity(n)
        words = {ident: ()}
        level = [ident]
        while level:
            candidates: dict[Mat, tuple[int, ...]] = {}
            for m in level:
                for i, s in enumerate(gens):
                    new = mat_mul(s, m)
                    if new in words:
                        continue
                    cand = (i,) + words[m]
                    if new not in candidates or cand < candidates[new]:
                        candidates[new] = cand
            if len(words) + len(candidates) > bound:
                raise InvariantError(f"Weyl group exceeds bound {bound}")
            words.update(candidates)
            level = sorted(candidates, key=lambda m: candidates[m])
        ordered = sorted(words, key=lambda m: (len(words[m]), words[m]))
        self.datum = datum
        self.elements = [WeylElement(k, words[m], m) for k, m in enumerate(ordered)]
        self._index = {e.matrix: e.index for e in self.elements}
        self._mul: dict[tuple[int, int], int] = {}
        self._inv: dict[int, int] = {}
        positives = datum.positive_roots
        for e in self.elements:
            inversions = sum(1 for r in positives if not datum.is_positive(mat_vec(e.matrix, r)))
            if inversions != e.length:
                raise InvariantError("reduced word length differs from inversion count")

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, k: int) -> WeylElement:
        return self.elements[k]

    def index(self, matrix: Mat) -> int:
        try:
            return self._index[tuple(tuple(r) for r in matrix)]
        except KeyError:
            raise ValueError("matrix is not a Weyl group element") from None

    def contains(self, matrix: Mat) -> bool:
        return tuple(tuple(r) for r in matrix) in self._index

    def mul(self, a: int, b: int) -> int:
        key = (a, b)
        if key not in self._mul:
            self._mul[key] = self._index[mat_mul(self.elements[a].matrix, self.elements[b].matrix)]
        return self._mul[key]

    def inv(self, a: int) -> int:
        if a not in self._inv:
            self._inv[a] = self._index[transpose(self.coaction(a))]
        return self._inv[a]

    def coaction(self, a: int) -> Mat:
        """Matrix of the element on X_* (contragredient of its action on X*)."""
        m = identity(self.datum.rank)
        for i in reversed(self.elements[a].word):
            m = mat_mul(self.datum.coreflection_matrices[i], m)
        return tuple(tuple(r) for r in m)

    def from_word(self, word: Sequence[int]) -> int:
        m = identity(self.datum.rank)
        for i in word:
            m = mat_mul(m, self.datum.reflection_matrices[i])
        return self.index(m)

    @property
    def longest(self) -> WeylElement:
        return self.elements[-1]

    def act(self, a: int, v: Sequence) -> Vec:
        return normalize(mat_vec(self.elements[a].matrix, v))

    def coact(self, a: int, v: Sequence) -> Vec:
        return normalize(mat_vec(self.coaction(a), v))


@dataclass(frozen=True)
class BasedRootDatum:
    """Simple roots in X* and simple coroots in X_*, both in dual integer coordinates."""

    name: str
    simple_roots: tuple[Vec, ...]
    simple_coroots: tuple[Vec, ...]
    weyl_bound: int = field(default=DEFAULT_WEYL_BOUND, compare=False)

    def __post_init__(self):
        if len(self.simple_roots) != len(self.simple_coroots):
            raise ValueError("need one coroot per simple root")
        n = len(self.simple_roots[0]) if self.simple_roots else 0
        for v in self.simple_roots + self.simple_coroots:
            if len(v) != n:
                raise ValueError("lattice vectors of mismatched rank")
        a = self.cartan_matrix
        for i, row in enumerate(a):
            for j, x in enumerate(row):
                if i == j and x != 2:
                    raise ValueError("non-Cartan pairing matrix: diagonal entry must be 2")
                if i != j and (x > 0 or (x == 0) != (a[j][i] == 0)):
                    raise ValueError("non-Cartan pairing matrix: bad off-diagonal entry")
        if len(self.roots) > 10**5:
            raise ValueError("root system is not finite")

    @property
    def rank(self) -> int:
        return len(self.simple_roots[0]) if self.simple_roots else 0

    @property
    def semisimple_rank(self) -> int:
        return len(self.simple_roots)

    @cached_property
    def cartan_matrix(self) -> Mat:
        return tuple(tuple(dot(a, c) for c in self.simple_coroots) for a in self.simple_roots)

    @cached_property
    def reflection_matrices(self) -> tuple[Mat, ...]:
        """s_i on X*: v -> v - <v, a_i^vee> a_i."""
        n = self.rank
        out = []
        for a, c in zip(self.simple_roots, self.simple_coroots):
            out.append(tuple(tuple((1 if i == j else 0) - a[i] * c[j] for j in range(n)) for i in range(n)))
        return tuple(out)

    @cached_property
    def coreflection_matrices(self) -> tuple[Mat, ...]:
        """s_i on X_*: u -> u - <a_i, u> a_i^vee."""
        n = self.rank
        out = []
        for a, c in zip(self.simple_roots, self.simple_coroots):
            out.append(tuple(tuple((1 if i == j else 0) - c[i] * a[j] for j in range(n)) for i in range(n)))
        return tuple(out)

    @cached_property
    def _closure(self) -> dict[Vec, tuple[Vec, tuple[int, ...]]]:
        """root -> (coroot, coefficients in simple roots), by closure under simple reflections."""
        k = self.semisimple_rank
        found: dict[Vec, tuple[Vec, tuple[int, ...]]] = {}
        queue = deque()
        for i in range(k):
            coeff = tuple(1 if j == i else 0 for j in range(k))
            found[self.simple_roots[i]] = (self.simple_coroots[i], coeff)
            queue.append(self.simple_roots[i])
        while queue:
            r = queue.popleft()
            c, coeff = found[r]
            for i in range(k):
                p = dot(r, self.simple_coroots[i])
                new = vsub(r, vscale(p, self.simple_roots[i]))
                if new in found:
                    continue
                newc = vsub(c, vscale(dot(self.simple_roots[i], c), self.simple_coroots[i]))
                newcoeff = tuple(x - (p if j == i else 0) for j, x in enumerate(coeff))
                found[new] = (newc, newcoeff)
                queue.append(new)
                if len(found) > 10**5:
                    raise ValueError("root system is not finite")
        return found

    @cached_property
    def roots(self) -> tuple[Vec, ...]:
        return tuple(sorted(self._closure))

    @cached_property
    def coroots(self) -> tuple[Vec, ...]:
        return tuple(self._closure[r][0] for r in self.roots)

    @cached_property
    def positive_roots(self) -> tuple[Vec, ...]:
        return tuple(r for r in self.roots if self.is_positive(r))

    def is_root(self, v: Sequence) -> bool:
        return tuple(v) in self._closure

    def is_positive(self, root: Sequence) -> bool:
        coeff = self.root_coefficients(root)
        return all(x >= 0 for x in coeff)

    def root_coefficients(self, root: Sequence) -> tuple[int, ...]:
        try:
            return self._closure[tuple(root)][1]
        except KeyError:
            raise ValueError(f"{tuple(root)} is not a root") from None

    def coroot(self, root: Sequence) -> Vec:
        try:
            return self._closure[tuple(root)][0]
        except KeyError:
            raise ValueError(f"{tuple(root)} is not a root") from None

    def pairing(self, weight: Sequence, coweight: Sequence):
        return dot(weight, coweight)

    def reflect(self, root: Sequence, v: Sequence) -> Vec:
        """s_root applied to a weight v."""
        return normalize(vsub(v, vscale(dot(v, self.coroot(root)), root)))

    def coreflect(self, root: Sequence, u: Sequence) -> Vec:
        """s_root applied to a coweight u."""
        return normalize(vsub(u, vscale(dot(root, u), self.coroot(root))))

    def reflection_matrix(self, root: Sequence) -> Mat:
        n = self.rank
        c = self.coroot(root)
        return tuple(tuple((1 if i == j else 0) - root[i] * c[j] for j in range(n)) for i in range(n))

    @cached_property
    def weyl(self) -> WeylGroup:
        return WeylGroup(self, self.weyl_bound)

    @cached_property
    def rho(self) -> Vec:
        return half_sum(self.positive_roots, self.rank)

    @cached_property
    def invariant_form(self) -> Mat:
        """W-invariant form (x, y) = sum over coroots of <x, c><y, c>."""
        n = self.rank
        return tuple(
            tuple(sum(c[i] * c[j] for c in self.coroots) for j in range(n)) for i in range(n)
        )

    def dual(self) -> "BasedRootDatum":
        name = self.name + "^vee"
        if self.name.endswith("^vee"):
            name = self.name[: -len("^vee")]
        return BasedRootDatum(name, self.simple_coroots, self.simple_roots, self.weyl_bound)

    def simple_index(self, root: Sequence) -> int:
        return self.simple_roots.index(tuple(root))


def _block_sum(blocks: list[Mat]) -> Mat:
    n = sum(len(b) for b in blocks)
    out = [[0] * n for _ in range(n)]
    k = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, x in enumerate(row):
                out[k + i][k + j] = x
        k += len(b)
    return tuple(tuple(r) for r in out)


def build_datum(spec, weyl_bound: int = DEFAULT_WEYL_BOUND) -> BasedRootDatum:
    """Build a datum from a catalog string ("A2", "A1.sc", "A1xA1.ad") or explicit vectors.

    Catalog strings default to the adjoint lattice.  Explicit data is a mapping
    with keys "simple_roots" and "simple_coroots".
    """
    if isinstance(spec, str):
        base, _, lattice = spec.partition(".")
        lattice = lattice or "ad"
        if lattice not in ("sc", "ad"):
            raise ValueError(f"unknown lattice choice {lattice!r}")
        parts = base.split("x")
        try:
            blocks = [CARTAN_MATRICES[p] for p in parts]
        except KeyError as exc:
            raise ValueError(f"unknown Cartan type {exc.args[0]!r}") from None
        a = _block_sum(blocks)
        n = len(a)
        unit = [tuple(1 if j == i else 0 for j in range(n)) for i in range(n)]
        if lattice == "sc":
            roots = tuple(tuple(a[i]) for i in range(n))
            coroots = tuple(unit)
        else:
            roots = tuple(unit)
            coroots = tuple(tuple(a[i][j] for i in range(n)) for j in range(n))
        return BasedRootDatum(spec if "." in spec else base + ".ad", roots, coroots, weyl_bound)
    roots = tuple(tuple(int(x) for x in v) for v in spec["simple_roots"])
    coroots = tuple(tuple(int(x) for x in v) for v in spec["simple_coroots"])
    return BasedRootDatum(spec.get("name", "explicit"), roots, coroots, weyl_bound)


def rho(subset: Iterable[Sequence], n: Optional[int] = None) -> Vec:
    """Half-sum of a multiset of weights; the empty multiset needs the rank n."""
    subset = [tuple(v) for v in subset]
    if n is None:
        if not subset:
            raise ValueError("rank needed for an empty multiset")
        n = len(subset[0])
    return half_sum(subset, n)


def weyl_group(datum: BasedRootDatum) -> WeylGroup:
    return datum.weyl


def dot_action(w: WeylElement, lam: Sequence, rho_: Sequence) -> Vec:
    """w . lam = w(lam + rho) - rho."""
    return normalize(vsub(mat_vec(w.matrix, vadd(lam, rho_)), rho_))


@dataclass(frozen=True)
class RootSystem:
    """A finite reduced root system inside some rational space, with a chosen positive system.

    Used both for the ambient datum and for compact root systems of K.
    """

    positive: tuple[Vec, ...]
    copositive: tuple[Vec, ...]
    dim: int

    @cached_property
    def simple(self) -> tuple[int, ...]:
        pos = set(self.positive)
        out = []
        for k, r in enumerate(self.positive):
            decomposable = any(vsub(r, s) in pos for s in self.positive if s != r)
            if not decomposable:
                out.append(k)
        return tuple(out)

    @cached_property
    def rho(self) -> Vec:
        return half_sum(self.positive, self.dim)

    def reflect(self, k: int, v: Sequence) -> Vec:
        return normalize(vsub(v, vscale(dot(v, self.copositive[k]), self.positive[k])))

    def dominance_witness(self, lam: Sequence) -> Optional[tuple[tuple[int, ...], Vec]]:
        """(word of w, w . lam) with w . lam dominant, or None when lam + rho is singular.

        The word lists positions in `positive` of the simple reflections applied,
        first applied first; its length is the length of w.
        """
        v = vadd(lam, self.rho)
        word: list[int] = []
        while True:
            for k in self.simple:
                p = dot(v, self.copositive[k])
                if p < 0:
                    v = self.reflect(k, v)
                    word.append(k)
                    break
            else:
                break
        if any(dot(v, self.copositive[k]) == 0 for k in self.simple):
            return None
        return tuple(word), normalize(vsub(v, self.rho))


def root_system_of(datum: BasedRootDatum) -> RootSystem:
    pos = datum.positive_roots
    return RootSystem(pos, tuple(datum.coroot(r) for r in pos), datum.rank)


def dominance_witness(lam: Sequence, system) -> Optional[tuple[WeylElement, Vec]]:
    """For a datum: (w_lam, w_lam . lam) if lam + rho is regular, else None."""
    if isinstance(system, BasedRootDatum):
        rs = root_system_of(system)
        found = rs.dominance_witness(lam)
        if found is None:
            return None
        word, mu = found
        idx = [system.simple_index(rs.positive[k]) for k in word]
        w = system.weyl[system.weyl.from_word(tuple(reversed(idx)))]
        return w, mu
    return system.dominance_witness(lam)
