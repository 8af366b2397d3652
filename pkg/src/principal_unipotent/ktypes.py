"""Truncated K-type multiplicity series of Zuckerman cells and the nilpotent-cone character."""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Optional, Sequence

from .catalog import INVARIANT_DEGREES
from .kgb import _cayley_frame
from .linalg import (
    InvariantError,
    Vec,
    dot,
    normalize,
    rank,
    vadd,
    vscale,
    vsub,
    vsum,
)
from .realform import COMPACT, COMPLEX, IMAGINARY, REAL, CartanFrame, minus_lattice
from .rootdata import RootSystem, half_sum

SHAPES = {(1, 2): "A1", (2, 6): "A2", (2, 8): "B2", (2, 12): "G2", (3, 12): "A3", (3, 18): "B3"}


@dataclass
class FormalCharacter:
    """Weight (or highest weight) -> multiplicity, with an optional degree grading.

    `terms` is exact through total degree `truncation`; `certified` lists the
    highest weights whose multiplicity is claimed final (only for decomposed series).
    """

    terms: dict
    grading: dict = field(default_factory=dict)
    truncation: Optional[int] = None
    virtual: bool = False
    certified: frozenset = frozenset()
    certify: Optional[Callable] = field(default=None, compare=False, repr=False)

    def __getitem__(self, w) -> int:
        return self.terms.get(tuple(w), 0)

    def items(self):
        return sorted(self.terms.items())

    def degree(self, d: int) -> dict:
        return {w: m for (k, w), m in sorted(self.grading.items()) if k == d}

    def is_certified(self, mu) -> bool:
        """Also answers for dominant weights the truncated series never reached."""
        mu = tuple(mu)
        return mu in self.certified or (self.certify is not None and self.certify(mu))

    def certified_terms(self) -> dict:
        return {w: m for w, m in self.items() if w in self.certified}


def _clean(c: dict) -> dict:
    return {k: v for k, v in sorted(c.items()) if v}


def graded_product(a: dict, b: dict, D: int) -> dict:
    """Product of two graded characters {(degree, weight): mult}, truncated at degree D."""
    out: Counter = Counter()
    for (d1, w1), m1 in a.items():
        for (d2, w2), m2 in b.items():
            if d1 + d2 <= D:
                out[(d1 + d2, normalize(vadd(w1, w2)))] += m1 * m2
    return _clean(out)


def sym_character(weights: Sequence[Sequence], D: int, n: Optional[int] = None) -> FormalCharacter:
    """Graded character of the symmetric algebra on `weights`, exact through degree D."""
    if D < 0:
        raise ValueError("degree bound must be nonnegative")
    weights = [normalize(w) for w in weights]
    if n is None:
        if not weights:
            raise ValueError("rank needed for an empty weight set")
        n = len(weights[0])
    zero = (0,) * n
    series = {(0, zero): 1}
    for w in weights:
        geometric = {(k, normalize(vscale(k, w))): 1 for k in range(D + 1)}
        series = graded_product(series, geometric, D)
    return _from_graded(series, D)


def _from_graded(series: dict, D: int, virtual: bool = False) -> FormalCharacter:
    terms: Counter = Counter()
    for (_, w), m in series.items():
        terms[w] += m
    return FormalCharacter(_clean(terms), _clean(series), D, virtual)


def relation_factor(degrees: Sequence[int], n: int, D: int) -> dict:
    """prod (1 - q^d), as a graded character with zero weight."""
    zero = (0,) * n
    series = {(0, zero): 1}
    for d in degrees:
        series = graded_product(series, {(0, zero): 1, (d, zero): -1}, D)
    return series


# --- the compact side -----------------------------------------------------------------


def compact_frame(frame: CartanFrame, levi_roots: Sequence[Vec]) -> CartanFrame:
    """Cayley through real roots of the Levi (lex-least first) until none remain."""
    levi = set(levi_roots)
    current = frame
    while True:
        real = sorted(r for r in current.real_roots if r in levi and current.datum.is_positive(r))
        if not real:
            return current
        current = _cayley_frame(current, real[0])


def restrict(frame: CartanFrame, weight: Sequence) -> Vec:
    """r(lambda) = (lambda + theta lambda)/2: restriction to t, inside the theta-fixed subspace."""
    return normalize(vscale(Fraction(1, 2), vadd(weight, frame.apply_theta(weight))))


@dataclass(frozen=True)
class CompactData:
    """Roots of k on t with their coroots, the p weights, and a positive system compatible with u."""

    frame: CartanFrame
    roots: tuple[Vec, ...]
    coroots: tuple[Vec, ...]
    system: RootSystem

    @property
    def rho(self) -> Vec:
        return self.system.rho


def _p_weights(frame: CartanFrame, roots: Sequence[Vec]) -> list[Vec]:
    """t-weights of p on the span of the given theta-stable root set (root vectors only)."""
    out = []
    seen = set()
    roots = set(roots)
    for g in sorted(roots):
        kind = frame.classify_root(g)
        if kind == IMAGINARY:
            if frame.eps(g) != COMPACT:
                out.append(g)
        elif kind == COMPLEX:
            pair = frozenset((g, frame.apply_theta(g)))
            if pair not in seen:
                seen.add(pair)
                out.append(restrict(frame, g))
        else:
            pair = frozenset((g, tuple(-x for x in g)))
            if pair not in seen:
                seen.add(pair)
                out.append((0,) * len(g))
    return out


def _k_roots(frame: CartanFrame) -> list[tuple[Vec, Vec]]:
    d = frame.datum
    out = {}
    for g in d.roots:
        kind = frame.classify_root(g)
        if kind == IMAGINARY and frame.eps(g) == COMPACT:
            out[g] = d.coroot(g)
        elif kind == COMPLEX:
            r = restrict(frame, g)
            v = vadd(d.coroot(g), frame.apply_theta_co(d.coroot(g)))
            c = normalize(vscale(Fraction(2, 1) / dot(r, v), v))
            if r in out and out[r] != c:
                raise InvariantError("inconsistent coroot for a compact root")
            out[r] = c
    return sorted(out.items())


def compact_data(frame: CartanFrame, x: Sequence, y: Sequence) -> CompactData:
    """Delta(k,t) with positivity decided by <., x>, then <., y>, then lexicographically."""
    pairs = _k_roots(frame)

    def key(r):
        return (dot(r, x), dot(r, y)) + tuple(r)

    pos = [(r, c) for r, c in pairs if key(r) > key(tuple(0 for _ in r))]
    if 2 * len(pos) != len(pairs):
        raise InvariantError("compact roots do not split into positive and negative halves")
    rs = RootSystem(tuple(r for r, _ in pos), tuple(c for _, c in pos), frame.datum.rank)
    # Closure check: simple reflections permute the compact roots.
    root_set = {r for r, _ in pairs}
    for k in rs.simple:
        for r in root_set:
            if rs.reflect(k, r) not in root_set:
                raise InvariantError("compact roots are not closed under reflection")
    return CompactData(frame, tuple(r for r, _ in pairs), tuple(c for _, c in pairs), rs)


def compact_weyl_matches_real_weyl(frame: CartanFrame, data: CompactData) -> bool:
    """W(k) generated by compact reflections equals W(G,H) restricted to t."""
    basis = _fixed_basis(frame)
    if not basis:
        return len(data.roots) == 0
    restricted = set()
    weyl = frame.datum.weyl
    for u in frame.real_weyl_group:
        restricted.add(tuple(weyl.act(u, b) for b in basis))
    generated = {tuple(basis)}
    frontier = [tuple(basis)]
    while frontier:
        nxt = []
        for img in frontier:
            for k in range(len(data.system.positive)):
                new = tuple(data.system.reflect(k, v) for v in img)
                if new not in generated:
                    generated.add(new)
                    nxt.append(new)
        frontier = nxt
    return restricted == generated


def _fixed_basis(frame: CartanFrame) -> list[Vec]:
    """Basis of the theta-fixed subspace of X* (tensor Q)."""
    from .linalg import identity, kernel_basis, mat_sub

    n = frame.datum.rank
    return kernel_basis(mat_sub(frame.theta, identity(n)))


def norm2(datum, v: Sequence):
    """Squared length in the invariant form sum over coroots <v,c>^2."""
    return sum((dot(v, c) ** 2 for c in datum.coroots), Fraction(0))


def sqrt_sum_less(a2, b2, c2) -> bool:
    """Exact test of sqrt(a2) + sqrt(b2) < sqrt(c2) for nonnegative rationals."""
    r = Fraction(c2) - a2 - b2
    if r <= 0:
        return False
    return 4 * Fraction(a2) * b2 < r * r


# --- Levi data and the two series ------------------------------------------------------


def levi_components(datum, levi_roots: Sequence[Vec]) -> list[tuple[str, int]]:
    """(Cartan type, rank) of each simple component of a closed root subsystem."""
    levi = set(levi_roots)
    pos = [r for r in levi if datum.is_positive(r)]
    pos_set = set(pos)
    simple = sorted(r for r in pos if not any(vsub(r, s) in pos_set for s in pos))
    comps: list[list[Vec]] = []
    for s in simple:
        linked = [c for c in comps if any(dot(s, datum.coroot(t)) != 0 for t in c)]
        merged = [s] + [t for c in linked for t in c]
        comps = [c for c in comps if c not in linked] + [merged]
    out = []
    for c in comps:
        span = [r for r in levi if _in_span(datum, r, c)]
        shape = (len(c), len(span))
        if shape not in SHAPES:
            raise InvariantError(f"unsupported Levi component with {shape[1]} roots in rank {shape[0]}")
        out.append((SHAPES[shape], len(c)))
    return sorted(out)


def _in_span(datum, r, simple) -> bool:
    return rank(list(simple) + [r]) == len(simple)


@dataclass(frozen=True)
class LeviData:
    """A theta-stable Levi (split modulo center) seen from its fundamental frame."""

    frame: CartanFrame
    roots: tuple[Vec, ...]
    degrees: tuple[int, ...]

    @cached_property
    def p_weights(self) -> list[Vec]:
        """p_ss weights: root contributions plus dim(a cap l_ss) zero weights."""
        out = _p_weights(self.frame, self.roots)
        n = self.frame.datum.rank
        coroots = [self.frame.datum.coroot(r) for r in self.roots]
        a = minus_lattice(self.frame.theta)
        inter = len(a) + rank(coroots) - rank(list(a) + coroots) if coroots else 0
        return sorted(out + [(0,) * n] * inter)


def levi_data(frame: CartanFrame, levi_roots: Sequence[Vec],
              degrees_for: Callable[[str], Sequence[int]] = INVARIANT_DEGREES.__getitem__) -> LeviData:
    f = compact_frame(frame, levi_roots)
    degs = []
    for kind, _ in levi_components(frame.datum, levi_roots):
        degs.extend(degrees_for(kind))
    return LeviData(f, tuple(sorted(levi_roots)), tuple(sorted(degs)))


def nilcone_series(levi: LeviData, D: int) -> dict:
    """Graded t-character of C[N_l] = S(p_ss) prod (1 - q^d), through degree D."""
    n = levi.frame.datum.rank
    if not levi.roots:
        return {(0, (0,) * n): 1}
    s = sym_character(levi.p_weights, D, n).grading
    return graded_product(s, relation_factor(levi.degrees, n, D), D)


def nilcone_character(levi: LeviData, D: int) -> FormalCharacter:
    if D < 0:
        raise ValueError("degree bound must be nonnegative")
    return _from_graded(nilcone_series(levi, D), D, virtual=False)


@dataclass(frozen=True)
class CellData:
    """Everything the K-type formula needs for one Zuckerman cell."""

    levi: LeviData
    compact: CompactData
    u_p_weights: tuple[Vec, ...]
    shift: Vec

    @property
    def generators(self) -> list[Vec]:
        return list(self.levi.p_weights) + list(self.u_p_weights)


def cell_data(z, degrees_for: Callable[[str], Sequence[int]] = INVARIANT_DEGREES.__getitem__) -> CellData:
    levi = levi_data(z.frame, z.levi_roots, degrees_for)
    frame = levi.frame
    d = frame.datum
    u = z.nilradical_roots
    if {frame.apply_theta(r) for r in u} != set(u):
        raise InvariantError("nilradical is not stable under the fundamental involution")
    up = _p_weights(frame, u)
    if any(frame.classify_root(r) == REAL for r in u):
        raise InvariantError("nilradical contains a real root")
    n = d.rank
    x = vsum((d.coroot(r) for r in u), n)
    w = _positive_system_containing(frame, u)
    y = vsum((d.coroot(r) for r in frame.positive_system(w)), n)
    y = vadd(y, frame.apply_theta_co(y))
    comp = compact_data(frame, x, y)
    shift = normalize(vsub(vsum(up, n), restrict(frame, half_sum(u, n))))
    return CellData(levi, comp, tuple(sorted(up)), shift)


def _positive_system_containing(frame: CartanFrame, u) -> int:
    u = set(u)
    for e in frame.datum.weyl:
        if u <= set(frame.positive_system(e.index)):
            return e.index
    raise InvariantError("no positive system contains the nilradical")


def weight_series(cell: CellData, D: int) -> dict:
    """Graded multiset Lambda = shift + C[N_l] + S[u cap p], through degree D."""
    n = cell.levi.frame.datum.rank
    nil = nilcone_series(cell.levi, D)
    sym = sym_character(cell.u_p_weights, D, n).grading
    prod = graded_product(nil, sym, D)
    return _clean({(k, normalize(vadd(w, cell.shift))): m for (k, w), m in prod.items()})


def decompose_weights(series: dict, compact: CompactData) -> dict:
    """sum of (-1)^l(w) V(w.lambda) over a graded weight multiset; walls dropped."""
    out: Counter = Counter()
    for (k, lam), m in series.items():
        found = compact.system.dominance_witness(lam)
        if found is None:
            continue
        word, mu = found
        out[(k, mu)] += (-1) ** len(word) * m
    return _clean(out)


CONFIRM_FACTOR = 2


def _certificate(cell: CellData, D: int, mu: Sequence) -> bool:
    d = cell.levi.frame.datum
    gens = [g for g in cell.generators if any(x != 0 for x in g)]
    if not gens:
        return True
    m2 = min(norm2(d, g) for g in gens)
    rho = cell.compact.rho
    return sqrt_sum_less(norm2(d, vadd(mu, rho)), norm2(d, vadd(cell.shift, rho)), m2 * (D + 1) ** 2)


def ktype_series(z, D: int, degrees_for: Callable[[str], Sequence[int]] = INVARIANT_DEGREES.__getitem__,
                 cell: Optional[CellData] = None) -> FormalCharacter:
    """K-type multiplicities of a Zuckerman cell from the alternating-sum formula, truncated at D.

    A K-type is certified when the norm bound clears it at D and its multiplicity does not
    move between cutoffs D and CONFIRM_FACTOR * D.  The norm bound alone is not enough once
    generator weights cancel (B2, G2): a small K-type can keep appearing in higher degrees.
    """
    if D <= 0:
        raise ValueError("cutoff must be positive")
    cell = cell or cell_data(z, degrees_for)
    deep = CONFIRM_FACTOR * D
    full = decompose_weights(weight_series(cell, deep), cell.compact)
    graded = {key: m for key, m in full.items() if key[0] <= D}
    terms, confirm = Counter(), Counter()
    for (k, mu), m in full.items():
        confirm[mu] += m
        if k <= D:
            terms[mu] += m
    terms = _clean(terms)
    candidates = set(terms) | set(confirm) | _zero_candidates(cell, D)
    certified = frozenset(mu for mu in candidates
                          if terms.get(mu, 0) == confirm.get(mu, 0) and _certificate(cell, D, mu))
    if not any(_certificate(cell, D, mu) for mu in [cell.shift] + list(terms)):
        raise ValueError(f"cutoff {D} too small to certify any K-type")

    def certify(mu) -> bool:
        mu = normalize(mu)
        found = cell.compact.system.dominance_witness(mu)
        if found is None or found[0] or mu in terms or mu in confirm:
            return False
        return _certificate(cell, D, mu)

    return FormalCharacter(terms, graded, D, virtual=any(m < 0 for m in terms.values()), certified=certified,
                           certify=certify)


def _zero_candidates(cell: CellData, D: int) -> set:
    """Dominant weights reached by some truncated weight but cancelling out: certified zeros."""
    out = set()
    for (_, lam), _m in weight_series(cell, D).items():
        found = cell.compact.system.dominance_witness(lam)
        if found is not None:
            out.add(found[1])
    return out


# --- second route: Freudenthal characters and highest-weight peeling ---------------------


def freudenthal(system: RootSystem, mu: Sequence, datum) -> dict:
    """Weight multiplicities of the irreducible module with dominant highest weight mu."""
    mu = normalize(mu)
    rho = system.rho

    def form(a, b):
        return sum((dot(a, c) * dot(b, c) for c in datum.coroots), Fraction(0))

    simple = [system.positive[k] for k in system.simple]
    levels = [[mu]]
    seen = {mu}
    while levels[-1]:
        nxt = []
        for w in levels[-1]:
            for a in simple:
                v = normalize(vsub(w, a))
                if v not in seen and _dominated(system, v, mu):
                    seen.add(v)
                    nxt.append(v)
        levels.append(sorted(nxt))
    top = form(vadd(mu, rho), vadd(mu, rho))
    mult = {mu: 1}
    for level in levels[1:]:
        for v in level:
            total = Fraction(0)
            for a in system.positive:
                w = normalize(vadd(v, a))
                while w in mult:
                    total += mult[w] * form(w, a)
                    w = normalize(vadd(w, a))
            denom = top - form(vadd(v, rho), vadd(v, rho))
            if denom == 0:
                raise InvariantError("degenerate Freudenthal denominator")
            val = 2 * total / denom
            if val.denominator != 1:
                raise InvariantError("non-integral Freudenthal multiplicity")
            mult[v] = int(val)
    return {w: m for w, m in sorted(mult.items()) if m}


def _dominated(system: RootSystem, v, mu) -> bool:
    """v lies in the convex hull of W mu: its dominant conjugate is below mu."""
    dom = _dominant_conjugate(system, v)
    diff = vsub(mu, dom)
    return _nonneg_root_combination(system, diff)


def _dominant_conjugate(system: RootSystem, v):
    v = normalize(v)
    while True:
        for k in system.simple:
            if dot(v, system.copositive[k]) < 0:
                v = system.reflect(k, v)
                break
        else:
            return v


def _nonneg_root_combination(system: RootSystem, diff) -> bool:
    simple = [system.positive[k] for k in system.simple]
    if not simple:
        return all(x == 0 for x in diff)
    from .linalg import Coordinates

    try:
        c = Coordinates(simple)(diff)
    except ValueError:
        return False
    return all(x >= 0 and Fraction(x).denominator == 1 for x in c)


def peel(weights: dict, system: RootSystem, datum) -> dict:
    """Decompose a (virtual) weight multiplicity function into irreducible highest weights."""
    remaining = Counter({normalize(w): m for w, m in weights.items() if m})
    out: Counter = Counter()
    guard = 0
    while remaining:
        guard += 1
        if guard > 10**5:
            raise InvariantError("peeling did not terminate")
        dominant = [w for w, m in remaining.items() if m and _dominant_conjugate(system, w) == w]
        if not dominant:
            raise InvariantError("weight function is not W-invariant")
        top = max(dominant, key=lambda w: (_height(system, w), w))
        m = remaining[top]
        out[top] += m
        for w, k in freudenthal(system, top, datum).items():
            remaining[w] -= m * k
            if remaining[w] == 0:
                del remaining[w]
    return _clean(out)


def _height(system: RootSystem, w) -> Fraction:
    return sum((dot(w, c) for c in system.copositive), Fraction(0))


def peel_graded(series: dict, system: RootSystem, datum) -> dict:
    """Peel each degree separately: returns {(degree, highest weight): mult}."""
    by_degree: dict[int, dict] = defaultdict(dict)
    for (k, w), m in series.items():
        by_degree[k][w] = by_degree[k].get(w, 0) + m
    out = {}
    for k in sorted(by_degree):
        for mu, m in peel(by_degree[k], system, datum).items():
            out[(k, mu)] = m
    return _clean(out)


def associated_variety_report(z) -> dict:
    from .unipotent import is_unipotent_z

    full = is_unipotent_z(z)
    out = {"is_full_nilcone": full}
    if full:
        out["dimension"] = len(z.datum.roots) // 2
    return out


def ktype_record(series: FormalCharacter) -> list[dict]:
    return [
        {"highest_weight": [str(x) for x in mu], "multiplicity": m, "certified": mu in series.certified}
        for mu, m in series.items()
    ]
