"""Beilinson-Bernstein parameters at infinitesimal character 0 and their closure graph."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence

from .linalg import Coordinates, InvariantError, Vec, dot, mat_mul, solve_mod2, vneg
from .realform import (
    COMPACT,
    COMPLEX,
    IMAGINARY,
    NONCOMPACT,
    REAL,
    TYPE2,
    CartanFrame,
    CharacterData,
    character_is_valid,
    characters,
    positive_imaginary_of,
    positive_system_flags,
)

DEFAULT_MAX_GRAPH_SIZE = 100_000


@dataclass(frozen=True)
class BBParameter:
    """(frame, positive system w(Delta^+), character bits); the differential is -rho(w Delta^+)."""

    frame: CartanFrame
    pos: int
    bits: tuple[int, ...]
    id: Optional[int] = field(default=None, compare=False)

    @property
    def key(self) -> tuple:
        return (self.frame.key, self.pos, self.bits)

    @property
    def datum(self):
        return self.frame.datum

    @cached_property
    def chi(self) -> CharacterData:
        return CharacterData(self.frame, self.bits)

    @cached_property
    def rho(self) -> Vec:
        return self.datum.weyl.act(self.pos, self.datum.rho)

    @cached_property
    def positive_roots(self) -> tuple[Vec, ...]:
        return self.frame.positive_system(self.pos)

    @cached_property
    def simple_roots(self) -> tuple[Vec, ...]:
        return self.frame.simple_roots_of(self.pos)

    def is_positive(self, root: Sequence) -> bool:
        return self.frame.in_positive_system(self.pos, root)

    @cached_property
    def flags(self):
        return positive_system_flags(self.frame, self.pos)

    def with_id(self, k: int) -> "BBParameter":
        return BBParameter(self.frame, self.pos, self.bits, k)


def make_parameter(frame: CartanFrame, pos: int, bits: Sequence[int]) -> BBParameter:
    """A raw parameter, validated against the differential -rho."""
    p = BBParameter(frame, pos, tuple(bits))
    if not character_is_valid(frame, p.rho, p.bits):
        raise InvariantError("character bits inconsistent with differential -rho(n)")
    return p


def transport_bits(src: CartanFrame, bits: Sequence[int], w: int, dst: CartanFrame) -> tuple[int, ...]:
    """Bits of w.chi on dst, where dst.theta = w src.theta w^-1: (w chi)(nu) = chi(w^-1 nu)."""
    weyl = src.datum.weyl
    winv = weyl.inv(w)
    chi = CharacterData(src, tuple(bits))
    return tuple(chi.value(weyl.coact(winv, b)) for b in dst.minus_basis)


def conjugate_parameter(p: BBParameter, w: int) -> BBParameter:
    weyl = p.datum.weyl
    frame = p.frame.conjugate(w)
    return BBParameter(frame, weyl.mul(w, p.pos), transport_bits(p.frame, p.bits, w, frame))


def canonical(p: BBParameter) -> BBParameter:
    """Canonical representative: least conjugate frame, then least pair modulo W(G,H)."""
    frame, w = p.frame.canonical
    q = conjugate_parameter(p, w) if frame.key != p.frame.key else p
    frame = q.frame
    best = None
    for u in frame.real_weyl_group:
        cand = (frame.datum.weyl.mul(u, q.pos), transport_bits(frame, q.bits, u, frame))
        if best is None or cand < best:
            best = cand
    return BBParameter(frame, best[0], best[1])


def d_invariant(p: BBParameter) -> int:
    """dim(b cap k) = dim t + #compact positive imaginary + #{complex mu > 0 : theta mu > 0}/2."""
    frame = p.frame
    compact = sum(1 for r in frame.imaginary_roots if p.is_positive(r) and frame.eps(r) == COMPACT)
    pairs = sum(
        1 for r in frame.complex_roots if p.is_positive(r) and p.is_positive(frame.apply_theta(r))
    )
    if pairs % 2:
        raise InvariantError("theta-stable complex positive roots do not pair up")
    return frame.dim_t + compact + pairs // 2


def _simple_index(p: BBParameter, alpha: Sequence) -> int:
    alpha = tuple(alpha)
    try:
        return p.simple_roots.index(alpha)
    except ValueError:
        raise ValueError(f"{alpha} is not simple for the positive system") from None


def cross_action_raw(p: BBParameter, alpha: Sequence) -> BBParameter:
    i = _simple_index(p, alpha)
    weyl = p.datum.weyl
    s = weyl.from_word((i,))
    bits = tuple((b + dot(alpha, nu)) % 2 for b, nu in zip(p.bits, p.frame.minus_basis))
    return make_parameter(p.frame, weyl.mul(p.pos, s), bits)


def cross_action(p: BBParameter, alpha: Sequence) -> BBParameter:
    """s_alpha: positive system s_alpha Delta^+, character chi tensor alpha."""
    return canonical(cross_action_raw(p, alpha))


def _cayley_frame(frame: CartanFrame, alpha: Sequence) -> CartanFrame:
    """theta' = s_alpha theta, with the transported grading (lex-least admissible extension)."""
    d = frame.datum
    theta = mat_mul(d.reflection_matrix(alpha), frame.theta)
    new_pos = positive_imaginary_of(d, theta)
    alpha = tuple(alpha)
    known: dict[Vec, int] = {}
    for r in new_pos:
        if r == alpha or r == vneg(alpha):
            known[r] = NONCOMPACT
        elif frame.classify_root(r) == IMAGINARY:
            hit = d.is_root(tuple(a + b for a, b in zip(alpha, r)))
            known[r] = (frame.eps(r) + int(hit)) % 2
    pos_set = set(new_pos)
    simple = [r for r in new_pos if not any(tuple(a - b for a, b in zip(r, s)) in pos_set for s in new_pos)]
    coords = Coordinates(simple)
    rows = [coords.integral(r) for r in known]
    rhs = [known[r] for r in known]
    sols = solve_mod2(rows, rhs, len(simple))
    gradings = sorted(
        tuple(sum(c * x for c, x in zip(coords.integral(r), sol)) % 2 for r in new_pos) for sol in sols
    )
    if not gradings:
        raise InvariantError("no grading extends the Cayley transported grading")
    if len(gradings) > 2:
        raise InvariantError("more than two gradings extend the Cayley transported grading")
    frames = [CartanFrame(frame.inner, theta, g) for g in gradings]
    if len(frames) == 2:
        s = d.weyl.index(d.reflection_matrix(alpha))
        if frames[0].conjugate(s).key != frames[1].key:
            raise InvariantError("the two grading extensions are not related by s_alpha")
    return frames[0]


def cayley_real_raw(p: BBParameter, alpha: Sequence) -> tuple[BBParameter, BBParameter]:
    alpha = tuple(alpha)
    frame = p.frame
    if frame.classify_root(alpha) != REAL:
        raise ValueError(f"{alpha} is not real")
    i = _simple_index(p, alpha)
    if p.chi.real_grading(alpha) == 0:
        raise ValueError(f"{alpha} is even: the Cayley transform of the character is undefined")
    new = _cayley_frame(frame, alpha)
    bits = tuple(p.chi.value(nu) for nu in new.minus_basis)
    weyl = p.datum.weyl
    plus = make_parameter(new, p.pos, bits)
    minus = make_parameter(new, weyl.mul(p.pos, weyl.from_word((i,))), bits)
    return plus, minus


def cayley_real(p: BBParameter, alpha: Sequence) -> tuple[BBParameter, BBParameter]:
    """(c+, c-) through an odd real root simple in Delta^+; c+ keeps alpha positive."""
    plus, minus = (canonical(q) for q in cayley_real_raw(p, alpha))
    if p.frame.real_root_type(alpha) == TYPE2 and plus.key != minus.key:
        raise InvariantError("type 2 Cayley transforms differ")
    return plus, minus


def odd_real_simple_roots(p: BBParameter) -> list[Vec]:
    return sorted(
        a for a in p.simple_roots if p.frame.classify_root(a) == REAL and p.chi.real_grading(a) == 1
    )


def seeds(frame: CartanFrame) -> list[BBParameter]:
    """All parameters on a frame: every positive system and every admissible character."""
    found = {}
    for e in frame.datum.weyl:
        rho_vec = frame.datum.weyl.act(e.index, frame.datum.rho)
        for bits in characters(frame, rho_vec):
            q = canonical(make_parameter(frame, e.index, bits))
            found[q.key] = q
    return [found[k] for k in sorted(found)]


@dataclass(frozen=True)
class Edge:
    source: int
    kind: str  # "cross", "cayley+", "cayley-"
    root: Vec
    target: int


@dataclass
class ParameterGraph:
    vertices: list[BBParameter]
    edges: list[Edge]

    @cached_property
    def by_key(self) -> dict[tuple, BBParameter]:
        return {v.key: v for v in self.vertices}

    def lookup(self, p: BBParameter) -> BBParameter:
        return self.by_key[canonical(p).key]

    @cached_property
    def cartan_classes(self) -> dict[tuple, list[int]]:
        out: dict[tuple, list[int]] = {}
        for v in self.vertices:
            out.setdefault(v.frame.key, []).append(v.id)
        return out

    @cached_property
    def frames(self) -> list[CartanFrame]:
        seen = {}
        for v in self.vertices:
            seen.setdefault(v.frame.key, v.frame)
        return [seen[k] for k in seen]


def _vertex_order(p: BBParameter) -> tuple:
    return (p.frame.dim_t, p.frame.key, p.pos, p.bits)


def close_graph(start: Iterable[BBParameter], max_size: int = DEFAULT_MAX_GRAPH_SIZE) -> ParameterGraph:
    """Least set containing the seeds, closed under cross actions and odd real simple Cayley transforms."""
    found: dict[tuple, BBParameter] = {}
    raw_edges: list[tuple[tuple, str, Vec, tuple]] = []
    queue = deque()
    for s in start:
        s = canonical(s)
        if s.key not in found:
            found[s.key] = s
            queue.append(s)
    while queue:
        p = queue.popleft()
        targets = []
        for a in p.simple_roots:
            targets.append(("cross", a, cross_action(p, a)))
        for a in odd_real_simple_roots(p):
            plus, minus = cayley_real(p, a)
            targets.append(("cayley+", a, plus))
            targets.append(("cayley-", a, minus))
        for kind, a, q in targets:
            raw_edges.append((p.key, kind, a, q.key))
            if q.key not in found:
                if len(found) >= max_size:
                    raise InvariantError(f"parameter graph exceeds {max_size} vertices")
                found[q.key] = q
                queue.append(q)
    ordered = sorted(found.values(), key=_vertex_order)
    ids = {p.key: k for k, p in enumerate(ordered)}
    vertices = [p.with_id(k) for k, p in enumerate(ordered)]
    edges = sorted({Edge(ids[s], kind, a, ids[t]) for s, kind, a, t in raw_edges},
                   key=lambda e: (e.source, e.kind, e.root, e.target))
    return ParameterGraph(vertices, edges)


def _normalize(p: BBParameter, want_z: bool) -> tuple[BBParameter, int]:
    sign = 1
    steps = 0
    bound = len(p.datum.positive_roots) + 1
    while True:
        bad = []
        for a in p.simple_roots:
            if p.frame.classify_root(a) != COMPLEX:
                continue
            theta_positive = p.is_positive(p.frame.apply_theta(a))
            if want_z and not theta_positive:
                bad.append(a)
            if not want_z and theta_positive:
                bad.append(a)
        if not bad:
            return p, sign
        p = cross_action(p, min(bad))
        sign = -sign
        steps += 1
        if steps > bound:
            raise InvariantError("normalization did not terminate")


def normalize_typeZ(p: BBParameter) -> tuple[BBParameter, int]:
    """Cross through complex simple roots with theta alpha negative until type Z."""
    return _normalize(p, True)


def normalize_typeL(p: BBParameter) -> tuple[BBParameter, int]:
    """Cross through complex simple roots with theta alpha positive until type L."""
    return _normalize(p, False)


def parameter_record(p: BBParameter) -> dict:
    frame = p.frame
    return {
        "id": p.id,
        "theta_word": list(frame.inner.twisted_involution_word(frame.theta)),
        "grading": list(frame.grading),
        "imaginary_roots": [list(r) for r in frame.positive_imaginary],
        "positive_system_word": list(p.datum.weyl[p.pos].word),
        "simple_roots": [list(r) for r in p.simple_roots],
        "character_bits": list(p.bits),
        "real_grading": {",".join(map(str, r)): g for r, g in sorted(p.chi.real_grading_table.items())
                         if p.datum.is_positive(r)},
        "d": d_invariant(p),
    }


def graph_record(graph: ParameterGraph) -> dict:
    return {
        "vertices": [parameter_record(v) for v in graph.vertices],
        "edges": [
            {"source": e.source, "kind": e.kind, "root": list(e.root), "target": e.target} for e in graph.edges
        ],
    }
