"""Principal unipotent parameters: the BB side, the Zuckerman side and the map between them."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

from .kgb import (
    DEFAULT_MAX_GRAPH_SIZE,
    BBParameter,
    ParameterGraph,
    canonical,
    cayley_real,
    close_graph,
    cross_action,
    odd_real_simple_roots,
    parameter_record,
    seeds,
    normalize_typeL,
    transport_bits,
)
from .linalg import InvariantError, Vec, solve_mod2, vneg
from .realform import (
    COMPLEX,
    REAL,
    TYPE2,
    CartanFrame,
    CharacterData,
    character_constraints,
    is_quasisplit,
    positive_system_flags,
)
from .rootdata import half_sum


def is_unipotent_bb(p: BBParameter) -> bool:
    """Large, type Z, and every simple real root even."""
    f = p.flags
    if not (f.large and f.typeZ):
        return False
    return all(
        p.chi.real_grading(a) == 0 for a in p.simple_roots if p.frame.classify_root(a) == REAL
    )


def is_nonzero(p: BBParameter) -> bool:
    """The large flag after normalizing to type L."""
    q, _ = normalize_typeL(p)
    return q.flags.large


def decompose_to_unipotent(p: BBParameter) -> list[tuple[BBParameter, int]]:
    """Signed list of unipotent parameters whose sum equals p in the Grothendieck group.

    Steps, lex-least root first: Cayley through an odd simple real root (both
    branches for type 1, one for type 2), otherwise cross through a complex
    simple root with theta alpha negative; every step contributes a sign -1.
    """
    out: list[tuple[BBParameter, int]] = []
    stack = [(canonical(p), 1)]
    steps = 0
    while stack:
        q, sign = stack.pop()
        steps += 1
        if steps > 10**5:
            raise InvariantError("decomposition did not terminate")
        if not is_nonzero(q):
            continue
        if is_unipotent_bb(q):
            out.append((q, sign))
            continue
        odd = odd_real_simple_roots(q)
        if odd:
            a = odd[0]
            plus, minus = cayley_real(q, a)
            if q.frame.real_root_type(a) == TYPE2:
                stack.append((plus, -sign))
            else:
                stack.append((minus, -sign))
                stack.append((plus, -sign))
            continue
        bad = sorted(
            a for a in q.simple_roots
            if q.frame.classify_root(a) == COMPLEX and not q.is_positive(q.frame.apply_theta(a))
        )
        if not bad:
            raise InvariantError("nonzero parameter is type Z with even real roots but not unipotent")
        stack.append((cross_action(q, bad[0]), -sign))
    for q, _ in out:
        if not is_unipotent_bb(q):
            raise InvariantError("decomposition produced a non-unipotent parameter")
    return sorted(out, key=lambda t: (t[0].key, t[1]))


def collect_signed(terms: list[tuple[BBParameter, int]]) -> dict[tuple, int]:
    """Aggregate a signed list into key -> coefficient, dropping zeros."""
    c: Counter = Counter()
    for q, s in terms:
        c[q.key] += s
    return {k: v for k, v in sorted(c.items()) if v}


@dataclass(frozen=True)
class ZParameter:
    """(frame, Levi roots all real, nilradical roots theta-stable, character bits).

    The differential of the character is -rho(u); the bits live on X_*^{-theta}.
    """

    frame: CartanFrame
    levi_roots: tuple[Vec, ...]
    nilradical_roots: tuple[Vec, ...]
    bits: tuple[int, ...]
    id: Optional[int] = field(default=None, compare=False)

    @property
    def key(self) -> tuple:
        return (self.frame.key, self.nilradical_roots, self.bits)

    @property
    def datum(self):
        return self.frame.datum

    @cached_property
    def rho_u(self) -> Vec:
        return half_sum(self.nilradical_roots, self.datum.rank)

    @cached_property
    def chi_sharp_differential(self) -> Vec:
        return vneg(self.rho_u)

    @cached_property
    def chi(self) -> CharacterData:
        return CharacterData(self.frame, self.bits)

    def with_id(self, k: int) -> "ZParameter":
        return ZParameter(self.frame, self.levi_roots, self.nilradical_roots, self.bits, k)


def _check_z_structure(z: ZParameter) -> None:
    frame = z.frame
    u = set(z.nilradical_roots)
    if {frame.apply_theta(r) for r in u} != u:
        raise InvariantError("nilradical is not theta-stable")
    if any(frame.classify_root(r) != REAL for r in z.levi_roots):
        raise InvariantError("Levi is not split modulo center")
    if set(z.levi_roots) & u or len(z.levi_roots) + 2 * len(u) != len(z.datum.roots):
        raise InvariantError("Levi and nilradical do not form a parabolic")


def z_character_system(frame: CartanFrame, nilradical: tuple[Vec, ...]):
    """F_2 system for characters with differential -rho(u), even on every real root."""
    rho_u = half_sum(nilradical, frame.datum.rank)
    system = character_constraints(frame, rho_u)
    if system is None:
        return None
    rows, rhs = system
    rows = list(rows)
    rhs = list(rhs)
    for r in frame.real_roots:
        if frame.datum.is_positive(r):
            rows.append(list(frame.minus_coords.integral(frame.datum.coroot(r))))
            rhs.append(0)
    return rows, rhs


def canonical_z(z: ZParameter) -> ZParameter:
    """Least conjugate: canonical frame first, then the least pair over W(G,H)."""
    frame, w = z.frame.canonical
    weyl = z.datum.weyl
    if frame.key != z.frame.key:
        u = tuple(sorted(weyl.act(w, r) for r in z.nilradical_roots))
        bits = transport_bits(z.frame, z.bits, w, frame)
    else:
        u, bits = tuple(sorted(z.nilradical_roots)), z.bits
    best = None
    for g in frame.real_weyl_group:
        cand = (tuple(sorted(weyl.act(g, r) for r in u)), transport_bits(frame, bits, g, frame))
        if best is None or cand < best:
            best = cand
    return ZParameter(frame, frame.real_roots, best[0], best[1])


def zuckerman_of(p: BBParameter) -> ZParameter:
    """Z-parameter of a unipotent BB parameter: real-root Levi, u = Delta^+ minus Delta_R."""
    if not is_unipotent_bb(p):
        raise ValueError("parameter is not unipotent")
    frame = p.frame
    real = set(frame.real_roots)
    u = tuple(sorted(r for r in p.positive_roots if r not in real))
    z = ZParameter(frame, frame.real_roots, u, p.bits)
    system = z_character_system(frame, u)
    if system is None:
        raise InvariantError("-rho(u) does not integrate on the identity component")
    rows, rhs = system
    if any(sum(a * b for a, b in zip(r, z.bits)) % 2 != v for r, v in zip(rows, rhs)):
        raise InvariantError("Zuckerman character fails its constraints")
    _check_z_structure(z)
    return canonical_z(z)


def is_unipotent_z(z: ZParameter) -> bool:
    """Some positive system containing u is large and type Z."""
    u = set(z.nilradical_roots)
    frame = z.frame
    for e in z.datum.weyl:
        pos = frame.positive_system(e.index)
        if not u <= set(pos):
            continue
        f = positive_system_flags(frame, e.index)
        if f.large and f.typeZ:
            return True
    return False


def enumerate_z_star(graph: ParameterGraph) -> list[ZParameter]:
    """All unipotent Zuckerman parameters on the frames of the graph, found independently of z_map."""
    found: dict[tuple, ZParameter] = {}
    for frame in graph.frames:
        real = set(frame.real_roots)
        nilradicals = set()
        for e in frame.datum.weyl:
            u = tuple(sorted(r for r in frame.positive_system(e.index) if r not in real))
            if {frame.apply_theta(r) for r in u} == set(u):
                nilradicals.add(u)
        for u in sorted(nilradicals):
            system = z_character_system(frame, u)
            if system is None:
                continue
            rows, rhs = system
            for bits in solve_mod2(rows, rhs, len(frame.minus_basis)):
                z = ZParameter(frame, frame.real_roots, u, bits)
                _check_z_structure(z)
                if not is_unipotent_z(z):
                    continue
                z = canonical_z(z)
                found.setdefault(z.key, z)
    ordered = sorted(found.values(), key=lambda z: (z.frame.dim_t, z.key))
    return [z.with_id(k) for k, z in enumerate(ordered)]


@dataclass
class ClassificationReport:
    group: str
    graph: ParameterGraph
    bb_star: list[BBParameter]
    z_star: list[ZParameter]
    z_map: dict[int, int]
    quasisplit: bool
    checks: dict[str, bool]
    packets: dict = field(default_factory=dict)

    @property
    def counts(self) -> dict[str, int]:
        return {
            "bb0": len(self.graph.vertices),
            "bb_star": len(self.bb_star),
            "z_star": len(self.z_star),
            "cartan_classes": len(self.graph.cartan_classes),
        }

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        return {
            "group": self.group,
            "quasisplit": self.quasisplit,
            "counts": self.counts,
            "bb_star": [parameter_record(p) for p in self.bb_star],
            "z_star": [z_record(z) for z in self.z_star],
            "z_map": [[k, v] for k, v in sorted(self.z_map.items())],
            "checks": dict(sorted(self.checks.items())),
            "packets": self.packets,
        }


def z_record(z: ZParameter) -> dict:
    return {
        "id": z.id,
        "levi_roots": [list(r) for r in z.levi_roots],
        "nilradical_roots": [list(r) for r in z.nilradical_roots],
        "chi_sharp_differential": [str(x) for x in z.chi_sharp_differential],
        "character_bits": list(z.bits),
        "grading": list(z.frame.grading),
    }


def build_graph(entry, max_size: int = DEFAULT_MAX_GRAPH_SIZE) -> ParameterGraph:
    return close_graph(seeds(entry.seed_frame), max_size)


def classify(entry, max_size: int = DEFAULT_MAX_GRAPH_SIZE, graph: Optional[ParameterGraph] = None) -> ClassificationReport:
    """BB*, Z* and the map between them, with every structural check recorded."""
    graph = graph or build_graph(entry, max_size)
    bb_star = [v for v in graph.vertices if is_unipotent_bb(v)]
    z_star = enumerate_z_star(graph)
    z_ids = {z.key: z.id for z in z_star}
    z_map: dict[int, int] = {}
    lands_in_z_star = True
    for p in bb_star:
        z = zuckerman_of(p)
        if z.key not in z_ids or not is_unipotent_z(z):
            lands_in_z_star = False
            continue
        z_map[p.id] = z_ids[z.key]
    image = set(z_map.values())
    quasisplit = is_quasisplit(entry.inner, _fundamental(graph, entry))
    checks = {
        "z_map_lands_in_z_star": lands_in_z_star,
        "z_map_surjective": image == set(z_ids.values()),
        "z_map_injective": len(image) == len(z_map),
        "counts_agree": len(bb_star) == len(z_star),
        "empty_iff_not_quasisplit": (len(bb_star) == 0) == (not quasisplit),
    }
    checks["z_map_bijective"] = all(checks[k] for k in ("z_map_lands_in_z_star", "z_map_surjective", "z_map_injective"))
    return ClassificationReport(entry.name, graph, bb_star, z_star, z_map, quasisplit, checks)


def _fundamental(graph: ParameterGraph, entry) -> CartanFrame:
    frames = graph.frames or [entry.seed_frame]
    return min(frames, key=lambda f: (-f.dim_t, f.key))
