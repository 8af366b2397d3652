"""Exhaustive invariant suites shared by the `verify` command and the tests."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .kgb import ParameterGraph, _cayley_frame, canonical, cross_action_raw, d_invariant
from .linalg import InvariantError, identity
from .realform import COMPLEX, NONCOMPACT, CartanFrame, InnerClass, grading_transport_d, positive_imaginary_of
from .rootdata import build_datum

RANK3_TYPES = (
    "A1", "A2", "A3", "B2", "C2", "B3", "C3", "G2",
    "A1xA1", "A1xA2", "A1xB2", "A1xG2", "A1xA1xA1",
)


@dataclass
class SuiteResult:
    name: str
    checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def fail(self, item) -> None:
        if len(self.failures) < 20:
            self.failures.append(item)
        else:
            self.failures[-1] = "... more failures truncated"

    def to_json(self) -> dict:
        return {"name": self.name, "ok": self.ok, "checked": self.checked, "failures": self.failures}


def imaginary_frames(type_name: str):
    """theta = 1 on the adjoint datum with every additive grading (one bit per simple root)."""
    d = build_datum(type_name)
    inner = InnerClass(d, identity(d.rank))
    pos_imag = d.positive_roots
    for bits in product((0, 1), repeat=d.rank):
        # Adjoint lattice: a root is its own coordinate vector in the simple roots.
        grading = tuple(sum(c * b for c, b in zip(r, bits)) % 2 for r in pos_imag)
        yield CartanFrame(inner, identity(d.rank), grading)


def _simple_of(roots) -> list:
    s = set(roots)
    return [r for r in roots if not any(tuple(a - b for a, b in zip(r, q)) in s for q in roots)]


def _transported_frame(frame: CartanFrame, alpha) -> CartanFrame:
    """Frame for theta = s_alpha theta carrying the table grading on the roots orthogonal to alpha."""
    d = frame.datum
    s = d.reflection_matrix(alpha)
    grading = tuple(grading_transport_d(frame, alpha, b) for b in positive_imaginary_of(d, s))
    return CartanFrame(frame.inner, s, grading)


def grading_transport_suite(types=RANK3_TYPES) -> tuple[SuiteResult, SuiteResult]:
    """The four-case table (checked against a valid frame and the inverse Cayley) and largeness transport."""
    table = SuiteResult("grading_transport_table")
    lemma = SuiteResult("large_transports_to_large")
    for t in types:
        for frame in imaginary_frames(t):
            d = frame.datum
            transported = {}
            for alpha in d.positive_roots:
                if frame.eps(alpha) != NONCOMPACT:
                    continue
                table.checked += 1
                try:
                    new = _transported_frame(frame, alpha)
                    back = _cayley_frame(new, alpha)
                except (ValueError, InvariantError) as exc:
                    table.fail({"type": t, "grading": frame.grading, "alpha": alpha, "error": str(exc)})
                    continue
                for b in new.positive_imaginary:
                    if back.eps(b) != frame.eps(b):
                        table.fail({"type": t, "grading": frame.grading, "alpha": alpha, "beta": b})
                transported[alpha] = new
            for e in d.weyl:
                pos = frame.positive_system(e.index)
                simple = frame.simple_roots_of(e.index)
                if any(frame.eps(a) != NONCOMPACT for a in simple):
                    continue
                for a in simple:
                    key = a if d.is_positive(a) else tuple(-x for x in a)
                    new = transported[key]
                    sub = [r for r in pos if r in set(new.imaginary_roots)]
                    lemma.checked += 1
                    bad = [b for b in _simple_of(sub) if new.eps(b) != NONCOMPACT]
                    if bad:
                        lemma.fail({"type": t, "grading": frame.grading, "positive_system": e.word,
                                    "alpha": a, "compact_simple": bad})
    return table, lemma


def monotonicity_suite(graph: ParameterGraph, group: str = "") -> SuiteResult:
    """Cayley edges raise d by one; complex cross edges move it by -1 or +1 as theta alpha is positive or not."""
    res = SuiteResult("monotonicity")
    verts = graph.vertices
    for e in graph.edges:
        p, q = verts[e.source], verts[e.target]
        dp, dq = d_invariant(p), d_invariant(q)
        if e.kind.startswith("cayley"):
            res.checked += 1
            if dq - dp != 1:
                res.fail({"group": group, "edge": [e.source, e.kind, list(e.root), e.target], "delta_d": dq - dp})
        elif p.frame.classify_root(e.root) == COMPLEX:
            res.checked += 1
            want = -1 if p.is_positive(p.frame.apply_theta(e.root)) else 1
            if dq - dp != want:
                res.fail({"group": group, "edge": [e.source, e.kind, list(e.root), e.target],
                          "delta_d": dq - dp, "expected": want})
    return res


def cross_involution_suite(graph: ParameterGraph) -> SuiteResult:
    """Crossing twice through the same simple root returns the parameter."""
    res = SuiteResult("cross_action_involution")
    for p in graph.vertices:
        for a in p.simple_roots:
            res.checked += 1
            q = cross_action_raw(p, a)
            if canonical(cross_action_raw(q, tuple(-x for x in a))).key != p.key:
                res.fail({"param": p.id, "root": list(a)})
    return res
