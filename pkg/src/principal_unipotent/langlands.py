"""Dual side: Tits representatives, (y, lambda) pairs of unipotent parameters, and an order-2 oracle.

The dual torus is X* tensor C^x; its points of finite order are stored as
vectors in X* tensor Q taken modulo X*.  The Weyl group of the dual datum is
identified with that of the datum (same words), acting on X* as usual.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Optional, Sequence

from sympy import Matrix
from sympy.matrices.normalforms import hermite_normal_form

from .linalg import (
    Coordinates,
    InvariantError,
    Mat,
    Vec,
    dot,
    identity,
    mat_add,
    mat_mul,
    mat_neg,
    mat_vec,
    transpose,
    vadd,
    vneg,
    vscale,
    vsub,
)
from .realform import CartanFrame, InnerClass, positive_imaginary_of, positive_system_flags
from .rootdata import BasedRootDatum


def mod1(v: Sequence) -> Vec:
    return tuple(Fraction(x) % 1 for x in v)


@dataclass(frozen=True)
class DualDatum:
    datum: BasedRootDatum  # the dual datum: roots and coroots exchanged
    delta_vee: Mat  # acting on the dual character lattice (X_* of the original)


def dual_datum(datum: BasedRootDatum, delta: Mat) -> DualDatum:
    """Swap roots and coroots; delta_vee = -w0 delta^t on X_*."""
    w0co = datum.weyl.coaction(datum.weyl.longest.index)
    dv = mat_neg(mat_mul(w0co, transpose(delta)))
    return DualDatum(datum.dual(), tuple(tuple(r) for r in dv))


@dataclass(frozen=True)
class TitsElement:
    """t sigma_w theta0^e, with t in X* tensor Q/Z."""

    torus: Vec
    w: int
    twist: int = 0


class TitsGroup:
    """Extended Tits group of the dual: sigma_i^2 = alpha_i / 2 and theta0 sigma_i theta0^-1 = sigma_delta(i)."""

    def __init__(self, datum: BasedRootDatum, delta: Mat):
        self.datum = datum
        self.delta = delta
        self.weyl = datum.weyl
        self.n = datum.rank
        w0 = self.weyl.longest.matrix
        # delta_vee on the dual cocharacter lattice X*: -w0 delta.
        self.delta_torus = mat_neg(mat_mul(w0, delta))
        perm = []
        for a in datum.simple_roots:
            perm.append(datum.simple_roots.index(mat_vec(self.delta_torus, a)))
        self.delta_perm = tuple(perm)
        self._delta_w: dict[int, int] = {}
        self._sigma_prod: dict[tuple[int, int], tuple[Vec, int]] = {}

    @property
    def one(self) -> TitsElement:
        return TitsElement((Fraction(0),) * self.n, 0, 0)

    def sigma(self, w: int) -> TitsElement:
        return TitsElement((Fraction(0),) * self.n, w, 0)

    def torus(self, t: Sequence) -> TitsElement:
        return TitsElement(mod1(t), 0, 0)

    @property
    def theta0(self) -> TitsElement:
        return TitsElement((Fraction(0),) * self.n, 0, 1)

    def delta_w(self, w: int) -> int:
        if w not in self._delta_w:
            word = tuple(self.delta_perm[i] for i in self.weyl[w].word)
            self._delta_w[w] = self.weyl.from_word(word)
        return self._delta_w[w]

    def _times_simple(self, t: Vec, w: int, i: int) -> tuple[Vec, int]:
        weyl = self.weyl
        ws = weyl.mul(w, weyl.from_word((i,)))
        if weyl[ws].length > weyl[w].length:
            return t, ws
        half = vscale(Fraction(1, 2), self.datum.simple_roots[i])
        return mod1(vadd(t, weyl.act(ws, half))), ws

    def sigma_product(self, w1: int, w2: int) -> tuple[Vec, int]:
        """sigma_w1 sigma_w2 = t sigma_w with (t, w) returned."""
        key = (w1, w2)
        if key not in self._sigma_prod:
            t, w = (Fraction(0),) * self.n, w1
            for i in self.weyl[w2].word:
                t, w = self._times_simple(t, w, i)
            self._sigma_prod[key] = (t, w)
        return self._sigma_prod[key]

    def word_product(self, word: Sequence[int]) -> TitsElement:
        """Product of the simple sigma_i along an arbitrary word."""
        t, w = (Fraction(0),) * self.n, 0
        for i in word:
            t, w = self._times_simple(t, w, i)
        return TitsElement(t, w, 0)

    def conj_theta0(self, x: TitsElement) -> TitsElement:
        return TitsElement(mod1(mat_vec(self.delta_torus, x.torus)), self.delta_w(x.w), x.twist)

    def mul(self, a: TitsElement, b: TitsElement) -> TitsElement:
        if a.twist:
            b = self.conj_theta0(b)
        t = vadd(a.torus, self.weyl.act(a.w, b.torus))
        s, w = self.sigma_product(a.w, b.w)
        return TitsElement(mod1(vadd(t, s)), w, (a.twist + b.twist) % 2)

    def inv(self, a: TitsElement) -> TitsElement:
        winv = self.weyl.inv(a.w)
        s, w = self.sigma_product(a.w, winv)
        if w != 0:
            raise InvariantError("Weyl inverse mismatch")
        sig_inv = TitsElement(mod1(vneg(self.weyl.act(winv, s))), winv, 0)
        core = self.mul(sig_inv, self.torus(vneg(a.torus)))
        if a.twist:
            return self.mul(self.conj_theta0(core), self.theta0)
        return core

    def theta_of(self, x: TitsElement) -> Mat:
        """Action on X* (the dual cocharacter lattice)."""
        m = self.weyl[x.w].matrix
        return mat_mul(m, self.delta_torus) if x.twist else m

    def theta_on_dual_roots(self, x: TitsElement) -> Mat:
        """Action on X_* (where the dual roots live): inverse transpose of theta_of."""
        return transpose(self.theta_of(x))


# --- (y, lambda) pairs ------------------------------------------------------------------


@dataclass(frozen=True)
class LPair:
    y: TitsElement
    key: tuple  # canonical form up to dual-group conjugacy
    mu: Vec

    @property
    def lam(self) -> Vec:
        return (0,) * len(self.mu)


def _lift_character(p) -> Vec:
    """Least integral mu with (1+theta)mu = -(1+theta)rho and <mu, b> = chi(b) mod 2."""
    frame = p.frame
    n = p.datum.rank
    one_plus = mat_add(identity(n), frame.theta)
    target = vneg(mat_vec(one_plus, p.rho))
    for bound in range(0, 16):
        for mu in sorted(product(range(-bound, bound + 1), repeat=n), key=lambda v: (max(map(abs, v), default=0), v)):
            if max(map(abs, mu), default=0) != bound:
                continue
            if mat_vec(one_plus, mu) != target:
                continue
            if all(dot(mu, b) % 2 == p.chi.value(b) for b in frame.minus_basis):
                return tuple(mu)
    raise InvariantError("no integral lift of the character found")


def _weyl_part(p) -> int:
    """w with -theta = w delta_vee on X*, i.e. w = theta delta w0."""
    d = p.datum
    m = mat_mul(mat_mul(p.frame.theta, p.frame.inner.delta), d.weyl.longest.matrix)
    return d.weyl.index(m)


def y_of(p, group: Optional[TitsGroup] = None) -> tuple[TitsElement, Vec]:
    group = group or TitsGroup(p.datum, p.frame.inner.delta)
    mu = _lift_character(p)
    # sigma_w sigma_{delta w} = (1 - theta_y) rho_std / 2; shifting by rho_std - rho
    # (a sum of roots) cancels it, so y^2 = 1 on every isogeny.
    shift = vadd(mu, vsub(p.datum.rho, p.rho))
    y = group.mul(group.mul(group.torus(vscale(Fraction(1, 2), shift)), group.sigma(_weyl_part(p))), group.theta0)
    theta_vee = mat_neg(p.frame.theta)
    if group.theta_of(y) != theta_vee:
        raise InvariantError("Weyl part does not realize -theta")
    return y, mu


def dual_eigenvalue(group: TitsGroup, y: TitsElement, coroot: Sequence) -> int:
    """Ad(y) on the root vector of a dual root fixed by y: 0 for +1 (compact), 1 for -1."""
    d = group.datum
    coroot = tuple(coroot)
    th = group.theta_on_dual_roots(y)
    if mat_vec(th, coroot) != coroot:
        raise ValueError("dual root is not imaginary for Ad(y)")
    weyl = group.weyl
    for e in weyl:
        v = e.index
        image = weyl.coact(weyl.inv(v), coroot)
        if image in d.simple_coroots:
            break
    else:
        raise InvariantError("dual root not conjugate to a simple one")
    k = d.simple_coroots.index(image)
    sv = group.sigma(v)
    y1 = group.mul(group.mul(group.inv(sv), y), sv)
    src = group.delta_perm[k] if y1.twist else k
    if weyl.coact(y1.w, d.simple_coroots[src]) != d.simple_coroots[k]:
        raise InvariantError("Weyl part does not carry the simple root to itself")
    value = 2 * dot(y1.torus, d.simple_coroots[k])
    if Fraction(value).denominator != 1:
        raise InvariantError("Ad(y) eigenvalue on an imaginary root is not +-1")
    return int(value) % 2


def dual_frame(group: TitsGroup, y: TitsElement) -> CartanFrame:
    """The involution Ad(y) on the dual datum, graded by its eigenvalues on imaginary dual roots."""
    dual = group.datum.dual()
    w0co = group.datum.weyl.coaction(group.weyl.longest.index)
    delta_dual = mat_neg(mat_mul(w0co, transpose(group.delta)))
    inner = InnerClass(dual, tuple(tuple(r) for r in delta_dual))
    theta = group.theta_on_dual_roots(y)
    grading = tuple(dual_eigenvalue(group, y, r) for r in positive_imaginary_of(dual, theta))
    return CartanFrame(inner, theta, grading)


def principal_unipotent_y_check(group: TitsGroup, y: TitsElement) -> dict:
    """order2 plus the flags of the standard dual Borel for Ad(y), under both readings.

    The flags are reported for y itself; the two readings ask whether some
    sigma_v-conjugate of y satisfies small and type L, or large and type L.
    """
    order2 = group.mul(y, y) == group.one
    flags = positive_system_flags(dual_frame(group, y), 0)
    definition = corollary = False
    for e in group.weyl:
        sv = group.sigma(e.index)
        f = positive_system_flags(dual_frame(group, group.mul(group.mul(sv, y), group.inv(sv))), 0)
        definition = definition or (f.small and f.typeL)
        corollary = corollary or (f.large and f.typeL)
    return {
        "order2": order2,
        "small_for_Ady": flags.small,
        "typeL_for_Ady": flags.typeL,
        "large_for_Ady": flags.large,
        "definition_reading": definition,
        "corollary_reading": corollary,
    }


def _real_dual_roots(group: TitsGroup, y: TitsElement) -> list[Vec]:
    th = group.theta_on_dual_roots(y)
    d = group.datum
    return sorted(c for c in d.coroots if d.is_positive(_root_of(d, c)) and mat_vec(th, c) == vneg(c))


def _root_of(d: BasedRootDatum, coroot: Vec) -> Vec:
    return d.roots[d.coroots.index(coroot)]


def cayley_to_fundamental(group: TitsGroup, y: TitsElement) -> TitsElement:
    """Conjugate y until Ad(y) has no real dual roots (the most compact position)."""
    d = group.datum
    weyl = group.weyl
    for _ in range(d.rank + 1):
        real = _real_dual_roots(group, y)
        if not real:
            return y
        beta = real[0]
        for e in weyl:
            image = weyl.coact(weyl.inv(e.index), beta)
            if image in d.simple_coroots:
                v = e.index
                break
        k = d.simple_coroots.index(image)
        sv = group.sigma(v)
        y1 = group.mul(group.mul(group.inv(sv), y), sv)
        sk = group.sigma(weyl.from_word((k,)))
        x1 = group.mul(y1, group.inv(sk))
        c = dual_eigenvalue(group, x1, d.simple_coroots[k])
        shift = Fraction(1, 4) - Fraction(c, 4)
        y = group.mul(x1, group.torus(vscale(shift, d.simple_roots[k])))
        if group.mul(y, y) != group.one:
            raise InvariantError("Cayley conjugate of y is not of order 2")
    raise InvariantError("dual Cayley navigation did not terminate")


def _lattice_basis(gens: list[Vec], n: int) -> list[Vec]:
    gens = [g for g in gens if any(x != 0 for x in g)]
    if not gens:
        return []
    h = hermite_normal_form(Matrix([list(g) for g in gens]).T)
    cols = [tuple(int(h[i, j]) for i in range(h.rows)) for j in range(h.cols)]
    return [c for c in cols if any(x != 0 for x in c)]


def canonical_key(group: TitsGroup, y: TitsElement) -> tuple:
    """Invariant of the dual-group conjugacy class of y (with y^2 = 1)."""
    y = cayley_to_fundamental(group, y)
    weyl = group.weyl
    target = group.delta_torus
    theta = group.theta_of(y)
    if theta != target:
        for e in weyl:
            m = e.matrix
            if mat_mul(mat_mul(m, theta), weyl[weyl.inv(e.index)].matrix) == target:
                sv = group.sigma(e.index)
                y = group.mul(group.mul(sv, y), group.inv(sv))
                break
        else:
            raise InvariantError("fundamental position not conjugate to the distinguished involution")
    if y.w != 0:
        raise InvariantError("fundamental position has nontrivial Weyl part")
    n = group.n
    one_plus = mat_add(identity(n), target)
    lattice = _lattice_basis([mat_vec(one_plus, e) for e in identity(n)], n)
    coords = Coordinates(lattice) if lattice else None
    best = None
    for e in weyl:
        if mat_mul(e.matrix, target) != mat_mul(target, e.matrix):
            continue
        t = weyl.act(e.index, y.torus)
        proj = mat_vec(one_plus, t)
        c = mod1(coords(proj)) if coords else ()
        if best is None or c < best:
            best = c
    return (y.twist, best)


def langlands_parameter(p, group: Optional[TitsGroup] = None) -> LPair:
    group = group or TitsGroup(p.datum, p.frame.inner.delta)
    y, mu = y_of(p, group)
    if group.mul(y, y) != group.one:
        raise InvariantError("y^2 is not the identity")
    return LPair(y, canonical_key(group, y), mu)


def packets(params: Sequence) -> list[tuple[tuple, list[int]]]:
    """Group parameters (with ids) by the conjugacy class of their y."""
    if not params:
        return []
    group = TitsGroup(params[0].datum, params[0].frame.inner.delta)
    out: dict[tuple, list[int]] = {}
    for p in params:
        out.setdefault(langlands_parameter(p, group).key, []).append(p.id)
    return sorted((k, sorted(v)) for k, v in out.items())


def lpair_record(group: TitsGroup, p) -> dict:
    lp = langlands_parameter(p, group)
    check = principal_unipotent_y_check(group, lp.y)
    return {
        "param": p.id,
        "weyl_word": list(group.weyl[lp.y.w].word),
        "torus": [str(x) for x in lp.y.torus],
        "twist": lp.y.twist,
        "mu": list(lp.mu),
        "class": _key_str(lp.key),
        **check,
    }


def _key_str(key) -> str:
    twist, torus = key
    return f"{twist}:" + ",".join(str(x) for x in torus)


# --- brute-force oracle ---------------------------------------------------------------------

REALIZATIONS = {
    "SL2": (2, "det"),
    "SL3": (3, "det"),
    "PGL2": (2, "projective"),
    "PGL3": (3, "projective"),
    "SO5": (5, "orthogonal"),
    "Sp4": (4, "symplectic"),
}


def order2_oracle(realization: str) -> int:
    """Conjugacy classes of y with y^2 = 1 in a small matrix group, via eigenvalue sign vectors."""
    if realization not in REALIZATIONS:
        raise ValueError(f"unsupported realization {realization!r}")
    n, kind = REALIZATIONS[realization]
    classes = set()
    for signs in product((1, -1), repeat=n):
        neg = signs.count(-1)
        if kind == "det" and neg % 2:
            continue
        if kind == "orthogonal" and neg % 2:
            continue
        if kind == "symplectic" and neg % 2:
            continue
        key = tuple(sorted(signs))
        if kind == "projective":
            key = min(key, tuple(sorted(-s for s in signs)))
        classes.add(key)
    return len(classes)
