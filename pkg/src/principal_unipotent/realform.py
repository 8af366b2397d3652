"""Real-form data on a root datum: twisted involutions, gradings and characters of T."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

from .linalg import (
    Coordinates,
    InvariantError,
    Mat,
    Vec,
    dot,
    identity,
    kernel_basis,
    mat_add,
    mat_mul,
    mat_sub,
    mat_vec,
    solve_mod2,
    transpose,
    vneg,
)
from .rootdata import BasedRootDatum

REAL, IMAGINARY, COMPLEX = "real", "imaginary", "complex"
COMPACT, NONCOMPACT = 0, 1
TYPE1, TYPE2 = "type1", "type2"


@dataclass(frozen=True)
class InnerClass:
    """A datum with a lattice involution delta of X* permuting the simple roots."""

    datum: BasedRootDatum
    delta: Mat

    def __post_init__(self):
        n = self.datum.rank
        if mat_mul(self.delta, self.delta) != identity(n):
            raise ValueError("delta is not an involution")
        images = {mat_vec(self.delta, a) for a in self.datum.simple_roots}
        if images != set(self.datum.simple_roots):
            raise ValueError("delta does not permute the simple roots")

    @property
    def distinguished_flag(self) -> bool:
        return self.delta == identity(self.datum.rank)

    @cached_property
    def delta_permutation(self) -> tuple[int, ...]:
        roots = self.datum.simple_roots
        return tuple(roots.index(mat_vec(self.delta, a)) for a in roots)

    def twisted_involution_word(self, theta: Mat) -> tuple[int, ...]:
        """The word of w with theta = w delta."""
        w = mat_mul(theta, self.delta)
        return self.datum.weyl[self.datum.weyl.index(w)].word

    def theta_from_word(self, word: Sequence[int]) -> Mat:
        w = self.datum.weyl[self.datum.weyl.from_word(word)].matrix
        return mat_mul(w, self.delta)


def minus_lattice(theta: Mat) -> list[Vec]:
    """Z-basis of X_*^{-theta}, the kernel of 1 + theta on X_* (theta acts there by its transpose)."""
    n = len(theta)
    return kernel_basis(mat_add(identity(n), transpose(theta)))


def plus_lattice(theta: Mat) -> list[Vec]:
    n = len(theta)
    return kernel_basis(mat_sub(transpose(theta), identity(n)))


def positive_imaginary_of(datum: BasedRootDatum, theta: Mat) -> tuple[Vec, ...]:
    return tuple(r for r in datum.positive_roots if mat_vec(theta, r) == r)


@dataclass(frozen=True)
class CartanFrame:
    """A twisted involution theta of X* with a grading on its imaginary roots.

    `grading` lists one bit per positive imaginary root (in lexicographic
    root order): 0 compact, 1 noncompact.
    """

    inner: InnerClass
    theta: Mat
    grading: tuple[int, ...]

    def __post_init__(self):
        n = self.datum.rank
        if mat_mul(self.theta, self.theta) != identity(n):
            raise ValueError("theta is not an involution")
        if not self.datum.weyl.contains(mat_mul(self.theta, self.inner.delta)):
            raise ValueError("theta is not of the form w delta")
        if len(self.grading) != len(self.positive_imaginary):
            raise ValueError(
                f"grading has {len(self.grading)} bits, frame has {len(self.positive_imaginary)} positive imaginary roots"
            )
        if any(b not in (0, 1) for b in self.grading):
            raise ValueError("grading bits must be 0 or 1")
        self._check_grading()

    @property
    def datum(self) -> BasedRootDatum:
        return self.inner.datum

    @property
    def key(self) -> tuple:
        return (self.theta, self.grading)

    def apply_theta(self, v: Sequence) -> Vec:
        return mat_vec(self.theta, v)

    def apply_theta_co(self, u: Sequence) -> Vec:
        return mat_vec(transpose(self.theta), u)

    @cached_property
    def _classes(self) -> dict[Vec, str]:
        out = {}
        for r in self.datum.roots:
            t = self.apply_theta(r)
            if t == r:
                out[r] = IMAGINARY
            elif t == vneg(r):
                out[r] = REAL
            else:
                out[r] = COMPLEX
        return out

    def classify_root(self, root: Sequence) -> str:
        try:
            return self._classes[tuple(root)]
        except KeyError:
            raise ValueError(f"{tuple(root)} is not a root") from None

    @cached_property
    def real_roots(self) -> tuple[Vec, ...]:
        return tuple(r for r in self.datum.roots if self._classes[r] == REAL)

    @cached_property
    def imaginary_roots(self) -> tuple[Vec, ...]:
        return tuple(r for r in self.datum.roots if self._classes[r] == IMAGINARY)

    @cached_property
    def complex_roots(self) -> tuple[Vec, ...]:
        return tuple(r for r in self.datum.roots if self._classes[r] == COMPLEX)

    @cached_property
    def positive_imaginary(self) -> tuple[Vec, ...]:
        return tuple(r for r in self.imaginary_roots if self.datum.is_positive(r))

    @cached_property
    def _grading_map(self) -> dict[Vec, int]:
        out = {}
        for r, b in zip(self.positive_imaginary, self.grading):
            out[r] = b
            out[vneg(r)] = b
        return out

    def eps(self, root: Sequence) -> int:
        """Grading of an imaginary root; other roots have no grading."""
        try:
            return self._grading_map[tuple(root)]
        except KeyError:
            raise ValueError(f"{tuple(root)} is not imaginary in this frame") from None

    def is_compact(self, root: Sequence) -> bool:
        return self.eps(root) == COMPACT

    @cached_property
    def imaginary_simple(self) -> tuple[Vec, ...]:
        pos = set(self.positive_imaginary)
        return tuple(
            r for r in self.positive_imaginary if not any(tuple(a - b for a, b in zip(r, s)) in pos for s in pos)
        )

    def _check_grading(self) -> None:
        simple = self.imaginary_simple
        coords = Coordinates(simple)
        for r in self.positive_imaginary:
            c = coords.integral(r)
            if sum(x * self.eps(s) for x, s in zip(c, simple)) % 2 != self.eps(r):
                raise ValueError("grading is not additive on the imaginary root lattice")

    @cached_property
    def minus_basis(self) -> tuple[Vec, ...]:
        return tuple(minus_lattice(self.theta))

    @cached_property
    def minus_coords(self) -> Coordinates:
        return Coordinates(self.minus_basis)

    @cached_property
    def dim_t(self) -> int:
        return len(plus_lattice(self.theta))

    @cached_property
    def dim_a(self) -> int:
        return len(self.minus_basis)

    def real_root_type(self, alpha: Sequence) -> str:
        """type2 iff alpha is odd on some element of X_*^{-theta}."""
        if self.classify_root(alpha) != REAL:
            raise ValueError(f"{tuple(alpha)} is not real")
        return TYPE2 if any(dot(alpha, b) % 2 for b in self.minus_basis) else TYPE1

    def imaginary_root_type(self, beta: Sequence) -> str:
        """Noncompact imaginary beta is type II iff s_beta lies in the real Weyl group."""
        if self.eps(beta) != NONCOMPACT:
            raise ValueError("imaginary root type is defined for noncompact roots")
        flipped = mat_mul(self.datum.reflection_matrix(beta), self.theta)
        return "II" if any(dot(beta, b) % 2 for b in minus_lattice(flipped)) else "I"

    @cached_property
    def real_weyl_group(self) -> tuple[int, ...]:
        """W(G,H) as indices into the Weyl group, generated by the standard four families."""
        weyl = self.datum.weyl
        gens = []
        for r in self.real_roots:
            if self.datum.is_positive(r):
                gens.append(weyl.index(self.datum.reflection_matrix(r)))
        for r in self.positive_imaginary:
            if self.eps(r) == COMPACT or self.imaginary_root_type(r) == "II":
                gens.append(weyl.index(self.datum.reflection_matrix(r)))
        ri = self.real_roots + self.imaginary_roots
        for g in self.complex_roots:
            if not self.datum.is_positive(g):
                continue
            if any(dot(g, self.datum.coroot(b)) != 0 for b in ri):
                continue
            tg = self.apply_theta(g)
            if dot(g, self.datum.coroot(tg)) != 0:
                raise InvariantError("complex root not orthogonal to its theta image")
            m = mat_mul(self.datum.reflection_matrix(g), self.datum.reflection_matrix(tg))
            gens.append(weyl.index(m))
        group = {0}
        frontier = [0]
        while frontier:
            nxt = []
            for a in frontier:
                for g in gens:
                    b = weyl.mul(g, a)
                    if b not in group:
                        group.add(b)
                        nxt.append(b)
            frontier = nxt
        for a in group:
            m = weyl[a].matrix
            if mat_mul(m, self.theta) != mat_mul(self.theta, m):
                raise InvariantError("real Weyl group element does not commute with theta")
            for r in self.positive_imaginary:
                if self.eps(mat_vec(m, r)) != self.eps(r):
                    raise InvariantError("real Weyl group element does not preserve the grading")
        return tuple(sorted(group))

    def conjugate(self, w: int) -> "CartanFrame":
        """The frame (w theta w^-1, eps o w^-1)."""
        weyl = self.datum.weyl
        m = weyl[w].matrix
        minv = weyl[weyl.inv(w)].matrix
        theta = mat_mul(mat_mul(m, self.theta), minv)
        bits = tuple(self.eps(mat_vec(minv, r)) for r in positive_imaginary_of(self.datum, theta))
        return CartanFrame(self.inner, theta, bits)

    @cached_property
    def canonical(self) -> tuple["CartanFrame", int]:
        """Lexicographically least conjugate and the least Weyl index reaching it."""
        best = None
        for e in self.datum.weyl:
            f = self.conjugate(e.index)
            if best is None or f.key < best[0].key:
                best = (f, e.index)
        return best

    def in_positive_system(self, w: int, root: Sequence) -> bool:
        """Whether root lies in w(Delta^+)."""
        weyl = self.datum.weyl
        return self.datum.is_positive(weyl.act(weyl.inv(w), root))

    def simple_roots_of(self, w: int) -> tuple[Vec, ...]:
        weyl = self.datum.weyl
        return tuple(weyl.act(w, a) for a in self.datum.simple_roots)

    def positive_system(self, w: int) -> tuple[Vec, ...]:
        return tuple(r for r in self.datum.roots if self.in_positive_system(w, r))


@dataclass(frozen=True)
class Flags:
    large: bool
    small: bool
    typeZ: bool
    typeL: bool


def positive_system_flags(frame: CartanFrame, w: int) -> Flags:
    """large/small from imaginary simple roots, typeZ/typeL from complex simple roots."""
    large = small = type_z = type_l = True
    for a in frame.simple_roots_of(w):
        kind = frame.classify_root(a)
        if kind == IMAGINARY:
            if frame.eps(a) == COMPACT:
                large = False
            else:
                small = False
        elif kind == COMPLEX:
            if frame.in_positive_system(w, frame.apply_theta(a)):
                type_l = False
            else:
                type_z = False
    return Flags(large, small, type_z, type_l)


@dataclass(frozen=True)
class Parabolics:
    lz: tuple[Vec, ...]
    uz: tuple[Vec, ...]
    ll: tuple[Vec, ...]
    ul: tuple[Vec, ...]
    qz_theta_stable: bool
    ql_sigma_stable: bool


def standard_parabolics(frame: CartanFrame, w: int) -> Parabolics:
    """q^Z from the real roots and q^L from the imaginary roots, with stability recomputed on roots."""
    pos = frame.positive_system(w)
    lz = frame.real_roots
    uz = tuple(r for r in pos if r not in set(lz))
    ll = frame.imaginary_roots
    ul = tuple(r for r in pos if r not in set(ll))
    uz_set, ul_set = set(uz), set(ul)
    theta_stable = {frame.apply_theta(r) for r in uz} == uz_set
    sigma_stable = {vneg(frame.apply_theta(r)) for r in ul} == ul_set
    return Parabolics(lz, uz, ll, ul, theta_stable, sigma_stable)


def d_alpha_table(eps_beta: int, sum_or_difference_is_root: bool) -> int:
    """The four-case grading transport rule."""
    if not sum_or_difference_is_root:
        return eps_beta
    return 1 - eps_beta


def grading_transport_d(frame: CartanFrame, alpha: Sequence, beta: Sequence) -> int:
    """Grading of beta (imaginary, orthogonal to alpha) after the inverse Cayley transform through alpha."""
    if frame.eps(alpha) != NONCOMPACT:
        raise ValueError("alpha must be noncompact imaginary")
    eps_beta = frame.eps(beta)
    if dot(beta, frame.datum.coroot(alpha)) != 0:
        raise ValueError("beta is not orthogonal to alpha")
    d = frame.datum
    hit = d.is_root(tuple(a + b for a, b in zip(alpha, beta))) or d.is_root(
        tuple(a - b for a, b in zip(alpha, beta))
    )
    return d_alpha_table(eps_beta, hit)


def is_quasisplit(inner: InnerClass, seed_frame: CartanFrame) -> bool:
    """Some positive system of the fundamental frame is large."""
    return any(positive_system_flags(seed_frame, e.index).large for e in inner.datum.weyl)


def has_noncompact_imaginary_simple_system(frame: CartanFrame) -> bool:
    """Some positive system whose imaginary subsystem has only noncompact simple roots."""
    weyl = frame.datum.weyl
    for e in weyl:
        pos_imag = [r for r in frame.imaginary_roots if frame.in_positive_system(e.index, r)]
        pos = set(pos_imag)
        simple = [r for r in pos_imag if not any(tuple(a - b for a, b in zip(r, s)) in pos for s in pos)]
        if all(frame.eps(r) == NONCOMPACT for r in simple):
            return True
    return False


def fundamental_frame(inner: InnerClass, frames: Sequence[CartanFrame]) -> CartanFrame:
    """The frame of largest compact dimension; ties broken by key."""
    return min(frames, key=lambda f: (-f.dim_t, f.key))


@dataclass(frozen=True)
class CharacterData:
    """A character of T: bits on the fixed basis of X_*^{-theta} (value chi(nu(-1)) = (-1)^bit)."""

    frame: CartanFrame
    bits: tuple[int, ...]

    def value(self, nu: Sequence) -> int:
        """Parity of chi on nu(-1) for nu in X_*^{-theta}."""
        c = self.frame.minus_coords.integral(nu)
        return sum(x * b for x, b in zip(c, self.bits)) % 2

    def real_grading(self, root: Sequence) -> int:
        """0 even, 1 odd: chi(m_root) with m_root = root^vee(-1)."""
        if self.frame.classify_root(root) != REAL:
            raise ValueError(f"{tuple(root)} is not real")
        return self.value(self.frame.datum.coroot(root))

    @cached_property
    def real_grading_table(self) -> dict[Vec, int]:
        return {r: self.real_grading(r) for r in self.frame.real_roots}

    @cached_property
    def extra_generators(self) -> tuple[Vec, ...]:
        """Basis vectors of X_*^{-theta} needed beyond the real coroots and (1 - theta)X_*."""
        frame = self.frame
        n = frame.datum.rank
        k = len(frame.minus_basis)
        span = [frame.minus_coords.integral(frame.datum.coroot(r)) for r in frame.real_roots]
        for j in range(n):
            e = tuple(1 if i == j else 0 for i in range(n))
            span.append(frame.minus_coords.integral(tuple(a - b for a, b in zip(e, frame.apply_theta_co(e)))))
        extra = []
        for b in range(k):
            unit = tuple(1 if i == b else 0 for i in range(k))
            if _f2_rank(span + [unit]) > _f2_rank(span):
                span.append(unit)
                extra.append(frame.minus_basis[b])
        return tuple(extra)

    @property
    def extra_component_values(self) -> tuple[int, ...]:
        return tuple(self.value(nu) for nu in self.extra_generators)

    def check_additivity(self) -> None:
        """chi(m_gamma) = chi(m_alpha) chi(m_beta) whenever gamma^vee = alpha^vee + beta^vee."""
        d = self.frame.datum
        table = self.real_grading_table
        coroot_of = {d.coroot(r): r for r in self.frame.real_roots}
        for a in self.frame.real_roots:
            if table[a] != table[vneg(a)]:
                raise InvariantError("real grading differs on a root and its negative")
            for b in self.frame.real_roots:
                s = tuple(x + y for x, y in zip(d.coroot(a), d.coroot(b)))
                if s in coroot_of and table[coroot_of[s]] != (table[a] + table[b]) % 2:
                    raise InvariantError("real grading is not additive")


def _f2_rank(rows: Sequence[Sequence[int]]) -> int:
    rows = [[x % 2 for x in r] for r in rows]
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                rows[i] = [x ^ y for x, y in zip(rows[i], rows[r])]
        r += 1
    return r


def character_constraints(frame: CartanFrame, rho_vec: Sequence) -> Optional[tuple[list, list]]:
    """F_2 linear system on the bits of a character with differential -rho restricted to t.

    Returns None when -rho does not integrate on the identity component of T.
    """
    n = frame.datum.rank
    for u in plus_lattice(frame.theta):
        if not _is_integer(dot(rho_vec, u)):
            return None
    rows, rhs = [], []
    for j in range(n):
        e = tuple(1 if i == j else 0 for i in range(n))
        te = frame.apply_theta_co(e)
        nu = tuple(a - b for a, b in zip(e, te))
        rows.append(list(frame.minus_coords.integral(nu)))
        val = -dot(rho_vec, tuple(a + b for a, b in zip(e, te)))
        if not _is_integer(val):
            return None
        rhs.append(int(val) % 2)
    return rows, rhs


def characters(frame: CartanFrame, rho_vec: Sequence) -> list[tuple[int, ...]]:
    """All bit vectors of characters of T with differential -rho on t."""
    system = character_constraints(frame, rho_vec)
    if system is None:
        return []
    rows, rhs = system
    return solve_mod2(rows, rhs, len(frame.minus_basis))


def character_is_valid(frame: CartanFrame, rho_vec: Sequence, bits: Sequence[int]) -> bool:
    system = character_constraints(frame, rho_vec)
    if system is None:
        return False
    rows, rhs = system
    return all(sum(a * b for a, b in zip(r, bits)) % 2 == v for r, v in zip(rows, rhs))


def _is_integer(x) -> bool:
    return getattr(x, "denominator", 1) == 1


def frame_from_spec(inner: InnerClass, theta_word: Sequence[int], grading: Sequence[int]) -> CartanFrame:
    return CartanFrame(inner, inner.theta_from_word(theta_word), tuple(grading))
