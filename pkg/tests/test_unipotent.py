from __future__ import annotations

import json

import pytest

from principal_unipotent.kgb import cayley_real, odd_real_simple_roots
from principal_unipotent.realform import COMPACT, IMAGINARY, positive_system_flags
from principal_unipotent.unipotent import (
    ZParameter,
    collect_signed,
    decompose_to_unipotent,
    is_nonzero,
    is_unipotent_bb,
    is_unipotent_z,
    zuckerman_of,
)

from conftest import GROUPS, report_for

# Frozen from the first verified classification: (|BB*|, |Z*|).
COUNTS = {"sl2r": (3, 3), "su2": (0, 0), "sl3r": (2, 2), "su21": (1, 1), "sp4r": (5, 5), "g2split": (2, 2)}


def sl2r_vertices():
    g = report_for("sl2r").graph
    split = [v for v in g.vertices if v.frame.dim_t == 0]
    even = next(v for v in split if not odd_real_simple_roots(v))
    odd = next(v for v in split if odd_real_simple_roots(v))
    compact = [v for v in g.vertices if v.frame.dim_t == 1]
    return even, odd, compact


def test_sl2r_unipotence():
    even, odd, compact = sl2r_vertices()
    assert is_unipotent_bb(even)
    assert not is_unipotent_bb(odd)
    assert all(is_unipotent_bb(c) for c in compact)
    assert is_nonzero(odd)


def test_sl2r_decomposition():
    even, odd, compact = sl2r_vertices()
    terms = decompose_to_unipotent(odd)
    assert sorted((q.key, s) for q, s in terms) == sorted((c.key, -1) for c in compact)
    assert decompose_to_unipotent(even) == [(even, 1)]


def test_sl2r_zuckerman():
    even, _, compact = sl2r_vertices()
    z = zuckerman_of(even)
    assert len(z.levi_roots) == 2 and z.nilradical_roots == ()
    assert z.chi_sharp_differential == (0,)
    for c in compact:
        z = zuckerman_of(c)
        assert z.levi_roots == () and len(z.nilradical_roots) == 1
        assert z.chi_sharp_differential == tuple(-x for x in z.rho_u)
        assert is_unipotent_z(z)
    assert len({zuckerman_of(p).key for p in (even, *compact)}) == 3


def test_sl3r_type2_decomposition():
    g = report_for("sl3r").graph
    p = next(v for v in g.vertices if len(odd_real_simple_roots(v)) == 1)
    a = odd_real_simple_roots(p)[0]
    plus, minus = cayley_real(p, a)
    assert plus.key == minus.key
    # The Cayley step alone carries sign -1; the output is not type Z, so one
    # transfer step (another -1) follows before a unipotent parameter is reached.
    assert not plus.flags.typeZ
    terms = decompose_to_unipotent(p)
    assert len(terms) == 1
    q, sign = terms[0]
    assert is_unipotent_bb(q)
    assert sign == 1
    (inner, inner_sign), = decompose_to_unipotent(plus)
    assert inner.key == q.key and inner_sign == -1


@pytest.mark.parametrize("name", GROUPS)
def test_decomposition_outputs_are_unipotent(name):
    r = report_for(name)
    star = {p.key for p in r.bb_star}
    for p in r.graph.vertices:
        if not is_nonzero(p):
            assert not is_unipotent_bb(p)
            continue
        terms = decompose_to_unipotent(p)
        assert terms and all(is_unipotent_bb(q) and q.key in star for q, _ in terms)
        assert all(s in (1, -1) for _, s in terms)
        assert collect_signed(terms)
        if is_unipotent_bb(p):
            assert [(q.key, s) for q, s in terms] == [(p.key, 1)]


def test_su21_compact_imaginary_simple_root_is_zero():
    r = report_for("su21")
    zeros = [p for p in r.graph.vertices if not is_nonzero(p)]
    assert zeros
    hit = False
    for p in r.graph.vertices:
        imag_simple = [a for a in p.simple_roots if p.frame.classify_root(a) == IMAGINARY]
        if p.flags.typeL and any(p.frame.eps(a) == COMPACT for a in imag_simple):
            assert not is_nonzero(p)
            hit = True
    assert hit


def test_equal_rank_borel_with_compact_simple_root_is_not_unipotent():
    frame = max(report_for("su21").graph.frames, key=lambda f: f.dim_t)
    checked = 0
    for e in frame.datum.weyl:
        if positive_system_flags(frame, e.index).large:
            continue
        u = tuple(sorted(frame.positive_system(e.index)))
        z = ZParameter(frame, (), u, (0,) * len(frame.minus_basis))
        assert not is_unipotent_z(z)
        checked += 1
    assert checked


@pytest.mark.parametrize("name", GROUPS)
def test_classification(name):
    r = report_for(name)
    assert (len(r.bb_star), len(r.z_star)) == COUNTS[name]
    assert r.ok, r.checks
    assert set(r.z_map.values()) == {z.id for z in r.z_star}
    for p in r.bb_star:
        z = zuckerman_of(p)
        assert is_unipotent_z(z)
        assert {frozenset(z.nilradical_roots)} == {frozenset(r.z_star[r.z_map[p.id]].nilradical_roots)}
    assert (len(r.bb_star) == 0) == (not r.quasisplit)


def test_report_json_roundtrip():
    doc = report_for("sl2r").to_json()
    assert json.loads(json.dumps(doc)) == doc
    assert doc["counts"]["bb_star"] == 3


def test_zuckerman_rejects_non_unipotent():
    _, odd, _ = sl2r_vertices()
    with pytest.raises(ValueError):
        zuckerman_of(odd)
