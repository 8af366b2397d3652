from __future__ import annotations

from fractions import Fraction

import pytest

from principal_unipotent.langlands import (
    TitsGroup,
    dual_datum,
    dual_frame,
    langlands_parameter,
    lpair_record,
    order2_oracle,
    packets,
    principal_unipotent_y_check,
    y_of,
)
from principal_unipotent.linalg import identity, mat_mul
from principal_unipotent.realform import positive_system_flags
from principal_unipotent.rootdata import build_datum

from conftest import CATALOG, GROUPS, report_for

# Brute-force counts of order-2 classes (identity included), frozen from the eigenvalue enumeration.
ORACLE = {"SL2": 2, "SL3": 2, "PGL2": 2, "PGL3": 2, "SO5": 3, "Sp4": 3}
SMALL_TYPES = ("A1", "A1.sc", "A2", "A2.sc", "B2", "C2", "C2.sc", "G2", "A1xA1")


def group_of(name):
    e = CATALOG[name]
    return TitsGroup(e.root_datum, e.inner.delta)


def reduced_words(weyl, w):
    if weyl[w].length == 0:
        return [()]
    out = []
    for i in range(len(weyl.datum.simple_roots)):
        v = weyl.mul(w, weyl.from_word((i,)))
        if weyl[v].length < weyl[w].length:
            out.extend(word + (i,) for word in reduced_words(weyl, v))
    return out


@pytest.mark.parametrize("realization,count", sorted(ORACLE.items()))
def test_order2_oracle(realization, count):
    assert order2_oracle(realization) == count


def test_order2_oracle_unknown():
    with pytest.raises(ValueError):
        order2_oracle("E8")


@pytest.mark.parametrize("t", SMALL_TYPES)
def test_dual_datum_involutions(t):
    d = build_datum(t)
    dd = dual_datum(d, identity(d.rank))
    assert dd.datum.dual().simple_roots == d.simple_roots
    assert dd.datum.dual().simple_coroots == d.simple_coroots
    assert mat_mul(dd.delta_vee, dd.delta_vee) == identity(d.rank)
    assert sorted(tuple(sum(m * x for m, x in zip(row, a)) for row in dd.delta_vee)
                  for a in dd.datum.simple_roots) == sorted(dd.datum.simple_roots)


def test_dual_of_adjoint_a1_is_simply_connected():
    d = build_datum("A1")
    assert dual_datum(d, identity(1)).datum.simple_roots == build_datum("A1.sc").simple_roots


@pytest.mark.parametrize("t", SMALL_TYPES)
def test_tits_sections_word_independent(t):
    d = build_datum(t)
    group = TitsGroup(d, identity(d.rank))
    for e in d.weyl:
        words = reduced_words(d.weyl, e.index)
        assert words
        elements = {group.word_product(word) for word in words}
        assert elements == {group.sigma(e.index)}


@pytest.mark.parametrize("t", SMALL_TYPES)
def test_simple_sigma_has_order_four(t):
    d = build_datum(t)
    group = TitsGroup(d, identity(d.rank))
    for i in range(len(d.simple_roots)):
        s = group.word_product((i,))
        sq = group.mul(s, s)
        assert sq.w == 0
        assert sq.torus == tuple(Fraction(x, 2) % 1 for x in d.simple_roots[i])
        assert group.mul(sq, sq) == group.one


def test_rank_one_sigma_square():
    # In the adjoint dual of SL(2) (torus coordinate = the root) sigma^2 is trivial;
    # in the simply connected dual it is the central element -1.
    g_ad = TitsGroup(build_datum("A1.sc"), identity(1))
    s = g_ad.word_product((0,))
    assert g_ad.mul(s, s) == g_ad.one
    g_sc = TitsGroup(build_datum("A1"), identity(1))
    s = g_sc.word_product((0,))
    assert g_sc.mul(s, s) != g_sc.one


@pytest.mark.parametrize("name", GROUPS)
def test_every_lpair_has_order_two(name):
    group = group_of(name)
    for p in report_for(name).bb_star:
        y, _ = y_of(p, group)
        assert group.mul(y, y) == group.one
        assert lpair_record(group, p)["order2"]


@pytest.mark.parametrize("name", GROUPS)
def test_tits_square_lemma(name):
    """sigma_w sigma_{delta w} = (1 - theta) rho / 2 mod X* for every twisted involution."""
    group = group_of(name)
    d = group.datum
    for e in d.weyl:
        theta = group.theta_of(group.mul(group.sigma(e.index), group.theta0))
        if mat_mul(theta, theta) != identity(d.rank):
            continue
        sq = group.mul(group.mul(group.sigma(e.index), group.theta0), group.mul(group.sigma(e.index), group.theta0))
        assert sq.w == 0 and sq.twist == 0
        rho = d.rho
        want = tuple(Fraction(a - sum(r * x for r, x in zip(row, rho)), 2) % 1
                     for a, row in zip(rho, theta))
        assert sq.torus == want


def test_sl2r_packets():
    params = report_for("sl2r").bb_star
    grouped = packets(params)
    assert len(grouped) == 2
    assert sorted(len(ids) for _, ids in grouped) == [1, 2]
    compact = sorted(p.id for p in params if p.frame.dim_t == 1)
    assert [ids for _, ids in grouped if len(ids) == 2] == [compact]
    assert len(grouped) == order2_oracle(CATALOG["sl2r"].realization)


def test_sl2r_trivial_parameter_is_small():
    group = group_of("sl2r")
    split = next(p for p in report_for("sl2r").bb_star if p.frame.dim_t == 0)
    lp = langlands_parameter(split, group)
    assert lp.y.w == 0 and lp.y.twist == 1
    assert lp.lam == (0,)
    check = principal_unipotent_y_check(group, lp.y)
    assert check["order2"] and check["small_for_Ady"] and check["definition_reading"]
    assert positive_system_flags(dual_frame(group, lp.y), 0).small


def test_sl2r_compact_parameters_use_the_reflection():
    group = group_of("sl2r")
    for p in report_for("sl2r").bb_star:
        if p.frame.dim_t == 1:
            assert langlands_parameter(p, group).y.w == group.weyl.from_word((0,))


@pytest.mark.parametrize("name", [g for g in GROUPS if CATALOG[g].realization])
def test_packet_count_matches_oracle_when_quasisplit(name):
    r = report_for(name)
    if not r.quasisplit:
        assert r.bb_star == []
        return
    assert len(packets(r.bb_star)) == order2_oracle(CATALOG[name].realization)


@pytest.mark.parametrize("name", ["sl2r", "sl3r", "sp4r", "g2split"])
def test_split_groups_have_a_trivial_weyl_parameter(name):
    group = group_of(name)
    params = report_for(name).bb_star
    assert any(langlands_parameter(p, group).y.w == 0 for p in params)


@pytest.mark.parametrize("name", [g for g in GROUPS if g != "su2"])
def test_definition_reading_holds(name):
    group = group_of(name)
    for p in report_for(name).bb_star:
        assert lpair_record(group, p)["definition_reading"]


def test_packets_deterministic():
    params = report_for("sp4r").bb_star
    assert packets(params) == packets(list(reversed(params)))
