from __future__ import annotations

from collections import Counter
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from principal_unipotent.ktypes import (
    associated_variety_report,
    cell_data,
    compact_weyl_matches_real_weyl,
    freudenthal,
    ktype_series,
    levi_data,
    nilcone_character,
    nilcone_series,
    peel,
    peel_graded,
    sqrt_sum_less,
    sym_character,
)
from principal_unipotent.unipotent import ZParameter

from conftest import CATALOG, GROUPS, report_for


def cell_with_levi(name, full):
    r = report_for(name)
    n = len(r.graph.vertices[0].datum.roots)
    return next(z for z in r.z_star if (len(z.levi_roots) == n) == full)


def test_sym_character_examples():
    s = sym_character([(3,)], 2)
    assert s.terms == {(0,): 1, (3,): 1, (6,): 1}
    assert sym_character([], 4, 2).terms == {(0, 0): 1}
    s = sym_character([(2,), (-2,)], 3)
    for d in range(4):
        assert s.degree(d) == {(w,): 1 for w in range(-2 * d, 2 * d + 1, 4)}


@settings(max_examples=40, deadline=None)
@given(st.lists(st.sampled_from([(1, 0), (0, 1), (1, 1), (-1, 2)]), min_size=0, max_size=4), st.integers(0, 5))
def test_sym_character_stars_and_bars(weights, D):
    s = sym_character(weights, D, 2)
    for d in range(D + 1):
        assert sum(s.degree(d).values()) == comb(len(weights) + d - 1, d) if weights else d == 0 or not s.degree(d)


def test_nilcone_split_a1():
    z = cell_with_levi("sl2r", True)
    levi = levi_data(z.frame, z.levi_roots)
    ch = nilcone_character(levi, 6)
    for d in range(7):
        assert ch.degree(d) == ({(0,): 1} if d == 0 else {(2 * d,): 1, (-2 * d,): 1})
    assert ch[(0,)] == 1
    assert all(m == 1 for m in ch.terms.values())
    assert all(w[0] % 2 == 0 for w in ch.terms)


def test_nilcone_of_torus_is_trivial():
    z = cell_with_levi("sl2r", False)
    levi = levi_data(z.frame, z.levi_roots)
    assert nilcone_series(levi, 5) == {(0, (0,)): 1}


def test_sl2r_spherical_cell():
    z = cell_with_levi("sl2r", True)
    s = ktype_series(z, 8)
    cert = s.certified_terms()
    assert cert and all(mu[0] % 2 == 0 and m == 1 for mu, m in cert.items())
    assert all(s[(w,)] == 0 for w in range(-15, 16, 2) if (w,) in s.certified)


def test_sl2r_limits_of_discrete_series():
    cells = [z for z in report_for("sl2r").z_star if not z.levi_roots]
    signs = set()
    for z in cells:
        s = ktype_series(z, 10)
        cert = s.certified_terms()
        sign = 1 if next(iter(cert))[0] > 0 else -1
        signs.add(sign)
        top = max(abs(mu[0]) for mu in s.certified)
        for w in range(-top, top + 1):
            if (w,) in s.certified:
                want = 1 if (w * sign > 0 and w % 2) else 0
                assert s[(w,)] == want
        assert {(sign * k,) for k in range(1, 2 * 9, 2)} <= set(cert)
    assert signs == {1, -1}


@pytest.mark.parametrize("name", ["sl2r", "sl3r"])
def test_full_cell_matches_peeled_nilcone(name):
    z = cell_with_levi(name, True)
    D = 8
    s = ktype_series(z, D)
    cell = cell_data(z)
    peeled = peel_graded(nilcone_series(cell.levi, D), cell.compact.system, z.datum)
    total = Counter()
    for (_, mu), m in peeled.items():
        total[mu] += m
    assert s.certified
    for mu in s.certified:
        assert s[mu] == total.get(mu, 0)


@pytest.mark.parametrize("name", [g for g in GROUPS if g != "su2"])
def test_certified_multiplicities_nonnegative_and_stable(name):
    entry = CATALOG[name]
    for z in report_for(name).z_star:
        a = ktype_series(z, 4, entry.degrees_for)
        b = ktype_series(z, 6, entry.degrees_for)
        assert all(m >= 0 for m in a.certified_terms().values())
        for mu in a.certified:
            assert a[mu] == b[mu]


@pytest.mark.parametrize("name", ["sp4r", "g2split"])
def test_certificate_survives_deep_recomputation(name):
    # Generator weights cancel in B2 and G2, so small K-types keep recurring in high degree;
    # this is where a norm bound alone would certify too early.
    entry = CATALOG[name]
    for z in report_for(name).z_star:
        deep = ktype_series(z, 10, entry.degrees_for)
        for D in range(2, 9):
            try:
                s = ktype_series(z, D, entry.degrees_for)
            except ValueError:
                continue
            for mu in s.certified:
                assert s[mu] == deep[mu], (z.id, D, mu)


@pytest.mark.parametrize("name", [g for g in GROUPS if g != "su2"])
def test_compact_weyl_group(name):
    for z in report_for(name).z_star:
        cell = cell_data(z, CATALOG[name].degrees_for)
        assert compact_weyl_matches_real_weyl(cell.levi.frame, cell.compact)


def test_associated_variety():
    for z in report_for("sl2r").z_star:
        assert associated_variety_report(z) == {"is_full_nilcone": True, "dimension": 1}
    z = cell_with_levi("sl3r", True)
    assert associated_variety_report(z) == {"is_full_nilcone": True, "dimension": 3}
    frame = max(report_for("su21").graph.frames, key=lambda f: f.dim_t)
    from principal_unipotent.realform import positive_system_flags

    e = next(e for e in frame.datum.weyl if not positive_system_flags(frame, e.index).large)
    z = ZParameter(frame, (), tuple(sorted(frame.positive_system(e.index))), (0,) * len(frame.minus_basis))
    assert associated_variety_report(z) == {"is_full_nilcone": False}


def test_cutoff_errors():
    z = cell_with_levi("sl2r", True)
    with pytest.raises(ValueError):
        ktype_series(z, 0)


def test_freudenthal_and_peel_a2():
    from principal_unipotent.rootdata import build_datum, root_system_of

    d = build_datum("A2")
    rs = root_system_of(d)
    adjoint = freudenthal(rs, (1, 1), d)
    assert adjoint[(0, 0)] == 2 and sum(adjoint.values()) == 8
    assert peel(adjoint, rs, d) == {(1, 1): 1}


def test_sqrt_sum_less_exact():
    assert sqrt_sum_less(1, 1, 9)  # 1 + 1 < 3
    assert not sqrt_sum_less(4, 1, 9)  # 2 + 1 = 3
    assert sqrt_sum_less(2, 2, 9)  # 2 sqrt 2 < 3
    assert sqrt_sum_less(2, 3, 10)  # sqrt 2 + sqrt 3 < sqrt 10
    assert not sqrt_sum_less(2, 3, Fraction(98, 10))
