"""The nine acceptance criteria; each test prints one PASS/FAIL line."""

from __future__ import annotations

import json
import os
import subprocess
import sys
from collections import Counter

import pytest

from principal_unipotent.catalog import builtin_catalog
from principal_unipotent.kgb import odd_real_simple_roots
from principal_unipotent.ktypes import cell_data, ktype_series, nilcone_character, nilcone_series, peel_graded
from principal_unipotent.langlands import TitsGroup, langlands_parameter, order2_oracle, packets
from principal_unipotent.unipotent import classify, collect_signed, decompose_to_unipotent
from principal_unipotent.verify import grading_transport_suite, monotonicity_suite

CATALOG = builtin_catalog()
# Regression values frozen from the first verified run: (|BB*|, |Z*|).
REGRESSION = {"sl3r": (2, 2), "sp4r": (5, 5), "g2split": (2, 2)}


@pytest.fixture
def report_line(capsys):
    def emit(number, ok, detail=""):
        with capsys.disabled():
            print(f"\nacceptance {number}: {'PASS' if ok else 'FAIL'}  {detail}".rstrip())
        assert ok, detail
    return emit


def test_1_sl2r_classification(report_line):
    r = classify(CATALOG["sl2r"])
    counts = (len(r.bb_star), len(r.z_star))
    bijective = r.checks["z_map_bijective"]
    odd = next(v for v in r.graph.vertices if v.frame.dim_t == 0 and odd_real_simple_roots(v))
    terms = collect_signed(decompose_to_unipotent(odd))
    compact = {v.key for v in r.graph.vertices if v.frame.dim_t == 1}
    decomposition = sorted(terms.values()) == [-1, -1] and set(terms) == compact
    report_line(1, counts == (3, 3) and bijective and decomposition,
                f"|BB*|,|Z*| = {counts}; bijective = {bijective}; odd split -> {sorted(terms.values())}")


def test_2_compact_negative_control(report_line):
    r = classify(CATALOG["su2"])
    report_line(2, r.bb_star == [] and r.quasisplit is False,
                f"|BB*| = {len(r.bb_star)}; quasi-split = {r.quasisplit}")


@pytest.mark.parametrize("name", ["sl2r", "sl3r"])
def test_3_ktype_oracle(report_line, name):
    entry = CATALOG[name]
    r = classify(entry)
    n = len(r.graph.vertices[0].datum.roots)
    z = next(z for z in r.z_star if len(z.levi_roots) == n)
    D = 10
    series = ktype_series(z, D, entry.degrees_for)
    cell = cell_data(z, entry.degrees_for)
    # Second route: weights of the nilpotent cone peeled into highest weights.
    assert nilcone_character(cell.levi, D).terms
    peeled = peel_graded(nilcone_series(cell.levi, D), cell.compact.system, z.datum)
    oracle = Counter()
    for (_, mu), m in peeled.items():
        oracle[mu] += m
    mismatches = [mu for mu in sorted(series.certified) if series[mu] != oracle.get(mu, 0)]
    report_line(3, bool(series.certified) and not mismatches,
                f"{name}: {len(series.certified)} certified K-types at D = {D}; mismatches {mismatches}")


def test_4_limits_of_discrete_series(report_line):
    r = classify(CATALOG["sl2r"])
    cells = [z for z in r.z_star if not z.levi_roots]
    bad, signs, ranges = [], set(), []
    for z in cells:
        s = ktype_series(z, 10)
        sign = 1 if any(mu[0] > 0 and s[mu] for mu in s.certified) else -1
        signs.add(sign)
        top = max(abs(mu[0]) for mu in s.certified if s[mu])
        ranges.append(sign * top)
        for w in range(-top, top + 1):
            want = 1 if (w % 2 and w * sign > 0) else 0
            if s[(w,)] != want or not s.is_certified((w,)):
                bad.append((sign, w, s[(w,)]))
    report_line(4, len(cells) == 2 and signs == {1, -1} and not bad,
                f"certified odd ranges {sorted(ranges)}; deviations {bad[:5]}")


def test_5_langlands_counts(report_line):
    entry = CATALOG["sl2r"]
    r = classify(entry)
    group = TitsGroup(entry.root_datum, entry.inner.delta)
    pairs = [langlands_parameter(p, group) for p in r.bb_star]
    order2 = all(group.mul(lp.y, lp.y) == group.one for lp in pairs)
    sizes = sorted(len(ids) for _, ids in packets(r.bb_star))
    distinct = len({lp.key for lp in pairs})
    oracle = order2_oracle(entry.realization)
    report_line(5, distinct == 2 and sizes == [1, 2] and order2 and distinct == oracle,
                f"{distinct} LPairs, packet sizes {sizes}, order2 = {order2}, oracle = {oracle}")


def test_6_grading_transport(report_line):
    table, lemma = grading_transport_suite()
    ok = table.ok and lemma.ok and table.checked > 0 and lemma.checked > 0
    report_line(6, ok, f"table {table.checked} checked, {len(table.failures)} failures; "
                       f"lemma {lemma.checked} checked, {len(lemma.failures)} failures")


def test_7_monotonicity(report_line):
    checked, failures = 0, []
    for name, entry in sorted(CATALOG.items()):
        res = monotonicity_suite(classify(entry).graph, name)
        checked += res.checked
        failures += res.failures
    report_line(7, checked > 0 and not failures, f"{checked} edges checked, failures {failures[:3]}")


_DUMP = (
    "import json\n"
    "from principal_unipotent.catalog import builtin_catalog\n"
    "from principal_unipotent.unipotent import classify\n"
    "for name, e in sorted(builtin_catalog().items()):\n"
    "    print(json.dumps(classify(e).to_json(), indent=2, sort_keys=True))\n"
)


def _dump(seed: str) -> str:
    env = dict(os.environ, PYTHONHASHSEED=seed)
    return subprocess.run([sys.executable, "-c", _DUMP], capture_output=True, text=True, check=True, env=env).stdout


def test_8_determinism(report_line):
    first, second = _dump("1"), _dump("2")
    in_process = [json.dumps(classify(e).to_json(), indent=2, sort_keys=True) for _, e in sorted(CATALOG.items())]
    same = first == second and first == "\n".join(in_process) + "\n"
    report_line(8, same and bool(first), f"{len(CATALOG)} entries, {len(first)} bytes per run")


def test_9_regression_counts(report_line):
    found, ok = {}, True
    for name, want in sorted(REGRESSION.items()):
        r = classify(CATALOG[name])
        found[name] = (len(r.bb_star), len(r.z_star))
        ok = ok and found[name] == want and r.checks["z_map_surjective"] and r.ok
    report_line(9, ok, f"{found}")
