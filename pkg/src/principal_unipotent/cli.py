"""Command-line surface: catalog, kgb, classify, ktypes, langlands, verify."""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from .catalog import CatalogError, load_catalog
from .kgb import DEFAULT_MAX_GRAPH_SIZE, graph_record
from .linalg import InvariantError
from .unipotent import classify, collect_signed, decompose_to_unipotent, is_nonzero

EXIT_OK, EXIT_INVARIANT, EXIT_USAGE = 0, 1, 2
COMMANDS = ("catalog", "kgb", "classify", "ktypes", "langlands", "verify")


class UsageError(Exception):
    pass


def _vec(v) -> str:
    return "(" + ",".join(str(x) for x in v) + ")"


def format_table(headers: Sequence[str], rows: Sequence[Sequence]) -> str:
    cells = [[str(h) for h in headers]] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


# --- commands: each returns (json document, table text, exit status) -----------------------


def cmd_catalog(entries, args):
    docs = [e.to_json() for e in entries.values()]
    rows = [(e.name, e.datum if isinstance(e.datum, str) else "explicit", e.root_datum.rank,
             e.realization or "-", e.description) for e in entries.values()]
    return {"groups": docs}, format_table(["name", "datum", "rank", "realization", "description"], rows), EXIT_OK


def cmd_kgb(entry, args):
    from .kgb import d_invariant
    from .unipotent import build_graph

    graph = build_graph(entry, args.max_graph_size)
    doc = {"group": entry.name, **graph_record(graph)}
    rows = [(v.id, list(v.frame.inner.twisted_involution_word(v.frame.theta)), list(v.datum.weyl[v.pos].word),
             "".join(map(str, v.bits)) or "-", d_invariant(v)) for v in graph.vertices]
    text = format_table(["id", "theta_word", "pos_word", "bits", "d"], rows)
    edges = format_table(["source", "kind", "root", "target"],
                         [(e.source, e.kind, _vec(e.root), e.target) for e in graph.edges])
    return doc, f"{entry.name}: {len(graph.vertices)} parameters\n{text}\n\nedges\n{edges}", EXIT_OK


def _classify_tables(report) -> str:
    c = report.counts
    head = (f"{report.group}: BB*={c['bb_star']}  Z*={c['z_star']}  BB0={c['bb0']}  "
            f"cartan classes={c['cartan_classes']}  quasi-split={report.quasisplit}")
    bb = format_table(["id", "simple_roots", "bits", "z"],
                      [(p.id, " ".join(_vec(r) for r in p.simple_roots), "".join(map(str, p.bits)) or "-",
                        report.z_map.get(p.id, "-")) for p in report.bb_star])
    zs = format_table(["z", "levi_roots", "nilradical", "bits"],
                      [(z.id, len(z.levi_roots), len(z.nilradical_roots), "".join(map(str, z.bits)) or "-")
                       for z in report.z_star])
    checks = format_table(["check", "result"], [(k, "PASS" if v else "FAIL") for k, v in sorted(report.checks.items())])
    return "\n\n".join([head, bb, zs, checks])


def cmd_classify(entry, args):
    report = classify(entry, args.max_graph_size)
    return report.to_json(), _classify_tables(report), EXIT_OK if report.ok else EXIT_INVARIANT


def cmd_ktypes(entry, args):
    from .ktypes import associated_variety_report, ktype_record, ktype_series

    if args.param is None:
        raise UsageError("ktypes needs --param ID (a Z* id from classify)")
    if args.cutoff is None or args.cutoff <= 0:
        raise UsageError("ktypes needs a positive --cutoff")
    report = classify(entry, args.max_graph_size)
    by_id = {z.id: z for z in report.z_star}
    if args.param not in by_id:
        raise UsageError(f"unknown Z* parameter {args.param} for {entry.name} (have {sorted(by_id)})")
    z = by_id[args.param]
    try:
        series = ktype_series(z, args.cutoff, entry.degrees_for)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    records = ktype_record(series)
    doc = {"group": entry.name, "param": z.id, "cutoff": args.cutoff, "virtual": series.virtual,
           "associated_variety": associated_variety_report(z), "ktypes": records}
    rows = [(_vec(r["highest_weight"]), r["multiplicity"], "yes" if r["certified"] else "no") for r in records]
    text = f"{entry.name} Z* {z.id}, cutoff {args.cutoff}\n" + format_table(["highest_weight", "mult", "certified"], rows)
    return doc, text, EXIT_OK


def cmd_langlands(entry, args):
    from .langlands import TitsGroup, lpair_record, order2_oracle, packets

    report = classify(entry, args.max_graph_size)
    group = TitsGroup(entry.root_datum, entry.inner.delta)
    records = [lpair_record(group, p) for p in report.bb_star]
    grouped = packets(report.bb_star)
    # The oracle counts dual-group classes; it only applies when the form is quasi-split.
    oracle = order2_oracle(entry.realization) if entry.realization and report.quasisplit else None
    status = EXIT_OK
    if not all(r["order2"] for r in records) or (oracle is not None and oracle != len(grouped)):
        status = EXIT_INVARIANT
    doc = {"group": entry.name, "lpairs": records,
           "packets": [{"class": _class_of(records, ids), "params": ids} for _, ids in grouped],
           "order2_oracle": oracle}
    rows = [(r["param"], r["class"], "yes" if r["order2"] else "no",
             "yes" if r["definition_reading"] else "no", "yes" if r["corollary_reading"] else "no") for r in records]
    text = format_table(["param", "class", "order2", "small+typeL", "large+typeL"], rows)
    ptext = format_table(["packet", "params"], [(k, " ".join(map(str, ids))) for k, (_, ids) in enumerate(grouped)])
    tail = f"{len(grouped)} packets; order-2 oracle: {oracle if oracle is not None else 'n/a'}"
    return doc, f"{entry.name}\n{text}\n\n{ptext}\n{tail}", status


def _class_of(records, ids) -> str:
    return next(r["class"] for r in records if r["param"] == ids[0])


def cmd_verify(entry, args):
    from .langlands import TitsGroup, lpair_record, order2_oracle, packets
    from .verify import SuiteResult, cross_involution_suite, monotonicity_suite

    report = classify(entry, args.max_graph_size)
    suites = []
    for name, ok in sorted(report.checks.items()):
        suites.append(SuiteResult(name, 1, [] if ok else [{"counts": report.counts}]))
    suites.append(monotonicity_suite(report.graph, entry.name))
    suites.append(cross_involution_suite(report.graph))
    decomp = SuiteResult("decomposition_lands_in_bb_star")
    star = {p.key for p in report.bb_star}
    for p in report.graph.vertices:
        if not is_nonzero(p):
            continue
        decomp.checked += 1
        terms = collect_signed(decompose_to_unipotent(p))
        if not terms or any(k not in star for k in terms):
            decomp.fail({"param": p.id})
    suites.append(decomp)
    group = TitsGroup(entry.root_datum, entry.inner.delta)
    order2 = SuiteResult("lpair_order2")
    for p in report.bb_star:
        order2.checked += 1
        if not lpair_record(group, p)["order2"]:
            order2.fail({"param": p.id})
    suites.append(order2)
    if entry.realization and report.quasisplit:
        want, got = order2_oracle(entry.realization), len(packets(report.bb_star))
        suites.append(SuiteResult("packet_count_matches_order2_oracle", 1,
                                  [] if want == got else [{"packets": got, "oracle": want}]))
    ok = all(s.ok for s in suites)
    doc = {"group": entry.name, "ok": ok, "suites": [s.to_json() for s in suites]}
    lines = [format_table(["invariant", "checked", "result"],
                          [(s.name, s.checked, "PASS" if s.ok else "FAIL") for s in suites])]
    for s in suites:
        for f in s.failures:
            lines.append(f"counterexample {s.name}: {json.dumps(f, default=str, sort_keys=True)}")
    lines.append(f"{entry.name}: {'PASS' if ok else 'FAIL'}")
    return doc, "\n".join(lines), EXIT_OK if ok else EXIT_INVARIANT


HANDLERS = {
    "kgb": cmd_kgb,
    "classify": cmd_classify,
    "ktypes": cmd_ktypes,
    "langlands": cmd_langlands,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="principal-unipotent", description=__doc__)
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("group_name", nargs="?", help="group name (same as --group)")
    parser.add_argument("--group")
    parser.add_argument("--param", type=int)
    parser.add_argument("--cutoff", type=int)
    parser.add_argument("--format", choices=("table", "json"), default="table")
    parser.add_argument("--catalog", metavar="PATH")
    parser.add_argument("--max-graph-size", type=int, default=DEFAULT_MAX_GRAPH_SIZE, metavar="N")
    return parser


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if args.group and args.group_name and args.group != args.group_name:
            raise UsageError("conflicting group names")
        if args.max_graph_size <= 0:
            raise UsageError("--max-graph-size must be positive")
        entries = load_catalog(args.catalog)
        if args.command == "catalog":
            doc, text, status = cmd_catalog(entries, args)
        else:
            name = args.group or args.group_name
            if not name:
                raise UsageError(f"{args.command} needs a group")
            if name not in entries:
                raise UsageError(f"unknown group {name!r} (known: {', '.join(sorted(entries))})")
            doc, text, status = HANDLERS[args.command](entries[name], args)
    except (UsageError, CatalogError, OSError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    except InvariantError as exc:
        print(f"invariant failure: {exc}", file=err)
        return EXIT_INVARIANT
    if args.format == "json":
        out.write(json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n")
    else:
        out.write(text + "\n")
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
