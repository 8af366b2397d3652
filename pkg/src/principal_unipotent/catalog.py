"""Group catalog: built-in entries and a JSON schema for user-supplied ones."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

from .linalg import identity
from .realform import CartanFrame, InnerClass, frame_from_spec
from .rootdata import BasedRootDatum, build_datum

SCHEMA_VERSION = 1

INVARIANT_DEGREES = {
    "A1": (2,),
    "A2": (2, 3),
    "A3": (2, 3, 4),
    "B2": (2, 4),
    "C2": (2, 4),
    "B3": (2, 4, 6),
    "C3": (2, 4, 6),
    "G2": (2, 6),
}


class CatalogError(ValueError):
    """Schema or consistency error in a catalog entry; `field` names the offending key."""

    def __init__(self, entry: str, field_name: str, message: str):
        super().__init__(f"{entry}: field {field_name!r}: {message}")
        self.entry = entry
        self.field = field_name


@dataclass(frozen=True)
class GroupCatalogEntry:
    name: str
    datum: object  # type string or {"simple_roots": ..., "simple_coroots": ...}
    delta: tuple  # permutation of simple roots, or explicit matrix rows
    theta_word: tuple[int, ...]
    grading: tuple[int, ...]
    invariant_degrees: dict = field(default_factory=dict, compare=False)
    realization: Optional[str] = None
    description: str = ""

    @cached_property
    def root_datum(self) -> BasedRootDatum:
        return build_datum(self.datum)

    @cached_property
    def inner(self) -> InnerClass:
        return InnerClass(self.root_datum, _delta_matrix(self.root_datum, self.delta))

    @cached_property
    def seed_frame(self) -> CartanFrame:
        return frame_from_spec(self.inner, self.theta_word, self.grading)

    def degrees_for(self, component: str) -> tuple[int, ...]:
        if component in self.invariant_degrees:
            return tuple(self.invariant_degrees[component])
        if component in INVARIANT_DEGREES:
            return INVARIANT_DEGREES[component]
        raise CatalogError(self.name, "invariant_degrees", f"no degrees for component {component}")

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "datum": self.datum if isinstance(self.datum, str) else {
                k: [list(v) for v in self.datum[k]] for k in ("simple_roots", "simple_coroots")
            },
            "delta": [list(r) if isinstance(r, tuple) else r for r in self.delta],
            "theta_word": list(self.theta_word),
            "grading": list(self.grading),
            "invariant_degrees": {k: list(v) for k, v in sorted(self.invariant_degrees.items())},
            "realization": self.realization,
            "description": self.description,
        }


def _delta_matrix(datum: BasedRootDatum, delta):
    """A permutation of simple roots (list of ints) or explicit matrix rows."""
    n = datum.rank
    if not delta:
        return identity(n)
    if all(isinstance(x, int) for x in delta):
        perm = list(delta)
        if sorted(perm) != list(range(datum.semisimple_rank)):
            raise ValueError("delta permutation is not a permutation of the simple roots")
        if datum.semisimple_rank != n:
            raise ValueError("a delta permutation needs a semisimple datum; give matrix rows")
        # Solve M a_i = a_perm(i) with the simple roots as a basis.
        from sympy import Matrix

        a = Matrix([list(r) for r in datum.simple_roots]).T
        b = Matrix([list(datum.simple_roots[p]) for p in perm]).T
        m = b * a.inv()
        if any(x.q != 1 for x in m):
            raise ValueError("delta permutation does not preserve the lattice")
        return tuple(tuple(int(m[i, j]) for j in range(n)) for i in range(n))
    return tuple(tuple(int(x) for x in r) for r in delta)


BUILTIN = [
    GroupCatalogEntry("sl2r", "A1.sc", (), (0,), (), realization="PGL2",
                      description="SL(2,R), split; seed on the split Cartan"),
    GroupCatalogEntry("sl3r", "A2.sc", (1, 0), (0, 1, 0), (), realization="PGL3",
                      description="SL(3,R), split; outer inner class"),
    GroupCatalogEntry("su21", "A2.sc", (), (0, 1, 0), (), realization=None,
                      description="SU(2,1), quasi-split; seed on the most split Cartan"),
    GroupCatalogEntry("sp4r", "C2.sc", (), (0, 1, 0, 1), (), realization="SO5",
                      description="Sp(4,R), split"),
    GroupCatalogEntry("g2split", "G2", (), (0, 1, 0, 1, 0, 1), (), realization=None,
                      description="split G2"),
    GroupCatalogEntry("su2", "A1.sc", (), (), (0,), realization="PGL2",
                      description="SU(2), compact form (negative control)"),
]


def builtin_catalog() -> dict[str, GroupCatalogEntry]:
    return {e.name: e for e in BUILTIN}


def _require(raw: dict, key: str, name: str, kind):
    if key not in raw:
        raise CatalogError(name, key, "missing")
    value = raw[key]
    if not isinstance(value, kind):
        raise CatalogError(name, key, f"expected {kind.__name__ if isinstance(kind, type) else kind}")
    return value


def entry_from_json(raw: dict) -> GroupCatalogEntry:
    name = raw.get("name")
    if not isinstance(name, str) or not name:
        raise CatalogError("<unnamed>", "name", "missing or not a string")
    datum = raw.get("datum")
    if isinstance(datum, dict):
        for k in ("simple_roots", "simple_coroots"):
            if not isinstance(datum.get(k), list):
                raise CatalogError(name, f"datum.{k}", "missing or not a list")
        datum = {k: tuple(tuple(v) for v in datum[k]) for k in ("simple_roots", "simple_coroots")}
    elif not isinstance(datum, str):
        raise CatalogError(name, "datum", "expected a type string or an object")
    delta = tuple(tuple(r) if isinstance(r, list) else r for r in raw.get("delta", []))
    theta_word = tuple(_require(raw, "theta_word", name, list))
    grading = tuple(_require(raw, "grading", name, list))
    degrees = raw.get("invariant_degrees", {})
    if not isinstance(degrees, dict):
        raise CatalogError(name, "invariant_degrees", "expected an object")
    entry = GroupCatalogEntry(
        name, datum, delta, theta_word, grading,
        {k: tuple(v) for k, v in degrees.items()}, raw.get("realization"), raw.get("description", ""),
    )
    validate_entry(entry)
    return entry


def validate_entry(entry: GroupCatalogEntry) -> None:
    try:
        datum = entry.root_datum
    except (ValueError, KeyError) as exc:
        raise CatalogError(entry.name, "datum", str(exc)) from None
    try:
        inner = entry.inner
    except ValueError as exc:
        raise CatalogError(entry.name, "delta", str(exc)) from None
    if any(not isinstance(i, int) or not 0 <= i < datum.semisimple_rank for i in entry.theta_word):
        raise CatalogError(entry.name, "theta_word", "index out of range")
    try:
        theta = inner.theta_from_word(entry.theta_word)
    except ValueError as exc:
        raise CatalogError(entry.name, "theta_word", str(exc)) from None
    from .linalg import mat_mul

    if mat_mul(theta, theta) != identity(datum.rank):
        raise CatalogError(entry.name, "theta_word", "w delta is not an involution")
    try:
        entry.seed_frame
    except ValueError as exc:
        raise CatalogError(entry.name, "grading", str(exc)) from None


def load_catalog(path: Optional[str] = None) -> dict[str, GroupCatalogEntry]:
    """Built-in entries, extended (or overridden) by a JSON catalog file."""
    entries = builtin_catalog()
    if path is None:
        return entries
    with open(path, encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise CatalogError(path, "<file>", f"line {exc.lineno}: {exc.msg}") from None
    if not isinstance(raw, dict) or raw.get("schema_version") != SCHEMA_VERSION:
        raise CatalogError(path, "schema_version", f"expected {SCHEMA_VERSION}")
    groups = raw.get("groups")
    if not isinstance(groups, list):
        raise CatalogError(path, "groups", "expected a list")
    for g in groups:
        e = entry_from_json(g)
        entries[e.name] = e
    return entries


def save_catalog(entries, path: str) -> None:
    doc = {"schema_version": SCHEMA_VERSION, "groups": [e.to_json() for e in entries]}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
