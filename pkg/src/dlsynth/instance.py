"""Database instances and their encoding as ground facts.

An instance maps each top-level record type to a list of records; a
record maps attributes to primitive values or, for record-typed
attributes, to a list of child records.  All reasoning downstream works
on the fact encoding: one relation per record type, one fact per record.
A nested record's relation takes the parent's identifier as an extra
leading argument, and record-typed attribute positions carry the owning
record's own identifier so parents and children can be re-linked.

Fact sets use set semantics throughout, matching least-model evaluation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import DanglingIdentifier, SchemaMismatch, UnknownAttribute
from .schema import PRIM_KINDS, QualifiedAttr, Schema

# Instance: {record type: [record, ...]}; record: {attr: value | [child record, ...]}
Instance = dict
FactBase = dict  # {relation: set[tuple]}


@dataclass(frozen=True, order=True)
class RecId:
    """Opaque record identifier; appears only in identifier positions of facts."""

    rel: str
    num: int

    def __str__(self):
        return f"{self.rel}#{self.num}"


def _check_prim(kind: str, v, where: str) -> None:
    if kind == "Int" and not (isinstance(v, int) and not isinstance(v, bool)):
        raise SchemaMismatch(f"{where}: expected Int, got {v!r}")
    if kind == "String" and not isinstance(v, str):
        raise SchemaMismatch(f"{where}: expected String, got {v!r}")


def validate_instance(s: Schema, inst: Instance) -> None:
    """Raise SchemaMismatch unless ``inst`` conforms to ``s``."""
    if not isinstance(inst, dict):
        raise SchemaMismatch("instance must be an object keyed by record type")
    for rel in inst:
        if rel not in s.top:
            raise SchemaMismatch(f"{rel} is not a top-level record type")

    def check_record(rec_type: str, r: dict) -> None:
        if not isinstance(r, dict):
            raise SchemaMismatch(f"{rec_type} record must be an object, got {r!r}")
        if set(r.keys()) != set(s.attrs(rec_type)):
            raise SchemaMismatch(
                f"{rec_type} record has attributes {sorted(r)}, expected {sorted(s.attrs(rec_type))}"
            )
        for a in s.attrs(rec_type):
            d = s.attr_defs[(rec_type, a)]
            if d in PRIM_KINDS:
                _check_prim(d, r[a], f"{rec_type}.{a}")
            else:
                if not isinstance(r[a], list):
                    raise SchemaMismatch(f"{rec_type}.{a} must hold a list of {d} records")
                for child in r[a]:
                    check_record(d, child)

    for rel, rows in inst.items():
        if not isinstance(rows, list):
            raise SchemaMismatch(f"{rel} must hold a list of records")
        for r in rows:
            check_record(rel, r)


def parse_instance(s: Schema, text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaMismatch(f"instance is not valid JSON: {e}") from e
    validate_instance(s, doc)
    return doc


def serialize_instance(s: Schema, inst: Instance) -> str:
    ordered = {rel: inst.get(rel, []) for rel in s.top}
    return json.dumps(ordered, indent=2)


def fact_arity(s: Schema, rel: str) -> int:
    extra = 1 if s.parent_of.get(rel) else 0
    return len(s.attrs(rel)) + extra


def attr_positions(s: Schema, rel: str) -> dict[str, int]:
    """Argument index of each attribute in ``rel``'s facts."""
    offset = 1 if s.parent_of.get(rel) else 0
    return {a: i + offset for i, a in enumerate(s.attrs(rel))}


def instance_to_facts(s: Schema, inst: Instance) -> FactBase:
    """Encode an instance as ground facts with deterministic identifiers.

    Identifiers are sequential per relation in document order, so repeated
    runs produce identical fact bases.
    """
    validate_instance(s, inst)
    fb: FactBase = {}
    counters: dict[str, int] = {}

    def emit(rec_type: str, r: dict, parent_id: RecId | None) -> None:
        counters[rec_type] = counters.get(rec_type, 0) + 1
        rid = RecId(rec_type, counters[rec_type])
        args: list = [] if parent_id is None else [parent_id]
        children: list[tuple[str, list]] = []
        for a in s.attrs(rec_type):
            d = s.attr_defs[(rec_type, a)]
            if d in PRIM_KINDS:
                args.append(r[a])
            else:
                args.append(rid)
                children.append((d, r[a]))
        fb.setdefault(rec_type, set()).add(tuple(args))
        for child_type, rows in children:
            for child in rows:
                emit(child_type, child, rid)

    for rel in s.top:
        for r in inst.get(rel, []):
            emit(rel, r, None)
    return fb


def facts_to_instance(s: Schema, fb: FactBase) -> Instance:
    """Rebuild the nested instance by chasing parent identifiers.

    Identifiers never appear in the result.  Raises DanglingIdentifier if a
    nested fact's parent identifier matches no parent record.
    """
    parents = s.parent_of
    # index nested relations by their leading parent-identifier argument
    by_parent: dict[str, dict[object, list[tuple]]] = {}
    for rel, facts in fb.items():
        if parents.get(rel):
            idx: dict[object, list[tuple]] = {}
            for f in sorted(facts, key=repr):
                idx.setdefault(f[0], []).append(f)
            by_parent[rel] = idx

    used: dict[str, set[tuple]] = {rel: set() for rel in by_parent}

    def build(rec_type: str, fact: tuple) -> dict:
        offset = 1 if parents.get(rec_type) else 0
        r: dict = {}
        for i, a in enumerate(s.attrs(rec_type)):
            d = s.attr_defs[(rec_type, a)]
            v = fact[i + offset]
            if d in PRIM_KINDS:
                r[a] = v
            else:
                child_facts = by_parent.get(d, {}).get(v, [])
                used.setdefault(d, set()).update(child_facts)
                r[a] = [build(d, cf) for cf in child_facts]
        return r

    inst: Instance = {}
    for rel in s.top:
        rows = [build(rel, f) for f in sorted(fb.get(rel, set()), key=repr)]
        inst[rel] = rows

    for rel, idx in by_parent.items():
        stray = set().union(*idx.values()) - used.get(rel, set()) if idx else set()
        if stray:
            f = sorted(stray, key=repr)[0]
            raise DanglingIdentifier(f"{rel} fact {f} references no parent record")
    return inst


def project(s: Schema, fb: FactBase, attrs: Iterable[QualifiedAttr]) -> set[tuple]:
    """Deduplicated projection of one relation onto primitive attributes.

    All attributes must belong to the same relation; the output column
    order is the schema's declaration order.  Identifier positions are not
    projectable.
    """
    attrs = list(attrs)
    if not attrs:
        raise UnknownAttribute("empty projection")
    owners = {a.owner for a in attrs}
    if len(owners) > 1:
        raise UnknownAttribute(f"projection spans relations {sorted(owners)}")
    rel = attrs[0].owner
    if not s.is_record(rel):
        raise UnknownAttribute(f"{rel} is not a record type")
    for a in attrs:
        if a.name not in s.attrs(rel):
            raise UnknownAttribute(f"{rel} has no attribute {a.name}")
        if s.attr_defs[(rel, a.name)] not in PRIM_KINDS:
            raise UnknownAttribute(f"{a} is not a primitive attribute")
    pos = attr_positions(s, rel)
    wanted = [pos[a] for a in s.attrs(rel) if QualifiedAttr(rel, a) in set(attrs)]
    return {tuple(f[i] for i in wanted) for f in fb.get(rel, set())}


def _freeze_record(r: Mapping) -> tuple:
    items = []
    for a in sorted(r):
        v = r[a]
        if isinstance(v, list):
            items.append((a, frozenset(_freeze_record(c) for c in v)))
        else:
            items.append((a, v))
    return tuple(items)


def canonical_instance(inst: Instance):
    """Order-insensitive, duplicate-insensitive form of an instance."""
    return {rel: frozenset(_freeze_record(r) for r in rows) for rel, rows in inst.items() if rows}


def instances_equal(a: Instance, b: Instance) -> bool:
    """Set equality at every nesting level, ignoring ordering and identifiers."""
    return canonical_instance(a) == canonical_instance(b)


def value_sets(s: Schema, inst: Instance) -> dict[QualifiedAttr, set]:
    """Values observed for each primitive attribute, across all nesting levels."""
    out: dict[QualifiedAttr, set] = {}

    def walk(rec_type: str, r: dict) -> None:
        for a in s.attrs(rec_type):
            d = s.attr_defs[(rec_type, a)]
            if d in PRIM_KINDS:
                out.setdefault(QualifiedAttr(rec_type, a), set()).add(r[a])
            else:
                for child in r[a]:
                    walk(d, child)

    for rel in s.top:
        for r in inst.get(rel, []):
            walk(rel, r)
    return out
