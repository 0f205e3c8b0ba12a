"""Database schemas as non-recursive record types.

A schema maps type names to definitions: a definition is either a
primitive kind (``Int`` or ``String``) or a record, i.e. an ordered list
of attribute names.  Nesting a record-typed attribute inside another
record yields document-shaped schemas; flat records model relational
tables; graph edges are records with explicit source/target attributes.

Attribute names are qualified by their owning record internally
(``QualifiedAttr``), so two records may reuse the same attribute name.
Declaration order is preserved everywhere: it fixes predicate argument
order downstream.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import CyclicSchema, DuplicateAttribute, SchemaError, UnknownTypeName

PRIM_KINDS = ("Int", "String")


@dataclass(frozen=True, order=True)
class QualifiedAttr:
    """An attribute name together with the record that owns it."""

    owner: str
    name: str

    def __str__(self):
        return f"{self.owner}.{self.name}"


@dataclass(frozen=True)
class Schema:
    """Validated schema: record attribute lists plus per-attribute definitions.

    ``record_attrs`` maps each record type to its ordered attribute names.
    ``attr_defs`` maps (record, attr) to ``"Int"``, ``"String"`` or the name
    of a nested record type.  ``top`` lists top-level records in declaration
    order.
    """

    record_attrs: dict[str, tuple[str, ...]]
    attr_defs: dict[tuple[str, str], str]
    top: tuple[str, ...]

    def is_record(self, name: str) -> bool:
        return name in self.record_attrs

    def attrs(self, record: str) -> tuple[str, ...]:
        return self.record_attrs[record]

    def def_of(self, attr: QualifiedAttr) -> str:
        return self.attr_defs[(attr.owner, attr.name)]

    def is_prim_attr(self, attr: QualifiedAttr) -> bool:
        return self.attr_defs[(attr.owner, attr.name)] in PRIM_KINDS

    def kind_of(self, attr: QualifiedAttr) -> str:
        kind = self.attr_defs[(attr.owner, attr.name)]
        if kind not in PRIM_KINDS:
            raise UnknownTypeName(f"{attr} is not a primitive attribute")
        return kind

    @property
    def parent_of(self) -> dict[str, str]:
        parents: dict[str, str] = {}
        for rec, attrs in self.record_attrs.items():
            for a in attrs:
                if self.attr_defs[(rec, a)] not in PRIM_KINDS:
                    parents[self.attr_defs[(rec, a)]] = rec
        return parents


def prim_attrbs(s: Schema) -> tuple[QualifiedAttr, ...]:
    """All primitive attributes of ``s``, in declaration order."""
    out = []
    for rec in s.record_attrs:
        for a in s.record_attrs[rec]:
            if s.attr_defs[(rec, a)] in PRIM_KINDS:
                out.append(QualifiedAttr(rec, a))
    return tuple(out)


def parent(s: Schema, name: str) -> str | None:
    """The unique record containing ``name``, or None for top-level records.

    ``name`` may be a record type, an attribute name (if unambiguous), or a
    qualified ``Owner.attr`` string.
    """
    if "." in name:
        owner, attr = name.split(".", 1)
        if (owner, attr) not in s.attr_defs:
            raise UnknownTypeName(f"unknown attribute {name}")
        return owner
    if s.is_record(name):
        return s.parent_of.get(name)
    owners = [rec for rec in s.record_attrs if name in s.record_attrs[rec]]
    if not owners:
        raise UnknownTypeName(f"unknown type name {name}")
    if len(owners) > 1:
        raise SchemaError(f"attribute name {name} is ambiguous: owned by {owners}")
    return owners[0]


def top_level_records(s: Schema) -> tuple[str, ...]:
    """Record types with no parent, in declaration order."""
    return s.top


def resolve_attr(s: Schema, name: str) -> QualifiedAttr:
    """Resolve an ``Owner.attr`` or unambiguous bare attribute name."""
    if "." in name:
        owner, attr = name.split(".", 1)
        q = QualifiedAttr(owner, attr)
        if (owner, attr) not in s.attr_defs:
            raise UnknownTypeName(f"unknown attribute {name}")
        return q
    owners = [rec for rec in s.record_attrs if name in s.record_attrs[rec]]
    if not owners:
        raise UnknownTypeName(f"unknown attribute {name}")
    if len(owners) > 1:
        raise SchemaError(f"attribute name {name} is ambiguous: owned by {owners}")
    return QualifiedAttr(owners[0], name)


def parse_schema(text: str) -> Schema:
    """Parse and validate the JSON schema format.

    Format: ``{"types": {name: "Int" | "String" | {"record": [attr, ...]}},
    "top": [record, ...]?}``.  Attribute definitions are looked up first by
    the qualified key ``"Owner.attr"``, then by the bare name.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"schema is not valid JSON: {e}") from e
    if not isinstance(doc, dict) or "types" not in doc or not isinstance(doc["types"], dict):
        raise SchemaError('schema must be a JSON object with a "types" map')
    types = doc["types"]

    records: dict[str, tuple[str, ...]] = {}
    for name, d in types.items():
        if isinstance(d, dict):
            if set(d.keys()) != {"record"} or not isinstance(d["record"], list):
                raise SchemaError(f'definition of {name} must be "Int", "String" or {{"record": [...]}}')
            attrs = d["record"]
            if not attrs:
                raise SchemaError(f"record {name} has no attributes")
            if len(set(attrs)) != len(attrs):
                raise DuplicateAttribute(f"record {name} lists an attribute twice")
            records[name] = tuple(attrs)
        elif d not in PRIM_KINDS:
            raise SchemaError(f"unknown primitive kind {d!r} for {name}")

    attr_defs: dict[tuple[str, str], str] = {}
    parents: dict[str, str] = {}
    for rec, attrs in records.items():
        for a in attrs:
            if f"{rec}.{a}" in types:
                d = types[f"{rec}.{a}"]
            elif a in types:
                d = types[a]
            else:
                raise UnknownTypeName(f"attribute {a} of {rec} has no definition")
            if isinstance(d, dict):
                # a is itself a record type, nested inside rec
                child = a
                if child in parents:
                    raise DuplicateAttribute(
                        f"record {child} is nested under both {parents[child]} and {rec}"
                    )
                parents[child] = rec
                attr_defs[(rec, a)] = child
            else:
                attr_defs[(rec, a)] = d

    # acyclicity of containment (covers self-reference)
    def chase(rec: str, seen: tuple[str, ...]) -> None:
        if rec in seen:
            raise CyclicSchema(f"record containment cycle through {rec}")
        for a in records[rec]:
            d = attr_defs[(rec, a)]
            if d not in PRIM_KINDS:
                chase(d, seen + (rec,))

    for rec in records:
        chase(rec, ())

    default_top = tuple(r for r in records if r not in parents)
    if "top" in doc:
        top = tuple(doc["top"])
        for r in top:
            if r not in records:
                raise UnknownTypeName(f"top-level name {r} is not a record")
            if r in parents:
                raise SchemaError(f"{r} cannot be top-level: it is nested in {parents[r]}")
        if set(top) != set(default_top):
            raise SchemaError("top list must cover exactly the parentless records")
    else:
        top = default_top
    if not top:
        raise SchemaError("schema has no top-level record")
    return Schema(record_attrs=records, attr_defs=attr_defs, top=top)


def serialize_schema(s: Schema) -> str:
    """Inverse of parse_schema (up to attribute-definition sharing)."""
    types: dict[str, object] = {}
    for rec, attrs in s.record_attrs.items():
        types[rec] = {"record": list(attrs)}
    for (rec, a), d in s.attr_defs.items():
        if d in PRIM_KINDS:
            key = a if types.get(a) in (None, d) else f"{rec}.{a}"
            types[key] = d
    return json.dumps({"types": types, "top": list(s.top)}, indent=2)


def nested_records(s: Schema, top: str) -> tuple[str, ...]:
    """``top`` plus every record transitively nested in it, pre-order."""
    out = [top]
    for a in s.record_attrs[top]:
        d = s.attr_defs[(top, a)]
        if d not in PRIM_KINDS:
            out.extend(nested_records(s, d))
    return tuple(out)


def record_chain(s: Schema, rec: str) -> tuple[str, ...]:
    """Containment chain from the top-level ancestor down to ``rec``."""
    chain = [rec]
    parents = s.parent_of
    while chain[0] in parents:
        chain.insert(0, parents[chain[0]])
    return tuple(chain)
