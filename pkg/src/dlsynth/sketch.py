"""Program sketch generation.

For every top-level target record we build one rule sketch.  The heads
enumerate the record and all records nested in it; nested heads carry a
leading connector variable tying children to parents.  The body gets one
extensional chain per (target attribute, aliased source attribute) pair:
the chain runs from the source attribute's record up to its top-level
ancestor, with a hole at every primitive position and fresh connector
variables linking the chain.  Finally each hole receives a finite
candidate domain: the head variables of target attributes it aliases,
one copy variable per occurrence of the relevant relation in the body,
and (in filtering mode) constants drawn from the output example.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .attrmap import AttributeMapping
from .datalog import WILDCARD, Atom, Const, Term, Var
from .errors import UnmappableTargetAttribute
from .instance import Instance
from .schema import PRIM_KINDS, QualifiedAttr, Schema, record_chain


@dataclass(frozen=True)
class HoleTerm:
    """Placeholder standing at a body position until instantiation."""

    hole: int

    def __str__(self):
        return f"??{self.hole}"


@dataclass
class Hole:
    id: int
    attr: QualifiedAttr
    domain: tuple[Term, ...]
    connector: bool = False  # binds a target-side connector variable instead of a body position


@dataclass
class RuleSketch:
    target: str
    heads: tuple[Atom, ...]
    body: tuple[Atom, ...]
    holes: dict[int, Hole]
    connector_holes: dict[str, Hole]  # head connector variable name -> hole
    head_var_attr: dict[str, QualifiedAttr]  # primitive head variable -> target attribute

    def all_holes(self) -> list[Hole]:
        return list(self.holes.values()) + list(self.connector_holes.values())

    def pretty(self) -> str:
        h = ", ".join(str(a) for a in self.heads)
        b = ", ".join(str(a) for a in self.body)
        lines = [f"{h} :- {b}."]
        for hole in self.holes.values():
            dom = ", ".join(str(t) for t in hole.domain)
            lines.append(f"  ??{hole.id} [{hole.attr}] in {{{dom}}}")
        for v, hole in self.connector_holes.items():
            dom = ", ".join(str(t) for t in hole.domain)
            lines.append(f"  {v} [connector {hole.attr}] in {{{dom}}}")
        return "\n".join(lines)


@dataclass
class Sketch:
    rules: tuple[RuleSketch, ...]

    def all_holes(self) -> list[Hole]:
        return [h for r in self.rules for h in r.all_holes()]

    def rule_of_hole(self, hole_id: int) -> int:
        for i, r in enumerate(self.rules):
            if hole_id in r.holes or any(h.id == hole_id for h in r.connector_holes.values()):
                return i
        raise KeyError(hole_id)

    def pretty(self) -> str:
        return "\n".join(r.pretty() for r in self.rules)


class _Namer:
    """Deterministic fresh-name allocation; collisions get a prime suffix."""

    def __init__(self):
        self.used: set[str] = set()

    def claim(self, base: str) -> str:
        name = base
        while name in self.used or name == "_":
            name += "'"
        self.used.add(name)
        return name


def gen_intensional_preds(s_t: Schema, record: str, namer: _Namer | None = None):
    """Heads for ``record`` and everything nested in it.

    Returns (connector variable name or None, head atoms, primitive head
    variable -> target attribute map).  Nested records contribute an atom
    whose leading argument is the connector shared with the parent's
    attribute position.
    """
    namer = namer or _Namer()
    head_var_attr: dict[str, QualifiedAttr] = {}

    def build(rec: str, nested: bool):
        args: list[Term] = []
        child_atoms: list[Atom] = []
        for a in s_t.attrs(rec):
            d = s_t.attr_defs[(rec, a)]
            if d in PRIM_KINDS:
                v = namer.claim(a)
                head_var_attr[v] = QualifiedAttr(rec, a)
                args.append(Var(v))
            else:
                child_v, atoms = build(d, True)
                args.append(Var(child_v))
                child_atoms.extend(atoms)
        if nested:
            v_rec = namer.claim("v" + rec)
            atom = Atom(rec, (Var(v_rec), *args))
            return v_rec, [atom] + child_atoms
        return None, [Atom(rec, tuple(args))] + child_atoms

    v, atoms = build(record, False)
    return v, tuple(atoms), head_var_attr


def gen_extensional_preds(s: Schema, record: str, namer: _Namer | None = None, next_hole: int = 1):
    """One body chain for ``record``: its top-level ancestor down to itself.

    Each record on the chain contributes one atom with a fresh hole per
    primitive attribute; the chain is linked by fresh connector variables,
    and record positions off the chain are wildcards.  Returns
    (atoms, holes keyed by id, next free hole id).
    """
    namer = namer or _Namer()
    chain = record_chain(s, record)
    atoms: list[Atom] = []
    holes: dict[int, QualifiedAttr] = {}
    incoming: str | None = None
    for depth, rec in enumerate(chain):
        args: list[Term] = []
        if incoming is not None:
            args.append(Var(incoming))
        outgoing = None
        child_on_chain = chain[depth + 1] if depth + 1 < len(chain) else None
        for a in s.attrs(rec):
            d = s.attr_defs[(rec, a)]
            if d in PRIM_KINDS:
                holes[next_hole] = QualifiedAttr(rec, a)
                args.append(HoleTerm(next_hole))
                next_hole += 1
            elif d == child_on_chain:
                outgoing = namer.claim("v" + str(_count_vs(namer)))
                args.append(Var(outgoing))
            else:
                args.append(WILDCARD)
        atoms.append(Atom(rec, tuple(args)))
        incoming = outgoing
    return tuple(atoms), holes, next_hole


def _count_vs(namer: _Namer) -> int:
    return sum(1 for n in namer.used if n.startswith("v") and n[1:].isdigit()) + 1


def _head_prim_vars_in_order(heads: tuple[Atom, ...], head_var_attr: dict[str, QualifiedAttr]):
    out = []
    for atom in heads:
        for t in atom.args:
            if isinstance(t, Var) and t.name in head_var_attr:
                out.append(t.name)
    return out


def output_constants(s_t: Schema, output_inst: Instance) -> list[int | str]:
    """Constants occurring in the output example, in first-occurrence order."""
    seen: list[int | str] = []

    def walk(rec: str, r: dict):
        for a in s_t.attrs(rec):
            d = s_t.attr_defs[(rec, a)]
            if d in PRIM_KINDS:
                if r[a] not in seen:
                    seen.append(r[a])
            else:
                for child in r[a]:
                    walk(d, child)

    for rel in s_t.top:
        for r in output_inst.get(rel, []):
            walk(rel, r)
    return seen


def gen_rule_sketch(
    psi: AttributeMapping,
    s: Schema,
    s_t: Schema,
    target_record: str,
    next_hole: int = 1,
    filter_consts: list | None = None,
) -> tuple[RuleSketch, int]:
    """Sketch for one top-level target record; returns it plus the next hole id."""
    namer = _Namer()
    _, heads, head_var_attr = gen_intensional_preds(s_t, target_record, namer)
    head_prims = _head_prim_vars_in_order(heads, head_var_attr)

    # one chain per (target attribute, aliased source attribute) pair
    pairs: list[tuple[str, QualifiedAttr]] = []
    for hv in head_prims:
        t_attr = head_var_attr[hv]
        sources = psi.sources_for_target(t_attr)
        if not sources:
            raise UnmappableTargetAttribute(t_attr)
        for a in sources:
            pairs.append((hv, a))
    # deepest chains first reproduces the presentation order of nested sources
    order = sorted(range(len(pairs)), key=lambda i: (-len(record_chain(s, pairs[i][1].owner)), i))

    body: list[Atom] = []
    hole_attr: dict[int, QualifiedAttr] = {}
    for i in order:
        _, a = pairs[i]
        atoms, holes, next_hole = gen_extensional_preds(s, a.owner, namer, next_hole)
        body.extend(atoms)
        hole_attr.update(holes)

    # copy variables: one per (relation copy, attribute); numbered in body order
    copy_index: dict[str, int] = {}
    copy_vars: dict[tuple[str, str, int], str] = {}
    for atom in body:
        rel = atom.relation
        copy_index[rel] = copy_index.get(rel, 0) + 1
        j = copy_index[rel]
        for attr in s.attrs(rel):
            if s.attr_defs[(rel, attr)] in PRIM_KINDS:
                copy_vars[(rel, attr, j)] = namer.claim(f"{attr}{j}")

    consts = filter_consts or []

    holes: dict[int, Hole] = {}
    for hid, attr in hole_attr.items():
        domain: list[Term] = []
        for hv in head_prims:  # head variables of aliased target attributes
            if head_var_attr[hv] in psi.to_target.get(attr, frozenset()):
                domain.append(Var(hv))
        for j in range(1, copy_index.get(attr.owner, 0) + 1):
            domain.append(Var(copy_vars[(attr.owner, attr.name, j)]))
        for b in sorted(psi.source_aliases(attr), key=_schema_order_key(s)):
            for j in range(1, copy_index.get(b.owner, 0) + 1):
                domain.append(Var(copy_vars[(b.owner, b.name, j)]))
        kind = s.kind_of(attr)
        for c in consts:
            if (kind == "Int") == isinstance(c, int):
                domain.append(Const(c))
        holes[hid] = Hole(hid, attr, tuple(domain))

    # target-side connectors get their own unknowns ranging over body connectors
    body_connectors = [
        t.name
        for atom in body
        for t in atom.args
        if isinstance(t, Var)
    ]
    seen: set[str] = set()
    body_connectors = [v for v in body_connectors if not (v in seen or seen.add(v))]
    connector_holes: dict[str, Hole] = {}
    for atom in heads:
        for t in atom.args:
            if isinstance(t, Var) and t.name not in head_var_attr and t.name not in connector_holes:
                child = _connector_child(s_t, heads, t.name)
                if not body_connectors:
                    raise UnmappableTargetAttribute(
                        QualifiedAttr(target_record, child),
                        f"no body connector can bind nested record {child}",
                    )
                connector_holes[t.name] = Hole(
                    next_hole,
                    QualifiedAttr(s_t.parent_of.get(child, target_record), child),
                    tuple(Var(v) for v in body_connectors),
                    connector=True,
                )
                next_hole += 1

    return (
        RuleSketch(
            target=target_record,
            heads=heads,
            body=tuple(body),
            holes=holes,
            connector_holes=connector_holes,
            head_var_attr=head_var_attr,
        ),
        next_hole,
    )


def _connector_child(s_t: Schema, heads: tuple[Atom, ...], var_name: str) -> str:
    # the nested record whose head atom starts with this connector
    for atom in heads:
        if atom.args and isinstance(atom.args[0], Var) and atom.args[0].name == var_name:
            return atom.relation
    return var_name


def _schema_order_key(s: Schema):
    order = {q: i for i, q in enumerate(_all_prims(s))}
    return lambda q: order.get(q, len(order))


def _all_prims(s: Schema):
    out = []
    for rec in s.record_attrs:
        for a in s.record_attrs[rec]:
            if s.attr_defs[(rec, a)] in PRIM_KINDS:
                out.append(QualifiedAttr(rec, a))
    return out


def sketch_gen(
    psi: AttributeMapping,
    s: Schema,
    s_t: Schema,
    output_inst: Instance | None = None,
    filtering: bool = False,
) -> Sketch:
    """One rule sketch per top-level target record; hole ids globally unique."""
    filter_consts = output_constants(s_t, output_inst) if filtering and output_inst else []
    rules = []
    next_hole = 1
    problems = []
    for rec in s_t.top:
        try:
            rule, next_hole = gen_rule_sketch(psi, s, s_t, rec, next_hole, filter_consts)
            rules.append(rule)
        except UnmappableTargetAttribute as e:
            problems.append(e)
    if problems:
        attrs = ", ".join(str(e.attr) for e in problems)
        raise UnmappableTargetAttribute(problems[0].attr, f"unmappable target attributes: {attrs}")
    return Sketch(tuple(rules))


def search_space_size(sketch: Sketch) -> int:
    n = 1
    for hole in sketch.all_holes():
        n *= len(hole.domain)
    return n
