"""Conflict analysis for failed sketch completions.

When a candidate program's output disagrees with the expected output, we
do not just block that one assignment.  Renaming variables injectively
never changes a program's meaning, so every assignment with the same
equality pattern (and the same head-variable pins) is wrong too.  Pins
can be relaxed further using minimal distinguishing projections: if a
set of output attributes already tells the outputs apart, head variables
outside that set may be renamed freely and the program stays wrong.  The
blocking constraint conjoins one negated generalization per projection.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .datalog import Const, Var
from .errors import EqualOutputs
from .fdsolver import Clause, Encoding, Lit, model_satisfies, negate_conjunction
from .instance import FactBase, project
from .schema import PRIM_KINDS, QualifiedAttr, Schema
from .sketch import Sketch


@dataclass(frozen=True)
class GenFormula:
    """Conjunction of pins (x = value) and pairwise (dis)equalities."""

    lits: tuple[Lit, ...]

    def negation_clause(self) -> Clause:
        return negate_conjunction(self.lits)

    def satisfied_by(self, model: dict[int, int]) -> bool:
        return model_satisfies(self.lits, model)


def _pinned(enc: Encoding, sketch: Sketch, connector_ids: set[int], hole_id: int, code: int, mdp) -> bool:
    # constants and connector bindings are semantic choices, not renamable
    # variables, so they are always kept verbatim
    if hole_id in connector_ids:
        return True
    term = enc.code_term[code]
    if isinstance(term, Const):
        return True
    rule = sketch.rules[enc.code_rule[code]]
    if isinstance(term, Var) and term.name in rule.head_var_attr:
        if mdp is None:
            return True
        return rule.head_var_attr[term.name] in mdp
    return False


def _generalize(enc: Encoding, sketch: Sketch, model: dict[int, int], mdp) -> GenFormula:
    order = enc.hole_order
    connector_ids = {h.id for r in sketch.rules for h in r.connector_holes.values()}
    pinned = {h: _pinned(enc, sketch, connector_ids, h, model[h], mdp) for h in order}
    lits: list[Lit] = []
    for h in order:
        if pinned[h]:
            lits.append(("ec", h, model[h]))
        else:
            # a starred hole stands for a renamable variable: exclude the
            # constants in its domain, which renaming cannot reach
            for code in enc.domains[h]:
                if isinstance(enc.code_term[code], Const):
                    lits.append(("nc", h, code))
    for i, h in enumerate(order):
        for g in order[i + 1 :]:
            if pinned[h] and pinned[g]:
                continue
            kind = "ev" if model[h] == model[g] else "nv"
            lits.append((kind, h, g))
    return GenFormula(tuple(lits))


def generalize(enc: Encoding, sketch: Sketch, model: dict[int, int]) -> GenFormula:
    """Block the whole renaming class of ``model``, pinning every head variable."""
    return _generalize(enc, sketch, model, None)


def generalize_with_mdp(
    enc: Encoding, sketch: Sketch, model: dict[int, int], mdp: frozenset[QualifiedAttr]
) -> GenFormula:
    """As ``generalize``, pinning only head variables whose attribute is in the projection."""
    return _generalize(enc, sketch, model, mdp)


def mdp_set(s_t: Schema, actual: FactBase, expected: FactBase) -> set[frozenset[QualifiedAttr]]:
    """All minimal attribute sets whose projection tells the outputs apart.

    Breadth-first search per output relation over primitive attributes:
    singletons are seeded first, non-distinguishing sets grow by one
    attribute, and a distinguishing set is kept only if no kept subset
    precedes it.  Raises EqualOutputs when no projection distinguishes
    the two fact bases.
    """

    def distinguishes(attrs: frozenset[QualifiedAttr]) -> bool:
        return project(s_t, actual, attrs) != project(s_t, expected, attrs)

    relations = [
        rec
        for rec in s_t.record_attrs
        if rec in actual or rec in expected
    ] or list(s_t.record_attrs)
    result: set[frozenset[QualifiedAttr]] = set()
    queue: deque[frozenset[QualifiedAttr]] = deque()
    seen: set[frozenset[QualifiedAttr]] = set()
    universe: dict[str, list[QualifiedAttr]] = {}
    for rel in relations:
        prims = [
            QualifiedAttr(rel, a)
            for a in s_t.attrs(rel)
            if s_t.attr_defs[(rel, a)] in PRIM_KINDS
        ]
        universe[rel] = prims
        for a in prims:
            single = frozenset([a])
            if single not in seen:
                seen.add(single)
                queue.append(single)
    while queue:
        attrs = queue.popleft()
        if distinguishes(attrs):
            if not any(kept <= attrs for kept in result):
                result.add(attrs)
            continue
        rel = next(iter(attrs)).owner
        for a in universe[rel]:
            if a not in attrs:
                ext = attrs | {a}
                if ext not in seen:
                    seen.add(ext)
                    queue.append(ext)
    if not result:
        raise EqualOutputs("no projection distinguishes the outputs")
    return result


def analyze(
    enc: Encoding,
    sketch: Sketch,
    model: dict[int, int],
    s_t: Schema,
    actual: FactBase,
    expected: FactBase,
) -> tuple[list[Clause], list[GenFormula], set[frozenset[QualifiedAttr]]]:
    """Blocking clauses for a failed model: one negated generalization per projection.

    Outputs that differ only in record nesting admit no distinguishing
    projection; then the single blocking clause rules out just this model.
    """
    try:
        mdps = mdp_set(s_t, actual, expected)
    except EqualOutputs:
        clause = tuple(("nc", h, model[h]) for h in enc.hole_order)
        return [clause], [], set()
    formulas = [generalize_with_mdp(enc, sketch, model, phi) for phi in sorted(mdps, key=sorted)]
    return [f.negation_clause() for f in formulas], formulas, mdps
