"""Attribute mapping inference by value-set containment.

A source attribute `a` maps to another attribute `a'` (source or target)
exactly when the values of `a'` observed in the example are a non-empty
subset of the values of `a` in the input.  Target attributes draw their
values from the output example, source attributes from the input.
Comparison is typed exact equality; there is no fuzzy matching.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .instance import Instance, value_sets
from .schema import QualifiedAttr, Schema, prim_attrbs


@dataclass
class AttributeMapping:
    """For each source primitive attribute: its source and target aliases.

    Reflexive entries are omitted, and attributes with no occurrences in
    the example never alias anything (vacuous containment is excluded).
    """

    to_source: dict[QualifiedAttr, frozenset[QualifiedAttr]] = field(default_factory=dict)
    to_target: dict[QualifiedAttr, frozenset[QualifiedAttr]] = field(default_factory=dict)

    def source_aliases(self, a: QualifiedAttr) -> frozenset[QualifiedAttr]:
        """Symmetric closure over source attributes: b aliases a if either maps to the other."""
        direct = self.to_source.get(a, frozenset())
        reverse = frozenset(b for b, s in self.to_source.items() if a in s)
        return direct | reverse

    def sources_for_target(self, t: QualifiedAttr) -> tuple[QualifiedAttr, ...]:
        return tuple(a for a, ts in self.to_target.items() if t in ts)

    def is_empty(self) -> bool:
        return not any(self.to_source.values()) and not any(self.to_target.values())

    def pretty(self) -> str:
        lines = []
        for a in sorted(set(self.to_source) | set(self.to_target)):
            rhs = sorted(str(x) for x in self.to_source.get(a, ())) + sorted(
                str(x) for x in self.to_target.get(a, ())
            )
            if rhs:
                lines.append(f"{a} -> {{{', '.join(rhs)}}}")
        return "\n".join(lines) or "(empty)"


def infer_attr_mapping(s: Schema, s_t: Schema, input_inst: Instance, output_inst: Instance) -> AttributeMapping:
    """Infer the mapping for one example (input instance, output instance)."""
    src_values = value_sets(s, input_inst)
    tgt_values = value_sets(s_t, output_inst)
    mapping = AttributeMapping()
    for a in prim_attrbs(s):
        base = src_values.get(a, set())
        src_hits = []
        for b in prim_attrbs(s):
            if b == a:
                continue
            vals = src_values.get(b, set())
            if vals and vals <= base:
                src_hits.append(b)
        tgt_hits = []
        for b in prim_attrbs(s_t):
            vals = tgt_values.get(b, set())
            if vals and vals <= base:
                tgt_hits.append(b)
        mapping.to_source[a] = frozenset(src_hits)
        mapping.to_target[a] = frozenset(tgt_hits)
    return mapping
