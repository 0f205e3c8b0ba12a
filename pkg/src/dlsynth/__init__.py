"""Example-driven synthesis of Datalog schema-mapping programs."""

from .attrmap import AttributeMapping, infer_attr_mapping
from .datalog import (
    Atom,
    Const,
    Program,
    Rule,
    Var,
    WILDCARD,
    alpha_equivalent,
    evaluate,
    parse_program,
    print_program,
    rename,
    simplify,
)
from .errors import DlsynthError, SynthesisFailure
from .instance import (
    FactBase,
    Instance,
    RecId,
    facts_to_instance,
    instance_to_facts,
    instances_equal,
    parse_instance,
    project,
    serialize_instance,
)
from .schema import QualifiedAttr, Schema, parse_schema, parent, prim_attrbs, top_level_records
from .sketch import Sketch, search_space_size, sketch_gen
from .synth import (
    Example,
    SynthesisOptions,
    SynthesisResult,
    find_distinguishing_input,
    find_second_program,
    interactive_synthesize,
    synthesize,
)

__all__ = [name for name in dir() if not name.startswith("_")]
