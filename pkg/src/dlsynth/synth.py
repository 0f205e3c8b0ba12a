"""Top-level synthesis: lazy enumeration with conflict-driven pruning.

The loop asks the solver for the smallest remaining completion,
evaluates it on the example input, and either returns it (when the
reconstructed output matches the expected instance, identifiers aside)
or blocks a whole family of provably wrong completions and retries.
On top of the plain loop this module implements the interactive
protocol: search for a second, inequivalent consistent program, find a
small input on which the two disagree, and ask the user (or a scripted
oracle) for the expected output there.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Callable, Iterator

from . import analyze as analyze_mod
from .attrmap import AttributeMapping, infer_attr_mapping
from .datalog import Program, alpha_equivalent, evaluate, simplify
from .errors import (
    BudgetExceeded,
    DanglingIdentifier,
    IterationBudgetExceeded,
    OracleRejected,
    SchemaMismatch,
    SynthesisFailure,
    SynthesisTimeout,
)
from .fdsolver import Encoding, block_model, add_blocking_clause, encode, instantiate, next_model
from .instance import (
    FactBase,
    Instance,
    canonical_instance,
    facts_to_instance,
    instance_to_facts,
    instances_equal,
    validate_instance,
)
from .schema import Schema
from .sketch import Sketch, search_space_size, sketch_gen


@dataclass
class Example:
    input: Instance
    output: Instance


@dataclass
class SynthesisOptions:
    strategy: str = "mdp"  # "mdp" or "naive"
    filtering: bool = False
    max_iters: int = 200_000
    timeout_s: float = 120.0
    collect_details: bool = False
    max_rounds: int = 8  # interactive refinement rounds


@dataclass
class IterationRecord:
    model: dict[int, int]
    formulas: list
    mdps: set
    consistent: bool


@dataclass
class SynthesisResult:
    program: Program
    raw_program: Program
    model: dict[int, int]
    iterations: int
    blocking_clauses: int
    wall_time_s: float
    search_space: int
    sketch: Sketch
    encoding: Encoding
    psi: AttributeMapping
    details: list[IterationRecord] = field(default_factory=list)
    queries_asked: int = 0


def _union_instances(s: Schema, instances: list[Instance]) -> Instance:
    out: Instance = {rel: [] for rel in s.top}
    for inst in instances:
        for rel in s.top:
            out[rel].extend(inst.get(rel, []))
    return out


def outputs_match(s_t: Schema, actual_fb: FactBase, expected: Instance) -> bool:
    """Identifier-insensitive comparison of evaluated facts against an instance."""
    try:
        actual_inst = facts_to_instance(s_t, actual_fb)
    except DanglingIdentifier:
        return False
    return instances_equal(actual_inst, expected)


class SynthesisSession:
    """One deterministic synthesis run over a fixed example set."""

    def __init__(self, s: Schema, s_t: Schema, examples: list[Example], opts: SynthesisOptions):
        self.s = s
        self.s_t = s_t
        self.examples = examples
        self.opts = opts
        for e in examples:
            validate_instance(s, e.input)
            validate_instance(s_t, e.output)
        union_in = _union_instances(s, [e.input for e in examples])
        union_out = _union_instances(s_t, [e.output for e in examples])
        self.psi = infer_attr_mapping(s, s_t, union_in, union_out)
        self.sketch = sketch_gen(self.psi, s, s_t, output_inst=union_out, filtering=opts.filtering)
        self.encoding = encode(self.sketch)
        self.input_facts = [instance_to_facts(s, e.input) for e in examples]
        self.expected_facts = [instance_to_facts(s_t, e.output) for e in examples]
        self.iterations = 0
        self.details: list[IterationRecord] = []
        self.started = time.monotonic()
        self._gen = self.consistent_programs()

    def next_program(self) -> tuple[Program, dict[int, int]] | None:
        return next(self._gen, None)

    def _check_budgets(self):
        if self.iterations >= self.opts.max_iters:
            raise IterationBudgetExceeded(f"exceeded {self.opts.max_iters} solver iterations")
        if time.monotonic() - self.started > self.opts.timeout_s:
            raise SynthesisTimeout(f"exceeded {self.opts.timeout_s}s")

    def consistent_programs(self) -> Iterator[tuple[Program, dict[int, int]]]:
        """Consistent completions in deterministic solver order.

        Advancing the iterator past a consistent program blocks its whole
        renaming class, so distinct yields are never mere renamings.
        """
        while True:
            self._check_budgets()
            model = next_model(self.encoding)
            if model is None:
                return
            self.iterations += 1
            program = instantiate(self.sketch, model, self.encoding)
            failing = None
            for fb_in, expected, e in zip(self.input_facts, self.expected_facts, self.examples):
                actual = evaluate(program, fb_in)
                if not outputs_match(self.s_t, actual, e.output):
                    failing = (actual, expected)
                    break
            if failing is None:
                if self.opts.collect_details:
                    self.details.append(IterationRecord(model, [], set(), True))
                yield program, model
                # resumed: rule out this program's entire renaming class
                f = analyze_mod.generalize(self.encoding, self.sketch, model)
                add_blocking_clause(self.encoding, f.negation_clause())
                continue
            actual, expected = failing
            if self.opts.strategy == "naive":
                block_model(self.encoding, model)
                if self.opts.collect_details:
                    self.details.append(IterationRecord(model, [], set(), False))
            else:
                clauses, formulas, mdps = analyze_mod.analyze(
                    self.encoding, self.sketch, model, self.s_t, actual, expected
                )
                for cl in clauses:
                    add_blocking_clause(self.encoding, cl)
                if self.opts.collect_details:
                    self.details.append(IterationRecord(model, formulas, mdps, False))

    def verified_simplify(self, program: Program) -> Program:
        """Simplify, then re-verify on every example; fall back to the raw program."""
        simplified = simplify(program)
        for fb_in, e in zip(self.input_facts, self.examples):
            if not outputs_match(self.s_t, evaluate(simplified, fb_in), e.output):
                return program
        return simplified

    def result(self, program: Program, model: dict[int, int]) -> SynthesisResult:
        return SynthesisResult(
            program=self.verified_simplify(program),
            raw_program=program,
            model=model,
            iterations=self.iterations,
            blocking_clauses=len(self.encoding.clauses) - self.encoding.base_clauses,
            wall_time_s=time.monotonic() - self.started,
            search_space=search_space_size(self.sketch),
            sketch=self.sketch,
            encoding=self.encoding,
            psi=self.psi,
            details=self.details,
        )


def synthesize(
    s: Schema,
    s_t: Schema,
    example: Example | list[Example],
    opts: SynthesisOptions | None = None,
) -> SynthesisResult:
    """First program consistent with the example(s), or SynthesisFailure."""
    examples = example if isinstance(example, list) else [example]
    opts = opts or SynthesisOptions()
    session = SynthesisSession(s, s_t, examples, opts)
    found = session.next_program()
    if found is None:
        raise SynthesisFailure(
            f"no consistent program among {search_space_size(session.sketch)} completions"
        )
    return session.result(*found)


def find_second_program(
    session: SynthesisSession, first: Program
) -> tuple[Program, dict[int, int]] | None:
    """Another consistent program not equivalent to ``first`` up to renaming.

    Resumes the session's iterator; candidates whose simplified form matches
    ``first``'s are skipped (their renaming classes get blocked as a side
    effect of advancing).
    """
    first_simplified = session.verified_simplify(first)
    while (found := session.next_program()) is not None:
        program, model = found
        candidate = session.verified_simplify(program)
        if not alpha_equivalent(candidate, first_simplified):
            return program, model
    return None


def build_validation_pool(s: Schema, inst: Instance) -> list[tuple[str, tuple]]:
    """Example facts plus fresh-valued synthetic facts of the same shape.

    The synthetic rows reuse the structure of the first record of each
    relation but carry values never seen in the instance, so joins that the
    example happens to satisfy coincidentally can be broken.
    """
    base = instance_to_facts(s, inst)
    pool: list[tuple[str, tuple]] = []
    for rel in s.record_attrs:
        for f in sorted(base.get(rel, set()), key=repr):
            pool.append((rel, f))
    ints = [v for _, f in pool for v in f if isinstance(v, int) and not isinstance(v, bool)]
    fresh_int = itertools.count(max(ints, default=0) + 100)
    fresh_str = (f"x{i}" for i in itertools.count(1))
    synth_inst: Instance = {}

    def fresh_record(rec: str) -> dict:
        r = {}
        for a in s.attrs(rec):
            d = s.attr_defs[(rec, a)]
            if d == "Int":
                r[a] = next(fresh_int)
            elif d == "String":
                r[a] = next(fresh_str)
            else:
                r[a] = [fresh_record(d)]
        return r

    for rel in s.top:
        if inst.get(rel):
            synth_inst[rel] = [fresh_record(rel)]
    extra = instance_to_facts(s, synth_inst)
    renumber = _shift_ids(extra, base)
    for rel in s.record_attrs:
        for f in sorted(renumber.get(rel, set()), key=repr):
            pool.append((rel, f))
    return pool


def _shift_ids(extra: FactBase, base: FactBase) -> FactBase:
    """Displace synthetic record identifiers so they never collide with real ones."""
    from .instance import RecId

    counts: dict[str, int] = {}
    for rel, facts in base.items():
        for f in facts:
            for v in f:
                if isinstance(v, RecId):
                    counts[v.rel] = max(counts.get(v.rel, 0), v.num)
    out: FactBase = {}
    for rel, facts in extra.items():
        shifted = set()
        for f in facts:
            shifted.add(
                tuple(
                    RecId(v.rel, v.num + counts.get(v.rel, 0)) if isinstance(v, RecId) else v
                    for v in f
                )
            )
        out[rel] = shifted
    return out


def _closed_subset(s: Schema, chosen: list[tuple[str, tuple]]) -> bool:
    """Nested facts must come with a parent fact that owns them."""
    parents = s.parent_of
    by_rel: dict[str, list[tuple]] = {}
    for rel, f in chosen:
        by_rel.setdefault(rel, []).append(f)
    for rel, facts in by_rel.items():
        p = parents.get(rel)
        if not p:
            continue
        pos = [
            i + (1 if parents.get(p) else 0)
            for i, a in enumerate(s.attrs(p))
            if s.attr_defs[(p, a)] == rel
        ]
        owners = {pf[i] for pf in by_rel.get(p, []) for i in pos}
        if any(f[0] not in owners for f in facts):
            return False
    return True


def _output_key(s_t: Schema, fb: FactBase):
    try:
        return ("inst", canonical_instance(facts_to_instance(s_t, fb)))
    except DanglingIdentifier:
        return ("facts", tuple(sorted((rel, tuple(sorted(fs, key=repr))) for rel, fs in fb.items() if fs)))


def find_distinguishing_input(
    s: Schema,
    s_t: Schema,
    p1: Program,
    p2: Program,
    pool: list[tuple[str, tuple]],
    max_size: int | None = None,
    max_subsets: int = 200_000,
) -> FactBase | None:
    """Smallest pool subset on which the two programs disagree, if any.

    Subsets are enumerated in increasing size, restricted to parent-closed
    fact sets so the chosen input is itself a well-formed instance.
    """
    max_size = max_size if max_size is not None else len(pool)
    tried = 0
    for size in range(1, max_size + 1):
        for combo in itertools.combinations(range(len(pool)), size):
            tried += 1
            if tried > max_subsets:
                raise BudgetExceeded(f"distinguishing-input search exceeded {max_subsets} subsets")
            chosen = [pool[i] for i in combo]
            if not _closed_subset(s, chosen):
                continue
            fb: FactBase = {}
            for rel, f in chosen:
                fb.setdefault(rel, set()).add(f)
            if _output_key(s_t, evaluate(p1, fb)) != _output_key(s_t, evaluate(p2, fb)):
                return fb
    return None


def interactive_synthesize(
    s: Schema,
    s_t: Schema,
    example: Example,
    oracle: Callable[[Instance], Instance],
    opts: SynthesisOptions | None = None,
) -> SynthesisResult:
    """Refine with oracle-provided examples until one program remains.

    Each round synthesizes against all accumulated examples, looks for a
    second inequivalent consistent program, and, when one exists and a
    small input tells them apart, asks the oracle for the expected output
    on that input.  Stops when the program is unique, indistinguishable
    within the pool, or the round budget runs out.
    """
    opts = opts or SynthesisOptions()
    examples = [example]
    queries = 0
    for _ in range(opts.max_rounds + 1):
        session = SynthesisSession(s, s_t, examples, opts)
        first = session.next_program()
        if first is None:
            raise SynthesisFailure("no program is consistent with the accumulated examples")
        program, model = first
        second = find_second_program(session, program)
        if second is None:
            res = session.result(program, model)
            res.queries_asked = queries
            return res
        pool = build_validation_pool(s, _union_instances(s, [e.input for e in examples]))
        fb = find_distinguishing_input(s, s_t, program, second[0], pool)
        if fb is None:
            res = session.result(program, model)
            res.queries_asked = queries
            return res
        query_input = facts_to_instance(s, fb)
        answer = oracle(query_input)
        try:
            validate_instance(s_t, answer)
        except SchemaMismatch as e:
            raise OracleRejected(str(e)) from e
        queries += 1
        examples.append(Example(query_input, answer))
    raise IterationBudgetExceeded(f"no unique program after {opts.max_rounds} refinement rounds")
