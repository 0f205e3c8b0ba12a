"""Finite-domain constraint solving over sketch completions.

Each hole becomes an integer-coded variable ranging over its candidate
domain; candidates are coded per rule so same-named variables in
different rules stay distinct.  The base constraints say every hole
takes a domain value and every primitive head variable appears in some
hole; conflict analysis later conjoins blocking clauses.

Clauses are disjunctions of four literal shapes: x = c, x != c, x = y,
x != y.  Models are enumerated deterministically: the solver always
returns the lexicographically smallest satisfying assignment with
respect to hole order and domain order, which makes whole runs
reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .datalog import Atom, Const, Program, Rule, Term, Var
from .errors import BudgetExceeded, UnboundHeadVariable
from .sketch import HoleTerm, Sketch

# literal kinds: "ec" x==code, "nc" x!=code, "ev" x==y, "nv" x!=y
Lit = tuple[str, int, int]
Clause = tuple[Lit, ...]


def negate_lit(lit: Lit) -> Lit:
    kind, a, b = lit
    flip = {"ec": "nc", "nc": "ec", "ev": "nv", "nv": "ev"}
    return (flip[kind], a, b)


def negate_conjunction(lits: tuple[Lit, ...]) -> Clause:
    """CNF of the negation of a conjunction: one clause of flipped literals."""
    return tuple(negate_lit(l) for l in lits)


@dataclass
class Encoding:
    """Mutable solving session for one sketch."""

    hole_order: tuple[int, ...]
    domains: dict[int, tuple[int, ...]]  # hole id -> candidate codes, in domain order
    clauses: list[Clause] = field(default_factory=list)
    base_clauses: int = 0  # prefix of `clauses` derivable from the sketch alone
    code_term: dict[int, Term] = field(default_factory=dict)
    code_rule: dict[int, int] = field(default_factory=dict)
    term_code: dict[tuple, int] = field(default_factory=dict)
    cursor: tuple[int, ...] | None = None  # domain indices of the last model handed out

    def code_of(self, rule_idx: int, term: Term) -> int:
        key = _term_key(rule_idx, term)
        return self.term_code[key]

    def pretty(self) -> str:
        lines = []
        for h in self.hole_order:
            dom = ", ".join(str(self.code_term[c]) for c in self.domains[h])
            lines.append(f"x{h} in {{{dom}}}")
        for i, cl in enumerate(self.clauses):
            tag = "base" if i < self.base_clauses else "blocking"
            lines.append(f"({self._clause_str(cl)})  [{tag}]")
        return "\n".join(lines)

    def _clause_str(self, cl: Clause) -> str:
        parts = []
        for kind, a, b in cl:
            op = "=" if kind in ("ec", "ev") else "!="
            rhs = str(self.code_term[b]) if kind in ("ec", "nc") else f"x{b}"
            parts.append(f"x{a} {op} {rhs}")
        return " | ".join(parts)


def _term_key(rule_idx: int, term: Term) -> tuple:
    if isinstance(term, Var):
        return ("v", rule_idx, term.name)
    if isinstance(term, Const):
        return ("c", type(term.value).__name__, term.value)
    raise TypeError(f"not a candidate term: {term!r}")


def encode(sketch: Sketch) -> Encoding:
    """Base encoding: domain membership plus head-variable coverage.

    The coverage clause for a head variable v disjoins x_i = v over every
    hole whose domain contains v.
    """
    enc = Encoding(hole_order=(), domains={})
    holes = sorted(sketch.all_holes(), key=lambda h: h.id)
    enc.hole_order = tuple(h.id for h in holes)
    next_code = 0
    for ri, rule in enumerate(sketch.rules):
        for hole in sorted(rule.all_holes(), key=lambda h: h.id):
            codes = []
            for term in hole.domain:
                key = _term_key(ri, term)
                if key not in enc.term_code:
                    enc.term_code[key] = next_code
                    enc.code_term[next_code] = term
                    enc.code_rule[next_code] = ri
                    next_code += 1
                codes.append(enc.term_code[key])
            enc.domains[hole.id] = tuple(codes)
    # head coverage
    for ri, rule in enumerate(sketch.rules):
        for v in rule.head_var_attr:
            key = _term_key(ri, Var(v))
            if key not in enc.term_code:
                raise UnboundHeadVariable(
                    f"head variable {v} of {rule.target} occurs in no hole domain"
                )
            code = enc.term_code[key]
            clause = tuple(
                ("ec", h.id, code) for h in rule.all_holes() if code in enc.domains[h.id]
            )
            enc.clauses.append(clause)
    enc.base_clauses = len(enc.clauses)
    return enc


def add_blocking_clause(enc: Encoding, clause: Clause) -> None:
    enc.clauses.append(clause)


def block_model(enc: Encoding, model: dict[int, int]) -> None:
    """Rule out exactly this assignment."""
    add_blocking_clause(enc, tuple(("nc", h, model[h]) for h in enc.hole_order))


def _lit_eval(lit: Lit, assign: dict[int, int]):
    """True/False when decided under the partial assignment, else None."""
    kind, a, b = lit
    va = assign.get(a)
    if va is None:
        return None
    if kind == "ec":
        return va == b
    if kind == "nc":
        return va != b
    vb = assign.get(b)
    if vb is None:
        return None
    return (va == vb) if kind == "ev" else (va != vb)


def model_satisfies(lits, assign: dict[int, int]) -> bool:
    """All literals of a conjunction hold under a total assignment."""
    return all(_lit_eval(l, assign) is True for l in lits)


def clause_satisfied(clause: Clause, assign: dict[int, int]) -> bool:
    return any(_lit_eval(l, assign) is True for l in clause)


def _index_clauses(enc: Encoding, order: tuple[int, ...]):
    """Group clauses by the hole assigned last among their variables."""
    rank = {h: i for i, h in enumerate(order)}
    by_last: dict[int, list[Clause]] = {h: [] for h in order}
    always: list[Clause] = []
    for cl in enc.clauses:
        vars_in = set()
        for kind, a, b in cl:
            vars_in.add(a)
            if kind in ("ev", "nv"):
                vars_in.add(b)
        if not vars_in:
            always.append(cl)
            continue
        last = max(vars_in, key=lambda v: rank[v])
        by_last[last].append(cl)
    return by_last, always


def get_model(enc: Encoding) -> dict[int, int] | None:
    """Lexicographically smallest satisfying assignment, or None when unsatisfiable."""
    for m in _solutions(enc):
        return m
    return None


def next_model(enc: Encoding) -> dict[int, int] | None:
    """Smallest satisfying assignment strictly after the one last returned.

    Because clauses are only ever added, every assignment at or before the
    cursor stays excluded, so resuming the lexicographic sweep gives the
    same sequence a from-scratch search would, without re-walking it.
    """
    for m in _solutions(enc, start=enc.cursor):
        enc.cursor = tuple(enc.domains[h].index(m[h]) for h in enc.hole_order)
        return m
    return None


def _solutions(enc: Encoding, budget: int | None = None, start: tuple[int, ...] | None = None):
    order = enc.hole_order
    if any(len(enc.domains[h]) == 0 for h in order):
        return
    by_last, always = _index_clauses(enc, order)
    if any(not cl for cl in always):
        return  # an empty clause is unsatisfiable
    assign: dict[int, int] = {}
    n = len(order)
    steps = 0
    if n == 0:
        if start is None and all(clause_satisfied(cl, assign) for cl in enc.clauses):
            yield dict(assign)
        return

    def dfs(k: int, tight: bool):
        nonlocal steps
        if k == n:
            if not tight:  # the cursor assignment itself was already handed out
                yield dict(assign)
            return
        h = order[k]
        lo = start[k] if tight else 0
        for idx in range(lo, len(enc.domains[h])):
            code = enc.domains[h][idx]
            steps += 1
            if budget is not None and steps > budget:
                raise BudgetExceeded(f"model search exceeded {budget} steps")
            assign[h] = code
            if all(clause_satisfied(cl, assign) for cl in by_last[h]):
                yield from dfs(k + 1, tight and idx == start[k])
            del assign[h]

    yield from dfs(0, start is not None)


def enumerate_models(enc: Encoding, budget: int | None = None):
    """All satisfying assignments, in lexicographic order."""
    yield from _solutions(enc, budget)


def count_models(enc: Encoding, extra_lits: tuple[Lit, ...] = (), cap: int | None = None) -> int:
    """Exact model count by exhaustive enumeration (desk-scale formulas only).

    ``extra_lits`` is a conjunction each counted model must also satisfy;
    ``cap`` bounds the search effort and raises BudgetExceeded beyond it.
    """
    scratch = Encoding(
        hole_order=enc.hole_order,
        domains=enc.domains,
        clauses=list(enc.clauses) + [(l,) for l in extra_lits],
        code_term=enc.code_term,
        code_rule=enc.code_rule,
        term_code=enc.term_code,
    )
    n = 0
    for _ in _solutions(scratch, budget=cap):
        n += 1
    return n


def assignment_terms(enc: Encoding, sketch: Sketch, model: dict[int, int]) -> dict[int, Term]:
    return {h: enc.code_term[model[h]] for h in enc.hole_order}


def instantiate(sketch: Sketch, model: dict[int, int], enc: Encoding) -> Program:
    """Substitute every hole with its assigned candidate."""
    terms = assignment_terms(enc, sketch, model)
    rules = []
    for rule in sketch.rules:
        connector_subst = {v: terms[h.id] for v, h in rule.connector_holes.items()}

        def subst(t):
            if isinstance(t, HoleTerm):
                return terms[t.hole]
            if isinstance(t, Var) and t.name in connector_subst:
                return connector_subst[t.name]
            return t

        heads = tuple(Atom(a.relation, tuple(subst(t) for t in a.args)) for a in rule.heads)
        body = tuple(Atom(a.relation, tuple(subst(t) for t in a.args)) for a in rule.body)
        body_vars = {t.name for a in body for t in a.args if isinstance(t, Var)}
        for h in heads:
            for t in h.args:
                if isinstance(t, Var) and t.name not in body_vars:
                    raise UnboundHeadVariable(
                        f"instantiation left head variable {t.name} unbound"
                    )
        rules.append(Rule(heads, body))
    return Program(tuple(rules))
