"""Non-recursive Datalog: AST, least-model evaluation, renaming, simplification.

Rules may carry several head atoms sharing one body (shorthand for one
rule per head).  Head relations are intensional, body relations
extensional, and no intensional relation may occur in a body, so a
single bottom-up pass computes the least Herbrand model.

A wildcard ``_`` denotes a fresh variable per occurrence.  Constants in
body atoms act as equality filters.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import (
    ArityMismatch,
    NonInjectiveSubstitution,
    ParseError,
    UnboundHeadVariable,
)


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Wildcard:
    def __str__(self):
        return "_"


WILDCARD = Wildcard()


@dataclass(frozen=True)
class Const:
    value: int | str

    def __str__(self):
        if isinstance(self.value, str):
            return '"' + self.value.replace("\\", "\\\\").replace('"', '\\"') + '"'
        return str(self.value)


Term = Var | Wildcard | Const


@dataclass(frozen=True)
class Atom:
    relation: str
    args: tuple[Term, ...]

    def __str__(self):
        return f"{self.relation}({','.join(str(a) for a in self.args)})"


@dataclass(frozen=True)
class Rule:
    heads: tuple[Atom, ...]
    body: tuple[Atom, ...]

    def __str__(self):
        h = ", ".join(str(a) for a in self.heads)
        b = ", ".join(str(a) for a in self.body)
        return f"{h} :- {b}."


@dataclass(frozen=True)
class Program:
    rules: tuple[Rule, ...]

    def __str__(self):
        return print_program(self)


def rule_vars(r: Rule) -> set[str]:
    out = set()
    for atom in r.heads + r.body:
        for t in atom.args:
            if isinstance(t, Var):
                out.add(t.name)
    return out


def program_vars(p: Program) -> set[str]:
    out = set()
    for r in p.rules:
        out |= rule_vars(r)
    return out


def check_well_formed(p: Program) -> None:
    """Every head variable must occur in the body; heads carry no wildcards."""
    intensional = {a.relation for r in p.rules for a in r.heads}
    for r in p.rules:
        body_vars = {t.name for a in r.body for t in a.args if isinstance(t, Var)}
        for h in r.heads:
            for t in h.args:
                if isinstance(t, Wildcard):
                    raise UnboundHeadVariable(f"wildcard in head of {r}")
                if isinstance(t, Var) and t.name not in body_vars:
                    raise UnboundHeadVariable(f"head variable {t.name} not bound in body of {r}")
        for a in r.body:
            if a.relation in intensional:
                raise ArityMismatch(f"program is recursive: {a.relation} occurs in a body")


def evaluate(p: Program, fb: dict) -> dict:
    """Least model of the program over the given extensional facts.

    For each rule, joins the body atoms left to right (hash join on shared
    variables), then emits every head per satisfying assignment.  Missing
    extensional relations are treated as empty.
    """
    check_well_formed(p)
    out: dict = {}
    for rule in p.rules:
        _eval_rule(rule, fb, out)
    return out


def _eval_rule(rule: Rule, fb: dict, out: dict) -> None:
    bindings: list[dict] = [{}]
    bound: set[str] = set()
    for atom in rule.body:
        facts = fb.get(atom.relation, set())
        for f in facts:
            if len(f) != len(atom.args):
                raise ArityMismatch(
                    f"{atom.relation} used with arity {len(atom.args)}, fact has {len(f)}"
                )
        # positions that are already constrained: consts and previously bound vars
        key_positions = [
            i
            for i, t in enumerate(atom.args)
            if isinstance(t, Const) or (isinstance(t, Var) and t.name in bound)
        ]
        index: dict[tuple, list] = {}
        for f in facts:
            if not _self_consistent(atom, f):
                continue
            index.setdefault(tuple(f[i] for i in key_positions), []).append(f)
        new_bindings = []
        for b in bindings:
            key = tuple(
                atom.args[i].value if isinstance(atom.args[i], Const) else b[atom.args[i].name]
                for i in key_positions
            )
            for f in index.get(key, ()):
                nb = dict(b)
                for t, v in zip(atom.args, f):
                    if isinstance(t, Var):
                        nb[t.name] = v
                new_bindings.append(nb)
        bindings = new_bindings
        bound |= {t.name for t in atom.args if isinstance(t, Var)}
        if not bindings:
            break
    for b in bindings:
        for h in rule.heads:
            out.setdefault(h.relation, set()).add(
                tuple(t.value if isinstance(t, Const) else b[t.name] for t in h.args)
            )


def _self_consistent(atom: Atom, fact: tuple) -> bool:
    """Check repeated variables within one atom against a candidate fact."""
    seen: dict[str, object] = {}
    for t, v in zip(atom.args, fact):
        if isinstance(t, Var):
            if t.name in seen and seen[t.name] != v:
                return False
            seen[t.name] = v
    return True


def rename(p: Program, subst: dict[str, str]) -> Program:
    """Apply an injective variable renaming uniformly to heads and bodies."""
    pvars = program_vars(p)
    total = {v: subst.get(v, v) for v in pvars}
    if len(set(total.values())) != len(total):
        raise NonInjectiveSubstitution(f"substitution {subst} is not injective on {sorted(pvars)}")

    def t_sub(t: Term) -> Term:
        return Var(total[t.name]) if isinstance(t, Var) else t

    def a_sub(a: Atom) -> Atom:
        return Atom(a.relation, tuple(t_sub(t) for t in a.args))

    return Program(
        tuple(Rule(tuple(a_sub(a) for a in r.heads), tuple(a_sub(a) for a in r.body)) for r in p.rules)
    )


def _occurrences(rule: Rule) -> dict[str, int]:
    counts: dict[str, int] = {}
    for atom in rule.heads + rule.body:
        for t in atom.args:
            if isinstance(t, Var):
                counts[t.name] = counts.get(t.name, 0) + 1
    return counts


def _droppable_dangling(atom: Atom, counts: dict[str, int]) -> bool:
    # every argument is a wildcard or a variable occurring nowhere else,
    # and the atom carries no constant filter
    for t in atom.args:
        if isinstance(t, Const):
            return False
        if isinstance(t, Var) and counts[t.name] != 1:
            return False
    return True


def _subsumed_by(atom: Atom, other: Atom, counts: dict[str, int]) -> bool:
    # `atom` adds nothing if some other atom of the same relation matches it
    # position by position, up to atom-local free variables/wildcards
    if other.relation != atom.relation or len(other.args) != len(atom.args):
        return False
    for t, u in zip(atom.args, other.args):
        if t == u:
            continue
        if isinstance(t, Wildcard):
            continue
        if isinstance(t, Var) and counts[t.name] == 1:
            continue
        return False
    return True


def simplify(p: Program) -> Program:
    """Drop body atoms that cannot constrain the result.

    Two reductions run to a fixpoint: (1) remove an atom whose variables all
    occur exactly once in the whole rule (a dangling cartesian factor), and
    (2) remove an atom that another atom of the same relation subsumes
    position-wise.  (1) changes the result when the dropped relation is
    empty, so callers re-verify against their example; (2) is always
    semantics-preserving.
    """
    new_rules = []
    for rule in p.rules:
        body = list(rule.body)
        changed = True
        while changed and len(body) > 1:
            changed = False
            counts = _occurrences(Rule(rule.heads, tuple(body)))
            for i, atom in enumerate(body):
                rest = body[:i] + body[i + 1 :]
                if _droppable_dangling(atom, counts) or any(
                    _subsumed_by(atom, o, counts) for o in rest
                ):
                    del body[i]
                    changed = True
                    break
        new_rules.append(Rule(rule.heads, tuple(body)))
    return Program(tuple(new_rules))


def alpha_canonical(p: Program) -> Program:
    """Rename variables to a canonical sequence by first occurrence."""
    mapping: dict[str, str] = {}

    def canon_term(t: Term) -> Term:
        if isinstance(t, Var):
            if t.name not in mapping:
                mapping[t.name] = f"V{len(mapping)}"
            return Var(mapping[t.name])
        return t

    rules = []
    for r in p.rules:
        heads = tuple(Atom(a.relation, tuple(canon_term(t) for t in a.args)) for a in r.heads)
        body = tuple(Atom(a.relation, tuple(canon_term(t) for t in a.args)) for a in r.body)
        rules.append(Rule(heads, body))
    return Program(tuple(rules))


def alpha_equivalent(p1: Program, p2: Program) -> bool:
    """Syntactic equality up to injective variable renaming."""
    return alpha_canonical(p1) == alpha_canonical(p2)


def print_program(p: Program) -> str:
    return "\n".join(str(r) for r in p.rules) + "\n"


_TOKEN_RE = re.compile(
    r"""\s*(?:
        (?P<str>"(?:\\.|[^"\\])*")
      | (?P<int>-?\d+)
      | (?P<name>[A-Za-z_][A-Za-z0-9_']*)
      | (?P<punct>:-|[(),.])
    )""",
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            if text[pos:].strip() == "":
                break
            raise ParseError(f"unexpected character {text[pos]!r} at offset {pos}")
        pos = m.end()
        for kind in ("str", "int", "name", "punct"):
            if m.group(kind) is not None:
                tokens.append((kind, m.group(kind)))
                break
    return tokens


class _Parser:
    def __init__(self, tokens: list[tuple[str, str]]):
        self.tokens = tokens
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self, kind=None, value=None):
        k, v = self.peek()
        if k is None:
            raise ParseError("unexpected end of input")
        if kind is not None and k != kind or value is not None and v != value:
            raise ParseError(f"expected {value or kind}, got {v!r}")
        self.i += 1
        return v

    def term(self) -> Term:
        k, v = self.peek()
        if k == "str":
            self.take()
            return Const(v[1:-1].replace('\\"', '"').replace("\\\\", "\\"))
        if k == "int":
            self.take()
            return Const(int(v))
        if k == "name":
            self.take()
            return WILDCARD if v == "_" else Var(v)
        raise ParseError(f"expected a term, got {v!r}")

    def atom(self) -> Atom:
        rel = self.take("name")
        if rel == "_":
            raise ParseError("relation name expected")
        self.take("punct", "(")
        args = [self.term()]
        while self.peek() == ("punct", ","):
            self.take()
            args.append(self.term())
        self.take("punct", ")")
        return Atom(rel, tuple(args))

    def rule(self) -> Rule:
        heads = [self.atom()]
        while self.peek() == ("punct", ","):
            self.take()
            heads.append(self.atom())
        self.take("punct", ":-")
        body = [self.atom()]
        while self.peek() == ("punct", ","):
            self.take()
            body.append(self.atom())
        self.take("punct", ".")
        return Rule(tuple(heads), tuple(body))


def parse_program(text: str) -> Program:
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty program")
    parser = _Parser(tokens)
    rules = []
    while parser.peek()[0] is not None:
        rules.append(parser.rule())
    return Program(tuple(rules))
