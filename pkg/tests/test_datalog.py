import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dlsynth.datalog import (
    WILDCARD,
    Atom,
    Const,
    Program,
    Rule,
    Var,
    alpha_equivalent,
    evaluate,
    parse_program,
    print_program,
    rename,
    simplify,
)
from dlsynth.errors import NonInjectiveSubstitution, ParseError, UnboundHeadVariable
from dlsynth.instance import instance_to_facts

from conftest import UNIV_INPUT, UNIV_OUTPUT

FINAL_RULE_TEXT = "Admission(grad,ug,num) :- Univ(id1,grad,v1), Admit(v1,id2,num), Univ(id2,ug,_).\n"


@pytest.fixture
def univ_facts(univ_source):
    return instance_to_facts(univ_source, UNIV_INPUT)


def test_final_program_reproduces_expected_output(univ_facts):
    p = parse_program(FINAL_RULE_TEXT)
    out = evaluate(p, univ_facts)
    assert out["Admission"] == {
        ("U1", "U1", 10),
        ("U1", "U2", 50),
        ("U2", "U2", 20),
        ("U2", "U1", 40),
    }


def test_incorrect_candidate_gives_truncated_output(univ_facts):
    # the completion that joins an admission's uid back to its own parent
    p = parse_program(
        "Admission(grad,ug,num) :- Univ(id1,grad,v1), Admit(v1,id1,num), Univ(id1,ug,_), Univ(id2,name1,_).\n"
    )
    out = evaluate(p, univ_facts)
    assert out["Admission"] == {("U1", "U1", 10), ("U2", "U2", 20)}


def test_empty_body_relation_gives_empty_output(univ_facts):
    p = parse_program("Out(x) :- Univ(x,_,_), Missing(x).\n")
    assert evaluate(p, univ_facts) == {}


def test_constants_filter(univ_facts):
    p = parse_program('Out(i) :- Univ(i,"U1",_).\n')
    assert evaluate(p, univ_facts) == {"Out": {(1,)}}


def test_repeated_variable_in_atom():
    fb = {"R": {(1, 1), (1, 2)}}
    p = parse_program("Out(x) :- R(x,x).\n")
    assert evaluate(p, fb) == {"Out": {(1,)}}


def test_multi_head_rule_shares_body():
    fb = {"R": {(1, 2)}}
    p = parse_program("A(x), B(x,y) :- R(x,y).\n")
    out = evaluate(p, fb)
    assert out == {"A": {(1,)}, "B": {(1, 2)}}


def test_unbound_head_variable_rejected():
    p = Program((Rule((Atom("H", (Var("x"),)),), (Atom("R", (Var("y"),)),)),))
    with pytest.raises(UnboundHeadVariable):
        evaluate(p, {"R": {(1,)}})


def test_rename_identity(univ_facts):
    p = parse_program(FINAL_RULE_TEXT)
    assert rename(p, {}) == p


def test_rename_injective_preserves_output(univ_facts):
    p = parse_program(FINAL_RULE_TEXT)
    q = rename(p, {"id1": "idA", "id2": "idB"})
    assert evaluate(p, univ_facts) == evaluate(q, univ_facts)


def test_rename_head_variable_consistently(univ_facts):
    p = parse_program(FINAL_RULE_TEXT)
    q = rename(p, {"grad": "g"})
    assert evaluate(p, univ_facts) == evaluate(q, univ_facts)


def test_rename_non_injective_rejected():
    p = parse_program(FINAL_RULE_TEXT)
    with pytest.raises(NonInjectiveSubstitution):
        rename(p, {"id1": "id2"})


def test_simplify_drops_dangling_atom():
    p = parse_program(
        "Admission(grad,ug,num) :- Univ(id1,grad,v1), Admit(v1,id2,num), Univ(id2,ug,_), Univ(id3,name1,_).\n"
    )
    assert print_program(simplify(p)) == FINAL_RULE_TEXT


def test_simplify_keeps_atoms_sharing_head_vars():
    p = parse_program("H(a,b) :- R(a,x), S(x,b).\n")
    assert simplify(p) == p


def test_simplify_keeps_chain_with_shared_var():
    # b occurs twice so S is retained even though c is dangling
    p = parse_program("H(a) :- R(a,b), S(b,c).\n")
    assert simplify(p) == p


def test_simplify_drops_subsumed_duplicate():
    p = parse_program("H(a,b) :- R(a,b,v), T(v,b), R(a,b,_).\n")
    q = simplify(p)
    assert print_program(q) == "H(a,b) :- R(a,b,v), T(v,b).\n"


def test_simplify_never_drops_constant_filters():
    p = parse_program('H(a) :- R(a), S(7), T("x",z).\n')
    q = simplify(p)
    assert print_program(q) == 'H(a) :- R(a), S(7), T("x",z).\n'


def test_simplify_preserves_output_on_example(univ_facts):
    p = parse_program(
        "Admission(grad,ug,num) :- Univ(id1,grad,v1), Admit(v1,id2,num), Univ(id2,ug,_), Univ(id3,name1,_).\n"
    )
    assert evaluate(simplify(p), univ_facts) == evaluate(p, univ_facts)


def test_print_final_rule():
    p = Program(
        (
            Rule(
                (Atom("Admission", (Var("grad"), Var("ug"), Var("num"))),),
                (
                    Atom("Univ", (Var("id1"), Var("grad"), Var("v1"))),
                    Atom("Admit", (Var("v1"), Var("id2"), Var("num"))),
                    Atom("Univ", (Var("id2"), Var("ug"), WILDCARD)),
                ),
            ),
        )
    )
    assert print_program(p) == FINAL_RULE_TEXT


def test_parse_empty_program_rejected():
    with pytest.raises(ParseError):
        parse_program("")
    with pytest.raises(ParseError):
        parse_program("   \n ")


def test_parse_string_escapes():
    p = parse_program('H(x) :- R(x,"a\\"b").\n')
    assert p.rules[0].body[0].args[1] == Const('a"b')
    assert parse_program(print_program(p)) == p


def test_alpha_equivalence():
    p = parse_program("W(x,y) :- E(x,z), D(z,y).\n")
    q = parse_program("W(a,b) :- E(a,c), D(c,b).\n")
    r = parse_program("W(a,b) :- E(a,c), D(d,b).\n")
    assert alpha_equivalent(p, q)
    assert not alpha_equivalent(p, r)


# --- random generators used for the renaming/projection property suites ---

RELATIONS = [("R", 2), ("S", 2), ("T", 3), ("U", 1), ("V", 2)]
VALUE_POOL = [1, 2, 3, "a", "b"]


def random_fact_base(rng: random.Random, max_facts: int = 20):
    fb = {}
    n = rng.randint(0, max_facts)
    for _ in range(n):
        rel, arity = rng.choice(RELATIONS)
        fb.setdefault(rel, set()).add(tuple(rng.choice(VALUE_POOL) for _ in range(arity)))
    return fb


def random_rule(rng: random.Random, head_rel="H"):
    body = []
    var_pool = [f"x{i}" for i in range(6)]
    for _ in range(rng.randint(1, 3)):
        rel, arity = rng.choice(RELATIONS)
        args = tuple(
            Var(rng.choice(var_pool)) if rng.random() < 0.8 else Const(rng.choice(VALUE_POOL))
            for _ in range(arity)
        )
        body.append(Atom(rel, args))
    body_vars = sorted({t.name for a in body for t in a.args if isinstance(t, Var)})
    if not body_vars:
        body.append(Atom("R", (Var("x0"), Var("x1"))))
        body_vars = ["x0", "x1"]
    k = rng.randint(1, min(3, len(body_vars)))
    head_vars = rng.sample(body_vars, k)
    return Rule((Atom(head_rel, tuple(Var(v) for v in head_vars)),), tuple(body))


def random_program(rng: random.Random):
    return Program(tuple(random_rule(rng, f"H{i}") for i in range(rng.randint(1, 2))))


def random_injective_renaming(rng: random.Random, p: Program):
    from dlsynth.datalog import program_vars

    pvars = sorted(program_vars(p))
    fresh = [f"y{i}" for i in range(len(pvars))]
    rng.shuffle(fresh)
    chosen = {v: fresh[i] for i, v in enumerate(pvars) if rng.random() < 0.7}
    return chosen


@given(st.integers(min_value=0, max_value=10_000))
@settings(max_examples=50, deadline=None)
def test_renaming_invariance_property(seed):
    rng = random.Random(seed)
    p = random_program(rng)
    fb = random_fact_base(rng)
    subst = random_injective_renaming(rng, p)
    assert evaluate(p, fb) == evaluate(rename(p, subst), fb)


@given(st.integers(min_value=0, max_value=10_000))
@settings(max_examples=50, deadline=None)
def test_evaluation_monotone_in_facts(seed):
    rng = random.Random(seed)
    p = random_program(rng)
    fb = random_fact_base(rng)
    bigger = {rel: set(fs) for rel, fs in fb.items()}
    extra = random_fact_base(rng, max_facts=5)
    for rel, fs in extra.items():
        bigger.setdefault(rel, set()).update(fs)
    small_out = evaluate(p, fb)
    big_out = evaluate(p, bigger)
    for rel, fs in small_out.items():
        assert fs <= big_out.get(rel, set())


@given(st.integers(min_value=0, max_value=10_000))
@settings(max_examples=50, deadline=None)
def test_print_parse_round_trip(seed):
    rng = random.Random(seed)
    p = random_program(rng)
    assert parse_program(print_program(p)) == p
