import pytest
from hypothesis import given
from hypothesis import strategies as st

from estit.formula import (INDEXED, And, Atom, Box, Diamond, Implies, Knows, Not, ObjOught, Or, ParseError,
                           Schema, Stit, SubjOught, SubstitutionError, UnknownOperatorError, agents, atoms,
                           depth, parse, render, subformulas, substitute)

p, q, r = Atom("p"), Atom("q"), Atom("r")

atom_st = st.sampled_from(["p", "q", "r", "G", "W", "K", "BH", "x_1"]).map(Atom)
agent_st = st.sampled_from(["a", "b", "alpha", "A1"])


def _extend(children):
    unary = st.one_of(children.map(Not), children.map(Box), children.map(Diamond))
    agentive = st.builds(lambda op, a, f: op(a, f), st.sampled_from([Stit, Knows, ObjOught, SubjOught]),
                         agent_st, children)
    binary = st.builds(lambda op, x, y: op(x, y), st.sampled_from([And, Or, Implies]), children, children)
    return st.one_of(unary, agentive, binary)


formulas = st.recursive(atom_st, _extend, max_leaves=12)


@given(formulas)
def test_round_trip(f):
    assert parse(render(f)) == f


@given(formulas)
def test_render_is_fixed_point(f):
    text = render(f)
    assert render(parse(text)) == text


@given(formulas)
def test_sugar_stays_out_of_the_ast(f):
    from estit.formula import Formula
    core = (Atom, Not, And, Box, Stit, Knows, ObjOught, SubjOught)
    for g in subformulas(f):
        assert isinstance(g, Formula) and isinstance(g, core)


@pytest.mark.parametrize("text, expected", [
    ("[] p", Box(p)),
    ("[ ] p", Box(p)),
    ("<> p", Not(Box(Not(p)))),
    ("[a] p", Stit("a", p)),
    ("K[a] p", Knows("a", p)),
    ("O[a] p", ObjOught("a", p)),
    ("Os[a] ~G", SubjOught("a", Not(Atom("G")))),
    ("~p & q", And(Not(p), q)),
    ("p & q | r", Or(And(p, q), r)),
    ("p | q & r", Or(p, And(q, r))),
    ("p -> q -> r", Implies(p, Implies(q, r))),
    ("p | q -> r", Implies(Or(p, q), r)),
    ("[] p & q", And(Box(p), q)),
    ("[] (p & q)", Box(And(p, q))),
    ("p & q & r", And(And(p, q), r)),
    ("K [a] p", Knows("a", p)),
])
def test_parse_examples(text, expected):
    assert parse(text) == expected


@pytest.mark.parametrize("f, text", [
    (Implies(ObjOught("a", Atom("W")), SubjOught("a", Atom("W"))), "O[a] W -> Os[a] W"),
    (And(p, And(q, r)), "p & (q & r)"),
    (Or(p, Or(q, r)), "p | (q | r)"),
    (Implies(Implies(p, q), r), "(p -> q) -> r"),
    # ~x -> y and x | y share one core term; the disjunction wins
    (Implies(Not(p), q), "p | q"),
    (Implies(Box(p), r), "[] p -> r"),
    (Not(And(p, q)), "~(p & q)"),
    (Diamond(Knows("a", Stit("a", Atom("W")))), "<> K[a] [a] W"),
    (Box(Or(p, q)), "[] (p | q)"),
])
def test_render_examples(f, text):
    assert render(f) == text
    assert str(f) == text


def test_ambiguous_sugar_parses_to_one_term():
    assert parse("(p -> q) -> r") == parse("p & ~q | r")


def test_parse_error_offset_and_expected():
    with pytest.raises(ParseError) as err:
        parse("O[a W")
    assert err.value.offset == 4
    assert "]" in err.value.expected


def test_parse_error_offset_is_in_bytes():
    with pytest.raises(ParseError) as err:
        parse("p & é")
    assert err.value.offset == 4
    with pytest.raises(ParseError) as err:
        parse("é")
    assert err.value.offset == 0


@pytest.mark.parametrize("text", ["", "p &", "(p", "p q", "[a p", "~", "p ->", ")"])
def test_parse_rejects(text):
    with pytest.raises(ParseError):
        parse(text)


def test_unknown_operator():
    with pytest.raises(UnknownOperatorError) as err:
        parse("X[a] p")
    assert err.value.offset == 0


def test_helpers():
    f = parse("O[a] (p -> K[b] q) & [] r")
    assert atoms(f) == {"p", "q", "r"}
    assert agents(f) == {"a", "b"}
    assert depth(Atom("p")) == 0
    assert depth(parse("[] [a] p")) == 2
    assert depth(parse("<> p -> q | ~r")) == 3
    assert depth(Not(And(p, q))) == 2
    post = list(subformulas(parse("~p")))
    assert post == [p, Not(p)]


def test_substitute_fixed():
    s = Schema("OAC", "OAC", "K[A] p -> [A] p")
    got = substitute(s, {"p": "q & r"}, {"A": "b"})
    assert got == parse("K[b] (q & r) -> [b] (q & r)")


def test_substitute_formula_objects_and_multiple_vars():
    s = Schema("A1", "A1", "O[A] (p -> q) -> (O[A] p -> O[A] q)", ("p", "q"))
    got = substitute(s, {"p": Atom("x"), "q": Box(Atom("y"))}, {"A": "a"})
    assert render(got) == "O[a] (x -> [] y) -> O[a] x -> O[a] [] y"


def test_substitute_indexed():
    ia = Schema("IA", "IA", "", (), (), family=INDEXED)
    got = substitute(ia, {"p1": "p", "p2": "q"}, {"A1": "a", "A2": "b"}, n=2)
    assert got == parse("<> [a] p & <> [b] q -> <> ([a] p & [b] q)")
    with pytest.raises(SubstitutionError):
        substitute(ia, {"p1": "p", "p2": "q"}, {"A1": "a", "A2": "a"}, n=2)
    with pytest.raises(ValueError):
        ia.expand(None)


def test_substitute_missing_binding():
    s = Schema("OAC", "OAC", "K[A] p -> [A] p")
    with pytest.raises(SubstitutionError):
        substitute(s, {}, {"A": "a"})
    with pytest.raises(SubstitutionError):
        substitute(s, {"p": "q"}, {})
