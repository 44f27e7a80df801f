import pytest
from hypothesis import given, settings, strategies as st

from lamdelta.concrete import ParseError, parse, parse_context, parse_formula, show, show_formula
from lamdelta.enumerate import GenSpec, enumerate_terms
from lamdelta.syntax import (
    BOT, App, Atom, Case, Conj, Delta, Disj, Imp, Inj, Lam, Proj, Var, alpha_eq,
)
from lamdelta.typecheck import SystemId

X, Y = Atom("X"), Atom("Y")


def test_parse_lambda():
    assert parse("\\x:X. x") == Lam("x", X, Var("x"))


def test_parse_delta():
    assert parse("delta k:~X. k y") == Delta("k", X, App(Var("k"), Var("y")))


def test_parse_case():
    t = parse("case m of { x:X => p | y:Y => q }")
    assert t == Case(Var("m"), "x", X, Var("p"), "y", Y, Var("q"))


def test_parse_unicode():
    assert parse("λx:X→⊥. Δk:¬X. x (k x)") == parse("\\x:X -> Bot. delta k:~X. x (k x)")


def test_application_is_left_associative():
    assert parse("f a b") == App(App(Var("f"), Var("a")), Var("b"))


def test_prefix_operators_bind_tighter_than_application():
    assert parse("p1 p x") == App(Proj(1, Var("p")), Var("x"))
    assert parse("in2[X \\/ Bot] y") == Inj(2, Disj(X, BOT), Var("y"))


@pytest.mark.parametrize("src, expected", [
    ("X -> Y -> X", Imp(X, Imp(Y, X))),
    ("X /\\ Y \\/ X", Disj(Conj(X, Y), X)),
    ("~X -> Bot", Imp(Imp(X, BOT), BOT)),
    ("~(X /\\ Y)", Imp(Conj(X, Y), BOT)),
])
def test_formula_precedence(src, expected):
    assert parse_formula(src) == expected


def test_formula_printing_round_trip():
    for a in [Imp(Imp(X, Y), X), Conj(Disj(X, Y), X), Imp(Imp(X, BOT), BOT), Imp(X, Imp(Y, BOT))]:
        assert parse_formula(show_formula(a)) == a


def test_shadowing_is_freshened():
    t = parse("\\x:X. \\x:Y. x")
    assert t.var != t.body.var and t.body.body == Var(t.body.var)
    assert parse("\\x:X. x", scope={"x"}).var != "x"


def test_context():
    assert parse_context("x:X, y:Bot") == {"x": X, "y": BOT}
    with pytest.raises(ParseError):
        parse_context("x:X, x:Y")


@pytest.mark.parametrize("src, line, col", [
    ("p1 <a, b", 1, 9),
    ("\\x X. x", 1, 4),
    ("delta k:X. k", 1, 9),
    ("a\n  )", 2, 3),
])
def test_syntax_errors_have_positions(src, line, col):
    with pytest.raises(ParseError) as info:
        parse(src)
    assert (info.value.line, info.value.column) == (line, col)


def test_corpus_round_trip():
    spec = GenSpec(system=SystemId.FULL, size_bound=5)
    for g, t, _ in enumerate_terms(spec):
        assert alpha_eq(parse(show(t), scope=g), t)


names = st.sampled_from(["x", "y", "k"])
formulas = st.sampled_from([X, BOT, Imp(X, BOT), Conj(X, Y), Disj(X, BOT), Imp(Imp(X, Y), Y)])


@settings(max_examples=300, deadline=None)
@given(st.recursive(
    names.map(Var),
    lambda sub: st.one_of(
        st.builds(Lam, names, formulas, sub),
        st.builds(Delta, names, formulas, sub),
        st.builds(App, sub, sub),
        st.builds(Proj, st.sampled_from([1, 2]), sub),
        st.builds(Inj, st.sampled_from([1, 2]), st.just(Disj(X, BOT)), sub),
        st.builds(Case, sub, names, formulas, sub, names, formulas, sub),
    ),
    max_leaves=6,
))
def test_print_parse_round_trip(t):
    assert alpha_eq(parse(show(t)), t)
