import pytest

from lamdelta.concrete import parse, parse_context
from lamdelta.syntax import (
    BOT, App, AppHole, Atom, Case, CaseHole, Conj, Delta, Disj, Imp, Inj, Lam,
    Pair, ProjHole, Var, fill, neg, subst,
)
from lamdelta.typecheck import (
    DuplicateBinding, HoleTypeMismatch, SystemId, TypeCheckError, in_system,
    infer, infer_ctx,
)

X, Y, A, B = Atom("X"), Atom("Y"), Atom("A"), Atom("B")


def test_infer_assumption():
    assert infer({"x": A}, Var("x")) == A


def test_infer_identity():
    assert infer({}, Lam("x", X, Var("x"))) == Imp(X, X)


def test_infer_raa():
    assert infer({"y": BOT}, Delta("k", X, Var("y"))) == X


def test_infer_raa_binder_type():
    t = Delta("k", X, App(Var("k"), Var("x")))
    assert infer({"x": X}, t) == X


def test_raa_body_must_be_bottom():
    with pytest.raises(TypeCheckError):
        infer({"x": X}, Delta("k", X, Var("x")))


def test_second_injection_types_right_disjunct():
    assert infer({"y": BOT}, Inj(2, Disj(X, BOT), Var("y"))) == Disj(X, BOT)
    with pytest.raises(TypeCheckError):
        infer({"x": X}, Inj(2, Disj(X, BOT), Var("x")))


def test_case_branches_agree():
    g = {"m": Disj(X, Y), "c": BOT}
    good = Case(Var("m"), "u", X, Var("c"), "v", Y, Var("c"))
    assert infer(g, good) == BOT
    bad = Case(Var("m"), "u", X, Var("u"), "v", Y, Var("v"))
    with pytest.raises(TypeCheckError):
        infer(g, bad)


def test_error_position_points_at_subterm():
    with pytest.raises(TypeCheckError) as info:
        infer({"x": X}, Lam("z", X, App(Var("x"), Var("z"))))
    assert info.value.position == (0,)
    with pytest.raises(TypeCheckError) as info:
        infer({}, Pair(Var("a"), Var("b")))
    assert info.value.position == (0,)


def test_binder_shadowing_context_is_rejected():
    with pytest.raises(DuplicateBinding):
        infer({"x": X}, Lam("x", X, Var("x")))


def test_infer_ctx_application():
    assert infer_ctx({"n": A}, AppHole(Var("n")), Imp(A, B)) == B


def test_infer_ctx_projection():
    assert infer_ctx({}, ProjHole(1), Conj(A, B)) == A


def test_infer_ctx_case_unbound():
    e = CaseHole("x", X, Var("z"), "y", X, Var("z"))
    with pytest.raises(TypeCheckError):
        infer_ctx({}, e, Disj(X, X))


def test_infer_ctx_hole_mismatch():
    with pytest.raises(HoleTypeMismatch):
        infer_ctx({}, ProjHole(1), X)


@pytest.mark.parametrize("e, m, gamma", [
    (AppHole(Var("x")), Var("f"), {"f": neg(X), "x": X}),
    (ProjHole(2), Var("p"), {"p": Conj(X, BOT)}),
    (CaseHole("u", X, Var("y"), "v", BOT, Var("v")), Var("s"), {"s": Disj(X, BOT), "y": BOT}),
])
def test_cut_rule(e, m, gamma):
    assert infer(gamma, fill(e, m)) == infer_ctx(gamma, e, infer(gamma, m))


@pytest.mark.parametrize("t, s, expected", [
    (Pair(Var("x"), Var("y")), SystemId.SMALL, False),
    (Lam("x", X, Var("x")), SystemId.SMALL, True),
    (Inj(1, Disj(X, BOT), Var("x")), SystemId.DISJFREE, False),
    (Lam("x", Conj(X, X), Var("x")), SystemId.SMALL, False),
    (Lam("x", Conj(X, X), Var("x")), SystemId.DISJFREE, True),
    (Delta("k", Disj(X, BOT), Var("y")), SystemId.DISJFREE, False),
])
def test_in_system(t, s, expected):
    assert in_system(t, s) is expected


def test_weakening():
    t = parse("\\z:X. f z", scope={"f"})
    assert infer({"f": neg(X)}, t) == infer({"f": neg(X), "w": Y}, t)


def test_substitution_typing():
    g = parse_context("f:~X, a:X")
    m = parse("f x", scope={"f", "x"})
    n = Var("a")
    assert infer({**g, "x": X}, m) == infer(g, subst(m, "x", n)) == BOT
