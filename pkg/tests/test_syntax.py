import pytest
from hypothesis import given, settings, strategies as st

from lamdelta.syntax import (
    BOT, App, AppHole, Atom, Case, CaseHole, Conj, Delta, Disj, Imp, Inj, Lam,
    Pair, Proj, ProjHole, Var, alpha_eq, fill, free_vars, fresh, neg,
    positions, replace, size, split_elim, subst, subst_ctx, subterm,
)

X, Y = Atom("X"), Atom("Y")


# Independent oracle: de Bruijn conversion and substitution on index terms.

def db(t, env=()):
    if isinstance(t, Var):
        return ("bv", env.index(t.name)) if t.name in env else ("fv", t.name)
    if isinstance(t, Lam):
        return ("lam", t.annot, db(t.body, (t.var,) + env))
    if isinstance(t, Delta):
        return ("delta", t.annot, db(t.body, (t.var,) + env))
    if isinstance(t, App):
        return ("app", db(t.fun, env), db(t.arg, env))
    if isinstance(t, Pair):
        return ("pair", db(t.fst, env), db(t.snd, env))
    if isinstance(t, Proj):
        return ("proj", t.index, db(t.arg, env))
    if isinstance(t, Inj):
        return ("inj", t.index, t.annot, db(t.arg, env))
    return (
        "case", db(t.scrut, env), t.annot_x, db(t.left, (t.x,) + env),
        t.annot_y, db(t.right, (t.y,) + env),
    )


def db_shift(d, by, cutoff=0):
    tag = d[0]
    if tag == "bv":
        return ("bv", d[1] + by) if d[1] >= cutoff else d
    if tag == "fv":
        return d
    if tag in ("lam", "delta"):
        return (tag, d[1], db_shift(d[2], by, cutoff + 1))
    if tag in ("app", "pair"):
        return (tag, db_shift(d[1], by, cutoff), db_shift(d[2], by, cutoff))
    if tag == "proj":
        return (tag, d[1], db_shift(d[2], by, cutoff))
    if tag == "inj":
        return (tag, d[1], d[2], db_shift(d[3], by, cutoff))
    return (tag, db_shift(d[1], by, cutoff), d[2], db_shift(d[3], by, cutoff + 1),
            d[4], db_shift(d[5], by, cutoff + 1))


def db_subst(d, x, q, depth=0):
    tag = d[0]
    if tag == "fv":
        return db_shift(q, depth) if d[1] == x else d
    if tag == "bv":
        return d
    if tag in ("lam", "delta"):
        return (tag, d[1], db_subst(d[2], x, q, depth + 1))
    if tag in ("app", "pair"):
        return (tag, db_subst(d[1], x, q, depth), db_subst(d[2], x, q, depth))
    if tag == "proj":
        return (tag, d[1], db_subst(d[2], x, q, depth))
    if tag == "inj":
        return (tag, d[1], d[2], db_subst(d[3], x, q, depth))
    return (tag, db_subst(d[1], x, q, depth), d[2], db_subst(d[3], x, q, depth + 1),
            d[4], db_subst(d[5], x, q, depth + 1))


NAMES = ["x", "y", "z", "k"]
formulas = st.sampled_from([X, BOT, neg(X), Conj(X, Y), Disj(X, BOT)])


def terms(depth=4):
    leaf = st.sampled_from(NAMES).map(Var)
    return st.recursive(
        leaf,
        lambda sub: st.one_of(
            st.builds(Lam, st.sampled_from(NAMES), formulas, sub),
            st.builds(Delta, st.sampled_from(NAMES), formulas, sub),
            st.builds(App, sub, sub),
            st.builds(Pair, sub, sub),
            st.builds(Proj, st.sampled_from([1, 2]), sub),
            st.builds(Inj, st.sampled_from([1, 2]), st.just(Disj(X, BOT)), sub),
            st.builds(Case, sub, st.sampled_from(NAMES), formulas, sub, st.sampled_from(NAMES), formulas, sub),
        ),
        max_leaves=8,
    )


# -- subst

def test_subst_variable():
    assert subst(Var("x"), "x", Var("y")) == Var("y")


def test_subst_renames_capturing_binder():
    out = subst(Lam("x", X, Var("y")), "y", Var("x"))
    assert out == Lam("x'", X, Var("x"))
    assert alpha_eq(out, Lam("w", X, Var("x")))


def test_subst_leaves_projection_frame():
    e = ProjHole(1)
    assert subst_ctx(e, "x", Var("q")) == e


def test_subst_stops_at_shadowing_binder():
    t = Lam("x", X, Var("x"))
    assert subst(t, "x", Var("y")) == t


def test_subst_case_binders():
    t = Case(Var("m"), "u", X, Var("y"), "v", BOT, Var("v"))
    out = subst(t, "y", Var("u"))
    assert db(out) == db_subst(db(t), "y", db(Var("u")))


@settings(max_examples=400, deadline=None)
@given(terms(), st.sampled_from(NAMES), terms())
def test_subst_matches_de_bruijn_oracle(body, x, q):
    assert db(subst(body, x, q)) == db_subst(db(body), x, db(q))


@settings(max_examples=200, deadline=None)
@given(terms(), st.sampled_from(NAMES))
def test_subst_identity(t, x):
    assert alpha_eq(subst(t, x, Var(x)), t)


@settings(max_examples=200, deadline=None)
@given(terms(), st.sampled_from(NAMES), terms(), terms())
def test_substitution_commutes_with_filling(m, x, q, n):
    for e in (AppHole(n), ProjHole(2), CaseHole("u", X, n, "v", BOT, Var("v"))):
        lhs = subst(fill(e, m), x, q)
        rhs = fill(subst_ctx(e, x, q), subst(m, x, q))
        assert alpha_eq(lhs, rhs)


# -- fill and frames

def test_fill_app():
    assert fill(AppHole(Var("n")), Var("m")) == App(Var("m"), Var("n"))


def test_fill_proj():
    p = Pair(Var("a"), Var("b"))
    assert fill(ProjHole(1), p) == Proj(1, p)


def test_fill_case():
    e = CaseHole("x", X, Var("p"), "y", Y, Var("q"))
    assert fill(e, Var("m")) == Case(Var("m"), "x", X, Var("p"), "y", Y, Var("q"))


@pytest.mark.parametrize("t", [
    App(Var("m"), Var("n")),
    Proj(2, Var("m")),
    Case(Var("m"), "x", X, Var("p"), "y", Y, Var("q")),
])
def test_split_elim_inverts_fill(t):
    e, main = split_elim(t)
    assert main == Var("m") and fill(e, main) == t


# -- alpha

@pytest.mark.parametrize("a, b, expected", [
    (Lam("x", X, Var("x")), Lam("y", X, Var("y")), True),
    (Lam("x", X, Var("x")), Lam("x", BOT, Var("x")), False),
    (Delta("k", X, App(Var("k"), Var("z"))), Delta("j", X, App(Var("j"), Var("z"))), True),
    (Lam("x", X, Var("y")), Lam("y", X, Var("y")), False),
])
def test_alpha_eq(a, b, expected):
    assert alpha_eq(a, b) is expected


@settings(max_examples=200, deadline=None)
@given(terms(), terms())
def test_alpha_eq_agrees_with_oracle(a, b):
    assert alpha_eq(a, b) == (db(a) == db(b))


# -- free variables and fresh names

@pytest.mark.parametrize("t, fv", [
    (Lam("x", X, App(Var("x"), Var("y"))), {"y"}),
    (Delta("k", X, App(Var("k"), Var("x"))), {"x"}),
    (Var("x"), {"x"}),
    (Case(Var("m"), "x", X, Var("x"), "y", Y, Var("x")), {"m", "x"}),
])
def test_free_vars(t, fv):
    assert set(free_vars(t)) == fv


@pytest.mark.parametrize("avoid, hint, out", [
    ({"k"}, "k", "k'"),
    (set(), "z", "z"),
    ({"z", "z'"}, "z", "z''"),
])
def test_fresh(avoid, hint, out):
    assert fresh(avoid, hint) == out


# -- positions

def test_positions_are_preorder_and_valid():
    t = App(Lam("x", X, Var("x")), Pair(Var("a"), Var("b")))
    ps = list(positions(t))
    assert ps == [(), (0,), (0, 0), (1,), (1, 0), (1, 1)]
    assert len(ps) == size(t)
    assert subterm(t, (1, 1)) == Var("b")
    assert replace(t, (1, 1), Var("c")) == App(Lam("x", X, Var("x")), Pair(Var("a"), Var("c")))


def test_formula_sugar():
    assert neg(X) == Imp(X, BOT)
