import pytest

from lamdelta.concrete import parse, parse_context, parse_formula
from lamdelta.demorgan import (
    CommutationFailure, commute_rho4, dm_context, dm_formula, dm_path,
    dm_term, simulate_sequence, simulate_step,
)
from lamdelta.rewrite import (
    RuleId as R, Trace, check_trace, normalize, redexes, reduction_graph,
    replay, step, system,
)
from lamdelta.syntax import (
    Atom, App, Conj, Lam, Pair, Proj, Var, alpha_eq, neg, subterm,
)
from lamdelta.typecheck import SystemId, in_system, infer

X, Y = Atom("X"), Atom("Y")
F = lambda s: parse_formula(s)  # noqa: E731


def T(src, ctx=""):
    g = parse_context(ctx)
    return g, parse(src, scope=g)


def first(g, t, rule):
    pos = next(p for p, r in redexes(g, t, system(SystemId.FULL)) if r is rule)
    return step(g, t, pos, rule)


@pytest.mark.parametrize("src, expected", [
    ("X", "X"),
    ("X \\/ Bot", "~(~X /\\ ~Bot)"),
    ("(X \\/ Y) -> X", "~(~X /\\ ~Y) -> X"),
])
def test_dm_formula(src, expected):
    assert dm_formula(F(src)) == F(expected)


def test_dm_injection():
    g, t = T("in1[X \\/ Y] a", "a:X")
    out = dm_term(g, t)
    w = out.var
    assert alpha_eq(out, Lam(w, Conj(neg(X), neg(Y)), App(Proj(1, Var(w)), Var("a"))))


def test_dm_case_at_bottom():
    g, t = T("case m of { u:X => p | v:Y => q }", "m:X \\/ Y, p:Bot, q:Bot")
    out = dm_term(g, t)
    assert out == App(Var("m"), Pair(Lam("u", X, Var("p")), Lam("v", Y, Var("q"))))


def test_dm_case_otherwise():
    g, t = T("case m of { u:X => a | v:Y => a }", "m:X \\/ Y, a:X")
    out = dm_term(g, t)
    k = out.var
    assert out.annot == X
    assert out.body == App(Var("m"), Pair(
        Lam("u", X, App(Var(k), Var("a"))), Lam("v", Y, App(Var(k), Var("a")))))


def test_dm_variable():
    g, t = T("x", "x:X")
    assert dm_term(g, t) == Var("x")


def test_dm_soundness_and_discipline():
    g, t = T("\\s:X \\/ Bot. case s of { u:X => f u | v:Bot => v }", "f:~X")
    out = dm_term(g, t)
    assert infer(dm_context(g), out) == dm_formula(infer(g, t))
    assert in_system(out, SystemId.DISJFREE)


def test_dm_path_tracks_redexes():
    g, t = T("case (in1[X \\/ Bot] ((\\u:X. u) x)) of { a:X => f a | b:Bot => b }", "x:X, f:~X")
    image = dm_term(g, t)
    for pos, rule in redexes(g, t, system(SystemId.FULL)):
        if rule is R.BETA_IMP:
            q = dm_path(g, t, pos)
            assert (q, R.BETA_IMP) in redexes(dm_context(g), image, {R.BETA_IMP})


# -- step simulation

def test_beta_imp_is_one_step():
    g, t = T("(\\u:X. f u) x", "x:X, f:~X")
    res = simulate_step(g, first(g, t, R.BETA_IMP))
    assert res.item == 1 and [s.rule for s in res.target.steps] == [R.BETA_IMP]
    assert not res.residual.steps


def test_beta_disj_non_bottom():
    g, t = T("case (in1[X \\/ Bot] x) of { u:X => u | v:Bot => delta k:~X. v }", "x:X")
    st = first(g, t, R.BETA_DISJ)
    res = simulate_step(g, st)
    assert res.item == 3
    assert [s.rule for s in res.target.steps] == [R.BETA_IMP, R.BETA_CONJ, R.BETA_IMP, R.RHO2]
    assert alpha_eq(res.end, dm_term(g, st.after))


def test_beta_disj_bottom():
    g, t = T("case (in2[X \\/ Bot] y) of { u:X => f u | v:Bot => v }", "y:Bot, f:~X")
    res = simulate_step(g, first(g, t, R.BETA_DISJ))
    assert [s.rule for s in res.target.steps] == [R.BETA_IMP, R.BETA_CONJ, R.BETA_IMP]


def test_pi_imp_is_three_steps():
    g, t = T("(case s of { u:X => h | v:Bot => h }) x", "s:X \\/ Bot, h:X -> X, x:X")
    res = simulate_step(g, first(g, t, R.PI_IMP))
    assert res.item == 3
    assert [s.rule for s in res.target.steps] == [R.RHO1_IMP, R.BETA_IMP, R.BETA_IMP]


def test_pi_imp_at_bottom_uses_rho1bot():
    g, t = T("(case s of { u:X => f | v:Bot => f }) x", "s:X \\/ Bot, f:~X, x:X")
    res = simulate_step(g, first(g, t, R.PI_IMP))
    assert [s.rule for s in res.target.steps] == [R.RHO1BOT_IMP, R.BETA_IMP, R.BETA_IMP]


def test_rho1bot_disj_single_step():
    g, t = T("case (delta k:~(X \\/ Bot). y) of { u:X => f u | v:Bot => v }", "y:Bot, f:~X")
    res = simulate_step(g, first(g, t, R.RHO1BOT_DISJ))
    assert res.item == 2 and [s.rule for s in res.target.steps] == [R.RHO1BOT_IMP]


def test_rho1_disj_residual_counts_occurrences():
    # one rho4 residual step per occurrence of k in the delta body
    body = "k (in1[X \\/ Bot] x)"
    for occurrences, src in [(0, "y"), (1, body), (2, f"k (in1[X \\/ Bot] (delta j:~X. {body}))")]:
        g, t = T(f"case (delta k:~(X \\/ Bot). {src}) of {{ u:X => u | v:Bot => delta i:~X. v }}", "x:X, y:Bot")
        res = simulate_step(g, first(g, t, R.RHO1_DISJ))
        assert res.item == 4 and [s.rule for s in res.target.steps] == [R.RHO1BOT_IMP]
        assert len(res.residual) == occurrences
        assert all(s.rule is R.RHO4 for s in res.residual.steps)


def test_rho1_disj_at_bottom_is_a_rho1_imp_step():
    g, t = T("case (delta k:~(X \\/ Bot). k (in2[X \\/ Bot] y)) of { u:X => f u | v:Bot => v }", "y:Bot, f:~X")
    st = next(step(g, t, p, r) for p, r in redexes(g, t, {R.RHO1_DISJ}))
    res = simulate_step(g, st)
    assert [s.rule for s in res.target.steps] == [R.RHO1_IMP] and not res.residual.steps


def test_pi_disj_needs_three_steps():
    g, t = T(
        "case (case s of { a:X => in1[X \\/ Bot] a | b:Bot => in2[X \\/ Bot] b }) of { u:X => u | v:Bot => delta i:~X. v }",
        "s:X \\/ Bot",
    )
    res = simulate_step(g, first(g, t, R.PI_DISJ))
    assert res.item == 4
    assert [s.rule for s in res.target.steps] == [R.RHO1BOT_IMP, R.BETA_IMP, R.BETA_IMP]
    assert len(res.residual) == 2


def test_simulation_replays():
    g, t = T("case (in1[X \\/ Bot] x) of { u:X => u | v:Bot => delta k:~X. v }", "x:X")
    res = simulate_step(g, first(g, t, R.BETA_DISJ))
    assert check_trace(dm_context(g), res.target)


# -- commutation

def test_commute_disjoint():
    g, t = T("<h (delta k:~Bot. k y), (\\u:X. u) x>", "h:~Bot, y:Bot, x:X")
    s4 = step(g, t, (0,), R.RHO4)
    sb = step(g, t, (1,), R.BETA_IMP)
    moved, closing = commute_rho4(g, t, s4, sb)
    assert len(moved) == 1 and len(closing) == 1
    assert alpha_eq(moved.end, closing.end)


def test_commute_erasure_case():
    g, t = T("h (delta k:~Bot. k y)", "h:~Bot, y:Bot")
    s4 = step(g, t, (), R.RHO4)
    s2 = step(g, t, (1,), R.RHO2)
    moved, closing = commute_rho4(g, t, s4, s2)
    assert not moved.steps and not closing.steps
    assert alpha_eq(s4.after, s2.after)


def test_commute_duplicated_residual():
    g, t = T("(\\u:Bot. <u, u>) (h (delta k:~Bot. k y))", "h:~Bot, y:Bot")
    s4 = step(g, t, (1,), R.RHO4)
    sb = step(g, t, (), R.BETA_IMP)
    moved, closing = commute_rho4(g, t, s4, sb)
    assert len(moved) == 1 and len(closing) == 2


def test_commute_fails_when_head_is_the_delta_variable():
    g, t = T("(delta k:~~X. k (delta j:~~X. y)) x", "x:X, y:Bot")
    s4 = step(g, t, (0, 0), R.RHO4)
    s1 = step(g, t, (), R.RHO1_IMP)
    with pytest.raises(CommutationFailure):
        commute_rho4(g, t, s4, s1)


# -- sequences

def test_empty_sequence():
    g, t = T("x", "x:X")
    cert = simulate_sequence(g, Trace(t))
    assert cert.ok and not cert.target.steps and not cert.rho4.steps


def test_single_beta_disj_sequence():
    g, t = T("case (in1[X \\/ Bot] x) of { u:X => u | v:Bot => delta k:~X. v }", "x:X")
    cert = simulate_sequence(g, normalize(g, t, system(SystemId.FULL)))
    assert cert.ok and len(cert.target) == 4 and not cert.rho4.steps


def test_rho1_disj_then_rho2():
    g, t = T(
        "case (delta k:~(X \\/ Bot). delta j:~Bot. j y) of { u:X => u | v:Bot => delta i:~X. v }",
        "y:Bot",
    )
    s = replay(g, t, [(R.RHO1_DISJ, ())])
    inner = [(p, r) for p, r in redexes(g, s.end, system(SystemId.FULL)) if r is R.RHO2]
    s = replay(g, t, [(R.RHO1_DISJ, ()), (R.RHO2, inner[0][0])])
    cert = simulate_sequence(g, s)
    assert cert.ok and cert.m == 1 and len(cert.target) >= 1
    graph = reduction_graph(dm_context(g), dm_term(g, t), system(SystemId.DISJFREE))
    assert all(any(alpha_eq(st.after, n) for n in graph.nodes) for st in cert.target.steps)


def test_certificate_bound_on_normalization():
    g, t = T("p1 <(\\u:X. u) x, case s of { a:X => a | b:Bot => delta k:~X. b }>", "x:X, s:X \\/ Bot")
    s = normalize(g, t, system(SystemId.FULL))
    cert = simulate_sequence(g, s)
    assert cert.ok and len(cert.target) >= len(s) - cert.m
    assert subterm(cert.target.end, ()) is not None
