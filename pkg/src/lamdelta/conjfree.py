"""Conjunction elimination into the small system, its step and sequence
simulation, expansion of rho1bot via rho3, and rho3/kappa postponement."""

from __future__ import annotations

from dataclasses import dataclass

from .demorgan import (
    SimCertificate, SimStepResult, SimulationError, _residual, _run_script,
    tile_sequence,
)
from .rewrite import (
    RHO1_OF_BOT, RHO1BOT_RULES, RuleId, Step, Trace, bridge, is_redex, step,
    system,
)
from .syntax import (
    BOT, App, Atom, Bottom, Conj, Delta, Disj, Imp, Inj, Lam, Pair, Proj,
    Var, Case, alpha_eq, binders_at, children, free_vars, fresh, neg,
    occurrences, split_elim, subterm,
)
from .typecheck import Context, SystemId, TypeCheckError, context_at, extend, infer

R = RuleId

SMALL_PLUS_RHO1BOT = system(SystemId.SMALL) | {R.RHO1BOT_IMP}
SMALL_PLUS_RHO3 = system(SystemId.SMALL) | {R.RHO3}


class DisjPresent(ValueError):
    pass


class CannotPostpone(SimulationError):
    pass


class NotChained(ValueError):
    pass


# ---------------------------------------------------------------------------
# The map


def cf_formula(a):
    if isinstance(a, (Atom, Bottom)):
        return a
    if isinstance(a, Disj):
        raise DisjPresent("disjunction in a conjunction-elimination input")
    if isinstance(a, Conj):
        return neg(Imp(cf_formula(a.left), neg(cf_formula(a.right))))
    return Imp(cf_formula(a.left), cf_formula(a.right))


def cf_context(gamma: Context) -> dict:
    return {x: cf_formula(a) for x, a in gamma.items()}


def cf_term(gamma: Context, m):
    infer(gamma, m)
    cf_context(gamma)
    return _cf(dict(gamma), m)[0]


def _cf(g: dict, t):
    if isinstance(t, Var):
        return t, g[t.name]
    if isinstance(t, Lam):
        body, b = _cf(extend(g, t.var, t.annot), t.body)
        return Lam(t.var, cf_formula(t.annot), body), Imp(t.annot, b)
    if isinstance(t, App):
        f, ft = _cf(g, t.fun)
        a, _ = _cf(g, t.arg)
        return App(f, a), ft.right
    if isinstance(t, Delta):
        body, _ = _cf(extend(g, t.var, neg(t.annot)), t.body)
        return Delta(t.var, cf_formula(t.annot), body), t.annot
    if isinstance(t, Pair):
        a, at = _cf(g, t.fst)
        b, bt = _cf(g, t.snd)
        f = fresh(free_vars(a) | free_vars(b) | g.keys(), "f")
        fty = Imp(cf_formula(at), neg(cf_formula(bt)))
        return Lam(f, fty, App(App(Var(f), a), b)), Conj(at, bt)
    if isinstance(t, Proj):
        m, mt = _cf(g, t.arg)
        a1, a2 = cf_formula(mt.left), cf_formula(mt.right)
        ai = mt.left if t.index == 1 else mt.right
        if ai == BOT:
            x1 = fresh(g.keys(), "x1")
            x2 = fresh(g.keys() | {x1}, "x2")
            sel = Lam(x1, a1, Lam(x2, a2, Var(x1 if t.index == 1 else x2)))
            return App(m, sel), ai
        k = fresh(free_vars(m) | g.keys(), "k")
        x1 = fresh(g.keys() | {k}, "x1")
        x2 = fresh(g.keys() | {k, x1}, "x2")
        xi = x1 if t.index == 1 else x2
        sel = Lam(x1, a1, Lam(x2, a2, App(Var(k), Var(xi))))
        return Delta(k, cf_formula(ai), App(m, sel)), ai
    if isinstance(t, (Inj, Case)):
        raise DisjPresent("disjunction in a conjunction-elimination input")
    raise TypeCheckError((), f"not a term: {t!r}")


def cf_path(gamma: Context, m, pos) -> tuple:
    g = dict(gamma)
    out = []
    t = m
    for i in pos:
        if isinstance(t, Pair):
            out += [0, 0, 1] if i == 0 else [0, 1]
        elif isinstance(t, Proj):
            out += [0] if infer(g, t, strict=False) == BOT else [0, 0]
        else:
            out.append(i)
        for name, a in binders_at(t, i):
            g[name] = a
        t = children(t)[i]
    return tuple(out)


# ---------------------------------------------------------------------------
# Step simulation


_CF_ITEM = {
    R.BETA_IMP: 1, R.RHO2: 1, R.RHO1_IMP: 1, R.RHO1BOT_IMP: 1,
    R.BETA_CONJ: 1, R.RHO1BOT_CONJ: 1, R.RHO1_CONJ: 2,
}


def _cf_script(rule, q, c_is_bot: bool):
    if rule in (R.BETA_IMP, R.RHO2, R.RHO1_IMP, R.RHO1BOT_IMP):
        return [(rule, q)]
    if rule is R.BETA_CONJ:
        if c_is_bot:
            return [(R.BETA_IMP, q), (R.BETA_IMP, q + (0,)), (R.BETA_IMP, q)]
        return [
            (R.BETA_IMP, q + (0,)), (R.BETA_IMP, q + (0, 0)),
            (R.BETA_IMP, q + (0,)), (R.RHO2, q),
        ]
    if rule is R.RHO1BOT_CONJ:
        return [(R.RHO1BOT_IMP, q)]
    if rule is R.RHO1_CONJ:
        if c_is_bot:
            return [(R.RHO1_IMP, q)]
        return [(R.RHO1BOT_IMP, q + (0,))]
    raise SimulationError(f"no conjunction-elimination simulation for {rule.value}")


def simulate_step_cf(gamma: Context, st: Step) -> SimStepResult:
    return _simulate_cf(gamma, st, cf_term(gamma, st.before), cf_term(gamma, st.after))


def _simulate_cf(gamma, st, tb, ta) -> SimStepResult:
    g = context_at(gamma, st.before, st.position)
    c_is_bot = infer(g, subterm(st.before, st.position), strict=False) == BOT
    q = cf_path(gamma, st.before, st.position)
    gt = cf_context(gamma)
    target = _run_script(gt, tb, _cf_script(st.rule, q, c_is_bot))
    item = _CF_ITEM[st.rule]
    # item 2 may close by rho4; item 1 must hit the translation exactly
    return SimStepResult(target, _residual(gt, ta, target.end, q, 4 if item == 2 else 1), item)


# ---------------------------------------------------------------------------
# rho1bot as a derived rule


def expand_rho1bot(gamma: Context, st: Step) -> Trace:
    """Replace one rho1bot step by rho1, rho3 and beta steps on the I-redexes."""
    if st.rule not in RHO1BOT_RULES:
        raise ValueError(f"{st.rule.value} is not a rho1bot rule")
    p = st.position
    _, main = split_elim(subterm(st.before, p))
    moves = [(RHO1_OF_BOT[st.rule], p), (R.RHO3, p)]
    for occ in occurrences(main.body, main.var):
        moves.append((R.BETA_IMP, p + occ + (0,)))
    out = _run_script(gamma, st.before, moves)
    if not alpha_eq(out.end, st.after):
        raise SimulationError("expansion of rho1bot missed its endpoint")
    return out


def expand_trace(gamma: Context, trace: Trace) -> Trace:
    steps = []
    for st in trace.steps:
        if st.rule in RHO1BOT_RULES:
            steps.extend(expand_rho1bot(gamma, st).steps)
        else:
            steps.append(st)
    return Trace(trace.start, tuple(steps))


# ---------------------------------------------------------------------------
# Sequences


def simulate_sequence_cf(gamma: Context, s: Trace) -> SimCertificate:
    gt = cf_context(gamma)
    cert = tile_sequence(
        gamma, s, cf_term, gt, _simulate_cf, SMALL_PLUS_RHO1BOT,
        ("disjfree", "small+rho1bot"),
    )
    target = expand_trace(gt, cert.target)
    from .demorgan import _certificate_ok

    ok = _certificate_ok(gt, cert.target.start, cert.translated_end, target, cert.rho4, SMALL_PLUS_RHO3)
    ok = ok and len(target) >= len(s) - cert.m
    return SimCertificate(s, target, cert.rho4, cert.m, ok, cert.translated_end, ("disjfree", "small+rho3"))


# ---------------------------------------------------------------------------
# Postponement


def is_iota_step(gamma: Context, st: Step) -> bool:
    if st.rule is R.IOTA:
        return True
    return st.rule is R.BETA_IMP and is_redex(gamma, st.before, st.position, R.IOTA)


def _prefix(p, q) -> bool:
    return len(p) < len(q) and q[:len(p)] == p


def _lead(gamma, u, pos, rule) -> Step:
    # an iota step may come from a beta_imp redex whose function became I
    if rule is R.IOTA and not is_redex(gamma, u, pos, R.IOTA):
        rule = R.BETA_IMP
    return step(gamma, u, pos, rule)


def _postpone(gamma, first: Step, second: Step, aux: RuleId):
    if first.rule is not aux:
        raise ValueError(f"first step must be {aux.value}")
    if second.rule is aux:
        raise ValueError(f"second step must not be {aux.value}")
    if not alpha_eq(first.after, second.before):
        raise NotChained("steps do not chain")
    u, a, b = first.before, first.position, second.position
    rule = second.rule
    try:
        if a == b or _prefix(a, b):
            r = b[len(a):]
            if aux is R.RHO3:
                body = subterm(u, a).body
                var = subterm(u, a).var
                inner = a + (0,) + r
                sub = subterm(body, r)
                if (
                    rule in (R.BETA_IMP, R.IOTA) and isinstance(sub, App)
                    and r + (0,) in occurrences(body, var)
                ):
                    rule = R.KAPPA
            else:
                inner = a + (1,) + r
            leading = _lead(gamma, u, inner, rule)
            trailing = Trace(leading.after, (step(gamma, leading.after, a, aux),))
        elif _prefix(b, a):
            leading = _lead(gamma, u, b, rule)
            trailing = bridge(gamma, leading.after, second.after, {aux}, within=b)
            if trailing is None:
                raise CannotPostpone(f"no {aux.value} chain after {rule.value} at {list(b)}")
        else:
            leading = _lead(gamma, u, b, rule)
            trailing = Trace(leading.after, (step(gamma, leading.after, a, aux),))
    except CannotPostpone:
        raise
    except Exception as exc:
        raise CannotPostpone(f"{rule.value} at {list(b)} before {aux.value} at {list(a)}: {exc}") from exc
    if not alpha_eq(trailing.end, second.after):
        raise CannotPostpone("postponed paths do not meet")
    return leading, trailing


def postpone_rho3(gamma: Context, first: Step, second: Step):
    """``u ->rho3 P ->R Q`` becomes ``u ->R' P' ->rho3* Q``."""
    return _postpone(gamma, first, second, R.RHO3)


def postpone_kappa(gamma: Context, first: Step, second: Step):
    """``u ->kappa P ->R Q`` becomes ``u ->R P' ->kappa* Q``."""
    return _postpone(gamma, first, second, R.KAPPA)


@dataclass(frozen=True)
class Purified:
    trace: Trace
    source_length: int
    rho3: int
    iota: int
    kappa_created: int

    @property
    def bound(self) -> int:
        return self.source_length - self.rho3 - self.iota

    @property
    def ok(self) -> bool:
        return len(self.trace) >= self.bound


def _bubble(gamma, steps: list, aux: RuleId, limit: int) -> list:
    fn = postpone_rho3 if aux is R.RHO3 else postpone_kappa
    for _ in range(limit):
        idx = None
        for i in range(len(steps) - 2, -1, -1):
            if steps[i].rule is aux and steps[i + 1].rule is not aux:
                idx = i
                break
        if idx is None:
            while steps and steps[-1].rule is aux:
                steps.pop()
            return steps
        leading, trailing = fn(gamma, steps[idx], steps[idx + 1])
        steps[idx:idx + 2] = [leading, *trailing.steps]
    raise CannotPostpone(f"{aux.value} postponement did not finish in {limit} swaps")


def purify_sequence(gamma: Context, s: Trace, limit: int = 10_000) -> Purified:
    """Remove rho3 (then kappa) steps by postponement and truncation."""
    allowed = system(SystemId.SMALL) | {R.RHO3, R.IOTA, R.KAPPA}
    if any(st.rule not in allowed for st in s.steps):
        raise ValueError("purification expects a small+rho3 trace")
    m = s.count(R.RHO3)
    i = sum(1 for st in s.steps if is_iota_step(gamma, st))
    steps = _bubble(gamma, list(s.steps), R.RHO3, limit)
    created = sum(1 for st in steps if st.rule is R.KAPPA) - s.count(R.KAPPA)
    steps = _bubble(gamma, steps, R.KAPPA, limit)
    steps = [Step(R.BETA_IMP, st.position, st.before, st.after) if st.rule is R.IOTA else st for st in steps]
    return Purified(Trace(s.start, tuple(steps)), len(s), m, i, created)
