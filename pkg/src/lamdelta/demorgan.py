"""De Morgan translation into the disjunction-free system and the
simulation of reduction steps and sequences along it."""

from __future__ import annotations

from dataclasses import dataclass

from .rewrite import RuleId, Step, Trace, bridge, check_trace, step, system
from .syntax import (
    BOT, App, Atom, Bottom, Case, Conj, Delta, Disj, Imp, Inj, Lam, Pair,
    Proj, Var, alpha_eq, binders_at, children, free_vars, fresh, neg, subterm,
)
from .typecheck import (
    Context, SystemId, TypeCheckError, context_at, extend, infer,
)

R = RuleId
RHO4_ONLY = frozenset({R.RHO4})


class SimulationError(Exception):
    """A claimed simulation did not replay."""


class CommutationFailure(SimulationError):
    """A (rho4, R) peak the commutation construction cannot close."""


# ---------------------------------------------------------------------------
# Formulas and terms


def dm_formula(a):
    if isinstance(a, (Atom, Bottom)):
        return a
    if isinstance(a, Disj):
        return neg(Conj(neg(dm_formula(a.left)), neg(dm_formula(a.right))))
    return type(a)(dm_formula(a.left), dm_formula(a.right))


def dm_context(gamma: Context) -> dict:
    return {x: dm_formula(a) for x, a in gamma.items()}


def dm_term(gamma: Context, m):
    """Translate a well-typed term; raises ``TypeCheckError`` otherwise."""
    infer(gamma, m)
    return _dm(dict(gamma), m)[0]


def _dm(g: dict, t):
    """Returns ``(translation, source type)``."""
    if isinstance(t, Var):
        return t, g[t.name]
    if isinstance(t, Lam):
        body, b = _dm(extend(g, t.var, t.annot), t.body)
        return Lam(t.var, dm_formula(t.annot), body), Imp(t.annot, b)
    if isinstance(t, App):
        f, ft = _dm(g, t.fun)
        a, _ = _dm(g, t.arg)
        return App(f, a), ft.right
    if isinstance(t, Pair):
        a, at = _dm(g, t.fst)
        b, bt = _dm(g, t.snd)
        return Pair(a, b), Conj(at, bt)
    if isinstance(t, Proj):
        a, at = _dm(g, t.arg)
        return Proj(t.index, a), (at.left if t.index == 1 else at.right)
    if isinstance(t, Inj):
        a, _ = _dm(g, t.arg)
        d = t.annot
        w = fresh(free_vars(a) | g.keys(), "w")
        wty = Conj(neg(dm_formula(d.left)), neg(dm_formula(d.right)))
        return Lam(w, wty, App(Proj(t.index, Var(w)), a)), d
    if isinstance(t, Case):
        m, _ = _dm(g, t.scrut)
        p, c = _dm(extend(g, t.x, t.annot_x), t.left)
        q, _ = _dm(extend(g, t.y, t.annot_y), t.right)
        ax, ay = dm_formula(t.annot_x), dm_formula(t.annot_y)
        if c == BOT:
            return App(m, Pair(Lam(t.x, ax, p), Lam(t.y, ay, q))), c
        k = fresh(free_vars(m) | free_vars(p) | free_vars(q) | {t.x, t.y} | g.keys(), "k")
        body = App(m, Pair(Lam(t.x, ax, App(Var(k), p)), Lam(t.y, ay, App(Var(k), q))))
        return Delta(k, dm_formula(c), body), c
    if isinstance(t, Delta):
        body, _ = _dm(extend(g, t.var, neg(t.annot)), t.body)
        return Delta(t.var, dm_formula(t.annot), body), t.annot
    raise TypeCheckError((), f"not a term: {t!r}")


def _case_type(g: dict, t):
    return infer(g, t, strict=False)


def dm_path(gamma: Context, m, pos) -> tuple:
    """Position in the translation of the node at ``pos`` in ``m``."""
    g = dict(gamma)
    out = []
    t = m
    for i in pos:
        if isinstance(t, Inj):
            out += [0, 1]
        elif isinstance(t, Case):
            bot = _case_type(g, t) == BOT
            if i == 0:
                out += [0] if bot else [0, 0]
            else:
                out += ([1, i - 1, 0] if bot else [0, 1, i - 1, 0, 1])
        else:
            out.append(i)
        for name, a in binders_at(t, i):
            g[name] = a
        t = children(t)[i]
    return tuple(out)


# ---------------------------------------------------------------------------
# Step simulation


@dataclass(frozen=True)
class SimStepResult:
    target: Trace         # from the translation of step.before
    residual: Trace       # rho4 steps from the translation of step.after
    item: int

    @property
    def end(self):
        return self.target.end


_ITEM = {
    R.BETA_IMP: 1, R.BETA_CONJ: 1, R.RHO1_IMP: 1, R.RHO1BOT_IMP: 1,
    R.RHO1_CONJ: 1, R.RHO1BOT_CONJ: 1, R.RHO2: 1,
    R.RHO1BOT_DISJ: 2,
    R.BETA_DISJ: 3, R.PI_IMP: 3, R.PI_CONJ: 3,
    R.PI_DISJ: 4, R.RHO1_DISJ: 4,
}


def _script(rule, q, r, c_is_bot: bool):
    """Target moves (rule, position) for a source redex ``r`` whose
    translation sits at ``q``; ``c_is_bot`` tells whether ``r`` has type Bot."""
    if _ITEM[rule] == 1:
        return [(rule, q)]
    if rule is R.RHO1BOT_DISJ:
        return [(R.RHO1BOT_IMP, q)]
    if rule is R.BETA_DISJ:
        if c_is_bot:
            return [(R.BETA_IMP, q), (R.BETA_CONJ, q + (0,)), (R.BETA_IMP, q)]
        return [
            (R.BETA_IMP, q + (0,)), (R.BETA_CONJ, q + (0, 0)),
            (R.BETA_IMP, q + (0,)), (R.RHO2, q),
        ]
    if rule in (R.PI_IMP, R.PI_CONJ):
        if rule is R.PI_IMP:
            rho = R.RHO1BOT_IMP if c_is_bot else R.RHO1_IMP
        else:
            rho = R.RHO1BOT_CONJ if c_is_bot else R.RHO1_CONJ
        # rho1bot leaves no new delta around the case body
        inner = q if c_is_bot else q + (0,)
        return [
            (rho, q),
            (R.BETA_IMP, inner + (1, 0, 0)), (R.BETA_IMP, inner + (1, 1, 0)),
        ]
    if rule is R.PI_DISJ:
        if c_is_bot:
            return [(R.RHO1BOT_IMP, q), (R.BETA_IMP, q + (1, 0, 0)), (R.BETA_IMP, q + (1, 1, 0))]
        return [
            (R.RHO1BOT_IMP, q + (0,)),
            (R.BETA_IMP, q + (0, 1, 0, 0)), (R.BETA_IMP, q + (0, 1, 1, 0)),
        ]
    if rule is R.RHO1_DISJ:
        if c_is_bot:
            return [(R.RHO1_IMP, q)]
        return [(R.RHO1BOT_IMP, q + (0,))]
    raise SimulationError(f"no simulation for rule {rule.value}")


def _run_script(gamma_t, start, moves) -> Trace:
    steps = []
    t = start
    for rule, pos in moves:
        try:
            s = step(gamma_t, t, pos, rule)
        except Exception as exc:
            raise SimulationError(f"scripted {rule.value} at {list(pos)} failed: {exc}") from exc
        steps.append(s)
        t = s.after
    return Trace(start, tuple(steps))


def simulate_step(gamma: Context, st: Step) -> SimStepResult:
    """Translate one full-system step into disjunction-free steps."""
    src_before = dm_term(gamma, st.before)
    src_after = dm_term(gamma, st.after)
    return _simulate(gamma, st, src_before, src_after)


def _simulate(gamma, st, tb, ta) -> SimStepResult:
    g = context_at(gamma, st.before, st.position)
    r = subterm(st.before, st.position)
    c_is_bot = infer(g, r, strict=False) == BOT
    q = dm_path(gamma, st.before, st.position)
    gt = dm_context(gamma)
    target = _run_script(gt, tb, _script(st.rule, q, r, c_is_bot))
    item = _ITEM[st.rule]
    return SimStepResult(target, _residual(gt, ta, target.end, q, item), item)


def _residual(gt, translated_after, end, q, item) -> Trace:
    if alpha_eq(translated_after, end):
        return Trace(translated_after)
    if item in (1, 2, 3):
        raise SimulationError("translated endpoints differ")
    res = bridge(gt, translated_after, end, RHO4_ONLY, within=q)
    if res is None:
        raise SimulationError("no rho4 chain closes the simulation")
    return res


# ---------------------------------------------------------------------------
# Commutation with rho4


def _prefix(p, q) -> bool:
    return len(p) < len(q) and q[:len(p)] == p


def commute_rho4(gamma: Context, u, rho4: Step, other: Step, rules=None):
    """Close the peak ``rho4.after <- u -> other.after``.

    Returns ``(transported, closing)``: ``transported`` runs from
    ``rho4.after`` with ``other``'s rule (zero steps only in the rho2 erasure
    case), ``closing`` is a rho4 chain from ``other.after`` to the same end.
    """
    if rho4.rule is not R.RHO4:
        raise ValueError("first step must be a rho4 step")
    a, b = rho4.position, other.position
    n1, n2 = rho4.after, other.after
    if alpha_eq(n1, n2):
        # both steps reach the same term: the erasure case
        return Trace(n1), Trace(n2)
    if a == b:
        raise CommutationFailure("rho4 and another rule at one position")
    if _prefix(a, b):
        rel = b[len(a):]
        if rel == (1,):
            if other.rule is not R.RHO2:
                raise CommutationFailure(f"{other.rule.value} at the delta of a rho4 redex")
            if not alpha_eq(n1, n2):
                raise CommutationFailure("rho2 erasure case did not coincide")
            return Trace(n1), Trace(n2)
        if rel[:2] != (1, 0):
            raise CommutationFailure("redex inside the head of a rho4 redex")
        moved = a + rel[2:]
        transported = _try_step(gamma, n1, moved, other.rule)
        closing = _try_step(gamma, n2, a, R.RHO4)
    elif _prefix(b, a):
        transported = _try_step(gamma, n1, b, other.rule)
        closing = bridge(gamma, n2, transported.end, RHO4_ONLY, within=b)
        if closing is None:
            raise CommutationFailure(
                f"{other.rule.value} at {list(b)} does not preserve the rho4 redex at {list(a)}"
            )
    else:
        transported = _try_step(gamma, n1, b, other.rule)
        closing = _try_step(gamma, n2, a, R.RHO4)
    if not alpha_eq(transported.end, closing.end):
        raise CommutationFailure("commuted paths do not meet")
    return transported, closing


def _try_step(gamma, t, pos, rule) -> Trace:
    try:
        return Trace(t, (step(gamma, t, pos, rule),))
    except Exception as exc:
        raise CommutationFailure(f"{rule.value} at {list(pos)}: {exc}") from exc


def transport(gamma: Context, trace: Trace, chain: Trace):
    """Move ``trace`` across the rho4 ``chain`` (both starting at one term).

    Returns ``(trace2, closing)``: ``trace2`` starts at ``chain.end`` and
    ``closing`` is a rho4 chain from ``trace.end`` to ``trace2.end``.
    """
    out = []
    cur_chain = list(chain.steps)
    for st in trace.steps:
        moved, closing = _transport_step(gamma, st, cur_chain)
        out.extend(moved)
        cur_chain = closing
    start = chain.end
    closing_trace = Trace(trace.end, tuple(cur_chain))
    return Trace(start, tuple(out)), closing_trace


def _transport_step(gamma, st: Step, chain: list):
    cur = [st]           # at most one step
    closing: list = []   # rho4 steps from st.after to the end of cur
    for c in chain:
        if not cur:
            closing.append(c)
            continue
        moved, close = commute_rho4(gamma, c.before, c, cur[0])
        closing.extend(close.steps)
        cur = list(moved.steps)
    return cur, closing


# ---------------------------------------------------------------------------
# Sequence simulation


@dataclass(frozen=True)
class SimCertificate:
    source: Trace
    target: Trace
    rho4: Trace
    m: int
    ok: bool
    translated_end: object = None
    systems: tuple = ("full", "disjfree")

    @property
    def bound_holds(self) -> bool:
        return len(self.target) >= len(self.source) - self.m


def simulate_sequence(gamma: Context, s: Trace) -> SimCertificate:
    return tile_sequence(
        gamma, s, dm_term, dm_context(gamma), _simulate,
        system(SystemId.DISJFREE), ("full", "disjfree"),
    )


def tile_sequence(gamma, s: Trace, translate, gamma_t, simulate, target_rules, systems):
    """Shared construction: simulate each step, then tile the later target
    steps across the rho4 residual of the earlier one."""
    terms = [s.start] + [st.after for st in s.steps]
    images = [translate(gamma, t) for t in terms]
    n = len(s.steps)
    tail = Trace(images[n])
    chain = Trace(images[n])
    for i in range(n - 1, -1, -1):
        res = simulate(gamma, s.steps[i], images[i], images[i + 1])
        if res.residual.steps:
            moved, closing = transport(gamma_t, tail, res.residual)
            tail = moved
            chain = chain.then(closing)
        tail = res.target.then(tail)
    m = s.count(R.RHO2)
    ok = _certificate_ok(gamma_t, images[0], images[n], tail, chain, target_rules) and (
        len(tail) >= n - m
    )
    return SimCertificate(s, tail, chain, m, ok, images[n], systems)


def _certificate_ok(gamma_t, start, end, target, chain, target_rules) -> bool:
    if not alpha_eq(target.start, start) or not alpha_eq(chain.start, end):
        return False
    if not alpha_eq(chain.end, target.end):
        return False
    if any(st.rule is not R.RHO4 for st in chain.steps):
        return False
    if any(st.rule not in target_rules for st in target.steps):
        return False
    return check_trace(gamma_t, target) and check_trace(gamma_t, chain)
