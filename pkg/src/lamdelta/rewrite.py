"""Labelled reduction: redex enumeration, contraction, strategies, graphs."""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from .syntax import (
    BOT, App, Case, Conj, Delta, Disj, Imp, Inj, Lam, Pair, Proj, Var,
    all_vars, alpha_eq, fill, frame_free_vars, free_vars, fresh, nameless,
    neg, replace, split_elim, subst, subterm,
)
from .typecheck import (
    Context, SystemId, TypeCheckError, context_at, extend, infer,
)


class RuleId(enum.Enum):
    BETA_IMP = "beta_imp"
    BETA_CONJ = "beta_conj"
    BETA_DISJ = "beta_disj"
    PI_IMP = "pi_imp"
    PI_CONJ = "pi_conj"
    PI_DISJ = "pi_disj"
    RHO1_IMP = "rho1_imp"
    RHO1_CONJ = "rho1_conj"
    RHO1_DISJ = "rho1_disj"
    RHO1BOT_IMP = "rho1bot_imp"
    RHO1BOT_CONJ = "rho1bot_conj"
    RHO1BOT_DISJ = "rho1bot_disj"
    RHO2 = "rho2"
    RHO3 = "rho3"
    RHO4 = "rho4"
    KAPPA = "kappa"
    IOTA = "iota"

    @property
    def aux(self) -> bool:
        return self in AUX_RULES

    @property
    def label(self) -> str:
        return _LABELS[self]

    @classmethod
    def parse(cls, name: str) -> "RuleId":
        name = name.strip()
        for r in cls:
            if name in (r.value, r.label, r.name):
                return r
        raise ValueError(f"unknown rule {name!r}")


_LABELS = {
    RuleId.BETA_IMP: "β⊃", RuleId.BETA_CONJ: "β∧", RuleId.BETA_DISJ: "β∨",
    RuleId.PI_IMP: "π⊃", RuleId.PI_CONJ: "π∧", RuleId.PI_DISJ: "π∨",
    RuleId.RHO1_IMP: "ρ⊃", RuleId.RHO1_CONJ: "ρ∧", RuleId.RHO1_DISJ: "ρ∨",
    RuleId.RHO1BOT_IMP: "ρ⊃⊥", RuleId.RHO1BOT_CONJ: "ρ∧⊥",
    RuleId.RHO1BOT_DISJ: "ρ∨⊥", RuleId.RHO2: "ρ2", RuleId.RHO3: "ρ3",
    RuleId.RHO4: "ρ4", RuleId.KAPPA: "κ", RuleId.IOTA: "ι",
}

_ORDER = {r: i for i, r in enumerate(RuleId)}

AUX_RULES = frozenset({RuleId.RHO3, RuleId.RHO4, RuleId.KAPPA, RuleId.IOTA})

_FULL = frozenset(RuleId) - AUX_RULES
_DISJ_RULES = frozenset({
    RuleId.BETA_DISJ, RuleId.PI_IMP, RuleId.PI_CONJ, RuleId.PI_DISJ,
    RuleId.RHO1_DISJ, RuleId.RHO1BOT_DISJ,
})
_CONJ_RULES = frozenset({RuleId.BETA_CONJ, RuleId.RHO1_CONJ, RuleId.RHO1BOT_CONJ})


def system(s: SystemId) -> frozenset:
    """Rule set of a system (auxiliary rules never included)."""
    if s is SystemId.FULL:
        return _FULL
    if s is SystemId.DISJFREE:
        return _FULL - _DISJ_RULES
    return _FULL - _DISJ_RULES - _CONJ_RULES - {RuleId.RHO1BOT_IMP}


RHO2_ONLY = frozenset({RuleId.RHO2})

_BETA = {"imp": RuleId.BETA_IMP, "conj": RuleId.BETA_CONJ, "disj": RuleId.BETA_DISJ}
_PI = {"imp": RuleId.PI_IMP, "conj": RuleId.PI_CONJ, "disj": RuleId.PI_DISJ}
_RHO1 = {"imp": RuleId.RHO1_IMP, "conj": RuleId.RHO1_CONJ, "disj": RuleId.RHO1_DISJ}
_RHO1BOT = {
    "imp": RuleId.RHO1BOT_IMP, "conj": RuleId.RHO1BOT_CONJ,
    "disj": RuleId.RHO1BOT_DISJ,
}
RHO1_OF_BOT = {_RHO1BOT[c]: _RHO1[c] for c in _RHO1}
RHO1_RULES = frozenset(_RHO1.values())
RHO1BOT_RULES = frozenset(_RHO1BOT.values())
PI_RULES = frozenset(_PI.values())


class NotARedex(Exception):
    pass


class FuelExhausted(Exception):
    def __init__(self, trace):
        super().__init__(f"fuel exhausted after {len(trace)} steps")
        self.trace = trace


@dataclass(frozen=True)
class Step:
    rule: RuleId
    position: tuple
    before: object
    after: object


@dataclass(frozen=True)
class Trace:
    start: object
    steps: tuple = ()

    @property
    def end(self):
        return self.steps[-1].after if self.steps else self.start

    def __len__(self):
        return len(self.steps)

    def then(self, more: "Trace") -> "Trace":
        if self.steps and more.steps:
            assert more.start is self.end or alpha_eq(more.start, self.end)
        return Trace(self.start, tuple(self.steps) + tuple(more.steps))

    def count(self, *rules) -> int:
        return sum(1 for s in self.steps if s.rule in rules)

    def rules(self) -> list:
        return [s.rule for s in self.steps]


# ---------------------------------------------------------------------------
# Redex enumeration


def _is_identity_bot(t) -> bool:
    return (
        isinstance(t, Lam) and t.annot == BOT
        and isinstance(t.body, Var) and t.body.name == t.var
    )


def _scan(g: dict, t, pos: tuple, rules, out: list):
    """Collect redexes below ``t``; returns the type of ``t``."""
    if isinstance(t, Var):
        try:
            return g[t.name]
        except KeyError:
            raise TypeCheckError(pos, f"unbound variable {t.name}") from None
    if isinstance(t, Lam):
        b = _scan(extend(g, t.var, t.annot), t.body, pos + (0,), rules, out)
        return Imp(t.annot, b)
    if isinstance(t, Delta):
        _scan(extend(g, t.var, neg(t.annot)), t.body, pos + (0,), rules, out)
        body = t.body
        if (
            RuleId.RHO2 in rules and isinstance(body, App)
            and isinstance(body.fun, Var) and body.fun.name == t.var
            and t.var not in free_vars(body.arg)
        ):
            out.append((pos, RuleId.RHO2))
        if RuleId.RHO3 in rules and t.annot == BOT:
            out.append((pos, RuleId.RHO3))
        return t.annot
    if isinstance(t, Pair):
        return Conj(
            _scan(g, t.fst, pos + (0,), rules, out),
            _scan(g, t.snd, pos + (1,), rules, out),
        )
    if isinstance(t, Inj):
        _scan(g, t.arg, pos + (0,), rules, out)
        return t.annot
    if isinstance(t, App):
        f = _scan(g, t.fun, pos + (0,), rules, out)
        a = _scan(g, t.arg, pos + (1,), rules, out)
        if not isinstance(f, Imp) or f.left != a:
            raise TypeCheckError(pos, "ill-typed application")
        ty = f.right
        head = t.fun
        if isinstance(head, Lam):
            if RuleId.BETA_IMP in rules:
                out.append((pos, RuleId.BETA_IMP))
            if RuleId.IOTA in rules and ty == BOT and _is_identity_bot(head):
                out.append((pos, RuleId.IOTA))
        elif isinstance(head, Var):
            if RuleId.RHO4 in rules and isinstance(t.arg, Delta) and ty == BOT:
                out.append((pos, RuleId.RHO4))
            if RuleId.KAPPA in rules and f == neg(BOT):
                out.append((pos, RuleId.KAPPA))
        _scan_elim(t, "imp", ty, pos, rules, out)
        return ty
    if isinstance(t, Proj):
        a = _scan(g, t.arg, pos + (0,), rules, out)
        if not isinstance(a, Conj):
            raise TypeCheckError(pos, "ill-typed projection")
        ty = a.left if t.index == 1 else a.right
        if isinstance(t.arg, Pair) and RuleId.BETA_CONJ in rules:
            out.append((pos, RuleId.BETA_CONJ))
        _scan_elim(t, "conj", ty, pos, rules, out)
        return ty
    if isinstance(t, Case):
        s = _scan(g, t.scrut, pos + (0,), rules, out)
        c1 = _scan(extend(g, t.x, t.annot_x), t.left, pos + (1,), rules, out)
        c2 = _scan(extend(g, t.y, t.annot_y), t.right, pos + (2,), rules, out)
        if not isinstance(s, Disj) or c1 != c2:
            raise TypeCheckError(pos, "ill-typed case")
        if isinstance(t.scrut, Inj) and RuleId.BETA_DISJ in rules:
            out.append((pos, RuleId.BETA_DISJ))
        _scan_elim(t, "disj", c1, pos, rules, out)
        return c1
    raise TypeCheckError(pos, f"not a term: {t!r}")


def _scan_elim(t, conn: str, ty, pos, rules, out):
    _, main = split_elim(t)
    if isinstance(main, Case) and _PI[conn] in rules:
        out.append((pos, _PI[conn]))
    if isinstance(main, Delta):
        if _RHO1[conn] in rules:
            out.append((pos, _RHO1[conn]))
        if ty == BOT and _RHO1BOT[conn] in rules:
            out.append((pos, _RHO1BOT[conn]))


def redexes(gamma: Context, t, rules: Iterable[RuleId]) -> list:
    """All ``(position, rule)`` pairs, leftmost-outermost first."""
    rules = frozenset(rules)
    out: list = []
    _scan(dict(gamma), t, (), rules, out)
    out.sort(key=lambda pr: (pr[0], _ORDER[pr[1]]))
    return out


def is_redex(gamma: Context, t, pos, rule: RuleId) -> bool:
    try:
        sub = subterm(t, pos)
    except IndexError:
        return False
    g = context_at(gamma, t, pos)
    found: list = []
    try:
        _scan(g, sub, (), frozenset((rule,)), found)
    except TypeCheckError:
        return False
    return ((), rule) in found


# ---------------------------------------------------------------------------
# Contraction


def contract(gamma: Context, t, pos, rule: RuleId):
    pos = tuple(pos)
    if not is_redex(gamma, t, pos, rule):
        raise NotARedex(f"no {rule.value} redex at {list(pos)}")
    g = context_at(gamma, t, pos)
    avoid = all_vars(t) | set(gamma)
    r = subterm(t, pos)
    return replace(t, pos, _contractum(g, r, rule, avoid))


def step(gamma: Context, t, pos, rule: RuleId) -> Step:
    return Step(rule, tuple(pos), t, contract(gamma, t, pos, rule))


def _contractum(g: dict, r, rule: RuleId, avoid):
    if rule in (RuleId.BETA_IMP, RuleId.IOTA):
        return subst(r.fun.body, r.fun.var, r.arg)
    if rule is RuleId.BETA_CONJ:
        return r.arg.fst if r.index == 1 else r.arg.snd
    if rule is RuleId.BETA_DISJ:
        inj = r.scrut
        if inj.index == 1:
            return subst(r.left, r.x, inj.arg)
        return subst(r.right, r.y, inj.arg)
    if rule is RuleId.RHO2:
        return r.body.arg
    if rule is RuleId.RHO3:
        return subst(r.body, r.var, Lam("x", BOT, Var("x")))
    if rule is RuleId.RHO4:
        return subst(r.arg.body, r.arg.var, r.fun)
    if rule is RuleId.KAPPA:
        return r.arg
    e, main = split_elim(r)
    if rule in PI_RULES:
        bad = frame_free_vars(e)
        x, left = main.x, main.left
        if x in bad:
            x = fresh(avoid | bad, x)
            left = subst(left, main.x, Var(x))
        y, right = main.y, main.right
        if y in bad:
            y = fresh(avoid | bad | {x}, y)
            right = subst(right, main.y, Var(y))
        return Case(
            main.scrut, x, main.annot_x, fill(e, left),
            y, main.annot_y, fill(e, right),
        )
    # rho1 / rho1bot: E[delta k:~A. M]
    z = fresh(avoid, "z")
    if rule in RHO1BOT_RULES:
        cont = Lam(z, main.annot, fill(e, Var(z)))
        return subst(main.body, main.var, cont)
    b = infer(g, r, strict=False)
    k2 = fresh(avoid | {z}, main.var)
    cont = Lam(z, main.annot, App(Var(k2), fill(e, Var(z))))
    return Delta(k2, b, subst(main.body, main.var, cont))


def replay(gamma: Context, start, moves) -> Trace:
    """Rebuild a trace from ``(rule, position)`` pairs, contracting each."""
    steps = []
    t = start
    for rule, pos in moves:
        s = step(gamma, t, pos, rule)
        steps.append(s)
        t = s.after
    return Trace(start, tuple(steps))


def check_trace(gamma: Context, trace: Trace) -> bool:
    """Every step contracts mechanically to its recorded result."""
    t = trace.start
    for s in trace.steps:
        if not alpha_eq(s.before, t):
            return False
        try:
            after = contract(gamma, s.before, s.position, s.rule)
        except NotARedex:
            return False
        if not alpha_eq(after, s.after):
            return False
        t = s.after
    return True


# ---------------------------------------------------------------------------
# Strategies


def _choose(found: list, strategy: str):
    if strategy in ("lo", "leftmost-outermost"):
        return found[0]
    if strategy in ("li", "leftmost-innermost"):
        ps = [p for p, _ in found]
        for p, r in found:
            n = len(p)
            if not any(len(q) > n and q[:n] == p for q in ps):
                return p, r
    raise ValueError(f"unknown strategy {strategy!r}")


def normalize(gamma: Context, t, rules, strategy: str = "lo", fuel: int = 10_000) -> Trace:
    rules = frozenset(rules)
    steps = []
    cur = t
    while True:
        found = redexes(gamma, cur, rules)
        if not found:
            return Trace(t, tuple(steps))
        if len(steps) >= fuel:
            raise FuelExhausted(Trace(t, tuple(steps)))
        pos, rule = _choose(found, strategy)
        s = step(gamma, cur, pos, rule)
        steps.append(s)
        cur = s.after


# ---------------------------------------------------------------------------
# Reduction graphs


class Verdict(enum.Enum):
    EXHAUSTED_ACYCLIC = "ExhaustedAndAcyclic"
    EXHAUSTED_WITH_CYCLE = "ExhaustedWithCycle"
    BOUND_EXCEEDED = "BoundExceeded"


@dataclass
class Graph:
    nodes: list
    edges: list  # (src index, dst index, rule, position)
    verdict: Verdict
    witness: list = field(default_factory=list)

    def longest_path(self) -> int:
        """Length of the longest reduction sequence (acyclic graphs only)."""
        if self.verdict is not Verdict.EXHAUSTED_ACYCLIC:
            raise ValueError("longest path is defined on exhausted acyclic graphs")
        succ = [[] for _ in self.nodes]
        for s, d, _, _ in self.edges:
            succ[s].append(d)
        depth = [0] * len(self.nodes)
        for n in reversed(_topo(succ)):
            depth[n] = max((depth[d] + 1 for d in succ[n]), default=0)
        return depth[0] if self.nodes else 0

    def normal_forms(self) -> list:
        has_out = {s for s, _, _, _ in self.edges}
        return [t for i, t in enumerate(self.nodes) if i not in has_out]


def _topo(succ):
    order, state = [], [0] * len(succ)
    for root in range(len(succ)):
        if state[root]:
            continue
        stack = [(root, iter(succ[root]))]
        state[root] = 1
        while stack:
            n, it = stack[-1]
            for d in it:
                if not state[d]:
                    state[d] = 1
                    stack.append((d, iter(succ[d])))
                    break
            else:
                stack.pop()
                state[n] = 2
                order.append(n)
    order.reverse()
    return order


def _find_cycle(succ):
    color = [0] * len(succ)
    parent = [-1] * len(succ)
    for root in range(len(succ)):
        if color[root]:
            continue
        stack = [(root, iter(succ[root]))]
        color[root] = 1
        while stack:
            n, it = stack[-1]
            advanced = False
            for d in it:
                if color[d] == 1:
                    cyc = [d]
                    m = n
                    while m != d:
                        cyc.append(m)
                        m = parent[m]
                    cyc.append(d)
                    return list(reversed(cyc))
                if color[d] == 0:
                    color[d] = 1
                    parent[d] = n
                    stack.append((d, iter(succ[d])))
                    advanced = True
                    break
            if not advanced:
                stack.pop()
                color[n] = 2
    return None


def reduction_graph(gamma: Context, t, rules, node_bound: int = 100_000) -> Graph:
    """Breadth-first closure of ``t`` under ``rules``, nodes up to alpha."""
    rules = frozenset(rules)
    index = {nameless(t): 0}
    nodes = [t]
    edges = []
    queue = deque([0])
    while queue:
        i = queue.popleft()
        cur = nodes[i]
        for pos, rule in redexes(gamma, cur, rules):
            nxt = contract(gamma, cur, pos, rule)
            key = nameless(nxt)
            j = index.get(key)
            if j is None:
                if len(nodes) >= node_bound:
                    return Graph(nodes, edges, Verdict.BOUND_EXCEEDED)
                j = len(nodes)
                index[key] = j
                nodes.append(nxt)
                queue.append(j)
            edges.append((i, j, rule, pos))
    succ = [[] for _ in nodes]
    for s, d, _, _ in edges:
        succ[s].append(d)
    cycle = _find_cycle(succ)
    if cycle is not None:
        return Graph(nodes, edges, Verdict.EXHAUSTED_WITH_CYCLE, cycle)
    return Graph(nodes, edges, Verdict.EXHAUSTED_ACYCLIC)


# ---------------------------------------------------------------------------
# Single-rule bridges


def bridge(gamma: Context, src, dst, rules, *, within=(), max_depth: int = 64):
    """Shortest trace from ``src`` to a term alpha-equal to ``dst`` using only
    ``rules`` at positions under ``within``; None if there is none."""
    rules = frozenset(rules)
    target = nameless(dst)
    start_key = nameless(src)
    if start_key == target:
        return Trace(src)
    n = len(within)
    seen = {start_key}
    frontier = [(src, ())]
    for _ in range(max_depth):
        nxt_frontier = []
        for cur, path in frontier:
            for pos, rule in redexes(gamma, cur, rules):
                if pos[:n] != tuple(within):
                    continue
                s = step(gamma, cur, pos, rule)
                key = nameless(s.after)
                if key == target:
                    return Trace(src, path + (s,))
                if key not in seen:
                    seen.add(key)
                    nxt_frontier.append((s.after, path + (s,)))
        if not nxt_frontier:
            return None
        frontier = nxt_frontier
    return None
