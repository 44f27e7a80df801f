"""Formulas, proof terms, elimination frames and the operations on them.

Terms use named variables.  Every binder carries its formula annotation, so
types can be rebuilt locally.  Positions are tuples of child indices in
constructor-argument order:

    Lam   (0 body)            App   (0 fun, 1 arg)
    Pair  (0 fst, 1 snd)      Proj  (0 arg)
    Inj   (0 arg)             Case  (0 scrut, 1 left, 2 right)
    Delta (0 body)
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union


# ---------------------------------------------------------------------------
# Formulas


@dataclass(frozen=True, slots=True)
class Atom:
    name: str


@dataclass(frozen=True, slots=True)
class Bottom:
    pass


@dataclass(frozen=True, slots=True)
class Imp:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, slots=True)
class Conj:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, slots=True)
class Disj:
    left: "Formula"
    right: "Formula"


Formula = Union[Atom, Bottom, Imp, Conj, Disj]

BOT = Bottom()


def neg(a: Formula) -> Imp:
    return Imp(a, BOT)


def is_neg(a: Formula) -> bool:
    return isinstance(a, Imp) and a.right == BOT


def formula_size(a: Formula) -> int:
    if isinstance(a, (Atom, Bottom)):
        return 1
    return 1 + formula_size(a.left) + formula_size(a.right)


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True, slots=True)
class Var:
    name: str


@dataclass(frozen=True, slots=True)
class Lam:
    var: str
    annot: Formula
    body: "Term"


@dataclass(frozen=True, slots=True)
class App:
    fun: "Term"
    arg: "Term"


@dataclass(frozen=True, slots=True)
class Pair:
    fst: "Term"
    snd: "Term"


@dataclass(frozen=True, slots=True)
class Proj:
    index: int
    arg: "Term"


@dataclass(frozen=True, slots=True)
class Inj:
    """Injection; ``annot`` is the whole disjunction ``A \\/ B``."""

    index: int
    annot: Formula
    arg: "Term"


@dataclass(frozen=True, slots=True)
class Case:
    scrut: "Term"
    x: str
    annot_x: Formula
    left: "Term"
    y: str
    annot_y: Formula
    right: "Term"


@dataclass(frozen=True, slots=True)
class Delta:
    """Reductio ad absurdum ``delta k:~A. body``; ``annot`` is ``A``."""

    var: str
    annot: Formula
    body: "Term"


Term = Union[Var, Lam, App, Pair, Proj, Inj, Case, Delta]

Position = tuple

IDENTITY_BOT = Lam("x", BOT, Var("x"))


def children(t: Term) -> tuple:
    if isinstance(t, Var):
        return ()
    if isinstance(t, (Lam, Delta)):
        return (t.body,)
    if isinstance(t, App):
        return (t.fun, t.arg)
    if isinstance(t, Pair):
        return (t.fst, t.snd)
    if isinstance(t, (Proj, Inj)):
        return (t.arg,)
    if isinstance(t, Case):
        return (t.scrut, t.left, t.right)
    raise TypeError(f"not a term: {t!r}")


def with_children(t: Term, kids) -> Term:
    if isinstance(t, Lam):
        return Lam(t.var, t.annot, kids[0])
    if isinstance(t, Delta):
        return Delta(t.var, t.annot, kids[0])
    if isinstance(t, App):
        return App(kids[0], kids[1])
    if isinstance(t, Pair):
        return Pair(kids[0], kids[1])
    if isinstance(t, Proj):
        return Proj(t.index, kids[0])
    if isinstance(t, Inj):
        return Inj(t.index, t.annot, kids[0])
    if isinstance(t, Case):
        return Case(kids[0], t.x, t.annot_x, kids[1], t.y, t.annot_y, kids[2])
    return t


def binders_at(t: Term, i: int) -> tuple:
    """Variables (with their types) bound by ``t`` over its ``i``-th child."""
    if isinstance(t, Lam):
        return ((t.var, t.annot),)
    if isinstance(t, Delta):
        return ((t.var, neg(t.annot)),)
    if isinstance(t, Case):
        if i == 1:
            return ((t.x, t.annot_x),)
        if i == 2:
            return ((t.y, t.annot_y),)
    return ()


def size(t: Term) -> int:
    return 1 + sum(size(c) for c in children(t))


def subterm(t: Term, pos: Position) -> Term:
    for i in pos:
        kids = children(t)
        if i >= len(kids):
            raise IndexError(f"position {list(pos)} leaves the term")
        t = kids[i]
    return t


def valid_position(t: Term, pos: Position) -> bool:
    try:
        subterm(t, pos)
    except IndexError:
        return False
    return True


def replace(t: Term, pos: Position, new: Term) -> Term:
    if not pos:
        return new
    kids = list(children(t))
    i = pos[0]
    if i >= len(kids):
        raise IndexError(f"position {list(pos)} leaves the term")
    kids[i] = replace(kids[i], pos[1:], new)
    return with_children(t, kids)


def positions(t: Term, prefix: Position = ()) -> Iterator[Position]:
    """All positions of ``t`` in pre-order (outermost first, left to right)."""
    yield prefix
    for i, c in enumerate(children(t)):
        yield from positions(c, prefix + (i,))


# ---------------------------------------------------------------------------
# Elimination frames


@dataclass(frozen=True, slots=True)
class AppHole:
    arg: Term


@dataclass(frozen=True, slots=True)
class ProjHole:
    index: int


@dataclass(frozen=True, slots=True)
class CaseHole:
    x: str
    annot_x: Formula
    left: Term
    y: str
    annot_y: Formula
    right: Term


ElimContext = Union[AppHole, ProjHole, CaseHole]


def fill(e: ElimContext, m: Term) -> Term:
    if isinstance(e, AppHole):
        return App(m, e.arg)
    if isinstance(e, ProjHole):
        return Proj(e.index, m)
    return Case(m, e.x, e.annot_x, e.left, e.y, e.annot_y, e.right)


def split_elim(t: Term):
    """Split ``t`` as ``E[M]``; returns ``(E, M)`` or None for non-eliminations."""
    if isinstance(t, App):
        return AppHole(t.arg), t.fun
    if isinstance(t, Proj):
        return ProjHole(t.index), t.arg
    if isinstance(t, Case):
        return CaseHole(t.x, t.annot_x, t.left, t.y, t.annot_y, t.right), t.scrut
    return None


def connective(e: ElimContext) -> str:
    if isinstance(e, AppHole):
        return "imp"
    if isinstance(e, ProjHole):
        return "conj"
    return "disj"


def frame_free_vars(e: ElimContext) -> frozenset:
    if isinstance(e, AppHole):
        return free_vars(e.arg)
    if isinstance(e, ProjHole):
        return frozenset()
    return (free_vars(e.left) - {e.x}) | (free_vars(e.right) - {e.y})


def subst_ctx(e: ElimContext, x: str, q: Term) -> ElimContext:
    """``[q/x]E``: substitute into the frame's side premises."""
    if isinstance(e, AppHole):
        return AppHole(subst(e.arg, x, q))
    if isinstance(e, ProjHole):
        return e
    c = subst(Case(Var(x), e.x, e.annot_x, e.left, e.y, e.annot_y, e.right), x, q)
    return CaseHole(c.x, c.annot_x, c.left, c.y, c.annot_y, c.right)


# ---------------------------------------------------------------------------
# Variables


def free_vars(t: Term) -> frozenset:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, (Lam, Delta)):
        return free_vars(t.body) - {t.var}
    if isinstance(t, Case):
        return (
            free_vars(t.scrut)
            | (free_vars(t.left) - {t.x})
            | (free_vars(t.right) - {t.y})
        )
    out = frozenset()
    for c in children(t):
        out |= free_vars(c)
    return out


def all_vars(t: Term) -> frozenset:
    """Free and bound variable names."""
    if isinstance(t, Var):
        return frozenset((t.name,))
    out = frozenset()
    if isinstance(t, (Lam, Delta)):
        out = frozenset((t.var,))
    elif isinstance(t, Case):
        out = frozenset((t.x, t.y))
    for c in children(t):
        out |= all_vars(c)
    return out


def occurrences(t: Term, x: str, prefix: Position = ()) -> list:
    """Positions of the free occurrences of ``x`` in ``t``, pre-order."""
    if isinstance(t, Var):
        return [prefix] if t.name == x else []
    out = []
    for i, c in enumerate(children(t)):
        if any(v == x for v, _ in binders_at(t, i)):
            continue
        out.extend(occurrences(c, x, prefix + (i,)))
    return out


def fresh(avoid, hint: str) -> str:
    """First of ``hint``, ``hint'``, ``hint''``, ... not in ``avoid``."""
    name = hint
    while name in avoid:
        name += "'"
    return name


# ---------------------------------------------------------------------------
# Substitution


def subst(body: Term, x: str, q: Term) -> Term:
    """Capture-avoiding ``[q/x]body``."""
    return _subst(body, x, q, free_vars(q))


def _rename_binder(var: str, body: Term, x: str, q_fv: frozenset, q: Term):
    # binder ``var`` over ``body`` would capture a free variable of q
    if var in q_fv and x in free_vars(body):
        new = fresh(q_fv | all_vars(body) | {x}, var)
        body = _subst(body, var, Var(new), frozenset((new,)))
        return new, body
    return var, body


def _subst(t: Term, x: str, q: Term, q_fv: frozenset) -> Term:
    if isinstance(t, Var):
        return q if t.name == x else t
    if isinstance(t, (Lam, Delta)):
        if t.var == x:
            return t
        var, body = _rename_binder(t.var, t.body, x, q_fv, q)
        return type(t)(var, t.annot, _subst(body, x, q, q_fv))
    if isinstance(t, App):
        return App(_subst(t.fun, x, q, q_fv), _subst(t.arg, x, q, q_fv))
    if isinstance(t, Pair):
        return Pair(_subst(t.fst, x, q, q_fv), _subst(t.snd, x, q, q_fv))
    if isinstance(t, Proj):
        return Proj(t.index, _subst(t.arg, x, q, q_fv))
    if isinstance(t, Inj):
        return Inj(t.index, t.annot, _subst(t.arg, x, q, q_fv))
    if isinstance(t, Case):
        scrut = _subst(t.scrut, x, q, q_fv)
        if t.x == x:
            vx, left = t.x, t.left
        else:
            vx, left = _rename_binder(t.x, t.left, x, q_fv, q)
            left = _subst(left, x, q, q_fv)
        if t.y == x:
            vy, right = t.y, t.right
        else:
            vy, right = _rename_binder(t.y, t.right, x, q_fv, q)
            right = _subst(right, x, q, q_fv)
        return Case(scrut, vx, t.annot_x, left, vy, t.annot_y, right)
    raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# Alpha-equivalence via a nameless key


def nameless(t: Term, env: tuple = ()) -> tuple:
    """Hashable de Bruijn-style key; equal keys iff alpha-equivalent terms.

    ``env`` lists bound names innermost first.
    """
    if isinstance(t, Var):
        try:
            return ("b", env.index(t.name))
        except ValueError:
            return ("f", t.name)
    if isinstance(t, Lam):
        return ("lam", t.annot, nameless(t.body, (t.var,) + env))
    if isinstance(t, Delta):
        return ("delta", t.annot, nameless(t.body, (t.var,) + env))
    if isinstance(t, App):
        return ("app", nameless(t.fun, env), nameless(t.arg, env))
    if isinstance(t, Pair):
        return ("pair", nameless(t.fst, env), nameless(t.snd, env))
    if isinstance(t, Proj):
        return ("proj", t.index, nameless(t.arg, env))
    if isinstance(t, Inj):
        return ("inj", t.index, t.annot, nameless(t.arg, env))
    if isinstance(t, Case):
        return (
            "case",
            nameless(t.scrut, env),
            t.annot_x,
            nameless(t.left, (t.x,) + env),
            t.annot_y,
            nameless(t.right, (t.y,) + env),
        )
    raise TypeError(f"not a term: {t!r}")


def alpha_eq(t1: Term, t2: Term) -> bool:
    return t1 == t2 or nameless(t1) == nameless(t2)
