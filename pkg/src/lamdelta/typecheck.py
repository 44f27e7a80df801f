"""Type reconstruction for annotated proof terms, and system membership."""

from __future__ import annotations

import enum
from types import MappingProxyType
from typing import Mapping

from .syntax import (
    BOT, App, AppHole, Atom, Bottom, Case, CaseHole, Conj, Delta, Disj,
    Formula, Imp, Inj, Lam, Pair, Proj, ProjHole, Var, binders_at, children, neg,
)

Context = Mapping[str, Formula]

EMPTY: Context = MappingProxyType({})


class TypeCheckError(Exception):
    """No typing rule applies; ``position`` locates the offending subterm."""

    def __init__(self, position, reason):
        super().__init__(f"at {list(position)}: {reason}")
        self.position = tuple(position)
        self.reason = reason


class DuplicateBinding(TypeCheckError):
    pass


class HoleTypeMismatch(TypeCheckError):
    pass


IllTyped = TypeCheckError


class SystemId(enum.Enum):
    FULL = "full"
    DISJFREE = "disjfree"
    SMALL = "small"


def extend(gamma: Context, name: str, a: Formula) -> Context:
    d = dict(gamma)
    d[name] = a
    return d


def infer(gamma: Context, t, *, strict: bool = True) -> Formula:
    """The unique ``A`` with ``gamma |- t : A``; raises ``TypeCheckError``.

    With ``strict`` a binder reusing a name declared in ``gamma`` is rejected
    with ``DuplicateBinding``; pass ``strict=False`` when ``gamma`` already
    holds the binders enclosing ``t`` inside some larger term.
    """
    return _infer(gamma, t, (), gamma if strict else {})


def _infer(gamma: Context, t, _pos, _outer) -> Formula:
    if isinstance(t, Var):
        try:
            return gamma[t.name]
        except KeyError:
            raise TypeCheckError(_pos, f"unbound variable {t.name}") from None
    if isinstance(t, Lam):
        _check_binder(_outer, t.var, _pos)
        b = _infer(extend(gamma, t.var, t.annot), t.body, _pos + (0,), _outer)
        return Imp(t.annot, b)
    if isinstance(t, App):
        f = _infer(gamma, t.fun, _pos + (0,), _outer)
        a = _infer(gamma, t.arg, _pos + (1,), _outer)
        if not isinstance(f, Imp):
            raise TypeCheckError(_pos, "applying a non-implication")
        if f.left != a:
            raise TypeCheckError(_pos, "argument type mismatch")
        return f.right
    if isinstance(t, Pair):
        return Conj(
            _infer(gamma, t.fst, _pos + (0,), _outer),
            _infer(gamma, t.snd, _pos + (1,), _outer),
        )
    if isinstance(t, Proj):
        a = _infer(gamma, t.arg, _pos + (0,), _outer)
        if not isinstance(a, Conj) or t.index not in (1, 2):
            raise TypeCheckError(_pos, "projection from a non-conjunction")
        return a.left if t.index == 1 else a.right
    if isinstance(t, Inj):
        if not isinstance(t.annot, Disj) or t.index not in (1, 2):
            raise TypeCheckError(_pos, "injection annotation is not a disjunction")
        a = _infer(gamma, t.arg, _pos + (0,), _outer)
        side = t.annot.left if t.index == 1 else t.annot.right
        if a != side:
            raise TypeCheckError(_pos, "injected term does not match its disjunct")
        return t.annot
    if isinstance(t, Case):
        s = _infer(gamma, t.scrut, _pos + (0,), _outer)
        if not isinstance(s, Disj):
            raise TypeCheckError(_pos, "case on a non-disjunction")
        if s.left != t.annot_x or s.right != t.annot_y:
            raise TypeCheckError(_pos, "case binder annotations disagree with scrutinee")
        _check_binder(_outer, t.x, _pos)
        _check_binder(_outer, t.y, _pos)
        c1 = _infer(extend(gamma, t.x, t.annot_x), t.left, _pos + (1,), _outer)
        c2 = _infer(extend(gamma, t.y, t.annot_y), t.right, _pos + (2,), _outer)
        if c1 != c2:
            raise TypeCheckError(_pos, "case branches have different types")
        return c1
    if isinstance(t, Delta):
        _check_binder(_outer, t.var, _pos)
        b = _infer(extend(gamma, t.var, neg(t.annot)), t.body, _pos + (0,), _outer)
        if b != BOT:
            raise TypeCheckError(_pos, "body of delta is not of type Bot")
        return t.annot
    raise TypeCheckError(_pos, f"not a term: {t!r}")


def _check_binder(outer: Context, name: str, pos):
    if name in outer:
        raise DuplicateBinding(pos, f"binder {name} shadows a context variable")


def try_infer(gamma: Context, t):
    try:
        return infer(gamma, t, strict=False)
    except TypeCheckError:
        return None


def infer_ctx(gamma: Context, e, hole_type: Formula) -> Formula:
    """``B`` with ``gamma | hole_type |- E : B``."""
    if isinstance(e, AppHole):
        if not isinstance(hole_type, Imp):
            raise HoleTypeMismatch((), "application hole needs an implication")
        a = infer(gamma, e.arg, strict=False)
        if a != hole_type.left:
            raise TypeCheckError((1,), "argument type mismatch")
        return hole_type.right
    if isinstance(e, ProjHole):
        if not isinstance(hole_type, Conj):
            raise HoleTypeMismatch((), "projection hole needs a conjunction")
        return hole_type.left if e.index == 1 else hole_type.right
    if isinstance(e, CaseHole):
        if not isinstance(hole_type, Disj):
            raise HoleTypeMismatch((), "case hole needs a disjunction")
        if hole_type.left != e.annot_x or hole_type.right != e.annot_y:
            raise TypeCheckError((), "case binder annotations disagree with hole type")
        c1 = infer(extend(gamma, e.x, e.annot_x), e.left, strict=False)
        c2 = infer(extend(gamma, e.y, e.annot_y), e.right, strict=False)
        if c1 != c2:
            raise TypeCheckError((), "case branches have different types")
        return c1
    raise TypeCheckError((), f"not an elimination context: {e!r}")


# ---------------------------------------------------------------------------
# System membership


def formula_in_system(a: Formula, s: SystemId) -> bool:
    if isinstance(a, (Atom, Bottom)):
        return True
    if isinstance(a, Disj) and s is not SystemId.FULL:
        return False
    if isinstance(a, Conj) and s is SystemId.SMALL:
        return False
    return formula_in_system(a.left, s) and formula_in_system(a.right, s)


def in_system(t, s: SystemId) -> bool:
    if isinstance(t, (Inj, Case)) and s is not SystemId.FULL:
        return False
    if isinstance(t, (Pair, Proj)) and s is SystemId.SMALL:
        return False
    for a in _annotations(t):
        if not formula_in_system(a, s):
            return False
    return all(in_system(c, s) for c in children(t))


def context_in_system(gamma: Context, s: SystemId) -> bool:
    return all(formula_in_system(a, s) for a in gamma.values())


def _annotations(t):
    if isinstance(t, (Lam, Delta, Inj)):
        return (t.annot,)
    if isinstance(t, Case):
        return (t.annot_x, t.annot_y)
    return ()


def context_at(gamma: Context, t, pos) -> dict:
    """Typing context in force at ``pos`` inside ``t``."""
    g = dict(gamma)
    for i in pos:
        for name, a in binders_at(t, i):
            g[name] = a
        t = children(t)[i]
    return g
