"""Exhaustive enumeration of well-typed terms by typing derivation.

Binder names are a function of binding depth, so every alpha-class is
produced exactly once.  Annotations range over a finite formula universe.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .syntax import (
    BOT, App, Atom, Case, Conj, Delta, Disj, Imp, Inj, Lam, Pair, Proj, Var,
    nameless, size,
)
from .typecheck import SystemId, formula_in_system, infer

X = Atom("X")
DEFAULT_CONTEXT = (("x", X), ("y", BOT), ("f", Imp(X, BOT)))
# per-system annotation universe: enough for every rule to have redexes
SYSTEM_FORMULAS = {
    SystemId.FULL: (X, BOT, Imp(X, BOT), Disj(X, BOT)),
    SystemId.DISJFREE: (X, BOT, Imp(X, BOT), Conj(X, BOT)),
    SystemId.SMALL: (X, BOT, Imp(X, BOT)),
}


@dataclass(frozen=True)
class GenSpec:
    atoms: tuple = ("X",)
    system: SystemId = SystemId.FULL
    size_bound: int = 5
    context: tuple = DEFAULT_CONTEXT
    type_filter: object = None
    # annotation universe; None picks SYSTEM_FORMULAS[system]
    formulas: tuple | None = None

    def gamma(self) -> dict:
        return dict(self.context)


def formula_universe(atoms, system: SystemId, connectives: int) -> tuple:
    base = [Atom(a) for a in atoms] + [BOT]
    levels = [base]
    for n in range(1, connectives + 1):
        out = []
        for i in range(n):
            for a in levels[i]:
                for b in levels[n - 1 - i]:
                    out.append(Imp(a, b))
                    out.append(Conj(a, b))
                    out.append(Disj(a, b))
        levels.append(out)
    return tuple(a for lvl in levels for a in lvl if formula_in_system(a, system))


def _universe(spec: GenSpec) -> tuple:
    if spec.formulas is None:
        return SYSTEM_FORMULAS[spec.system]
    return tuple(a for a in spec.formulas if formula_in_system(a, spec.system))


def _binder(depth: int, kind: str) -> str:
    return f"{kind}{depth}"


class _Gen:
    def __init__(self, spec: GenSpec):
        self.system = spec.system
        self.universe = _universe(spec)
        self.disj = self.system is SystemId.FULL
        self.conj = self.system is not SystemId.SMALL
        self.base_len = len(spec.context)
        self.bound = spec.size_bound
        self.terms = lru_cache(maxsize=None)(self._terms)

    def _terms(self, env: tuple, n: int) -> tuple:
        return tuple(self.iter(env, n))

    def level(self, env: tuple, n: int):
        # Only inner loops (application and pair arguments, case branches)
        # revisit a level, and under d binders those never exceed
        # bound - d - 2 nodes. Larger levels are streamed, since caching
        # them for every binder environment exhausts memory at bound 8.
        depth = len(env) - self.base_len
        if n <= self.bound - depth - 2:
            return self.terms(env, n)
        return self.iter(env, n)

    def iter(self, env: tuple, n: int):
        """All ``(term, type)`` of exactly ``n`` nodes under ``env``."""
        if n < 1:
            return
        depth = len(env) - self.base_len
        if n == 1:
            seen = set()
            for name, a in reversed(env):
                if name not in seen:
                    seen.add(name)
                    yield Var(name), a
            return
        m = n - 1
        v = _binder(depth, "v")
        k = _binder(depth, "k")
        for a in self.universe:
            for body, b in self.level(env + ((v, a),), m):
                yield Lam(v, a, body), Imp(a, b)
        for a in self.universe:
            for body, b in self.level(env + ((k, Imp(a, BOT)),), m):
                if b == BOT:
                    yield Delta(k, a, body), a
        for i in range(1, m):
            for fun, ft in self.level(env, i):
                if not isinstance(ft, Imp):
                    continue
                for arg, at in self.level(env, m - i):
                    if at == ft.left:
                        yield App(fun, arg), ft.right
        if self.conj:
            for i in range(1, m):
                for s, st in self.level(env, i):
                    for t, tt in self.level(env, m - i):
                        yield Pair(s, t), Conj(st, tt)
            for s, st in self.level(env, m):
                if isinstance(st, Conj):
                    yield Proj(1, s), st.left
                    yield Proj(2, s), st.right
        if self.disj:
            for d in self.universe:
                if not isinstance(d, Disj):
                    continue
                for s, st in self.level(env, m):
                    if st == d.left:
                        yield Inj(1, d, s), d
                    if st == d.right:
                        yield Inj(2, d, s), d
            for i, j in _splits3(m):
                for s, st in self.level(env, i):
                    if not isinstance(st, Disj):
                        continue
                    if st.left not in self.universe or st.right not in self.universe:
                        continue
                    lefts = self.level(env + ((v, st.left),), j)
                    rights = self.level(env + ((v, st.right),), m - i - j)
                    for p, pt in lefts:
                        for q, qt in rights:
                            if pt == qt:
                                yield Case(s, v, st.left, p, v, st.right, q), pt


def _splits3(m: int):
    for i in range(1, m - 1):
        for j in range(1, m - i):
            yield i, j


def enumerate_terms(spec: GenSpec):
    """Yield ``(gamma, term, type)`` for every well-typed term of at most
    ``spec.size_bound`` nodes, in order of size then construction."""
    gen = _Gen(spec)
    gamma = spec.gamma()
    env = tuple(spec.context)
    for n in range(1, spec.size_bound + 1):
        for t, a in gen.level(env, n):
            if spec.type_filter is None or a == spec.type_filter:
                yield gamma, t, a


def corpus(spec: GenSpec) -> list:
    return list(enumerate_terms(spec))


# ---------------------------------------------------------------------------
# Naive oracle: raw trees, then infer, then quotient by alpha


def _raw(n: int, names: tuple, universe: tuple, system: SystemId, fresh_pool: tuple):
    if n == 1:
        for x in names:
            yield Var(x)
        return
    m = n - 1
    binders = fresh_pool[:1]
    for b in binders:
        rest = fresh_pool[1:]
        for a in universe:
            for body in _raw(m, names + (b,), universe, system, rest):
                yield Lam(b, a, body)
                yield Delta(b, a, body)
    for i in range(1, m):
        for s in _raw(i, names, universe, system, fresh_pool):
            for t in _raw(m - i, names, universe, system, fresh_pool):
                yield App(s, t)
                if system is not SystemId.SMALL:
                    yield Pair(s, t)
    if system is not SystemId.SMALL:
        for s in _raw(m, names, universe, system, fresh_pool):
            yield Proj(1, s)
            yield Proj(2, s)
    if system is SystemId.FULL:
        for s in _raw(m, names, universe, system, fresh_pool):
            for d in universe:
                if isinstance(d, Disj):
                    yield Inj(1, d, s)
                    yield Inj(2, d, s)
        b = fresh_pool[0]
        rest = fresh_pool[1:]
        for i, j in _splits3(m):
            for s in _raw(i, names, universe, system, fresh_pool):
                for p in _raw(j, names + (b,), universe, system, rest):
                    for q in _raw(m - i - j, names + (b,), universe, system, rest):
                        for a1, a2 in itertools.product(universe, repeat=2):
                            yield Case(s, b, a1, p, b, a2, q)


def naive_count(spec: GenSpec) -> dict:
    """Per-size counts of alpha-classes of well-typed raw trees."""
    universe = _universe(spec)
    gamma = spec.gamma()
    names = tuple(gamma)
    pool = tuple(f"b{i}" for i in range(spec.size_bound))
    counts = {}
    for n in range(1, spec.size_bound + 1):
        keys = set()
        for t in _raw(n, names, universe, spec.system, pool):
            try:
                a = infer(gamma, t, strict=False)
            except Exception:
                continue
            if spec.type_filter is not None and a != spec.type_filter:
                continue
            keys.add(nameless(t))
        counts[n] = len(keys)
    return counts


def enumerated_count(spec: GenSpec) -> dict:
    counts = {n: 0 for n in range(1, spec.size_bound + 1)}
    for _, t, _ in enumerate_terms(spec):
        counts[size(t)] += 1
    return counts

