"""Concrete syntax: lexer, recursive-descent parser and printer.

Formulas::

    A ::= X | Bot | A -> A | A /\\ A | A \\/ A | ~A | (A)

``->`` is right-associative and binds loosest, then ``\\/``, then ``/\\``;
``~A`` abbreviates ``A -> Bot``.

Terms::

    M ::= x | \\x:A. M | M M | <M, N> | p1 M | p2 M | in1[A \\/ B] M
        | in2[A \\/ B] M | case M of { x:A => P | y:B => Q }
        | delta k:~A. M | (M)

Unicode spellings (λ, Δ, ⊥, →, ⊃, ∧, ∨, ¬) are accepted too.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .syntax import (
    BOT, App, Atom, Bottom, Case, Conj, Delta, Disj, Imp, Inj, Lam, Pair,
    Proj, Var, fresh,
)


class ParseError(Exception):
    def __init__(self, line: int, column: int, expected: str, found: str = ""):
        msg = f"{line}:{column}: expected {expected}"
        if found:
            msg += f", found {found!r}"
        super().__init__(msg)
        self.line = line
        self.column = column
        self.expected = expected


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<op>->|=>|/\\|\\/|[\\λΔ.:,()<>\[\]{}|~¬⊥→⊃∧∨])
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
    """,
    re.VERBOSE,
)

_UNICODE = {"λ": "\\", "¬": "~", "⊥": "Bot", "→": "->", "⊃": "->", "∧": "/\\", "∨": "\\/", "Δ": "delta"}

KEYWORDS = {"delta", "case", "of", "p1", "p2", "in1", "in2", "Bot"}


@dataclass
class Tok:
    kind: str
    text: str
    line: int
    col: int


def tokenize(src: str) -> list:
    toks = []
    i, line, col = 0, 1, 1
    while i < len(src):
        m = _TOKEN.match(src, i)
        if not m:
            raise ParseError(line, col, "a token", src[i])
        text = m.group()
        if m.lastgroup != "ws":
            kind = m.lastgroup
            text = _UNICODE.get(text, text)
            if kind == "ident" and text in KEYWORDS:
                kind = "kw"
            if text in ("Bot", "delta"):
                kind = "kw"
            toks.append(Tok(kind, text, line, col))
        nl = text.count("\n") if m.lastgroup == "ws" else 0
        if nl:
            line += nl
            col = len(text) - text.rfind("\n")
        else:
            col += len(m.group())
        i = m.end()
    toks.append(Tok("eof", "", line, col))
    return toks


class Parser:
    def __init__(self, src: str, scope=()):
        self.toks = tokenize(src)
        self.i = 0
        # names bound in the enclosing context; binders must not shadow them
        self.scope = set(scope)
        self.avoid = set(scope) | {t.text for t in self.toks if t.kind == "ident"}

    # -- token helpers
    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind != "ident"

    def expect(self, text: str) -> Tok:
        if not self.at(text):
            self.fail(repr(text))
        t = self.tok
        self.i += 1
        return t

    def fail(self, expected: str):
        raise ParseError(self.tok.line, self.tok.col, expected, self.tok.text or "end of input")

    def ident(self) -> str:
        if self.tok.kind != "ident":
            self.fail("an identifier")
        t = self.tok.text
        self.i += 1
        return t

    def done(self):
        if self.tok.kind != "eof":
            self.fail("end of input")

    # -- formulas
    def formula(self):
        left = self.disj()
        if self.at("->"):
            self.i += 1
            return Imp(left, self.formula())
        return left

    def disj(self):
        left = self.conj()
        if self.at("\\/"):
            self.i += 1
            return Disj(left, self.disj())
        return left

    def conj(self):
        left = self.unary_formula()
        if self.at("/\\"):
            self.i += 1
            return Conj(left, self.conj())
        return left

    def unary_formula(self):
        if self.at("~"):
            self.i += 1
            return Imp(self.unary_formula(), BOT)
        if self.at("Bot"):
            self.i += 1
            return BOT
        if self.at("("):
            self.i += 1
            a = self.formula()
            self.expect(")")
            return a
        return Atom(self.ident())

    # -- terms
    def term(self, env: dict):
        if self.at("\\"):
            self.i += 1
            x, env2 = self.binder(env)
            self.expect(":")
            a = self.formula()
            self.expect(".")
            return Lam(x, a, self.term(env2))
        if self.at("delta"):
            self.i += 1
            k, env2 = self.binder(env)
            self.expect(":")
            tok = self.tok
            a = self.formula()
            if not (isinstance(a, Imp) and a.right == BOT):
                raise ParseError(tok.line, tok.col, "a negated formula ~A after delta binder")
            self.expect(".")
            return Delta(k, a.left, self.term(env2))
        return self.application(env)

    def binder(self, env: dict):
        src = self.ident()
        name = src
        bound = self.scope | set(env.values())
        if name in bound:
            name = fresh(self.avoid | bound, name)
            self.avoid.add(name)
        env2 = dict(env)
        env2[src] = name
        return name, env2

    def application(self, env: dict):
        t = self.unary(env)
        while self.starts_unary():
            t = App(t, self.unary(env))
        if self.at("\\") or self.at("delta"):
            t = App(t, self.term(env))
        return t

    def starts_unary(self) -> bool:
        tok = self.tok
        if tok.kind == "ident":
            return True
        return tok.kind != "eof" and tok.text in ("(", "<", "p1", "p2", "in1", "in2", "case")

    def unary(self, env: dict):
        if self.at("p1") or self.at("p2"):
            i = int(self.tok.text[1])
            self.i += 1
            return Proj(i, self.unary(env))
        if self.at("in1") or self.at("in2"):
            i = int(self.tok.text[2])
            self.i += 1
            self.expect("[")
            tok = self.tok
            a = self.formula()
            if not isinstance(a, Disj):
                raise ParseError(tok.line, tok.col, "a disjunction annotation")
            self.expect("]")
            return Inj(i, a, self.unary(env))
        return self.atom(env)

    def atom(self, env: dict):
        if self.at("("):
            self.i += 1
            t = self.term(env)
            self.expect(")")
            return t
        if self.at("<"):
            self.i += 1
            a = self.term(env)
            self.expect(",")
            b = self.term(env)
            self.expect(">")
            return Pair(a, b)
        if self.at("case"):
            self.i += 1
            m = self.term(env)
            self.expect("of")
            self.expect("{")
            x, envx = self.binder(env)
            self.expect(":")
            ax = self.formula()
            self.expect("=>")
            p = self.term(envx)
            self.expect("|")
            y, envy = self.binder(env)
            self.expect(":")
            ay = self.formula()
            self.expect("=>")
            q = self.term(envy)
            self.expect("}")
            return Case(m, x, ax, p, y, ay, q)
        name = self.ident()
        return Var(env.get(name, name))

    def context(self) -> dict:
        g: dict = {}
        if self.tok.kind == "eof":
            return g
        while True:
            tok = self.tok
            x = self.ident()
            self.expect(":")
            a = self.formula()
            if x in g:
                raise ParseError(tok.line, tok.col, f"a single declaration of {x}")
            g[x] = a
            if not self.at(","):
                return g
            self.i += 1


def parse(src: str, scope=()):
    """Parse a term; binders that would shadow ``scope`` or an enclosing
    binder are renamed fresh."""
    p = Parser(src, scope)
    t = p.term({})
    p.done()
    return t


def parse_formula(src: str):
    p = Parser(src)
    a = p.formula()
    p.done()
    return a


def parse_context(src: str) -> dict:
    p = Parser(src)
    g = p.context()
    p.done()
    return g


# ---------------------------------------------------------------------------
# Printing

_F_IMP, _F_DISJ, _F_CONJ, _F_ATOM = range(4)


def show_formula(a, level: int = _F_IMP) -> str:
    if isinstance(a, Atom):
        return a.name
    if isinstance(a, Bottom):
        return "Bot"
    if isinstance(a, Imp):
        if a.right == BOT:
            return "~" + show_formula(a.left, _F_ATOM)
        s = f"{show_formula(a.left, _F_DISJ)} -> {show_formula(a.right, _F_IMP)}"
        mine = _F_IMP
    elif isinstance(a, Disj):
        s = f"{show_formula(a.left, _F_CONJ)} \\/ {show_formula(a.right, _F_DISJ)}"
        mine = _F_DISJ
    else:
        s = f"{show_formula(a.left, _F_ATOM)} /\\ {show_formula(a.right, _F_CONJ)}"
        mine = _F_CONJ
    return f"({s})" if level > mine else s


_T_LAM, _T_APP, _T_UNARY, _T_ATOM = range(4)


def show(t, level: int = _T_LAM) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Pair):
        return f"<{show(t.fst)}, {show(t.snd)}>"
    if isinstance(t, Case):
        return (
            f"case {show(t.scrut)} of {{ {t.x}:{show_formula(t.annot_x)} => {show(t.left)}"
            f" | {t.y}:{show_formula(t.annot_y)} => {show(t.right)} }}"
        )
    if isinstance(t, Lam):
        s, mine = f"\\{t.var}:{show_formula(t.annot)}. {show(t.body)}", _T_LAM
    elif isinstance(t, Delta):
        s, mine = f"delta {t.var}:~{show_formula(t.annot, _F_ATOM)}. {show(t.body)}", _T_LAM
    elif isinstance(t, App):
        s, mine = f"{show(t.fun, _T_APP)} {show(t.arg, _T_UNARY)}", _T_APP
    elif isinstance(t, Proj):
        s, mine = f"p{t.index} {show(t.arg, _T_UNARY)}", _T_UNARY
    elif isinstance(t, Inj):
        s, mine = f"in{t.index}[{show_formula(t.annot)}] {show(t.arg, _T_UNARY)}", _T_UNARY
    else:
        raise TypeError(f"not a term: {t!r}")
    return f"({s})" if level > mine else s


def show_context(g) -> str:
    return ", ".join(f"{x}:{show_formula(a)}" for x, a in g.items())
