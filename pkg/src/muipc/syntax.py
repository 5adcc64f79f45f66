"""Concrete syntax.

    formula := ('mu' | 'nu') IDENT '.' formula | implication
    implication := disjunction ['->' formula]          (right associative)
    disjunction := conjunction {'\\/' conjunction}
    conjunction := unary {'/\\' unary}
    unary := '~' unary | IDENT | 'T' | 'F' | '(' formula ')' | binder

A binder extends as far to the right as possible.  ``~a`` abbreviates
``a -> F``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .formula import (AND, BOT, IMP, MU, NU, OR, TOP, Formula, PositivityError, conj,
                      disj, imp, mu, neg, nu, rename_bound, var)

__all__ = ["FormulaSyntaxError", "parse", "to_text", "parse_lines"]

KEYWORDS = {"mu", "nu", "T", "F"}

_TOKEN = re.compile(r"\s*(?:(?P<ident>[A-Za-z][A-Za-z0-9_]*)|(?P<op>->|/\\|\\/|[().~]))")


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, pos: int, text: str = ""):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos
        self.text = text


@dataclass
class _Tok:
    kind: str
    value: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    i = 0
    while i < len(text):
        if text[i].isspace():
            i += 1
            continue
        m = _TOKEN.match(text, i)
        if not m or m.end() == i:
            raise FormulaSyntaxError(f"unexpected character {text[i]!r}", i, text)
        start = m.start("ident") if m.group("ident") else m.start("op")
        if m.group("ident"):
            toks.append(_Tok("ident", m.group("ident"), start))
        else:
            toks.append(_Tok("op", m.group("op"), start))
        i = m.end()
    toks.append(_Tok("eof", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def cur(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.cur
        raise FormulaSyntaxError(msg, tok.pos, self.text)

    def accept(self, value: str) -> bool:
        if self.cur.kind == "op" and self.cur.value == value:
            self.i += 1
            return True
        return False

    def expect(self, value: str) -> None:
        if not self.accept(value):
            found = self.cur.value or "end of input"
            self.error(f"expected {value!r}, found {found!r}")

    def formula(self) -> Formula:
        if self.cur.kind == "ident" and self.cur.value in ("mu", "nu"):
            return self.binder()
        left = self.disjunction()
        if self.accept("->"):
            return imp(left, self.formula())
        return left

    def binder(self) -> Formula:
        kw = self.cur
        self.i += 1
        name = self.cur
        if name.kind != "ident" or name.value in KEYWORDS:
            self.error("expected a variable after binder")
        self.i += 1
        self.expect(".")
        body = self.formula()
        try:
            return (mu if kw.value == "mu" else nu)(name.value, body)
        except PositivityError as exc:
            raise FormulaSyntaxError(str(exc), kw.pos, self.text) from None

    def disjunction(self) -> Formula:
        items = [self.conjunction()]
        while self.accept("\\/"):
            items.append(self.conjunction())
        return disj(items)

    def conjunction(self) -> Formula:
        items = [self.unary()]
        while self.accept("/\\"):
            items.append(self.unary())
        return conj(items)

    def unary(self) -> Formula:
        tok = self.cur
        if self.accept("~"):
            return neg(self.unary())
        if self.accept("("):
            f = self.formula()
            self.expect(")")
            return f
        if tok.kind == "ident":
            if tok.value in ("mu", "nu"):
                return self.binder()
            self.i += 1
            if tok.value == "T":
                return TOP
            if tok.value == "F":
                return BOT
            return var(tok.value)
        self.error(f"unexpected {tok.value or 'end of input'!r}")
        raise AssertionError


def parse(text: str) -> Formula:
    """Parse and canonicalize; bound variables are alpha-renamed apart."""
    p = _Parser(text)
    f = p.formula()
    if p.cur.kind != "eof":
        p.error(f"unexpected {p.cur.value!r}")
    return rename_bound(f)


def parse_lines(text: str) -> list[Formula]:
    """One formula per non-blank line; ``#`` starts a comment."""
    out = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            out.append(parse(line))
    return out


# precedence levels: binder 0, implication 1, disjunction 2, conjunction 3, atom 4
def _level(f: Formula) -> int:
    return {MU: 0, NU: 0, IMP: 1, OR: 2, AND: 3}.get(f.tag, 4)


def to_text(f: Formula, tight: bool = False) -> str:
    """Concrete syntax; ``tight`` drops the blanks around binary operators."""
    memo: dict[Formula, str] = {}
    sep_and, sep_or, sep_imp = ("/\\", "\\/", "->") if tight else (" /\\ ", " \\/ ", " -> ")

    def wrap(g: Formula, ok: bool) -> str:
        s = go(g)
        return s if ok else f"({s})"

    def go(g: Formula) -> str:
        hit = memo.get(g)
        if hit is not None:
            return hit
        t = g.tag
        if t == "var":
            s = g.name
        elif g is TOP:
            s = "T"
        elif g is BOT:
            s = "F"
        elif t == AND:
            s = sep_and.join(wrap(c, _level(c) > 3) for c in g.args)
        elif t == OR:
            s = sep_or.join(wrap(c, _level(c) > 2) for c in g.args)
        elif t == IMP:
            a, b = g.args
            s = f"{wrap(a, _level(a) > 1)}{sep_imp}{wrap(b, _level(b) >= 1)}"
        else:
            kw = "mu" if t == MU else "nu"
            body = g.args[0]
            s = f"{kw} {g.name}. {wrap(body, _level(body) == 4)}"
        memo[g] = s
        return s

    return go(f)
