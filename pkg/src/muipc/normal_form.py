"""Preprocessing for least fixed points: strength splitting, the
conjunction-of-disjunctive-formulas normal form, and Head/Side sets.

Formulas are n-ary and canonical, so the binary grammar productions are
matched up to associativity and commutativity: in an ``Or`` node every
child without ``x`` is a side formula (collected into one disjunction),
and in an ``And`` node every child without ``x`` is a ``gamma``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .formula import (AND, IMP, OR, TOP, VAR, Formula, PositivityError, VarClass,
                      all_names, classify, conj, disj, fresh_name, imp, is_positive, rebuild, var)

__all__ = [
    "NormalFormError", "SplitResult", "DisjunctiveFormula", "NormalForm", "HeadSide",
    "split", "to_normal_form", "is_disjunctive", "head_side",
]


class NormalFormError(ValueError):
    pass


@dataclass(frozen=True)
class SplitResult:
    renamed: Formula
    spos_var: str
    wneg_var: str
    original: Formula

    @property
    def uses_wneg(self) -> bool:
        return self.wneg_var in self.renamed.free

    def restore(self) -> Formula:
        from .formula import substitute
        return substitute(self.renamed, self.wneg_var, var(self.spos_var))


def split(f: Formula, x: str, avoid=()) -> SplitResult:
    """Rename every weakly negative occurrence of ``x`` to a fresh ``y``."""
    if not is_positive(f, x):
        raise PositivityError(f"{x} is not positive in {f}")
    y = fresh_name("y", all_names(f) | f.free | {x} | set(avoid))
    yv = var(y)
    memo: dict[tuple[Formula, bool], Formula] = {}

    def go(g: Formula, under: bool) -> Formula:
        if x not in g.free:
            return g
        k = (g, under)
        if k in memo:
            return memo[k]
        if g.tag == VAR:
            r = yv if under else g
        elif g.tag == IMP:
            r = imp(go(g.args[0], True), go(g.args[1], under))
        else:
            r = rebuild(g, [go(c, under) for c in g.args])
        memo[k] = r
        return r

    return SplitResult(go(f, False), x, y, f)


def is_disjunctive(f: Formula, x: str) -> bool:
    """Membership in  phi ::= x | [alpha]phi | beta \\/ phi | phi \\/ phi."""
    if x not in f.free:
        return False
    t = f.tag
    if t == VAR:
        return True
    if t == IMP:
        return x not in f.args[0].free and is_disjunctive(f.args[1], x)
    if t == OR:
        return all(is_disjunctive(c, x) for c in f.args if x in c.free)
    return False


@dataclass(frozen=True)
class DisjunctiveFormula:
    formula: Formula
    var: str

    def __post_init__(self):
        if not is_disjunctive(self.formula, self.var):
            raise NormalFormError(f"{self.formula} is not disjunctive in {self.var}")

    def __str__(self) -> str:
        return str(self.formula)


@dataclass(frozen=True)
class HeadSide:
    head: frozenset
    side: frozenset

    def sorted_head(self) -> list[Formula]:
        return sorted(self.head, key=lambda g: g.key)

    def sorted_side(self) -> list[Formula]:
        return sorted(self.side, key=lambda g: g.key)


def head_side(d: Formula | DisjunctiveFormula, x: str | None = None) -> HeadSide:
    if isinstance(d, DisjunctiveFormula):
        f, x = d.formula, d.var
    else:
        f = d
        if x is None:
            raise TypeError("variable required")
        if not is_disjunctive(f, x):
            raise NormalFormError(f"{f} is not disjunctive in {x}")
    head: set[Formula] = set()
    side: set[Formula] = set()

    def go(g: Formula) -> None:
        if g.tag == IMP:
            head.add(g.args[0])
            go(g.args[1])
        elif g.tag == OR:
            free = [c for c in g.args if x not in c.free]
            if free:
                side.add(disj(free))
            for c in g.args:
                if x in c.free:
                    go(c)

    go(f)
    return HeadSide(frozenset(head), frozenset(side))


@dataclass(frozen=True)
class NormalForm:
    x_free_part: Formula
    disjuncts: tuple[DisjunctiveFormula, ...]
    var: str

    def as_formula(self) -> Formula:
        return conj([self.x_free_part, *(d.formula for d in self.disjuncts)])

    def __str__(self) -> str:
        parts = [str(self.x_free_part)] + [str(d) for d in self.disjuncts]
        return " ; ".join(parts)


def _ordered(items) -> list[Formula]:
    return list(dict.fromkeys(items))


def to_normal_form(f: Formula, x: str) -> NormalForm:
    """The tr/c construction: ``f`` is equivalent to ``c(f)`` conjoined with
    every member of ``tr(f)``.  Members of ``tr`` that canonical rewriting
    turns x-free are moved into the x-free part."""
    if x not in f.free:
        raise NormalFormError(f"{x} does not occur in {f}")
    cls = classify(f, x)
    if cls is not VarClass.STRONGLY_POSITIVE:
        raise NormalFormError(f"{f} is not strongly positive in {x} ({cls.value})")
    memo: dict[Formula, tuple[list[Formula], Formula]] = {}

    def go(g: Formula) -> tuple[list[Formula], Formula]:
        hit = memo.get(g)
        if hit is not None:
            return hit
        t = g.tag
        if t == VAR:
            res = ([g], TOP)
        elif t == IMP:
            a = g.args[0]
            tr, c = go(g.args[1])
            res = (_ordered(imp(a, d) for d in tr), imp(a, c))
        elif t == AND:
            gammas = [c for c in g.args if x not in c.free]
            tr: list[Formula] = []
            cs = list(gammas)
            for c in g.args:
                if x in c.free:
                    t1, c1 = go(c)
                    tr.extend(t1)
                    cs.append(c1)
            res = (_ordered(tr), conj(cs))
        elif t == OR:
            betas = [c for c in g.args if x not in c.free]
            parts = [go(c) for c in g.args if x in c.free]
            tr, c = parts[0]
            for t2, c2 in parts[1:]:
                tr = _ordered([disj(c, d2) for d2 in t2] + [disj(c2, d1) for d1 in tr]
                              + [disj(d1, d2) for d1 in tr for d2 in t2])
                c = disj(c, c2)
            if betas:
                beta = disj(betas)
                tr = _ordered(disj(beta, d) for d in tr)
                c = disj(beta, c)
            res = (tr, c)
        else:
            raise NormalFormError(f"unexpected {t} node in normal form input")
        memo[g] = res
        return res

    tr, c = go(f)
    moved = [d for d in tr if x not in d.free]
    kept = [d for d in tr if x in d.free]
    return NormalForm(conj([c, *moved]), tuple(DisjunctiveFormula(d, x) for d in kept), x)
