"""Prover-guided compaction of fixed-point free formulas.

Every rewrite is justified by a prover call, so the output is provably
equivalent to the input.  Work is bottom-up: a subformula is replaced by
T or F when it is provably so, and redundant children of a conjunction
(implied by the others) or of a disjunction (implying the others) are
dropped.
"""

from __future__ import annotations

from .formula import AND, BOT, IMP, TOP, VAR, Formula, conj, disj, imp
from .prover import Prover, default_prover

__all__ = ["simplify"]


def simplify(f: Formula, prover: Prover | None = None, max_children: int = 12) -> Formula:
    if not f.fp_free:
        raise ValueError("simplify expects a fixed-point free formula")
    p = prover or default_prover
    memo: dict[Formula, Formula] = {}

    def go(g: Formula) -> Formula:
        hit = memo.get(g)
        if hit is not None:
            return hit
        if g.tag == VAR or not g.args:
            memo[g] = g
            return g
        kids = [go(c) for c in g.args]
        if g.tag == IMP:
            r = imp(kids[0], kids[1])
        elif g.tag == AND:
            r = conj(_prune(kids, p, max_children, conj, lambda rest, c: p.entails(rest, c)))
        else:
            r = disj(_prune(kids, p, max_children, disj, lambda rest, c: p.entails([c], disj(rest))))
        if r.tag != VAR and r.args:
            if p.entails([], r):
                r = TOP
            elif p.entails([r], BOT):
                r = BOT
        memo[g] = r
        return r

    return go(f)


def _prune(kids, p, max_children, build, redundant):
    kids = list(dict.fromkeys(kids))
    if len(kids) > max_children:
        return kids
    # try the largest children first: dropping them saves the most
    order = sorted(kids, key=lambda c: -c.size)
    keep = list(order)
    for c in order:
        rest = [d for d in keep if d is not c]
        if rest and redundant(rest, c):
            keep = rest
    return keep
