"""Decision procedure for intuitionistic propositional logic.

The search follows Dyckhoff's contraction-free calculus G4ip: invertible
rules are applied eagerly while saturating the context, and the only
backtracking points are the choice of a disjunct on the right and the
left rule for nested implications ``(C -> D) -> B``.  Sequents are
memoized after saturation.  Before any backtracking a sequent is checked
classically (bit-parallel truth tables); a classically invalid sequent
is not intuitionistically derivable, which prunes most failing branches.
"""

from __future__ import annotations

import os
import sys
import threading
from dataclasses import dataclass, field
from typing import Iterable

from .formula import AND, BOT, IMP, MU, NU, OR, TOP, VAR, Formula, conj, imp

__all__ = [
    "FixpointInSequentError", "Sequent", "ProofOutcome", "Prover", "prove", "equiv",
    "entails", "leq", "default_prover",
]

DEFAULT_MEMO_SIZE = int(os.environ.get("MUIPC_MEMO_SIZE", "500000"))
_CLASSICAL_MAX_ATOMS = 20

sys.setrecursionlimit(max(sys.getrecursionlimit(), 50_000))


class FixpointInSequentError(TypeError):
    """The prover only accepts fixed-point free formulas."""


@dataclass(frozen=True)
class Sequent:
    context: tuple[Formula, ...]
    goal: Formula

    @classmethod
    def of(cls, context: Iterable[Formula], goal: Formula) -> "Sequent":
        return cls(tuple(sorted(set(context), key=lambda f: f.key)), goal)

    def __str__(self) -> str:
        lhs = ", ".join(str(f) for f in self.context)
        return f"{lhs} |- {self.goal}"


@dataclass(frozen=True)
class ProofOutcome:
    derivable: bool
    nodes: int = 0
    max_depth: int = 0


@dataclass
class _Saturated:
    ctx: frozenset
    atoms: frozenset
    disjunctions: list
    nested: list


class _Closed(Exception):
    pass


@dataclass
class _Search:
    prover: "Prover"
    bits: dict[str, int]
    full: int
    classical: dict = field(default_factory=dict)
    nodes: int = 0
    max_depth: int = 0

    # classical truth tables, one bit per assignment of the problem's atoms
    def cval(self, f: Formula) -> int:
        hit = self.classical.get(f)
        if hit is not None:
            return hit
        t = f.tag
        if t == VAR:
            r = self.bits[f.name]
        elif f is TOP:
            r = self.full
        elif f is BOT:
            r = 0
        elif t == AND:
            r = self.full
            for c in f.args:
                r &= self.cval(c)
        elif t == OR:
            r = 0
            for c in f.args:
                r |= self.cval(c)
        else:
            r = (~self.cval(f.args[0]) & self.full) | self.cval(f.args[1])
        self.classical[f] = r
        return r

    def classically_valid(self, ctx: Iterable[Formula], goal: Formula) -> bool:
        if self.full == 0:
            return True
        acc = self.full
        for g in ctx:
            acc &= self.cval(g)
            if not acc:
                return True
        return acc & ~self.cval(goal) == 0

    def saturate(self, ctx: Iterable[Formula]) -> _Saturated:
        atoms: set[Formula] = set()
        waiting: dict[Formula, list[Formula]] = {}
        disjunctions: dict[Formula, None] = {}
        nested: dict[Formula, None] = {}
        seen: set[Formula] = set()
        work = list(ctx)
        while work:
            f = work.pop()
            if f in seen:
                continue
            seen.add(f)
            t = f.tag
            if f is BOT:
                raise _Closed
            if f is TOP:
                continue
            if t == VAR:
                atoms.add(f)
                work.extend(waiting.pop(f, ()))
            elif t == AND:
                work.extend(f.args)
            elif t == OR:
                disjunctions[f] = None
            elif t == IMP:
                a, b = f.args
                ta = a.tag
                if ta == VAR:
                    if a in atoms:
                        work.append(b)
                    else:
                        waiting.setdefault(a, []).append(b)
                elif ta == AND:
                    first, rest = a.args[0], conj(a.args[1:])
                    work.append(imp(first, imp(rest, b)))
                elif ta == OR:
                    work.extend(imp(c, b) for c in a.args)
                elif ta == IMP:
                    nested[f] = None
                else:
                    raise FixpointInSequentError(f"not fixed-point free: {f}")
            else:
                raise FixpointInSequentError(f"not fixed-point free: {f}")
        pending = [imp(p, b) for p, bs in waiting.items() for b in bs]
        ctx_set = frozenset(atoms) | frozenset(pending) | frozenset(disjunctions) | frozenset(nested)
        return _Saturated(ctx_set, frozenset(atoms), sorted(disjunctions, key=lambda g: g.key),
                          sorted(nested, key=lambda g: g.key))

    def prove(self, ctx: frozenset, goal: Formula, depth: int) -> bool:
        self.nodes += 1
        if depth > self.max_depth:
            self.max_depth = depth
        # invertible right rules
        while True:
            t = goal.tag
            if goal is TOP:
                return True
            if t == AND:
                return all(self.prove(ctx, c, depth + 1) for c in goal.args)
            if t == IMP:
                ctx = ctx | {goal.args[0]}
                goal = goal.args[1]
                continue
            if t in (MU, NU):
                raise FixpointInSequentError(f"not fixed-point free: {goal}")
            break
        try:
            sat = self.saturate(ctx)
        except _Closed:
            return True
        if goal.tag == VAR and goal in sat.atoms:
            return True
        memo = self.prover._memo
        key = (sat.ctx, goal)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if not self.classically_valid(sat.ctx, goal):
            res = False
        else:
            res = self._search(sat, goal, depth)
        if len(memo) >= self.prover.memo_size:
            memo.clear()
        memo[key] = res
        return res

    def _search(self, sat: _Saturated, goal: Formula, depth: int) -> bool:
        if sat.disjunctions:
            d = sat.disjunctions[0]
            rest = sat.ctx - {d}
            return all(self.prove(rest | {c}, goal, depth + 1) for c in d.args)
        if goal.tag == OR:
            for c in goal.args:
                if self.prove(sat.ctx, c, depth + 1):
                    return True
        for f in sat.nested:
            (c, d), b = f.args[0].args, f.args[1]
            rest = sat.ctx - {f}
            if self.prove(rest | {imp(d, b)}, imp(c, d), depth + 1) and \
                    self.prove(rest | {b}, goal, depth + 1):
                return True
        return False


class Prover:
    """G4ip search with a bounded memo table shared across calls."""

    def __init__(self, memo_size: int = DEFAULT_MEMO_SIZE):
        self.memo_size = memo_size
        self._memo: dict = {}
        self._lock = threading.Lock()

    def clear(self) -> None:
        self._memo.clear()

    def prove(self, s: Sequent) -> ProofOutcome:
        for f in s.context + (s.goal,):
            if not f.fp_free:
                raise FixpointInSequentError(f"not fixed-point free: {f}")
        names = sorted(frozenset().union(s.goal.free, *(f.free for f in s.context)))
        if len(names) > _CLASSICAL_MAX_ATOMS:
            bits, full = {}, 0
        else:
            bits, full = _truth_table_bits(names)
        with self._lock:
            search = _Search(self, bits, full)
            ok = search.prove(frozenset(s.context), s.goal, 0)
        return ProofOutcome(ok, search.nodes, search.max_depth)

    def prove_sequent(self, context: Iterable[Formula], goal: Formula) -> ProofOutcome:
        return self.prove(Sequent.of(context, goal))

    def entails(self, context: Iterable[Formula], goal: Formula) -> bool:
        return self.prove(Sequent.of(context, goal)).derivable

    def leq(self, f: Formula, g: Formula) -> bool:
        return self.entails([f], g)

    def equiv(self, f: Formula, g: Formula) -> bool:
        if f is g:
            return True
        return self.leq(f, g) and self.leq(g, f)


def _truth_table_bits(names: list[str]) -> tuple[dict[str, int], int]:
    n = len(names)
    rows = 1 << n
    full = (1 << rows) - 1
    bits = {}
    for i, name in enumerate(names):
        # bit r of the mask is set iff atom i is true in assignment r
        block = 1 << i
        pattern = ((1 << block) - 1) << block
        period = 2 * block
        mask = 0
        for start in range(0, rows, period):
            mask |= pattern << start
        bits[name] = mask & full
    return bits, full


default_prover = Prover()


def prove(s: Sequent) -> ProofOutcome:
    return default_prover.prove(s)


def entails(context: Iterable[Formula], goal: Formula) -> bool:
    return default_prover.entails(context, goal)


def leq(f: Formula, g: Formula) -> bool:
    return default_prover.leq(f, g)


def equiv(f: Formula, g: Formula) -> bool:
    return default_prover.equiv(f, g)
