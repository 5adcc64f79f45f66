"""Closure ordinals, Ruitenburg numbers, the bound calculators, and the
families on which the bounds are tight.

Iterates are compared with the prover only.  Approximants of a least
fixed point increase, so ``phi^(n+1)(F) |- phi^n(F)`` alone decides
stabilization at ``n``.  For Ruitenburg numbers ``x`` stays free and both
directions are checked.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .formula import (BOT, IMP, OR, Formula, PositivityError, VarClass, classify, conj, disj, imp,
                      is_positive, substitute, var)
from .heyting import FiniteHeytingAlgebra, chain
from .normal_form import head_side, is_disjunctive, split, to_normal_form
from .prover import Prover, default_prover
from .syntax import to_text

__all__ = [
    "CapExceeded", "BoundViolation", "OrdinalResult", "BoundReport", "default_cap",
    "closure_ordinal", "ruitenburg_number", "bound_disjunctive", "bound_weakly_negative",
    "bound_conjunction", "bound_bekic", "bound_roll", "bound_diag", "bound_spos", "bound_atops",
    "family_phi_n", "family_chain_conj", "family_atop", "generic_atop", "family_side_phi_n", "bekic_tight_instance",
    "pair_closure_ordinal", "verify_bounds",
]


class CapExceeded(RuntimeError):
    pass


class BoundViolation(AssertionError):
    pass


def default_cap(f: Formula) -> int:
    """``2 * size + 2`` with size the node count."""
    return 2 * f.size + 2


@dataclass
class OrdinalResult:
    value: int
    approximants: list[Formula]
    cap_hit: bool = False
    wall_time: float = 0.0

    def __int__(self) -> int:
        return self.value


def _check(f: Formula, x: str) -> None:
    if not f.fp_free:
        raise ValueError("iteration needs a fixed-point free formula")
    if not is_positive(f, x):
        raise PositivityError(f"{x} is not positive in {to_text(f)}")


def closure_ordinal(f: Formula, x: str, cap: int | None = None, verify: bool = True,
                    prover: Prover | None = None,
                    compact: Callable[[Formula], Formula] | None = None) -> OrdinalResult:
    """Least ``n`` with ``f^(n+1)(F)`` provably equivalent to ``f^n(F)``.

    ``compact`` may replace each approximant by a provably equivalent one
    (see :mod:`muipc.simplify`) to keep iterates small.
    """
    _check(f, x)
    p = prover or default_prover
    cap = default_cap(f) if cap is None else cap
    if cap < 1:
        raise ValueError("cap must be at least 1")
    t0 = time.perf_counter()
    approx = [BOT]
    for n in range(cap + 1):
        nxt = substitute(f, x, approx[n])
        if compact is not None:
            nxt = compact(nxt)
        if p.leq(nxt, approx[n]):
            return OrdinalResult(n, approx, False, time.perf_counter() - t0)
        approx.append(nxt)
    if verify:
        raise CapExceeded(f"no stabilization within {cap} steps for {to_text(f)}")
    return OrdinalResult(cap, approx, True, time.perf_counter() - t0)


def ruitenburg_number(f: Formula, x: str, cap: int | None = None, verify: bool = True,
                      prover: Prover | None = None,
                      compact: Callable[[Formula], Formula] | None = None) -> int:
    """Least ``n`` with ``f^(n+2)`` provably equivalent to ``f^n`` (``x`` free)."""
    _check(f, x)
    p = prover or default_prover
    cap = default_cap(f) if cap is None else cap
    if cap < 1:
        raise ValueError("cap must be at least 1")
    its = [var(x), f]
    for n in range(cap + 1):
        nxt = substitute(f, x, its[-1])
        if compact is not None:
            nxt = compact(nxt)
        its.append(nxt)
        if p.equiv(its[n + 2], its[n]):
            return n
    if verify:
        raise CapExceeded(f"no Ruitenburg period within {cap} for {to_text(f)}")
    return cap


# ---------------------------------------------------------------------------
# bounds


def bound_disjunctive(d: Formula, x: str = "x") -> int:
    """``|Head| + 1`` for a disjunctive formula."""
    return len(head_side(d, x).head) + 1


def bound_weakly_negative(f: Formula, x: str = "x") -> int:
    from .eliminate import wn_decompose
    return len(wn_decompose(f, x).psis) + 1


def bound_conjunction(bounds: Sequence[int]) -> int:
    """Fold of ``cl(f /\\ g) <= cl(f) + cl(g) - 1``."""
    if not bounds:
        raise ValueError("no bounds to combine")
    acc = bounds[0]
    for b in bounds[1:]:
        # negative iterates are read as bottom, so two trivial conjuncts give 0
        acc = max(acc + b - 1, 0)
    return acc


def bound_bekic(m: int, n: int) -> int:
    """``(m + 1)(n + 1) - 1`` with ``m = cl_y(g)`` and ``n = cl(h)``."""
    return (m + 1) * (n + 1) - 1


def bound_roll(inner: int) -> int:
    return 1 + inner


def bound_diag(n: int, m: int) -> int:
    """``cl(h) * cl_y(f)``."""
    return n * m


def bound_spos(n_heads: int, m_sides: int) -> int:
    """Ruitenburg number bound ``(N + 1)(M + 1)`` for strongly positive formulas."""
    return (n_heads + 1) * (m_sides + 1)


def bound_atops(n_pairs: int) -> int:
    """Disjunctions of almost-topologies stabilize within 3 steps."""
    return 3


# ---------------------------------------------------------------------------
# families


def family_phi_n(n: int, x: str = "x") -> Formula:
    """``b \\/ (a1 -> x) \\/ ... \\/ (an -> x)``."""
    return disj([var("b")] + [imp(var(f"a{i}"), var(x)) for i in range(1, n + 1)])


def family_side_phi_n(n: int, x: str = "x") -> Formula:
    """``\\/ ai -> (bi \\/ x)``, the family compared for cl against rho."""
    return disj([imp(var(f"a{i}"), disj(var(f"b{i}"), var(x))) for i in range(1, n + 1)])


def family_chain_conj(k: int, x: str = "x") -> tuple[Formula, FiniteHeytingAlgebra, dict[str, int]]:
    """``/\\_{j=1..k-1} (x -> a(j-1)) -> aj`` with ``F < a0 < ... < a(k-1) < T``
    interpreted in the ``(k+2)``-element chain."""
    if k < 1:
        raise ValueError("k must be at least 1")
    xv = var(x)
    f = conj([imp(imp(xv, var(f"a{j - 1}")), var(f"a{j}")) for j in range(1, k)])
    h = chain(k + 2)
    val = {f"a{j}": j + 1 for j in range(k)}
    return f, h, val


def family_atop(pairs: Sequence[tuple[Formula, Formula]], x: str = "x") -> Formula:
    """``\\/_i (x -> ai) -> bi``."""
    xv = var(x)
    return disj([imp(imp(xv, a), b) for a, b in pairs])


def generic_atop(n: int, x: str = "x") -> Formula:
    return family_atop([(var(f"a{i}"), var(f"b{i}")) for i in range(1, n + 1)], x)


@dataclass(frozen=True)
class BekicInstance:
    """Monotone ``<f, g>`` on the product of an ``(n+1)``-chain and an
    ``((n+1)m+1)``-chain on which the Bekic bound is attained."""

    m: int
    n: int
    literal: bool = False

    @property
    def p_top(self) -> int:
        return self.n

    @property
    def q_top(self) -> int:
        return (self.n + 1) * self.m

    def _zk(self, y: int) -> tuple[int, int]:
        return divmod(y, self.m)

    def f(self, x: int, y: int) -> int:
        z, _ = self._zk(y)
        return x if z <= x else min(x + 1, self.p_top)

    def g(self, x: int, y: int) -> int:
        z, k = self._zk(y)
        if z < x and not self.literal:
            # taken literally, x*m + k + 1 drops at block boundaries below x;
            # a constant keeps g monotone without changing mu_y g or h
            return x * self.m + 1
        return x * self.m + k + 1 if z == x else (x + 1) * self.m

    def step(self, s: tuple[int, int]) -> tuple[int, int]:
        return self.f(*s), self.g(*s)

    def is_monotone(self) -> bool:
        pts = list(itertools.product(range(self.p_top + 1), range(self.q_top + 1)))
        for (a, b), (c, d) in itertools.product(pts, pts):
            if a <= c and b <= d:
                fa, fc = self.step((a, b)), self.step((c, d))
                if not (fa[0] <= fc[0] and fa[1] <= fc[1]):
                    return False
        return True


def bekic_tight_instance(m: int, n: int, literal: bool = False) -> BekicInstance:
    if m < 1 or n < 1:
        raise ValueError("m and n must be at least 1")
    return BekicInstance(m, n, literal)


def pair_closure_ordinal(step: Callable[[tuple], tuple], start: tuple) -> tuple[tuple, int]:
    """Kleene iteration of a monotone map from ``start``: (fixpoint, steps)."""
    cur, n = start, 0
    while True:
        nxt = step(cur)
        if nxt == cur:
            return cur, n
        cur, n = nxt, n + 1


# ---------------------------------------------------------------------------
# bound verification


@dataclass
class BoundReport:
    formula: Formula
    var: str
    var_class: VarClass
    bounds: dict[str, int]
    rho_bounds: dict[str, int]
    computed: OrdinalResult
    rho: int | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def cl(self) -> int:
        return self.computed.value

    def ok(self) -> bool:
        if any(self.cl > b for b in self.bounds.values()):
            return False
        if self.rho is not None:
            if any(self.rho > b for b in self.rho_bounds.values()) or self.cl > self.rho:
                return False
        return True

    def to_json(self) -> dict:
        return {"formula": to_text(self.formula), "var": self.var, "class": self.var_class.value,
                "cl": self.cl, "rho": self.rho, "bounds": self.bounds,
                "rho_bounds": self.rho_bounds, "wall_time": round(self.computed.wall_time, 6)}


def _atop_pairs(f: Formula, x: str) -> list[tuple[Formula, Formula]] | None:
    kids = f.args if f.tag == OR else (f,)
    pairs = []
    for k in kids:
        if k.tag != IMP or x in k.args[1].free:
            return None
        a = k.args[0]
        if a.tag != IMP or a.args[0] is not var(x) or x in a.args[1].free:
            return None
        pairs.append((a.args[1], k.args[1]))
    return pairs


def applicable_bounds(f: Formula, x: str) -> tuple[dict[str, int], dict[str, int], list[str]]:
    """Bounds on cl and on rho that the structure of ``f`` licenses."""
    cls = classify(f, x)
    cl_b: dict[str, int] = {}
    rho_b: dict[str, int] = {"ruitenburg": default_cap(f)}
    notes: list[str] = []
    if cls is VarClass.ABSENT:
        cl_b["absent"] = 1
        return cl_b, rho_b, notes
    if is_disjunctive(f, x):
        cl_b["disjunctive"] = bound_disjunctive(f, x)
    pairs = _atop_pairs(f, x)
    if pairs:
        cl_b["atops"] = bound_atops(len(pairs))
    if cls is VarClass.WEAKLY_NEGATIVE:
        cl_b["weakly_negative"] = bound_weakly_negative(f, x)
    elif cls is VarClass.STRONGLY_POSITIVE:
        nf = to_normal_form(f, x)
        if nf.disjuncts:
            cl_b["conjunction"] = bound_conjunction([bound_disjunctive(d.formula, x) for d in nf.disjuncts])
            heads, sides = set(), set()
            for d in nf.disjuncts:
                hs = head_side(d)
                heads |= hs.head
                sides |= hs.side
            rho_b["spos"] = bound_spos(len(heads), len(sides))
            notes.append(f"N={len(heads)} M={len(sides)}")
    elif cls is VarClass.MIXED_POSITIVE:
        # mu x. phi = mu y. mu x. psi(x, y): diag with the conjunction bound for
        # the inner variable and the weakly negative bound for the outer one
        from .eliminate import mu_disjunctive
        sp = split(f, x)
        nf = to_normal_form(sp.renamed, x)
        if nf.disjuncts:
            inner = bound_conjunction([bound_disjunctive(d.formula, x) for d in nf.disjuncts])
            chi = conj([nf.x_free_part] + [mu_disjunctive(d) for d in nf.disjuncts])
            y = sp.wneg_var
            outer = bound_weakly_negative(chi, y) if y in chi.free else 1
            cl_b["diag"] = bound_diag(outer, inner)
    return cl_b, rho_b, notes


def verify_bounds(f: Formula, x: str, with_rho: bool = True, cap: int | None = None,
                  prover: Prover | None = None, strict: bool = True) -> BoundReport:
    cl_b, rho_b, notes = applicable_bounds(f, x)
    res = closure_ordinal(f, x, cap=cap, prover=prover)
    rho = ruitenburg_number(f, x, cap=cap, prover=prover) if with_rho else None
    rep = BoundReport(f, x, classify(f, x), cl_b, rho_b, res, rho, notes)
    if strict and not rep.ok():
        raise BoundViolation(f"bound violated: {rep.to_json()}")
    return rep
