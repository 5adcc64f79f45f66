"""Seeded random formula generators for property tests and benchmarks."""

from __future__ import annotations

import random
from typing import Sequence

from .formula import BOT, TOP, Formula, conj, disj, imp, mu, nu, var

__all__ = [
    "random_formula", "random_fp_free", "random_positive", "random_disjunctive",
    "random_strongly_positive", "random_atop_pairs", "random_sequent", "binder_depth",
]

DEFAULT_ATOMS = ("a", "b", "c")


def binder_depth(f: Formula) -> int:
    """Maximal nesting of binders."""
    memo: dict[Formula, int] = {}

    def go(g: Formula) -> int:
        if g in memo:
            return memo[g]
        inner = max((go(c) for c in g.args), default=0)
        r = inner + (1 if g.name is not None and g.args else 0)
        memo[g] = r
        return r

    return go(f)


class _Gen:
    def __init__(self, rng: random.Random, atoms: Sequence[str], binders: bool, max_depth: int,
                 bound_names: Sequence[str] = ("x", "z", "w")):
        self.rng = rng
        self.atoms = list(atoms)
        self.binders = binders
        self.max_depth = max_depth
        self.bound_names = list(bound_names)

    def leaf(self, scope: dict[str, bool], pol: bool) -> Formula:
        usable = [v for v, p in scope.items() if p == pol]
        r = self.rng.random()
        if usable and r < 0.45:
            return var(self.rng.choice(usable))
        if r > 0.95:
            return self.rng.choice((TOP, BOT))
        return var(self.rng.choice(self.atoms))

    def go(self, size: int, scope: dict[str, bool], pol: bool, depth: int) -> Formula:
        """``scope`` maps each bound variable to the polarity at its binder;
        a variable may only appear where the current polarity matches."""
        if size <= 1:
            return self.leaf(scope, pol)
        choices = ["and", "or", "imp"]
        free_names = [n for n in self.bound_names if n not in scope]
        if self.binders and depth < self.max_depth and free_names and size >= 3:
            choices += ["mu", "nu"]
        op = self.rng.choice(choices)
        if op in ("mu", "nu"):
            x = free_names[0]
            body = self.go(size - 1, {**scope, x: pol}, pol, depth + 1)
            return (mu if op == "mu" else nu)(x, body)
        left = self.rng.randint(1, size - 2) if size > 2 else 1
        right = max(size - 1 - left, 1)
        if op == "imp":
            return imp(self.go(left, scope, not pol, depth), self.go(right, scope, pol, depth))
        a, b = self.go(left, scope, pol, depth), self.go(right, scope, pol, depth)
        return conj(a, b) if op == "and" else disj(a, b)


def random_formula(rng: random.Random, size: int = 12, atoms: Sequence[str] = DEFAULT_ATOMS,
                   max_depth: int = 2, binder_first: bool = False) -> Formula:
    """A well-formed mu-formula with roughly ``size`` tree nodes."""
    g = _Gen(rng, atoms, True, max_depth)
    if binder_first:
        body = g.go(size - 1, {"x": True}, True, 1)
        return (mu if rng.random() < 0.7 else nu)("x", body)
    return g.go(size, {}, True, 0)


def random_fp_free(rng: random.Random, size: int = 8, atoms: Sequence[str] = DEFAULT_ATOMS) -> Formula:
    return _Gen(rng, atoms, False, 0).go(size, {}, True, 0)


def random_positive(rng: random.Random, x: str = "x", size: int = 8,
                    atoms: Sequence[str] = DEFAULT_ATOMS) -> Formula:
    """A fixed-point free formula in which ``x`` occurs only positively."""
    g = _Gen(rng, atoms, False, 0)
    return g.go(size, {x: True}, True, 0)


def random_disjunctive(rng: random.Random, x: str = "x", atoms: Sequence[str] = DEFAULT_ATOMS,
                       depth: int = 3, side_size: int = 2) -> Formula:
    """A formula from  phi ::= x | [alpha]phi | beta \\/ phi | phi \\/ phi."""
    def xfree() -> Formula:
        return random_fp_free(rng, rng.randint(1, side_size), atoms)

    def go(d: int) -> Formula:
        if d == 0:
            return var(x)
        r = rng.random()
        if r < 0.2:
            return var(x)
        if r < 0.5:
            return imp(xfree(), go(d - 1))
        if r < 0.75:
            return disj(xfree(), go(d - 1))
        return disj(go(d - 1), go(d - 1))

    out = go(depth)
    return out if x in out.free else var(x)


def random_strongly_positive(rng: random.Random, x: str = "x", atoms: Sequence[str] = DEFAULT_ATOMS,
                             depth: int = 3) -> Formula:
    def xfree() -> Formula:
        return random_fp_free(rng, rng.randint(1, 3), atoms)

    def go(d: int) -> Formula:
        if d == 0:
            return var(x)
        r = rng.random()
        if r < 0.15:
            return var(x)
        if r < 0.35:
            return imp(xfree(), go(d - 1))
        if r < 0.5:
            return disj(xfree(), go(d - 1))
        if r < 0.65:
            return conj(xfree(), go(d - 1))
        if r < 0.85:
            return disj(go(d - 1), go(d - 1))
        return conj(go(d - 1), go(d - 1))

    out = go(depth)
    return out if x in out.free else var(x)


def random_atop_pairs(rng: random.Random, n: int, atoms: Sequence[str] = DEFAULT_ATOMS,
                      size: int = 2) -> list[tuple[Formula, Formula]]:
    return [(random_fp_free(rng, rng.randint(1, size), atoms), random_fp_free(rng, rng.randint(1, size), atoms))
            for _ in range(n)]


def random_sequent(rng: random.Random, atoms: Sequence[str] = DEFAULT_ATOMS,
                   max_ctx: int = 2, size: int = 7) -> tuple[list[Formula], Formula]:
    ctx = [random_fp_free(rng, rng.randint(1, size), atoms) for _ in range(rng.randint(0, max_ctx))]
    return ctx, random_fp_free(rng, rng.randint(1, size), atoms)
