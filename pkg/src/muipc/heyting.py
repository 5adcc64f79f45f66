"""Finite Heyting algebras as brute-force semantic oracles.

Algebras are stored as full operation tables over the elements
``0..n-1``.  Evaluation is vectorized with numpy: a valuation may map
each variable to an array of elements, and the formula is evaluated for
every entry at once.  Fixed points are always computed by Kleene
iteration, never by symbolic elimination, so this module stays
independent of the eliminator it is used to check.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Mapping, Sequence

import numpy as np

from .formula import AND, BOT, IMP, MU, OR, TOP, VAR, Formula, is_positive

__all__ = [
    "PosetError", "AlgebraError", "UnboundVariableError", "FinitePoset",
    "FiniteHeytingAlgebra", "upset_algebra", "chain", "boolean", "evaluate", "eval_formula",
    "lfp_iterate", "gfp_iterate", "all_valuations", "posets", "refute_equiv",
    "parse_poset", "kripke_phi_n_model",
]


class PosetError(ValueError):
    pass


class AlgebraError(ValueError):
    pass


class UnboundVariableError(KeyError):
    pass


@dataclass(frozen=True)
class FinitePoset:
    """Partial order on ``0..n-1``; ``leq[i][j]`` means ``i <= j``."""

    n: int
    leq: tuple[tuple[bool, ...], ...]

    def __post_init__(self):
        n, r = self.n, self.leq
        if len(r) != n or any(len(row) != n for row in r):
            raise PosetError("order table has the wrong shape")
        for i in range(n):
            if not r[i][i]:
                raise PosetError(f"not reflexive at {i}")
            for j in range(n):
                if i != j and r[i][j] and r[j][i]:
                    raise PosetError(f"not antisymmetric: {i}, {j}")
                for k in range(n):
                    if r[i][j] and r[j][k] and not r[i][k]:
                        raise PosetError(f"not transitive: {i} <= {j} <= {k}")

    @classmethod
    def from_pairs(cls, n: int, pairs: Sequence[tuple[int, int]]) -> "FinitePoset":
        """Reflexive-transitive closure of the given ``i < j`` pairs."""
        r = [[i == j for j in range(n)] for i in range(n)]
        for i, j in pairs:
            if not (0 <= i < n and 0 <= j < n):
                raise PosetError(f"pair ({i}, {j}) out of range")
            r[i][j] = True
        for k in range(n):
            for i in range(n):
                if r[i][k]:
                    for j in range(n):
                        if r[k][j]:
                            r[i][j] = True
        return cls(n, tuple(tuple(row) for row in r))

    @classmethod
    def chain(cls, n: int) -> "FinitePoset":
        return cls(n, tuple(tuple(i <= j for j in range(n)) for i in range(n)))

    @classmethod
    def antichain(cls, n: int) -> "FinitePoset":
        return cls(n, tuple(tuple(i == j for j in range(n)) for i in range(n)))

    def upsets(self) -> list[int]:
        """Upward closed subsets as bitmasks, sorted by (cardinality, mask)."""
        out = []
        for mask in range(1 << self.n):
            if all(not (mask >> i) & 1 or all((mask >> j) & 1 for j in range(self.n) if self.leq[i][j])
                   for i in range(self.n)):
                out.append(mask)
        out.sort(key=lambda m: (bin(m).count("1"), m))
        return out

    def pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.n) for j in range(self.n) if i != j and self.leq[i][j]]

    def to_text(self) -> str:
        lines = [str(self.n)] + [f"{i}<{j}" for i, j in self.pairs()]
        return "\n".join(lines)


def parse_poset(text: str) -> FinitePoset:
    """Line format: the element count, then one ``i<j`` pair per line."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise PosetError("empty poset description")
    try:
        n = int(lines[0])
        pairs = []
        for ln in lines[1:]:
            i, j = ln.replace(" ", "").split("<")
            pairs.append((int(i), int(j)))
    except ValueError as exc:
        raise PosetError(f"malformed poset description: {exc}") from None
    return FinitePoset.from_pairs(n, pairs)


@dataclass(frozen=True, eq=False)
class FiniteHeytingAlgebra:
    """Tables over ``0..n-1``.  Identities are checked on construction."""

    meet: np.ndarray
    join: np.ndarray
    imp: np.ndarray
    bot: int
    top: int
    labels: tuple[str, ...] = ()
    check: bool = True
    poset: FinitePoset | None = field(default=None, compare=False)

    def __post_init__(self):
        n = self.meet.shape[0]
        for t in (self.meet, self.join, self.imp):
            if t.shape != (n, n):
                raise AlgebraError("tables must be square and of equal size")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(i) for i in range(n)))
        if self.check:
            self.check_laws()

    @property
    def n(self) -> int:
        return self.meet.shape[0]

    def __len__(self) -> int:
        return self.n

    @cached_property
    def leq(self) -> np.ndarray:
        return self.meet == np.arange(self.n)[:, None]

    def le(self, a: int, b: int) -> bool:
        return bool(self.meet[a, b] == a)

    def check_laws(self) -> None:
        m, j, i = self.meet, self.join, self.imp
        idx = np.arange(self.n)
        x, y = np.meshgrid(idx, idx, indexing="ij")
        problems = []
        if not (m == m.T).all() or not (j == j.T).all():
            problems.append("meet/join not commutative")
        if not (m[x, j[x, y]] == x).all() or not (j[x, m[x, y]] == x).all():
            problems.append("absorption fails")
        if not (m[x, i[x, y]] == m[x, y]).all():
            problems.append("x /\\ (x -> y) != x /\\ y")
        if not (m[x, i[y, x]] == x).all():
            problems.append("x /\\ (y -> x) != x")
        if not (i[idx, idx] == self.top).all():
            problems.append("x -> x != top")
        if not (m[self.bot, idx] == self.bot).all() or not (m[self.top, idx] == idx).all():
            problems.append("bot/top not extremal")
        for z in range(self.n):
            if not (i[x, m[y, z]] == m[i[x, y], i[x, z]]).all():
                problems.append("x -> (y /\\ z) != (x -> y) /\\ (x -> z)")
                break
            if not (m[x, m[y, z]] == m[m[x, y], z]).all() or not (j[x, j[y, z]] == j[j[x, y], z]).all():
                problems.append("not associative")
                break
        if problems:
            raise AlgebraError("; ".join(problems))

    def element(self, label: str) -> int:
        return self.labels.index(label)


def _tables(n: int, meet, join, imp) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    m = np.array([[meet(a, b) for b in range(n)] for a in range(n)], dtype=np.int64)
    j = np.array([[join(a, b) for b in range(n)] for a in range(n)], dtype=np.int64)
    i = np.array([[imp(a, b) for b in range(n)] for a in range(n)], dtype=np.int64)
    return m, j, i


def upset_algebra(p: FinitePoset, check: bool = True) -> FiniteHeytingAlgebra:
    """Upsets of ``p`` ordered by inclusion; ``U -> V`` is the largest upset
    inside the complement of ``U`` union ``V``."""
    ups = p.upsets()
    index = {u: k for k, u in enumerate(ups)}
    full = (1 << p.n) - 1

    def interior(mask: int) -> int:
        # points all of whose successors lie in mask
        out = 0
        for a in range(p.n):
            if all((mask >> b) & 1 for b in range(p.n) if p.leq[a][b]):
                out |= 1 << a
        return out

    m, j, i = _tables(len(ups),
                      lambda a, b: index[ups[a] & ups[b]],
                      lambda a, b: index[ups[a] | ups[b]],
                      lambda a, b: index[interior((full & ~ups[a]) | ups[b])])
    labels = tuple("{" + ",".join(str(k) for k in range(p.n) if (u >> k) & 1) + "}" for u in ups)
    return FiniteHeytingAlgebra(m, j, i, index[0], index[full], labels, check, p)


def chain(k: int) -> FiniteHeytingAlgebra:
    """The ``k``-element chain ``0 < 1 < ... < k-1``."""
    if k < 1:
        raise AlgebraError("a chain needs at least one element")
    top = k - 1
    m, j, i = _tables(k, min, max, lambda a, b: top if a <= b else b)
    return FiniteHeytingAlgebra(m, j, i, 0, top)


def boolean(atoms: int) -> FiniteHeytingAlgebra:
    return upset_algebra(FinitePoset.antichain(atoms))


# ---------------------------------------------------------------------------
# evaluation


Valuation = Mapping[str, "int | np.ndarray"]


def evaluate(f: Formula, h: FiniteHeytingAlgebra, v: Valuation) -> np.ndarray:
    """Vectorized evaluation; every valuation entry broadcasts together."""
    env = {k: np.asarray(a, dtype=np.int64) for k, a in v.items()}
    shape = np.broadcast_shapes(*(a.shape for a in env.values())) if env else ()
    return _Evaluator(h, shape).go(f, env)


class _Evaluator:
    def __init__(self, h: FiniteHeytingAlgebra, shape):
        self.h = h
        self.shape = shape

    def const(self, e: int) -> np.ndarray:
        return np.full(self.shape, e, dtype=np.int64)

    def go(self, f: Formula, env: dict) -> np.ndarray:
        h, t = self.h, f.tag
        if t == VAR:
            try:
                return np.broadcast_to(env[f.name], self.shape)
            except KeyError:
                raise UnboundVariableError(f.name) from None
        if f is TOP:
            return self.const(h.top)
        if f is BOT:
            return self.const(h.bot)
        if t == AND:
            out = self.go(f.args[0], env)
            for c in f.args[1:]:
                out = h.meet[out, self.go(c, env)]
            return out
        if t == OR:
            out = self.go(f.args[0], env)
            for c in f.args[1:]:
                out = h.join[out, self.go(c, env)]
            return out
        if t == IMP:
            return h.imp[self.go(f.args[0], env), self.go(f.args[1], env)]
        x, body = f.name, f.args[0]
        cur = self.const(h.bot if t == MU else h.top)
        while True:
            nxt = self.go(body, {**env, x: cur})
            if np.array_equal(nxt, cur):
                return cur
            cur = nxt


def eval_formula(f: Formula, h: FiniteHeytingAlgebra, v: Mapping[str, int]) -> int:
    """Scalar evaluation of ``f`` under a valuation of its free variables."""
    return int(evaluate(f, h, {k: int(e) for k, e in v.items()}))


def _iterate(f: Formula, x: str, h: FiniteHeytingAlgebra, v: Mapping[str, int], start: int) -> tuple[int, int]:
    if not is_positive(f, x):
        raise ValueError(f"{x} is not positive in {f}")
    cur, steps = start, 0
    while True:
        nxt = eval_formula(f, h, {**v, x: cur})
        if nxt == cur:
            return cur, steps
        cur, steps = nxt, steps + 1


def lfp_iterate(f: Formula, x: str, h: FiniteHeytingAlgebra, v: Mapping[str, int]) -> tuple[int, int]:
    """Least fixed point from bottom, with the number of strict steps taken."""
    return _iterate(f, x, h, v, h.bot)


def gfp_iterate(f: Formula, x: str, h: FiniteHeytingAlgebra, v: Mapping[str, int]) -> tuple[int, int]:
    return _iterate(f, x, h, v, h.top)


def all_valuations(names: Sequence[str], h: FiniteHeytingAlgebra) -> dict[str, np.ndarray]:
    """Every valuation of ``names`` in ``h`` laid out along one axis."""
    k = len(names)
    if k == 0:
        return {}
    grids = np.meshgrid(*([np.arange(h.n)] * k), indexing="ij")
    return {name: g.reshape(-1) for name, g in zip(names, grids)}


# ---------------------------------------------------------------------------
# poset enumeration


def _canonical(n: int, rel: frozenset) -> tuple:
    best = None
    for perm in itertools.permutations(range(n)):
        code = tuple(sorted((perm[i], perm[j]) for i, j in rel))
        if best is None or code < best:
            best = code
    return best


_POSET_CACHE: dict[int, list[FinitePoset]] = {}


def posets(n: int) -> list[FinitePoset]:
    """Posets on ``n`` elements, one per isomorphism class.

    Built by adding a new maximal element above a down-closed subset of a
    smaller poset, deduplicated by a canonical relabelling.
    """
    if n in _POSET_CACHE:
        return _POSET_CACHE[n]
    if n == 0:
        res = [FinitePoset(0, ())]
    else:
        seen = {}
        for p in posets(n - 1):
            below = [frozenset(j for j in range(p.n) if p.leq[j][i]) for i in range(p.n)]
            for mask in range(1 << p.n):
                down = frozenset(i for i in range(p.n) if (mask >> i) & 1)
                if any(not below[i] <= down for i in down):
                    continue
                rel = frozenset(p.pairs()) | frozenset((i, n - 1) for i in down)
                code = _canonical(n, rel)
                if code not in seen:
                    seen[code] = FinitePoset.from_pairs(n, list(code))
        res = list(seen.values())
    _POSET_CACHE[n] = res
    return res


def posets_upto(max_size: int, min_size: int = 1) -> Iterator[FinitePoset]:
    for n in range(min_size, max_size + 1):
        yield from posets(n)


_ALGEBRA_CACHE: dict[FinitePoset, FiniteHeytingAlgebra] = {}


def cached_upset_algebra(p: FinitePoset) -> FiniteHeytingAlgebra:
    h = _ALGEBRA_CACHE.get(p)
    if h is None:
        h = _ALGEBRA_CACHE[p] = upset_algebra(p)
    return h


def refute_equiv(f: Formula, g: Formula, max_poset: int) -> tuple[FinitePoset, dict[str, str]] | None:
    """Search upset algebras of posets up to ``max_poset`` elements for a
    valuation separating ``f`` and ``g``.  Returns the poset and the
    valuation (variables to upset labels), or ``None``."""
    names = sorted(f.free | g.free)
    for p in posets_upto(max_poset):
        h = cached_upset_algebra(p)
        vals = all_valuations(names, h)
        a = evaluate(f, h, vals)
        b = evaluate(g, h, vals)
        diff = np.nonzero(np.asarray(a != b).reshape(-1))[0]
        if diff.size:
            k = int(diff[0])
            return p, {name: h.labels[int(vals[name][k])] for name in names}
    return None


def kripke_phi_n_model(n: int) -> tuple[FiniteHeytingAlgebra, dict[str, int]]:
    """Upset algebra of the powerset of ``{1..n}`` ordered by reverse inclusion,
    with ``b`` true only at the empty set and ``a_i`` true where ``i`` is absent."""
    subsets = list(range(1 << n))
    # s <= t in the Kripke order iff t is a subset of s
    leq = tuple(tuple((t & ~s) == 0 for t in subsets) for s in subsets)
    p = FinitePoset(len(subsets), leq)
    h = upset_algebra(p)
    index = {lab: k for k, lab in enumerate(h.labels)}

    def label(points) -> str:
        return "{" + ",".join(str(k) for k in sorted(points)) + "}"

    v = {"b": index[label([0])]}
    for i in range(1, n + 1):
        v[f"a{i}"] = index[label([s for s in subsets if not (s >> (i - 1)) & 1])]
    return h, v
