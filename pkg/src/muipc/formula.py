"""Hash-consed formulas of the intuitionistic propositional mu-calculus.

Every formula is built through the smart constructors below (``var``,
``conj``, ``disj``, ``imp``, ``mu``, ``nu`` and the constants ``TOP`` /
``BOT``).  They return interned, immutable nodes in canonical form:

* conjunctions and disjunctions are n-ary, flattened, deduplicated and
  sorted by a fixed structural key;
* the unit/absorption laws ``a \\/ F = a``, ``a /\\ T = a``, ``a \\/ T = T``,
  ``a /\\ F = F``, ``a -> T = T``, ``T -> a = a`` and ``F -> a = T`` are
  applied eagerly;
* a binder ``mu x. body`` / ``nu x. body`` is only accepted when ``x`` is
  positive in ``body``.

Because nodes are interned, structural equality is identity and formulas
can be used as dictionary keys at no cost.
"""

from __future__ import annotations

import enum
import itertools
import threading
import weakref
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

__all__ = [
    "Formula", "PositivityError", "Sign", "Strength", "VarClass", "Occurrence",
    "PolarityReport", "TOP", "BOT", "var", "conj", "disj", "imp", "neg", "mu",
    "nu", "substitute", "substitute_many", "iterate", "classify", "polarity",
    "size", "implication_count", "is_fixpoint_free", "fresh_name",
    "rename_bound", "atoms", "subformulas",
]

VAR, TOP_T, BOT_T, AND, OR, IMP, MU, NU = "var", "top", "bot", "and", "or", "imp", "mu", "nu"
_RANK = {BOT_T: 0, TOP_T: 1, VAR: 2, AND: 3, OR: 4, IMP: 5, MU: 6, NU: 7}


class PositivityError(ValueError):
    """A fixed-point binder was applied to a variable that is not positive."""


class Formula:
    """An interned formula node.  Build instances with the module constructors."""

    __slots__ = ("tag", "name", "args", "key", "size", "free", "fp_free", "_hash", "__weakref__")

    tag: str
    name: str | None
    args: tuple["Formula", ...]
    key: tuple
    size: int
    free: frozenset[str]
    fp_free: bool

    def __reduce__(self):
        return (_rebuild, (self.tag, self.name, self.args))

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        return self is other

    def __ne__(self, other) -> bool:
        return self is not other

    def __lt__(self, other: "Formula") -> bool:
        return self.key < other.key

    def __repr__(self) -> str:
        from .syntax import to_text
        return f"Formula({to_text(self)!r})"

    def __str__(self) -> str:
        from .syntax import to_text
        return to_text(self)

    @property
    def is_var(self) -> bool:
        return self.tag == VAR

    @property
    def is_binder(self) -> bool:
        return self.tag in (MU, NU)

    # operator sugar, convenient in tests and interactive use
    def __and__(self, other: "Formula") -> "Formula":
        return conj(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return disj(self, other)

    def __rshift__(self, other: "Formula") -> "Formula":
        return imp(self, other)

    def __iter__(self) -> Iterator["Formula"]:
        return iter(self.args)


_table_lock = threading.Lock()
_table: "weakref.WeakValueDictionary[tuple, Formula]" = weakref.WeakValueDictionary()


def _intern(tag: str, name: str | None, args: tuple[Formula, ...]) -> Formula:
    k = (tag, name, args)
    node = _table.get(k)
    if node is not None:
        return node
    node = object.__new__(Formula)
    node.tag = tag
    node.name = name
    node.args = args
    if tag == VAR:
        node.key = (_RANK[tag], name)
        node.size = 1
        node.free = frozenset((name,))
        node.fp_free = True
    elif tag in (TOP_T, BOT_T):
        node.key = (_RANK[tag],)
        node.size = 1
        node.free = frozenset()
        node.fp_free = True
    elif tag in (MU, NU):
        body = args[0]
        node.key = (_RANK[tag], name, body.key)
        node.size = 1 + body.size
        node.free = body.free - {name}
        node.fp_free = False
    else:
        node.key = (_RANK[tag],) + tuple(a.key for a in args)
        node.size = 1 + sum(a.size for a in args)
        node.free = frozenset().union(*(a.free for a in args))
        node.fp_free = all(a.fp_free for a in args)
    node._hash = hash(k)
    # lookups stay lock-free; only the insertion races between threads
    with _table_lock:
        existing = _table.get(k)
        if existing is not None:
            return existing
        _table[k] = node
    return node


def _rebuild(tag, name, args):
    return _intern(tag, name, args)


TOP = _intern(TOP_T, None, ())
BOT = _intern(BOT_T, None, ())
# keep the constants alive for the lifetime of the interpreter
_PINNED = (TOP, BOT)


def var(name: str) -> Formula:
    if not name or not (name[0].isalpha()) or not all(c.isalnum() or c == "_" for c in name):
        raise ValueError(f"invalid identifier {name!r}")
    return _intern(VAR, name, ())


def _nary(tag: str, items: Iterable[Formula]) -> Formula:
    unit, absorb = (TOP, BOT) if tag == AND else (BOT, TOP)
    seen: dict[Formula, None] = {}
    for f in items:
        if f is absorb:
            return absorb
        if f is unit:
            continue
        if f.tag == tag:
            for g in f.args:
                seen[g] = None
        else:
            seen[f] = None
    if not seen:
        return unit
    if len(seen) == 1:
        return next(iter(seen))
    return _intern(tag, None, tuple(sorted(seen, key=lambda g: g.key)))


def conj(*items: Formula | Iterable[Formula]) -> Formula:
    """Canonical n-ary conjunction; ``conj()`` is ``TOP``."""
    return _nary(AND, _spread(items))


def disj(*items: Formula | Iterable[Formula]) -> Formula:
    """Canonical n-ary disjunction; ``disj()`` is ``BOT``."""
    return _nary(OR, _spread(items))


def _spread(items) -> Iterator[Formula]:
    for it in items:
        if isinstance(it, Formula):
            yield it
        else:
            yield from it


def imp(a: Formula, b: Formula) -> Formula:
    if b is TOP or a is BOT:
        return TOP
    if a is TOP:
        return b
    return _intern(IMP, None, (a, b))


def neg(a: Formula) -> Formula:
    return imp(a, BOT)


def mu(x: str, body: Formula) -> Formula:
    return _binder(MU, x, body)


def nu(x: str, body: Formula) -> Formula:
    return _binder(NU, x, body)


def _binder(tag: str, x: str, body: Formula) -> Formula:
    var(x)  # validates the identifier
    if Sign.NEGATIVE in polarity(body, x):
        kind = "mu" if tag == MU else "nu"
        raise PositivityError(f"{x} is not positive in the body of {kind} {x}")
    return _intern(tag, x, (body,))


# ---------------------------------------------------------------------------
# polarity analysis


class Sign(enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"


class Strength(enum.Enum):
    STRONGLY_POSITIVE = "strongly-positive"
    WEAKLY_NEGATIVE = "weakly-negative"


class VarClass(enum.Enum):
    ABSENT = "Absent"
    STRONGLY_POSITIVE = "StronglyPositive"
    WEAKLY_NEGATIVE = "WeaklyNegative"
    MIXED_POSITIVE = "MixedPositive"
    NON_POSITIVE = "NonPositive"


@dataclass(frozen=True)
class Occurrence:
    path: tuple[int, ...]
    sign: Sign
    strength: Strength


@dataclass(frozen=True)
class PolarityReport:
    variable: str
    occurrences: tuple[Occurrence, ...]

    @property
    def var_class(self) -> VarClass:
        occ = self.occurrences
        if not occ:
            return VarClass.ABSENT
        if any(o.sign is Sign.NEGATIVE for o in occ):
            return VarClass.NON_POSITIVE
        strengths = {o.strength for o in occ}
        if strengths == {Strength.STRONGLY_POSITIVE}:
            return VarClass.STRONGLY_POSITIVE
        if strengths == {Strength.WEAKLY_NEGATIVE}:
            return VarClass.WEAKLY_NEGATIVE
        return VarClass.MIXED_POSITIVE


def occurrences(f: Formula, x: str) -> PolarityReport:
    """List every free occurrence of ``x`` with its sign and strength."""
    out: list[Occurrence] = []

    def walk(g: Formula, path: tuple[int, ...], flips: int, under_ante: bool) -> None:
        if x not in g.free:
            return
        if g.tag == VAR:
            sign = Sign.POSITIVE if flips % 2 == 0 else Sign.NEGATIVE
            strength = Strength.WEAKLY_NEGATIVE if under_ante else Strength.STRONGLY_POSITIVE
            out.append(Occurrence(path, sign, strength))
        elif g.tag == IMP:
            walk(g.args[0], path + (0,), flips + 1, True)
            walk(g.args[1], path + (1,), flips, under_ante)
        else:
            for i, c in enumerate(g.args):
                walk(c, path + (i,), flips, under_ante)

    walk(f, (), 0, False)
    return PolarityReport(x, tuple(out))


_polarity_cache: dict[tuple[Formula, str], frozenset[Sign]] = {}


def polarity(f: Formula, x: str) -> frozenset[Sign]:
    """Signs of the free occurrences of ``x`` in ``f`` (empty when absent)."""
    if x not in f.free:
        return frozenset()
    k = (f, x)
    hit = _polarity_cache.get(k)
    if hit is not None:
        return hit
    if f.tag == VAR:
        res = frozenset((Sign.POSITIVE,))
    elif f.tag == IMP:
        flipped = {Sign.POSITIVE: Sign.NEGATIVE, Sign.NEGATIVE: Sign.POSITIVE}
        res = frozenset(flipped[s] for s in polarity(f.args[0], x)) | polarity(f.args[1], x)
    else:
        res = frozenset().union(*(polarity(c, x) for c in f.args))
    if len(_polarity_cache) > 200_000:
        _polarity_cache.clear()
    _polarity_cache[k] = res
    return res


def classify(f: Formula, x: str) -> VarClass:
    return occurrences(f, x).var_class


def is_positive(f: Formula, x: str) -> bool:
    return Sign.NEGATIVE not in polarity(f, x)


def is_negative(f: Formula, x: str) -> bool:
    return Sign.POSITIVE not in polarity(f, x)


# ---------------------------------------------------------------------------
# traversal helpers


def subformulas(f: Formula) -> Iterator[Formula]:
    """Distinct subformulas of ``f`` (each node once), parents before children."""
    seen: set[Formula] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g in seen:
            continue
        seen.add(g)
        yield g
        stack.extend(reversed(g.args))


def atoms(f: Formula) -> list[str]:
    """Sorted free variables."""
    return sorted(f.free)


def all_names(f: Formula) -> set[str]:
    names: set[str] = set()
    for g in subformulas(f):
        if g.name is not None:
            names.add(g.name)
    return names


def size(f: Formula) -> int:
    """Number of nodes of the syntax tree (one per n-ary connective)."""
    return f.size


def implication_count(f: Formula) -> int:
    """Implication subformulas plus variable occurrences, counted on the tree."""
    memo: dict[Formula, int] = {}

    def go(g: Formula) -> int:
        if g in memo:
            return memo[g]
        if g.tag == VAR:
            r = 1
        else:
            r = (1 if g.tag == IMP else 0) + sum(go(c) for c in g.args)
        memo[g] = r
        return r

    return go(f)


def is_fixpoint_free(f: Formula) -> bool:
    return f.fp_free


def fresh_name(base: str, avoid: Iterable[str], always_suffix: bool = False) -> str:
    """``base`` itself, or ``base`` followed by the smallest free numeric suffix."""
    avoid = set(avoid)
    if not always_suffix and base not in avoid:
        return base
    for i in itertools.count(1):
        cand = f"{base}{i}"
        if cand not in avoid:
            return cand
    raise AssertionError("unreachable")


# ---------------------------------------------------------------------------
# substitution


def rebuild(f: Formula, args: Sequence[Formula]) -> Formula:
    """Rebuild a node of the same shape as ``f`` over new children."""
    t = f.tag
    if t == AND:
        return conj(args)
    if t == OR:
        return disj(args)
    if t == IMP:
        return imp(args[0], args[1])
    if t == MU:
        return mu(f.name, args[0])
    if t == NU:
        return nu(f.name, args[0])
    return f


def substitute(f: Formula, x: str, g: Formula) -> Formula:
    """Replace the free occurrences of ``x`` in ``f`` by ``g``, avoiding capture."""
    return substitute_many(f, {x: g})


def substitute_many(f: Formula, mapping: Mapping[str, Formula]) -> Formula:
    """Simultaneous capture-avoiding substitution."""
    mapping = {k: v for k, v in mapping.items() if k in f.free}
    if not mapping:
        return f
    incoming: frozenset[str] = frozenset().union(*(v.free for v in mapping.values()))
    memo: dict[tuple[Formula, tuple], Formula] = {}

    def go(h: Formula, env: dict[str, Formula]) -> Formula:
        live = tuple(sorted(k for k in env if k in h.free))
        if not live:
            return h
        mk = (h, tuple((k, env[k]) for k in live))
        hit = memo.get(mk)
        if hit is not None:
            return hit
        if h.tag == VAR:
            res = env[h.name]
        elif h.tag in (MU, NU):
            z = h.name
            inner = {k: v for k, v in env.items() if k != z}
            body = h.args[0]
            if any(z in inner[k].free for k in inner if k in body.free):
                avoid = incoming | body.free | set(inner) | all_names(body)
                z2 = fresh_name(z, avoid, always_suffix=True)
                body = go(body, {z: var(z2)}) if z in body.free else body
                z = z2
            res = _binder(h.tag, z, go(body, inner))
        else:
            res = rebuild(h, [go(c, env) for c in h.args])
        memo[mk] = res
        return res

    return go(f, dict(mapping))


def iterate(f: Formula, x: str, n: int, base: Formula) -> Formula:
    """``f`` composed with itself ``n`` times, applied to ``base``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    out = base
    for _ in range(n):
        out = substitute(f, x, out)
    return out


def rename_bound(f: Formula, avoid: Iterable[str] = ()) -> Formula:
    """Alpha-rename binders so that no binder shadows a free name, a name in
    ``avoid`` or an enclosing binder.  Sibling binders may share a name, and
    names are kept whenever no clash arises."""
    base = frozenset(f.free) | frozenset(avoid)
    memo: dict[tuple[Formula, frozenset], Formula] = {}

    def go(h: Formula, scope: frozenset) -> Formula:
        if h.fp_free:
            return h
        k = (h, scope)
        if k in memo:
            return memo[k]
        if h.tag in (MU, NU):
            z = h.name
            body = h.args[0]
            if z in scope:
                z2 = fresh_name(z, scope | all_names(body) | body.free, always_suffix=True)
                body = substitute(body, z, var(z2))
                z = z2
            res = _binder(h.tag, z, go(body, scope | {z}))
        else:
            res = rebuild(h, [go(c, scope) for c in h.args])
        memo[k] = res
        return res

    return go(f, base)
