"""Word formulas over ``P(A) x P(B)`` and the Ruitenburg game.

A fragment formula is disjunctive in ``x`` with every head a conjunction
of atoms from one alphabet and every side a disjunction of atoms from
another, disjoint alphabet.  The letter ``(A, B)`` stands for
``/\\A -> (\\/B \\/ x)`` and a word for the composition of its letters.

Since formulas are stored n-ary, the production ``beta \\/ phi`` is read
with ``beta`` the disjunction of all x-free children of an ``Or`` node and
``phi`` the disjunction of the remaining children.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .formula import AND, IMP, OR, VAR, Formula, conj, disj, imp, substitute, var
from .syntax import to_text

__all__ = [
    "FragmentError", "GameBudgetExceeded", "SuppPair", "Word", "supp", "supp_word", "word_formula",
    "branches", "br", "triangle_less", "closed_form", "GameResult", "play_game", "eve_move",
    "adversarial_family", "random_word", "random_star_conjunction", "star_formula",
]


class FragmentError(ValueError):
    pass


class GameBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class SuppPair:
    A: frozenset = frozenset()
    B: frozenset = frozenset()

    @classmethod
    def of(cls, A: Iterable[str] = (), B: Iterable[str] = ()) -> "SuppPair":
        p = cls(frozenset(A), frozenset(B))
        if p.A & p.B:
            raise FragmentError(f"alphabets overlap on {sorted(p.A & p.B)}")
        return p

    def __or__(self, other: "SuppPair") -> "SuppPair":
        return SuppPair(self.A | other.A, self.B | other.B)

    def formula(self, x: str = "x") -> Formula:
        return imp(conj(var(a) for a in sorted(self.A)), disj([*(var(b) for b in sorted(self.B)), var(x)]))

    def __str__(self) -> str:
        return "(" + ",".join(sorted(self.A)) + "/" + ",".join(sorted(self.B)) + ")"


@dataclass(frozen=True)
class Word:
    letters: tuple[SuppPair, ...] = ()

    @classmethod
    def of(cls, *letters: SuppPair | tuple) -> "Word":
        out = []
        for l in letters:
            out.append(l if isinstance(l, SuppPair) else SuppPair.of(*l))
        return cls(tuple(out))

    def __add__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return "".join(str(l) for l in self.letters) or "eps"


EPSILON = Word()


def supp_word(w: Word) -> SuppPair:
    out = SuppPair()
    for l in w.letters:
        out = out | l
    return out


def _atoms_of(f: Formula, tag: str, what: str) -> frozenset:
    if f.tag == VAR:
        return frozenset((f.name,))
    if f.tag == tag and all(c.tag == VAR for c in f.args):
        return frozenset(c.name for c in f.args)
    raise FragmentError(f"{what} {to_text(f)} is not a {'conjunction' if tag == AND else 'disjunction'} of atoms")


def _split_or(f: Formula, x: str) -> tuple[frozenset, Formula]:
    side = [c for c in f.args if x not in c.free]
    rest = disj([c for c in f.args if x in c.free])
    if not side:
        return frozenset(), rest
    return _atoms_of(disj(side), OR, "side"), rest


def supp(f: Formula, x: str = "x") -> SuppPair:
    """``(supp_A, supp_B)`` of a fragment formula."""
    memo: dict[Formula, SuppPair] = {}

    def go(g: Formula) -> SuppPair:
        if g in memo:
            return memo[g]
        if x not in g.free:
            raise FragmentError(f"{to_text(g)} lost the variable {x}")
        if g.tag == VAR:
            r = SuppPair()
        elif g.tag == IMP:
            r = SuppPair(_atoms_of(g.args[0], AND, "head"), frozenset()) | go(g.args[1])
        elif g.tag == OR:
            side, rest = _split_or(g, x)
            if rest.tag == OR:
                r = SuppPair(frozenset(), side)
                for c in rest.args:
                    r = r | go(c)
            else:
                r = SuppPair(frozenset(), side) | go(rest)
        else:
            raise FragmentError(f"{to_text(g)} is outside the fragment")
        memo[g] = r
        return r

    r = go(f)
    if r.A & r.B:
        raise FragmentError(f"alphabets overlap on {sorted(r.A & r.B)}")
    return r


def word_formula(w: Word, x: str = "x") -> Formula:
    out = var(x)
    for letter in reversed(w.letters):
        out = substitute(letter.formula(x), x, out)
    return out


def branches(f: Formula, x: str = "x") -> frozenset:
    """Set of words whose formulas are the branches of ``f``."""
    if x not in f.free:
        raise FragmentError(f"{to_text(f)} lost the variable {x}")
    if f.tag == VAR:
        return frozenset((EPSILON,))
    if f.tag == IMP:
        head = Word((SuppPair(_atoms_of(f.args[0], AND, "head"), frozenset()),))
        return frozenset(head + w for w in branches(f.args[1], x))
    if f.tag == OR:
        side, rest = _split_or(f, x)
        kids = rest.args if rest.tag == OR else (rest,)
        inner = frozenset().union(*(branches(c, x) for c in kids))
        if not side:
            return inner
        pre = Word((SuppPair(frozenset(), side),))
        return frozenset(pre + w for w in inner)
    raise FragmentError(f"{to_text(f)} is outside the fragment")


def br(f: Formula, x: str = "x") -> Formula:
    return disj([word_formula(w, x) for w in sorted(branches(f, x), key=str)])


def triangle_less(p: SuppPair, w: Word) -> bool:
    """``(A, B) <| w``: some split point ``l`` in ``0..k`` has ``A`` inside the
    A-letters up to ``l`` and ``B`` inside the B-letters from ``l`` on."""
    k = len(w)
    letters = w.letters
    for l in range(k + 1):
        left = frozenset().union(*(letters[j].A for j in range(l)))
        right = frozenset().union(*(letters[j].B for j in range(max(l - 1, 0), k)))
        if p.A <= left and p.B <= right:
            return True
    return False


def star_formula(words: Sequence[Word], x: str = "x") -> Formula:
    return disj([word_formula(w, x) for w in words])


def closed_form(fs: Sequence[Formula], x: str = "x") -> Formula:
    """``/\\_i phi_Supp(f_i)``."""
    return conj([supp(f, x).formula(x) for f in fs])


# ---------------------------------------------------------------------------
# the game


@dataclass
class GameResult:
    eve_wins_all: bool
    losing_play: list[tuple[int, int]] | None
    plays: int
    rounds: int

    def to_json(self) -> dict:
        return {"eve_wins_all": self.eve_wins_all, "losing_play": self.losing_play,
                "plays": self.plays, "rounds": self.rounds}


def eve_move(row: Sequence[Word], memory: SuppPair) -> tuple[int, SuppPair]:
    """Eve's memory strategy: extend the A-part if she can (and reset B),
    otherwise add B-letters not yet in memory, otherwise take the first word."""
    sup = [supp_word(w) for w in row]
    for j, s in enumerate(sup):
        if not s.A <= memory.A:
            return j, SuppPair(memory.A | s.A, frozenset())
    for j, s in enumerate(sup):
        if not s.B <= memory.B:
            return j, SuppPair(memory.A, memory.B | s.B)
    return 0, memory


def _pad(conjuncts: Sequence[Sequence[Word]]) -> list[list[Word]]:
    if not conjuncts or any(not row for row in conjuncts):
        raise ValueError("every conjunct needs at least one word")
    k = max(len(row) for row in conjuncts)
    # phi is equivalent to phi \/ phi_eps, so padding with the empty word is harmless
    return [list(row) + [EPSILON] * (k - len(row)) for row in conjuncts]


def play_game(conjuncts: Sequence[Sequence[Word]], rounds: int, budget: int = 2_000_000) -> GameResult:
    """Play Eve's memory strategy against every sequence of Adam's choices.

    ``conjuncts[i]`` lists the words ``w_(i,j)``; a play of length ``rounds``
    is won by Eve when ``Supp(phi_i) <| w_p`` for some ``i``.  Since that
    relation survives appending letters, a play is cut as soon as it is won.
    """
    rows = _pad(conjuncts)
    targets = [supp_word(Word(tuple(l for w in row for l in w.letters))) for row in rows]
    plays = 0

    def won(word: Word) -> bool:
        return any(triangle_less(t, word) for t in targets)

    # iterative DFS: (history, word, memory)
    stack: list[tuple[tuple, Word, SuppPair]] = [((), EPSILON, SuppPair())]
    while stack:
        hist, word, mem = stack.pop()
        if won(word):
            plays += 1
            continue
        if len(hist) == rounds:
            return GameResult(False, [list(p) for p in hist], plays + 1, rounds)
        for i in reversed(range(len(rows))):
            j, mem2 = eve_move(rows[i], mem)
            stack.append((hist + ((i, j),), word + rows[i][j], mem2))
        plays += 1
        if plays > budget:
            raise GameBudgetExceeded(f"more than {budget} positions explored")
    return GameResult(True, None, plays, rounds)


def adversarial_family(n: int) -> list[list[Word]]:
    """Conjuncts indexed by ``(k, B)`` with ``|B| = k``: the disjunction of
    the letters ``({alpha_k}, {beta})`` for ``beta`` in ``B``."""
    alphas = [f"a{i}" for i in range(1, n + 1)]
    betas = [f"b{i}" for i in range(1, n + 1)]
    out = []
    for k in range(1, n + 1):
        for B in itertools.combinations(betas, k):
            out.append([Word((SuppPair.of([alphas[k - 1]], [b]),)) for b in B])
    return out


def random_word(rng: random.Random, alpha: Sequence[str], beta: Sequence[str], max_len: int = 2) -> Word:
    letters = []
    for _ in range(rng.randint(1, max_len)):
        A = [a for a in alpha if rng.random() < 0.5]
        B = [b for b in beta if rng.random() < 0.5]
        letters.append(SuppPair.of(A, B))
    return Word(tuple(letters))


def random_star_conjunction(rng: random.Random, n_alpha: int = 2, m_beta: int = 2, n_conj: int = 3,
                            width: int = 2, max_len: int = 2) -> list[list[Word]]:
    alpha = [f"a{i}" for i in range(1, n_alpha + 1)]
    beta = [f"b{i}" for i in range(1, m_beta + 1)]
    return [[random_word(rng, alpha, beta, max_len) for _ in range(rng.randint(1, width))]
            for _ in range(rng.randint(1, n_conj))]
