import random

import pytest

from muipc import BOT, TOP, conj, disj, imp, iterate, mu, parse, var
from muipc.gen import random_sequent
from muipc.prover import (FixpointInSequentError, Prover, Sequent, entails, equiv, leq, prove)

from conftest import table

a, b, c, x = var("a"), var("b"), var("c"), var("x")


def test_spec_examples():
    assert prove(Sequent.of([], imp(a, a))).derivable
    assert not prove(Sequent.of([], parse("((a->b)->a)->a"))).derivable
    assert entails([a, imp(a, b)], b)


def test_equiv_examples():
    phi = imp(imp(x, b), a)
    assert equiv(iterate(phi, "x", 1, TOP), iterate(phi, "x", 2, TOP))
    assert not equiv(a, b)
    assert equiv(conj(a, imp(a, b)), conj(a, b))


@pytest.mark.parametrize("text", [
    "a \\/ ~a", "~~a -> a", "((a -> b) -> a) -> a", "(a -> b) \\/ (b -> a)",
    "~a \\/ ~~a", "(~~a -> a) -> a \\/ ~a",
])
def test_classical_tautologies_not_intuitionistic(text):
    assert not prove(Sequent.of([], parse(text))).derivable


@pytest.mark.parametrize("text", [
    "~~(a \\/ ~a)", "a -> ~~a", "~~~a -> ~a", "(a -> b) -> ~b -> ~a",
    "(a \\/ b -> c) -> (a -> c) /\\ (b -> c)", "~~(((a -> b) -> a) -> a)",
    "(a -> b -> c) -> (a -> b) -> a -> c", "F -> a",
])
def test_intuitionistic_theorems(text):
    assert prove(Sequent.of([], parse(text))).derivable


def test_rejects_fixpoints():
    with pytest.raises(FixpointInSequentError):
        prove(Sequent.of([], mu("x", disj(a, x))))


def test_determinism_and_cache_coherence():
    rng = random.Random(4)
    cached = Prover()
    for _ in range(150):
        ctx, goal = random_sequent(rng)
        first = cached.entails(ctx, goal)
        assert cached.entails(ctx, goal) == first
        assert Prover().entails(ctx, goal) == first


def test_leq_is_preorder():
    assert leq(BOT, a) and leq(a, TOP) and leq(conj(a, b), a) and not leq(a, conj(a, b))


def test_outcome_reports_work():
    out = Prover().prove(Sequent.of([], parse("(a -> b) -> (b -> c) -> a -> c")))
    assert out.derivable and out.nodes >= 1


def test_sound_and_complete_on_small_models(small_algebras):
    """Derivable sequents hold in every algebra; underivable ones over three
    atoms are refuted by some algebra with at most four points."""
    rng = random.Random(21)
    for _ in range(150):
        ctx, goal = random_sequent(rng)
        f = imp(conj(ctx), goal)
        names = sorted(f.free)
        valid = all((table(f, h, names) == h.top).all() for h in small_algebras)
        assert entails(ctx, goal) == valid, (ctx, goal)


def test_small_memo_still_correct():
    p = Prover(memo_size=4)
    for i in range(10):
        p.entails([var(f"p{i}")], var(f"p{i}"))
    assert p.entails([], imp(a, a))
