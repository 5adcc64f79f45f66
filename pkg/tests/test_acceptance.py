"""Acceptance criteria 1 to 10.

Each test records one PASS/FAIL line (with wall time against its budget);
the lines are printed in the terminal summary by ``conftest.py`` and also
when the file is run directly with ``python3 tests/test_acceptance.py``.
"""

import random
import sys
import time
from contextlib import contextmanager

import numpy as np
import pytest

from muipc import BOT, conj, disj, imp, iterate, mu, parse, substitute, var
from muipc.eliminate import eliminate_all, mu_disjunctive
from muipc.gen import binder_depth, random_atop_pairs, random_disjunctive, random_formula, random_sequent
from muipc.heyting import (all_valuations, cached_upset_algebra, evaluate, kripke_phi_n_model,
                           lfp_iterate, posets_upto)
from muipc.ordinals import (closure_ordinal, family_atop, family_chain_conj, family_phi_n,
                            generic_atop, ruitenburg_number)
from muipc.prover import Prover, equiv
from muipc.simplify import simplify
from muipc.words import (adversarial_family, br, play_game, random_star_conjunction, star_formula,
                         supp)

RESULTS: dict[int, str] = {}
x = var("x")


@contextmanager
def criterion(n: int, title: str, budget: float):
    t0 = time.perf_counter()
    status = "FAIL"
    try:
        yield
        status = "PASS"
    finally:
        dt = time.perf_counter() - t0
        if status == "PASS" and dt > budget:
            status = "FAIL"
        line = f"criterion {n:2d} {status}  {title}  ({dt:.2f}s, budget {budget:g}s)"
        RESULTS[n] = line
        print(line)
    assert dt <= budget, f"criterion {n} took {dt:.2f}s, budget {budget}s"


@pytest.fixture(scope="module")
def algebras():
    return [cached_upset_algebra(p) for p in posets_upto(4)]


def flat(f, h, names):
    v = all_valuations(names, h)
    return np.broadcast_to(evaluate(f, h, v), (h.n ** len(names),))


def test_criterion_01_binaryjoin():
    with criterion(1, "binaryjoin elimination matches the worked nu formulas", 1.0):
        phi = parse("((x->c)->a) \\/ ((x->d)->b)")
        out, _ = eliminate_all(mu("x", phi), simplify=False)
        nu1 = parse("(a \\/ (((a \\/ b)->d)->b))->c")
        nu2 = imp(disj(imp(nu1, var("a")), var("b")), var("d"))
        assert out is disj(imp(nu1, var("a")), imp(nu2, var("b")))
        assert equiv(out, substitute(phi, "x", out))
        p = var("p")
        assert Prover().entails([imp(substitute(phi, "x", p), p)], imp(out, p))


def test_criterion_02_roll_tightness():
    with criterion(2, "closure ordinal of (x->b)->a is 2; Peirce blocks collapse", 1.0):
        f = parse("(x->b)->a")
        r = closure_ordinal(f, "x")
        assert r.value == 2
        assert iterate(f, "x", 1, BOT) is var("a")
        assert not equiv(iterate(f, "x", 2, BOT), iterate(f, "x", 1, BOT))


def test_criterion_03_disjunctive_closed_form(algebras):
    with criterion(3, "mu of a disjunctive formula is /\\Head -> \\/Side (all posets <= 4)", 10.0):
        d = parse("(a1 -> (b1 \\/ x)) \\/ (a2 -> (b2 \\/ x))")
        out = mu_disjunctive(d, "x")
        assert out is parse("(a1 /\\ a2) -> (b1 \\/ b2)")
        assert equiv(out, substitute(d, "x", out))
        names = ["a1", "a2", "b1", "b2"]
        for h in algebras:
            assert np.array_equal(flat(out, h, names), flat(mu("x", d), h, names))


def test_criterion_04_phi_n():
    with criterion(4, "phi_n converges in exactly n+1 steps (prover and K_n model), n = 1..3", 60.0):
        for n in (1, 2, 3):
            f = family_phi_n(n)
            assert closure_ordinal(f, "x", verify=True).value == n + 1
            h, v = kripke_phi_n_model(n)
            assert lfp_iterate(f, "x", h, v)[1] == n + 1


def test_criterion_05_chain_conjunction():
    with criterion(5, "chain conjunction family takes exactly k steps, k = 2..4", 5.0):
        for k in (2, 3, 4):
            f, h, v = family_chain_conj(k)
            assert lfp_iterate(f, "x", h, v) == (h.top, k)


def test_criterion_06_conjunction_bound():
    with criterion(6, "cl(f /\\ g) <= cl(f) + cl(g) - 1 on 50 random disjunctive pairs", 300.0):
        rng = random.Random(606)
        for _ in range(50):
            f = random_disjunctive(rng, depth=3)
            g = random_disjunctive(rng, depth=3)
            cf, cg = closure_ordinal(f, "x").value, closure_ordinal(g, "x").value
            # negative iterates count as bottom, so the bound is clamped at 0
            assert closure_ordinal(conj(f, g), "x").value <= max(cf + cg - 1, 0)


def test_criterion_07_atops():
    with criterion(7, "atop disjunctions stabilize within 3 steps; generic |I|=2,3 give 3", 300.0):
        assert [closure_ordinal(generic_atop(n), "x").value for n in (1, 2, 3)] == [2, 3, 3]
        rng = random.Random(707)
        for n in (1, 2, 3):
            for _ in range(20):
                f = family_atop(random_atop_pairs(rng, n))
                if "x" in f.free:
                    assert closure_ordinal(f, "x").value <= 3


def test_criterion_08_ruitenburg_game():
    with criterion(8, "Eve wins at K=(N+1)(M+1) on 25 star conjunctions; adversary wins K<3", 600.0):
        rng = random.Random(808)
        for _ in range(25):
            rows = random_star_conjunction(rng, n_alpha=2, m_beta=2, n_conj=3, width=2, max_len=2)
            fs = [star_formula(r) for r in rows]
            assert all(equiv(br(f), f) for f in fs)
            N = len(set().union(*(supp(f).A for f in fs)))
            M = len(set().union(*(supp(f).B for f in fs)))
            K = (N + 1) * (M + 1)
            assert play_game(rows, K).eve_wins_all
            # iterates are compacted up to provable equivalence, which cannot change rho
            assert ruitenburg_number(conj(fs), "x", compact=simplify) <= K
        fam = adversarial_family(3)
        for K in (1, 2):
            assert not play_game(fam, K).eve_wins_all


def test_criterion_09_oracle_equivalence(algebras):
    with criterion(9, "eliminate_all agrees with fixpoint iteration on 200 formulas x 24 posets", 600.0):
        rng = random.Random(909)
        done = 0
        while done < 200:
            f = random_formula(rng, size=rng.randint(3, 12), atoms=("a", "b", "c"), max_depth=2)
            if f.fp_free:
                continue
            assert binder_depth(f) <= 2 and len(f.free) <= 3
            g, _ = eliminate_all(f)
            assert g.fp_free
            names = sorted(f.free)
            for h in algebras:
                assert np.array_equal(flat(f, h, names), flat(g, h, names)), (f, g)
            done += 1


def test_criterion_10_prover_consistency(algebras):
    with criterion(10, "prover agrees with finite models on 500 sequents", 300.0):
        rng = random.Random(1010)
        discrepancies = 0
        for _ in range(500):
            ctx, goal = random_sequent(rng, atoms=("a", "b", "c"))
            f = imp(conj(ctx), goal)
            names = sorted(f.free)
            valid = all((flat(f, h, names) == h.top).all() for h in algebras)
            derivable = Prover().entails(ctx, goal)
            # soundness is exact; refutations must be found within 4 points
            discrepancies += derivable != valid
        assert discrepancies == 0


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
