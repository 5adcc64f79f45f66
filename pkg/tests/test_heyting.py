import itertools
import random

import numpy as np
import pytest

from muipc import TOP, conj, disj, imp, mu, nu, parse, substitute, var
from muipc.heyting import (AlgebraError, FinitePoset, PosetError, UnboundVariableError,
                           all_valuations, boolean, chain, eval_formula, evaluate, gfp_iterate,
                           kripke_phi_n_model, lfp_iterate, parse_poset, posets, posets_upto,
                           refute_equiv, upset_algebra)
from muipc.gen import random_positive
from muipc.ordinals import family_chain_conj, family_phi_n

a, b, x, y = var("a"), var("b"), var("x"), var("y")


def brute_upsets(n, leq):
    """Oracle: filter every subset of the points by the upward closure test."""
    out = []
    for bits in itertools.product((0, 1), repeat=n):
        if all(not bits[i] or bits[j] for i in range(n) for j in range(n) if leq[i][j]):
            out.append(bits)
    return out


@pytest.mark.parametrize("poset, expected", [
    (FinitePoset.antichain(1), 2), (FinitePoset.chain(2), 3), (FinitePoset.antichain(2), 4),
])
def test_upset_algebra_sizes(poset, expected):
    h = upset_algebra(poset)
    assert h.n == expected == len(brute_upsets(poset.n, poset.leq))


def test_two_antichain_is_a_diamond():
    h = upset_algebra(FinitePoset.antichain(2))
    mids = [e for e in range(h.n) if e not in (h.bot, h.top)]
    assert len(mids) == 2
    p, q = mids
    assert not h.le(p, q) and not h.le(q, p)
    assert h.meet[p, q] == h.bot and h.join[p, q] == h.top
    # Boolean: the complement of p is q
    assert h.imp[p, h.bot] == q


def test_upsets_match_oracle_for_all_small_posets():
    for p in posets_upto(4):
        assert len(p.upsets()) == len(brute_upsets(p.n, p.leq))


def test_poset_counts_up_to_iso():
    # 1, 2, 5, 16 unlabeled posets
    assert [len(posets(n)) for n in range(1, 5)] == [1, 2, 5, 16]
    assert len(list(posets_upto(4))) == 24


def test_poset_validation():
    with pytest.raises(PosetError):
        FinitePoset.from_pairs(2, [(0, 1), (1, 0)])
    with pytest.raises(PosetError):
        parse_poset("2\n0<5\n")
    p = parse_poset("3  # size\n0<1\n1<2\n")
    assert p.leq[0][2]


def test_chain_algebra():
    h = chain(4)
    assert h.n == 4
    for i in range(4):
        for j in range(4):
            assert h.imp[i, j] == (h.top if i <= j else j)
    with pytest.raises(ValueError):
        chain(0)


def test_peirce_value_on_three_chain():
    # hand table: a = m = 1, b = 0; a -> b = 0, (a -> b) -> a = top, Peirce = m
    h = chain(3)
    m = 1
    assert eval_formula(parse("((a->b)->a)->a"), h, {"a": m, "b": h.bot}) == m
    assert eval_formula(parse("(a->b)->a"), h, {"a": m, "b": h.bot}) == h.top


def test_eval_examples():
    h = chain(3)
    for e in range(3):
        assert eval_formula(imp(TOP, a), h, {"a": e}) == e
        assert eval_formula(mu("x", disj(b, x)), h, {"b": e}) == e


def test_eval_unbound():
    with pytest.raises(UnboundVariableError):
        eval_formula(conj(a, b), chain(2), {"a": 1})


def test_heyting_laws_exhaustive():
    algebras = [upset_algebra(p) for p in posets_upto(3)] + [chain(5), boolean(3)]
    for h in algebras:
        assert h.n <= 8
        h.check_laws()
        e = np.arange(h.n)
        X, Y = np.meshgrid(e, e, indexing="ij")
        # x /\ (x -> y) = x /\ y and y <= x -> y
        assert np.array_equal(h.meet[X, h.imp[X, Y]], h.meet[X, Y])
        assert np.array_equal(h.join[Y, h.imp[X, Y]], h.imp[X, Y])
        assert (h.imp[X, X] == h.top).all()


def test_bad_tables_rejected():
    h = chain(3)
    bad = h.imp.copy()
    bad[0, 0] = 0
    with pytest.raises(AlgebraError):
        type(h)(h.meet, h.join, bad, h.bot, h.top, h.labels)


def test_lfp_examples():
    h = chain(3)
    assert lfp_iterate(disj(b, x), "x", h, {"b": 1}) == (1, 1)
    for k in (2, 3, 4):
        f, h, v = family_chain_conj(k)
        val, steps = lfp_iterate(f, "x", h, v)
        assert (val, steps) == (h.top, k)
    for n in (1, 2, 3):
        h, v = kripke_phi_n_model(n)
        assert lfp_iterate(family_phi_n(n), "x", h, v)[1] == n + 1


def test_lfp_requires_positivity():
    with pytest.raises(ValueError):
        lfp_iterate(imp(x, a), "x", chain(2), {"a": 0})


def test_gfp():
    h = chain(3)
    assert gfp_iterate(conj(a, x), "x", h, {"a": 1}) == (1, 1)
    # nu x. (x -> b) -> a is b -> a
    for av, bv in itertools.product(range(3), repeat=2):
        assert gfp_iterate(imp(imp(x, b), a), "x", h, {"a": av, "b": bv})[0] == h.imp[bv, av]


def test_polynomials_are_monotone_and_strong(small_algebras):
    rng = random.Random(2)
    fs = [random_positive(rng, size=rng.randint(2, 8), atoms=("a",)) for _ in range(25)]
    for h in small_algebras[:12]:
        for f in fs:
            for av in range(h.n):
                vals = [eval_formula(f, h, {"a": av, "x": e}) for e in range(h.n)]
                for p in range(h.n):
                    for q in range(h.n):
                        if h.le(p, q):
                            assert h.le(vals[p], vals[q])
                        # x /\ f(y) <= f(x /\ y)
                        assert h.le(h.meet[p, vals[q]], vals[h.meet[p, q]])


def test_fixpoint_commutes_with_guards(small_algebras):
    """lfp(a -> f) = a -> lfp f and lfp(a /\\ f) = a /\\ lfp f."""
    f = disj(b, imp(b, x), conj(b, x))
    for h in small_algebras:
        for av in range(h.n):
            for bv in range(h.n):
                v = {"a": av, "b": bv}
                base = lfp_iterate(f, "x", h, v)[0]
                assert lfp_iterate(imp(a, f), "x", h, v)[0] == h.imp[av, base]
                assert lfp_iterate(conj(a, f), "x", h, v)[0] == h.meet[av, base]


def test_roll_identity(small_algebras):
    """mu (f o g) = f(mu (g o f))."""
    f = imp(imp(x, b), a)
    g = disj(a, x)
    fog = substitute(f, "x", g)
    gof = substitute(g, "x", f)
    for h in small_algebras:
        for av, bv in itertools.product(range(h.n), repeat=2):
            v = {"a": av, "b": bv}
            lhs = lfp_iterate(fog, "x", h, v)[0]
            inner = lfp_iterate(gof, "x", h, v)[0]
            assert lhs == eval_formula(f, h, {**v, "x": inner})


def test_vectorized_matches_scalar():
    h = upset_algebra(FinitePoset.from_pairs(3, [(0, 1)]))
    f = parse("(a -> b) \\/ (b -> a) \\/ ~a")
    vals = all_valuations(["a", "b"], h)
    vec = np.broadcast_to(evaluate(f, h, vals), (h.n ** 2,))
    for k in range(h.n ** 2):
        assert vec[k] == eval_formula(f, h, {"a": int(vals["a"][k]), "b": int(vals["b"][k])})


def test_refute_equiv():
    assert refute_equiv(parse("~~a"), a, 2) is not None
    assert refute_equiv(parse("a /\\ (a -> b)"), parse("a /\\ b"), 3) is None
    assert refute_equiv(nu("x", conj(a, x)), a, 3) is None
