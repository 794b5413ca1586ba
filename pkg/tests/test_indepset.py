import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from instances import random_pvm
from syncindset.algebra import ValidationError
from syncindset.games import agreement_game, random_synchronous_game
from syncindset.graph import GameGraph, build_game_graph
from syncindset.indepset import (
    IndepStrategy,
    diagonal_mass,
    eval_indep_strategy,
    make_indep_set_game,
    reduction_verifier,
    sync_loss_indep,
    trivial_fixed_set_strategy,
)
from syncindset.lifting import reduce_game
from syncindset.luck import LuckParams, make_luck_game, sharpness_strategy


def random_graph(n, p, rng):
    upper = np.triu(rng.random((n, n)) < p, 1)
    return GameGraph(list(range(n)), upper | upper.T)


def random_indep_strategy(t, n, d, rng):
    return IndepStrategy(np.array([random_pvm(d, n, rng) for _ in range(t)]), list(range(n)))


def test_pi_d_at_t2():
    pi = make_indep_set_game(GameGraph([0], np.zeros((1, 1), bool)), 2).distribution()
    assert pi[0, 0] == Fraction(3, 8) and pi[0, 1] == Fraction(1, 8)
    assert sum(pi.ravel().tolist()) == 1


@pytest.mark.parametrize("t", range(1, 9))
def test_distributions_sum_to_one(t):
    x = GameGraph([0], np.zeros((1, 1), bool))
    for w in ("uniform", "diagonal"):
        assert sum(make_indep_set_game(x, t, w).distribution().ravel().tolist()) == 1


def test_predicate_cases():
    x = GameGraph.from_edges([0, 1, 2], [(0, 1)])
    game = make_indep_set_game(x, 2)
    assert game.predicate(0, 0, 1, 1)
    assert not game.predicate(0, 0, 1, 2)
    assert not game.predicate(0, 1, 2, 2)
    assert not game.predicate(0, 1, 0, 1)
    assert game.predicate(0, 1, 0, 2)


def test_bad_parameters():
    x = GameGraph([0], np.zeros((1, 1), bool))
    with pytest.raises(ValidationError):
        make_indep_set_game(x, 0)
    with pytest.raises(ValidationError):
        make_indep_set_game(x, 2, "weird")


def verifier_oracle(g, i, j, u, v):
    (q, a), (q2, a2) = u, v
    if i == j:
        return q == q2 and a == a2
    return q != q2 and bool(g.predicate[q, q2, a, a2]) and bool(g.predicate[q2, q, a2, a])


def test_reduction_verifier_examples():
    g = agreement_game()
    assert reduction_verifier(g, 0, 0, (1, 0), (1, 0))
    assert not reduction_verifier(g, 0, 0, (1, 0), (1, 1))
    assert not reduction_verifier(g, 0, 1, (1, 0), (1, 0))
    assert not reduction_verifier(g, 0, 1, (1, 0), (1, 1))
    assert reduction_verifier(g, 0, 1, (0, 1), (1, 1))
    assert not reduction_verifier(g, 0, 1, (0, 1), (1, 0))
    with pytest.raises(ValidationError):
        reduction_verifier(g, 0, 2, (0, 0), (0, 0))
    with pytest.raises(ValidationError):
        reduction_verifier(g, 0, 1, (0, 2), (0, 0))


def test_reduction_verifier_matches_definition():
    rng = np.random.default_rng(31)
    for _ in range(20):
        g = random_synchronous_game(int(rng.integers(1, 4)), int(rng.integers(1, 4)), rng)
        game = reduce_game(g)
        verts = game.graph.vertices
        for i, j in itertools.product(range(game.t), repeat=2):
            for u, v in itertools.product(verts, repeat=2):
                expected = verifier_oracle(g, i, j, u, v)
                assert reduction_verifier(g, i, j, u, v) == expected
                assert game.predicate(i, j, u, v) == expected


def test_loss_plus_value_is_one():
    rng = np.random.default_rng(32)
    for _ in range(20):
        t, n, d = int(rng.integers(1, 4)), int(rng.integers(1, 6)), int(rng.integers(1, 5))
        game = make_indep_set_game(random_graph(n, 0.4, rng), t)
        s = random_indep_strategy(t, n, d, rng)
        loss, b = sync_loss_indep(game, s)
        assert loss + eval_indep_strategy(game, s) == pytest.approx(1, abs=1e-10)
        assert -1e-9 <= loss <= 1 + 1e-9
        assert b.same_vertex >= -1e-12 and b.adjacent >= -1e-12


def test_loss_exact_for_d1():
    rng = np.random.default_rng(33)
    for _ in range(20):
        t, n = int(rng.integers(1, 5)), int(rng.integers(1, 6))
        game = make_indep_set_game(random_graph(n, 0.5, rng), t)
        s = IndepStrategy.deterministic([int(v) for v in rng.integers(0, n, t)], list(range(n)))
        loss, _ = sync_loss_indep(game, s)
        assert isinstance(loss, Fraction)
        assert loss == 1 - eval_indep_strategy(game, s)


def test_loss_by_hand():
    # path 0-1-2, t=2; index 0 answers 0, index 1 answers 1 -> adjacent, both orders
    x = GameGraph.from_edges([0, 1, 2], [(0, 1), (1, 2)])
    game = make_indep_set_game(x, 2)
    loss, b = sync_loss_indep(game, IndepStrategy.deterministic([0, 1], [0, 1, 2]))
    assert b.same_vertex == 0 and b.adjacent == Fraction(2, 8)
    loss, b = sync_loss_indep(game, IndepStrategy.deterministic([2, 2], [0, 1, 2]))
    assert b.same_vertex == Fraction(2, 8) and b.adjacent == 0
    loss, _ = sync_loss_indep(game, IndepStrategy.deterministic([0, 2], [0, 1, 2]))
    assert loss == 0


def test_sharpness_loss_example():
    p = LuckParams(2, 1)
    loss, _ = sync_loss_indep(reduce_game(make_luck_game(p)), sharpness_strategy(p))
    assert loss == Fraction(1, 4)


def test_loss_source_and_graph_paths_agree():
    rng = np.random.default_rng(34)
    for _ in range(15):
        g = random_synchronous_game(3, 2, rng)
        with_source = reduce_game(g)
        bare = make_indep_set_game(build_game_graph(g), 3)
        s = random_indep_strategy(3, 6, 2, rng)
        s = IndepStrategy(s.ops, with_source.graph.vertices)
        assert sync_loss_indep(with_source, s)[0] == pytest.approx(sync_loss_indep(bare, s)[0], abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), t=st.integers(2, 4))
def test_loss_invariant_under_index_permutation(seed, t):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 6))
    game = make_indep_set_game(random_graph(n, 0.4, rng), t)
    s = random_indep_strategy(t, n, 2, rng)
    perm = rng.permutation(t)
    s2 = IndepStrategy(s.ops[perm], s.vertices)
    assert sync_loss_indep(game, s)[0] == pytest.approx(sync_loss_indep(game, s2)[0], abs=1e-12)


def test_loss_rejects_uniform_and_bad_strategy():
    x = GameGraph([0, 1], np.zeros((2, 2), bool))
    s = IndepStrategy.deterministic([0, 1], [0, 1])
    with pytest.raises(ValidationError):
        sync_loss_indep(make_indep_set_game(x, 2, "uniform"), s)
    bad = IndepStrategy(np.full((2, 2, 1, 1), 0.5), [0, 1])
    with pytest.raises(ValidationError):
        sync_loss_indep(make_indep_set_game(x, 2), bad)
    with pytest.raises(ValidationError):
        sync_loss_indep(make_indep_set_game(x, 3), s)


def test_fixed_set_independent_set_found():
    x = GameGraph.from_edges(list(range(5)), [(0, 1), (1, 2), (2, 3), (3, 4)])
    s, value = trivial_fixed_set_strategy(make_indep_set_game(x, 3))
    assert value == 1
    assert sync_loss_indep(make_indep_set_game(x, 3), s)[0] == 0


def test_fixed_set_diagonal_mass():
    rng = np.random.default_rng(35)
    for _ in range(20):
        n, t = int(rng.integers(1, 7)), int(rng.integers(1, 6))
        x = random_graph(n, 0.7, rng)
        for w, mass in (("diagonal", Fraction(1, 2) + Fraction(1, 2 * t)), ("uniform", Fraction(1, t))):
            game = make_indep_set_game(x, t, w)
            assert diagonal_mass(game) == mass
            _, value = trivial_fixed_set_strategy(game)
            assert value >= mass


def test_fixed_set_on_clique_pads():
    x = GameGraph.from_edges([0, 1, 2], [(0, 1), (1, 2), (0, 2)])
    s, value = trivial_fixed_set_strategy(make_indep_set_game(x, 3))
    assert value == Fraction(1, 2) + Fraction(1, 6)
    assert s.validate() == []
