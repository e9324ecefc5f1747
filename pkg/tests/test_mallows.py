import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qexch import mallows, stats
from qexch.mallows import (
    BudgetError,
    OrderStatisticTree,
    TruncatedGeometric,
    apply_selections,
    backward_ranks,
    finite_qshuffle,
    from_backward_ranks,
    mallows_distribution,
    mallows_pmf,
    pushforward,
    sample_mallows_ranks,
    selection_probability,
    shuffle_distribution,
    verify_finite_qexchangeable,
)
from qexch.qkernel import q_factorial
from qexch.words import inversions

HALF = Fraction(1, 2)
perms = st.integers(1, 7).flatmap(lambda n: st.permutations(list(range(1, n + 1))))


def test_pmf_examples():
    assert mallows_pmf((1, 2, 3), HALF) == 1 / q_factorial(3, HALF)
    assert mallows_pmf((3, 2, 1), HALF) == Fraction(1, 21)


def test_backward_rank_examples():
    assert backward_ranks((1, 3, 2, 4)) == (1, 2, 2, 4)
    assert backward_ranks((1, 2, 3, 4, 5)) == (1, 2, 3, 4, 5)
    assert backward_ranks((5, 4, 3, 2, 1)) == (1, 1, 1, 1, 1)


@given(perms)
def test_backward_ranks_round_trip_and_count_inversions(sigma):
    beta = backward_ranks(sigma)
    assert from_backward_ranks(beta) == tuple(sigma)
    assert sum(j - b for j, b in enumerate(beta, start=1)) == inversions(sigma)


def test_backward_ranks_are_independent_under_mallows():
    q = Fraction(1, 3)
    law = mallows_distribution(4, q)
    marginals = [dict() for _ in range(4)]
    for s, p in law.items():
        for j, b in enumerate(backward_ranks(s)):
            marginals[j][b] = marginals[j].get(b, 0) + p
    for s, p in law.items():
        prod = Fraction(1)
        for j, b in enumerate(backward_ranks(s)):
            prod *= marginals[j][b]
        assert prod == p
    for j in range(1, 5):
        g = TruncatedGeometric(j, q)
        assert all(marginals[j - 1][j - i + 1] == g.pmf(i) for i in range(1, j + 1))


def test_order_statistic_tree_against_list():
    rng = np.random.default_rng(0)
    for _ in range(50):
        n = int(rng.integers(1, 30))
        tree, ref = OrderStatisticTree(n), list(range(1, n + 1))
        while ref:
            k = int(rng.integers(1, len(ref) + 1))
            assert tree.pop_kth(k) == ref.pop(k - 1)


def test_truncated_geometric_thresholds_are_exact():
    g = TruncatedGeometric(4, HALF)
    assert sum(g.pmf_table().values()) == 1
    th = g.thresholds
    assert len(th) == 3 and th == sorted(th)
    cdf = Fraction(0)
    for i, t in enumerate(th, start=1):
        cdf += g.pmf(i)
        assert 0 <= t - cdf * mallows.TWO64 < 1


@pytest.mark.parametrize("exact", [True, False])
def test_truncated_geometric_sampler(exact):
    g = TruncatedGeometric(5, Fraction(3, 5))
    draws = g.sample_many(stats.make_rng(11), 10**5, exact)
    rep = stats.compare_to_exact(draws.tolist(), g.pmf_table())
    assert rep.tv < 0.01


def test_n_equals_one_is_trivial():
    rng = stats.make_rng(1)
    assert all(sample_mallows_ranks(1, HALF, rng) == (1,) for _ in range(20))
    assert finite_qshuffle(("x",), HALF, rng) == ("x",)


def test_rank_sampler_matches_q3():
    law = mallows_distribution(3, HALF)
    draws = [tuple(r) for r in mallows.sample_mallows_ranks_batch(3, HALF, 10**5, stats.make_rng(3)).tolist()]
    assert stats.compare_to_exact(draws, law).tv <= 0.01


def test_scalar_and_batch_rank_samplers_share_the_law():
    rng = stats.make_rng(4)
    draws = [sample_mallows_ranks(3, 0.5, rng, exact=False) for _ in range(20000)]
    assert stats.compare_to_exact(draws, mallows_distribution(3, HALF)).tv <= 0.02


def test_shuffle_structures_agree():
    v = (1, 1, 2, 3, 3, 3)
    for xis in itertools.product(*(range(1, len(v) - m + 1) for m in range(len(v)))):
        assert apply_selections(v, xis, "tree") == apply_selections(v, xis, "list")


def test_selection_probability_versus_output_probability():
    q = HALF
    assert selection_probability((1, 1, 2), (3, 1), q) == Fraction(2, 21)
    assert shuffle_distribution((1, 1, 2), q)[(2, 1, 1)] == Fraction(1, 7)


def test_shuffle_of_identity_is_mallows():
    for n in range(1, 6):
        assert shuffle_distribution(tuple(range(1, n + 1)), HALF) == mallows_distribution(n, HALF)


def test_verify_detects_uniform_law():
    uniform = {s: Fraction(1, 6) for s in itertools.permutations((1, 2, 3))}
    ok, witness = verify_finite_qexchangeable(uniform, HALF)
    assert not ok and witness is not None
    for n in range(1, 7):
        assert verify_finite_qexchangeable(mallows_distribution(n, HALF), HALF) == (True, None)


def test_budget_guard():
    with pytest.raises(BudgetError):
        mallows_distribution(9, HALF)
    with pytest.raises(BudgetError):
        shuffle_distribution(tuple(range(9)), HALF)


def test_pushforward_preserves_mass():
    law = shuffle_distribution((1, 2, 3, 3), HALF)
    image = pushforward(law, lambda a: min(a, 2))
    assert sum(image.values()) == 1
    assert verify_finite_qexchangeable(image, HALF)[0]


def test_seeded_output_is_reproducible():
    a = mallows.sample_mallows_ranks_batch(5, HALF, 100, stats.make_rng(9))
    b = mallows.sample_mallows_ranks_batch(5, HALF, 100, stats.make_rng(9))
    assert (a == b).all()
