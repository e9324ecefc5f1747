import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from qexch.pyramid import (
    boundary_limit,
    dim_pair,
    dim_pair_paths,
    dim_vertex,
    dim_vertex_brute,
    edge_weight,
    embed,
    gibbs_check,
    kernel_convergence_table,
    level,
    martin_kernel,
    phi_from_height,
    phi_from_word,
    stable_dim,
    word_path_bijection,
    path_weight_of_word,
)
from qexch.qkernel import gaussian_multinomial, qpow
from qexch.words import HeightFunction, InversionFreeWord, inversions, word_to_height

HALF = Fraction(1, 2)
vertex = st.lists(st.integers(0, 3), min_size=1, max_size=3).map(tuple)


def test_edge_weights():
    q = HALF
    assert edge_weight((1, 2, 3), 3, q) == 1
    assert edge_weight((0, 0, 0), 1, q) == 1
    assert edge_weight((1, 2, 3), 1, q) == q**5


def test_dimension_examples():
    q = HALF
    assert dim_vertex((4, 0, 0), q) == 1
    assert dim_vertex_brute((2, 2), q) == 1 + q + 2 * q**2 + q**3 + q**4 == Fraction(35, 16)
    assert dim_vertex_brute((1, 1, 1), q) == (1 + q) * (1 + q + q**2)


@given(vertex)
def test_dimension_methods_agree(lam):
    assert dim_vertex(lam, HALF, "paths") == dim_vertex_brute(lam, HALF) == gaussian_multinomial(lam, HALF)


def test_pair_dimension_examples():
    q = HALF
    assert dim_pair((0, 0), (2, 2), q) == dim_vertex((2, 2), q)
    assert dim_pair((1, 1), (2, 2), q) == q * (1 + q)
    assert dim_pair((2, 0), (1, 1), q) == 0


@given(vertex, vertex)
def test_pair_dimension_matches_paths(mu, lam):
    d = min(len(mu), len(lam))
    mu, lam = mu[:d], lam[:d]
    assert dim_pair(mu, lam, HALF) == dim_pair_paths(mu, lam, HALF)


def test_kernel_examples():
    q = HALF
    assert martin_kernel((0, 0), (3, 4), q) == 1
    assert martin_kernel((2, 0), (1, 5), q) == 0
    assert martin_kernel((1, 0), (1, 5), q) == martin_kernel((1, 0), (1, 5), q, "ratio")


def test_kernel_float_mode_rounds_once():
    assert martin_kernel((1, 1), (2, 7), 0.5) == float(martin_kernel((1, 1), (2, 7), HALF))


def test_boundary_limit_examples():
    q = HALF
    h = HeightFunction.parse("1,inf")
    assert boundary_limit((0, 0), h, q) == 1
    assert boundary_limit((1, 0), h, q) == 1 - q
    assert boundary_limit((0, 1), h, q) == q
    assert boundary_limit((1, 0), HeightFunction.parse("0,inf"), q) == 0
    v = InversionFreeWord.parse("1:1,2:inf")
    from qexch.pvmeasure import marginal_prob

    assert boundary_limit((1, 0), h, q) == marginal_prob(v, (1,), q)


def test_convergence_table_shape_and_decay():
    rows = kernel_convergence_table((1, 0), HeightFunction.parse("1,inf"), HALF, range(1, 30))
    assert rows[0]["lambda"] == (1, 0) and rows[-1]["lambda"] == (1, 28)
    errors = [r["error"] for r in rows]
    assert all(b < a for a, b in zip(errors, errors[1:]))


def test_word_path_bijection():
    q = HALF
    assert word_path_bijection((2, 1), 2) == [(0, 0), (0, 1), (1, 1)]
    assert path_weight_of_word((2, 1), 2, q) == q
    assert path_weight_of_word((1, 1, 1), 1, q) == 1
    rng = random.Random(0)
    for _ in range(300):
        w = [rng.randint(1, 3) for _ in range(6)]
        assert path_weight_of_word(w, 3, q) == qpow(q, inversions(w))
    with pytest.raises(ValueError):
        word_path_bijection((3,), 2)


@pytest.mark.parametrize("spec,d", [("1:1,2:inf", 2), ("1:2,2:1,3:inf", 3), ("2:inf", 2)])
def test_phi_from_word_is_gibbs_and_matches_height(spec, d):
    v = InversionFreeWord.parse(spec)
    phi = phi_from_word(v, d, 4, HALF)
    assert gibbs_check(phi, d, HALF) == (True, None)
    assert phi == phi_from_height(word_to_height(v, d), 4, HALF)


def test_gibbs_check_is_convex_and_catches_garbage():
    q = HALF
    a = phi_from_word(InversionFreeWord.parse("1:1,2:inf"), 2, 3, q)
    b = phi_from_word(InversionFreeWord.parse("1:3,2:inf"), 2, 3, q)
    mix = {lam: Fraction(1, 3) * a[lam] + Fraction(2, 3) * b[lam] for lam in a}
    assert gibbs_check(mix, 2, q)[0]
    rng = random.Random(5)
    junk = {lam: Fraction(rng.randint(1, 9), 10) for n in range(4) for lam in level(2, n)}
    junk[(0, 0)] = 1
    ok, witness = gibbs_check(junk, 2, q)
    assert not ok and witness[0] in ("recursion", "normalization")


def test_infinite_pyramid_embedding():
    assert embed((1, 2), 4) == (1, 2, 0, 0)
    assert stable_dim((1, 2), HALF) == dim_vertex((1, 2), HALF)
    with pytest.raises(ValueError):
        embed((1, 2, 3), 2)
