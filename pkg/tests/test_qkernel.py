import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from qexch.qkernel import (
    INF,
    QParam,
    QRangeError,
    UnsupportedCaseError,
    gaussian_binomial,
    gaussian_multinomial,
    poly_eval,
    q_factorial,
    q_int,
    q_pochhammer,
    q_pow_pochhammer,
    qpow,
)
from qexch.words import inversions_naive

HALF = Fraction(1, 2)
rationals = st.fractions(min_value=Fraction(1, 100), max_value=Fraction(99, 100)).filter(lambda x: 0 < x < 1)


def oracle_poly(word):
    """Coefficients of sum over rearrangements of q**inv."""
    counts = [inversions_naive(w) for w in set(itertools.permutations(word))]
    coeffs = [0] * (max(counts) + 1)
    for c in counts:
        coeffs[c] += 1
    return coeffs


def test_q_int_values():
    assert q_int(0, HALF) == 0
    assert q_int(1, HALF) == 1
    assert q_int(3, HALF) == Fraction(7, 4)


def test_q_factorial_values():
    assert q_factorial(0, HALF) == 1
    assert q_factorial(3, HALF) == Fraction(21, 8)
    assert oracle_poly((1, 2, 3)) == [1, 2, 2, 1]


@pytest.mark.parametrize("lam", [(2, 2), (1, 2), (3, 0), (1, 1, 1), (2, 1, 2)])
@pytest.mark.parametrize("q", [Fraction(1, 3), HALF, Fraction(7, 10)])
def test_gaussian_multinomial_matches_rearrangement_oracle(lam, q):
    word = tuple(a for a, n in enumerate(lam, start=1) for _ in range(n))
    assert gaussian_multinomial(lam, q) == poly_eval(oracle_poly(word), q)


def test_gaussian_multinomial_frozen_polynomials():
    assert oracle_poly((1, 1, 2, 2)) == [1, 1, 2, 1, 1]
    assert oracle_poly((1, 2, 2)) == [1, 1, 1]
    assert gaussian_multinomial((5, 0), HALF) == 1


@given(st.integers(0, 12), st.integers(0, 12), rationals)
def test_pascal_recurrence(n, k, q):
    if k > n + 1:
        return
    lhs = gaussian_binomial(n + 1, k, q)
    rhs = (gaussian_binomial(n, k - 1, q) if k else 0) + qpow(q, k) * gaussian_binomial(n, k, q)
    assert lhs == rhs


@given(st.lists(st.integers(0, 4), min_size=1, max_size=4), rationals)
def test_multinomial_is_factorial_ratio(parts, q):
    denom = 1
    for p in parts:
        denom *= q_factorial(p, q)
    assert gaussian_multinomial(parts, q) == q_factorial(sum(parts), q) / denom


def test_pochhammer_examples():
    q = HALF
    assert q_pochhammer(Fraction(3, 7), q, 0) == 1
    assert q_pochhammer(q**2, 1 / q, 1) == 1 - q**2
    assert q_pochhammer(q, 1 / q, 2) == 0
    assert q_pochhammer(0, q, INF) == 1
    with pytest.raises(UnsupportedCaseError):
        q_pochhammer(q, q, INF)


def test_pow_pochhammer_vanishes_and_handles_infinity():
    q = HALF
    assert q_pow_pochhammer(2, 3, q) == 0
    assert q_pow_pochhammer(INF, 5, q) == 1
    assert q_pow_pochhammer(3, 2, q) == (1 - q**3) * (1 - q**2)


def test_qpow_infinite_exponent_is_zero():
    assert qpow(HALF, INF) == 0
    assert qpow(0.5, INF) == 0


def test_float_mode_tracks_exact_mode():
    assert abs(gaussian_multinomial((3, 2, 2), 0.3) - float(gaussian_multinomial((3, 2, 2), Fraction(3, 10)))) < 1e-12


@pytest.mark.parametrize("bad", ["0", "1", "3/2", "-1/2"])
def test_qparam_rejects_out_of_range(bad):
    with pytest.raises(QRangeError):
        QParam.parse(bad)


def test_qparam_parse():
    assert QParam.parse("1/3").value == Fraction(1, 3)
    assert float(QParam.parse("0.25", exact=False)) == 0.25
