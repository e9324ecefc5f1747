from fractions import Fraction

import pytest

from qexch.stats import SupportMismatch, check_pmf, compare_to_exact, make_rng, spawn, tv_distance


def test_tv_basic():
    p = {1: Fraction(1, 3), 2: Fraction(2, 3)}
    assert tv_distance(p, p) == 0
    assert tv_distance({"a": 1}, {"b": 1}) == 1
    assert tv_distance(p, {1: Fraction(1, 2), 2: Fraction(1, 2)}) == Fraction(1, 6)


def test_tv_strict_support():
    with pytest.raises(SupportMismatch):
        tv_distance({1: 1}, {2: 1}, strict=True)


def test_check_pmf():
    check_pmf({1: Fraction(1, 2), 2: Fraction(1, 2)})
    with pytest.raises(ValueError):
        check_pmf({1: Fraction(1, 2)})
    with pytest.raises(ValueError):
        check_pmf({1: 0.5, 2: 0.6})


def test_report_fields():
    rep = compare_to_exact([1, 1, 2, 2], {1: Fraction(1, 2), 2: Fraction(1, 2)}, law="fair")
    assert rep.tv == 0 and rep.chi2 == 0 and rep.samples == 4
    assert rep.as_dict()["law"] == "fair"


def test_streams_are_reproducible_and_distinct():
    assert make_rng(5).random() == make_rng(5).random()
    assert make_rng(5, 1).random() != make_rng(5, 2).random()
    a, b = spawn(7, 2)
    assert a.random() != b.random()
