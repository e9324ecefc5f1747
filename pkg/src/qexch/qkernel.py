"""Exact q-combinatorics.

All functions accept ``q`` as a :class:`fractions.Fraction` (exact mode) or a
``float`` (float mode); arithmetic stays in whatever type ``q`` has.  The
value :data:`INF` stands for an infinite multiplicity or exponent, and
``q ** INF`` is taken to be exactly zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Union

Number = Union[Fraction, float, int]


class _Infinity:
    """Singleton marking an infinite multiplicity."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())

    # comparisons against plain integers, so sorting and max() behave
    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("qexch.INF")

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __sub__(self, other):
        if other is self:
            raise ValueError("INF - INF is undefined")
        return self


INF = _Infinity()


def is_inf(x) -> bool:
    return x is INF


class QRangeError(ValueError):
    """Raised when q lies outside the open interval (0, 1)."""


class UnsupportedCaseError(ValueError):
    pass


@dataclass(frozen=True)
class QParam:
    """A deformation parameter together with its arithmetic mode.

    ``QParam.parse("1/2")`` gives an exact parameter; ``.float()`` switches
    to the binary image used by Monte-Carlo code.
    """

    value: Number
    exact: bool = True

    def __post_init__(self):
        check_q(self.value)
        if self.exact and isinstance(self.value, float):
            object.__setattr__(self, "value", Fraction(self.value))

    @classmethod
    def parse(cls, text: str, exact: bool = True) -> "QParam":
        value = Fraction(text.strip())
        return cls(value if exact else float(value), exact=exact)

    def float(self) -> "QParam":
        return QParam(float(self.value), exact=False)

    def __float__(self):
        return float(self.value)

    def __str__(self):
        return str(self.value)


def check_q(q) -> Number:
    """Return the numeric value of ``q`` after asserting ``0 < q < 1``."""
    if isinstance(q, QParam):
        return q.value
    if not 0 < q < 1:
        raise QRangeError(f"q must satisfy 0 < q < 1, got {q}")
    return q


def _val(q):
    return q.value if isinstance(q, QParam) else q


def one_like(q):
    q = _val(q)
    return 1.0 if isinstance(q, float) else Fraction(1)


def qpow(q, e):
    """``q ** e`` with ``q ** INF == 0``; negative integer exponents allowed."""
    q = _val(q)
    if e is INF:
        return 0.0 if isinstance(q, float) else Fraction(0)
    if isinstance(q, Rational) and not isinstance(q, Fraction):
        q = Fraction(q)
    return q ** e


def q_int(n: int, q) -> Number:
    """The q-integer ``[n]_q = 1 + q + ... + q**(n-1)``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    q = _val(q)
    total = one_like(q) * 0
    term = one_like(q)
    for _ in range(n):
        total += term
        term *= q
    return total


def q_factorial(n: int, q) -> Number:
    if n < 0:
        raise ValueError("n must be nonnegative")
    out = one_like(q)
    for k in range(1, n + 1):
        out *= q_int(k, q)
    return out


def gaussian_multinomial(parts: Iterable[int], q) -> Number:
    """``[n; n_1, ..., n_d]_q`` with ``n = sum(parts)``."""
    parts = list(parts)
    if not parts:
        raise ValueError("parts must be nonempty")
    if any(p < 0 for p in parts):
        raise ValueError("parts must be nonnegative")
    # product of Gaussian binomials keeps intermediate values small
    out = one_like(q)
    running = 0
    for p in parts:
        running += p
        out *= gaussian_binomial(running, p, q)
    return out


def gaussian_binomial(n: int, k: int, q) -> Number:
    if k < 0 or k > n:
        return one_like(q) * 0
    k = min(k, n - k)
    num = one_like(q)
    den = one_like(q)
    for i in range(k):
        num *= q_int(n - i, q)
        den *= q_int(i + 1, q)
    return num / den


def q_pochhammer(x, base, k) -> Number:
    """``(x; base)_k = prod_{i<k} (1 - x * base**i)``.

    ``k`` may be :data:`INF` only when ``x == 0``, in which case the product
    is 1.
    """
    x = _val(x)
    base = _val(base)
    if k is INF:
        if x != 0:
            raise UnsupportedCaseError("infinite Pochhammer symbol is only supported for x = 0")
        return one_like(base)
    if k < 0:
        raise ValueError("k must be nonnegative")
    out = one_like(base)
    term = x
    for _ in range(k):
        out *= 1 - term
        term = term * base
    return out


def q_pow_pochhammer(exponent, mu: int, q) -> Number:
    """``(q**exponent; q**-1)_mu`` where ``exponent`` may be :data:`INF`.

    With an infinite exponent every factor is 1.  With a finite exponent
    the product vanishes as soon as ``mu > exponent``.
    """
    q = _val(q)
    if exponent is INF or mu == 0:
        return one_like(q)
    if mu > exponent:
        return one_like(q) * 0
    out = one_like(q)
    for i in range(mu):
        out *= 1 - qpow(q, exponent - i)
    return out


def poly_eval(coeffs, q):
    """Evaluate an integer-coefficient polynomial (constant term first)."""
    out = one_like(q) * 0
    for c in reversed(list(coeffs)):
        out = out * _val(q) + c
    return out


def as_fraction(x) -> Fraction:
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"cannot convert {x} to a fraction")
    return Fraction(x)


def format_exact(x) -> str:
    """Render an exact value as ``"A/B"`` (``"A"`` when the denominator is 1)."""
    x = Fraction(x)
    return str(x)
