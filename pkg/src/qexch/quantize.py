"""Quantile words: q-shuffles that approach i.i.d. sampling as q -> 1.

A law ``nu`` with finite support is given as a mapping ``value -> mass``
with exact masses.  Its quantile word ``alpha_k = F^-1(1 - q**k)`` is
eventually constant, so it is an inversion-free word of finite type once
distinct values are encoded as letters ``1, 2, ...``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .pvmeasure import marginal_prob
from .qkernel import INF, check_q, is_inf, qpow
from .stats import tv_distance
from .words import InversionFreeWord


@dataclass(frozen=True)
class QuantileSpec:
    """A finite-support law on the reals, sorted by value."""

    values: tuple
    masses: tuple

    def __post_init__(self):
        if len(self.values) != len(self.masses) or not self.values:
            raise ValueError("need matching, nonempty values and masses")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ValueError("values must be strictly increasing")
        if any(m < 0 for m in self.masses) or sum(self.masses) != 1:
            raise ValueError("masses must be nonnegative and sum to 1")

    @classmethod
    def from_pmf(cls, pmf: Mapping) -> "QuantileSpec":
        items = sorted((Fraction(x), Fraction(p)) for x, p in pmf.items() if p)
        return cls(tuple(x for x, _ in items), tuple(p for _, p in items))

    @classmethod
    def parse(cls, text: str) -> "QuantileSpec":
        """``"0:1/2,1:1/2"``."""
        pmf = {}
        for item in text.split(","):
            x, _, p = item.partition(":")
            pmf[Fraction(x.strip())] = pmf.get(Fraction(x.strip()), 0) + Fraction(p.strip())
        return cls.from_pmf(pmf)

    def cdf(self, x):
        return sum((m for v, m in zip(self.values, self.masses) if v <= x), Fraction(0))

    def quantile(self, p):
        """``F^-1(p) = inf {x : F(x) >= p}``."""
        total = Fraction(0)
        for v, m in zip(self.values, self.masses):
            total += m
            if total >= p:
                return v
        return self.values[-1]

    def pmf(self) -> dict:
        return dict(zip(self.values, self.masses))


def quantile_word(spec: QuantileSpec, q, kmax: int) -> list:
    """``alpha_1, ..., alpha_kmax``."""
    check_q(q)
    if kmax < 1:
        raise ValueError("kmax must be positive")
    return [spec.quantile(1 - qpow(q, k)) for k in range(1, kmax + 1)]


def _cutoffs(spec: QuantileSpec, q) -> list:
    """``K_j = max {k >= 0 : q**k >= 1 - F(x_j)}`` (``INF`` for the last value).

    ``alpha_k = x_j`` exactly for ``K_{j-1} < k <= K_j``.
    """
    out = []
    cdf = Fraction(0)
    k, qk = 0, Fraction(1) if not isinstance(q, float) else 1.0
    for j, m in enumerate(spec.masses):
        cdf += m
        if j == len(spec.masses) - 1 or cdf == 1:
            out.append(INF)
            break
        while qk * q >= 1 - cdf:
            k += 1
            qk *= q
        out.append(k)
    return out


def quantile_letters(spec: QuantileSpec, q):
    """Encode the quantile word as an :class:`InversionFreeWord`.

    Returns ``(word, values)`` where ``values[a-1]`` is the real value of
    letter ``a``.  Atoms skipped by the quantile sequence get no letter.
    """
    check_q(q)
    cut = _cutoffs(spec, q)
    mults, values = [], []
    prev = 0
    for x, K in zip(spec.values, cut):
        m = INF if is_inf(K) else K - prev
        if is_inf(m) or m > 0:
            mults.append(m)
            values.append(x)
        if is_inf(K):
            break
        prev = K
    letters = tuple(range(1, len(mults) + 1))
    return InversionFreeWord(letters, tuple(mults)), values


def tilde_nu(spec: QuantileSpec, q) -> dict:
    """Law of ``alpha_xi`` for ``xi ~ G_q``: mass ``q**K_{j-1} - q**K_j`` at ``x_j``."""
    check_q(q)
    out = {}
    prev = 0
    for x, K in zip(spec.values, _cutoffs(spec, q)):
        mass = qpow(q, prev) - qpow(q, K)
        if mass:
            out[x] = mass
        if is_inf(K):
            break
        prev = K
    return out


def product_law(spec: QuantileSpec, n: int) -> dict:
    out = {}
    for combo in itertools.product(zip(spec.values, spec.masses), repeat=n):
        p = Fraction(1)
        for _, m in combo:
            p *= m
        if p:
            out[tuple(x for x, _ in combo)] = p
    return out


def quantized_marginal(spec: QuantileSpec, n: int, q) -> dict:
    """Exact law of the first ``n`` values of the q-shuffle of the quantile word."""
    v, values = quantile_letters(spec, q)
    out = {}
    for u in itertools.product(v.support, repeat=n):
        p = marginal_prob(v, u, q)
        if p:
            key = tuple(values[a - 1] for a in u)
            out[key] = out.get(key, 0) + p
    return out


def convergence_experiment(spec: QuantileSpec, n: int, q_grid: Sequence, exact: bool = True) -> list:
    """TV between the quantized ``n``-marginal and ``nu^n`` for each ``q``."""
    if n > 4:
        raise ValueError("n must be at most 4")
    target = product_law(spec, n)
    rows = []
    for q in q_grid:
        q = Fraction(q) if exact else q
        law = quantized_marginal(spec, n, q)
        rows.append({"q": q, "n": n, "tv": tv_distance(law, target)})
    return rows


def sandwich_holds(record: Sequence) -> bool:
    """``xi_j <= w_j < xi_j + j`` along a positional shuffle of ``1 2 3 ...``."""
    return all(xi <= pos < xi + j for j, (xi, pos) in enumerate(record, start=1))
