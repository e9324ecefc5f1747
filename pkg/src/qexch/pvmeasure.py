"""Infinite q-shuffles, the measures P^(v) and the infinite Mallows measure.

A measure ``P^(v)`` is indexed by an :class:`~qexch.words.InversionFreeWord`.
The infinite Mallows measure is ``P^(v)`` for ``v = 1 2 3 ...``; it has no
code path of its own.
"""

from __future__ import annotations

import bisect
import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .mallows import BudgetError, TWO64, permutations, mallows_distribution
from .qkernel import INF, check_q, is_inf, one_like, q_int, q_pow_pochhammer, qpow
from .stats import tv_distance
from .words import InversionFreeWord, inversions

ITERATION_CAP = 10**6


class IterationCapExceeded(RuntimeError):
    pass


class NeedMoreSamples(ValueError):
    """The sampled prefix is too short to determine the requested object."""


# ---------------------------------------------------------------------------
# prefix state


@dataclass
class PrefixState:
    """Emitted prefix ``u`` of a shuffle of ``v`` with its letter counts."""

    v: InversionFreeWord
    emitted: list = field(default_factory=list)
    consumed: Counter = field(default_factory=Counter)

    def __post_init__(self):
        if self.emitted and not self.consumed:
            self.consumed = Counter(self.emitted)
        for a, c in self.consumed.items():
            if c > self.v.multiplicity(a):
                raise ValueError(f"letter {a} used {c} times but v has only {self.v.multiplicity(a)}")

    @classmethod
    def of(cls, v: InversionFreeWord, u: Sequence[int]) -> "PrefixState":
        return cls(v, list(u), Counter(u))

    def residual(self, a: int):
        """``l_a - mu_a(u)``."""
        m = self.v.multiplicity(a)
        return m if is_inf(m) else m - self.consumed.get(a, 0)

    def residual_below(self, a: int):
        """``sum_{b<a} (l_b - mu_b(u))``."""
        below = self.v.mass_below(a)
        if is_inf(below):
            return INF
        return below - sum(c for b, c in self.consumed.items() if b < a)

    def push(self, a: int) -> None:
        self.emitted.append(a)
        self.consumed[a] += 1


# ---------------------------------------------------------------------------
# transition and marginal probabilities


def transition_prob(state: PrefixState, a: int, q):
    """``P(u -> ua) = q**(sum_{b<a}(l_b - mu_b)) * (1 - q**(l_a - mu_a))``."""
    check_q(q)
    if state.v.multiplicity(a) == 0:
        return one_like(q) * 0
    return qpow(q, state.residual_below(a)) * (1 - qpow(q, state.residual(a)))


def transition_law(state: PrefixState, q, tol: float = 0.0) -> dict:
    """All nonzero transitions out of ``state``.

    Finite supports are listed completely.  For type-II words the letters
    past the last touched one are listed until the remaining mass
    ``x_i`` drops to ``tol`` (which must then be positive).
    """
    v = state.v
    out = {}
    if v.tail is None:
        for a in v.support:
            p = transition_prob(state, a, q)
            if p:
                out[a] = p
        return out
    if tol <= 0:
        raise ValueError("type-II words need a positive tolerance to truncate the law")
    x = one_like(q)
    top = max(state.consumed, default=0)
    for a in v.letters():
        nxt = x * qpow(q, state.residual(a))
        if x != nxt:
            out[a] = x - nxt
        x = nxt
        if a > top and x <= tol:
            break
    return out


def marginal_prob(v: InversionFreeWord, u: Sequence[int], q):
    """``P^(v)_n(u)`` in closed form, with ``q**INF = 0``."""
    check_q(q)
    mu = Counter(u)
    if any(v.multiplicity(a) == 0 for a in mu):
        return one_like(q) * 0
    letters = sorted(mu)
    cross = 0
    seen = 0
    for a in letters:
        cross += seen * mu[a]
        seen += mu[a]
    out = qpow(q, inversions(u) - cross)
    for a in letters:
        la = v.multiplicity(a)
        factor = q_pow_pochhammer(la, mu[a], q)
        if not factor:
            return factor
        # mu_a > 0 and the letter is in the support, so sum_{b<a} l_b is finite
        out *= factor * qpow(q, mu[a] * v.mass_below(a))
    return out


def transition_product(v: InversionFreeWord, u: Sequence[int], q):
    """``P^(v)_n(u)`` as the product of transition probabilities along ``u``."""
    state = PrefixState(v)
    p = one_like(q)
    for a in u:
        p *= transition_prob(state, a, q)
        if not p:
            return p
        state.push(a)
    return p


def marginal_law(v: InversionFreeWord, n: int, q, letters: Sequence[int] | None = None) -> dict:
    """Exact law of the first ``n`` letters, for finite-support ``v``.

    For type-II words pass ``letters`` to restrict to words over that set.
    """
    if letters is None:
        if v.tail is not None:
            raise ValueError("pass letters= for a word with infinite support")
        letters = v.support
    out = {}
    for u in itertools.product(letters, repeat=n):
        p = marginal_prob(v, u, q)
        if p:
            out[u] = p
    return out


# ---------------------------------------------------------------------------
# samplers


def sample_geometric(q, rng: np.random.Generator, exact: bool = False) -> int:
    """``G_q(i) = (1-q) q**(i-1)`` on ``1, 2, ...``.

    Exact mode compares a 64-bit uniform integer against ``q**i`` in
    rational arithmetic.
    """
    if exact:
        q = Fraction(q)
        u = Fraction(int(rng.integers(0, TWO64, dtype=np.uint64)), TWO64)
        # xi > i iff u >= 1 - q**i (up to the 2**-64 grid); survival is q**i
        i, surv = 1, q
        while u >= 1 - surv:
            i += 1
            surv *= q
            if i > ITERATION_CAP:
                raise IterationCapExceeded("geometric draw did not terminate")
        return i
    q = float(q)
    u = rng.random()
    return 1 + int(math.floor(math.log1p(-u) / math.log(q)))


class _PositionalShuffle:
    """Infinite shuffle by positions; only consumed positions are stored."""

    def __init__(self, v: InversionFreeWord):
        self.v = v
        self.consumed: list = []

    def select(self, xi: int) -> int:
        # the xi-th unconsumed position p satisfies p = xi + #{consumed < p}
        p = xi
        idx = 0
        consumed = self.consumed
        while idx < len(consumed) and consumed[idx] <= p:
            p += 1
            idx += 1
        bisect.insort(consumed, p)
        return p

    def step(self, xi: int) -> tuple:
        p = self.select(xi)
        return self.v.letter_at(p), p


def sample_prefix(
    v: InversionFreeWord,
    n: int,
    q,
    rng: np.random.Generator,
    backend: str = "positional",
    exact: bool = False,
    record: list | None = None,
) -> tuple:
    """First ``n`` letters of the infinite q-shuffle of ``v``.

    ``backend="positional"`` runs the shuffle itself; ``"letterwise"``
    draws each letter from the transition law by inverse transform.  When
    ``record`` is a list, the positional backend appends ``(xi, position)``
    pairs to it.
    """
    check_q(q)
    if n < 1:
        raise ValueError("n must be positive")
    if backend == "positional":
        shuffle = _PositionalShuffle(v)
        out = []
        for _ in range(n):
            xi = sample_geometric(q, rng, exact)
            letter, pos = shuffle.step(xi)
            if record is not None:
                record.append((xi, pos))
            out.append(letter)
        return tuple(out)
    if backend == "letterwise":
        state = PrefixState(v)
        for _ in range(n):
            state.push(_draw_letter(state, q, rng, exact))
        return tuple(state.emitted)
    raise ValueError(f"unknown backend {backend!r}")


def _draw_letter(state: PrefixState, q, rng, exact: bool) -> int:
    if exact:
        q = Fraction(q)
        u = Fraction(int(rng.integers(0, TWO64, dtype=np.uint64)), TWO64)
    else:
        q = float(q)
        u = rng.random()
    # cumulative mass through a_i is 1 - x_i
    x = one_like(q)
    last = None
    for count, a in enumerate(state.v.letters(), start=1):
        res = state.residual(a)
        x = x * qpow(q, res)
        last = a
        if 1 - x > u:
            return a
        if count >= ITERATION_CAP:
            raise IterationCapExceeded(f"letter search passed {ITERATION_CAP} letters (u={u})")
    return last


def sample_prefixes(v, n, q, samples, rng, backend="positional", exact=False) -> list:
    return [sample_prefix(v, n, q, rng, backend, exact) for _ in range(samples)]


def first_letter_wait(q, rng: np.random.Generator, cap: int = ITERATION_CAP) -> int:
    """Steps until the first letter of the input is emitted by the shuffle."""
    shuffle = _PositionalShuffle(InversionFreeWord.ones())
    for step in range(1, cap + 1):
        if shuffle.select(sample_geometric(q, rng)) == 1:
            return step
    raise IterationCapExceeded("first position never selected")


# ---------------------------------------------------------------------------
# weakly monomial matrices


@dataclass(frozen=True)
class MonomialMatrix:
    """A ``k x k`` 0-1 matrix with at most one 1 in each row and column."""

    k: int
    entries: frozenset

    def __post_init__(self):
        entries = frozenset((int(i), int(j)) for i, j in self.entries)
        object.__setattr__(self, "entries", entries)
        rows = [i for i, _ in entries]
        cols = [j for _, j in entries]
        if len(set(rows)) != len(rows) or len(set(cols)) != len(cols):
            raise ValueError("more than one 1 in a row or column")
        if any(not (1 <= i <= self.k and 1 <= j <= self.k) for i, j in entries):
            raise ValueError("entry outside the matrix")

    @property
    def rank(self) -> int:
        return len(self.entries)

    @property
    def rows(self) -> frozenset:
        return frozenset(i for i, _ in self.entries)

    @property
    def cols(self) -> frozenset:
        return frozenset(j for _, j in self.entries)

    def inversions(self) -> int:
        """Unordered pairs of 1's whose row and column differences have opposite signs."""
        pts = sorted(self.entries)
        return sum(
            1
            for (i1, j1), (i2, j2) in itertools.combinations(pts, 2)
            if (i1 - i2) * (j1 - j2) < 0
        )

    def transpose(self) -> "MonomialMatrix":
        return MonomialMatrix(self.k, frozenset((j, i) for i, j in self.entries))

    def to_rows(self) -> list:
        return [[int((i, j) in self.entries) for j in range(1, self.k + 1)] for i in range(1, self.k + 1)]

    def __str__(self):
        return ";".join("".join(str(x) for x in row) for row in self.to_rows())

    @classmethod
    def parse(cls, text: str) -> "MonomialMatrix":
        """Row-major bit rows separated by ``;``, e.g. ``"01;00"``."""
        rows = [r.strip() for r in text.strip().split(";")]
        k = len(rows)
        if any(len(r) != k or set(r) - {"0", "1"} for r in rows):
            raise ValueError(f"bad matrix spec {text!r}")
        return cls(k, frozenset((i, j) for i, r in enumerate(rows, 1) for j, c in enumerate(r, 1) if c == "1"))

    @classmethod
    def identity(cls, k: int) -> "MonomialMatrix":
        return cls(k, frozenset((i, i) for i in range(1, k + 1)))


def monomial_matrices(k: int):
    """All of ``M(k)``."""
    cells = range(1, k + 1)
    for r in range(k + 1):
        for rows in itertools.combinations(cells, r):
            for cols in itertools.permutations(cells, r):
                yield MonomialMatrix(k, frozenset(zip(rows, cols)))


def theta_truncation(prefix: Sequence[int], k: int) -> MonomialMatrix:
    """``theta_k``: a 1 at ``(i, j)`` iff ``w_j = i <= k`` for ``j <= k``.

    Only the first ``k`` letters matter; a shorter prefix raises
    :class:`NeedMoreSamples`.
    """
    if len(prefix) < k:
        raise NeedMoreSamples(f"theta_{k} needs {k} letters, got {len(prefix)}")
    return MonomialMatrix(k, frozenset((w, j) for j, w in enumerate(prefix[:k], start=1) if w <= k))


def theta_pmf(m: MonomialMatrix, q):
    """Probability of ``m`` under the ``theta_k`` image of the infinite Mallows measure."""
    check_q(q)
    k, r = m.k, m.rank
    e = k * k - 2 * k * r - r + m.inversions() + sum(m.rows) + sum(m.cols)
    return (1 - q) ** r * qpow(q, e)


def theta_law(k: int, q) -> dict:
    return {m: theta_pmf(m, q) for m in monomial_matrices(k)}


def theta_law_finite(k: int, n: int, q) -> dict:
    """Exact ``theta_k`` image of ``Q_n`` (``n >= k``).

    Only the first ``k`` letters of the finite shuffle of ``1..n`` matter,
    with letters above ``k`` indistinguishable, so each word over
    ``1..k+1`` is scored step by step: choosing letter ``a`` from the
    remaining inversion-free word has probability
    ``q**(#letters < a) * [#a]_q / [len]_q``.
    """
    if n < k:
        raise ValueError("n must be at least k")
    law: dict = {}
    for word in itertools.product(range(1, k + 2), repeat=k):
        if any(c > 1 for a, c in Counter(word).items() if a <= k):
            continue
        counts = {a: 1 for a in range(1, k + 1)}
        counts[k + 1] = n - k
        p = one_like(q)
        length = n
        for a in word:
            if counts[a] == 0:
                p = p * 0
                break
            below = sum(counts[b] for b in counts if b < a)
            p *= qpow(q, below) * q_int(counts[a], q) / q_int(length, q)
            counts[a] -= 1
            length -= 1
        if p:
            m = theta_truncation(word, k)
            law[m] = law.get(m, 0) + p
    return law


def theta_law_enumerated(k: int, n: int, q, budget: int = 8) -> dict:
    """``theta_k`` image of ``Q_n`` by summing over all of ``S_n``."""
    law: dict = {}
    for s, p in mallows_distribution(n, q, budget).items():
        m = theta_truncation(s, k)
        law[m] = law.get(m, 0) + p
    return law


def sample_theta(k: int, q, rng: np.random.Generator, backend: str = "positional") -> MonomialMatrix:
    return theta_truncation(sample_prefix(InversionFreeWord.ones(), k, q, rng, backend), k)


def weak_convergence_check(k: int, ns: Iterable[int], q, rng=None, samples: int = 0, enumerate_upto: int = 8) -> list:
    """TV between ``theta_k(Q_n)`` and ``theta_k(Q)`` for each ``n``.

    Exact rows come from enumeration (``n <= enumerate_upto``) or the
    step-by-step formula; with ``rng`` and ``samples`` an empirical column
    is added.
    """
    if k > 3:
        raise BudgetError("k must be at most 3")
    limit = theta_law(k, q)
    rows = []
    for n in ns:
        exact = theta_law_enumerated(k, n, q) if n <= enumerate_upto else theta_law_finite(k, n, q)
        row = {"n": n, "tv": tv_distance(exact, limit)}
        if rng is not None and samples:
            from .mallows import sample_mallows_ranks_batch

            draws = sample_mallows_ranks_batch(n, q, samples, rng)
            emp = Counter(theta_truncation(tuple(r[:k]), k) for r in draws.tolist())
            row["tv_empirical"] = tv_distance({m: c / samples for m, c in emp.items()}, {m: float(p) for m, p in limit.items()})
        rows.append(row)
    return rows


def inversion_invariance_check(samples: int, k: int, q, rng: np.random.Generator, tol: float = 0.01):
    """Empirical law of ``theta_k(sigma)`` against that of its transpose.

    Returns ``(passed, tv)``.
    """
    if k > 3:
        raise BudgetError("k must be at most 3")
    counts = Counter(sample_theta(k, q, rng) for _ in range(samples))
    law = {m: c / samples for m, c in counts.items()}
    law_t = {m.transpose(): p for m, p in law.items()}
    tv = tv_distance(law, law_t)
    return tv <= tol, tv


def mallows_inversion_symmetric(n: int, q) -> bool:
    """``Q_n(sigma) == Q_n(sigma^-1)`` for every ``sigma``."""
    from .words import inverse

    law = mallows_distribution(n, q)
    return all(law[s] == law[inverse(s)] for s in permutations(n))
