"""The finite Mallows measure and the finite q-shuffle."""

from __future__ import annotations

import bisect
import itertools
import math
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .qkernel import check_q, one_like, q_factorial, q_int, qpow
from .words import inversions, inversions_naive, inverse

TWO64 = 1 << 64


class BudgetError(ValueError):
    """Raised when an exact enumeration would exceed its size budget."""


# ---------------------------------------------------------------------------
# permutations


def identity(n: int) -> tuple:
    return tuple(range(1, n + 1))


def permutations(n: int):
    return itertools.permutations(range(1, n + 1))


def mallows_pmf(sigma: Sequence[int], q):
    """``Q_n(sigma) = q**inv(sigma) / [n]_q!``."""
    check_q(q)
    return qpow(q, inversions(sigma)) / q_factorial(len(sigma), q)


def mallows_distribution(n: int, q, budget: int = 8) -> dict:
    if n > budget:
        raise BudgetError(f"n = {n} exceeds the enumeration budget {budget}")
    z = q_factorial(n, q)
    return {s: qpow(q, inversions_naive(s)) / z for s in permutations(n)}


def backward_ranks(sigma: Sequence[int]) -> tuple:
    """``beta_j = #{i <= j : sigma(i) <= sigma(j)}``."""
    seen: list = []
    out = []
    for s in sigma:
        bisect.insort(seen, s)
        out.append(bisect.bisect_right(seen, s))
    return tuple(out)


def from_backward_ranks(beta: Sequence[int]) -> tuple:
    """Inverse of :func:`backward_ranks`."""
    n = len(beta)
    for j, b in enumerate(beta, start=1):
        if not 1 <= b <= j:
            raise ValueError(f"beta_{j} = {b} is outside 1..{j}")
    tree = OrderStatisticTree(n)
    out = [0] * n
    # sigma(j) has rank beta_j among the values not used by positions > j
    for j in range(n, 0, -1):
        out[j - 1] = tree.pop_kth(beta[j - 1])
    return tuple(out)


def reflect_antidiagonal(sigma: Sequence[int]) -> tuple:
    """Reflect the permutation matrix in its secondary diagonal."""
    n = len(sigma)
    inv = inverse(sigma)
    return tuple(n + 1 - inv[n - i] for i in range(1, n + 1))


# ---------------------------------------------------------------------------
# order-statistic structure


class OrderStatisticTree:
    """Fenwick tree over ``1..n`` supporting "remove the k-th present item"."""

    def __init__(self, n: int):
        self.n = n
        self.size = n
        self._tree = [0] * (n + 1)
        for i in range(1, n + 1):
            self._tree[i] += 1
            j = i + (i & -i)
            if j <= n:
                self._tree[j] += self._tree[i]
        self._log = 1 << max(n.bit_length() - 1, 0) if n else 0

    def __len__(self):
        return self.size

    def kth(self, k: int) -> int:
        if not 1 <= k <= self.size:
            raise IndexError(f"rank {k} outside 1..{self.size}")
        pos = 0
        step = self._log
        while step:
            nxt = pos + step
            if nxt <= self.n and self._tree[nxt] < k:
                pos = nxt
                k -= self._tree[nxt]
            step >>= 1
        return pos + 1

    def remove(self, i: int) -> None:
        self.size -= 1
        while i <= self.n:
            self._tree[i] -= 1
            i += i & -i

    def pop_kth(self, k: int) -> int:
        i = self.kth(k)
        self.remove(i)
        return i


# ---------------------------------------------------------------------------
# truncated geometric law


class TruncatedGeometric:
    """``G_{q,n}(i) = q**(i-1) / [n]_q`` on ``1..n``.

    Exact draws compare a 64-bit uniform integer ``u`` against the
    integer thresholds ``ceil(2**64 * F(i))``, so the sampled law differs
    from the exact one by less than ``n * 2**-64`` in every cell.
    """

    def __init__(self, n: int, q):
        if n < 1:
            raise ValueError("support size must be positive")
        self.n = n
        self.q = check_q(q)
        self._thresholds = None

    def pmf(self, i: int):
        if not 1 <= i <= self.n:
            return one_like(self.q) * 0
        return qpow(self.q, i - 1) / q_int(self.n, self.q)

    def pmf_table(self) -> dict:
        return {i: self.pmf(i) for i in range(1, self.n + 1)}

    @property
    def thresholds(self) -> list:
        if self._thresholds is None:
            q = Fraction(self.q)
            z = q_int(self.n, q)
            out = []
            cdf = Fraction(0)
            for i in range(1, self.n):
                cdf += q ** (i - 1) / z
                t = -((-cdf.numerator * TWO64) // cdf.denominator)
                out.append(min(t, TWO64 - 1))
            self._thresholds = out
        return self._thresholds

    def sample(self, rng: np.random.Generator, exact: bool = True) -> int:
        if self.n == 1:
            return 1
        if exact:
            u = int(rng.integers(0, TWO64, dtype=np.uint64))
            return 1 + bisect.bisect_right(self.thresholds, u)
        q = float(self.q)
        u = rng.random()
        i = 1 + int(math.floor(math.log1p(-u * (1 - q ** self.n)) / math.log(q)))
        return min(max(i, 1), self.n)

    def sample_many(self, rng: np.random.Generator, size: int, exact: bool = True) -> np.ndarray:
        if self.n == 1:
            return np.ones(size, dtype=np.int64)
        if exact:
            u = rng.integers(0, TWO64, size=size, dtype=np.uint64)
            t = np.array(self.thresholds, dtype=np.uint64)
            return 1 + np.searchsorted(t, u, side="right").astype(np.int64)
        q = float(self.q)
        u = rng.random(size)
        i = 1 + np.floor(np.log1p(-u * (1 - q ** self.n)) / math.log(q)).astype(np.int64)
        return np.clip(i, 1, self.n)


@lru_cache(maxsize=256)
def _cached_geometric(n, q, kind):
    return TruncatedGeometric(n, q)


def _geometric(n, q):
    # Fraction(1, 2) and 0.5 hash alike; keep the modes apart
    return _cached_geometric(n, q, type(q))


# ---------------------------------------------------------------------------
# samplers


def sample_mallows_ranks(n: int, q, rng: np.random.Generator, exact: bool = True) -> tuple:
    """Draw from ``Q_n`` through independent backward ranks."""
    if n < 1:
        raise ValueError("n must be positive")
    beta = [j - _geometric(j, q).sample(rng, exact) + 1 for j in range(1, n + 1)]
    return from_backward_ranks(beta)


def sample_mallows_ranks_batch(n: int, q, size: int, rng: np.random.Generator, exact: bool = True) -> np.ndarray:
    """``size`` independent draws from ``Q_n`` as rows of an int array."""
    beta = np.empty((size, n), dtype=np.int64)
    for j in range(1, n + 1):
        beta[:, j - 1] = j - _geometric(j, q).sample_many(rng, size, exact) + 1
    return ranks_to_permutations(beta)


def ranks_to_permutations(beta: np.ndarray) -> np.ndarray:
    size, n = beta.shape
    free = np.ones((size, n), dtype=bool)
    out = np.empty((size, n), dtype=np.int64)
    for j in range(n, 0, -1):
        rank = np.cumsum(free, axis=1)
        hit = free & (rank == beta[:, j - 1][:, None])
        val = np.argmax(hit, axis=1)
        out[:, j - 1] = val + 1
        free[np.arange(size), val] = False
    return out


def finite_qshuffle(v: Sequence, q, rng: np.random.Generator, exact: bool = True, structure: str = "tree") -> tuple:
    """The finite q-shuffle of ``v``.

    ``structure="tree"`` removes letters through an order-statistic tree;
    ``structure="list"`` is the linear-scan reference.
    """
    v = tuple(v)
    n = len(v)
    xis = [_geometric(n - m, q).sample(rng, exact) for m in range(n)]
    return apply_selections(v, xis, structure)


def apply_selections(v: Sequence, xis: Sequence[int], structure: str = "tree") -> tuple:
    """Run the shuffle with fixed selection indices ``xis``."""
    v = tuple(v)
    if structure == "list":
        rest = list(v)
        return tuple(rest.pop(xi - 1) for xi in xis)
    if structure == "tree":
        tree = OrderStatisticTree(len(v))
        return tuple(v[tree.pop_kth(xi) - 1] for xi in xis)
    raise ValueError(f"unknown structure {structure!r}")


def finite_qshuffle_batch(v: Sequence, q, size: int, rng: np.random.Generator, exact: bool = True) -> list:
    v = tuple(v)
    n = len(v)
    xis = np.stack([_geometric(n - m, q).sample_many(rng, size, exact) for m in range(n)], axis=1) if n else None
    return [apply_selections(v, row.tolist(), "list") for row in xis] if n else [() for _ in range(size)]


def selection_probability(v: Sequence, xis: Sequence[int], q):
    """Probability that the shuffle of ``v`` uses the indices ``xis``."""
    n = len(v)
    p = one_like(q)
    for m, xi in enumerate(xis):
        p *= _geometric(n - m, q).pmf(xi)
    return p


def shuffle_distribution(v: Sequence, q, budget: int = 8) -> dict:
    """Exact law of :func:`finite_qshuffle` aggregated by output word."""
    v = tuple(v)
    if len(v) > budget:
        raise BudgetError(f"word length {len(v)} exceeds the enumeration budget {budget}")
    check_q(q)

    @lru_cache(maxsize=None)
    def law(rest):
        if not rest:
            return {(): one_like(q)}
        z = q_int(len(rest), q)
        out: dict = {}
        for i, letter in enumerate(rest):
            p = qpow(q, i) / z
            for tail, pt in law(rest[:i] + rest[i + 1:]).items():
                w = (letter,) + tail
                out[w] = out.get(w, 0) + p * pt
        return out

    return dict(law(v))


def verify_finite_qexchangeable(dist: Mapping, q):
    """Check ``P(T w) = q**(inv(T w) - inv(w)) P(w)`` for adjacent swaps.

    Returns ``(True, None)`` or ``(False, (word, i))`` where ``i`` is the
    first position of the offending transposition ``(i, i+1)``.
    """
    for w, p in dist.items():
        if p == 0:
            continue
        for i in range(len(w) - 1):
            a, b = w[i], w[i + 1]
            swapped = w[:i] + (b, a) + w[i + 2:]
            c = 1 if a < b else (-1 if a > b else 0)
            if dist.get(swapped, 0) != qpow(q, c) * p:
                return False, (w, i + 1)
    return True, None


def pushforward(dist: Mapping, f) -> dict:
    """Image of a law on words under the letterwise map ``f``."""
    out: dict = {}
    for w, p in dist.items():
        img = tuple(f(a) for a in w)
        out[img] = out.get(img, 0) + p
    return out
