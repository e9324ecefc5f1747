"""Words over integer alphabets and their inversion statistics.

Positions are 1-based throughout.  A finitary permutation ``sigma`` is a
tuple of images ``(sigma(1), ..., sigma(k))``; it fixes every position past
``k``.  It acts on words by moving the letter at position ``i`` to position
``sigma(i)``, which makes ``T_{sigma tau} = T_sigma T_tau``.
"""

from __future__ import annotations

import bisect
import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

from .qkernel import INF, gaussian_multinomial, is_inf, one_like, qpow

Word = tuple


# ---------------------------------------------------------------------------
# inversion counts


def inversions_naive(w: Sequence[int]) -> int:
    n = len(w)
    return sum(1 for i in range(n) for j in range(i + 1, n) if w[i] > w[j])


def inversions(w: Sequence[int]) -> int:
    """Number of pairs ``i < j`` with ``w[i] > w[j]``, by merge counting."""
    w = list(w)
    if len(w) < 32:
        return inversions_naive(w)
    return _sort_count(w)[1]


def _sort_count(lst):
    n = len(lst)
    if n <= 1:
        return lst, 0
    mid = n // 2
    left, a = _sort_count(lst[:mid])
    right, b = _sort_count(lst[mid:])
    merged = []
    count = a + b
    i = j = 0
    nl = len(left)
    while i < nl and j < len(right):
        # equal letters are not an inversion: take from the left first
        if left[i] <= right[j]:
            merged.append(left[i])
            i += 1
        else:
            merged.append(right[j])
            count += nl - i
            j += 1
    merged.extend(left[i:])
    merged.extend(right[j:])
    return merged, count


def multiplicities(w: Sequence[int]) -> Counter:
    return Counter(w)


def is_inversion_free(w: Sequence[int]) -> bool:
    return all(a <= b for a, b in zip(w, w[1:]))


# ---------------------------------------------------------------------------
# finitary permutations and the cocycle


class PermutationError(ValueError):
    pass


def check_permutation(sigma: Sequence[int]) -> tuple:
    sigma = tuple(sigma)
    if sorted(sigma) != list(range(1, len(sigma) + 1)):
        raise PermutationError(f"{sigma} is not a permutation of 1..{len(sigma)}")
    return sigma


def transposition(i: int, j: int, size: int | None = None) -> tuple:
    """The permutation swapping positions ``i`` and ``j``."""
    size = max(i, j) if size is None else size
    images = list(range(1, size + 1))
    images[i - 1], images[j - 1] = j, i
    return tuple(images)


def compose(sigma: Sequence[int], tau: Sequence[int]) -> tuple:
    """``sigma o tau`` (apply ``tau`` first)."""
    n = max(len(sigma), len(tau))
    s = tuple(sigma) + tuple(range(len(sigma) + 1, n + 1))
    t = tuple(tau) + tuple(range(len(tau) + 1, n + 1))
    return tuple(s[t[i] - 1] for i in range(n))


def inverse(sigma: Sequence[int]) -> tuple:
    out = [0] * len(sigma)
    for i, s in enumerate(sigma, start=1):
        out[s - 1] = i
    return tuple(out)


def act(sigma: Sequence[int], w: Sequence) -> tuple:
    """``T_sigma w``: the letter at position ``i`` moves to ``sigma(i)``."""
    sigma = check_permutation(sigma)
    if len(sigma) > len(w):
        raise PermutationError(
            f"permutation moves positions up to {len(sigma)} but the word prefix has length {len(w)}"
        )
    out = list(w)
    for i, s in enumerate(sigma):
        out[s - 1] = w[i]
    return tuple(out)


def cocycle(sigma: Sequence[int], w: Sequence[int]) -> int:
    """``inv(T_sigma w) - inv(w)``; stable for any prefix covering ``sigma``.

    Letters past ``len(sigma)`` contribute equally to both counts, so only
    the moved block matters.
    """
    sigma = _trim(sigma)
    k = len(sigma)
    block = tuple(w[:k])
    if k > len(w):
        raise PermutationError(
            f"permutation moves positions up to {k} but the word prefix has length {len(w)}"
        )
    return inversions(act(sigma, block)) - inversions(block)


def _trim(sigma):
    sigma = list(check_permutation(sigma))
    while sigma and sigma[-1] == len(sigma):
        sigma.pop()
    return tuple(sigma)


def rho_q(sigma: Sequence[int], w: Sequence[int], q):
    return qpow(q, cocycle(sigma, w))


def cocycle_additivity_check(sigma, tau, w) -> bool:
    """``c(sigma tau, w) == c(sigma, T_tau w) + c(tau, w)``."""
    n = max(len(sigma), len(tau))
    w = tuple(w)
    tau_full = tuple(tau) + tuple(range(len(tau) + 1, n + 1))
    lhs = cocycle(compose(sigma, tau), w)
    rhs = cocycle(sigma, act(tau_full, w[:n]) + w[n:]) + cocycle(tau, w)
    return lhs == rhs


# ---------------------------------------------------------------------------
# inversion-free words


@dataclass(frozen=True)
class Tail:
    """Rule for the letters past the explicit prefix of a type-II word.

    ``Tail(1)`` gives ``a, a+1, a+2, ...`` each once; ``Tail(c)`` repeats
    every further letter ``c`` times.
    """

    multiplicity: int = 1

    def __post_init__(self):
        if self.multiplicity < 1:
            raise ValueError("tail multiplicity must be positive")


@dataclass(frozen=True)
class InversionFreeWord:
    """An infinite weakly increasing word described by letter multiplicities.

    Type I: ``support`` is finite and only the last multiplicity is
    :data:`INF`.  Type II: all listed multiplicities are finite and ``tail``
    continues the support with consecutive letters.
    """

    support: tuple
    mults: tuple
    tail: Tail | None = None
    _cum: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        support = tuple(int(a) for a in self.support)
        mults = tuple(m if is_inf(m) else int(m) for m in self.mults)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "mults", mults)
        if len(support) != len(mults):
            raise ValueError("support and multiplicities differ in length")
        if any(a < 1 for a in support):
            raise ValueError("letters must be positive integers")
        if any(b <= a for a, b in zip(support, support[1:])):
            raise ValueError("support must be strictly increasing")
        if self.tail is None:
            if not support:
                raise ValueError("a finite-support word needs at least one letter")
            if not is_inf(mults[-1]):
                raise ValueError("the last letter of a finite-support word must have infinite multiplicity")
            if any(is_inf(m) or m < 1 for m in mults[:-1]):
                raise ValueError("multiplicities before the last letter must be finite and positive")
        else:
            if any(is_inf(m) or m < 1 for m in mults):
                raise ValueError("type-II multiplicities must be finite and positive")
        cum = [0]
        for m in mults:
            cum.append(cum[-1] + m)
        object.__setattr__(self, "_cum", tuple(cum))

    # -- constructors ------------------------------------------------------

    @classmethod
    def ones(cls) -> "InversionFreeWord":
        """The word ``1 2 3 ...``."""
        return cls((), (), Tail(1))

    @classmethod
    def from_lambda(cls, lam: Sequence[int]) -> "InversionFreeWord":
        """``1^lam_1 ... d^lam_d`` extended by ``(d+1)^INF``."""
        support = [a for a, m in enumerate(lam, start=1) if m > 0]
        mults = [m for m in lam if m > 0]
        d = len(lam)
        return cls(tuple(support) + (d + 1,), tuple(mults) + (INF,))

    # -- queries -----------------------------------------------------------

    @property
    def is_finite_type(self) -> bool:
        return self.tail is None

    @property
    def tail_start(self) -> int:
        return (self.support[-1] + 1) if self.support else 1

    def multiplicity(self, a: int) -> int:
        if self.tail is not None and a >= self.tail_start:
            return self.tail.multiplicity
        i = bisect.bisect_left(self.support, a)
        if i < len(self.support) and self.support[i] == a:
            return self.mults[i]
        return 0

    def mass_below(self, a: int):
        """``sum_{b < a} l_b`` (possibly :data:`INF`)."""
        if self.tail is not None and a > self.tail_start:
            return self._cum[-1] + (a - self.tail_start) * self.tail.multiplicity
        i = bisect.bisect_left(self.support, a)
        return self._cum[i]

    def letters(self, upto: int | None = None) -> Iterator[int]:
        """Support letters in increasing order (infinite for type II)."""
        for a in self.support:
            if upto is not None and a > upto:
                return
            yield a
        if self.tail is not None:
            a = self.tail_start
            while upto is None or a <= upto:
                yield a
                a += 1

    def letter_at(self, pos: int) -> int:
        """The letter at 1-based position ``pos`` of the infinite word."""
        if pos < 1:
            raise IndexError(pos)
        cum = self._cum
        i = bisect.bisect_left(cum, pos, 1)
        if i < len(cum):
            return self.support[i - 1]
        if self.tail is None:
            return self.support[-1]
        offset = pos - cum[-1] - 1
        return self.tail_start + offset // self.tail.multiplicity

    def prefix(self, n: int) -> tuple:
        return tuple(self.letter_at(p) for p in range(1, n + 1))

    # -- text encoding -----------------------------------------------------

    def __str__(self):
        body = ",".join(f"{a}:{m}" for a, m in zip(self.support, self.mults))
        if self.tail is None:
            return body
        rule = "ones" if self.tail.multiplicity == 1 else f"const:{self.tail.multiplicity}"
        return f"{body};{rule}"

    @classmethod
    def parse(cls, text: str) -> "InversionFreeWord":
        """Parse ``"1:2,2:inf"`` (type I) or ``"1:1,2:1;ones"`` / ``"...;const:3"``."""
        text = text.strip()
        body, sep, rule = text.partition(";")
        support, mults = [], []
        for item in filter(None, (s.strip() for s in body.split(","))):
            letter, colon, mult = item.partition(":")
            if not colon:
                raise ValueError(f"bad letter spec {item!r}; expected LETTER:MULT")
            support.append(int(letter))
            mults.append(INF if mult.strip().lower() in ("inf", "infinity", "oo") else int(mult))
        if not sep:
            return cls(tuple(support), tuple(mults))
        rule = rule.strip().lower()
        if rule == "ones":
            tail = Tail(1)
        elif rule.startswith("const:"):
            tail = Tail(int(rule[len("const:"):]))
        else:
            raise ValueError(f"unknown tail rule {rule!r}")
        return cls(tuple(support), tuple(mults), tail)


# ---------------------------------------------------------------------------
# orbits and MacMahon's generating function


def lambda_word(lam: Sequence[int]) -> tuple:
    """The inversion-free word ``1^lam_1 2^lam_2 ...``."""
    return tuple(a for a, m in enumerate(lam, start=1) for _ in range(m))


def orbit(word: Sequence[int]) -> Iterator[tuple]:
    """Distinct rearrangements of ``word`` in lexicographic order."""
    letters = sorted(word)
    n = len(letters)
    counts = Counter(letters)
    keys = sorted(counts)
    out = [0] * n

    def rec(pos):
        if pos == n:
            yield tuple(out)
            return
        for a in keys:
            if counts[a]:
                counts[a] -= 1
                out[pos] = a
                yield from rec(pos + 1)
                counts[a] += 1

    yield from rec(0)


def orbit_inversion_counts(lam: Sequence[int]) -> list:
    """Coefficients of ``sum_w q**inv(w)`` over the orbit of ``lambda_word(lam)``."""
    top = sum(lam[i] * lam[j] for i in range(len(lam)) for j in range(i + 1, len(lam)))
    counts = [0] * (top + 1)
    for w in orbit(lambda_word(lam)):
        counts[inversions_naive(w)] += 1
    return counts


def orbit_inversion_gf(lam: Sequence[int], q, method: str = "multinomial"):
    """``sum_w q**inv(w)`` over rearrangements of ``1^lam_1 ... d^lam_d``.

    ``method="enumerate"`` sums over the orbit directly (keep ``|lam| <= 8``);
    ``method="multinomial"`` uses the Gaussian multinomial coefficient.
    """
    lam = list(lam)
    if method == "multinomial":
        return gaussian_multinomial(lam or [0], q)
    if method == "enumerate":
        total = one_like(q) * 0
        for w in orbit(lambda_word(lam)):
            total += qpow(q, inversions_naive(w))
        return total
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# height functions


@dataclass(frozen=True)
class HeightFunction:
    """A weakly increasing map ``a -> h(a)`` with ``h(0) = 0``.

    Without a tail the domain is ``1..d`` with ``values = (h(1), ..., h(d))``
    and ``h(d) = INF``.  With a tail the domain is all of N: ``values``
    lists ``h(1), ..., h(r)`` (finite) and later increments follow the tail.
    """

    values: tuple
    tail: Tail | None = None

    def __post_init__(self):
        vals = tuple(v if is_inf(v) else int(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        prev = 0
        for v in vals:
            if not is_inf(v) and (v < 0 or (not is_inf(prev) and v < prev)):
                raise ValueError(f"height values must be weakly increasing and nonnegative: {vals}")
            if is_inf(prev) and not is_inf(v):
                raise ValueError(f"height values must be weakly increasing: {vals}")
            prev = v
        if self.tail is None:
            if not vals or not is_inf(vals[-1]):
                raise ValueError("a height function on N_d must end with INF")
        elif any(is_inf(v) for v in vals):
            raise ValueError("a height function on N with a tail rule must be finite-valued")

    @property
    def d(self) -> int | None:
        return None if self.tail is not None else len(self.values)

    def __call__(self, a: int):
        if a == 0:
            return 0
        if a <= len(self.values):
            return self.values[a - 1]
        if self.tail is None:
            raise IndexError(f"height function is defined on 1..{len(self.values)}")
        last = self.values[-1] if self.values else 0
        return last + (a - len(self.values)) * self.tail.multiplicity

    def increment(self, a: int):
        """``h(a) - h(a-1)`` with ``INF - INF`` read as 0."""
        hi, lo = self(a), self(a - 1)
        if is_inf(hi):
            return 0 if is_inf(lo) else INF
        return hi - lo

    def __str__(self):
        return ",".join(str(v) for v in self.values)

    @classmethod
    def parse(cls, text: str) -> "HeightFunction":
        vals = [INF if s.strip().lower() in ("inf", "oo") else int(s) for s in text.split(",")]
        return cls(tuple(vals))


def height_to_word(h: HeightFunction) -> InversionFreeWord:
    if h.tail is not None:
        support, mults = [], []
        for a in range(1, len(h.values) + 1):
            inc = h.increment(a)
            if inc:
                support.append(a)
                mults.append(inc)
        word = InversionFreeWord(tuple(support), tuple(mults), h.tail)
        # letters between the last listed one and the tail start are absent,
        # which a type-II word cannot express unless they are contiguous
        if word.tail_start != len(h.values) + 1:
            raise ValueError("tail must continue directly after the listed heights")
        return word
    support, mults = [], []
    for a in range(1, len(h.values) + 1):
        inc = h.increment(a)
        if inc == 0:
            continue
        support.append(a)
        mults.append(inc)
        if is_inf(inc):
            break
    return InversionFreeWord(tuple(support), tuple(mults))


def word_to_height(v: InversionFreeWord, d: int | None = None) -> HeightFunction:
    """Inverse of :func:`height_to_word`; ``d`` is required for type-I words."""
    if v.tail is not None:
        r = v.tail_start - 1
        return HeightFunction(tuple(v.mass_below(a + 1) for a in range(1, r + 1)), v.tail)
    if d is None or d < v.support[-1]:
        raise ValueError("d must be at least the largest letter of the word")
    return HeightFunction(tuple(v.mass_below(a + 1) for a in range(1, d + 1)))


# ---------------------------------------------------------------------------
# monotone maps


def monotone_pushforward(f: Callable[[int], int], w: Sequence[int]) -> tuple:
    return tuple(f(a) for a in w)


def clamp(d: int) -> Callable[[int], int]:
    return lambda a: min(a, d)


def clamp_word(v: InversionFreeWord, d: int) -> InversionFreeWord:
    """Image of ``v`` under ``a -> min(a, d)``; letters ``>= d`` merge into ``d``."""
    support, mults = [], []
    merged = 0
    for a, m in zip(v.support, v.mults):
        if a < d:
            support.append(a)
            mults.append(m)
        else:
            merged = merged + m
    if v.tail is not None or merged:
        support.append(d)
        mults.append(INF)
    return InversionFreeWord(tuple(support), tuple(mults))


def all_words(alphabet: Sequence[int], n: int) -> Iterator[tuple]:
    return itertools.product(alphabet, repeat=n)
