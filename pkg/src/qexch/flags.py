"""Decreasing flags of subspaces over a finite field.

``V_n`` is ``F^n`` embedded in ``F^(n+1)`` as the vectors whose last
coordinate is zero; a flag in ``V_(n+1)`` projects to ``V_n`` by
intersecting every subspace with ``V_n``.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

from .pyramid import add_unit, edge_weight, level
from .qkernel import gaussian_multinomial, qpow

# modulus polynomials, constant term first, for the non-prime orders
_MODULI = {
    4: (2, (1, 1, 1)),      # x^2 + x + 1
    8: (2, (1, 1, 0, 1)),   # x^3 + x + 1
    9: (3, (1, 0, 1)),      # x^2 + 1
}


class FieldError(ValueError):
    pass


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % k for k in range(2, int(p**0.5) + 1))


class GaloisField:
    """The field with ``order`` elements, encoded as integers ``0..order-1``.

    Prime orders use arithmetic mod ``p``.  Orders 4, 8 and 9 use
    polynomials over ``F_p`` (base-``p`` digits of the integer, constant
    term first) reduced by a fixed irreducible polynomial.
    """

    def __init__(self, order: int):
        if _is_prime(order):
            self.p, self.degree = order, 1
            modulus = None
        elif order in _MODULI:
            self.p, modulus = _MODULI[order]
            self.degree = len(modulus) - 1
        else:
            raise FieldError(f"unsupported field order {order}; use a prime or one of 4, 8, 9")
        self.order = order
        self._add = [[self._poly_add(a, b) for b in range(order)] for a in range(order)]
        self._mul = [[self._poly_mul(a, b, modulus) for b in range(order)] for a in range(order)]
        self._neg = [next(b for b in range(order) if self._add[a][b] == 0) for a in range(order)]
        self._inv = [None] + [next(b for b in range(order) if self._mul[a][b] == 1) for a in range(1, order)]

    def _digits(self, a):
        out = []
        for _ in range(self.degree):
            out.append(a % self.p)
            a //= self.p
        return out

    def _undigits(self, ds):
        return sum(c * self.p**i for i, c in enumerate(ds))

    def _poly_add(self, a, b):
        return self._undigits([(x + y) % self.p for x, y in zip(self._digits(a), self._digits(b))])

    def _poly_mul(self, a, b, modulus):
        if modulus is None:
            return (a * b) % self.p
        x, y = self._digits(a), self._digits(b)
        prod = [0] * (2 * self.degree - 1)
        for i, c in enumerate(x):
            for j, e in enumerate(y):
                prod[i + j] = (prod[i + j] + c * e) % self.p
        # reduce with the monic modulus
        for top in range(len(prod) - 1, self.degree - 1, -1):
            c = prod[top]
            if c:
                for i, m in enumerate(modulus):
                    prod[top - self.degree + i] = (prod[top - self.degree + i] - c * m) % self.p
        return self._undigits(prod[: self.degree])

    def add(self, a, b):
        return self._add[a][b]

    def sub(self, a, b):
        return self._add[a][self._neg[b]]

    def mul(self, a, b):
        return self._mul[a][b]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return self._inv[a]

    def elements(self):
        return range(self.order)

    def check_axioms(self) -> bool:
        els = self.elements()
        for a, b, c in itertools.product(els, repeat=3):
            if self.add(self.add(a, b), c) != self.add(a, self.add(b, c)):
                return False
            if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)):
                return False
            if self.mul(a, self.add(b, c)) != self.add(self.mul(a, b), self.mul(a, c)):
                return False
        for a, b in itertools.product(els, repeat=2):
            if self.add(a, b) != self.add(b, a) or self.mul(a, b) != self.mul(b, a):
                return False
        return all(self.add(a, 0) == a and self.mul(a, 1) == a for a in els) and all(
            self.mul(a, self.inv(a)) == 1 for a in els if a
        )

    def __repr__(self):
        return f"GaloisField({self.order})"

    def __eq__(self, other):
        return isinstance(other, GaloisField) and other.order == self.order

    def __hash__(self):
        return hash(("GF", self.order))


# ---------------------------------------------------------------------------
# row reduction


def rref(rows: Sequence[Sequence[int]], F: GaloisField) -> tuple:
    """Reduced row-echelon form with zero rows dropped."""
    m = [list(r) for r in rows]
    if not m:
        return ()
    ncols = len(m[0])
    out_rows = 0
    for col in range(ncols):
        pivot = next((i for i in range(out_rows, len(m)) if m[i][col]), None)
        if pivot is None:
            continue
        m[out_rows], m[pivot] = m[pivot], m[out_rows]
        inv = F.inv(m[out_rows][col])
        m[out_rows] = [F.mul(inv, x) for x in m[out_rows]]
        for i in range(len(m)):
            if i != out_rows and m[i][col]:
                f = m[i][col]
                m[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(m[i], m[out_rows])]
        out_rows += 1
        if out_rows == len(m):
            break
    return tuple(tuple(r) for r in m[:out_rows])


@dataclass(frozen=True)
class Subspace:
    """A subspace of ``F^n`` stored as its canonical reduced echelon basis."""

    n: int
    basis: tuple

    @classmethod
    def span(cls, vectors, n: int, F: GaloisField) -> "Subspace":
        vectors = [tuple(v) for v in vectors]
        if any(len(v) != n for v in vectors):
            raise ValueError("vector length does not match the ambient dimension")
        return cls(n, rref(vectors, F))

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, ())

    @classmethod
    def whole(cls, n: int) -> "Subspace":
        return cls(n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, other: "Subspace", F: GaloisField) -> bool:
        return len(rref(self.basis + other.basis, F)) == self.dim

    def restrict(self, F: GaloisField) -> "Subspace":
        """Intersection with ``V_(n-1)``, as a subspace of ``F^(n-1)``."""
        rows = [list(r) for r in self.basis]
        pivot = next((i for i, r in enumerate(rows) if r[-1]), None)
        if pivot is not None:
            pr = rows.pop(pivot)
            inv = F.inv(pr[-1])
            rows = [[F.sub(x, F.mul(F.mul(r[-1], inv), y)) for x, y in zip(r, pr)] for r in rows]
        return Subspace.span([r[:-1] for r in rows], self.n - 1, F)


def subspaces(n: int, F: GaloisField, dim: int | None = None):
    """Every subspace of ``F^n`` (of dimension ``dim`` if given), canonically."""
    dims = range(n + 1) if dim is None else [dim]
    for k in dims:
        for pivots in itertools.combinations(range(n), k):
            free = [(i, c) for i, p in enumerate(pivots) for c in range(p + 1, n) if c not in pivots]
            for values in itertools.product(F.elements(), repeat=len(free)):
                rows = [[0] * n for _ in range(k)]
                for i, p in enumerate(pivots):
                    rows[i][p] = 1
                for (i, c), x in zip(free, values):
                    rows[i][c] = x
                yield Subspace(n, tuple(tuple(r) for r in rows))


def count_subspaces(n: int, k: int, order: int) -> int:
    """Gaussian binomial ``[n choose k]`` at ``order``."""
    return int(gaussian_multinomial([k, n - k], Fraction(order)))


# ---------------------------------------------------------------------------
# flags


class BudgetError(ValueError):
    pass


DEFAULT_BUDGET = 128


@dataclass(frozen=True)
class FlagChain:
    """``V_n = X(0) >= X(1) >= ... >= X(d) = 0`` (inclusions may be equalities)."""

    spaces: tuple

    @property
    def d(self) -> int:
        return len(self.spaces) - 1

    @property
    def n(self) -> int:
        return self.spaces[0].n

    def validate(self, F: GaloisField) -> None:
        if self.spaces[0].dim != self.n or self.spaces[-1].dim != 0:
            raise ValueError("a flag must run from the whole space to zero")
        for big, small in zip(self.spaces, self.spaces[1:]):
            if not big.contains(small, F):
                raise ValueError("flag spaces are not nested")

    def project(self, F: GaloisField) -> "FlagChain":
        return FlagChain(tuple(X.restrict(F) for X in self.spaces))


def flag_type(X: FlagChain) -> tuple:
    """``lam_i = dim X(i-1) - dim X(i)``."""
    dims = [S.dim for S in X.spaces]
    return tuple(a - b for a, b in zip(dims, dims[1:]))


def enumerate_flags(n: int, d: int, F: GaloisField, budget: int = DEFAULT_BUDGET) -> list:
    """Every decreasing ``d``-flag in ``F^n``."""
    if F.order**n > budget:
        raise BudgetError(f"{F.order}^{n} exceeds the enumeration budget {budget}")
    return list(_flags(n, d, F.order))


@lru_cache(maxsize=64)
def _flags(n, d, order):
    F = GaloisField(order)
    everything = list(subspaces(n, F))
    inside = {}

    def below(X):
        if X not in inside:
            inside[X] = [Y for Y in everything if Y.dim <= X.dim and X.contains(Y, F)]
        return inside[X]

    out = []

    def rec(chain):
        if len(chain) == d:
            out.append(FlagChain(tuple(chain) + (Subspace.zero(n),)))
            return
        for Y in below(chain[-1]):
            rec(chain + [Y])

    if d == 0:
        raise ValueError("d must be at least 1")
    rec([Subspace.whole(n)])
    return tuple(out)


def flag_counts(n: int, d: int, F: GaloisField, budget: int = DEFAULT_BUDGET) -> Counter:
    """Number of flags of each type in ``F^n``."""
    return Counter(flag_type(X) for X in enumerate_flags(n, d, F, budget))


def standard_flag(lam: Sequence[int], F: GaloisField) -> FlagChain:
    """A flag of type ``lam``: ``X(i)`` is spanned by the first ``dim X(i)`` basis vectors."""
    n = sum(lam)
    spaces = []
    for i in range(len(lam) + 1):
        k = sum(lam[i:])
        spaces.append(Subspace(n, tuple(tuple(int(r == c) for c in range(n)) for r in range(k))))
    return FlagChain(tuple(spaces))


def weight_prime_brute(lam: Sequence[int], a: int, F: GaloisField, budget: int = DEFAULT_BUDGET) -> int:
    """Flags of type ``lam + e_a`` in ``V_(n+1)`` lying over a fixed flag of type ``lam``."""
    lam = tuple(lam)
    target = add_unit(lam, a)
    base = standard_flag(lam, F)
    n = sum(lam)
    return sum(
        1
        for X in enumerate_flags(n + 1, len(lam), F, budget)
        if flag_type(X) == target and X.project(F) == base
    )


def weight_prime(lam: Sequence[int], a: int, F: GaloisField) -> int:
    """Closed form of :func:`weight_prime_brute`: ``order ** (lam_1 + ... + lam_(a-1))``.

    A lift is fixed by a vector outside ``V_n`` taken modulo scalars and
    modulo ``X_n(a-1)``, the smallest space that grows.
    """
    return F.order ** sum(lam[: a - 1])


def weights_relation_check(lam: Sequence[int], a: int, F: GaloisField, q=None) -> bool:
    """``weight'(lam, lam+e_a) == weight(lam, lam+e_a) * q**(lam_a - n)`` with ``q = 1/order``."""
    expected_q = Fraction(1, F.order)
    if q is None:
        q = expected_q
    if Fraction(q) != expected_q:
        raise FieldError(f"q = {q} is not the reciprocal of the field order {F.order}")
    q = Fraction(q)
    n = sum(lam)
    return weight_prime(lam, a, F) == edge_weight(lam, a, q) * qpow(q, lam[a - 1] - n)


# ---------------------------------------------------------------------------
# Gibbs functions on the pyramid versus invariant measures on flags


def type_twist(lam: Sequence[int]) -> int:
    """``sum_{i<j} lam_i lam_j``."""
    total = seen = 0
    for x in lam:
        total += seen * x
        seen += x
    return total


class RecursionMismatch(ValueError):
    """The input function does not satisfy its recursion; ``.witness`` names the vertex."""

    def __init__(self, msg, witness):
        super().__init__(msg)
        self.witness = witness


def _levels(f: Mapping) -> tuple:
    d = len(next(iter(f)))
    top = max(sum(lam) for lam in f)
    return d, top


def phi_recursion_witness(phi: Mapping, q):
    d, top = _levels(phi)
    for n in range(top):
        for lam in level(d, n):
            rhs = sum(edge_weight(lam, a, q) * phi[add_unit(lam, a)] for a in range(1, d + 1))
            if rhs != phi[lam]:
                return lam
    return None


def psi_recursion_witness(psi: Mapping, F: GaloisField, weights=None):
    """First vertex where ``psi(lam) != sum_a weight'(lam, a) psi(lam + e_a)``.

    ``weights(lam, a)`` defaults to the closed form :func:`weight_prime`.
    """
    weights = weights or (lambda lam, a: weight_prime(lam, a, F))
    d, top = _levels(psi)
    for n in range(top):
        for lam in level(d, n):
            rhs = sum(weights(lam, a) * psi[add_unit(lam, a)] for a in range(1, d + 1))
            if rhs != psi[lam]:
                return lam
    return None


def phi_psi_transform(f: Mapping, direction: str, F: GaloisField) -> dict:
    """Move between Gibbs functions on the pyramid and invariant flag weights.

    ``psi(lam) = q**(sum_{i<j} lam_i lam_j) * phi(lam)`` with ``q = 1/order``.
    The input must satisfy its own recursion; otherwise
    :class:`RecursionMismatch` carries the first failing vertex.
    """
    q = Fraction(1, F.order)
    if direction == "to-psi":
        bad = phi_recursion_witness(f, q)
        if bad is not None:
            raise RecursionMismatch(f"phi fails the Gibbs recursion at {bad}", bad)
        return {lam: qpow(q, type_twist(lam)) * v for lam, v in f.items()}
    if direction == "to-phi":
        bad = psi_recursion_witness(f, F)
        if bad is not None:
            raise RecursionMismatch(f"psi fails the flag recursion at {bad}", bad)
        return {lam: qpow(q, -type_twist(lam)) * v for lam, v in f.items()}
    raise ValueError(f"unknown direction {direction!r}")


def invariant_measure_check(psi: Mapping, n_max: int, F: GaloisField, budget: int = DEFAULT_BUDGET):
    """Check a flag-type function against brute-force flag geometry.

    Verifies ``psi(lam) = sum_a weight'(lam, a) psi(lam+e_a)`` with ``weight'``
    counted by projecting flags, and ``sum_lam #flags(lam) * psi(lam) = 1``
    on every level.  Returns ``(True, None)`` or ``(False, witness)``.
    """
    d = len(next(iter(psi)))
    if psi.get((0,) * d) != 1:
        return False, ("root", (0,) * d)
    if any(v < 0 for v in psi.values()):
        return False, ("negative", next(lam for lam, v in psi.items() if v < 0))
    for n in range(n_max + 1):
        counts = flag_counts(n, d, F, budget)
        if sum(c * psi[lam] for lam, c in counts.items()) != 1:
            return False, ("normalization", n)
    bad = psi_recursion_witness(
        {lam: v for lam, v in psi.items() if sum(lam) <= n_max},
        F,
        lambda lam, a: _brute_weight(tuple(lam), a, F.order, budget),
    )
    if bad is not None:
        return False, ("recursion", bad)
    return True, None


@lru_cache(maxsize=None)
def _brute_weight(lam, a, order, budget):
    return weight_prime_brute(lam, a, GaloisField(order), budget)
