"""The q-Pascal pyramid: weighted lattice paths in Z_+^d.

Vertices are tuples of nonnegative integers.  An infinite-dimensional
pyramid is handled by padding vertices with zeros to a finite ``d``.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Mapping, Sequence

from .qkernel import INF, check_q, gaussian_multinomial, is_inf, one_like, q_pow_pochhammer, qpow
from .words import HeightFunction, InversionFreeWord, inversions


def edge_weight(lam: Sequence[int], a: int, q):
    """Weight ``q**(lam_{a+1} + ... + lam_d)`` of the edge ``lam -> lam + e_a``."""
    if not 1 <= a <= len(lam):
        raise ValueError(f"direction {a} outside 1..{len(lam)}")
    return qpow(q, sum(lam[a:]))


def add_unit(lam: Sequence[int], a: int) -> tuple:
    out = list(lam)
    out[a - 1] += 1
    return tuple(out)


def level(d: int, n: int):
    """Vertices of degree ``n`` in ``Z_+^d``."""
    if d == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in level(d - 1, n - first):
            yield (first,) + rest


def below(lam: Sequence[int]):
    """All ``mu`` with ``0 <= mu <= lam`` coordinatewise."""
    return itertools.product(*(range(x + 1) for x in lam))


# ---------------------------------------------------------------------------
# dimensions


def dim_vertex(lam: Sequence[int], q, method: str = "multinomial"):
    """Total weight of standard paths from the root to ``lam``."""
    lam = tuple(lam)
    if method == "multinomial":
        return gaussian_multinomial(lam, q)
    if method == "paths":
        return _path_sum(lam, q)
    raise ValueError(f"unknown method {method!r}")


@lru_cache(maxsize=65536)
def _path_sum_cached(lam: tuple, q, kind):
    if not any(lam):
        return one_like(q)
    total = one_like(q) * 0
    for a in range(1, len(lam) + 1):
        if lam[a - 1]:
            prev = list(lam)
            prev[a - 1] -= 1
            prev = tuple(prev)
            total += _path_sum_cached(prev, q, kind) * edge_weight(prev, a, q)
    return total


def _path_sum(lam, q):
    return _path_sum_cached(tuple(lam), q, type(q))


def enumerate_paths(lam: Sequence[int]):
    """Every standard path to ``lam`` as a sequence of directions."""
    lam = tuple(lam)
    from .words import lambda_word, orbit

    yield from orbit(lambda_word(lam))


def path_weight(directions: Sequence[int], d: int, q):
    lam = (0,) * d
    w = one_like(q)
    for a in directions:
        w *= edge_weight(lam, a, q)
        lam = add_unit(lam, a)
    return w


def dim_vertex_brute(lam: Sequence[int], q):
    """Sum of path weights over explicitly listed paths."""
    d = len(lam)
    return sum((path_weight(p, d, q) for p in enumerate_paths(lam)), one_like(q) * 0)


def twist_exponent(mu: Sequence[int], lam: Sequence[int]) -> int:
    """``N(mu, lam) = sum_{b<a} lam_b mu_a - sum_{b<a} mu_b mu_a``."""
    total = 0
    lam_below = mu_below = 0
    for la, ma in zip(lam, mu):
        total += (lam_below - mu_below) * ma
        lam_below += la
        mu_below += ma
    return total


def dim_pair(mu: Sequence[int], lam: Sequence[int], q):
    """Total weight of paths from ``mu`` to ``lam``; zero unless ``mu <= lam``."""
    diff = [la - ma for la, ma in zip(lam, mu)]
    if any(x < 0 for x in diff):
        return one_like(q) * 0
    return qpow(q, twist_exponent(mu, lam)) * gaussian_multinomial(diff, q)


def dim_pair_paths(mu: Sequence[int], lam: Sequence[int], q):
    """``dim(mu, lam)`` by summing weighted paths that start at ``mu``."""
    mu, lam = tuple(mu), tuple(lam)
    if any(la < ma for la, ma in zip(lam, mu)):
        return one_like(q) * 0

    @lru_cache(maxsize=None)
    def from_mu(x):
        if x == mu:
            return one_like(q)
        total = one_like(q) * 0
        for a in range(1, len(x) + 1):
            if x[a - 1] > mu[a - 1]:
                prev = list(x)
                prev[a - 1] -= 1
                prev = tuple(prev)
                total += from_mu(prev) * edge_weight(prev, a, q)
        return total

    return from_mu(lam)


# ---------------------------------------------------------------------------
# Martin kernel and its boundary values


def martin_kernel(mu: Sequence[int], lam: Sequence[int], q, method: str = "closed"):
    """``dim(mu, lam) / dim(lam)``.

    ``method="ratio"`` divides the two dimensions; ``method="closed"`` uses
    the product of ``(q**lam_a; q**-1)_{mu_a}`` factors, which vanishes on
    its own when ``mu`` is not below ``lam``.

    A float ``q`` is converted to its exact binary value and the result is
    rounded once, so errors along a convergent sequence stay monotone.
    """
    check_q(q)
    if isinstance(q, float):
        return float(martin_kernel(mu, lam, Fraction(q), method))
    if method == "ratio":
        return dim_pair(mu, lam, q) / dim_vertex(lam, q)
    if method != "closed":
        raise ValueError(f"unknown method {method!r}")
    if any(ma > la for ma, la in zip(mu, lam)):
        return one_like(q) * 0
    n, m = sum(lam), sum(mu)
    out = qpow(q, -_cross(mu))
    # (q;q)_{n-m} / (q;q)_n
    for i in range(n - m + 1, n + 1):
        out /= 1 - qpow(q, i)
    lam_below = 0
    for la, ma in zip(lam, mu):
        out *= q_pow_pochhammer(la, ma, q) * qpow(q, ma * lam_below)
        lam_below += la
    return out


def _cross(mu: Sequence[int]) -> int:
    """``sum_{b<a} mu_b mu_a``."""
    total = seen = 0
    for m in mu:
        total += seen * m
        seen += m
    return total


def boundary_limit(mu: Sequence[int], h: HeightFunction, q):
    """Limit of the Martin kernel along ``lam`` with partial sums tending to ``h``."""
    check_q(q)
    if isinstance(q, float):
        return float(boundary_limit(mu, h, Fraction(q)))
    d = len(mu)
    if h.d is not None and h.d != d:
        raise ValueError(f"height function is on 1..{h.d} but mu has {d} coordinates")
    out = qpow(q, -_cross(mu))
    for a in range(1, d + 1):
        ma = mu[a - 1]
        if not ma:
            continue
        prev = h(a - 1)
        if is_inf(prev):
            return one_like(q) * 0
        out *= q_pow_pochhammer(h.increment(a), ma, q) * qpow(q, ma * prev)
    return out


def kernel_convergence_table(mu: Sequence[int], h: HeightFunction, q, levels: Sequence[int], sequence: Callable | None = None) -> list:
    """``|martin_kernel(mu, lam_n) - boundary_limit(mu, h)|`` for each level.

    The default sequence keeps the finite heights of ``h`` and puts the
    remaining mass on the first infinite coordinate.
    """
    d = len(mu)
    if sequence is None:
        sequence = default_sequence(h, d)
    limit = boundary_limit(mu, h, q)
    rows = []
    for n in levels:
        lam = sequence(n)
        k = martin_kernel(mu, lam, q)
        rows.append({"level": n, "lambda": lam, "kernel": k, "limit": limit, "error": abs(k - limit)})
    return rows


def default_sequence(h: HeightFunction, d: int) -> Callable:
    finite = [h(a) for a in range(1, d + 1) if not is_inf(h(a))]
    r = len(finite)
    base = [finite[i] - (finite[i - 1] if i else 0) for i in range(r)]

    def seq(n):
        rest = n - sum(base)
        if rest < 0:
            raise ValueError(f"level {n} is below the finite part of h")
        return tuple(base + [rest] + [0] * (d - r - 1))

    return seq


# ---------------------------------------------------------------------------
# words and paths


def word_path_bijection(w: Sequence[int], d: int) -> list:
    """The standard path ``0 -> e_{w_1} -> e_{w_1} + e_{w_2} -> ...``."""
    lam = (0,) * d
    path = [lam]
    for a in w:
        if not 1 <= a <= d:
            raise ValueError(f"letter {a} outside 1..{d}")
        lam = add_unit(lam, a)
        path.append(lam)
    return path


def path_weight_of_word(w: Sequence[int], d: int, q):
    return path_weight(w, d, q)


# ---------------------------------------------------------------------------
# Gibbs-harmonic functions


def phi_from_word(v: InversionFreeWord, d: int, levels: int, q) -> dict:
    """``phi(lam)`` for ``P^(v)``: the probability of one path to ``lam`` over its weight.

    The inversion-free path ``1^lam_1 2^lam_2 ...`` has weight 1.
    """
    from .pvmeasure import marginal_prob
    from .words import lambda_word

    return {lam: marginal_prob(v, lambda_word(lam), q) for n in range(levels + 1) for lam in level(d, n)}


def phi_from_height(h: HeightFunction, levels: int, q) -> dict:
    """``phi(lam) = boundary_limit(lam, h)``."""
    d = h.d
    return {lam: boundary_limit(lam, h, q) for n in range(levels + 1) for lam in level(d, n)}


def gibbs_check(phi: Mapping, d: int, q, levels: int | None = None):
    """Verify the Gibbs recursion and level normalization exactly.

    Returns ``(True, None)`` or ``(False, witness)`` where the witness names
    the failing vertex or level.
    """
    if levels is None:
        levels = max(sum(lam) for lam in phi)
    root = (0,) * d
    if phi.get(root) != 1:
        return False, ("root", root)
    for n in range(levels + 1):
        total = 0
        for lam in level(d, n):
            val = phi.get(lam)
            if val is None:
                return False, ("missing", lam)
            if val < 0:
                return False, ("negative", lam)
            total += dim_vertex(lam, q) * val
            if n < levels:
                rhs = sum(edge_weight(lam, a, q) * phi[add_unit(lam, a)] for a in range(1, d + 1))
                if rhs != val:
                    return False, ("recursion", lam)
        if total != 1:
            return False, ("normalization", n)
    return True, None


def embed(lam: Sequence[int], d: int) -> tuple:
    """Pad a finitely supported vertex with zeros up to dimension ``d``."""
    lam = tuple(lam)
    if len(lam) > d:
        if any(lam[d:]):
            raise ValueError("vertex has support beyond the requested dimension")
        return lam[:d]
    return lam + (0,) * (d - len(lam))


def stable_dim(lam: Sequence[int], q, d: int | None = None):
    """``dim`` in the infinite pyramid, checked to be unchanged from ``d`` to ``d+1``."""
    d = d or len(lam)
    a = dim_vertex(embed(lam, d), q)
    b = dim_vertex(embed(lam, d + 1), q)
    if a != b:
        raise AssertionError("dimension is not stable under embedding")
    return a
