"""Small exact-identity checks behind ``qexch verify``.

Each check is sized to finish in well under a second; the full-size versions
live in the acceptance tests.
"""

from __future__ import annotations

from fractions import Fraction

from . import flags, mallows, pvmeasure, pyramid
from .qkernel import gaussian_multinomial
from .words import InversionFreeWord, lambda_word, orbit_inversion_gf

HALF = Fraction(1, 2)


def _macmahon():
    for lam in [(2, 1), (1, 2, 1), (3, 0, 2)]:
        if orbit_inversion_gf(lam, HALF, "enumerate") != gaussian_multinomial(lam, HALF):
            return False, f"lambda={lam}"
    return True, "orbit sums match Gaussian multinomials"


def _mallows_total():
    total = sum(mallows.mallows_distribution(5, HALF).values())
    return total == 1, f"sum={total}"


def _shuffle_is_mallows():
    ok = mallows.shuffle_distribution(mallows.identity(4), HALF) == mallows.mallows_distribution(4, HALF)
    return ok, "shuffle of 1234 vs Q_4"


def _finite_exchangeable():
    ok, witness = mallows.verify_finite_qexchangeable(mallows.shuffle_distribution((1, 1, 2, 3), HALF), HALF)
    if not ok:
        return False, f"witness={witness}"
    bad, witness = mallows.verify_finite_qexchangeable(mallows.shuffle_distribution((3, 2, 1, 1), HALF), HALF)
    return (not bad and witness is not None), "1123 passes, 3211 fails"


def _marginal_vs_transitions():
    v = InversionFreeWord.parse("1:1,2:2,3:inf")
    law = pvmeasure.marginal_law(v, 3, HALF)
    for u, p in law.items():
        if p != pvmeasure.transition_product(v, u, HALF):
            return False, f"u={u}"
    return sum(law.values()) == 1, "closed form equals transition product"


def _theta_total():
    total = sum(pvmeasure.theta_law(3, HALF).values())
    return total == 1, f"sum={total}"


def _pyramid():
    for lam in [(2, 2), (1, 2, 1)]:
        if pyramid.dim_vertex(lam, HALF, "paths") != pyramid.dim_vertex(lam, HALF):
            return False, f"dim lambda={lam}"
        for mu in [(1, 0, 0)[: len(lam)], (1, 1, 0)[: len(lam)]]:
            if pyramid.martin_kernel(mu, lam, HALF) != pyramid.martin_kernel(mu, lam, HALF, "ratio"):
                return False, f"kernel mu={mu} lambda={lam}"
    return True, "path sums and kernel closed form"


def _gibbs():
    v = InversionFreeWord.parse("1:1,2:inf")
    ok, witness = pyramid.gibbs_check(pyramid.phi_from_word(v, 2, 4, HALF), 2, HALF)
    return ok, f"witness={witness}"


def _flag_counts():
    F = flags.GaloisField(2)
    for n in range(4):
        counts = flags.flag_counts(n, 2, F)
        for lam in pyramid.level(2, n):
            if counts.get(lam, 0) != gaussian_multinomial(lam, Fraction(2)):
                return False, f"type={lam}"
    return True, "flag counts over GF(2)"


CHECKS = [
    ("macmahon", _macmahon),
    ("mallows-normalized", _mallows_total),
    ("shuffle-equals-mallows", _shuffle_is_mallows),
    ("finite-q-exchangeable", _finite_exchangeable),
    ("marginal-vs-transitions", _marginal_vs_transitions),
    ("theta-normalized", _theta_total),
    ("pyramid-oracles", _pyramid),
    ("gibbs-recursion", _gibbs),
    ("flag-counts", _flag_counts),
]


def run_identity_suite() -> list:
    """Return ``[(name, passed, detail), ...]``."""
    out = []
    for name, fn in CHECKS:
        ok, detail = fn()
        out.append((name, bool(ok), detail))
    return out
