"""Distances between finite laws, empirical pmfs and random streams."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Mapping

import numpy as np

# PCG64 via SeedSequence: named, versioned by numpy, and splittable
RNG_NAME = "numpy.PCG64"


def make_rng(seed: int | None = None, stream: int = 0) -> np.random.Generator:
    """Generator for stream ``stream`` of the root ``seed``."""
    ss = np.random.SeedSequence(seed)
    if stream:
        ss = ss.spawn(stream + 1)[stream]
    return np.random.Generator(np.random.PCG64(ss))


def spawn(seed: int | None, count: int) -> list:
    return [np.random.Generator(np.random.PCG64(s)) for s in np.random.SeedSequence(seed).spawn(count)]


class SupportMismatch(ValueError):
    pass


def tv_distance(p: Mapping, r: Mapping, strict: bool = False):
    """Total variation ``(1/2) sum |p - r|`` over the union of supports.

    Exact inputs give an exact result.  With ``strict=True`` the supports
    must coincide.
    """
    if strict and set(p) != set(r):
        raise SupportMismatch("pmfs are defined on different supports")
    keys = set(p) | set(r)
    total = sum(abs(p.get(k, 0) - r.get(k, 0)) for k in keys)
    return total / 2


def check_pmf(p: Mapping, tol: float = 1e-12) -> None:
    total = sum(p.values())
    if isinstance(total, Fraction) or isinstance(total, int):
        if total != 1:
            raise ValueError(f"pmf sums to {total}, not 1")
    elif abs(total - 1) > tol:
        raise ValueError(f"pmf sums to {total}, not 1")
    if any(v < 0 for v in p.values()):
        raise ValueError("pmf has negative mass")


def empirical(samples: Iterable[Hashable]) -> dict:
    counts = Counter(samples)
    n = sum(counts.values())
    return {k: c / n for k, c in counts.items()}


@dataclass
class DistanceReport:
    tv: float
    chi2: float
    dof: int
    samples: int
    law: str = ""

    def as_dict(self):
        return {"law": self.law, "samples": self.samples, "tv": self.tv, "chi2": self.chi2, "dof": self.dof}


def compare_to_exact(samples: Iterable[Hashable], exact: Mapping, law: str = "") -> DistanceReport:
    """TV and Pearson chi-square of a sample against an exact pmf.

    Cells outside the exact support are counted in TV; chi-square uses the
    cells with positive exact mass.
    """
    counts = Counter(samples)
    n = sum(counts.values())
    emp = {k: c / n for k, c in counts.items()}
    tv = float(tv_distance(emp, {k: float(v) for k, v in exact.items()}))
    chi2 = 0.0
    cells = 0
    for k, p in exact.items():
        p = float(p)
        if p > 0:
            expected = n * p
            chi2 += (counts.get(k, 0) - expected) ** 2 / expected
            cells += 1
    return DistanceReport(tv=tv, chi2=chi2, dof=max(cells - 1, 0), samples=n, law=law)
