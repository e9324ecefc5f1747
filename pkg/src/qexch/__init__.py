"""q-exchangeable random words: exact q-combinatorics, q-shuffle samplers,
Mallows measures, the q-Pascal pyramid and the finite-field flag model."""

from .qkernel import (
    INF,
    QParam,
    QRangeError,
    UnsupportedCaseError,
    gaussian_binomial,
    gaussian_multinomial,
    q_factorial,
    q_int,
    q_pochhammer,
)
from .words import HeightFunction, InversionFreeWord, cocycle, inversions
from .mallows import finite_qshuffle, mallows_distribution, sample_mallows_ranks, shuffle_distribution
from .pvmeasure import MonomialMatrix, marginal_prob, sample_prefix, theta_pmf, transition_prob
from .pyramid import boundary_limit, dim_pair, dim_vertex, martin_kernel
from .stats import make_rng, tv_distance

__version__ = "0.1.0"
