"""Gaussian and t copulas: sampling, reference copulas, rank correlation and fitting."""

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import DegenerateInputError, DimensionError, DomainError
from .numerics import (
    cholesky,
    is_correlation_matrix,
    nearest_correlation,
    sample_chi_squared,
    std_normal_cdf,
    student_t_cdf,
    thread_count,
)

__all__ = [
    "CopulaFamily",
    "CorrelationMethod",
    "ReferenceCopula",
    "CopulaSpec",
    "sample_gaussian_copula",
    "sample_t_copula",
    "sample_copula",
    "reference_copula",
    "empirical_copula",
    "kendall_tau",
    "spearman_rho",
    "pearson_rho",
    "rankdata",
    "pairwise_matrix",
    "fit_correlation_matrix",
]

# Largest double below 1 and smallest positive normal: samplers map into the open interval.
_U_LO = np.finfo(float).tiny
_U_HI = np.nextafter(1.0, 0.0)


class CopulaFamily(str, enum.Enum):
    GAUSSIAN = "gaussian"
    STUDENT_T = "t"


class CorrelationMethod(str, enum.Enum):
    KENDALL_INVERSION = "kendall"
    SPEARMAN_APPROX = "spearman"
    PEARSON = "pearson"


class ReferenceCopula(str, enum.Enum):
    COMONOTONIC = "M"
    COUNTERMONOTONIC = "W"
    INDEPENDENCE = "Pi"


@dataclass(frozen=True)
class CopulaSpec:
    """A fitted elliptical copula: family, correlation matrix and (for t) d.o.f."""

    family: CopulaFamily
    correlation: np.ndarray
    nu: float = None

    def __post_init__(self):
        object.__setattr__(self, "family", CopulaFamily(self.family))
        P = np.asarray(self.correlation, dtype=float)
        if not is_correlation_matrix(P):
            raise DomainError("copula correlation is not a valid correlation matrix")
        object.__setattr__(self, "correlation", P)
        if self.family is CopulaFamily.STUDENT_T:
            if self.nu is None or not self.nu > 2:
                raise DomainError(f"t copula requires nu > 2, got {self.nu}")
            object.__setattr__(self, "nu", float(self.nu))
        elif self.nu is not None:
            raise DomainError("nu is only meaningful for the t copula")

    @property
    def dim(self):
        return self.correlation.shape[0]


def _correlated_normals(P, n_rows, rng):
    n_rows = int(n_rows)
    if n_rows < 1:
        raise DomainError(f"n_rows must be >= 1, got {n_rows}")
    A = cholesky(P)
    Z = rng.generator.standard_normal((n_rows, A.shape[0]))
    # row-wise W = A Z
    return Z @ A.T


def sample_gaussian_copula(P, n_rows, rng):
    """Draw ``n_rows`` vectors from the Gaussian copula with correlation ``P``.

    Returns an ``(n_rows, dim)`` array with entries strictly inside (0, 1).
    """
    W = _correlated_normals(np.asarray(P, dtype=float), n_rows, rng)
    return np.clip(std_normal_cdf(W), _U_LO, _U_HI)


def sample_t_copula(P, nu, n_rows, rng):
    """Draw ``n_rows`` vectors from the t copula with correlation ``P`` and ``nu`` d.o.f.

    Each row gets its own chi-squared mixing variable.
    """
    if not (np.isfinite(nu) and nu > 2):
        raise DomainError(f"t copula requires nu > 2, got {nu}")
    W = _correlated_normals(np.asarray(P, dtype=float), n_rows, rng)
    eps = sample_chi_squared(nu, rng, size=W.shape[0])
    X = W / np.sqrt(eps / nu)[:, None]
    return np.clip(student_t_cdf(X, nu), _U_LO, _U_HI)


def sample_copula(spec, n_rows, rng):
    if spec.family is CopulaFamily.GAUSSIAN:
        return sample_gaussian_copula(spec.correlation, n_rows, rng)
    return sample_t_copula(spec.correlation, spec.nu, n_rows, rng)


def reference_copula(kind, u):
    """Evaluate the comonotonic (M), countermonotonic (W) or independence copula at ``u``."""
    kind = ReferenceCopula(kind)
    u = np.asarray(u, dtype=float)
    if u.ndim != 1 or u.size == 0:
        raise DomainError("u must be a non-empty vector")
    if np.any((u < 0) | (u > 1)) or np.any(np.isnan(u)):
        raise DomainError("copula arguments must lie in [0, 1]")
    if kind is ReferenceCopula.COMONOTONIC:
        return float(u.min())
    if kind is ReferenceCopula.INDEPENDENCE:
        return float(np.prod(u))
    if u.size != 2:
        raise DomainError("the countermonotonic copula exists only in dimension 2")
    return max(float(u[0] + u[1] - 1.0), 0.0)


def empirical_copula(sample, u):
    """Fraction of rows whose normalized ranks are all ``<= u``.

    ``sample`` is an ``(n, d)`` array; ``u`` a length-``d`` point or an
    ``(m, d)`` array of points.
    """
    sample = np.asarray(sample, dtype=float)
    n = sample.shape[0]
    # rank/n with max-rank for ties, so the margins are exact step CDFs
    pseudo = np.column_stack([
        np.searchsorted(np.sort(col), col, side="right") / n for col in sample.T
    ])
    pts = np.atleast_2d(np.asarray(u, dtype=float))
    out = np.array([np.mean(np.all(pseudo <= p, axis=1)) for p in pts])
    return float(out[0]) if np.ndim(u) == 1 else out


def _check_pair(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or y.ndim != 1:
        raise DomainError("inputs must be vectors")
    if x.size != y.size:
        raise DomainError(f"length mismatch: {x.size} vs {y.size}")
    if x.size < 2:
        raise DomainError("at least two observations are required")
    return x, y


def _tied_pairs(sorted_values):
    """Number of tied pairs in an already sorted array."""
    if sorted_values.size == 0:
        return 0
    change = np.flatnonzero(np.diff(sorted_values) != 0)
    counts = np.diff(np.concatenate(([0], change + 1, [sorted_values.size])))
    return int((counts * (counts - 1) // 2).sum())


def _count_inversions(a):
    """Pairs ``i < j`` with ``a[i] > a[j]`` for an integer array, via bottom-up merging.

    Each level merges adjacent sorted blocks of width ``w``; for every value
    in a right block, the left-block elements strictly greater than it are
    counted with a single global ``searchsorted``.
    """
    a = np.asarray(a, dtype=np.int64)
    n = a.size
    if n < 2:
        return 0
    span = int(a.max()) + 1
    idx = np.arange(n)
    cur = a.copy()
    total = 0
    w = 1
    while w < n:
        block = idx // w
        pair = block // 2
        right = (block % 2).astype(bool)
        keyed = pair * span + cur
        left_keys = keyed[~right]
        right_keys = keyed[right]
        right_pair = pair[right]
        not_greater = np.searchsorted(left_keys, right_keys, side="right")
        left_end = np.searchsorted(left_keys, (right_pair + 1) * span, side="left")
        total += int((left_end - not_greater).sum())
        cur = np.sort(keyed) - pair * span
        w *= 2
    return total


def _dense_ranks(v):
    _, inv = np.unique(v, return_inverse=True)
    return inv.astype(np.int64)


def kendall_counts(x, y):
    """Exact pair counts ``(concordant, discordant, ties_x, ties_y, ties_xy, total)``.

    ``ties_x`` and ``ties_y`` include pairs tied in both variables; ``ties_xy``
    counts those joint ties.  Runs in O(n log n).
    """
    x, y = _check_pair(x, y)
    n = x.size
    total = n * (n - 1) // 2
    order = np.lexsort((y, x))
    xs, ys = x[order], y[order]
    ties_x = _tied_pairs(xs)
    ties_y = _tied_pairs(np.sort(ys))
    # joint ties: runs equal in both coordinates after the lexsort
    same = (np.diff(xs) == 0) & (np.diff(ys) == 0)
    if same.any():
        starts = np.flatnonzero(np.concatenate(([True], ~same)))
        counts = np.diff(np.concatenate((starts, [n])))
        ties_xy = int((counts * (counts - 1) // 2).sum())
    else:
        ties_xy = 0
    discordant = _count_inversions(_dense_ranks(ys))
    concordant = total - ties_x - ties_y + ties_xy - discordant
    return concordant, discordant, ties_x, ties_y, ties_xy, total


def kendall_tau(x, y):
    """Sample Kendall tau with the tau-b tie correction.

    Without ties this is ``(concordant - discordant) / C(n, 2)``.
    """
    nc, nd, tx, ty, _, n0 = kendall_counts(x, y)
    denom = (n0 - tx) * (n0 - ty)
    if denom == 0:
        raise DegenerateInputError("Kendall tau undefined: a variable is constant")
    return (nc - nd) / math.sqrt(denom)


def rankdata(v):
    """Ranks starting at 1, ties replaced by their average rank."""
    v = np.asarray(v, dtype=float)
    order = np.argsort(v, kind="stable")
    sv = v[order]
    starts = np.flatnonzero(np.concatenate(([True], sv[1:] != sv[:-1])))
    ends = np.concatenate((starts[1:], [sv.size]))
    avg = (starts + ends + 1) / 2.0
    ranks = np.empty(v.size)
    ranks[order] = np.repeat(avg, ends - starts)
    return ranks


def pearson_rho(x, y):
    """Sample Pearson correlation coefficient."""
    x, y = _check_pair(x, y)
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = dx @ dx
    syy = dy @ dy
    if sxx == 0 or syy == 0:
        raise DegenerateInputError("Pearson correlation undefined: zero variance")
    r = (dx @ dy) / math.sqrt(sxx * syy)
    return float(min(1.0, max(-1.0, r)))


def spearman_rho(x, y):
    """Pearson correlation of the average-tie ranks."""
    x, y = _check_pair(x, y)
    return pearson_rho(rankdata(x), rankdata(y))


_ESTIMATORS = {
    CorrelationMethod.KENDALL_INVERSION: kendall_tau,
    CorrelationMethod.SPEARMAN_APPROX: spearman_rho,
    CorrelationMethod.PEARSON: pearson_rho,
}


def pairwise_matrix(data, estimator, column_names=None):
    """Symmetric matrix of ``estimator`` over every column pair of ``data``.

    Constant columns raise :class:`DegenerateInputError` naming the column.
    Pairs are evaluated on up to ``COPULA_SYNTH_THREADS`` workers; the result
    does not depend on the worker count.
    """
    data = np.asarray(data, dtype=float)
    if data.ndim != 2:
        raise DimensionError("expected a 2-D numeric table")
    n, d = data.shape
    if n < 2:
        raise DimensionError("at least two rows are required")
    if d < 2:
        raise DimensionError("at least two columns are required")
    names = list(column_names) if column_names is not None else list(range(d))
    for j in range(d):
        col = data[:, j]
        if np.all(col == col[0]):
            raise DegenerateInputError(f"column {names[j]!r} is constant", column=names[j])
    pairs = list(combinations(range(d), 2))

    def one(pair):
        i, j = pair
        return estimator(data[:, i], data[:, j])

    workers = min(thread_count(), len(pairs))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(one, pairs))
    else:
        values = [one(p) for p in pairs]
    M = np.eye(d)
    for (i, j), v in zip(pairs, values):
        M[i, j] = M[j, i] = v
    return M


def fit_correlation_matrix(table, method=CorrelationMethod.KENDALL_INVERSION, column_names=None):
    """Estimate the copula correlation matrix of a numeric table.

    ``kendall`` maps each pairwise tau through ``sin(pi * tau / 2)``;
    ``spearman`` uses rank correlation as-is; ``pearson`` the linear
    coefficient.  The pairwise matrix is then repaired to the nearest valid
    correlation matrix.
    """
    method = CorrelationMethod(method)
    M = pairwise_matrix(table, _ESTIMATORS[method], column_names)
    if method is CorrelationMethod.KENDALL_INVERSION:
        M = np.sin(np.pi * M / 2)
        np.fill_diagonal(M, 1.0)
    return nearest_correlation(M)
