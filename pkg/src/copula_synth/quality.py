"""Fidelity metrics comparing a real table with a synthetic one."""

import json
import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy import special

from .copula import kendall_tau, pairwise_matrix, pearson_rho, spearman_rho
from .errors import DegenerateTableError, DomainError, SchemaError
from .marginal import ecdf_quantile, fit_ecdf

__all__ = [
    "ContingencyTable",
    "QualityReport",
    "correlation_matrix",
    "correlation_mu_diff",
    "kolmogorov_sf",
    "ks_two_sample",
    "descriptive_stats",
    "descriptive_stats_error",
    "cross_tabulate",
    "chi_squared_independence",
    "build_quality_report",
    "REPORT_FORMAT",
]

REPORT_FORMAT = "copula-synth-report/1"

CORRELATIONS = {"pearson": pearson_rho, "kendall": kendall_tau, "spearman": spearman_rho}


def _check_numeric_columns(real, syn):
    a, b = real.numeric_columns, syn.numeric_columns
    if a != b:
        raise SchemaError(f"numeric columns differ: {a} vs {b}", sorted(set(a) ^ set(b)) or a)
    return a


def correlation_matrix(table, method, columns=None):
    columns = table.numeric_columns if columns is None else columns
    return pairwise_matrix(table.numeric_matrix(columns), CORRELATIONS[method], columns)


def _mu_diff(P_real, P_syn, off_diagonal=False):
    D = np.abs(P_real - P_syn)
    if off_diagonal:
        k = D.shape[0]
        return float(D[~np.eye(k, dtype=bool)].mean())
    return float(D.mean())


def correlation_mu_diff(real, syn, method="spearman"):
    """Mean absolute elementwise difference of the two correlation matrices.

    The mean runs over all ``k * k`` entries, the (zero) diagonal included.
    """
    cols = _check_numeric_columns(real, syn)
    return _mu_diff(correlation_matrix(real, method, cols), correlation_matrix(syn, method, cols))


def kolmogorov_sf(lam):
    """Survival function of the Kolmogorov distribution, ``P(K > lam)``.

    Uses the alternating series for ``lam >= 1`` and the Jacobi theta form
    of the CDF below that; both are truncated once terms fall under 1e-10.
    """
    if lam <= 0:
        return 1.0
    if lam < 1.0:
        s = 0.0
        k = 1
        while True:
            term = math.exp(-((2 * k - 1) ** 2) * math.pi ** 2 / (8 * lam * lam))
            s += term
            if term < 1e-10 * max(s, 1e-300) or k > 100:
                break
            k += 1
        cdf = math.sqrt(2 * math.pi) / lam * s
        return min(1.0, max(0.0, 1.0 - cdf))
    s = 0.0
    k = 1
    while True:
        term = math.exp(-2 * k * k * lam * lam)
        s += term if k % 2 else -term
        if term < 1e-10 or k > 100:
            break
        k += 1
    return min(1.0, max(0.0, 2 * s))


def ks_statistic(x, y):
    x = np.sort(np.asarray(x, dtype=float))
    y = np.sort(np.asarray(y, dtype=float))
    pooled = np.concatenate([x, y])
    fx = np.searchsorted(x, pooled, side="right") / x.size
    fy = np.searchsorted(y, pooled, side="right") / y.size
    return float(np.max(np.abs(fx - fy)))


def ks_two_sample(x, y):
    """Two-sample Kolmogorov-Smirnov test.

    Returns ``(D, p)`` with ``p`` from the asymptotic Kolmogorov
    distribution at ``sqrt(nx * ny / (nx + ny)) * D``.
    """
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.size == 0 or y.size == 0:
        raise DomainError("K-S test needs two non-empty samples")
    d = ks_statistic(x, y)
    en = x.size * y.size / (x.size + y.size)
    return d, kolmogorov_sf(math.sqrt(en) * d)


def descriptive_stats(values):
    """Quartiles (generalized-inverse convention) and sample standard deviation."""
    e = fit_ecdf(values)
    v = e.sorted_values
    return {
        "q1": ecdf_quantile(e, 0.25),
        "median": ecdf_quantile(e, 0.5),
        "q3": ecdf_quantile(e, 0.75),
        "std": float(np.std(v, ddof=1)) if v.size > 1 else 0.0,
    }


def descriptive_stats_error(real, syn):
    cols = _check_numeric_columns(real, syn)
    out = {}
    for c in cols:
        a, b = descriptive_stats(real[c]), descriptive_stats(syn[c])
        out[c] = {k: abs(a[k] - b[k]) for k in a}
    return out


@dataclass(frozen=True)
class ContingencyTable:
    row_levels: list
    col_levels: list
    counts: np.ndarray

    @property
    def total(self):
        return int(self.counts.sum())


def cross_tabulate(a, b):
    """Count rows per (level of ``a``, level of ``b``); levels in order of first appearance."""
    a = [str(v) for v in a]
    b = [str(v) for v in b]
    if len(a) != len(b):
        raise DomainError(f"length mismatch: {len(a)} vs {len(b)}")
    rows = list(dict.fromkeys(a))
    cols = list(dict.fromkeys(b))
    ri = {v: i for i, v in enumerate(rows)}
    ci = {v: i for i, v in enumerate(cols)}
    counts = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for u, v in zip(a, b):
        counts[ri[u], ci[v]] += 1
    return ContingencyTable(rows, cols, counts)


def chi_squared_independence(table):
    """Pearson chi-squared test of independence.

    All-zero rows and columns are dropped first.  Returns
    ``(statistic, df, p_value)``.

    Raises
    ------
    DegenerateTableError
        If fewer than two rows or columns remain.
    """
    counts = np.asarray(table.counts if isinstance(table, ContingencyTable) else table, dtype=float)
    if counts.ndim != 2 or np.any(counts < 0):
        raise DomainError("contingency counts must be a non-negative matrix")
    counts = counts[counts.sum(axis=1) > 0][:, counts.sum(axis=0) > 0]
    r, c = counts.shape if counts.size else (0, 0)
    if r < 2 or c < 2:
        raise DegenerateTableError(
            f"chi-squared test inapplicable: reduced table is {r}x{c}")
    total = counts.sum()
    expected = np.outer(counts.sum(axis=1), counts.sum(axis=0)) / total
    mask = expected > 0
    stat = float((((counts - expected) ** 2)[mask] / expected[mask]).sum())
    df = (r - 1) * (c - 1)
    return stat, df, float(special.chdtrc(df, stat))


@dataclass
class QualityReport:
    mu_diff: dict
    mu_diff_offdiag: dict
    ks_results: dict
    stat_errors: dict
    chi_squared: dict = field(default_factory=dict)
    chi_squared_real: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "format": REPORT_FORMAT,
            "mu_diff": dict(self.mu_diff),
            "mu_diff_offdiag": dict(self.mu_diff_offdiag),
            "ks": {c: {"d": d, "p": p} for c, (d, p) in self.ks_results.items()},
            "stats": self.stat_errors,
            "chi2": self.chi_squared,
            "chi2_real": self.chi_squared_real,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=1)


def _chi2_entry(a, b):
    try:
        stat, df, p = chi_squared_independence(cross_tabulate(a, b))
    except DegenerateTableError:
        return {"stat": None, "df": None, "p": None, "degenerate": True}
    return {"stat": stat, "df": df, "p": p, "degenerate": False}


def build_quality_report(real, syn):
    """Run every applicable metric on ``real`` versus ``syn``.

    Chi-squared results are keyed ``"A|B"`` per categorical pair, for the
    synthetic table and (separately) for the real one.
    """
    if real.column_names != syn.column_names or real.schemas != syn.schemas:
        bad = sorted(set(real.column_names) ^ set(syn.column_names)) or [
            c for c in real.column_names if real.schemas.get(c) != syn.schemas.get(c)]
        raise SchemaError(f"tables have different schemas: {bad}", bad)
    cols = real.numeric_columns
    mu, mu_off = {}, {}
    if len(cols) >= 2:
        for method in CORRELATIONS:
            Pr = correlation_matrix(real, method, cols)
            Ps = correlation_matrix(syn, method, cols)
            mu[method] = _mu_diff(Pr, Ps)
            mu_off[method] = _mu_diff(Pr, Ps, off_diagonal=True)
    ks = {c: ks_two_sample(real[c], syn[c]) for c in cols}
    stats = descriptive_stats_error(real, syn)
    chi2, chi2_real = {}, {}
    for a, b in combinations(real.categorical_columns, 2):
        chi2[f"{a}|{b}"] = _chi2_entry(syn[a], syn[b])
        chi2_real[f"{a}|{b}"] = _chi2_entry(real[a], real[b])
    return QualityReport(mu, mu_off, ks, stats, chi2, chi2_real)
