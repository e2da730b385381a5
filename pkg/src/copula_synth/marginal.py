"""Empirical marginal CDFs and generalized-inverse sampling."""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = ["Ecdf", "fit_ecdf", "ecdf_quantile", "inverse_transform_column"]


@dataclass(frozen=True, eq=False)
class Ecdf:
    """Right-continuous empirical CDF of one column.

    Attributes
    ----------
    sorted_values : ndarray
        The sample in ascending order (duplicates kept).
    """

    sorted_values: np.ndarray

    def __post_init__(self):
        v = np.array(self.sorted_values, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "sorted_values", v)

    @property
    def n(self):
        return self.sorted_values.size

    def eval(self, x):
        """``#{v <= x} / n``."""
        out = np.searchsorted(self.sorted_values, x, side="right") / self.n
        return float(out) if np.ndim(x) == 0 else out

    def quantile(self, u):
        return ecdf_quantile(self, u)

    def __eq__(self, other):
        return isinstance(other, Ecdf) and np.array_equal(self.sorted_values, other.sorted_values)

    __hash__ = None


def fit_ecdf(values):
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0:
        raise DomainError("cannot fit an ECDF to an empty sample")
    if not np.all(np.isfinite(v)):
        raise DomainError("ECDF sample must be finite")
    return Ecdf(np.sort(v))


def _quantile_index(n, u):
    # smallest k with k/n >= u, guarding against rounding in u*n
    k = np.ceil(u * n).astype(np.int64)
    k = np.where((k > 1) & ((k - 1) / n >= u), k - 1, k)
    k = np.where(k / n < u, k + 1, k)
    return np.clip(k, 1, n) - 1


def ecdf_quantile(e, u):
    """``min{x : F(x) >= u}`` over the support, for ``0 < u <= 1``."""
    arr = np.asarray(u, dtype=float)
    bad = ~((arr > 0) & (arr <= 1))
    if np.any(bad):
        where = int(np.flatnonzero(np.atleast_1d(bad))[0])
        raise DomainError(f"ECDF quantile requires 0 < u <= 1 (index {where})", index=where)
    out = e.sorted_values[_quantile_index(e.n, arr)]
    return float(out) if np.ndim(u) == 0 else out


def inverse_transform_column(e, u):
    """Map uniforms through the generalized inverse of ``e``.

    Outputs are always values of the original sample.
    """
    u = np.asarray(u, dtype=float)
    if u.ndim != 1:
        raise DomainError("u must be a vector")
    return ecdf_quantile(e, u)
