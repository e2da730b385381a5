"""SMOTE as a general-purpose generator, used as a comparison baseline."""

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .categorical import decode_categorical, encode_categorical
from .errors import DomainError
from .pipeline import ColumnKind, DataTable

__all__ = ["SmoteConfig", "interpolate", "nearest_neighbors", "smote_generate", "smote_table"]

# above this many rows neighbors come from a k-d tree instead of exact brute force
BRUTE_FORCE_MAX_ROWS = 5000


@dataclass(frozen=True)
class SmoteConfig:
    k: int = 5
    n_new: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise DomainError(f"k must be >= 1, got {self.k}")
        if self.n_new < 0:
            raise DomainError(f"n_new must be >= 0, got {self.n_new}")


def nearest_neighbors(X, k, rows=None):
    """Indices of the ``k`` Euclidean nearest neighbors (self excluded) of each row.

    Ties are broken by lowest row index in the exact path.
    """
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    rows = np.arange(n) if rows is None else np.asarray(rows)
    if n > BRUTE_FORCE_MAX_ROWS:
        _, idx = cKDTree(X).query(X[rows], k=k + 1)
        out = np.empty((rows.size, k), dtype=np.int64)
        for r, (i, cand) in enumerate(zip(rows, idx)):
            cand = cand[cand != i]
            out[r] = cand[:k]
        return out
    out = np.empty((rows.size, k), dtype=np.int64)
    chunk = max(1, 4_000_000 // max(n * X.shape[1], 1))
    for start in range(0, rows.size, chunk):
        sel = rows[start:start + chunk]
        diff = X[sel][:, None, :] - X[None, :, :]
        d2 = np.einsum("ijk,ijk->ij", diff, diff)
        d2[np.arange(sel.size), sel] = np.inf
        out[start:start + sel.size] = np.argsort(d2, axis=1, kind="stable")[:, :k]
    return out


def interpolate(a, b, gamma):
    """``a + gamma * (b - a)``, written so both endpoints are reproduced exactly."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return (1.0 - gamma) * a + gamma * b


def smote_generate(table, config, rng, return_provenance=False):
    """Generate ``config.n_new`` rows as ``x_i + gamma * (x_nb - x_i)``.

    Base rows ``i`` are taken round-robin over a fresh random permutation of
    the training rows; ``x_nb`` is one of the ``k`` nearest neighbors of
    ``x_i`` chosen uniformly and ``gamma ~ U(0, 1)``.

    With ``return_provenance`` the base indices, neighbor indices and gammas
    are returned too.
    """
    X = np.asarray(table)
    if X.ndim != 2:
        raise DomainError("SMOTE expects a 2-D numeric table")
    if not np.issubdtype(X.dtype, np.number):
        raise DomainError("SMOTE requires all-numeric columns")
    X = X.astype(float)
    n = X.shape[0]
    if config.k >= n:
        raise DomainError(f"k={config.k} requires more than {config.k} training rows, got {n}")
    m = config.n_new
    gen = rng.generator
    passes = -(-m // n) if m else 0
    base = np.concatenate([gen.permutation(n) for _ in range(passes)])[:m] if m else np.empty(0, int)
    used = np.unique(base)
    nn = np.empty((n, config.k), dtype=np.int64)
    if used.size:
        nn[used] = nearest_neighbors(X, config.k, used)
    pick = gen.integers(config.k, size=m)
    gamma = gen.random(m)
    nb = nn[base, pick]
    out = interpolate(X[base], X[nb], gamma[:, None])
    if return_provenance:
        return out, base, nb, gamma
    return out


def smote_table(data, config, rng, z=1.96):
    """SMOTE over a mixed table: categorical columns are encoded, interpolated, then decoded."""
    numeric = np.empty((data.n_rows, len(data.column_names)))
    encodings = {}
    for j, name in enumerate(data.column_names):
        if data.schemas[name] is ColumnKind.CATEGORICAL:
            encodings[name], numeric[:, j] = encode_categorical(data[name], rng.spawn(1).spawn(j), z)
        else:
            numeric[:, j] = data[name]
    rows = smote_generate(numeric, config, rng.spawn(0))
    out = {}
    for j, name in enumerate(data.column_names):
        if name in encodings:
            out[name] = decode_categorical(encodings[name], rows[:, j], rng=rng.spawn(2).spawn(j))
        else:
            out[name] = rows[:, j]
    return DataTable(out, dict(data.schemas))
