"""Probability kernels, matrix routines and the seeded random source.

Scalar kernels accept either Python floats or numpy arrays and return the
same kind of object.
"""

import math
import os

import numpy as np
from scipy import special

from .errors import DomainError, FactorizationError

__all__ = [
    "RandomSource",
    "std_normal_cdf",
    "std_normal_quantile",
    "student_t_cdf",
    "student_t_quantile",
    "cholesky",
    "nearest_correlation",
    "is_correlation_matrix",
    "sample_std_normal_vector",
    "sample_chi_squared",
    "thread_count",
]

# PSD tolerance used throughout for "smallest eigenvalue >= 0"
PSD_TOL = 1e-10


class RandomSource:
    """Seeded, splittable random stream.

    The stream is fully determined by ``(seed, stream_id)`` and the chain of
    :meth:`spawn` calls that produced it, so results do not depend on how
    work is scheduled.  Each instance owns a stateful generator and must not
    be shared between concurrent tasks.

    Parameters
    ----------
    seed : int
        Unsigned 64-bit seed.
    stream_id : int
        Unsigned 64-bit stream identifier.
    """

    def __init__(self, seed=0, stream_id=0, _path=()):
        for name, value in (("seed", seed), ("stream_id", stream_id)):
            if not 0 <= int(value) < 2**64:
                raise DomainError(f"{name} must be an unsigned 64-bit integer, got {value}")
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        self._path = tuple(int(p) for p in _path)
        seq = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,) + self._path)
        self.generator = np.random.Generator(np.random.Philox(seq))

    def spawn(self, stream_id):
        """Return an independent child stream identified by ``stream_id``."""
        return RandomSource(self.seed, self.stream_id, self._path + (int(stream_id),))

    def __repr__(self):
        tail = "".join(f".{p}" for p in self._path)
        return f"RandomSource(seed={self.seed}, stream={self.stream_id}{tail})"


def thread_count():
    """Worker cap from ``COPULA_SYNTH_THREADS`` (unset or 0 means auto)."""
    raw = os.environ.get("COPULA_SYNTH_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise DomainError(f"COPULA_SYNTH_THREADS must be an integer, got {raw!r}")
    if n < 0:
        raise DomainError("COPULA_SYNTH_THREADS must be >= 0")
    return n if n > 0 else (os.cpu_count() or 1)


def _unwrap(x, out):
    return float(out) if np.ndim(x) == 0 else out


def std_normal_cdf(x):
    """Standard normal CDF."""
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("std_normal_cdf requires finite input")
    return _unwrap(x, special.ndtr(arr))


def std_normal_quantile(u):
    """Inverse of :func:`std_normal_cdf` on the open interval (0, 1)."""
    arr = np.asarray(u, dtype=float)
    if not np.all((arr > 0) & (arr < 1)):
        raise DomainError("std_normal_quantile requires 0 < u < 1")
    return _unwrap(u, special.ndtri(arr))


def _check_nu(nu):
    if not (np.isfinite(nu) and nu > 0):
        raise DomainError(f"degrees of freedom must be positive and finite, got {nu}")


def student_t_cdf(x, nu):
    """CDF of the standard Student t distribution with ``nu`` degrees of freedom."""
    _check_nu(nu)
    arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(arr)):
        raise DomainError("student_t_cdf requires non-NaN input")
    return _unwrap(x, special.stdtr(float(nu), arr))


def student_t_quantile(u, nu):
    """Inverse of :func:`student_t_cdf`.

    The library inverse is polished with Newton steps on the CDF until the
    probability residual is below 1e-12; bisection on a bracket is the
    fallback when Newton stalls in the far tails.
    """
    _check_nu(nu)
    arr = np.asarray(u, dtype=float)
    if not np.all((arr > 0) & (arr < 1)):
        raise DomainError("student_t_quantile requires 0 < u < 1")
    nu = float(nu)
    t = np.atleast_1d(special.stdtrit(nu, arr)).astype(float)
    flat_u = np.atleast_1d(arr).astype(float)
    log_norm = special.gammaln((nu + 1) / 2) - special.gammaln(nu / 2) - 0.5 * math.log(nu * math.pi)
    for _ in range(4):
        resid = special.stdtr(nu, t) - flat_u
        if np.all(np.abs(resid) <= 1e-12 * np.maximum(flat_u, 1e-300) + 1e-15):
            break
        dens = np.exp(log_norm - (nu + 1) / 2 * np.log1p(t * t / nu))
        step = np.where(dens > 0, resid / np.where(dens > 0, dens, 1.0), 0.0)
        t = np.where(np.abs(step) < 1.0 + np.abs(t), t - step, t)
    return _unwrap(u, t.reshape(np.shape(arr)))


def cholesky(P):
    """Lower-triangular ``A`` with ``A @ A.T == P``.

    Raises
    ------
    FactorizationError
        If a pivot is not strictly positive; ``err.pivot`` is its 0-based row.
    """
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise DomainError(f"cholesky requires a square matrix, got shape {P.shape}")
    if not np.all(np.isfinite(P)):
        raise DomainError("cholesky requires finite entries")
    n = P.shape[0]
    A = np.zeros_like(P)
    for j in range(n):
        row = A[j, :j]
        d = P[j, j] - row @ row
        if not d > 0:
            raise FactorizationError(j, d)
        A[j, j] = math.sqrt(d)
        if j + 1 < n:
            A[j + 1:, j] = (P[j + 1:, j] - A[j + 1:, :j] @ row) / A[j, j]
    return A


def is_correlation_matrix(S, tol=PSD_TOL):
    """True when ``S`` satisfies every correlation-matrix invariant."""
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1] or not np.all(np.isfinite(S)):
        return False
    if np.max(np.abs(S - S.T), initial=0.0) > 1e-12:
        return False
    if not np.all(np.diag(S) == 1.0) or np.any(np.abs(S) > 1.0):
        return False
    return bool(np.linalg.eigvalsh(S).min() >= -tol)


def _rescale_unit_diagonal(X):
    d = np.sqrt(np.diag(X))
    Y = X / np.outer(d, d)
    Y = (Y + Y.T) / 2
    np.fill_diagonal(Y, 1.0)
    return np.clip(Y, -1.0, 1.0)


def nearest_correlation(S, tol=1e-8, max_iter=200, min_eigenvalue=0.0):
    """Repair a symmetric unit-diagonal matrix into a valid correlation matrix.

    Alternates eigenvalue clipping with restoring the unit diagonal (with
    Dykstra's correction, so the iterates approach the nearest correlation
    matrix in Frobenius norm) until successive iterates differ by less than
    ``tol``.  A final clip and diagonal rescaling guarantee the invariants
    exactly.

    Parameters
    ----------
    S : array_like, (k, k)
        Symmetric matrix with entries in [-1, 1] and unit diagonal.
    min_eigenvalue : float
        Floor for the spectrum of the result.  Inputs already meeting it are
        returned unchanged.

    Returns
    -------
    ndarray
        A correlation matrix whose smallest eigenvalue is at least
        ``min_eigenvalue`` (within rounding).
    """
    S = np.array(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {S.shape}")
    if np.max(np.abs(S - S.T), initial=0.0) > 1e-12:
        raise DomainError("matrix must be symmetric")
    required = min_eigenvalue if min_eigenvalue > 0 else -PSD_TOL
    if is_correlation_matrix(S) and np.linalg.eigvalsh(S).min() >= required:
        return S

    # Clipping floor kept strictly positive so the rescaled result stays PSD
    # under rounding.
    floor = max(min_eigenvalue, 1e-12)
    Y = S.copy()
    correction = np.zeros_like(S)
    for _ in range(max_iter):
        R = Y - correction
        w, V = np.linalg.eigh(R)
        X = (V * np.maximum(w, floor)) @ V.T
        correction = X - R
        Y_next = X.copy()
        np.fill_diagonal(Y_next, 1.0)
        done = np.linalg.norm(Y_next - Y, "fro") < tol
        Y = Y_next
        if done:
            break

    w, V = np.linalg.eigh((Y + Y.T) / 2)
    floor_final = floor * 1.0001 if min_eigenvalue > 0 else floor
    X = (V * np.maximum(w, floor_final)) @ V.T
    result = _rescale_unit_diagonal(X)
    if min_eigenvalue > 0:
        # rescaling can shave the floor slightly
        for _ in range(50):
            w, V = np.linalg.eigh(result)
            if w.min() >= min_eigenvalue:
                break
            X = (V * np.maximum(w, min_eigenvalue * 1.01)) @ V.T
            result = _rescale_unit_diagonal(X)
    return result


def sample_std_normal_vector(n, rng):
    """``n`` iid standard normal draws from ``rng``."""
    n = int(n)
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    return rng.generator.standard_normal(n)


def sample_chi_squared(nu, rng, size=None):
    """Chi-squared draw(s) with ``nu`` degrees of freedom; strictly positive."""
    _check_nu(nu)
    out = rng.generator.chisquare(float(nu), size=size)
    # chisquare can underflow to exactly 0 for tiny nu
    out = np.maximum(out, np.finfo(float).tiny)
    return float(out) if size is None else out
