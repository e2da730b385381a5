import itertools
import math

import numpy as np
import pytest
from scipy import special

from copula_synth.pipeline import DataTable

# P used for the 4-column reference table: numeric x_exp, x_lognorm; categorical c3, c2
REFERENCE_P = np.array([
    [1.0, 0.7, 0.5, 0.3],
    [0.7, 1.0, 0.4, 0.2],
    [0.5, 0.4, 1.0, 0.6],
    [0.3, 0.2, 0.6, 1.0],
])
C3_PROPS = (0.2, 0.3, 0.5)
C2_PROPS = (0.35, 0.65)


def _cut(u, props, labels):
    edges = np.cumsum(props)[:-1]
    return [labels[i] for i in np.searchsorted(edges, u, side="right")]


def reference_table(n, seed):
    """Meta-Gaussian table built independently of the package samplers."""
    rng = np.random.default_rng(seed)
    L = np.linalg.cholesky(REFERENCE_P)
    U = special.ndtr(rng.standard_normal((n, 4)) @ L.T)
    return DataTable({
        "x_exp": -np.log1p(-U[:, 0]),
        "x_lognorm": np.exp(special.ndtri(U[:, 1])),
        "c3": _cut(U[:, 2], C3_PROPS, ["A", "B", "C"]),
        "c2": _cut(U[:, 3], C2_PROPS, ["X", "Y"]),
    })


def brute_kendall(x, y):
    """Tau-b by enumerating every pair."""
    n = len(x)
    nc = nd = tx = ty = 0
    for i, j in itertools.combinations(range(n), 2):
        dx = np.sign(x[i] - x[j])
        dy = np.sign(y[i] - y[j])
        if dx == 0:
            tx += 1
        if dy == 0:
            ty += 1
        if dx * dy > 0:
            nc += 1
        elif dx * dy < 0:
            nd += 1
    n0 = n * (n - 1) // 2
    return (nc - nd) / math.sqrt((n0 - tx) * (n0 - ty)), (nc, nd, tx, ty)


def brute_ks_statistic(x, y):
    grid = np.concatenate([x, y])
    return max(abs(np.mean(x <= t) - np.mean(y <= t)) for t in grid)


def exact_permutation_ks_p(x, y):
    """P(D >= D_obs) over every split of the pooled sample."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    pooled = np.concatenate([x, y])
    d_obs = brute_ks_statistic(x, y)
    hits = total = 0
    for idx in itertools.combinations(range(pooled.size), x.size):
        mask = np.zeros(pooled.size, dtype=bool)
        mask[list(idx)] = True
        total += 1
        hits += brute_ks_statistic(pooled[mask], pooled[~mask]) >= d_obs - 1e-12
    return hits / total


def random_correlation(dim, rng):
    A = rng.standard_normal((dim, dim + 2))
    S = A @ A.T
    d = np.sqrt(np.diag(S))
    C = S / np.outer(d, d)
    np.fill_diagonal(C, 1.0)
    return (C + C.T) / 2


# -- acceptance reporting ---------------------------------------------------

_CRITERIA = []


@pytest.fixture
def criterion():
    def record(label, passed, detail=""):
        """``passed=None`` marks a criterion that was skipped."""
        _CRITERIA.append((label, passed if passed is None else bool(passed), detail))
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in _CRITERIA:
        status = "SKIP" if passed is None else "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {label}  {detail}")
