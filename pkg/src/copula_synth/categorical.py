"""Categorical columns as noisy level proportions, and the nearest-proportion decoder."""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

__all__ = ["CategoricalEncoding", "fit_encoding", "encode_categorical", "decode_categorical"]

# distances equal within this count as tied
TIE_TOL = 1e-12


@dataclass(frozen=True)
class CategoricalEncoding:
    """Level proportions of a training column.

    Levels are kept in order of first appearance.
    """

    levels: tuple
    proportions: tuple
    n: int
    z: float = 1.96
    std_errors: tuple = field(init=False)

    def __post_init__(self):
        levels = tuple(str(v) for v in self.levels)
        props = tuple(float(p) for p in self.proportions)
        if len(set(levels)) != len(levels):
            raise DomainError("levels must be distinct")
        if len(levels) != len(props) or not levels:
            raise DomainError("need one proportion per level and at least one level")
        if any(p < 0 or p > 1 for p in props) or abs(sum(props) - 1.0) > 1e-12:
            raise DomainError("proportions must lie in [0, 1] and sum to 1")
        if self.n < 1:
            raise DomainError("n must be positive")
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "proportions", props)
        object.__setattr__(self, "std_errors",
                           tuple(math.sqrt(p * (1 - p) / self.n) for p in props))

    def confidence_intervals(self):
        """``(low, high)`` per level: proportion +/- z * standard error."""
        return [(p - self.z * s, p + self.z * s) for p, s in zip(self.proportions, self.std_errors)]

    def proportion_of(self, label):
        return self.proportions[self.levels.index(label)]


def fit_encoding(column, z=1.96):
    labels = [str(v) for v in column]
    if not labels:
        raise DomainError("cannot encode an empty column")
    counts = {}
    for lab in labels:
        counts[lab] = counts.get(lab, 0) + 1
    n = len(labels)
    return CategoricalEncoding(tuple(counts), tuple(c / n for c in counts.values()), n, z)


def encode_categorical(column, rng, z=1.96):
    """Replace every label by a draw from ``Normal(p, p(1-p)/n)``, ``p`` its level proportion.

    Returns ``(encoding, values)``.  Draws are independent per row.  ``z``
    only sets the reported confidence intervals; it does not scale the noise.
    """
    enc = fit_encoding(column, z)
    index = {lab: i for i, lab in enumerate(enc.levels)}
    codes = np.array([index[str(v)] for v in column])
    means = np.asarray(enc.proportions)[codes]
    sds = np.asarray(enc.std_errors)[codes]
    values = means + sds * rng.generator.standard_normal(codes.size)
    return enc, values


def nearest_levels(enc, value):
    """Indices of the levels whose proportion is nearest ``value`` (the argmin set)."""
    d = np.abs(float(value) - np.asarray(enc.proportions))
    return np.flatnonzero(d <= d.min() + TIE_TOL)


def decode_categorical(enc, values, original=None, rng=None, trace=None):
    """Map generated numeric values back to labels.

    Each value goes to the level with the nearest proportion.  When several
    levels tie, the row's original label is kept if it is one of them;
    otherwise one of the tied levels is drawn uniformly from ``rng``.

    Parameters
    ----------
    original : sequence of str, optional
        Training labels aligned row-by-row with ``values``.
    rng : RandomSource, optional
        Required only when an unresolved tie occurs.
    trace : list, optional
        If given, one dict per row describing the decision is appended.
    """
    values = np.asarray(values, dtype=float).ravel()
    if original is not None and len(original) != values.size:
        raise DomainError(f"original has {len(original)} labels for {values.size} values")
    props = np.asarray(enc.proportions)
    dist = np.abs(values[:, None] - props[None, :])
    tied = dist <= dist.min(axis=1, keepdims=True) + TIE_TOL
    out = []
    for j in range(values.size):
        members = np.flatnonzero(tied[j])
        if members.size == 1:
            choice, rule = members[0], "nearest"
        else:
            labels_in_set = [enc.levels[i] for i in members]
            orig = None if original is None else str(original[j])
            if orig is not None and orig in labels_in_set:
                choice, rule = enc.levels.index(orig), "original"
            else:
                if rng is None:
                    raise DomainError("a random tie-break is needed but no rng was given", index=j)
                choice, rule = members[rng.generator.integers(members.size)], "random"
        out.append(enc.levels[choice])
        if trace is not None:
            trace.append({
                "value": float(values[j]),
                "distances": dist[j].tolist(),
                "argmin": [enc.levels[i] for i in members],
                "rule": rule,
                "label": enc.levels[choice],
            })
    return out
