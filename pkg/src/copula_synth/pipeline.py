"""Fit a copula model to a table and generate synthetic tables from it."""

import enum
import json
from dataclasses import dataclass, field

import numpy as np

from .categorical import CategoricalEncoding, decode_categorical, encode_categorical
from .copula import CopulaFamily, CopulaSpec, CorrelationMethod, fit_correlation_matrix, sample_copula
from .errors import DegenerateInputError, DimensionError, DomainError, SchemaError
from .marginal import Ecdf, fit_ecdf, inverse_transform_column
from .numerics import RandomSource, cholesky, nearest_correlation

__all__ = [
    "ColumnKind",
    "DataTable",
    "FitConfig",
    "SynthModel",
    "fit",
    "generate",
    "save_model",
    "load_model",
    "dump_model",
    "parse_model",
    "MODEL_FORMAT",
]

MODEL_FORMAT = "copula-synth/1"

# Spectrum floor applied before Cholesky; fitted matrices can be exactly singular
# (e.g. duplicated columns).
PD_FLOOR = 1e-9


class ColumnKind(str, enum.Enum):
    NUMERIC = "numeric"
    CATEGORICAL = "categorical"


class DataTable:
    """Column-major table with a numeric/categorical schema per column.

    Numeric columns are float arrays, categorical columns lists of str.
    """

    def __init__(self, columns, schemas=None):
        columns = dict(columns)
        if not columns:
            raise DimensionError("a table needs at least one column")
        if schemas is None:
            schemas = {name: _infer_kind(col) for name, col in columns.items()}
        self.column_names = list(columns)
        if set(schemas) != set(self.column_names):
            raise SchemaError("schemas must name exactly the table's columns",
                              set(schemas) ^ set(self.column_names))
        self.schemas = {name: ColumnKind(schemas[name]) for name in self.column_names}
        self.columns = {}
        for name in self.column_names:
            col = columns[name]
            if self.schemas[name] is ColumnKind.NUMERIC:
                arr = np.asarray(col, dtype=float)
                if arr.ndim != 1 or not np.all(np.isfinite(arr)):
                    raise DomainError(f"numeric column {name!r} must hold finite reals")
                self.columns[name] = arr
            else:
                labels = [str(v) for v in col]
                if any(lab == "" for lab in labels):
                    raise DomainError(f"categorical column {name!r} contains empty labels")
                self.columns[name] = labels
        lengths = {len(c) for c in self.columns.values()}
        if len(lengths) != 1 or 0 in lengths:
            raise DimensionError(f"columns must share a positive length, got {sorted(lengths)}")

    @property
    def n_rows(self):
        return len(self.columns[self.column_names[0]])

    @property
    def numeric_columns(self):
        return [c for c in self.column_names if self.schemas[c] is ColumnKind.NUMERIC]

    @property
    def categorical_columns(self):
        return [c for c in self.column_names if self.schemas[c] is ColumnKind.CATEGORICAL]

    def __getitem__(self, name):
        return self.columns[name]

    def drop(self, names):
        keep = [c for c in self.column_names if c not in set(names)]
        return DataTable({c: self.columns[c] for c in keep}, {c: self.schemas[c] for c in keep})

    def numeric_matrix(self, names=None):
        names = self.numeric_columns if names is None else names
        return np.column_stack([self.columns[c] for c in names])

    def equals(self, other):
        if self.column_names != other.column_names or self.schemas != other.schemas:
            return False
        for c in self.column_names:
            a, b = self.columns[c], other.columns[c]
            if self.schemas[c] is ColumnKind.NUMERIC:
                if not np.array_equal(a, b):
                    return False
            elif list(a) != list(b):
                return False
        return True

    def __repr__(self):
        cols = ", ".join(f"{c}:{self.schemas[c].value}" for c in self.column_names)
        return f"DataTable({self.n_rows} rows; {cols})"


def _infer_kind(col):
    try:
        arr = np.asarray(col, dtype=float)
    except (TypeError, ValueError):
        return ColumnKind.CATEGORICAL
    return ColumnKind.NUMERIC if np.all(np.isfinite(arr)) else ColumnKind.CATEGORICAL


@dataclass(frozen=True)
class FitConfig:
    family: CopulaFamily = CopulaFamily.GAUSSIAN
    nu: float = None
    correlation_method: CorrelationMethod = CorrelationMethod.KENDALL_INVERSION
    z: float = 1.96
    seed: int = 0
    excluded_columns: tuple = ()
    align_original: bool = True

    def __post_init__(self):
        object.__setattr__(self, "family", CopulaFamily(self.family))
        object.__setattr__(self, "correlation_method", CorrelationMethod(self.correlation_method))
        object.__setattr__(self, "excluded_columns", tuple(self.excluded_columns))
        if self.family is CopulaFamily.STUDENT_T:
            if self.nu is None:
                object.__setattr__(self, "nu", 4.0)
            if not self.nu > 2:
                raise DomainError(f"t copula requires nu > 2, got {self.nu}")
            if self.correlation_method is not CorrelationMethod.KENDALL_INVERSION:
                raise DomainError("the t copula is fitted by Kendall tau inversion only")
            object.__setattr__(self, "nu", float(self.nu))
        elif self.nu is not None:
            raise DomainError("nu is only meaningful for the t copula")
        if not self.z > 0:
            raise DomainError("z must be positive")

    def to_dict(self):
        return {
            "family": self.family.value,
            "nu": self.nu,
            "correlation_method": self.correlation_method.value,
            "z": self.z,
            "seed": self.seed,
            "excluded_columns": list(self.excluded_columns),
            "align_original": self.align_original,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


@dataclass(frozen=True, eq=False)
class SynthModel:
    """A fitted copula plus one marginal per column.

    Every column, numeric or encoded categorical, has an :class:`Ecdf`;
    categorical columns additionally carry their encoding and, for
    row-aligned tie-breaking, the training labels.
    """

    column_names: list
    schemas: dict
    copula: CopulaSpec
    marginals: dict
    encodings: dict
    training_n: int
    fit_config: FitConfig
    training_labels: dict = field(default_factory=dict)

    @property
    def dim(self):
        return len(self.column_names)


def fit(table, config=None):
    """Fit a :class:`SynthModel` to ``table``.

    Categorical columns are encoded (stream ``j`` of ``config.seed`` for
    column ``j``), every column gets an ECDF, and the correlation matrix is
    estimated on the fully numeric table by the configured method.
    """
    config = FitConfig() if config is None else config
    missing = [c for c in config.excluded_columns if c not in table.column_names]
    if missing:
        raise SchemaError(f"excluded columns not in table: {missing}", missing)
    if config.excluded_columns:
        if len(config.excluded_columns) == len(table.column_names):
            raise DimensionError("no columns left after exclusions")
        table = table.drop(config.excluded_columns)
    if len(table.column_names) < 2:
        raise DimensionError("at least two columns are required to fit a copula")

    numeric = np.empty((table.n_rows, len(table.column_names)))
    encodings, labels = {}, {}
    for j, name in enumerate(table.column_names):
        if table.schemas[name] is ColumnKind.CATEGORICAL:
            enc, vals = encode_categorical(table[name], RandomSource(config.seed, j), z=config.z)
            encodings[name] = enc
            labels[name] = list(table[name])
            numeric[:, j] = vals
        else:
            numeric[:, j] = table[name]
    for j, name in enumerate(table.column_names):
        col = numeric[:, j]
        if np.all(col == col[0]):
            raise DegenerateInputError(f"column {name!r} is constant", column=name)

    marginals = {name: fit_ecdf(numeric[:, j]) for j, name in enumerate(table.column_names)}
    P = fit_correlation_matrix(numeric, config.correlation_method, table.column_names)
    P = _ensure_factorizable(P)
    copula = CopulaSpec(config.family, P, config.nu)
    return SynthModel(
        column_names=list(table.column_names),
        schemas=dict(table.schemas),
        copula=copula,
        marginals=marginals,
        encodings=encodings,
        training_n=table.n_rows,
        fit_config=config,
        training_labels=labels,
    )


def _ensure_factorizable(P):
    try:
        cholesky(P)
        return P
    except DomainError:
        return nearest_correlation(P, min_eigenvalue=PD_FLOOR)


def generate(model, n_rows, rng, align_original=None):
    """Sample ``n_rows`` synthetic rows from ``model``.

    Stream 0 of ``rng`` drives the copula sampler; stream ``1.j`` breaks
    decoding ties for column ``j``.  Original-label alignment is used only
    when ``n_rows`` equals the training size (and alignment is enabled).
    """
    n_rows = int(n_rows)
    if n_rows < 1:
        raise DomainError(f"n_rows must be >= 1, got {n_rows}")
    if align_original is None:
        align_original = model.fit_config.align_original
    aligned = bool(align_original) and n_rows == model.training_n
    U = sample_copula(model.copula, n_rows, rng.spawn(0))
    decode_rng = rng.spawn(1)
    out = {}
    for j, name in enumerate(model.column_names):
        values = inverse_transform_column(model.marginals[name], U[:, j])
        if model.schemas[name] is ColumnKind.CATEGORICAL:
            original = model.training_labels.get(name) if aligned else None
            out[name] = decode_categorical(model.encodings[name], values, original, decode_rng.spawn(j))
        else:
            out[name] = values
    return DataTable(out, dict(model.schemas))


def dump_model(model):
    """Serialize ``model`` to a JSON document (floats round-trip exactly)."""
    P = model.copula.correlation
    doc = {
        "format": MODEL_FORMAT,
        "columns": [{"name": c, "kind": model.schemas[c].value} for c in model.column_names],
        "copula": {
            "family": model.copula.family.value,
            "nu": model.copula.nu,
            "correlation": {"dim": P.shape[0], "data": P.ravel().tolist()},
        },
        "marginals": {c: model.marginals[c].sorted_values.tolist() for c in model.column_names},
        "encodings": {
            c: {"levels": list(e.levels), "proportions": list(e.proportions), "n": e.n, "z": e.z}
            for c, e in model.encodings.items()
        },
        "training_labels": model.training_labels,
        "training_n": model.training_n,
        "fit_config": model.fit_config.to_dict(),
    }
    return json.dumps(doc, indent=1)


def parse_model(text):
    doc = json.loads(text)
    if doc.get("format") != MODEL_FORMAT:
        raise SchemaError(f"unsupported model format {doc.get('format')!r}")
    names = [c["name"] for c in doc["columns"]]
    schemas = {c["name"]: ColumnKind(c["kind"]) for c in doc["columns"]}
    corr = doc["copula"]["correlation"]
    P = np.asarray(corr["data"], dtype=float).reshape(corr["dim"], corr["dim"])
    return SynthModel(
        column_names=names,
        schemas=schemas,
        copula=CopulaSpec(doc["copula"]["family"], P, doc["copula"]["nu"]),
        marginals={c: Ecdf(np.asarray(v, dtype=float)) for c, v in doc["marginals"].items()},
        encodings={c: CategoricalEncoding(tuple(e["levels"]), tuple(e["proportions"]), e["n"], e["z"])
                   for c, e in doc["encodings"].items()},
        training_n=doc["training_n"],
        fit_config=FitConfig.from_dict(doc["fit_config"]),
        training_labels=doc.get("training_labels", {}),
    )


def save_model(model, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_model(model))


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())
