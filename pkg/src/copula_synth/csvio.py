"""CSV ingestion with schema inference, and byte-stable CSV output."""

import csv
import math
from dataclasses import dataclass, field

from .errors import CsvParseError, DomainError, SchemaError
from .pipeline import ColumnKind, DataTable

__all__ = ["CsvSchemaHints", "ingest_csv", "write_csv", "format_number"]


@dataclass
class CsvSchemaHints:
    numeric: list = field(default_factory=list)
    categorical: list = field(default_factory=list)
    exclude: list = field(default_factory=list)
    delimiter: str = ","
    header: bool = True


def _parse_float(s):
    try:
        v = float(s)
    except ValueError:
        return None
    return v if math.isfinite(v) else None


def ingest_csv(path, hints=None):
    """Read a CSV into a :class:`DataTable`.

    Columns whose every cell parses as a finite real are numeric, all others
    categorical, unless overridden in ``hints``.  Excluded columns are
    dropped.  Row order is preserved.
    """
    hints = CsvSchemaHints() if hints is None else hints
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh, delimiter=hints.delimiter))
    rows = [r for r in rows if r]
    if not rows:
        raise DomainError(f"{path}: empty file")
    if hints.header:
        header, body, first_line = rows[0], rows[1:], 2
    else:
        header, body, first_line = [f"col{i}" for i in range(len(rows[0]))], rows, 1
    if len(set(header)) != len(header):
        raise CsvParseError("duplicate column names in header", 1)
    for i, r in enumerate(body):
        if len(r) != len(header):
            raise CsvParseError(f"expected {len(header)} fields, got {len(r)}", first_line + i)
    if not body:
        raise DomainError(f"{path}: no data rows")

    named = set(hints.numeric) | set(hints.categorical) | set(hints.exclude)
    unknown = sorted(named - set(header))
    if unknown:
        raise SchemaError(f"schema hints name unknown columns: {unknown}", unknown)
    both = sorted(set(hints.numeric) & set(hints.categorical))
    if both:
        raise SchemaError(f"columns hinted both numeric and categorical: {both}", both)

    columns, schemas = {}, {}
    for j, name in enumerate(header):
        if name in hints.exclude:
            continue
        cells = [r[j] for r in body]
        parsed = [_parse_float(c) for c in cells]
        if name in hints.categorical:
            kind = ColumnKind.CATEGORICAL
        elif name in hints.numeric:
            bad = [i for i, v in enumerate(parsed) if v is None]
            if bad:
                raise CsvParseError(f"column {name!r} is not numeric: {cells[bad[0]]!r}",
                                    first_line + bad[0])
            kind = ColumnKind.NUMERIC
        else:
            kind = ColumnKind.NUMERIC if all(v is not None for v in parsed) else ColumnKind.CATEGORICAL
        columns[name] = parsed if kind is ColumnKind.NUMERIC else cells
        schemas[name] = kind
    if not columns:
        raise DomainError("every column was excluded")
    return DataTable(columns, schemas)


def format_number(v):
    """Shortest decimal string that round-trips to the same double."""
    v = float(v)
    if v.is_integer() and abs(v) < 1e16:
        return str(int(v)) if v != 0 or math.copysign(1, v) > 0 else "-0.0"
    return repr(v)


def write_csv(table, path_or_file):
    def emit(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(table.column_names)
        cols = []
        for c in table.column_names:
            if table.schemas[c] is ColumnKind.NUMERIC:
                cols.append([format_number(v) for v in table[c]])
            else:
                cols.append(list(table[c]))
        for row in zip(*cols):
            w.writerow(row)

    if hasattr(path_or_file, "write"):
        emit(path_or_file)
    else:
        with open(path_or_file, "w", newline="", encoding="utf-8") as fh:
            emit(fh)
