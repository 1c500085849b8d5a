"""Discrete dataset container, CSV i/o, and contingency counting.

Values are dense 0-based integer category codes. Arities are carried alongside
the rows so that a sample which happens to miss a rare state is still counted
against the full domain of the variable.
"""
from __future__ import annotations

import io
import os
from dataclasses import dataclass
from typing import IO, Iterable, Optional, Sequence, Union

import numpy as np

__all__ = [
    "DataError",
    "Dataset",
    "ContingencyTable",
    "load_dataset",
    "save_dataset",
    "count",
    "marginal_counts",
    "config_index",
]

ARITY_COMMENT = "#arities:"


class DataError(ValueError):
    """Malformed dataset, CSV text, or invalid counting request."""


@dataclass(frozen=True)
class Dataset:
    """Immutable N x n matrix of integer category codes plus per-column arities."""

    names: tuple
    arities: np.ndarray
    rows: np.ndarray

    def __post_init__(self):
        names = tuple(str(x) for x in self.names)
        object.__setattr__(self, "names", names)
        arities = np.asarray(self.arities, dtype=np.int64)
        rows = np.asarray(self.rows, dtype=np.int64)
        if rows.ndim != 2:
            raise DataError("rows must be a 2-d array")
        n_rows, n_vars = rows.shape
        if n_vars == 0:
            raise DataError("dataset needs at least one variable")
        if n_rows == 0:
            raise DataError("dataset needs at least one row")
        if len(names) != n_vars:
            raise DataError(f"{len(names)} names for {n_vars} columns")
        if len(set(names)) != len(names):
            raise DataError("duplicate variable names")
        if arities.shape != (n_vars,):
            raise DataError(f"arities shape {arities.shape} != ({n_vars},)")
        if np.any(arities < 1):
            raise DataError("every arity must be >= 1")
        if np.any(rows < 0) or np.any(rows >= arities[None, :]):
            raise DataError("value out of range for declared arity")
        rows = rows.copy()
        rows.setflags(write=False)
        arities = arities.copy()
        arities.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "arities", arities)

    @property
    def n_vars(self) -> int:
        return self.rows.shape[1]

    @property
    def n_rows(self) -> int:
        return self.rows.shape[0]

    def index_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise DataError(f"unknown variable name {name!r}") from None

    def column(self, var: int) -> np.ndarray:
        return self.rows[:, var]


@dataclass(frozen=True)
class ContingencyTable:
    """Counts of a child variable against every configuration of its parents.

    ``counts[j, k]`` is the number of rows where the parent tuple encodes to
    configuration ``j`` (mixed radix, first parent most significant) and the
    child takes value ``k``.
    """

    child: int
    parents: tuple
    parent_arities: tuple
    r_child: int
    counts: np.ndarray

    @property
    def q(self) -> int:
        return self.counts.shape[0]

    def row_totals(self) -> np.ndarray:
        return self.counts.sum(axis=1)


def config_index(values: Sequence[int], arities: Sequence[int]) -> int:
    """Mixed-radix configuration index; first position is most significant."""
    if len(values) != len(arities):
        raise DataError("values/arities length mismatch")
    j = 0
    for v, r in zip(values, arities):
        if not 0 <= v < r:
            raise DataError(f"value {v} out of range for arity {r}")
        j = j * int(r) + int(v)
    return j


def _config_count(arities: Iterable[int]) -> int:
    q = 1
    for r in arities:
        q *= int(r)
        if q > np.iinfo(np.int64).max:
            raise DataError("parent configuration count overflows int64")
    return q


def count(dataset: Dataset, child: int, parents: Sequence[int]) -> ContingencyTable:
    """Single-pass contingency counts of ``child`` given ``parents``."""
    n = dataset.n_vars
    parents = tuple(int(p) for p in parents)
    child = int(child)
    for v in (child, *parents):
        if not 0 <= v < n:
            raise DataError(f"variable index {v} out of range")
    if child in parents:
        raise DataError("child cannot appear among its parents")
    if len(set(parents)) != len(parents):
        raise DataError("duplicate parent index")

    r_child = int(dataset.arities[child])
    p_arities = tuple(int(dataset.arities[p]) for p in parents)
    q = _config_count(p_arities)
    _config_count((*p_arities, r_child))

    child_col = dataset.rows[:, child]
    if parents:
        j = np.ravel_multi_index(
            tuple(dataset.rows[:, p] for p in parents), dims=p_arities
        )
    else:
        j = np.zeros(dataset.n_rows, dtype=np.int64)
    flat = np.bincount(j * r_child + child_col, minlength=q * r_child)
    counts = flat.reshape(q, r_child).astype(np.int64)
    return ContingencyTable(
        child=child,
        parents=parents,
        parent_arities=p_arities,
        r_child=r_child,
        counts=counts,
    )


def marginal_counts(dataset: Dataset, var: int) -> np.ndarray:
    """Occurrence count of each state of one variable, length = its arity."""
    if not 0 <= var < dataset.n_vars:
        raise DataError(f"variable index {var} out of range")
    return np.bincount(dataset.rows[:, var], minlength=int(dataset.arities[var]))


def _split_csv_line(line: str) -> list:
    return [field.strip() for field in line.split(",")]


def load_dataset(
    source: Union[str, os.PathLike, IO[str]],
    *,
    allow_labels: bool = False,
) -> Dataset:
    """Load a CSV dataset: header row, integer cells, optional arity override.

    A comment line ``#arities: r1,r2,...`` before the header fixes the arity of
    each column (it must cover every observed value). Otherwise arities are
    inferred as ``max + 1`` per column. With ``allow_labels`` a column whose
    cells are not all integers is encoded in first-appearance order.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, "r", encoding="utf-8", newline="") as fh:
            text = fh.read()
    else:
        text = source.read()

    lines = [ln.rstrip("\r\n") for ln in io.StringIO(text)]
    lines = [ln for ln in lines if ln.strip() != ""]
    if not lines:
        raise DataError("empty CSV input")

    override: Optional[list] = None
    if lines[0].startswith("#"):
        comment = lines.pop(0)
        if comment.replace(" ", "").lower().startswith(ARITY_COMMENT):
            payload = comment.split(":", 1)[1]
            try:
                override = [int(tok) for tok in _split_csv_line(payload)]
            except ValueError:
                raise DataError(f"bad arity override line: {comment!r}") from None
        else:
            raise DataError(f"unrecognized comment line: {comment!r}")
    if not lines:
        raise DataError("CSV has no header line")

    names = _split_csv_line(lines.pop(0))
    n = len(names)
    if len(set(names)) != n:
        raise DataError("duplicate variable names in header")
    if any(name == "" for name in names):
        raise DataError("empty variable name in header")
    if not lines:
        raise DataError("CSV has a header but no data rows")

    cells = []
    for i, ln in enumerate(lines):
        row = _split_csv_line(ln)
        if len(row) != n:
            raise DataError(f"row {i + 1} has {len(row)} fields, expected {n}")
        cells.append(row)

    columns = []
    for c in range(n):
        raw = [row[c] for row in cells]
        try:
            col = [int(tok) for tok in raw]
        except ValueError:
            if not allow_labels:
                raise DataError(
                    f"non-integer cell in column {names[c]!r}"
                ) from None
            mapping: dict = {}
            col = []
            for tok in raw:
                if tok not in mapping:
                    mapping[tok] = len(mapping)
                col.append(mapping[tok])
        columns.append(col)

    rows = np.array(columns, dtype=np.int64).T
    if np.any(rows < 0):
        raise DataError("negative category code")
    inferred = rows.max(axis=0) + 1
    if override is not None:
        if len(override) != n:
            raise DataError(
                f"arity override lists {len(override)} values for {n} columns"
            )
        if np.any(np.asarray(override) < inferred):
            raise DataError("arity override smaller than an observed value + 1")
        arities = np.asarray(override, dtype=np.int64)
    else:
        arities = inferred
    return Dataset(names=tuple(names), arities=arities, rows=rows)


def save_dataset(
    dataset: Dataset,
    target: Union[str, os.PathLike, IO[str]],
    *,
    include_arities: bool = True,
) -> None:
    """Write a dataset as CSV (LF line endings), arity comment first by default."""
    out = io.StringIO()
    if include_arities:
        out.write(ARITY_COMMENT + " " + ",".join(str(int(r)) for r in dataset.arities))
        out.write("\n")
    out.write(",".join(dataset.names) + "\n")
    for row in dataset.rows:
        out.write(",".join(str(int(v)) for v in row) + "\n")
    text = out.getvalue()
    if isinstance(target, (str, os.PathLike)):
        with open(target, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        target.write(text)
