"""Parsing, encoding and standardization of (ordinal label, expression) tables."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DataError,
    EmptyFile,
    EmptySelection,
    IndexOutOfRange,
    MissingHeader,
    NonNumericCell,
    UnknownLabelColumn,
    UnknownLevel,
    ZeroVarianceColumn,
)

TUMOR_STATES = ("Ta", "T1a", "T1b", ">T1")
DEFAULT_LABEL_COLUMN = "state"


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Dataset:
    """Ordinal labels (1..L) plus an ``n x p`` real matrix with named columns.

    Instances are immutable: the arrays are copied and marked read-only.
    """

    labels: np.ndarray
    level_names: tuple
    X: np.ndarray
    feature_names: tuple
    label_column: str = DEFAULT_LABEL_COLUMN

    def __post_init__(self):
        X = _frozen(self.X, float)
        labels = _frozen(self.labels, int)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "level_names", tuple(self.level_names))
        object.__setattr__(self, "feature_names", tuple(self.feature_names))

        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise DataError(f"expression matrix must be n x p with n, p >= 1, got shape {X.shape}")
        n, p = X.shape
        if labels.shape != (n,):
            raise DataError(f"expected {n} labels, got {labels.shape}")
        if len(self.feature_names) != p:
            raise DataError(f"expected {p} feature names, got {len(self.feature_names)}")
        if len(set(self.feature_names)) != p:
            raise DataError("feature names must be unique")
        L = len(self.level_names)
        if L < 1:
            raise DataError("at least one label level is required")
        if labels.min() < 1 or labels.max() > L:
            raise DataError(f"labels must lie in 1..{L}")
        if not np.all(np.isfinite(X)):
            raise DataError("expression matrix contains non-finite values")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    @property
    def n_levels(self) -> int:
        return len(self.level_names)

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.level_names == other.level_names
            and self.feature_names == other.feature_names
            and self.label_column == other.label_column
            and np.array_equal(self.labels, other.labels)
            and np.array_equal(self.X, other.X)
        )

    __hash__ = None


@dataclass(frozen=True)
class StandardizationRecord:
    means: np.ndarray
    scales: np.ndarray

    def apply(self, X):
        return (np.asarray(X, float) - self.means) / self.scales

    def invert(self, Z):
        return np.asarray(Z, float) * self.scales + self.means


def encode_states(raw: Sequence[str], level_order: Sequence[str] = TUMOR_STATES) -> np.ndarray:
    """Map label strings to ordinal codes ``1 + level_order.index(label)``."""
    lookup = {name: i + 1 for i, name in enumerate(level_order)}
    out = np.empty(len(raw), dtype=int)
    for i, value in enumerate(raw):
        try:
            out[i] = lookup[value]
        except KeyError:
            raise UnknownLevel(value) from None
    return out


def _parse_float(text, row, col):
    try:
        v = float(text)
    except ValueError:
        raise NonNumericCell(row, col, text) from None
    if not math.isfinite(v):
        raise NonNumericCell(row, col, text)
    return v


def _read_rows(csv_text):
    if not isinstance(csv_text, str):
        csv_text = csv_text.read()
    rows = [r for r in csv.reader(io.StringIO(csv_text)) if r]
    if not rows:
        raise MissingHeader("input has no header row")
    header = [h.strip() for h in rows[0]]
    if not any(header):
        raise MissingHeader("header row is blank")
    return header, rows[1:]


def parse_dataset(
    csv_text,
    label_column: str = DEFAULT_LABEL_COLUMN,
    level_order: Sequence[str] = TUMOR_STATES,
) -> Dataset:
    """Parse a CSV (text or file-like) into a :class:`Dataset`.

    Every column other than ``label_column`` is a feature, kept in file order.
    Missing cells are an error; no imputation is attempted.
    """
    header, body = _read_rows(csv_text)
    if label_column not in header:
        raise UnknownLabelColumn(label_column)
    if not body:
        raise EmptyFile("no data rows after the header")
    li = header.index(label_column)
    feat_idx = [j for j in range(len(header)) if j != li]
    if not feat_idx:
        raise DataError("no feature columns")

    raw_labels = []
    X = np.empty((len(body), len(feat_idx)))
    for i, row in enumerate(body, start=1):
        if len(row) != len(header):
            raise DataError(f"row {i} has {len(row)} cells, header has {len(header)}")
        raw_labels.append(row[li].strip())
        for jj, j in enumerate(feat_idx):
            X[i - 1, jj] = _parse_float(row[j].strip(), i, header[j])

    return Dataset(
        labels=encode_states(raw_labels, level_order),
        level_names=tuple(level_order),
        X=X,
        feature_names=tuple(header[j] for j in feat_idx),
        label_column=label_column,
    )


def parse_matrix(csv_text, id_column: str | None = "row_id"):
    """Parse a purely numeric CSV table, e.g. a PCA score file.

    Returns ``(ids, column_names, matrix)``. ``id_column`` is dropped from the
    matrix when present; ids default to ``0..n-1`` otherwise.
    """
    header, body = _read_rows(csv_text)
    if not body:
        raise EmptyFile("no data rows after the header")
    id_pos = header.index(id_column) if id_column in header else None
    cols = [j for j in range(len(header)) if j != id_pos]
    M = np.empty((len(body), len(cols)))
    ids = []
    for i, row in enumerate(body, start=1):
        if len(row) != len(header):
            raise DataError(f"row {i} has {len(row)} cells, header has {len(header)}")
        ids.append(row[id_pos].strip() if id_pos is not None else str(i - 1))
        for jj, j in enumerate(cols):
            M[i - 1, jj] = _parse_float(row[j].strip(), i, header[j])
    return ids, [header[j] for j in cols], M


def serialize_dataset(d: Dataset) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([d.label_column, *d.feature_names])
    for lab, row in zip(d.labels, d.X):
        w.writerow([d.level_names[lab - 1], *(repr(float(v)) for v in row)])
    return buf.getvalue()


def standardize(X) -> tuple[np.ndarray, StandardizationRecord]:
    """Center each column and scale it to unit sample standard deviation (ddof=1)."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise DataError("standardize needs a 2-D matrix with at least two rows")
    means = X.mean(axis=0)
    scales = X.std(axis=0, ddof=1)
    for j, (s, m) in enumerate(zip(scales, means)):
        if not s > 1e-14 * max(1.0, abs(m)):
            raise ZeroVarianceColumn(j)
    Z = (X - means) / scales
    return Z, StandardizationRecord(_frozen(means, float), _frozen(scales, float))


def log_transform(X):
    """``log(1 + x)``; expression values must exceed -1."""
    X = np.asarray(X, dtype=float)
    if np.any(X <= -1.0):
        raise DataError("log transform needs values > -1")
    return np.log1p(X)


def _check_index(idx: Iterable[int], size: int) -> np.ndarray:
    idx = np.asarray(list(idx), dtype=int)
    if idx.size == 0:
        raise EmptySelection("empty index selection")
    if idx.min() < 0 or idx.max() >= size:
        raise IndexOutOfRange(f"indices must lie in 0..{size - 1}")
    if np.unique(idx).size != idx.size:
        raise DataError("duplicate indices in selection")
    return np.sort(idx)


def select_rows(d: Dataset, idx: Iterable[int]) -> Dataset:
    idx = _check_index(idx, d.n)
    return Dataset(d.labels[idx], d.level_names, d.X[idx], d.feature_names, d.label_column)


def select_columns(d: Dataset, idx: Iterable[int]) -> Dataset:
    idx = _check_index(idx, d.p)
    names = tuple(d.feature_names[j] for j in idx)
    return Dataset(d.labels, d.level_names, d.X[:, idx], names, d.label_column)


def with_matrix(d: Dataset, X) -> Dataset:
    """Same labels and names, new expression matrix of identical shape."""
    return Dataset(d.labels, d.level_names, X, d.feature_names, d.label_column)
