"""Data model for numeric observations with missing entries.

Missingness is carried by an explicit boolean mask (True = observed); every
statistic in this module (means, standard deviations, ranges) is taken over
observed cells only.  Masked slots of the numeric storage hold NaN as a
tripwire: the mask stays the single source of truth, and arithmetic that
bypasses it corrupts loudly instead of silently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class MaskedCellError(LookupError):
    """Read of a cell that the mask marks as missing."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class DataMatrix:
    """An n x p matrix of real values where any cell may be missing.

    Rows that are entirely missing are legal here; the consumers that
    cannot handle them (training, winner selection) reject or flag them.
    Construction fails for columns with no observed value at all.

    Instances are immutable after construction and safe to share across
    workers; the backing arrays are marked read-only.
    """

    values: np.ndarray
    mask: np.ndarray
    row_labels: tuple[str, ...]
    col_names: tuple[str, ...]
    categorical: tuple[str | None, ...] | None = None
    categorical_name: str | None = None

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        mask = np.array(self.mask, dtype=bool)
        if values.ndim != 2:
            raise ValueError(f"values must be 2-D, got shape {values.shape}")
        if mask.shape != values.shape:
            raise ValueError(
                f"mask shape {mask.shape} does not match values shape {values.shape}"
            )
        n, p = values.shape
        labels = tuple(str(s) for s in self.row_labels)
        names = tuple(str(s) for s in self.col_names)
        if len(labels) != n:
            raise ValueError(f"expected {n} row labels, got {len(labels)}")
        if len(names) != p:
            raise ValueError(f"expected {p} column names, got {len(names)}")
        if not np.all(np.isfinite(values[mask])):
            raise ValueError("observed cells must be finite numbers")
        observed_per_col = mask.sum(axis=0)
        empty = np.flatnonzero(observed_per_col == 0)
        if empty.size:
            raise ValueError(f"column {names[int(empty[0])]!r} has no observed values")
        values[~mask] = np.nan
        cat = self.categorical
        if cat is not None:
            cat = tuple(None if c is None else str(c) for c in cat)
            if len(cat) != n:
                raise ValueError(f"expected {n} categorical entries, got {len(cat)}")
        object.__setattr__(self, "values", _readonly(values))
        object.__setattr__(self, "mask", _readonly(mask))
        object.__setattr__(self, "row_labels", labels)
        object.__setattr__(self, "col_names", names)
        object.__setattr__(self, "categorical", cat)

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_cols(self) -> int:
        return self.values.shape[1]

    @property
    def n_missing_cells(self) -> int:
        return int((~self.mask).sum())

    @classmethod
    def from_nan(
        cls,
        values,
        row_labels=None,
        col_names=None,
        categorical=None,
        categorical_name=None,
    ) -> "DataMatrix":
        """Build a matrix treating NaN entries of ``values`` as missing.

        Boundary convenience for ingestion and tests; internally the mask
        remains the only authority on missingness.
        """
        values = np.asarray(values, dtype=float)
        mask = np.isfinite(values)
        n, p = values.shape
        if row_labels is None:
            row_labels = tuple(f"r{i}" for i in range(n))
        if col_names is None:
            col_names = tuple(f"v{k}" for k in range(p))
        return cls(values, mask, tuple(row_labels), tuple(col_names), categorical, categorical_name)

    def _check_row(self, row: int) -> None:
        if not 0 <= row < self.n_rows:
            raise IndexError(f"row {row} out of range for {self.n_rows} rows")

    def missing_set(self, row: int) -> frozenset[int]:
        """Column indices missing in ``row``; empty for a complete row."""
        self._check_row(row)
        return frozenset(int(k) for k in np.flatnonzero(~self.mask[row]))

    def value_at(self, row: int, col: int) -> float:
        """Checked read of one cell; raises MaskedCellError if it is missing."""
        self._check_row(row)
        if not 0 <= col < self.n_cols:
            raise IndexError(f"column {col} out of range for {self.n_cols} columns")
        if not self.mask[row, col]:
            raise MaskedCellError(
                f"cell ({row}, {col}) [{self.row_labels[row]}, {self.col_names[col]}] is missing"
            )
        return float(self.values[row, col])

    def is_row_complete(self, row: int) -> bool:
        self._check_row(row)
        return bool(self.mask[row].all())

    def is_row_all_missing(self, row: int) -> bool:
        self._check_row(row)
        return not bool(self.mask[row].any())

    def complete_row_indices(self) -> np.ndarray:
        return np.flatnonzero(self.mask.all(axis=1))

    def all_missing_row_indices(self) -> np.ndarray:
        return np.flatnonzero(~self.mask.any(axis=1))

    def observed_column(self, col: int) -> np.ndarray:
        """Observed values of one column, in row order."""
        if not 0 <= col < self.n_cols:
            raise IndexError(f"column {col} out of range for {self.n_cols} columns")
        return self.values[self.mask[:, col], col]

    def column_ranges(self) -> tuple[np.ndarray, np.ndarray]:
        """(min, max) per column over observed cells."""
        return np.nanmin(self.values, axis=0), np.nanmax(self.values, axis=0)

    def with_values(self, values: np.ndarray) -> "DataMatrix":
        """Same mask, labels and metadata, new cell values."""
        return DataMatrix(
            values,
            self.mask,
            self.row_labels,
            self.col_names,
            self.categorical,
            self.categorical_name,
        )


@dataclass(frozen=True)
class StandardizationParams:
    """Per-column centering and scaling fitted on observed cells only."""

    means: np.ndarray
    stds: np.ndarray

    def __post_init__(self) -> None:
        means = np.array(self.means, dtype=float)
        stds = np.array(self.stds, dtype=float)
        if means.ndim != 1 or stds.shape != means.shape:
            raise ValueError("means and stds must be 1-D arrays of equal length")
        if not (np.isfinite(means).all() and np.isfinite(stds).all()):
            raise ValueError("means and stds must be finite")
        if not (stds > 0).all():
            raise ValueError("every std must be strictly positive")
        object.__setattr__(self, "means", _readonly(means))
        object.__setattr__(self, "stds", _readonly(stds))

    @property
    def n_cols(self) -> int:
        return self.means.shape[0]


def fit_standardizer(data: DataMatrix) -> StandardizationParams:
    """Fit per-column mean and population (1/n) std over observed cells.

    Missing cells are ignored, never treated as zero.  Columns with fewer
    than two observed values or zero observed variance are rejected by name.
    """
    counts = data.mask.sum(axis=0)
    short = np.flatnonzero(counts < 2)
    if short.size:
        raise ValueError(
            f"column {data.col_names[int(short[0])]!r} has fewer than 2 observed values"
        )
    means = np.nanmean(data.values, axis=0)
    stds = np.nanstd(data.values, axis=0)
    flat = np.flatnonzero(stds == 0.0)
    if flat.size:
        raise ValueError(
            f"column {data.col_names[int(flat[0])]!r} has zero variance over observed values"
        )
    return StandardizationParams(means, stds)


def standardize(data: DataMatrix, params: StandardizationParams) -> DataMatrix:
    """Map observed cells to (x - mean) / std; the mask is unchanged."""
    if params.n_cols != data.n_cols:
        raise ValueError(
            f"params cover {params.n_cols} columns, data has {data.n_cols}"
        )
    return data.with_values((data.values - params.means) / params.stds)


def destandardize(data: DataMatrix, params: StandardizationParams) -> DataMatrix:
    """Inverse of :func:`standardize` on observed cells."""
    if params.n_cols != data.n_cols:
        raise ValueError(
            f"params cover {params.n_cols} columns, data has {data.n_cols}"
        )
    return data.with_values(data.values * params.stds + params.means)
