"""Estimate missing cells from the winning code vector.

Each missing component of a classified row is filled with the corresponding
component of its winning unit's code vector; since training ends at radius 0,
those components sit near the class means.  Precision can be raised by
averaging the estimates from several independently trained maps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import DataMatrix
from .metric import CodeBook, masked_sq_distances
from .topology import GridTopology
from .trainer import TrainingMode, TrainingSchedule, replicate_schedule, train


@dataclass(frozen=True)
class CellFill:
    """Provenance for one originally-missing cell."""

    row: int
    col: int
    value: float
    units: tuple[int, ...]
    seeds: tuple[int, ...]
    source: str = "codebook"


@dataclass(frozen=True)
class ImputationReport:
    """Filled matrix plus per-cell provenance.

    Originally observed cells are bit-identical to the input; every
    originally missing cell is either in ``fills`` or in ``unresolved``
    (rows with no observed component have no winner and stay unresolved
    unless an explicit fallback is applied).
    """

    filled: DataMatrix
    fills: tuple[CellFill, ...]
    unresolved: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "_by_cell", {(f.row, f.col): f for f in self.fills})

    def estimate_at(self, row: int, col: int) -> float:
        fill = self._by_cell.get((row, col))
        if fill is None:
            raise KeyError(f"cell ({row}, {col}) was not filled")
        return fill.value

    def has_fill(self, row: int, col: int) -> bool:
        return (row, col) in self._by_cell


def impute(codebook: CodeBook, data: DataMatrix) -> ImputationReport:
    """Fill each missing cell with the winning unit's code component.

    The codebook must have been trained on data scaled the same way as
    ``data`` (normally: both standardized with the same parameters).
    """
    if codebook.n_features != data.n_cols:
        raise ValueError(
            f"codebook has {codebook.n_features} components, data has {data.n_cols}"
        )
    new_values = data.values.copy()
    new_mask = data.mask.copy()
    fills: list[CellFill] = []
    unresolved: list[tuple[int, int]] = []
    for i in range(data.n_rows):
        obs = data.mask[i]
        missing_idx = np.flatnonzero(~obs)
        if missing_idx.size == 0:
            continue
        if not obs.any():
            unresolved.extend((i, int(k)) for k in missing_idx)
            continue
        d = masked_sq_distances(data.values[i], obs, codebook.codes)
        w = int(np.argmin(d))
        for k in missing_idx:
            v = codebook.codes[w, k]
            new_values[i, k] = v
            new_mask[i, k] = True
            fills.append(CellFill(i, int(k), float(v), (w,), ()))
    if not fills and all(data.is_row_all_missing(i) for i in range(data.n_rows)):
        raise ValueError("every row is entirely missing; nothing can be imputed")
    filled = DataMatrix(
        new_values, new_mask, data.row_labels, data.col_names,
        data.categorical, data.categorical_name,
    )
    return ImputationReport(filled, tuple(fills), tuple(unresolved))


def impute_ensemble(
    codebooks: list[CodeBook] | tuple[CodeBook, ...],
    data: DataMatrix,
    seeds: tuple[int, ...] | None = None,
) -> ImputationReport:
    """Average the per-map estimates of several codebooks, cell by cell."""
    if not codebooks:
        raise ValueError("need at least one codebook")
    reports = [impute(cb, data) for cb in codebooks]
    first = reports[0]
    if seeds is None:
        seeds = ()
    new_values = data.values.copy()
    new_mask = data.mask.copy()
    fills: list[CellFill] = []
    for group in zip(*(r.fills for r in reports)):
        cell = (group[0].row, group[0].col)
        assert all((f.row, f.col) == cell for f in group)
        value = float(np.mean([f.value for f in group]))
        units = tuple(f.units[0] for f in group)
        new_values[cell] = value
        new_mask[cell] = True
        fills.append(CellFill(cell[0], cell[1], value, units, tuple(seeds)))
    filled = DataMatrix(
        new_values, new_mask, data.row_labels, data.col_names,
        data.categorical, data.categorical_name,
    )
    return ImputationReport(filled, tuple(fills), first.unresolved)


def impute_multi(
    data: DataMatrix,
    topology: GridTopology,
    schedule: TrainingSchedule,
    n_maps: int,
    base_seed: int,
    mode: TrainingMode = TrainingMode.INCLUDE_INCOMPLETE,
) -> ImputationReport:
    """Train ``n_maps`` maps with seeds ``base_seed .. base_seed + n_maps - 1``
    and average their estimates for each missing cell."""
    if n_maps < 1:
        raise ValueError(f"n_maps must be >= 1, got {n_maps}")
    seeds = tuple(base_seed + j for j in range(n_maps))
    codebooks = [
        train(data, topology, replicate_schedule(schedule, s), mode).codebook
        for s in seeds
    ]
    return impute_ensemble(codebooks, data, seeds)


def apply_column_mean_fallback(report: ImputationReport, data: DataMatrix) -> ImputationReport:
    """Fill the report's unresolved cells with per-column observed means.

    Deliberately a separate, explicit step: the codebook method gives those
    cells no winner, and falling back silently would hide that.
    """
    if not report.unresolved:
        return report
    col_means = np.nanmean(data.values, axis=0)
    new_values = report.filled.values.copy()
    new_mask = report.filled.mask.copy()
    extra: list[CellFill] = []
    for (i, k) in report.unresolved:
        v = float(col_means[k])
        new_values[i, k] = v
        new_mask[i, k] = True
        extra.append(CellFill(i, k, v, (), (), source="column-mean"))
    filled = DataMatrix(
        new_values, new_mask, data.row_labels, data.col_names,
        data.categorical, data.categorical_name,
    )
    return ImputationReport(filled, report.fills + tuple(extra), ())
