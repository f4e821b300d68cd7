"""Deletion experiment: mask known values, impute them back, measure error.

Also provides the column-mean baseline, the pairwise-complete correlation
diagnostic for heavily holed tables, and per-unit modality frequencies for
overlaying a categorical variable on the map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .data import DataMatrix, fit_standardizer, standardize
from .imputation import CellFill, ImputationReport, impute, impute_multi
from .topology import GridTopology
from .trainer import Assignment, TrainingMode, TrainingSchedule, replicate_schedule, train


@dataclass(frozen=True)
class MaskingPlan:
    """Delete ``per_row_deletions`` cells from every row, seeded.

    ``global_mcar`` is an extension: the same total budget
    (``per_row_deletions * n_rows`` cells) drawn uniformly over the whole
    table instead of row by row.  Unlike the per-row protocol it may leave
    some rows entirely missing; those flow through the unresolved-cell
    machinery downstream.
    """

    per_row_deletions: int
    seed: int
    protected: frozenset[tuple[int, int]] = frozenset()
    global_mcar: bool = False

    def __post_init__(self) -> None:
        if self.per_row_deletions < 0:
            raise ValueError(f"per_row_deletions must be >= 0, got {self.per_row_deletions}")
        if self.seed < 0:
            raise ValueError(f"seed must be nonnegative, got {self.seed}")
        object.__setattr__(self, "protected", frozenset(self.protected))


@dataclass(frozen=True)
class MaskingLedger:
    """Deleted cells and their true values, in deterministic order."""

    cells: tuple[tuple[int, int], ...]
    true_values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.array(self.true_values, dtype=float)
        if vals.shape != (len(self.cells),):
            raise ValueError("true_values must align with cells")
        vals.setflags(write=False)
        object.__setattr__(self, "true_values", vals)

    def __len__(self) -> int:
        return len(self.cells)


def mask_random(data: DataMatrix, plan: MaskingPlan) -> tuple[DataMatrix, MaskingLedger]:
    """Mask exactly ``d`` cells per row, uniform without replacement, seeded.

    The input must be complete.  Protected cells are never deleted; a row
    with fewer than ``d`` deletable cells loses all of them (the shortfall
    shows up in the ledger length).  Every row keeps at least one observed
    value because ``d < p`` is enforced.

    Under ``plan.global_mcar`` the same cell budget is drawn uniformly over
    the whole table instead; rows may then end up entirely missing, and a
    draw that empties a whole column fails loudly at construction.
    """
    if data.n_missing_cells:
        raise ValueError("mask_random requires a complete input matrix")
    d = plan.per_row_deletions
    p = data.n_cols
    if d >= p:
        raise ValueError(f"per_row_deletions={d} must be < number of columns ({p})")
    rng = np.random.default_rng(plan.seed)
    new_mask = np.ones_like(data.mask)
    cells: list[tuple[int, int]] = []
    if plan.global_mcar:
        candidates = [
            (i, k)
            for i in range(data.n_rows)
            for k in range(p)
            if (i, k) not in plan.protected
        ]
        take = min(d * data.n_rows, len(candidates))
        if take:
            chosen = rng.choice(len(candidates), size=take, replace=False)
            cells = sorted(candidates[j] for j in chosen)
            for cell in cells:
                new_mask[cell] = False
    else:
        for i in range(data.n_rows):
            candidates = np.array(
                [k for k in range(p) if (i, k) not in plan.protected], dtype=int
            )
            take = min(d, candidates.size)
            if take == 0:
                continue
            chosen = np.sort(rng.choice(candidates, size=take, replace=False))
            new_mask[i, chosen] = False
            cells.extend((i, int(k)) for k in chosen)
    truths = np.array([data.values[c] for c in cells], dtype=float)
    masked = DataMatrix(
        data.values, new_mask, data.row_labels, data.col_names,
        data.categorical, data.categorical_name,
    )
    return masked, MaskingLedger(tuple(cells), truths)


def rmse_deleted(ledger: MaskingLedger, report: ImputationReport) -> float:
    """Root mean squared error over deleted cells that the report filled.

    Unresolved cells are excluded (they carry no estimate); a ledger cell
    that is neither filled nor unresolved is an error.
    """
    if len(ledger) == 0:
        raise ValueError("empty ledger: no deleted cells to score")
    unresolved = set(report.unresolved)
    sq_sum = 0.0
    n_used = 0
    for cell, truth in zip(ledger.cells, ledger.true_values):
        if cell in unresolved:
            continue
        if not report.has_fill(*cell):
            raise ValueError(f"deleted cell {cell} is neither filled nor unresolved")
        err = report.estimate_at(*cell) - truth
        sq_sum += err * err
        n_used += 1
    if n_used == 0:
        raise ValueError("every deleted cell is unresolved; RMSE undefined")
    return math.sqrt(sq_sum / n_used)


def count_unresolved_deleted(ledger: MaskingLedger, report: ImputationReport) -> int:
    unresolved = set(report.unresolved)
    return sum(1 for c in ledger.cells if c in unresolved)


def mean_impute_baseline(data: DataMatrix) -> ImputationReport:
    """Fill every missing cell with its column's observed mean.

    The baseline the codebook method is judged against; on standardized data
    every filled value is 0 by construction.
    """
    col_means = np.nanmean(data.values, axis=0)
    new_values = data.values.copy()
    new_mask = np.ones_like(data.mask)
    fills: list[CellFill] = []
    for i, k in zip(*np.nonzero(~data.mask)):
        v = float(col_means[k])
        new_values[i, k] = v
        fills.append(CellFill(int(i), int(k), v, (), (), source="column-mean"))
    filled = DataMatrix(
        new_values, new_mask, data.row_labels, data.col_names,
        data.categorical, data.categorical_name,
    )
    return ImputationReport(filled, tuple(fills), ())


@dataclass(frozen=True)
class EvalReport:
    """RMSE (standardized units) per deletion count, with the mean baseline."""

    d_values: tuple[int, ...]
    rmse_som: dict[int, float]
    rmse_mean_baseline: dict[int, float]
    n_cells: dict[int, int]
    n_unresolved: dict[int, int]
    rmse_by_repeat: dict[int, tuple[float, ...]] = field(default_factory=dict)
    baseline_by_repeat: dict[int, tuple[float, ...]] = field(default_factory=dict)


def _derive_seed(*parts: int) -> int:
    return int(np.random.SeedSequence(list(parts)).generate_state(1)[0])


def deletion_curve(
    data: DataMatrix,
    d_range,
    topology: GridTopology,
    schedule: TrainingSchedule,
    n_maps: int = 1,
    n_repeats: int = 1,
    mode: TrainingMode = TrainingMode.INCLUDE_INCOMPLETE,
    global_mcar: bool = False,
) -> EvalReport:
    """For each d: delete d values per row, standardize what remains, train,
    impute, and score against the standardized truth; the column-mean
    baseline runs on the same masks.

    ``n_repeats`` independent mask/train arms are averaged per d.  Every arm
    derives its seeds from ``(schedule.rng_seed, d, repeat)`` so the whole
    curve is bit-reproducible.
    """
    if data.n_missing_cells:
        raise ValueError("deletion_curve requires a complete input matrix")
    if n_repeats < 1:
        raise ValueError(f"n_repeats must be >= 1, got {n_repeats}")
    d_values = tuple(int(d) for d in d_range)
    rmse_som: dict[int, float] = {}
    rmse_base: dict[int, float] = {}
    n_cells: dict[int, int] = {}
    n_unres: dict[int, int] = {}
    by_rep: dict[int, tuple[float, ...]] = {}
    base_by_rep: dict[int, tuple[float, ...]] = {}
    for d in d_values:
        som_arm: list[float] = []
        base_arm: list[float] = []
        cells = 0
        unres = 0
        for rep in range(n_repeats):
            mask_seed = _derive_seed(schedule.rng_seed, d, rep, 0)
            train_seed = _derive_seed(schedule.rng_seed, d, rep, 1)
            masked, ledger = mask_random(
                data, MaskingPlan(d, mask_seed, global_mcar=global_mcar)
            )
            params = fit_standardizer(masked)
            std_masked = standardize(masked, params)
            std_truth = np.array(
                [
                    (t - params.means[k]) / params.stds[k]
                    for (_, k), t in zip(ledger.cells, ledger.true_values)
                ]
            )
            std_ledger = MaskingLedger(ledger.cells, std_truth)
            if n_maps == 1:
                fit = train(std_masked, topology, replicate_schedule(schedule, train_seed), mode)
                report = impute(fit.codebook, std_masked)
            else:
                report = impute_multi(
                    std_masked, topology, schedule, n_maps, base_seed=train_seed, mode=mode
                )
            som_arm.append(rmse_deleted(std_ledger, report))
            base_arm.append(rmse_deleted(std_ledger, mean_impute_baseline(std_masked)))
            cells += len(ledger)
            unres += count_unresolved_deleted(std_ledger, report)
        rmse_som[d] = float(np.mean(som_arm))
        rmse_base[d] = float(np.mean(base_arm))
        n_cells[d] = cells
        n_unres[d] = unres
        by_rep[d] = tuple(som_arm)
        base_by_rep[d] = tuple(base_arm)
    return EvalReport(d_values, rmse_som, rmse_base, n_cells, n_unres, by_rep, base_by_rep)


def pairwise_correlation(data: DataMatrix) -> np.ndarray:
    """Pearson correlation per column pair over jointly observed rows.

    Pairs with fewer than two joint rows, or zero variance on the joint
    rows, are marked NaN (undefined); the diagonal is exactly 1.
    """
    p = data.n_cols
    out = np.full((p, p), np.nan)
    for j in range(p):
        out[j, j] = 1.0
        for k in range(j + 1, p):
            joint = data.mask[:, j] & data.mask[:, k]
            if joint.sum() < 2:
                continue
            xj = data.values[joint, j]
            xk = data.values[joint, k]
            cj = xj - xj.mean()
            ck = xk - xk.mean()
            denom = math.sqrt(float((cj**2).sum()) * float((ck**2).sum()))
            if denom == 0.0:
                continue
            r = float((cj * ck).sum()) / denom
            out[j, k] = out[k, j] = r
    return out


def modality_proportions(assignment: Assignment, data: DataMatrix) -> dict[int, dict[str, float]]:
    """Frequency of each modality among the rows assigned to each unit.

    Rows with a missing modality are excluded from their unit's denominator;
    empty units map to an empty table, never a division error.
    """
    if data.categorical is None:
        raise ValueError("data has no categorical column")
    if assignment.n_rows != data.n_rows:
        raise ValueError(
            f"assignment covers {assignment.n_rows} rows, data has {data.n_rows}"
        )
    out: dict[int, dict[str, float]] = {u: {} for u in range(assignment.n_units)}
    counts: dict[int, dict[str, int]] = {u: {} for u in range(assignment.n_units)}
    for i in range(data.n_rows):
        u = int(assignment.units[i])
        if u < 0:
            continue
        modality = data.categorical[i]
        if modality is None or modality == "":
            continue
        counts[u][modality] = counts[u].get(modality, 0) + 1
    for u, table in counts.items():
        total = sum(table.values())
        if total:
            out[u] = {m: c / total for m, c in sorted(table.items())}
    return out
