"""CSV ingestion, model persistence, report export, manifests.

All numeric output uses 17 significant digits, which round-trips float64
exactly; every writer is deterministic byte for byte so runs can be replayed
and compared.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .data import DataMatrix, StandardizationParams
from .evaluation import EvalReport
from .imputation import ImputationReport
from .metric import CodeBook
from .superclass import SuperClassing
from .topology import GridTopology
from .trainer import UNCLASSIFIABLE, Assignment, TrainingMode, TrainingSchedule

DEFAULT_MISSING_MARKERS = ("", "NA")


def fmt17(x: float) -> str:
    return format(float(x), ".17g")


def read_csv(
    path,
    missing_markers=DEFAULT_MISSING_MARKERS,
    label_col: str | None = None,
    categorical_col: str | None = None,
) -> DataMatrix:
    """Load a rectangular CSV with a header row into a DataMatrix.

    The label column defaults to the first one; cells equal to a missing
    marker (after stripping surrounding whitespace) are masked, everything
    else must parse as a finite decimal.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2:
        raise ValueError(f"{path}: need a header row and at least one data row")
    header = [h.strip() for h in rows[0]]
    if label_col is None:
        label_idx = 0
    else:
        if label_col not in header:
            raise ValueError(f"{path}: label column {label_col!r} not in header")
        label_idx = header.index(label_col)
    cat_idx = None
    if categorical_col is not None:
        if categorical_col not in header:
            raise ValueError(f"{path}: categorical column {categorical_col!r} not in header")
        cat_idx = header.index(categorical_col)
        if cat_idx == label_idx:
            raise ValueError(f"{path}: categorical column cannot be the label column")
    numeric_idx = [j for j in range(len(header)) if j != label_idx and j != cat_idx]
    if not numeric_idx:
        raise ValueError(f"{path}: no numeric columns")
    markers = set(missing_markers)

    labels: list[str] = []
    cats: list[str | None] = []
    values = np.empty((len(rows) - 1, len(numeric_idx)))
    mask = np.ones_like(values, dtype=bool)
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ValueError(
                f"{path}: line {r} has {len(row)} fields, header has {len(header)}"
            )
        labels.append(row[label_idx].strip())
        if cat_idx is not None:
            c = row[cat_idx].strip()
            cats.append(None if c in markers else c)
        for out_k, j in enumerate(numeric_idx):
            cell = row[j].strip()
            if cell in markers:
                mask[r - 2, out_k] = False
                values[r - 2, out_k] = np.nan
                continue
            try:
                v = float(cell)
            except ValueError:
                raise ValueError(
                    f"{path}: line {r}, column {header[j]!r}: cannot parse {cell!r}"
                ) from None
            if not np.isfinite(v):
                raise ValueError(
                    f"{path}: line {r}, column {header[j]!r}: value {cell!r} is not finite"
                )
            values[r - 2, out_k] = v
    return DataMatrix(
        values,
        mask,
        tuple(labels),
        tuple(header[j] for j in numeric_idx),
        tuple(cats) if cat_idx is not None else None,
        categorical_col,
    )


def write_csv(data: DataMatrix, path, missing_marker: str = "") -> None:
    """Write a DataMatrix back out; masked cells become ``missing_marker``."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        header = ["label"]
        if data.categorical is not None:
            header.append(data.categorical_name or "category")
        header.extend(data.col_names)
        w.writerow(header)
        for i in range(data.n_rows):
            row = [data.row_labels[i]]
            if data.categorical is not None:
                c = data.categorical[i]
                row.append("" if c is None else c)
            for k in range(data.n_cols):
                row.append(fmt17(data.values[i, k]) if data.mask[i, k] else missing_marker)
            w.writerow(row)


@dataclass(frozen=True)
class SomModel:
    """The persisted training artifact: codes plus everything needed to
    classify or impute new data in the same space."""

    codebook: CodeBook
    standardizer: StandardizationParams
    schedule: TrainingSchedule
    mode: TrainingMode


def save_model(model: SomModel, path) -> None:
    """Flat text format: one header line (rows, cols, p, column names), one
    line of 17-significant-digit components per unit, then keyed provenance
    lines (standardization, schedule, mode)."""
    cb = model.codebook
    topo = cb.topology
    for name in cb.col_names:
        if "\t" in name or "\n" in name:
            raise ValueError(f"column name {name!r} contains a tab or newline")
    lines = ["\t".join([str(topo.rows), str(topo.cols), str(cb.n_features), *cb.col_names])]
    for u in range(cb.n_units):
        lines.append("\t".join(fmt17(v) for v in cb.codes[u]))
    lines.append("mean\t" + "\t".join(fmt17(v) for v in model.standardizer.means))
    lines.append("std\t" + "\t".join(fmt17(v) for v in model.standardizer.stds))
    s = model.schedule
    lines.append(
        "schedule\t"
        + "\t".join(
            [
                f"total_iters={s.total_iters}",
                f"alpha0={fmt17(s.alpha0)}",
                f"alpha_final={fmt17(s.alpha_final)}",
                f"radius0={s.radius0}",
                f"zero_radius_fraction={fmt17(s.zero_radius_fraction)}",
                f"rng_seed={s.rng_seed}",
            ]
        )
    )
    lines.append(f"mode\t{model.mode.value}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_model(path) -> SomModel:
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty model file")
    head = lines[0].split("\t")
    if len(head) < 4:
        raise ValueError(f"{path}: malformed header line")
    rows, cols, p = int(head[0]), int(head[1]), int(head[2])
    col_names = tuple(head[3:])
    if len(col_names) != p:
        raise ValueError(f"{path}: header promises {p} column names, found {len(col_names)}")
    topo = GridTopology(rows, cols)
    n_units = topo.n_units
    if len(lines) < 1 + n_units:
        raise ValueError(f"{path}: expected {n_units} unit lines")
    codes = np.empty((n_units, p))
    for u in range(n_units):
        parts = lines[1 + u].split("\t")
        if len(parts) != p:
            raise ValueError(f"{path}: unit line {u} has {len(parts)} components, expected {p}")
        codes[u] = [float(v) for v in parts]
    keyed: dict[str, list[str]] = {}
    for line in lines[1 + n_units :]:
        if not line:
            continue
        key, *rest = line.split("\t")
        keyed[key] = rest
    for required in ("mean", "std", "schedule", "mode"):
        if required not in keyed:
            raise ValueError(f"{path}: missing {required!r} line")
    means = np.array([float(v) for v in keyed["mean"]])
    stds = np.array([float(v) for v in keyed["std"]])
    sched_kv = dict(item.split("=", 1) for item in keyed["schedule"])
    schedule = TrainingSchedule(
        total_iters=int(sched_kv["total_iters"]),
        alpha0=float(sched_kv["alpha0"]),
        alpha_final=float(sched_kv["alpha_final"]),
        radius0=int(sched_kv["radius0"]),
        zero_radius_fraction=float(sched_kv["zero_radius_fraction"]),
        rng_seed=int(sched_kv["rng_seed"]),
    )
    mode = TrainingMode(keyed["mode"][0])
    return SomModel(
        CodeBook(codes, topo, col_names),
        StandardizationParams(means, stds),
        schedule,
        mode,
    )


def write_assignment_csv(
    path,
    row_labels,
    assignment: Assignment,
    topology: GridTopology,
    superclass_labels=None,
    supplementary=None,
) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        header = ["label", "unit", "grid_row", "grid_col", "sq_distance", "status"]
        if superclass_labels is not None:
            header.append("superclass")
        if supplementary is not None:
            header.append("supplementary")
        w.writerow(header)
        for i, label in enumerate(row_labels):
            u = int(assignment.units[i])
            if u == UNCLASSIFIABLE:
                row = [label, "", "", "", "", "unclassifiable"]
            else:
                r, c = topology.unit_coords(u)
                row = [label, str(u), str(r), str(c), fmt17(assignment.sq_distances[i]), "ok"]
            if superclass_labels is not None:
                s = int(superclass_labels[i])
                row.append("" if s < 0 else str(s))
            if supplementary is not None:
                row.append("yes" if supplementary[i] else "no")
            w.writerow(row)


def write_provenance_csv(path, report: ImputationReport, row_labels, col_names) -> None:
    """Sidecar of the filled matrix: one line per originally-missing cell."""
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["label", "column", "estimate", "units", "seeds", "source"])
        for f in report.fills:
            w.writerow(
                [
                    row_labels[f.row],
                    col_names[f.col],
                    fmt17(report.filled.values[f.row, f.col]),
                    ";".join(str(u) for u in f.units),
                    ";".join(str(s) for s in f.seeds),
                    f.source,
                ]
            )
        for (i, k) in report.unresolved:
            w.writerow([row_labels[i], col_names[k], "", "", "", "unresolved"])


def write_eval_csv(path, report: EvalReport) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["d", "n_cells", "rmse_som", "rmse_mean", "n_unresolved"])
        for d in report.d_values:
            w.writerow(
                [
                    str(d),
                    str(report.n_cells[d]),
                    fmt17(report.rmse_som[d]),
                    fmt17(report.rmse_mean_baseline[d]),
                    str(report.n_unresolved[d]),
                ]
            )


def write_dendrogram_csv(path, sc: SuperClassing) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["step", "left", "right", "height"])
        for step, (left, right, height) in enumerate(sc.dendrogram):
            w.writerow([str(step), str(left), str(right), fmt17(height)])


def write_superclass_csv(path, sc: SuperClassing) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["unit", "superclass"])
        for u in range(sc.n_units):
            w.writerow([str(u), str(int(sc.labels[u]))])


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(path, entries: dict) -> None:
    """key=value text, keys sorted, values json-encoded."""
    lines = [f"{key}={json.dumps(entries[key])}" for key in sorted(entries)]
    Path(path).write_text("\n".join(lines) + "\n")


def read_manifest(path) -> dict:
    out = {}
    for line in Path(path).read_text().splitlines():
        if not line:
            continue
        key, _, raw = line.partition("=")
        out[key] = json.loads(raw)
    return out
