"""Command-line surface: train, classify, impute, evaluate, render, replay.

Every run validates its numeric parameters before touching the input, and
writes a ``manifest.txt`` (key=value, json-encoded values) recording the
subcommand, all parameters, seeds and input digests; ``replay`` re-executes
a manifest into a fresh output directory and reproduces the CSV outputs byte
for byte.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .data import destandardize, fit_standardizer, standardize
from .evaluation import deletion_curve, modality_proportions
from .imputation import ImputationReport, apply_column_mean_fallback, impute, impute_multi
from .model_io import (
    DEFAULT_MISSING_MARKERS,
    SomModel,
    load_model,
    read_csv,
    read_manifest,
    save_model,
    sha256_file,
    write_assignment_csv,
    write_csv,
    write_dendrogram_csv,
    write_eval_csv,
    write_manifest,
    write_provenance_csv,
    write_superclass_csv,
)
from .render import render_curve_svg, render_map_svg, render_map_text
from .superclass import hierarchical_codes, superclass_of_rows
from .topology import GridTopology
from .trainer import TrainingMode, TrainingSchedule, classify_supplementary, train


def _add_io_flags(p: argparse.ArgumentParser, with_input: bool = True) -> None:
    if with_input:
        p.add_argument("--input", required=True, help="input CSV (header row, label column first)")
    p.add_argument("--output-dir", required=True, help="directory for outputs and manifest")
    p.add_argument(
        "--missing-marker",
        action="append",
        dest="missing_markers",
        default=None,
        help="cell content treated as missing (repeatable; default: empty field and NA)",
    )
    p.add_argument("--label-col", default=None, help="name of the label column (default: first)")
    p.add_argument("--categorical-col", default=None, help="name of a categorical column")


def _add_grid_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--grid-rows", type=int, required=True)
    p.add_argument("--grid-cols", type=int, required=True)


def _add_schedule_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--iters", type=int, default=1000, help="training iterations")
    p.add_argument("--alpha0", type=float, default=0.5, help="initial learning rate")
    p.add_argument("--alpha-final", type=float, default=0.01, help="final learning rate")
    p.add_argument(
        "--radius0", type=int, default=None,
        help="initial neighborhood radius (default: max(rows, cols) // 2)",
    )
    p.add_argument("--zero-radius-fraction", type=float, default=0.4,
                   help="final fraction of iterations at radius 0")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="somimpute",
        description="Self-organizing maps for datasets with missing values.",
    )
    parser.add_argument("--version", action="version", version=f"somimpute {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("train", help="fit a map and classify every row")
    _add_io_flags(p)
    _add_grid_flags(p)
    _add_schedule_flags(p)
    p.add_argument("--mode", choices=[m.value for m in TrainingMode],
                   default=TrainingMode.INCLUDE_INCOMPLETE.value)
    p.add_argument("--superclasses", type=int, default=None,
                   help="also cut the code vectors into k super-classes")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("classify", help="assign rows of a CSV against a saved model")
    _add_io_flags(p)
    p.add_argument("--model", required=True, help="model file written by train")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("impute", help="fill missing cells from the winning code vectors")
    _add_io_flags(p)
    p.add_argument("--model", default=None, help="model file (single-map imputation)")
    p.add_argument("--n-maps", type=int, default=1,
                   help="train this many maps and average their estimates (no --model)")
    p.add_argument("--grid-rows", type=int, default=None)
    p.add_argument("--grid-cols", type=int, default=None)
    _add_schedule_flags(p)
    p.add_argument("--mode", choices=[m.value for m in TrainingMode],
                   default=TrainingMode.INCLUDE_INCOMPLETE.value)
    p.add_argument("--fallback", choices=["none", "column-mean"], default="none",
                   help="fill unresolved (all-missing-row) cells with column means")
    p.set_defaults(func=cmd_impute)

    p = sub.add_parser("evaluate", help="random-deletion error study on a complete CSV")
    _add_io_flags(p)
    _add_grid_flags(p)
    _add_schedule_flags(p)
    p.add_argument("--d-min", type=int, default=1, help="smallest deletions-per-row")
    p.add_argument("--d-max", type=int, required=True, help="largest deletions-per-row")
    p.add_argument("--n-maps", type=int, default=1)
    p.add_argument("--repeats", type=int, default=1, help="independent arms averaged per d")
    p.add_argument("--mode", choices=[m.value for m in TrainingMode],
                   default=TrainingMode.INCLUDE_INCOMPLETE.value)
    p.add_argument("--deletion-mode", choices=["per-row", "global-mcar"], default="per-row",
                   help="per-row is the reference protocol; global-mcar spreads the "
                        "same cell budget over the whole table")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("render", help="draw the map (SVG and text) for a dataset")
    _add_io_flags(p)
    p.add_argument("--model", required=True)
    p.add_argument("--superclasses", type=int, default=None)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("replay", help="re-run a manifest into a new output directory")
    p.add_argument("--manifest", required=True)
    p.add_argument("--output-dir", required=True)
    p.set_defaults(func=cmd_replay)
    return parser


def _effective_markers(args) -> tuple[str, ...]:
    if args.missing_markers is None:
        args.missing_markers = list(DEFAULT_MISSING_MARKERS)
    return tuple(args.missing_markers)


def _outdir(args) -> Path:
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_run_manifest(outdir: Path, args, digests: dict[str, str]) -> None:
    entries = {k: v for k, v in vars(args).items() if k != "func"}
    entries["tool_version"] = __version__
    for name, path in digests.items():
        entries[f"{name}_sha256"] = sha256_file(path)
    write_manifest(outdir / "manifest.txt", entries)


def _schedule_from_args(args, topo: GridTopology | None = None) -> TrainingSchedule:
    if args.radius0 is None:
        args.radius0 = max(topo.rows, topo.cols) // 2 if topo is not None else 0
    return TrainingSchedule(
        total_iters=args.iters,
        alpha0=args.alpha0,
        alpha_final=args.alpha_final,
        radius0=args.radius0,
        zero_radius_fraction=args.zero_radius_fraction,
        rng_seed=args.seed,
    )


def cmd_train(args) -> int:
    markers = _effective_markers(args)
    topo = GridTopology(args.grid_rows, args.grid_cols)
    schedule = _schedule_from_args(args, topo)
    mode = TrainingMode(args.mode)
    if args.superclasses is not None and not 1 <= args.superclasses <= topo.n_units:
        raise ValueError(f"--superclasses must lie in [1, {topo.n_units}]")
    data = read_csv(args.input, markers, args.label_col, args.categorical_col)
    params = fit_standardizer(data)
    result = train(standardize(data, params), topo, schedule, mode)
    outdir = _outdir(args)
    save_model(SomModel(result.codebook, params, schedule, mode), outdir / "model.txt")
    supplementary = ~result.training_pool & (result.assignment.units >= 0)
    row_sc = None
    if args.superclasses is not None:
        sc = hierarchical_codes(result.codebook, args.superclasses)
        write_superclass_csv(outdir / "superclasses.csv", sc)
        write_dendrogram_csv(outdir / "dendrogram.csv", sc)
        row_sc = superclass_of_rows(result.assignment, sc)
    write_assignment_csv(
        outdir / "assignments.csv", data.row_labels, result.assignment, topo,
        superclass_labels=row_sc, supplementary=supplementary,
    )
    if result.n_skipped_all_missing:
        print(
            f"warning: {result.n_skipped_all_missing} all-missing row(s) skipped during "
            "training and flagged unclassifiable",
            file=sys.stderr,
        )
    _write_run_manifest(outdir, args, {"input": args.input})
    return 0


def cmd_classify(args) -> int:
    markers = _effective_markers(args)
    model = load_model(args.model)
    data = read_csv(args.input, markers, args.label_col, args.categorical_col)
    assignment = classify_supplementary(
        model.codebook, standardize(data, model.standardizer)
    )
    outdir = _outdir(args)
    write_assignment_csv(
        outdir / "assignments.csv", data.row_labels, assignment, model.codebook.topology
    )
    _write_run_manifest(outdir, args, {"input": args.input, "model": args.model})
    return 0


def _destandardized_report(report: ImputationReport, params) -> ImputationReport:
    filled = destandardize(report.filled, params)
    fills = tuple(
        replace(f, value=float(f.value * params.stds[f.col] + params.means[f.col]))
        for f in report.fills
    )
    return ImputationReport(filled, fills, report.unresolved)


def cmd_impute(args) -> int:
    markers = _effective_markers(args)
    digests = {"input": args.input}
    if args.model is not None:
        if args.n_maps != 1:
            raise ValueError("--n-maps > 1 trains its own maps; it cannot be combined with --model")
        model = load_model(args.model)
        data = read_csv(args.input, markers, args.label_col, args.categorical_col)
        params = model.standardizer
        report = impute(model.codebook, standardize(data, params))
        digests["model"] = args.model
    else:
        if args.grid_rows is None or args.grid_cols is None:
            raise ValueError("impute without --model needs --grid-rows and --grid-cols")
        topo = GridTopology(args.grid_rows, args.grid_cols)
        schedule = _schedule_from_args(args, topo)
        mode = TrainingMode(args.mode)
        if args.n_maps < 1:
            raise ValueError(f"--n-maps must be >= 1, got {args.n_maps}")
        data = read_csv(args.input, markers, args.label_col, args.categorical_col)
        params = fit_standardizer(data)
        report = impute_multi(
            standardize(data, params), topo, schedule, args.n_maps,
            base_seed=args.seed, mode=mode,
        )
    if args.fallback == "column-mean":
        report = apply_column_mean_fallback(report, standardize(data, params))
    out_report = _destandardized_report(report, params)
    outdir = _outdir(args)
    write_csv(out_report.filled, outdir / "imputed.csv")
    write_provenance_csv(
        outdir / "provenance.csv", out_report, data.row_labels, data.col_names
    )
    _write_run_manifest(outdir, args, digests)
    return 0


def cmd_evaluate(args) -> int:
    markers = _effective_markers(args)
    topo = GridTopology(args.grid_rows, args.grid_cols)
    schedule = _schedule_from_args(args, topo)
    mode = TrainingMode(args.mode)
    if args.d_min < 0 or args.d_max < args.d_min:
        raise ValueError(f"invalid deletion range [{args.d_min}, {args.d_max}]")
    data = read_csv(args.input, markers, args.label_col, args.categorical_col)
    if data.n_missing_cells:
        raise ValueError("evaluate requires a complete input dataset")
    report = deletion_curve(
        data, range(args.d_min, args.d_max + 1), topo, schedule,
        n_maps=args.n_maps, n_repeats=args.repeats, mode=mode,
        global_mcar=args.deletion_mode == "global-mcar",
    )
    outdir = _outdir(args)
    write_eval_csv(outdir / "eval.csv", report)
    (outdir / "curve.svg").write_text(render_curve_svg(report))
    _write_run_manifest(outdir, args, {"input": args.input})
    return 0


def cmd_render(args) -> int:
    markers = _effective_markers(args)
    model = load_model(args.model)
    data = read_csv(args.input, markers, args.label_col, args.categorical_col)
    std = standardize(data, model.standardizer)
    assignment = classify_supplementary(model.codebook, std)
    if model.mode is TrainingMode.COMPLETE_ONLY:
        supplementary = ~std.mask.all(axis=1) & (assignment.units >= 0)
    else:
        supplementary = np.zeros(data.n_rows, dtype=bool)
    sc = None
    if args.superclasses is not None:
        sc = hierarchical_codes(model.codebook, args.superclasses)
    modality = None
    if data.categorical is not None:
        modality = modality_proportions(assignment, data)
    outdir = _outdir(args)
    (outdir / "map.txt").write_text(
        render_map_text(model.codebook, assignment, data.row_labels, supplementary, sc)
    )
    (outdir / "map.svg").write_text(
        render_map_svg(
            model.codebook, assignment, data.row_labels, supplementary, sc, modality
        )
    )
    _write_run_manifest(outdir, args, {"input": args.input, "model": args.model})
    return 0


_REPLAY_SKIP = {"subcommand", "tool_version", "output_dir"}

# argparse dests whose flag spelling differs from the default dash translation
_REPLAY_FLAGS = {"missing_markers": "--missing-marker"}


def cmd_replay(args) -> int:
    manifest = read_manifest(args.manifest)
    if "subcommand" not in manifest:
        raise ValueError(f"{args.manifest}: not a run manifest (no subcommand)")
    for key, digest in sorted(manifest.items()):
        if not key.endswith("_sha256"):
            continue
        src = manifest.get(key[: -len("_sha256")])
        if src is None or not Path(src).exists():
            raise ValueError(f"replay input {src!r} is missing")
        if sha256_file(src) != digest:
            raise ValueError(f"replay input {src!r} changed since the original run")
    argv: list[str] = [manifest["subcommand"]]
    for key in sorted(manifest):
        if key in _REPLAY_SKIP or key.endswith("_sha256"):
            continue
        value = manifest[key]
        if value is None:
            continue
        flag = _REPLAY_FLAGS.get(key, "--" + key.replace("_", "-"))
        if isinstance(value, list):
            for item in value:
                argv.extend([flag, str(item)])
        else:
            argv.extend([flag, str(value)])
    argv.extend(["--output-dir", args.output_dir])
    return main(argv)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
