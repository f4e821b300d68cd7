import numpy as np
import pytest

from somimpute import (
    Assignment,
    CodeBook,
    DataMatrix,
    GridTopology,
    StandardizationParams,
    TrainingMode,
    TrainingSchedule,
    classify_supplementary,
)
from somimpute.cli import main
from somimpute.model_io import (
    SomModel,
    load_model,
    read_csv,
    read_manifest,
    save_model,
    write_csv,
    write_manifest,
)
from somimpute.render import render_map_svg, render_map_text
from conftest import random_incomplete


class TestReadCsv:
    def test_markers_and_parsing(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("id,x,y\nr1,3.5,NA\nr2,, -1.25 \n")
        data = read_csv(path)
        assert data.row_labels == ("r1", "r2")
        assert data.col_names == ("x", "y")
        assert data.value_at(0, 0) == 3.5
        assert data.missing_set(0) == frozenset({1})
        assert data.missing_set(1) == frozenset({0})
        assert data.value_at(1, 1) == -1.25

    def test_custom_marker(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("id,x\nr1,?\nr2,1\n")
        data = read_csv(path, missing_markers=("?",))
        assert data.missing_set(0) == frozenset({0})

    def test_ragged_row_reports_line(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("id,x,y\nr1,1,2\nr2,3\n")
        with pytest.raises(ValueError, match="line 3"):
            read_csv(path)

    def test_unparseable_cell_reports_position(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("id,x\nr1,abc\n")
        with pytest.raises(ValueError, match="line 2.*'x'"):
            read_csv(path)

    def test_non_finite_cell_rejected(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("id,x\nr1,inf\n")
        with pytest.raises(ValueError, match="not finite"):
            read_csv(path)

    def test_all_missing_column_rejected(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("id,x,y\nr1,1,NA\nr2,2,\n")
        with pytest.raises(ValueError, match="'y'"):
            read_csv(path)

    def test_categorical_and_named_label_column(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("level,name,x\nhigh,r1,1\n,r2,2\n")
        data = read_csv(path, label_col="name", categorical_col="level")
        assert data.row_labels == ("r1", "r2")
        assert data.categorical == ("high", None)
        assert data.col_names == ("x",)

    def test_unknown_columns_rejected(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("id,x\nr1,1\n")
        with pytest.raises(ValueError, match="label column"):
            read_csv(path, label_col="nope")
        with pytest.raises(ValueError, match="categorical column"):
            read_csv(path, categorical_col="nope")


def test_csv_roundtrip_preserves_values_and_mask(tmp_path):
    rng = np.random.default_rng(0)
    values = rng.normal(size=(8, 3)) * 10.0 ** rng.integers(-12, 12, size=(8, 3))
    values[1, 2] = 1e-300
    values[2, 0] = -9.87654321098765432e250
    data = DataMatrix(
        values, rng.random((8, 3)) < 0.8, tuple(f"r{i}" for i in range(8)),
        ("a", "b", "c"),
    )
    path = tmp_path / "round.csv"
    write_csv(data, path)
    back = read_csv(path)
    assert back.row_labels == data.row_labels
    assert back.col_names == data.col_names
    assert np.array_equal(back.mask, data.mask)
    assert np.array_equal(back.values[back.mask], data.values[data.mask])


def test_csv_roundtrip_with_categorical(tmp_path):
    values = np.array([[1.0], [2.0]])
    data = DataMatrix(values, np.ones((2, 1), bool), ("r1", "r2"), ("x",),
                      ("lo", None), "level")
    path = tmp_path / "cat.csv"
    write_csv(data, path)
    back = read_csv(path, categorical_col="level")
    assert back.categorical == ("lo", None)
    assert back.categorical_name == "level"


def test_model_roundtrip(tmp_path):
    rng = np.random.default_rng(1)
    topo = GridTopology(2, 3)
    cb = CodeBook(rng.normal(size=(6, 4)), topo, ("a", "b", "c", "d"))
    model = SomModel(
        cb,
        StandardizationParams(rng.normal(size=4), np.abs(rng.normal(size=4)) + 0.1),
        TrainingSchedule(total_iters=777, alpha0=0.4, alpha_final=0.02, radius0=2,
                         zero_radius_fraction=0.35, rng_seed=99),
        TrainingMode.COMPLETE_ONLY,
    )
    path = tmp_path / "model.txt"
    save_model(model, path)
    back = load_model(path)
    assert np.array_equal(back.codebook.codes, cb.codes)
    assert back.codebook.col_names == cb.col_names
    assert back.codebook.topology == topo
    assert np.array_equal(back.standardizer.means, model.standardizer.means)
    assert np.array_equal(back.standardizer.stds, model.standardizer.stds)
    assert back.schedule == model.schedule
    assert back.mode is TrainingMode.COMPLETE_ONLY
    # bit-identical classification after the round trip
    data = random_incomplete(3, n=12, p=4)
    a = classify_supplementary(cb, data)
    b = classify_supplementary(back.codebook, data)
    assert np.array_equal(a.units, b.units)
    assert np.array_equal(a.sq_distances, b.sq_distances, equal_nan=True)


def test_manifest_roundtrip(tmp_path):
    entries = {"seed": 42, "alpha0": 0.5, "input": "x.csv", "markers": ["", "NA"],
               "model": None}
    path = tmp_path / "manifest.txt"
    write_manifest(path, entries)
    assert read_manifest(path) == entries


def test_render_map_text_golden():
    cb = CodeBook(np.array([[0.0], [1.0]]), GridTopology(1, 2), ("x",))
    asg = Assignment(np.array([0, 0, -1]), np.array([0.0, 0.1, np.nan]), 2)
    text = render_map_text(cb, asg, ("alpha", "beta", "ghost"),
                           supplementary=[False, True, False])
    expected = (
        "+-------+-----+\n"
        "| alpha |     |\n"
        "| beta* |     |\n"
        "+-------+-----+\n"
    )
    assert text == expected


def test_render_map_svg_markers():
    cb = CodeBook(np.array([[0.0], [1.0], [2.0], [3.0]]), GridTopology(2, 2),
                  ("x",))
    asg = Assignment(np.array([0, 1, 1]), np.zeros(3), 4)
    from somimpute import hierarchical_codes
    sc = hierarchical_codes(cb, 2)
    svg = render_map_svg(cb, asg, ("a", "b", "c"), [False, True, False], sc,
                         {0: {"m1": 1.0}, 1: {}, 2: {}, 3: {}})
    assert svg.count("<rect") >= 5  # 4 cells + at least one modality bar
    assert 'class="supp"' in svg
    assert "b*" in svg


def _write_training_csv(path, n=18, seed=0, all_missing_row=True):
    rng = np.random.default_rng(seed)
    lines = ["id,level,x,y,z,w"]
    for i in range(n):
        vals = rng.normal(size=4) + (0.0 if i % 2 else 4.0)
        cells = [f"{v:.6f}" for v in vals]
        if i % 5 == 3:
            cells[rng.integers(4)] = "NA"
        level = ["lo", "hi"][i % 2]
        lines.append(f"r{i:02d},{level}," + ",".join(cells))
    if all_missing_row:
        lines.append(f"r{n:02d},lo,NA,NA,NA,NA")
    path.write_text("\n".join(lines) + "\n")


def _train_args(data_csv, outdir, extra=()):
    return [
        "train",
        "--input", str(data_csv),
        "--output-dir", str(outdir),
        "--grid-rows", "2",
        "--grid-cols", "2",
        "--iters", "300",
        "--radius0", "1",
        "--seed", "7",
        "--categorical-col", "level",
        *extra,
    ]


class TestCli:
    def test_train_writes_model_assignments_manifest(self, tmp_path, capsys):
        csv_path = tmp_path / "data.csv"
        _write_training_csv(csv_path)
        out = tmp_path / "run"
        assert main(_train_args(csv_path, out, ("--superclasses", "2"))) == 0
        for name in ("model.txt", "assignments.csv", "manifest.txt",
                     "superclasses.csv", "dendrogram.csv"):
            assert (out / name).exists(), name
        err = capsys.readouterr().err
        assert "all-missing" in err
        rows = (out / "assignments.csv").read_text().splitlines()
        assert rows[0] == "label,unit,grid_row,grid_col,sq_distance,status,superclass,supplementary"
        assert rows[-1].startswith("r18,,,,,unclassifiable")

    def test_classify_against_saved_model(self, tmp_path):
        csv_path = tmp_path / "data.csv"
        _write_training_csv(csv_path)
        run = tmp_path / "run"
        assert main(_train_args(csv_path, run)) == 0
        supp = tmp_path / "supp.csv"
        supp.write_text("id,level,x,y,z,w\nnew1,lo,4.0,3.9,4.0,4.1\nnew2,hi,NA,NA,NA,NA\n")
        out = tmp_path / "cls"
        rc = main([
            "classify", "--input", str(supp), "--output-dir", str(out),
            "--model", str(run / "model.txt"), "--categorical-col", "level",
        ])
        assert rc == 0
        rows = (out / "assignments.csv").read_text().splitlines()
        assert len(rows) == 3
        assert rows[2].endswith("unclassifiable")

    def test_impute_with_model_and_fallback(self, tmp_path):
        csv_path = tmp_path / "data.csv"
        _write_training_csv(csv_path)
        run = tmp_path / "run"
        assert main(_train_args(csv_path, run)) == 0
        out = tmp_path / "imp"
        rc = main([
            "impute", "--input", str(csv_path), "--output-dir", str(out),
            "--model", str(run / "model.txt"), "--categorical-col", "level",
        ])
        assert rc == 0
        prov = (out / "provenance.csv").read_text().splitlines()
        assert prov[0] == "label,column,estimate,units,seeds,source"
        assert any(line.endswith("unresolved") for line in prov[1:])
        imputed = read_csv(out / "imputed.csv", categorical_col="level")
        assert not imputed.mask[-1].any()  # all-missing row stays unresolved

        out2 = tmp_path / "imp_fb"
        rc = main([
            "impute", "--input", str(csv_path), "--output-dir", str(out2),
            "--model", str(run / "model.txt"), "--categorical-col", "level",
            "--fallback", "column-mean",
        ])
        assert rc == 0
        filled = read_csv(out2 / "imputed.csv", categorical_col="level")
        assert filled.mask.all()
        original = read_csv(csv_path, categorical_col="level")
        col_means = np.nanmean(original.values, axis=0)
        assert filled.values[-1] == pytest.approx(col_means, rel=1e-12)

    def test_impute_multi_without_model(self, tmp_path):
        csv_path = tmp_path / "data.csv"
        _write_training_csv(csv_path, all_missing_row=False)
        out = tmp_path / "multi"
        rc = main([
            "impute", "--input", str(csv_path), "--output-dir", str(out),
            "--n-maps", "3", "--grid-rows", "2", "--grid-cols", "2",
            "--iters", "200", "--radius0", "1", "--seed", "3",
            "--categorical-col", "level",
        ])
        assert rc == 0
        prov = (out / "provenance.csv").read_text().splitlines()
        fills = [l for l in prov[1:] if not l.endswith("unresolved")]
        assert fills and all(";" in l.split(",")[3] for l in fills)  # 3 units listed

    def test_model_with_n_maps_rejected(self, tmp_path):
        csv_path = tmp_path / "data.csv"
        _write_training_csv(csv_path)
        run = tmp_path / "run"
        assert main(_train_args(csv_path, run)) == 0
        rc = main([
            "impute", "--input", str(csv_path), "--output-dir", str(tmp_path / "x"),
            "--model", str(run / "model.txt"), "--n-maps", "2",
        ])
        assert rc == 2

    def test_evaluate_writes_report_and_curve(self, tmp_path):
        csv_path = tmp_path / "complete.csv"
        rng = np.random.default_rng(5)
        data = DataMatrix.from_nan(rng.normal(size=(10, 5)) + np.arange(5))
        write_csv(data, csv_path)
        out = tmp_path / "eval"
        rc = main([
            "evaluate", "--input", str(csv_path), "--output-dir", str(out),
            "--grid-rows", "2", "--grid-cols", "2", "--iters", "150",
            "--radius0", "1", "--d-min", "1", "--d-max", "2", "--repeats", "1",
            "--seed", "11",
        ])
        assert rc == 0
        lines = (out / "eval.csv").read_text().splitlines()
        assert lines[0] == "d,n_cells,rmse_som,rmse_mean,n_unresolved"
        assert len(lines) == 3
        assert (out / "curve.svg").read_text().startswith("<svg")

    def test_evaluate_rejects_incomplete_input(self, tmp_path):
        csv_path = tmp_path / "data.csv"
        _write_training_csv(csv_path)
        rc = main([
            "evaluate", "--input", str(csv_path), "--output-dir", str(tmp_path / "e"),
            "--grid-rows", "2", "--grid-cols", "2", "--d-max", "2",
            "--categorical-col", "level",
        ])
        assert rc == 2

    def test_render_marks_supplementary_in_mode_b(self, tmp_path):
        csv_path = tmp_path / "data.csv"
        _write_training_csv(csv_path)
        run = tmp_path / "run"
        assert main(_train_args(csv_path, run, ("--mode", "complete-only"))) == 0
        out = tmp_path / "render"
        rc = main([
            "render", "--input", str(csv_path), "--output-dir", str(out),
            "--model", str(run / "model.txt"), "--categorical-col", "level",
            "--superclasses", "2",
        ])
        assert rc == 0
        text = (out / "map.txt").read_text()
        assert "*" in text  # incomplete rows rendered as supplementary
        svg = (out / "map.svg").read_text()
        assert 'class="supp"' in svg
        assert svg.startswith("<svg")

    def test_missing_input_file_is_a_clean_error(self, tmp_path):
        rc = main([
            "classify", "--input", str(tmp_path / "nope.csv"),
            "--output-dir", str(tmp_path / "o"), "--model", str(tmp_path / "m.txt"),
        ])
        assert rc == 2


class TestReplay:
    def _csvs(self, outdir):
        return sorted(p.name for p in outdir.glob("*.csv"))

    def _assert_replay_identical(self, tmp_path, outdir, tag):
        redo = tmp_path / f"redo_{tag}"
        rc = main([
            "replay", "--manifest", str(outdir / "manifest.txt"),
            "--output-dir", str(redo),
        ])
        assert rc == 0
        names = self._csvs(outdir)
        assert names == self._csvs(redo) and names
        for name in names:
            assert (outdir / name).read_bytes() == (redo / name).read_bytes(), name

    def test_all_subcommands_replay_byte_identically(self, tmp_path):
        csv_path = tmp_path / "data.csv"
        _write_training_csv(csv_path)
        run = tmp_path / "run"
        assert main(_train_args(csv_path, run, ("--superclasses", "2"))) == 0
        self._assert_replay_identical(tmp_path, run, "train")

        cls = tmp_path / "cls"
        assert main([
            "classify", "--input", str(csv_path), "--output-dir", str(cls),
            "--model", str(run / "model.txt"), "--categorical-col", "level",
        ]) == 0
        self._assert_replay_identical(tmp_path, cls, "classify")

        imp = tmp_path / "imp"
        assert main([
            "impute", "--input", str(csv_path), "--output-dir", str(imp),
            "--model", str(run / "model.txt"), "--categorical-col", "level",
            "--fallback", "column-mean",
        ]) == 0
        self._assert_replay_identical(tmp_path, imp, "impute")

        comp = tmp_path / "complete.csv"
        data = DataMatrix.from_nan(np.random.default_rng(8).normal(size=(10, 4)))
        write_csv(data, comp)
        ev = tmp_path / "ev"
        assert main([
            "evaluate", "--input", str(comp), "--output-dir", str(ev),
            "--grid-rows", "2", "--grid-cols", "2", "--iters", "120",
            "--radius0", "1", "--d-min", "1", "--d-max", "2", "--seed", "2",
        ]) == 0
        self._assert_replay_identical(tmp_path, ev, "evaluate")

    def test_replay_detects_changed_input(self, tmp_path):
        csv_path = tmp_path / "data.csv"
        _write_training_csv(csv_path)
        run = tmp_path / "run"
        assert main(_train_args(csv_path, run)) == 0
        csv_path.write_text(csv_path.read_text() + "r99,lo,1,1,1,1\n")
        rc = main([
            "replay", "--manifest", str(run / "manifest.txt"),
            "--output-dir", str(tmp_path / "redo"),
        ])
        assert rc == 2
