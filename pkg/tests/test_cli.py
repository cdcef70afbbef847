import json
import subprocess
import sys

import numpy as np
import pytest

from cmstar.cli import main
from cmstar.datasets import bundled_path
from cmstar.io import read_reports

TRUTH = str(bundled_path("worked_example_truth"))
PRED = str(bundled_path("worked_example_pred"))
IRIS = str(bundled_path("iris"))


def run_cli(*argv):
    return main([str(a) for a in argv])


class TestEvaluate:
    def test_worked_example(self, tmp_path, capsys):
        out = tmp_path / "r.json"
        assert run_cli("evaluate", "--truth", TRUTH, "--pred", PRED, "--out", out) == 0
        assert "0.667 | 0.583 | 0.705 | 0.250 | 18.4 | 73.8" in capsys.readouterr().out
        (r,) = read_reports(out)
        assert r.certainty_ratio == pytest.approx(0.738095, abs=1e-6)
        assert r.divergence == pytest.approx(0.184089, abs=1e-6)
        assert r.timestamp is not None

    def test_markdown_out(self, tmp_path):
        out = tmp_path / "r.md"
        assert run_cli("evaluate", "--truth", TRUTH, "--pred", PRED, "--out", out) == 0
        assert "| 18.4 | 73.8 |" in out.read_text()

    def test_one_hot_predictions(self, tmp_path):
        pred = tmp_path / "hard.csv"
        pred.write_text("A,B,C\n1,0,0\n1,0,0\n0,1,0\n0,1,0\n0,0,1\n1,0,0\n")
        out = tmp_path / "r.json"
        assert run_cli("evaluate", "--truth", TRUTH, "--pred", pred, "--out", out) == 0
        (r,) = read_reports(out)
        assert r.divergence == 0.0
        assert r.certainty_ratio == 1.0
        assert r.acc_star == r.acc

    def test_extra_measures(self, tmp_path):
        out = tmp_path / "r.json"
        assert run_cli("evaluate", "--truth", TRUTH, "--pred", PRED, "--measures", "f1,mcc", "--out", out) == 0
        (r,) = read_reports(out)
        assert set(r.measures) == {"f1", "mcc"}
        assert r.measures["mcc"]["cm"] == pytest.approx(0.42640143271122083, abs=1e-12)

    def test_verbose_matrices(self, capsys):
        assert run_cli("evaluate", "--truth", TRUTH, "--pred", PRED, "-v") == 0
        out = capsys.readouterr().out
        blocks = {b.splitlines()[0]: b.splitlines()[2:] for b in out.split("\n\n") if b.strip() and not b.startswith("|")}

        def parse(title):
            return np.array([[float(x) for x in line.split()[1:]] for line in blocks[title]])

        cm_star = parse("CM* = V + U")
        v, u = parse("V (certainty)"), parse("U (uncertainty)")
        np.testing.assert_allclose(cm_star, v + u, atol=2e-4)
        np.testing.assert_allclose(cm_star, [[2.3, 0.2, 0.5], [0.5, 1.1, 0.4], [0.0, 0.9, 0.1]], atol=1e-4)
        np.testing.assert_array_equal(parse("CM (rows: true, columns: predicted)"), [[3, 0, 0], [1, 1, 0], [0, 1, 0]])

    def test_row_mismatch(self, tmp_path, capsys):
        pred = tmp_path / "short.csv"
        pred.write_text("A,B,C\n0.9,0.1,0\n0.8,0,0.2\n")
        assert run_cli("evaluate", "--truth", TRUTH, "--pred", pred) == 2
        err = capsys.readouterr().err
        assert "6" in err and "2" in err and "row count mismatch" in err

    def test_unknown_truth_label(self, tmp_path, capsys):
        pred = tmp_path / "p.csv"
        pred.write_text("A,B\n" + "0.5,0.5\n" * 6)
        assert run_cli("evaluate", "--truth", TRUTH, "--pred", pred) == 2
        assert "'C'" in capsys.readouterr().err

    def test_extra_prediction_class_allowed(self, tmp_path, capsys):
        pred = tmp_path / "p.csv"
        pred.write_text("A,B,C,D\n" + "0.25,0.25,0.25,0.25\n" * 6)
        assert run_cli("evaluate", "--truth", TRUTH, "--pred", pred) == 0

    def test_bad_probability(self, tmp_path, capsys):
        pred = tmp_path / "p.csv"
        pred.write_text("A,B,C\n" + "0.5,0.2,0.1\n" * 6)
        assert run_cli("evaluate", "--truth", TRUTH, "--pred", pred) == 2
        assert "row 2" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert run_cli("evaluate", "--truth", tmp_path / "nope.csv", "--pred", PRED) == 2

    def test_unknown_measure(self):
        assert run_cli("evaluate", "--truth", TRUTH, "--pred", PRED, "--measures", "auc") == 2


class TestRun:
    def test_decision_tree(self, tmp_path):
        out = tmp_path / "dt.json"
        assert run_cli("run", "--data", IRIS, "--clf", "dt", "--out", out) == 0
        (r,) = read_reports(out)
        assert r.acc_u_star == 0.0
        assert r.certainty_ratio_pct == 100.0
        assert r.divergence == 0.0
        assert (r.seed, r.folds) == (42, 10)

    def test_byte_identical_without_timestamp(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for path in (a, b):
            assert run_cli("run", "--data", IRIS, "--clf", "knn3,nb,rf", "--n-trees", "10", "--no-timestamp", "--out", path) == 0
        assert a.read_bytes() == b.read_bytes()
        assert json.loads(a.read_text())["reports"][0]["timestamp"] is None

    def test_several_datasets_get_mean_rows(self, tmp_path, capsys):
        assert run_cli("run", "--data", IRIS, bundled_path("wine"), "--clf", "dt,nb") == 0
        out = capsys.readouterr().out
        assert out.count("**Mean**") == 2

    def test_unknown_classifier(self):
        assert run_cli("run", "--data", IRIS, "--clf", "svm") == 2

    def test_too_many_folds(self, tmp_path):
        data = tmp_path / "d.csv"
        data.write_text("1,A\n2,A\n3,B\n4,B\n")
        assert run_cli("run", "--data", data, "--clf", "dt", "--folds", "3") == 2

    def test_bad_forest_size(self):
        assert run_cli("run", "--data", IRIS, "--clf", "rf", "--n-trees", "0") == 2


class TestReport:
    @pytest.fixture
    def singles(self, tmp_path):
        paths = []
        for clf in ("knn3", "nb", "dt", "rf"):
            path = tmp_path / f"{clf}.json"
            assert run_cli("run", "--data", IRIS, "--clf", clf, "--n-trees", "5", "--out", path) == 0
            paths.append(path)
        return paths

    def test_merge(self, singles, tmp_path, capsys):
        capsys.readouterr()
        out = tmp_path / "all.md"
        assert run_cli("report", *singles, "--out", out) == 0
        text = out.read_text()
        assert text.count("**Mean**") == 4
        assert text == capsys.readouterr().out

    def test_merge_json(self, singles, tmp_path):
        out = tmp_path / "all.json"
        assert run_cli("report", *singles, "--out", out) == 0
        assert [r.classifier for r in read_reports(out)] == ["dt", "knn3", "nb", "rf"]

    def test_empty(self):
        assert run_cli("report") == 2

    def test_empty_file(self, tmp_path):
        path = tmp_path / "e.json"
        path.write_text('{"schema_version": 1, "reports": []}')
        assert run_cli("report", path) == 2

    def test_duplicate(self, singles, capsys):
        assert run_cli("report", singles[0], singles[0]) == 2
        assert "duplicate" in capsys.readouterr().err

    def test_schema_mismatch(self, tmp_path):
        path = tmp_path / "old.json"
        path.write_text('{"schema_version": 0, "reports": []}')
        assert run_cli("report", path) == 2

    def test_missing_file(self, tmp_path):
        assert run_cli("report", tmp_path / "none.json") == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "cmstar", "evaluate", "--truth", TRUTH, "--pred", PRED],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "73.8" in proc.stdout
