import json

import pytest

from aapso.cli import main

from conftest import informative_dataset


@pytest.fixture(scope="module")
def data_csv(tmp_path_factory):
    data = informative_dataset(n=50, n_informative=2, n_noise=3, seed=4)
    path = tmp_path_factory.mktemp("cli") / "toy.csv"
    lines = [",".join(data.feature_names) + ",label"]
    lines += [",".join(f"{v:.5f}" for v in x) + f",{y}" for x, y in zip(data.features, data.labels)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _run_args(data_csv, out, *extra):
    return ["run", "--dataset", str(data_csv), "--label-column", "label", "--population", "4",
            "--iterations", "2", "--fitness-folds", "2", "--seed", "0", "--seed", "1",
            "--out", str(out), "--quiet", *extra]


class TestRun:
    def test_table_and_files(self, data_csv, tmp_path, capsys):
        assert main(_run_args(data_csv, tmp_path / "out")) == 0
        out = capsys.readouterr().out
        assert "aapso" in out and "Mann-Whitney" in out
        for name in ("records.jsonl", "config.json", "report.txt", "summary.json", "runs.csv"):
            assert (tmp_path / "out" / name).is_file()

    def test_json_format(self, data_csv, tmp_path, capsys):
        assert main(_run_args(data_csv, tmp_path / "out", "--format", "json", "--variant", "pso")) == 0
        report = json.loads(capsys.readouterr().out)
        assert list(report["variants"]) == ["pso"]
        assert report["variants"]["pso"]["n"] == 2

    def test_config_file_with_override(self, data_csv, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "dataset": {"path": str(data_csv), "label_column": "label"},
            "swarm": {"population": 4, "iterations": 2, "fitness_folds": 2},
            "variants": ["pso", "aapso"],
            "protocol": {"kind": "kfold", "folds": 3},
        }), encoding="utf-8")
        argv = ["run", "--config", str(cfg), "--variant", "aapso", "--out", str(tmp_path / "o"),
                "--format", "csv", "--quiet"]
        assert main(argv) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0].startswith("variant,n,")
        assert lines[1].startswith("aapso,3,")

    def test_progress_on_stderr(self, data_csv, tmp_path, capsys):
        argv = [a for a in _run_args(data_csv, tmp_path / "out", "--variant", "pso") if a != "--quiet"]
        assert main(argv) == 0
        assert "seed=1" in capsys.readouterr().err

    def test_bad_dataset(self, tmp_path, capsys):
        assert main(["run", "--dataset", str(tmp_path / "missing.csv"), "--out", str(tmp_path)]) == 3
        assert capsys.readouterr().err.startswith("error[dataset]")

    def test_bad_config_value(self, data_csv, tmp_path, capsys):
        assert main(_run_args(data_csv, tmp_path / "out", "--knn-k", "4")) == 4
        err = capsys.readouterr().err
        assert err.startswith("error[config]") and "knn.k" in err

    def test_no_dataset(self, capsys):
        assert main(["run"]) == 4

    def test_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main(["run", "--variant", "gwo"])
        assert exc.value.code == 2


class TestSummarize:
    def test_matches_run_report(self, data_csv, tmp_path, capsys):
        main(_run_args(data_csv, tmp_path / "out"))
        written = (tmp_path / "out" / "report.txt").read_text(encoding="utf-8")
        capsys.readouterr()
        assert main(["summarize", "--records", str(tmp_path / "out")]) == 0
        assert capsys.readouterr().out == written

    def test_writes_files(self, data_csv, tmp_path, capsys):
        main(_run_args(data_csv, tmp_path / "out"))
        capsys.readouterr()
        assert main(["summarize", "--records", str(tmp_path / "out" / "records.jsonl"),
                     "--format", "json", "--out", str(tmp_path / "rep")]) == 0
        assert json.loads(capsys.readouterr().out) == json.loads(
            (tmp_path / "rep" / "summary.json").read_text(encoding="utf-8"))

    def test_missing_records(self, tmp_path, capsys):
        assert main(["summarize", "--records", str(tmp_path)]) == 5
        assert "error[records]" in capsys.readouterr().err


class TestStatTest:
    def test_inline_values(self, capsys):
        argv = ["stat-test", "--a", "98.37,98.54,98.46,97.86,98.80", "--b", "97.52,97.78,97.52,96.84,98.46"]
        assert main(argv) == 0
        assert capsys.readouterr().out.startswith("U=22.5 p=0.0229")

    def test_file_values_json(self, tmp_path, capsys):
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        a.write_text("3\n4\n5\n", encoding="utf-8")
        b.write_text("0 1 2", encoding="utf-8")
        assert main(["stat-test", "--a", str(a), "--b", str(b), "--format", "json"]) == 0
        rep = json.loads(capsys.readouterr().out)
        assert rep["u_statistic"] == 9 and rep["method"] == "exact"
        assert rep["p_value"] == pytest.approx(0.05)

    def test_bad_values(self, capsys):
        assert main(["stat-test", "--a", "1,x", "--b", "1,2"]) == 4
        assert main(["stat-test", "--a", "1", "--b", "1,2"]) == 4
