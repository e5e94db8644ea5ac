"""CLI contract: subcommands, exit codes, output streams, file outputs."""

import json

import pytest

from mtpi2.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestTable:
    def test_csv_to_stdout(self, capsys):
        code, out, err = run_cli(
            capsys, "table", "--design", "mtpi2", "--pt", "0.3", "--max-n", "12"
        )
        assert code == 0
        rows = [line.split(",") for line in out.strip().splitlines()]
        header = rows[0]
        assert header[1:] == [str(n) for n in range(1, 13)]
        # row x=3: cell at n=6 is D, n=12 is S; infeasible left of n=3
        assert rows[4][6] == "D"
        assert rows[4][12] == "S"
        assert rows[13][1] == "-"

    def test_side_by_side_for_both(self, capsys):
        code, out, _ = run_cli(
            capsys, "table", "--design", "both", "--pt", "0.3", "--max-n", "6"
        )
        assert code == 0
        header = out.splitlines()[0].split(",")
        assert header[1:3] == ["1:mtpi", "1:mtpi2"]
        rows = [line.split(",") for line in out.strip().splitlines()]
        assert rows[4][11:13] == ["S", "D"]  # (3,6): mTPI stays, mTPI-2 de-escalates

    def test_validation_error_exits_nonzero(self, capsys):
        code, out, err = run_cli(capsys, "table", "--pt", "1.2")
        assert code != 0
        assert out == ""
        assert "p_T" in err

    def test_writes_files_and_figure(self, capsys, tmp_path):
        out_dir = tmp_path / "artifacts"
        code, _, err = run_cli(
            capsys,
            "table", "--design", "both", "--pt", "0.3", "--max-n", "6",
            "--out", str(out_dir),
        )
        assert code == 0
        names = {p.name for p in out_dir.iterdir()}
        assert {
            "decisions_mtpi.csv",
            "decisions_mtpi2.csv",
            "bayes_factors_mtpi.csv",
            "bayes_factors_mtpi2.csv",
            "decisions_side_by_side.csv",
            "table_mtpi.json",
            "table_mtpi2.json",
            "decision_table.png",
        } <= names
        assert (out_dir / "decision_table.png").stat().st_size > 0

    def test_bayes_factor_grid_formatting(self, capsys, tmp_path):
        run_cli(
            capsys, "table", "--design", "mtpi2", "--pt", "0.3", "--max-n", "6",
            "--out", str(tmp_path), "--no-figures",
        )
        text = (tmp_path / "bayes_factors_mtpi2.csv").read_text()
        rows = [line.split(",") for line in text.strip().splitlines()]
        assert rows[4][6] == "1.68"  # (3, 6)
        assert rows[5][6] == ""  # (4, 6) is U: blank
        assert rows[5][3] == "-"  # infeasible


class TestDiff:
    def test_contains_flip_cells(self, capsys):
        code, out, _ = run_cli(
            capsys, "diff", "--pt", "0.3", "--max-n", "12", "--format", "json"
        )
        assert code == 0
        doc = json.loads(out)
        changes = {(c["x"], c["n"]): (c["from"], c["to"]) for c in doc["changes"]}
        assert changes[(3, 6)] == ("S", "D")
        assert changes[(2, 9)] == ("S", "E")

    def test_low_target_has_unacceptable_flip(self, capsys):
        code, out, _ = run_cli(
            capsys, "diff", "--pt", "0.1", "--max-n", "12", "--format", "json"
        )
        doc = json.loads(out)
        changes = {(c["x"], c["n"]): (c["from"], c["to"]) for c in doc["changes"]}
        assert changes[(3, 12)] == ("S", "U")

    def test_identical_variants_empty_diff(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "diff", "--pt", "0.3", "--max-n", "12",
            "--from-design", "mtpi2", "--to-design", "mtpi2",
        )
        assert code == 0
        assert out.strip().splitlines() == ["x,n,from,to,empirical_gap"]

    def test_writes_outputs(self, capsys, tmp_path):
        code, _, _ = run_cli(
            capsys, "diff", "--pt", "0.3", "--max-n", "12", "--out", str(tmp_path)
        )
        assert code == 0
        assert (tmp_path / "diff.csv").exists()
        assert (tmp_path / "diff.json").exists()
        assert (tmp_path / "diff.png").stat().st_size > 0


class TestSimulate:
    def test_zero_toxicity_reliability(self, capsys, tmp_path):
        scenarios = tmp_path / "s.json"
        scenarios.write_text(
            json.dumps(
                [{"label": "zero", "p_T": 0.3, "true_tox": [0, 0, 0, 0], "max_n": 12}]
            )
        )
        code, out, _ = run_cli(
            capsys,
            "simulate", "--scenarios", str(scenarios), "--trials", "100",
            "--seed", "7", "--designs", "mtpi2", "--format", "json",
        )
        assert code == 0
        report = json.loads(out)["reports"][0]
        assert report["reliability"] == 1.0
        assert report["safety"] == 1.0

    def test_repeat_invocations_byte_identical(self, capsys, tmp_path):
        scenarios = tmp_path / "s.json"
        scenarios.write_text(
            json.dumps(
                [{"label": "mid", "p_T": 0.3, "true_tox": [0.1, 0.3, 0.5], "max_n": 15}]
            )
        )
        args = (
            "simulate", "--scenarios", str(scenarios), "--trials", "80",
            "--seed", "3", "--compare",
        )
        outputs = []
        for run_dir in ("a", "b"):
            out_dir = tmp_path / run_dir
            code, _, _ = run_cli(capsys, *args, "--out", str(out_dir), "--no-figures")
            assert code == 0
            outputs.append(
                (out_dir / "oc_report.csv").read_bytes()
                + (out_dir / "oc_report.json").read_bytes()
                + (out_dir / "comparison.csv").read_bytes()
            )
        assert outputs[0] == outputs[1]

    def test_compare_writes_delta_columns_and_figures(self, capsys, tmp_path):
        scenarios = tmp_path / "s.json"
        scenarios.write_text(
            json.dumps(
                [{"label": "mid", "p_T": 0.3, "true_tox": [0.1, 0.3, 0.5], "max_n": 15}]
            )
        )
        out_dir = tmp_path / "out"
        code, _, _ = run_cli(
            capsys,
            "simulate", "--scenarios", str(scenarios), "--trials", "50",
            "--seed", "3", "--compare", "--out", str(out_dir),
        )
        assert code == 0
        header = (out_dir / "comparison.csv").read_text().splitlines()[0]
        assert "reliability_delta" in header and "safety_delta" in header
        assert (out_dir / "selection.png").stat().st_size > 0
        assert (out_dir / "comparison.png").stat().st_size > 0

    def test_malformed_scenario_file_names_record(self, capsys, tmp_path):
        scenarios = tmp_path / "bad.json"
        scenarios.write_text('[{"label": "oops", "true_tox": [0.2]}]')
        code, out, err = run_cli(
            capsys, "simulate", "--scenarios", str(scenarios), "--trials", "5"
        )
        assert code != 0
        assert "oops" in err


class TestNext:
    def test_mtpi2_card(self, capsys):
        code, out, _ = run_cli(
            capsys, "next", "--design", "mtpi2", "--pt", "0.3", "--x", "3", "--n", "6"
        )
        assert code == 0
        card = json.loads(out)
        assert card["decision"] == "D"
        assert card["bayes_factor"] == pytest.approx(1.68, abs=0.01)
        assert sum(iv["prob"] for iv in card["intervals"]) == pytest.approx(1.0, abs=1e-9)

    def test_mtpi_stays(self, capsys):
        code, out, _ = run_cli(
            capsys, "next", "--design", "mtpi", "--pt", "0.3", "--x", "3", "--n", "6"
        )
        assert json.loads(out)["decision"] == "S"

    def test_no_data_is_an_error(self, capsys):
        code, out, err = run_cli(
            capsys, "next", "--design", "mtpi2", "--pt", "0.3", "--x", "0", "--n", "0"
        )
        assert code != 0
        assert "n must be >= 1" in err

    def test_x_over_n_is_an_error(self, capsys):
        code, _, err = run_cli(
            capsys, "next", "--design", "mtpi2", "--pt", "0.3", "--x", "4", "--n", "3"
        )
        assert code != 0
        assert "cannot exceed" in err
