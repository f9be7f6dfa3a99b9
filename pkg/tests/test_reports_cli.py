import pytest

from bombsim import cli, graphs, reports
from bombsim.oracles import QueryLedger
from bombsim.reports import (RunReport, canonical_answer, read_report_rows,
                             render_report_csv, strip_timing, summary_table)


class TestReportRecords:
    def sample(self, wall=1.5):
        led = QueryLedger()
        led.charge("bomb", 20)
        led.add_explosion(0.125)
        return RunReport.from_ledger(
            led, experiment="ev", run_id=0, seed=7, n=4, eps=0.05,
            answer="live", correct=True, wall_ms=wall)

    def test_row_has_stable_schema_and_columns(self):
        row = self.sample().row()
        assert row["schema"] == reports.SCHEMA_ID
        assert list(row) == [c for c in row]
        assert set(reports.COLUMNS) == set(row)
        assert row["q_bomb"] == "20"
        assert row["explosion"] == "0.125"

    def test_csv_roundtrip(self, tmp_path):
        path = tmp_path / "runs.csv"
        reports.write_report_csv([self.sample()], path)
        rows = read_report_rows(path)
        assert len(rows) == 1
        assert rows[0]["experiment"] == "ev"
        assert rows[0]["seed"] == "7"

    def test_strip_timing_blanks_only_wall(self):
        a = render_report_csv([self.sample(wall=1.0)])
        b = render_report_csv([self.sample(wall=99.0)])
        assert a != b
        assert strip_timing(a) == strip_timing(b)

    def test_canonical_answer_digests_long_values(self):
        short = canonical_answer((1, 2))
        assert short == "(1, 2)"
        long = canonical_answer(tuple(range(100)))
        assert long.startswith("sha256:") and len(long) < 30
        assert long == canonical_answer(tuple(range(100)))

    def test_summary_table_alignment(self):
        text = summary_table([{"a": 1, "bbbb": "x"}, {"a": 22, "bbbb": "yy"}])
        lines = text.splitlines()
        assert lines[0].startswith("a")
        assert len(lines) == 4


class TestCliCommands:
    def test_ev_exits_clean(self, capsys):
        assert cli.main(["ev", "--L", "10", "--seed", "1"]) == 0
        out = capsys.readouterr().out
        assert "[PASS]" in out and "[FAIL]" not in out

    def test_bomb_or_thm6(self, capsys):
        assert cli.main(["bomb-or", "--n", "6", "--eps", "0.1",
                         "--mode", "thm6", "--seed", "2"]) == 0

    def test_bomb_or_thm3_small(self, capsys):
        assert cli.main(["bomb-or", "--n", "4", "--eps", "0.05",
                         "--mode", "thm3", "--seed", "2"]) == 0

    def test_sssp_with_outputs(self, tmp_path, capsys):
        code = cli.main(["sssp", "--n", "8,12", "--trials", "3", "--seed", "3",
                         "--outdir", str(tmp_path)])
        assert code == 0
        assert (tmp_path / "sssp_runs.csv").exists()
        assert (tmp_path / "sssp_summary.txt").exists()
        rows = read_report_rows(tmp_path / "sssp_runs.csv")
        assert len(rows) == 6
        assert all(r["schema"] == reports.SCHEMA_ID for r in rows)

    def test_sssp_renders_fit_figure_with_four_sizes(self, tmp_path):
        code = cli.main(["sssp", "--n", "8,12,16,24", "--trials", "2",
                         "--seed", "3", "--outdir", str(tmp_path)])
        assert code == 0
        assert (tmp_path / "sssp_scaling.png").exists()

    def test_no_figures_flag(self, tmp_path):
        cli.main(["sssp", "--n", "8,12,16,24", "--trials", "2", "--seed", "3",
                  "--outdir", str(tmp_path), "--no-figures"])
        assert not (tmp_path / "sssp_scaling.png").exists()

    def test_matching_and_maxflow(self, capsys):
        assert cli.main(["matching", "--n", "8", "--trials", "3",
                         "--seed", "4"]) == 0
        assert cli.main(["maxflow", "--n", "8", "--trials", "3",
                         "--seed", "4"]) == 0

    def test_first_marked(self, capsys):
        assert cli.main(["first-marked", "--n", "128", "--d", "4,16,0",
                         "--trials", "20", "--seed", "5"]) == 0

    def test_progress_and_small(self, capsys):
        assert cli.main(["progress-and", "--n", "4", "--eps", "0.05",
                         "--seed", "6"]) == 0

    def test_fit_subcommand(self, tmp_path, capsys):
        data = tmp_path / "points.csv"
        data.write_text("size,cost\n" + "\n".join(
            f"{n},{2.5 * n ** 2}" for n in (4, 8, 16, 32)))
        code = cli.main(["fit", "--input", str(data), "--expect-min", "1.9",
                         "--expect-max", "2.1", "--outdir", str(tmp_path)])
        assert code == 0
        assert (tmp_path / "fit.png").exists()
        out = capsys.readouterr().out
        assert "2.0" in out

    def test_fit_out_of_range_fails(self, tmp_path, capsys):
        data = tmp_path / "points.csv"
        data.write_text("\n".join(f"{n},{n ** 3}" for n in (4, 8, 16, 32)))
        assert cli.main(["fit", "--input", str(data), "--expect-min", "1.9",
                         "--expect-max", "2.1"]) == 1

    def test_graph_file_input(self, tmp_path, capsys):
        g = graphs.gen_flow_network(6, 0.4, 11)
        path = tmp_path / "g.json"
        graphs.save_graph(g, path)
        assert cli.main(["maxflow", "--graph", str(path), "--trials", "1",
                         "--seed", "7"]) == 0

    def test_worker_fanout_preserves_order(self, tmp_path, monkeypatch):
        monkeypatch.setenv("BOMBSIM_WORKERS", "2")
        out1 = tmp_path / "a"
        cli.main(["sssp", "--n", "8", "--trials", "4", "--seed", "8",
                  "--outdir", str(out1), "--no-figures"])
        monkeypatch.setenv("BOMBSIM_WORKERS", "1")
        out2 = tmp_path / "b"
        cli.main(["sssp", "--n", "8", "--trials", "4", "--seed", "8",
                  "--outdir", str(out2), "--no-figures"])
        a = strip_timing((out1 / "sssp_runs.csv").read_text())
        b = strip_timing((out2 / "sssp_runs.csv").read_text())
        assert a == b


class TestDeterminism:
    @pytest.mark.parametrize("argv", [
        ["ev", "--L", "10"],
        ["bomb-or", "--n", "6", "--eps", "0.1", "--mode", "thm6"],
        ["sssp", "--n", "8,12", "--trials", "3"],
        ["first-marked", "--n", "128", "--d", "4,16", "--trials", "10"],
    ], ids=["ev", "bomb-or", "sssp", "first-marked"])
    def test_reports_reproduce_byte_identical(self, argv, tmp_path):
        paths = []
        for rep in ("x", "y"):
            out = tmp_path / rep
            code = cli.main(argv + ["--seed", "99", "--outdir", str(out),
                                    "--no-figures"])
            assert code == 0
            name = argv[0]
            paths.append(out / f"{name}_runs.csv")
        a, b = (strip_timing(p.read_text()) for p in paths)
        assert a == b
