"""Command-line interface: parsing, runners, artifacts, exit codes."""

import csv
import json
import math

import pytest

from polyaurn.cli import RunConfig, UsageError, main, parse_args, run
from polyaurn.rng import derive_replication_seed


def _summary(capsys):
    captured = capsys.readouterr()
    return json.loads(captured.out), captured.err


def _stable(summary):
    """Summary with the timing field removed, for comparisons."""
    out = dict(summary)
    out.pop("wall_time_s")
    return out


class TestParsing:
    def test_simulate_defaults(self):
        cfg = parse_args(["simulate", "--m", "2,1", "--init", "2,1",
                          "--steps", "5"])
        assert cfg.subcommand == "simulate"
        assert cfg.m == (2, 1) and cfg.initial == (2, 1)
        assert cfg.n_steps == 5
        assert cfg.seed == 0 and cfg.threads == 1
        assert cfg.criterion == "strict" and cfg.focus == 0
        assert cfg.fmt == "json" and cfg.out is None

    def test_criterion_none_disables_check(self):
        cfg = parse_args(["simulate", "--m", "1,1", "--init", "2,1",
                          "--steps", "3", "--criterion", "none"])
        assert cfg.criterion is None

    def test_all_violations_reported_together(self):
        argv = ["dominance", "--m", "1,0", "--init", "2,1", "--steps", "-3",
                "--reps", "0", "--seed", "-1"]
        with pytest.raises(UsageError) as err:
            parse_args(argv)
        message = str(err.value)
        for fragment in ("--m entries", "--steps", "--reps", "--seed"):
            assert fragment in message
        assert message.count(";") >= 3

    def test_unknown_flag_is_usage_error(self):
        with pytest.raises(UsageError):
            parse_args(["simulate", "--m", "1,1", "--init", "2,1",
                        "--steps", "1", "--bogus", "1"])

    def test_missing_required_flag(self):
        with pytest.raises(UsageError):
            parse_args(["simulate", "--init", "2,1", "--steps", "1"])

    def test_non_integer_counts(self):
        with pytest.raises(UsageError, match="comma-separated integers"):
            parse_args(["simulate", "--m", "2,x", "--init", "2,1",
                        "--steps", "1"])

    def test_dimension_mismatch(self):
        with pytest.raises(UsageError, match="dimension mismatch"):
            parse_args(["simulate", "--m", "1,1,1", "--init", "2,1",
                        "--steps", "1"])

    def test_initial_counts_checked(self):
        with pytest.raises(UsageError):
            parse_args(["simulate", "--m", "1,1,1", "--init", "2,1,0",
                        "--steps", "1"])

    def test_focus_out_of_range(self):
        with pytest.raises(UsageError, match="focus"):
            parse_args(["simulate", "--m", "1,1", "--init", "2,1",
                        "--steps", "1", "--focus", "2"])

    def test_dominance_exact_conflicts(self):
        base = ["dominance", "--m", "1,1", "--init", "2,1", "--steps", "3"]
        with pytest.raises(UsageError, match="--reps is required"):
            parse_args(base)
        with pytest.raises(UsageError, match="--dump requires"):
            parse_args(base + ["--exact", "--dump", "d.csv"])
        with pytest.raises(UsageError, match="--reps conflicts"):
            parse_args(base + ["--exact", "--reps", "10"])

    def test_path_constraints(self):
        with pytest.raises(UsageError, match="two colours"):
            parse_args(["path", "--m", "1,1,1", "--init", "3,1,1",
                        "--kb", "1", "--kw", "1"])
        with pytest.raises(UsageError, match="count_0 > count_1"):
            parse_args(["path", "--m", "2,1", "--init", "1,1",
                        "--kb", "1", "--kw", "1"])
        with pytest.raises(UsageError, match="--kb"):
            parse_args(["path", "--m", "2,1", "--init", "2,1",
                        "--kb", "-1", "--kw", "1"])

    def test_numeric_range_flags(self):
        with pytest.raises(UsageError, match="--t"):
            parse_args(["embed", "--m", "1,1", "--init", "2,1", "--t", "-1"])
        with pytest.raises(UsageError, match="--confidence"):
            parse_args(["limits", "--m", "1,1", "--init", "2,1", "--t", "1",
                        "--reps", "10", "--confidence", "1.5"])
        with pytest.raises(UsageError, match="--threads"):
            parse_args(["exact", "--m", "1,1", "--init", "2,1",
                        "--steps", "2", "--threads", "0"])

    def test_report_inputs_collected(self):
        cfg = parse_args(["report", "a.csv", "b.csv"])
        assert cfg.inputs == ("a.csv", "b.csv")

    def test_echo_excludes_environment_fields(self):
        cfg = parse_args(["dominance", "--m", "1,1", "--init", "2,1",
                          "--steps", "3", "--reps", "10", "--threads", "4",
                          "--out", "x.json", "--dump", "d.csv"])
        echo = cfg.echo()
        for hidden in ("threads", "out", "dump", "fmt"):
            assert hidden not in echo
        assert echo["replications"] == 10


class TestExactRunners:
    def test_dominance_exact_reference_curve(self, tmp_path, capsys):
        out = tmp_path / "curve.json"
        cfg = parse_args(["dominance", "--exact", "--m", "1,1",
                          "--init", "2,1", "--steps", "3",
                          "--out", str(out)])
        assert run(cfg) == 0
        summary, _ = _summary(capsys)
        assert summary["result"]["p_final"] == pytest.approx(0.6)
        assert summary["result"]["mode"] == "rational"
        payload = json.loads(out.read_text())
        assert payload["columns"] == ["n", "p", "p_exact"]
        assert [r[2] for r in payload["rows"]] == ["1", "2/3", "2/3", "3/5"]

    def test_exact_distribution_one_step(self, tmp_path, capsys):
        out = tmp_path / "law.csv"
        cfg = parse_args(["exact", "--m", "2,1", "--init", "2,1",
                          "--steps", "1", "--format", "csv",
                          "--out", str(out)])
        assert run(cfg) == 0
        summary, _ = _summary(capsys)
        assert summary["result"]["states"] == 2
        assert summary["result"]["total_probability"] == pytest.approx(1.0)
        with open(out, newline="") as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["count_0", "count_1", "probability",
                           "probability_exact"]
        assert rows[1][:2] == ["2", "2"] and rows[1][3] == "1/3"
        assert rows[2][:2] == ["4", "1"] and rows[2][3] == "2/3"
        assert float(rows[2][2]) == pytest.approx(2 / 3)

    def test_path_two_block_trajectory(self, capsys):
        cfg = parse_args(["path", "--m", "2,1", "--init", "2,1",
                          "--kb", "2", "--kw", "1"])
        assert run(cfg) == 0
        summary, _ = _summary(capsys)
        result = summary["result"]
        assert result["trajectory"] == [[2, 1], [4, 1], [6, 1], [6, 2]]
        assert result["positive_throughout"] is True
        assert result["final_counts"] == [6, 2]


class TestSimulateAndEmbed:
    def test_simulate_zero_steps(self, capsys):
        cfg = parse_args(["simulate", "--m", "1,1", "--init", "2,1",
                          "--steps", "0"])
        assert run(cfg) == 0
        summary, _ = _summary(capsys)
        result = summary["result"]
        assert result["final_counts"] == [2, 1]
        assert result["dominance_holds"] is True
        assert result["first_failure_step"] == -1

    def test_simulate_table_has_initial_row(self, tmp_path):
        out = tmp_path / "traj.csv"
        cfg = parse_args(["simulate", "--m", "2,1", "--init", "2,1",
                          "--steps", "4", "--format", "csv",
                          "--out", str(out)])
        run(cfg)
        with open(out, newline="") as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["step", "colour", "count_0", "count_1"]
        assert rows[1] == ["0", "-1", "2", "1"]
        assert len(rows) == 6
        for step, row in enumerate(rows[1:]):
            assert row[0] == str(step)

    def test_embed_scaled_counts_formula(self, tmp_path, capsys):
        out = tmp_path / "events.csv"
        cfg = parse_args(["embed", "--m", "2,1", "--init", "2,1",
                          "--t", "0.8", "--seed", "5",
                          "--format", "csv", "--out", str(out)])
        assert run(cfg) == 0
        summary, _ = _summary(capsys)
        result = summary["result"]
        final = result["final_counts"]
        for j, rate in enumerate((2.0, 1.0)):
            assert result["scaled_counts"][j] == pytest.approx(
                final[j] * math.exp(-rate * 0.8)
            )
        with open(out, newline="") as handle:
            rows = list(csv.reader(handle))
        assert len(rows) - 1 == result["events"]
        times = [float(r[1]) for r in rows[1:]]
        assert times == sorted(times)

    def test_embed_zero_horizon(self, capsys):
        cfg = parse_args(["embed", "--m", "1,1", "--init", "2,1", "--t", "0"])
        assert run(cfg) == 0
        summary, _ = _summary(capsys)
        assert summary["result"]["events"] == 0
        assert summary["result"]["final_counts"] == [2, 1]


class TestDumpAndReport:
    def test_dump_schema_and_seeds(self, tmp_path):
        dump = tmp_path / "dump.csv"
        cfg = parse_args(["dominance", "--m", "1,1", "--init", "2,1",
                          "--steps", "10", "--reps", "64", "--seed", "9",
                          "--dump", str(dump)])
        assert run(cfg) == 0
        with open(dump, newline="") as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["rep", "seed", "first_failure_step",
                           "final_count_0", "final_count_1"]
        assert len(rows) == 65
        for rep, row in enumerate(rows[1:]):
            assert int(row[0]) == rep
            assert int(row[1]) == derive_replication_seed(9, rep)
            total = int(row[3]) + int(row[4])
            assert total == 3 + 10

    def test_report_reproduces_dominance_estimate(self, tmp_path, capsys):
        dump = tmp_path / "dump.csv"
        cfg = parse_args(["dominance", "--m", "1,1", "--init", "2,1",
                          "--steps", "12", "--reps", "500", "--seed", "3",
                          "--dump", str(dump)])
        run(cfg)
        dom_summary, _ = _summary(capsys)
        rep_cfg = parse_args(["report", str(dump)])
        assert run(rep_cfg) == 0
        rep_summary, _ = _summary(capsys)
        result = rep_summary["result"]
        assert result["replications"] == 500
        assert result["estimate"] == dom_summary["result"]["p_final_estimate"]
        assert result["ci_lo"] == dom_summary["result"]["p_final_ci_lo"]
        assert result["ci_hi"] == dom_summary["result"]["p_final_ci_hi"]

    def test_report_merges_split_dumps(self, tmp_path, capsys):
        dump = tmp_path / "dump.csv"
        cfg = parse_args(["dominance", "--m", "2,1", "--init", "2,1",
                          "--steps", "8", "--reps", "100", "--seed", "1",
                          "--dump", str(dump)])
        run(cfg)
        capsys.readouterr()
        lines = dump.read_text().splitlines()
        part_a = tmp_path / "a.csv"
        part_b = tmp_path / "b.csv"
        part_a.write_text("\n".join([lines[0]] + lines[1:41]) + "\n")
        part_b.write_text("\n".join([lines[0]] + lines[41:]) + "\n")

        assert run(parse_args(["report", str(dump)])) == 0
        whole, _ = _summary(capsys)
        assert run(parse_args(["report", str(part_a), str(part_b)])) == 0
        split, _ = _summary(capsys)
        assert whole["result"] == split["result"]

    def test_report_rejects_foreign_csv(self, tmp_path, capsys):
        bad = tmp_path / "other.csv"
        bad.write_text("a,b,c\n1,2,3\n")
        assert run(parse_args(["report", str(bad)])) == 1
        _, err = capsys.readouterr()
        assert "not a per-replication dump" in err

    def test_report_missing_file(self, tmp_path, capsys):
        missing = tmp_path / "absent.csv"
        assert run(parse_args(["report", str(missing)])) == 1
        _, err = capsys.readouterr()
        assert "usage error" in err

    def test_report_mismatched_colour_counts(self, tmp_path, capsys):
        two = tmp_path / "two.csv"
        three = tmp_path / "three.csv"
        two.write_text(
            "rep,seed,first_failure_step,final_count_0,final_count_1\n"
            "0,1,-1,3,1\n"
        )
        three.write_text(
            "rep,seed,first_failure_step,final_count_0,final_count_1,"
            "final_count_2\n0,1,-1,3,1,1\n"
        )
        assert run(parse_args(["report", str(two), str(three)])) == 1
        _, err = capsys.readouterr()
        assert "colour count differs" in err


class TestExitCodesAndDeterminism:
    def test_budget_exhaustion_exits_two(self, tmp_path, capsys):
        cfg = parse_args(["dominance", "--exact", "--m", "1,1",
                          "--init", "2,1", "--steps", "200",
                          "--state-budget", "10"])
        assert run(cfg) == 2
        out, err = capsys.readouterr()
        assert out == ""
        assert "budget exceeded" in err

    def test_event_cap_exits_two(self, capsys):
        cfg = parse_args(["limits", "--m", "1,1", "--init", "2,1",
                          "--t", "4.0", "--reps", "20",
                          "--max-events", "2"])
        assert run(cfg) == 2
        _, err = capsys.readouterr()
        assert "budget exceeded" in err

    def test_unwritable_output_exits_one(self, tmp_path, capsys):
        out = tmp_path / "no_such_dir" / "x.json"
        cfg = parse_args(["path", "--m", "2,1", "--init", "2,1",
                          "--kb", "1", "--kw", "0", "--out", str(out)])
        assert run(cfg) == 1
        _, err = capsys.readouterr()
        assert "usage error" in err

    def test_main_usage_error_exits_one(self, capsys):
        assert main(["simulate", "--m", "1,1", "--init", "2,1",
                     "--steps", "-1"]) == 1
        out, err = capsys.readouterr()
        assert out == ""
        assert "usage error" in err

    def test_main_success_prints_summary(self, capsys):
        assert main(["exact", "--m", "1,1", "--init", "2,1",
                     "--steps", "2"]) == 0
        summary, _ = _summary(capsys)
        for key in ("subcommand", "config", "seed", "wall_time_s", "result"):
            assert key in summary
        assert summary["config"]["subcommand"] == "exact"
        assert "threads" not in summary["config"]

    def test_repeat_runs_byte_identical(self, tmp_path, capsys):
        artifacts = []
        summaries = []
        for tag in ("first", "second"):
            out = tmp_path / f"{tag}.json"
            cfg = parse_args(["dominance", "--m", "2,1", "--init", "2,1",
                              "--steps", "25", "--reps", "400",
                              "--seed", "77", "--out", str(out)])
            assert run(cfg) == 0
            summary, _ = _summary(capsys)
            artifacts.append(out.read_bytes())
            summaries.append(_stable(summary))
        assert artifacts[0] == artifacts[1]
        assert summaries[0] == summaries[1]

    def test_thread_count_invisible_in_output(self, tmp_path, capsys):
        artifacts = []
        summaries = []
        for threads in ("1", "8"):
            out = tmp_path / f"t{threads}.csv"
            cfg = parse_args(["dominance", "--m", "1,1", "--init", "3,1",
                              "--steps", "30", "--reps", "600",
                              "--seed", "13", "--threads", threads,
                              "--format", "csv", "--out", str(out)])
            assert run(cfg) == 0
            summary, _ = _summary(capsys)
            artifacts.append(out.read_bytes())
            summaries.append(_stable(summary))
        assert artifacts[0] == artifacts[1]
        assert summaries[0] == summaries[1]

    def test_csv_floats_roundtrip(self, tmp_path):
        out = tmp_path / "curve.csv"
        cfg = parse_args(["dominance", "--m", "1,1", "--init", "2,1",
                          "--steps", "5", "--reps", "97", "--seed", "2",
                          "--format", "csv", "--out", str(out)])
        run(cfg)
        with open(out, newline="") as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["n", "estimate", "ci_lo", "ci_hi"]
        # .17g carries full double precision, so parsing is lossless
        for row in rows[1:]:
            value = float(row[1])
            assert 0.0 <= value <= 1.0
            assert format(value, ".17g") == row[1]

    def test_limits_rows_match_replications(self, tmp_path, capsys):
        out = tmp_path / "limits.csv"
        cfg = parse_args(["limits", "--m", "2,1", "--init", "2,1",
                          "--t", "1.0", "--reps", "50", "--seed", "21",
                          "--format", "csv", "--out", str(out)])
        assert run(cfg) == 0
        summary, _ = _summary(capsys)
        result = summary["result"]
        assert len(result["scaled_means"]) == 2
        for key in ("white_below_black_estimate", "white_below_black_ci_lo",
                    "white_below_black_ci_hi"):
            assert key in result
        with open(out, newline="") as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["rep", "seed", "scaled_0", "scaled_1"]
        assert len(rows) == 51
        assert int(rows[1][1]) == derive_replication_seed(21, 0)


def test_run_config_is_frozen():
    cfg = RunConfig(subcommand="exact")
    with pytest.raises(Exception):
        cfg.subcommand = "other"
