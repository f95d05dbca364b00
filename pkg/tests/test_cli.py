import io
import json
import subprocess
import sys

import pytest

from rareval import load_campaign
from rareval.cli import dispatch

TOY_RUNS = {
    "A": ["d1", "d2", "d4"],
    "B": ["d1", "d3", "d5"],
    "C": ["d1", "d2", "d6"],
    "D": ["d1", "d4", "d5"],
}
TOY_QRELS = "t1 0 d1 1\nt1 0 d2 1\nt1 0 d3 1\n"


@pytest.fixture
def toy_files(tmp_path):
    paths = []
    for system, docs in TOY_RUNS.items():
        lines = [
            f"t1 Q0 {doc} {i + 1} {float(len(docs) - i)} {system}"
            for i, doc in enumerate(docs)
        ]
        path = tmp_path / f"{system}.run"
        path.write_text("\n".join(lines) + "\n")
        paths.append(str(path))
    qrels = tmp_path / "qrels.txt"
    qrels.write_text(TOY_QRELS)
    return paths, str(qrels)


def run_cli(argv, capsys):
    code = dispatch(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestEval:
    def test_happy_path_tsv(self, toy_files, capsys):
        runs, qrels = toy_files
        code, out, _ = run_cli(
            ["eval", "--runs", *runs, "--qrels", qrels,
             "--metric", "P@3_rareness", "--alpha", "1"],
            capsys,
        )
        assert code == 0
        rows = [line.split("\t") for line in out.strip().splitlines()]
        assert all(r[0] == "P@3_rareness(alpha=1,rarity=eq2)" for r in rows)
        by_system = {r[1]: r[3] for r in rows}
        assert by_system["B"] == "0.9167"
        assert all(r[2] == "ALL" for r in rows)

    def test_directory_input(self, toy_files, tmp_path, capsys):
        _, qrels = toy_files
        code, out, _ = run_cli(
            ["eval", "--runs", str(tmp_path), "--qrels", qrels, "--metric", "P@3"],
            capsys,
        )
        # the qrels file sits in the same directory and is not a run file
        assert code == 1

    def test_unknown_metric_exits_2_and_lists_names(self, toy_files, capsys):
        runs, qrels = toy_files
        code, _, err = run_cli(
            ["eval", "--runs", *runs, "--qrels", qrels, "--metric", "nDCG@10"],
            capsys,
        )
        assert code == 2
        assert "valid names" in err

    def test_missing_file_exits_1(self, toy_files, capsys):
        runs, _ = toy_files
        code, _, err = run_cli(
            ["eval", "--runs", *runs, "--qrels", "nope.txt", "--metric", "AP"],
            capsys,
        )
        assert code == 1
        assert "error" in err

    def test_malformed_run_exits_1_with_line(self, tmp_path, toy_files, capsys):
        _, qrels = toy_files
        bad = tmp_path / "bad.run"
        bad.write_text("t1 Q0 d1 1 9.5\n")
        code, _, err = run_cli(
            ["eval", "--runs", str(bad), "--qrels", qrels, "--metric", "AP"], capsys
        )
        assert code == 1
        assert ":1" in err

    def test_usage_error_exits_2(self, capsys):
        code, _, _ = run_cli(["eval", "--qrels", "q"], capsys)
        assert code == 2

    def test_stdin_runs(self, toy_files, capsys, monkeypatch):
        _, qrels = toy_files
        text = "t1 Q0 d1 1 2.0 solo\nt1 Q0 d9 2 1.0 solo\n"
        monkeypatch.setattr(sys, "stdin", io.StringIO(text))
        code, out, _ = run_cli(
            ["eval", "--runs", "-", "--qrels", qrels, "--metric", "P@2"], capsys
        )
        assert code == 0
        assert "solo\tALL\t0.5000" in out

    def test_per_topic_rows(self, toy_files, capsys):
        runs, qrels = toy_files
        code, out, _ = run_cli(
            ["eval", "--runs", *runs, "--qrels", qrels, "--metric", "P@3",
             "--per-topic"],
            capsys,
        )
        assert code == 0
        topics = {line.split("\t")[2] for line in out.strip().splitlines()}
        assert topics == {"ALL", "t1"}

    def test_json_matches_tsv_to_displayed_precision(self, toy_files, capsys):
        runs, qrels = toy_files
        argv = ["eval", "--runs", *runs, "--qrels", qrels, "--metric", "AP_rareness",
                "--alpha", "0.5"]
        code, tsv_out, _ = run_cli(argv, capsys)
        assert code == 0
        code, json_out, _ = run_cli(argv + ["--json"], capsys)
        assert code == 0
        payload = json.loads(json_out)
        tsv_rows = [line.split("\t") for line in tsv_out.strip().splitlines()]
        assert len(payload["rows"]) == len(tsv_rows)
        for row, tsv_row in zip(payload["rows"], tsv_rows):
            assert f"{row['score']:.4f}" == tsv_row[3]

    def test_dedup_first_flag(self, tmp_path, toy_files, capsys):
        _, qrels = toy_files
        dup = tmp_path / "dup.run"
        dup.write_text("t1 Q0 d1 1 2.0 s\nt1 Q0 d1 2 1.0 s\n")
        code, _, _ = run_cli(
            ["eval", "--runs", str(dup), "--qrels", qrels, "--metric", "P@1"], capsys
        )
        assert code == 1
        code, out, _ = run_cli(
            ["eval", "--runs", str(dup), "--qrels", qrels, "--metric", "P@1",
             "--dedup", "first"],
            capsys,
        )
        assert code == 0
        assert "1.0000" in out

    def test_byte_identical_reruns(self, toy_files, capsys):
        runs, qrels = toy_files
        argv = ["eval", "--runs", *runs, "--qrels", qrels, "--metric",
                "P@3_rareness", "--alpha", "0.5"]
        _, first, _ = run_cli(argv, capsys)
        _, second, _ = run_cli(argv, capsys)
        assert first == second


class TestCompare:
    def test_alpha_zero_row_is_exactly_one(self, toy_files, capsys):
        runs, qrels = toy_files
        code, out, _ = run_cli(
            ["compare", "--runs", *runs, "--qrels", qrels, "--alphas", "0,0.5,1",
             "--cutoff", "3"],
            capsys,
        )
        assert code == 0
        rows = [line.split("\t") for line in out.strip().splitlines()]
        zero_rows = [r for r in rows if r[0] == "0.0000"]
        assert len(zero_rows) == 2  # both metric families
        assert all(r[2] == "1.0000" for r in zero_rows)


class TestReport:
    def test_toy_report_golden(self, toy_files, capsys):
        runs, qrels = toy_files
        code, out, _ = run_cli(
            ["report", "--runs", *runs, "--qrels", qrels, "--topic", "t1"], capsys
        )
        assert code == 0
        assert out.splitlines() == [
            "t1\td3\t1\t1\t0.7500",
            "t1\td2\t1\t2\t0.5000",
            "t1\td1\t1\t4\t0.0000",
        ]

    def test_revised_variant(self, toy_files, capsys):
        runs, qrels = toy_files
        code, out, _ = run_cli(
            ["report", "--runs", *runs, "--qrels", qrels, "--rarity", "revised"],
            capsys,
        )
        assert code == 0
        assert out.splitlines()[0] == "t1\td3\t1\t1\t1.0000"


class TestSynthCommand:
    def test_written_files_load_back_identically(self, tmp_path, capsys):
        out_dir = tmp_path / "campaign"
        argv = ["synth", "--systems", "4", "--topics", "2", "--relevant", "6",
                "--pool", "80", "--depth", "10", "--bias", "0.5",
                "--seed", "11", "--out", str(out_dir)]
        code, out, _ = run_cli(argv, capsys)
        assert code == 0
        paths = out.strip().splitlines()
        assert len(paths) == 5
        run_paths = [p for p in paths if p.endswith(".run")]
        qrels_path = [p for p in paths if p.endswith("qrels.txt")][0]
        campaign = load_campaign(run_paths, qrels_path)

        from rareval import SynthSpec, generate_campaign

        reference = generate_campaign(
            SynthSpec(4, 2, 6, 80, overlap_bias=0.5, run_depth=10, seed=11)
        )
        assert campaign.qrels.judgments == reference.qrels.judgments
        for loaded, generated in zip(campaign.runs, reference.runs):
            assert loaded == generated


class TestStabilityCommand:
    def test_thread_counts_do_not_change_output(self, toy_files, capsys):
        runs, qrels = toy_files
        base = ["stability", "--runs", *runs, "--qrels", qrels, "--cutoff", "3",
                "--metric", "P@3_rareness(alpha=1)", "--trials", "50",
                "--sample-size", "1", "--per-pair"]
        _, one, _ = run_cli(base + ["--threads", "1"], capsys)
        _, four, _ = run_cli(base + ["--threads", "4"], capsys)
        assert one == four
        assert one.startswith("P@3_rareness(alpha=1,rarity=eq2)\toverall\t")

    def test_env_threads_override(self, toy_files, capsys, monkeypatch):
        runs, qrels = toy_files
        monkeypatch.setenv("RAREVAL_THREADS", "2")
        code, out, _ = run_cli(
            ["stability", "--runs", *runs, "--qrels", qrels, "--cutoff", "3",
             "--metric", "P@3", "--trials", "20", "--sample-size", "1"],
            capsys,
        )
        assert code == 0
        assert out.startswith("P@3\toverall\t")


class TestSubsetCommand:
    def test_full_size_row_is_one(self, toy_files, capsys):
        runs, qrels = toy_files
        code, out, _ = run_cli(
            ["subset", "--runs", *runs, "--qrels", qrels, "--cutoff", "3",
             "--sizes", "2,4", "--trials", "30"],
            capsys,
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0].startswith("2\t")
        assert lines[1] == "4\t1.0000\t30"


class TestTrajectoryCommand:
    def test_rows_and_json_d_star(self, toy_files, capsys):
        runs, qrels = toy_files
        argv = ["trajectory", "--runs", *runs, "--qrels", qrels, "--cutoff", "3",
                "--kind", "common", "--topic", "t1", "--alphas", "0,1",
                "--d-max", "3"]
        code, out, err = run_cli(argv, capsys)
        assert code == 0
        rows = [line.split("\t") for line in out.strip().splitlines()]
        assert len(rows) == 6
        assert rows[0][:2] == ["0.0000", "1"]
        assert "d_star" in err
        code, json_out, _ = run_cli(argv + ["--json"], capsys)
        payload = json.loads(json_out)
        assert set(payload["d_star"]) == {"0.0", "1.0"}


class TestDiscpowerCommand:
    def test_table_shape(self, tmp_path, capsys):
        out_dir = tmp_path / "c"
        code, out, _ = run_cli(
            ["synth", "--systems", "4", "--topics", "3", "--relevant", "6",
             "--pool", "60", "--depth", "10", "--out", str(out_dir)],
            capsys,
        )
        assert code == 0
        paths = out.strip().splitlines()
        runs = [p for p in paths if p.endswith(".run")]
        qrels = [p for p in paths if p.endswith("qrels.txt")][0]
        code, out, _ = run_cli(
            ["discpower", "--runs", *runs, "--qrels", qrels, "--cutoff", "10"],
            capsys,
        )
        assert code == 0
        rows = [line.split("\t") for line in out.strip().splitlines()]
        assert len(rows) == 12  # six table metrics x two levels
        assert {r[1] for r in rows} == {"95%", "99%"}
        assert all(r[3] == "6" for r in rows)  # C(4,2) pairs

    def test_single_topic_campaign_is_a_data_error(self, toy_files, capsys):
        runs, qrels = toy_files
        code, _, err = run_cli(
            ["discpower", "--runs", *runs, "--qrels", qrels, "--cutoff", "3"],
            capsys,
        )
        assert code == 1
        assert "2 systems and 2 topics" in err


class TestConsoleEntryPoint:
    def test_module_invocation(self, toy_files):
        runs, qrels = toy_files
        result = subprocess.run(
            [sys.executable, "-m", "rareval", "eval", "--runs", *runs,
             "--qrels", qrels, "--metric", "P@3"],
            capture_output=True,
            text=True,
        )
        assert result.returncode == 0
        assert "B\tALL\t0.6667" in result.stdout
