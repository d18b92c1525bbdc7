"""End-to-end tests of the ``antsel`` command line."""

import csv
import io

import pytest

from src.cli import EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_OK, main
from src.harness import suites
from src.harness.suites import SuiteResult


def parse_csv(text: str) -> list[dict[str, str]]:
    body = "\n".join(line for line in text.splitlines() if not line.startswith("#"))
    return list(csv.DictReader(io.StringIO(body)))


@pytest.mark.e2e
class TestExperimentCommands:
    """Test the mimo and relay subcommands."""

    def test_relay_to_stdout(self, capsys):
        """Test relay CSV on stdout with ratio 1 for every L."""
        code = main(["relay", "--n", "6", "--l", "1..3", "--trials", "8", "--brute-force"])
        assert code == EXIT_OK
        rows = parse_csv(capsys.readouterr().out)
        assert [r["L"] for r in rows] == ["1", "2", "3"]
        assert all(r["mode"] == "relay" for r in rows)
        assert all(float(r["ratio"]) == pytest.approx(1.0, abs=1e-9) for r in rows)

    def test_mimo_default_l_range_and_empty_optimum(self, capsys):
        """Test --l defaults to 1..Nr and optimum cells stay empty."""
        code = main(["mimo", "--nr", "4", "--nt", "2", "--trials", "5", "--seed", "9"])
        assert code == EXIT_OK
        rows = parse_csv(capsys.readouterr().out)
        assert [r["L"] for r in rows] == ["1", "2", "3", "4"]
        assert all(r["mean_optimal"] == "" and r["ratio"] == "" for r in rows)
        assert all(r["seed"] == "9" for r in rows)

    def test_mimo_to_file(self, tmp_path, capsys):
        """Test --out writes the file and leaves stdout empty."""
        out = tmp_path / "mimo.csv"
        code = main(
            ["mimo", "--nr", "5", "--nt", "2", "--l", "2", "--trials", "4", "--out", str(out)]
        )
        assert code == EXIT_OK
        assert capsys.readouterr().out == ""
        rows = parse_csv(out.read_text())
        assert len(rows) == 1 and rows[0]["L"] == "2"

    def test_budget_comment_on_stdout(self, capsys):
        """Test the budget comment leads the stdout CSV."""
        code = main(
            ["mimo", "--nr", "8", "--nt", "2", "--l", "1,4", "--trials", "2", "--brute-force", "--budget", "10"]
        )
        assert code == EXIT_OK
        out = capsys.readouterr().out
        assert out.startswith("# brute force disabled for L=4: C(8,4)=70 exceeds budget 10\n")
        rows = parse_csv(out)
        assert rows[0]["mean_optimal"] != ""
        assert rows[1]["mean_optimal"] == ""

    def test_repeat_runs_identical(self, capsys):
        """Test output does not depend on --workers."""
        argv = ["mimo", "--nr", "6", "--nt", "3", "--trials", "6", "--brute-force", "--seed", "4"]
        assert main(argv) == EXIT_OK
        first = capsys.readouterr().out
        assert main([*argv, "--workers", "3"]) == EXIT_OK
        assert capsys.readouterr().out == first

    def test_bits_flag(self, capsys):
        """Test --bits divides the means by ln 2."""
        main(["relay", "--n", "4", "--l", "2", "--trials", "6"])
        nats = float(parse_csv(capsys.readouterr().out)[0]["mean_greedy"])
        main(["relay", "--n", "4", "--l", "2", "--trials", "6", "--bits"])
        bits = float(parse_csv(capsys.readouterr().out)[0]["mean_greedy"])
        assert bits == pytest.approx(nats / 0.6931471805599453, rel=1e-12)


@pytest.mark.e2e
class TestOutageCommand:
    """Test the outage subcommand."""

    def test_zero_rate(self, capsys):
        """Test R = 0 gives outage 0 for every L."""
        code = main(["outage", "--mode", "relay", "--n", "4", "--rate", "0", "--trials", "10"])
        assert code == EXIT_OK
        rows = parse_csv(capsys.readouterr().out)
        assert len(rows) == 4
        assert all(float(r["outage"]) == 0.0 for r in rows)

    def test_rate_in_bits(self, capsys):
        """Test --rate is read and reported in bits with --bits."""
        code = main(
            ["outage", "--nr", "3", "--nt", "2", "--l", "1", "--rate", "1000", "--bits", "--trials", "5"]
        )
        assert code == EXIT_OK
        row = parse_csv(capsys.readouterr().out)[0]
        assert float(row["rate"]) == pytest.approx(1000.0)
        assert float(row["outage"]) == 1.0

    def test_negative_rate(self):
        """Test a negative rate exits with 2."""
        assert main(["outage", "--mode", "relay", "--n", "3", "--rate", "-1"]) == EXIT_CONFIG


@pytest.mark.e2e
class TestConfigErrors:
    """Test configuration errors map to exit code 2."""

    @pytest.mark.parametrize(
        "argv",
        [
            ["mimo", "--nr", "4", "--trials", "2"],
            ["mimo", "--nr", "4", "--nt", "2", "--l", "3..1"],
            ["mimo", "--nr", "4", "--nt", "2", "--l", "5"],
            ["relay", "--n", "4", "--trials", "0"],
            ["relay", "--n", "4", "--workers", "-2"],
            ["mimo", "--nr", "4", "--nt", "2", "--power", "0"],
            ["relay", "--n", "4", "--trials", "1", "--fading", "rician", "--k-factor", "inf"],
            ["check", "--suite", "checker-discrimination", "--seed", "-1"],
        ],
    )
    def test_exit_code_two(self, argv, capsys):
        """Test each invalid command line exits 2 with nothing on stdout."""
        assert main(argv) == EXIT_CONFIG
        captured = capsys.readouterr()
        assert captured.out == ""
        assert "Invalid configuration" in captured.err

    def test_unknown_subcommand(self):
        """Test argparse rejects an unknown subcommand with 2."""
        with pytest.raises(SystemExit) as exc_info:
            main(["transmit"])
        assert exc_info.value.code == 2


@pytest.mark.e2e
class TestCounterexampleCommand:
    """Test the counterexample subcommand."""

    def test_prints_all_relations(self, capsys):
        """Test the >, = and < lines and the summary."""
        assert main(["counterexample"]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "single-antenna-wins: h=(1, 0) P=1 C1=0.6931 > C2=0.4055 nats"
        assert " = " in lines[1]
        assert " < " in lines[2]
        assert lines[-1] == "both directions witnessed: yes"

    def test_bits(self, capsys):
        """Test --bits reports C1 = 1 bit."""
        main(["counterexample", "--bits"])
        first = capsys.readouterr().out.splitlines()[0]
        assert first == "single-antenna-wins: h=(1, 0) P=1 C1=1.0000 > C2=0.5850 bits"


@pytest.mark.e2e
class TestCheckCommand:
    """Test the check subcommand."""

    def test_passing_suite(self, capsys):
        """Test passing suites print PASS and exit 0."""
        code = main(["check", "--suite", "transmit-nonmonotone", "--suite", "checker-discrimination"])
        assert code == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0].startswith("PASS transmit-nonmonotone")
        assert lines[1].startswith("PASS checker-discrimination")

    def test_failing_suite_exit_code(self, monkeypatch, capsys):
        """Test a failing suite prints FAIL and exits 3."""

        def broken(seed: int) -> SuiteResult:
            return SuiteResult(
                name="checker-discrimination",
                passed=False,
                instances=1,
                detail="forced",
                failures=("instance 0: forced failure",),
            )

        monkeypatch.setitem(suites.SUITES, "checker-discrimination", broken)
        assert main(["check", "--suite", "checker-discrimination"]) == EXIT_CHECK_FAILED
        out = capsys.readouterr().out
        assert out.startswith("FAIL checker-discrimination")
        assert "forced failure" in out

    def test_unknown_suite(self):
        """Test argparse rejects an unknown suite name."""
        with pytest.raises(SystemExit):
            main(["check", "--suite", "no-such-suite"])
