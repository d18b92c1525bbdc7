"""Unit tests for the Monte Carlo experiment runner."""

import io
import math

import pytest

from src.harness.config import ConfigError, ExperimentConfig, Mode, RunnerConfig
from src.harness.experiment import ExperimentRunner, estimate_outage, run_experiment

GREEDY_BOUND = 1.0 - 1.0 / math.e


def mimo_config(**overrides) -> ExperimentConfig:
    fields = {
        "mode": Mode.MIMO,
        "num_antennas": 6,
        "num_tx": 2,
        "l_range": (1, 2, 3, 4),
        "trials": 12,
        "seed": 11,
    }
    fields.update(overrides)
    return ExperimentConfig(**fields)


def relay_config(**overrides) -> ExperimentConfig:
    fields = {
        "mode": Mode.RELAY,
        "num_antennas": 8,
        "l_range": (1, 3, 5, 8),
        "trials": 12,
        "seed": 5,
    }
    fields.update(overrides)
    return ExperimentConfig(**fields)


@pytest.mark.unit
class TestExperimentRunner:
    """Test ExperimentRunner aggregation and determinism."""

    async def test_one_row_per_l(self):
        """Test one row per L with no optimum columns by default."""
        rows = await ExperimentRunner(mimo_config()).run()
        assert [r.L for r in rows] == [1, 2, 3, 4]
        assert all(r.trials == 12 and r.seed == 11 for r in rows)
        assert all(r.mean_optimal is None and r.ratio is None for r in rows)

    async def test_deterministic(self):
        """Test repeated runs give equal rows."""
        first = await ExperimentRunner(mimo_config()).run()
        second = await ExperimentRunner(mimo_config()).run()
        assert first == second

    async def test_worker_count_does_not_change_rows(self):
        """Test 1 and 4 workers give equal rows."""
        serial = await ExperimentRunner(mimo_config(brute_force=True), RunnerConfig(workers=1)).run()
        pooled = await ExperimentRunner(mimo_config(brute_force=True), RunnerConfig(workers=4)).run()
        assert serial == pooled

    async def test_seed_changes_rows(self):
        """Test different seeds draw different channels."""
        a = await ExperimentRunner(mimo_config(seed=1)).run()
        b = await ExperimentRunner(mimo_config(seed=2)).run()
        assert a[0].mean_greedy != b[0].mean_greedy

    async def test_mean_greedy_non_decreasing(self):
        """Test the greedy mean grows with L."""
        rows = await ExperimentRunner(mimo_config()).run()
        means = [r.mean_greedy for r in rows]
        assert all(later >= earlier - 1e-12 for earlier, later in zip(means, means[1:]))

    async def test_mimo_ratio_within_bound(self):
        """Test the greedy/optimal ratio lies in [1 - 1/e, 1]."""
        rows = await ExperimentRunner(mimo_config(brute_force=True)).run()
        for r in rows:
            assert r.mean_optimal is not None and r.ratio is not None
            assert r.mean_optimal >= r.mean_greedy - 1e-12
            assert GREEDY_BOUND <= r.ratio <= 1.0 + 1e-9
        # One antenna: greedy picks the strongest row, which is optimal
        assert rows[0].ratio == pytest.approx(1.0, abs=1e-12)

    async def test_relay_greedy_is_optimal(self):
        """Test relay ratios are exactly 1."""
        rows = await ExperimentRunner(relay_config(brute_force=True)).run()
        for r in rows:
            assert r.mean_optimal == pytest.approx(r.mean_greedy, abs=1e-9)
            assert r.ratio == pytest.approx(1.0, abs=1e-9)

    async def test_bits_scaling(self):
        """Test bits output divides means and stderrs by ln 2."""
        nats = await ExperimentRunner(relay_config()).run()
        bits = await ExperimentRunner(relay_config(bits=True)).run()
        for n, b in zip(nats, bits):
            assert b.mean_greedy == pytest.approx(n.mean_greedy / math.log(2.0), rel=1e-12)
            assert b.stderr_greedy == pytest.approx(n.stderr_greedy / math.log(2.0), rel=1e-12)

    async def test_single_trial_has_zero_stderr(self):
        """Test one trial reports stderr 0."""
        rows = await ExperimentRunner(relay_config(trials=1)).run()
        assert all(r.stderr_greedy == 0.0 for r in rows)

    async def test_budget_skips_large_l(self):
        """Test L = 6 of 12 is skipped under a budget of 100."""
        cfg = mimo_config(num_antennas=12, l_range=(1, 6), trials=2, brute_force=True)
        runner = ExperimentRunner(cfg, RunnerConfig(enumeration_budget=100))
        assert runner.skipped_l == [6]
        rows = await runner.run()
        assert rows[0].mean_optimal is not None
        assert rows[1].mean_optimal is None and rows[1].ratio is None
        assert runner.budget_comments() == [
            "brute force disabled for L=6: C(12,6)=924 exceeds budget 100"
        ]

    async def test_get_info(self):
        """Test get_info reports config and metrics."""
        runner = ExperimentRunner(relay_config(brute_force=True), RunnerConfig(workers=2))
        await runner.run()
        info = runner.get_info()
        assert info["config"]["mode"] == "relay"
        assert info["config"]["workers"] == 2
        assert info["metrics"]["trials_run"] == 12
        assert info["metrics"]["brute_force_evaluations"] == 12 * 4
        assert info["metrics"]["skipped_l"] == []
        assert info["metrics"]["elapsed"] > 0.0


@pytest.mark.unit
class TestOutage:
    """Test outage probability estimation."""

    async def test_zero_rate_never_outage(self):
        """Test R = 0 gives outage 0."""
        rows = await ExperimentRunner(mimo_config()).run_outage(0.0)
        assert all(r.outage == 0.0 and r.stderr == 0.0 for r in rows)

    async def test_huge_rate_always_outage(self):
        """Test a huge R gives outage 1."""
        rows = await ExperimentRunner(relay_config()).run_outage(1e6)
        assert all(r.outage == 1.0 for r in rows)

    async def test_outage_non_increasing_in_l(self):
        """Test outage falls as L grows."""
        rows = await ExperimentRunner(mimo_config(trials=40)).run_outage(1.0)
        probs = [r.outage for r in rows]
        assert all(later <= earlier for earlier, later in zip(probs, probs[1:]))
        assert all(0.0 <= p <= 1.0 for p in probs)

    async def test_stderr_is_binomial(self):
        """Test stderr = sqrt(p(1-p)/n)."""
        rows = await ExperimentRunner(mimo_config(trials=40)).run_outage(1.0)
        for r in rows:
            assert r.stderr == pytest.approx(math.sqrt(r.outage * (1.0 - r.outage) / 40))

    async def test_estimates_agree_across_seeds(self):
        """Nr=8, Nt=2, L=2, P=1, R=1 nat: two seeds agree within 3 binomial stderr."""
        estimates = []
        for seed in (0, 1):
            cfg = mimo_config(num_antennas=8, num_tx=2, l_range=(2,), power=1.0, trials=500, seed=seed)
            (row,) = await estimate_outage(cfg, 1.0)
            estimates.append(row)
        a, b = estimates
        assert 0.0 < a.outage < 1.0
        assert abs(a.outage - b.outage) <= 3.0 * math.hypot(a.stderr, b.stderr)

    async def test_rate_reported_in_output_unit(self):
        """Test ln 2 nats is reported as 1 bit."""
        rows = await ExperimentRunner(mimo_config(bits=True)).run_outage(math.log(2.0))
        assert rows[0].rate == pytest.approx(1.0)

    async def test_outage_skips_brute_force(self):
        """Test outage never enumerates."""
        runner = ExperimentRunner(mimo_config(brute_force=True))
        await runner.run_outage(1.0)
        assert runner.get_info()["metrics"]["brute_force_evaluations"] == 0

    @pytest.mark.parametrize("rate", [-1.0, math.inf, math.nan])
    async def test_invalid_rate(self, rate):
        """Test negative and non-finite rates are rejected."""
        with pytest.raises(ConfigError):
            await ExperimentRunner(mimo_config()).run_outage(rate)

    async def test_estimate_needs_rate(self):
        """Test a missing rate is a config error."""
        with pytest.raises(ConfigError):
            await estimate_outage(mimo_config())

    async def test_estimate_uses_config_rate(self):
        """Test the config rate is used when none is passed."""
        from_cfg = await estimate_outage(mimo_config(outage_rate=1.0))
        explicit = await estimate_outage(mimo_config(), 1.0)
        assert from_cfg == explicit


@pytest.mark.unit
class TestOutputFiles:
    """Test CSV output to files and streams."""

    async def test_run_experiment_writes_csv(self, tmp_path):
        """Test the budget comment precedes the header."""
        out = tmp_path / "result.csv"
        cfg = mimo_config(num_antennas=12, l_range=(1, 6), trials=2, brute_force=True, output_path=out)
        rows = await run_experiment(cfg, RunnerConfig(enumeration_budget=100))
        lines = out.read_text().splitlines()
        assert lines[0].startswith("# brute force disabled for L=6")
        assert lines[1] == "mode,L,trials,mean_greedy,stderr_greedy,mean_optimal,stderr_optimal,ratio,seed"
        assert len(lines) == 2 + len(rows)

    async def test_repeated_runs_are_byte_identical(self, tmp_path):
        """Test default and 3-worker runs write identical bytes."""
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        await run_experiment(relay_config(brute_force=True, output_path=a))
        await run_experiment(relay_config(brute_force=True, output_path=b), RunnerConfig(workers=3))
        assert a.read_bytes() == b.read_bytes()

    async def test_estimate_outage_writes_csv(self, tmp_path):
        """Test the outage CSV header and row count."""
        out = tmp_path / "outage.csv"
        await estimate_outage(relay_config(output_path=out), 0.5)
        lines = out.read_text().splitlines()
        assert lines[0] == "mode,L,trials,rate,outage,stderr,seed"
        assert len(lines) == 5

    async def test_stream_receives_csv_when_no_path(self):
        """Test the CSV goes to the stream without an output path."""
        stream = io.StringIO()
        cfg = mimo_config(num_antennas=12, l_range=(1, 6), trials=2, brute_force=True)
        await run_experiment(cfg, RunnerConfig(enumeration_budget=100), stream=stream)
        assert stream.getvalue().startswith("# brute force disabled for L=6")

    async def test_stream_ignored_when_path_set(self, tmp_path):
        """Test the stream stays empty when a path is set."""
        stream = io.StringIO()
        await estimate_outage(relay_config(output_path=tmp_path / "o.csv"), 0.5, stream=stream)
        assert stream.getvalue() == ""
