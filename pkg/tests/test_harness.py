import json
import math

import numpy as np
import pytest

from beamlearn.baselines import run_eps_greedy_grid, run_ucb1_grid
from beamlearn.blb import HolderParams, build_grid, run_blb
from beamlearn.channel import Environment, PlanarArrayConfig, expected_cost, expected_costs
from beamlearn.cli import main
from beamlearn.errors import ConfigError, ContractViolation, InputDomainError
from beamlearn.harness import (
    ScenarioConfig,
    build_environment,
    cumulative_regret,
    dump_config,
    holder_probe,
    load_config,
    oracle_optimal,
    oracle_series,
    parse_config_text,
    regret_exponent_fit,
    run_experiment,
    seed_streams,
    sweep,
)
from beamlearn.harness.experiment import SweepError, read_trace_csv, report, trace_csv
from beamlearn.harness.scenario import elevation_changes, load_change_file, parse_change_spec
from beamlearn.harness.tracking import converged_fraction, elevation_gap, reconvergence_events
from beamlearn.trace import CSV_COLUMNS
from conftest import aligned_single_path

SMALL = ScenarioConfig(horizon=500, oracle_resolution=64)


class TestOracle:
    def test_aligned_single_path(self, single_path_env):
        s, value = oracle_optimal(single_path_env)
        assert value == pytest.approx(1.0, abs=1e-3)
        # the response depends on (sin az sin el, cos el), so the AoA has
        # four images; the oracle must sit within one fine cell of one of them
        cell = math.hypot(2 * math.pi / 5120, math.pi / 2560)
        images = [(1.0, 0.6), (math.pi - 1.0, 0.6), (math.pi + 1.0, -0.6), (2 * math.pi - 1.0, -0.6)]
        assert min(math.hypot(s.azimuth - a, s.elevation - e) for a, e in images) <= cell

    def test_resolution_doubling(self, default_env):
        values = [oracle_optimal(default_env, r)[1] for r in (16, 32, 64, 128, 256, 512)]
        assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))

    def test_zero_power(self):
        base = aligned_single_path()
        env = Environment(base.channel, base.precoder, 0.0, reward_cap=1.0)
        assert oracle_optimal(env, 16)[1] == 0.0

    def test_bad_resolution(self, default_env):
        with pytest.raises(InputDomainError):
            oracle_optimal(default_env, 1)

    def test_dominance(self, default_env):
        value = oracle_optimal(default_env)[1]
        rng = np.random.default_rng(0)
        az, el = rng.uniform(0, 2 * math.pi, 200_000), rng.uniform(-math.pi / 2, math.pi / 2, 200_000)
        assert expected_costs(default_env, az, el).max() <= value + 1e-6
        for algo in (run_blb(default_env, 5000, rng=rng), run_ucb1_grid(default_env, 2000, 20, rng)):
            assert algo.expected_cost.max() <= value + 1e-6

    def test_series_recomputed_after_change(self):
        cfg = SMALL.replace(change_schedule="elevation:200")
        schedule = build_environment(cfg)
        values, points = oracle_series(schedule, 500, 64)
        assert [p[0] for p in points] == [1, 201, 401]
        for start, s, v in points:
            assert values[start - 1] == v
            assert expected_cost(schedule.at(start), s) == pytest.approx(v, abs=1e-12)


class TestRegret:
    def test_zero_when_optimal(self):
        assert np.all(cumulative_regret(None, 0.7, np.full(50, 0.7)) == 0)

    def test_constant_gap(self):
        np.testing.assert_allclose(cumulative_regret(None, 0.5, np.full(10, 0.2)), 0.3 * np.arange(1, 11))

    def test_per_step_oracle(self):
        oracle = np.r_[np.full(5, 1.0), np.full(5, 0.5)]
        np.testing.assert_allclose(cumulative_regret(None, oracle, np.full(10, 0.5))[-1], 2.5)

    def test_mismatch(self, single_path_env):
        trace = run_blb(single_path_env, 10, rng=np.random.default_rng(0))
        with pytest.raises(ContractViolation):
            cumulative_regret(trace, 1.0, np.zeros(9))
        with pytest.raises(ContractViolation):
            cumulative_regret(None, np.ones(3), np.zeros(4))

    def test_stationary_nondecreasing(self):
        result = run_experiment(ScenarioConfig(horizon=3000))
        assert np.all(np.diff(result.trace.cum_regret) >= -1e-6)

    @pytest.mark.parametrize("power", [0.75, 1.0])
    def test_exponent_fit(self, power):
        t = np.arange(1, 10_001, dtype=float)
        assert regret_exponent_fit(t**power, (10, 10_000)) == pytest.approx(power, abs=1e-6)

    def test_exponent_fit_drops_nonpositive(self):
        r = np.arange(1, 1001, dtype=float) ** 0.75
        r[::3] = 0.0
        assert regret_exponent_fit(r, (1, 1000)) == pytest.approx(0.75, abs=1e-6)
        with pytest.raises(InputDomainError):
            regret_exponent_fit(np.zeros(100), (1, 100))

    @pytest.mark.slow
    def test_average_regret_halves(self):
        """Mean R_n / n at n = 2e4 is at most half of its value at n / 10 (20 seeds)."""
        n = 20_000
        rep = sweep(ScenarioConfig(horizon=n), range(20))
        reg = rep.mean_regret
        print(f"R_n/n={reg[-1] / n:.4f}  R_(n/10)/(n/10)={reg[n // 10 - 1] / (n // 10):.4f}")
        assert reg[-1] / n <= 0.5 * reg[n // 10 - 1] / (n // 10)


class TestHolder:
    def test_report(self, default_env):
        rep = holder_probe(default_env, 2000, 0.05, rng=np.random.default_rng(0))
        assert np.all(rep.distances > 0) and np.all(rep.distances <= 0.05 + 1e-15)
        assert rep.max_ratio == rep.ratios.max() and len(rep.lines()) >= 3

    def test_zero_distance_excluded(self, default_env):
        # all pairs pinned to the corner collapse onto one point after clipping
        rep = holder_probe(default_env, 500, 1e-300, rng=np.random.default_rng(1))
        assert np.all(rep.distances > 0) and np.all(np.isfinite(rep.ratios))

    def test_power_scaling(self, default_env):
        scaled = default_env.with_tx_power(default_env.tx_power * 3.0, keep_cap=False)
        a = holder_probe(default_env, 3000, 0.05, rng=np.random.default_rng(2))
        b = holder_probe(scaled, 3000, 0.05, rng=np.random.default_rng(2))
        np.testing.assert_allclose(b.ratios, a.ratios, rtol=1e-12, atol=1e-12)
        ua = holder_probe(default_env, 3000, 0.05, rng=np.random.default_rng(2), normalized=False)
        ub = holder_probe(scaled, 3000, 0.05, rng=np.random.default_rng(2), normalized=False)
        np.testing.assert_allclose(ub.ratios, 3.0 * ua.ratios, rtol=1e-10)

    def test_bad_delta(self, default_env):
        with pytest.raises(InputDomainError):
            holder_probe(default_env, 10, 0.0)


class TestConfig:
    def test_defaults(self):
        cfg = ScenarioConfig()
        assert (cfg.num_paths, cfg.mean_path_power, cfg.snr_db) == (5, 1.0, -20.0)
        assert cfg.first_path_aoa == (math.pi / 3, math.pi / 3)
        assert cfg.holder == HolderParams(4.0, 1.0)
        assert (cfg.epsilon0, cfg.window, cfg.bs_config.spacing_ratio) == (0.9, 250, 0.5)
        assert cfg.bs_config.size == 64 and cfg.ue_config.size == 16
        assert cfg.tx_power == pytest.approx(0.01)

    def test_roundtrip(self, tmp_path):
        cfg = ScenarioConfig(ue_config=PlanarArrayConfig(8, 8, 0.4), algorithm="eps-greedy-grid", seed=2**63 + 5)
        path = tmp_path / "a.cfg"
        path.write_text(dump_config(cfg))
        assert load_config(path) == cfg

    def test_overrides_win(self, tmp_path):
        path = tmp_path / "a.cfg"
        path.write_text("horizon = 300  # short\nalgorithm = ucb1-grid\n")
        cfg = load_config(path, {"horizon": 40})
        assert cfg.horizon == 40 and cfg.algorithm == "ucb1-grid"

    @pytest.mark.parametrize(
        "text",
        ["bogus = 1", "horizon 10", "horizon = ten", "horizon = 1\nhorizon = 2", "ue_config = 4by4", "holder = 4, 2"],
    )
    def test_malformed(self, text):
        with pytest.raises(ConfigError):
            ScenarioConfig(**parse_config_text(text))

    @pytest.mark.parametrize("changes", [{"algorithm": "zooming"}, {"window": 7}, {"horizon": 0}, {"seed": -1}])
    def test_invalid_values(self, changes):
        with pytest.raises(ConfigError):
            ScenarioConfig(**changes)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "nope.cfg")

    def test_change_specs(self):
        assert parse_change_spec("none") == ("none", None)
        assert parse_change_spec("elevation:2000") == ("elevation", 2000)
        for bad in ("elevation:0", "elevation:x", "azimuth:5", "file:"):
            with pytest.raises(ConfigError):
                parse_change_spec(bad)

    def test_elevation_changes(self):
        env_paths = build_environment(SMALL).envs[0].channel.paths
        sched = elevation_changes(list(env_paths), 2000, 10_000, np.random.default_rng(0))
        assert sched.steps == [2001, 4001, 6001, 8001]
        for _, paths in sched.entries:
            assert -math.pi / 2 <= paths[0].aoa_elevation <= math.pi / 2
            assert paths[0].aoa_azimuth == env_paths[0].aoa_azimuth
            assert paths[1:] == tuple(env_paths[1:])

    def test_change_file(self, tmp_path):
        entry = {"step": 5, "paths": [dict(gain_re=1, gain_im=0, aoa_azimuth=1, aoa_elevation=0.2, aod_azimuth=2, aod_elevation=0.1)]}
        path = tmp_path / "c.json"
        path.write_text(json.dumps([entry]))
        assert load_change_file(path).steps == [5]
        schedule = build_environment(SMALL.replace(change_schedule=f"file:{path}"))
        assert schedule.starts == (1, 5) or list(schedule.starts) == [1, 5]
        path.write_text("[{}]")
        with pytest.raises(ConfigError):
            load_change_file(path)

    def test_streams_independent(self):
        a, b = seed_streams(3), seed_streams(3)
        assert a["channel"].random() == b["channel"].random()
        assert a["symbols"].random() != seed_streams(3)["channel"].random()


class TestExperiment:
    @pytest.mark.parametrize("algorithm", ["blb", "drifting-blb", "ucb1-grid", "eps-greedy-grid"])
    def test_dispatch(self, algorithm, tmp_path):
        result = run_experiment(SMALL.replace(algorithm=algorithm), tmp_path)
        assert result.trace.algorithm == algorithm and len(result.trace) == 500
        lines = result.csv_path.read_text().splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS) and len(lines) == 501
        summary = json.loads(result.csv_path.with_suffix(".summary.json").read_text())
        assert summary["reward_cap"] > 0 and summary["seed"] == 0
        assert summary["final_average_snr"] == pytest.approx(summary["final_average_expected_cost"] * summary["reward_cap"])
        assert load_config(result.csv_path.with_suffix(".cfg")) == result.config

    def test_csv_byte_identical(self, tmp_path):
        a = run_experiment(SMALL.replace(seed=11), tmp_path / "a").csv_path.read_bytes()
        b = run_experiment(SMALL.replace(seed=11), tmp_path / "b").csv_path.read_bytes()
        c = run_experiment(SMALL.replace(seed=12), tmp_path / "c").csv_path.read_bytes()
        assert a == b and a != c

    def test_csv_values(self):
        trace = run_experiment(SMALL).trace
        row = trace_csv(trace).splitlines()[7].split(",")
        assert int(row[0]) == 7 and float(row[5]) == pytest.approx(trace.reward[6], rel=1e-11)
        assert float(row[7]) == pytest.approx(trace.cum_regret[6], rel=1e-11, abs=1e-12)

    def test_fixed_grid_arms(self, default_env):
        m = 5
        grid = build_grid(m)
        for trace in (
            run_ucb1_grid(default_env, m * m, m, np.random.default_rng(0)),
            run_eps_greedy_grid(default_env, 400, m, 0.9, np.random.default_rng(0)),
        ):
            assert np.all(trace.m == m) and np.all(trace.round == 0)
            np.testing.assert_array_equal(trace.azimuth, grid.azimuth[trace.arm])
            np.testing.assert_array_equal(trace.elevation, grid.elevation[trace.arm])
        assert sorted(trace.arm.tolist()[:0]) == []
        ucb = run_ucb1_grid(default_env, m * m, m, np.random.default_rng(0))
        assert ucb.arm.tolist() == list(range(m * m))

    def test_sweep_single_seed(self):
        rep = sweep(SMALL, [4])
        run = run_experiment(SMALL.replace(seed=4))
        np.testing.assert_array_equal(rep.mean_average_reward, run.trace.average_reward())
        np.testing.assert_array_equal(rep.mean_regret, run.trace.cum_regret)

    def test_sweep_duplicate_seed(self):
        rep = sweep(SMALL, [7, 7])
        assert np.all(rep.std_average_reward == 0) and np.all(rep.std_regret == 0)

    def test_sweep_parallel_matches_serial(self):
        a = sweep(SMALL, [1, 2, 3], workers=2)
        b = sweep(SMALL, [3, 1, 2])
        np.testing.assert_allclose(a.mean_regret, b.mean_regret, rtol=1e-12)
        np.testing.assert_allclose(a.std_average_reward, b.std_average_reward, rtol=1e-10, atol=1e-15)

    def test_sweep_failure_names_seed(self, tmp_path):
        cfg = SMALL.replace(change_schedule=f"file:{tmp_path / 'missing.json'}")
        with pytest.raises(SweepError) as info:
            sweep(cfg, [9])
        assert info.value.seed == 9

    def test_sweep_needs_seeds(self):
        with pytest.raises(ConfigError):
            sweep(SMALL, [])

    def test_report(self, tmp_path):
        for algo in ("blb", "ucb1-grid"):
            run_experiment(SMALL.replace(algorithm=algo), tmp_path)
        rows = report(sorted(tmp_path.glob("*.csv")))
        assert [r["run"] for r in rows] == ["blb_seed0", "ucb1-grid-10_seed0"]
        data = read_trace_csv(tmp_path / "blb_seed0.csv")
        assert rows[0]["final_average_reward"] == pytest.approx(data["reward"].mean())

    @pytest.mark.slow
    def test_fixed_grid_with_optimum_on_grid(self):
        """Resolution 6 puts (pi/3, pi/3) on the grid; UCB1 on it lands within 5% of BLB."""
        grid = build_grid(6)
        assert np.any(np.isclose(grid.azimuth, math.pi / 3) & np.isclose(grid.elevation, math.pi / 3))
        seeds = range(20)
        blb = sweep(ScenarioConfig(), seeds).final_average_rewards.mean()
        fixed = sweep(ScenarioConfig(algorithm="ucb1-grid", grid_resolution=6), seeds).final_average_rewards.mean()
        print(f"blb={blb:.4f} ucb1-grid-6={fixed:.4f}")
        assert abs(fixed - blb) <= 0.05 * blb

    @pytest.mark.slow
    def test_sweep_stability(self):
        finals = sweep(ScenarioConfig(), range(20)).final_average_rewards
        assert finals.std() < finals.mean() / 5


class TestTracking:
    def test_gap_up_to_sign(self):
        assert elevation_gap(0.4, -0.4) == 0 and elevation_gap(0.5, 0.3) == pytest.approx(0.2)

    def test_events(self, single_path_env):
        trace = run_blb(single_path_env, 400, rng=np.random.default_rng(0))
        el = trace.elevation
        s = lambda e: type(trace.strategy(1))(1.0, e)
        target = float(np.bincount(np.searchsorted(np.unique(el), el[99:300])).argmax())
        target = float(np.unique(el)[int(target)])
        points = [(1, s(0.0), 1.0), (50, s(target), 1.0), (350, s(0.0), 1.0)]
        events = reconvergence_events(trace, points, delay=50, span=200, tolerance=1e-9)
        assert len(events) == 1 and events[0].converged
        assert converged_fraction(events) == 1.0 and math.isnan(converged_fraction([]))


class TestCli:
    def test_run(self, tmp_path, capsys):
        code = main(["run", "--horizon", "300", "--oracle-resolution", "32", "--out", str(tmp_path), "--seed", "3"])
        assert code == 0 and (tmp_path / "blb_seed3.csv").exists()
        assert json.loads(capsys.readouterr().out)["horizon"] == 300

    def test_config_file_and_override(self, tmp_path, capsys):
        cfg = tmp_path / "s.cfg"
        cfg.write_text("horizon = 250\nalgorithm = ucb1-grid\ngrid_resolution = 5\noracle_resolution = 32\n")
        assert main(["run", "--config", str(cfg), "--grid-resolution", "4", "--out", str(tmp_path)]) == 0
        assert (tmp_path / "ucb1-grid-4_seed0.csv").exists()

    def test_sweep_and_report(self, tmp_path, capsys):
        assert main(["sweep", "--seeds", "0:3", "--horizon", "200", "--oracle-resolution", "32", "--out", str(tmp_path)]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["seeds"] == [0, 1, 2]
        assert main(["report", str(tmp_path)]) == 0
        assert "blb_seed2" in capsys.readouterr().out

    def test_oracle(self, capsys):
        assert main(["oracle", "--oracle-resolution", "64", "--change-schedule", "elevation:100", "--horizon", "250"]) == 0
        assert len(capsys.readouterr().out.strip().splitlines()) == 3

    def test_probe(self, capsys):
        assert main(["probe-holder", "--pairs", "1000"]) == 0
        assert "max ratio" in capsys.readouterr().out

    @pytest.mark.parametrize(
        "argv",
        [["run", "--algorithm", "zooming"], ["run", "--horizon", "x"], ["run", "--config", "/nonexistent.cfg"], ["frobnicate"], ["sweep", "--seeds", ""]],
    )
    def test_config_errors(self, argv):
        with pytest.raises(SystemExit) as info:
            code = main(argv)
            raise SystemExit(code)
        assert info.value.code == 2

    def test_contract_violation(self):
        assert main(["probe-holder", "--delta", "0", "--pairs", "10"]) == 3
