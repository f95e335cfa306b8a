"""Run scenarios end to end and write traces."""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from ..baselines import run_eps_greedy_grid, run_ucb1_grid
from ..blb import run_blb
from ..drifting import DriftConfig, run_drifting_blb
from ..errors import BeamLearnError, ConfigError
from ..schedule import EnvSchedule
from ..trace import CSV_COLUMNS, RegretTrace
from .oracle import oracle_series
from .scenario import ScenarioConfig, build_environment, dump_config, seed_streams


@dataclass(frozen=True, eq=False)
class ExperimentResult:
    config: ScenarioConfig
    trace: RegretTrace
    schedule: EnvSchedule
    oracle_points: list  # (start step, Strategy, value) per environment segment
    csv_path: Path | None = None

    @property
    def summary(self) -> dict:
        out = dict(self.trace.summary)
        out.update(
            seed=self.config.seed,
            reward_cap=self.schedule.reference.reward_cap,
            oracle_directions=[
                {"start": a, "azimuth": s.azimuth, "elevation": s.elevation, "value": v}
                for a, s, v in self.oracle_points
            ],
        )
        return out


def simulate(cfg: ScenarioConfig, schedule: EnvSchedule | None = None) -> RegretTrace:
    """Dispatch ``cfg.algorithm`` with the scenario's seeded streams (no oracle)."""
    streams = seed_streams(cfg.seed)
    if schedule is None:
        schedule = build_environment(cfg, streams["channel"])
    n = cfg.horizon
    if cfg.algorithm == "blb":
        return run_blb(schedule, n, cfg.holder, streams["symbols"])
    if cfg.algorithm == "drifting-blb":
        return run_drifting_blb(schedule, n, DriftConfig(cfg.window, cfg.holder), streams["symbols"])
    if cfg.algorithm == "ucb1-grid":
        return run_ucb1_grid(schedule, n, cfg.grid_resolution, streams["symbols"])
    if cfg.algorithm == "eps-greedy-grid":
        return run_eps_greedy_grid(
            schedule, n, cfg.grid_resolution, cfg.epsilon0, streams["symbols"], streams["exploration"]
        )
    raise ConfigError(f"unknown algorithm {cfg.algorithm!r}")


def run_experiment(cfg: ScenarioConfig, out_dir=None, schedule: EnvSchedule | None = None) -> ExperimentResult:
    """Simulate, attach the oracle and regret, and optionally write files into ``out_dir``."""
    if schedule is None:
        schedule = build_environment(cfg)
    trace = simulate(cfg, schedule)
    oracle, points = oracle_series(schedule, cfg.horizon, cfg.oracle_resolution)
    trace = trace.with_oracle(oracle)
    result = ExperimentResult(cfg, trace, schedule, points)
    if out_dir is not None:
        result = write_outputs(result, Path(out_dir))
    return result


def trace_csv(trace: RegretTrace) -> str:
    buf = io.StringIO()
    buf.write(",".join(CSV_COLUMNS) + "\n")
    regret = trace.cum_regret if trace.cum_regret is not None else np.full(len(trace), np.nan)
    for row in zip(
        trace.step, trace.round, trace.m, trace.azimuth, trace.elevation,
        trace.reward, trace.expected_cost, regret,
    ):
        buf.write(
            f"{row[0]},{row[1]},{row[2]},{row[3]:.12g},{row[4]:.12g},"
            f"{row[5]:.12g},{row[6]:.12g},{row[7]:.12g}\n"
        )
    return buf.getvalue()


def run_name(cfg: ScenarioConfig) -> str:
    tag = cfg.algorithm
    if cfg.algorithm in ("ucb1-grid", "eps-greedy-grid"):
        tag += f"-{cfg.grid_resolution}"
    return f"{tag}_seed{cfg.seed}"


def write_outputs(result: ExperimentResult, out_dir: Path) -> ExperimentResult:
    out_dir.mkdir(parents=True, exist_ok=True)
    name = run_name(result.config)
    csv_path = out_dir / f"{name}.csv"
    csv_path.write_text(trace_csv(result.trace))
    (out_dir / f"{name}.summary.json").write_text(json.dumps(result.summary, indent=2, sort_keys=True) + "\n")
    (out_dir / f"{name}.cfg").write_text(dump_config(result.config))
    return ExperimentResult(result.config, result.trace, result.schedule, result.oracle_points, csv_path)


# --- sweeps -------------------------------------------------------------------------


class SweepError(BeamLearnError):
    def __init__(self, seed, cause):
        super().__init__(f"seed {seed} failed: {cause}")
        self.seed = seed


@dataclass(frozen=True, eq=False)
class SweepReport:
    seeds: tuple[int, ...]
    results: tuple[ExperimentResult, ...]
    mean_average_reward: np.ndarray
    std_average_reward: np.ndarray
    mean_regret: np.ndarray
    std_regret: np.ndarray

    @property
    def final_average_rewards(self) -> np.ndarray:
        return np.array([r.trace.average_reward()[-1] for r in self.results])

    @property
    def final_average_costs(self) -> np.ndarray:
        return np.array([r.trace.average_expected_cost()[-1] for r in self.results])

    @property
    def oracle_values(self) -> np.ndarray:
        return np.array([r.trace.oracle[-1] for r in self.results])


def _run_seed(args):
    cfg, out_dir = args
    try:
        return run_experiment(cfg, out_dir)
    except Exception as exc:  # re-raised with the seed attached
        raise SweepError(cfg.seed, exc) from exc


def sweep(cfg: ScenarioConfig, seeds: Sequence[int], out_dir=None, workers: int = 1) -> SweepReport:
    """Run ``cfg`` once per seed and aggregate per-step statistics across seeds."""
    seeds = tuple(int(s) for s in seeds)
    if not seeds:
        raise ConfigError("sweep needs at least one seed")
    jobs = [(cfg.replace(seed=s), out_dir) for s in seeds]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_seed, jobs))
    else:
        results = [_run_seed(job) for job in jobs]
    avg = np.stack([r.trace.average_reward() for r in results])
    reg = np.stack([r.trace.cum_regret for r in results])
    return SweepReport(
        seeds, tuple(results), avg.mean(axis=0), avg.std(axis=0), reg.mean(axis=0), reg.std(axis=0)
    )


# --- reports ------------------------------------------------------------------------


def read_trace_csv(path) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_COLUMNS:
            raise ConfigError(f"{path}: unexpected header {header}")
        rows = np.array([[float(x) for x in row] for row in reader])
    return {name: rows[:, i] for i, name in enumerate(CSV_COLUMNS)}


def report(paths: Sequence) -> list[dict]:
    """One summary row per trace CSV."""
    rows = []
    for path in sorted(Path(p) for p in paths):
        data = read_trace_csv(path)
        n = len(data["step"])
        rows.append(
            {
                "run": path.stem,
                "horizon": n,
                "final_average_reward": float(data["reward"].mean()),
                "final_average_expected_cost": float(data["expected_cost"].mean()),
                "final_cum_regret": float(data["cum_regret"][-1]),
                "regret_per_step": float(data["cum_regret"][-1] / n),
            }
        )
    return rows


def format_table(rows: list[dict]) -> str:
    if not rows:
        return "(no traces)\n"
    cols = list(rows[0])
    cells = [[r[c] if isinstance(r[c], str) else f"{r[c]:.6g}" for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths))]
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join(lines) + "\n"
