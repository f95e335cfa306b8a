"""Single fixed grid, no rounds: UCB1 and epsilon-greedy over M x M arms."""

from __future__ import annotations

import numpy as np

from . import kernels
from .blb import _Columns, build_grid, round_tables
from .errors import InputDomainError
from .schedule import as_schedule
from .trace import RegretTrace, RoundRecord


def _setup(env_source, n, resolution):
    if n < 1:
        raise InputDomainError(f"horizon must be >= 1, got {n!r}")
    schedule = as_schedule(env_source)
    grid = build_grid(resolution)
    table, env_idx = round_tables(schedule, grid, 1, n)
    ref = schedule.reference
    return grid, table, env_idx, ref.samples_per_dwell, ref.reward_cap


def _finish(name, grid, n, table, env_idx, chosen, rewards, plays, means, cap) -> RegretTrace:
    cols = _Columns.empty()
    cols.add(0, grid, chosen, rewards, table[env_idx, chosen] / cap)
    record = RoundRecord(0, 1, n, grid.m, plays, means, grid.covering_radius, grid.nominal_radius)
    return cols.build(name, [record], cap)


def run_ucb1_grid(env_source, n: int, resolution: int, rng: np.random.Generator) -> RegretTrace:
    grid, table, env_idx, k, cap = _setup(env_source, n, resolution)
    gamma = rng.standard_gamma(k, size=n)
    plays = np.zeros(len(grid), dtype=np.int64)
    means = np.zeros(len(grid), dtype=np.float64)
    chosen = np.empty(n, dtype=np.int64)
    rewards = np.empty(n, dtype=np.float64)
    kernels.ucb1_run(table, env_idx, gamma, float(k), float(cap), plays, means, chosen, rewards)
    return _finish("ucb1-grid", grid, n, table, env_idx, chosen, rewards, plays, means, cap)


def run_eps_greedy_grid(
    env_source,
    n: int,
    resolution: int,
    epsilon0: float,
    rng: np.random.Generator,
    explore_rng: np.random.Generator | None = None,
) -> RegretTrace:
    """Epsilon-greedy over a fixed grid; exploration uniforms come from ``explore_rng``."""
    if not 0.0 < epsilon0 < 1.0:
        raise InputDomainError(f"epsilon0 must lie in (0, 1), got {epsilon0!r}")
    grid, table, env_idx, k, cap = _setup(env_source, n, resolution)
    explore_rng = rng if explore_rng is None else explore_rng
    gamma = rng.standard_gamma(k, size=n)
    u = explore_rng.random((n, 2))
    plays = np.zeros(len(grid), dtype=np.int64)
    means = np.zeros(len(grid), dtype=np.float64)
    chosen = np.empty(n, dtype=np.int64)
    rewards = np.empty(n, dtype=np.float64)
    kernels.eps_greedy_run(
        table, env_idx, gamma, np.ascontiguousarray(u[:, 0]), np.ascontiguousarray(u[:, 1]),
        float(epsilon0), 1, float(k), float(cap), plays, means, chosen, rewards,
    )
    return _finish("eps-greedy-grid", grid, n, table, env_idx, chosen, rewards, plays, means, cap)
