"""Beam learning with a doubling schedule of ever finer direction grids.

Round i covers steps T = 2**i .. min(2T - 1, n).  Each round builds an
M x M grid of (azimuth, elevation) arms, with M set from the round length and
the Hölder constants of the SNR surface, and runs a fresh UCB1 on it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .channel import HALF_PI, TWO_PI, Strategy
from .errors import InputDomainError
from .schedule import EnvSchedule, as_schedule
from .trace import RegretTrace, RoundRecord


@dataclass(frozen=True)
class HolderParams:
    l_h: float = 4.0
    alpha_h: float = 1.0

    def __post_init__(self):
        if not (self.l_h > 0 and math.isfinite(self.l_h)):
            raise InputDomainError(f"l_h must be positive, got {self.l_h!r}")
        if not 0.0 < self.alpha_h <= 1.0:
            raise InputDomainError(f"alpha_h must lie in (0, 1], got {self.alpha_h!r}")


@dataclass(frozen=True, eq=False)
class GridSpec:
    """M x M arms, azimuth-major: arm ``i * M + j`` is (azimuths[i], elevations[j])."""

    m: int
    azimuth: np.ndarray  # per arm
    elevation: np.ndarray  # per arm

    def __len__(self) -> int:
        return self.m * self.m

    @property
    def strategies(self) -> list[Strategy]:
        return [Strategy(float(a), float(e)) for a, e in zip(self.azimuth, self.elevation)]

    @property
    def covering_radius(self) -> float:
        # azimuth wraps (0 == 2pi) so its worst gap is pi/M; elevation's worst
        # is the uncovered edge at -pi/2, also pi/M
        return math.sqrt(2.0) * math.pi / self.m

    @property
    def nominal_radius(self) -> float:
        return math.sqrt(2.0 / self.m**2)


def discretization_m(t_round: int, h: HolderParams = HolderParams()) -> int:
    """Grid resolution for a round of nominal length ``t_round``."""
    if t_round < 1:
        raise InputDomainError(f"t_round must be >= 1, got {t_round!r}")
    if t_round == 1:
        return 1
    base = math.sqrt(t_round / math.log(t_round)) * h.l_h * 2.0 ** (h.alpha_h / 2.0)
    return int(math.ceil(base ** (1.0 / (1.0 + h.alpha_h))))


def build_grid(m: int) -> GridSpec:
    if int(m) != m or m < 1:
        raise InputDomainError(f"grid resolution must be a positive integer, got {m!r}")
    k = np.arange(1, m + 1, dtype=float)
    az = TWO_PI * k / m
    el = -HALF_PI + math.pi * k / m
    # k = M lands on the interval edges exactly; pin them against rounding
    az[-1] = TWO_PI
    el[-1] = HALF_PI
    return GridSpec(m, np.repeat(az, m), np.tile(el, m))


def round_bounds(n: int) -> list[tuple[int, int, int]]:
    """``(round_index, t_start, t_end)`` for the doubling schedule up to ``n``."""
    if n < 1:
        raise InputDomainError(f"horizon must be >= 1, got {n!r}")
    out, i, t = [], 0, 1
    while t <= n:
        out.append((i, t, min(2 * t - 1, n)))
        i += 1
        t *= 2
    return out


@dataclass
class _Columns:
    round: list
    m: list
    arm: list
    azimuth: list
    elevation: list
    reward: list
    expected_cost: list
    frame: list

    @classmethod
    def empty(cls) -> "_Columns":
        return cls([], [], [], [], [], [], [], [])

    def add(self, round_index, grid, chosen, rewards, costs, frames=None):
        size = len(chosen)
        self.round.append(np.full(size, round_index, dtype=np.int64))
        self.m.append(np.full(size, grid.m, dtype=np.int64))
        self.arm.append(chosen)
        self.azimuth.append(grid.azimuth[chosen])
        self.elevation.append(grid.elevation[chosen])
        self.reward.append(rewards)
        self.expected_cost.append(costs)
        self.frame.append(frames if frames is not None else np.ones(size, dtype=np.int64))

    def build(self, algorithm, rounds, cap, keep_frames=False) -> RegretTrace:
        cat = np.concatenate
        return RegretTrace(
            algorithm=algorithm,
            round=cat(self.round),
            m=cat(self.m),
            arm=cat(self.arm),
            azimuth=cat(self.azimuth),
            elevation=cat(self.elevation),
            reward=cat(self.reward),
            expected_cost=cat(self.expected_cost),
            rounds=rounds,
            frame=cat(self.frame) if keep_frames else None,
            reward_cap=cap,
        )


def round_tables(schedule: EnvSchedule, grid: GridSpec, t_start: int, t_end: int):
    """Arm SNR table and per-step environment index for one round."""
    table = schedule.arm_snr_table(grid.azimuth, grid.elevation)
    env_idx = schedule.index_at(np.arange(t_start, t_end + 1)).astype(np.int64)
    return table, env_idx


def run_blb(
    env_source,
    n: int,
    h: HolderParams = HolderParams(),
    rng: np.random.Generator | None = None,
) -> RegretTrace:
    """Run the doubling-grid learner for ``n`` steps.

    ``env_source`` is an Environment or an EnvSchedule; ``rng`` supplies the
    measurement noise.
    """
    schedule = as_schedule(env_source)
    rng = np.random.default_rng() if rng is None else rng
    ref = schedule.reference
    k, cap = ref.samples_per_dwell, ref.reward_cap
    cols = _Columns.empty()
    rounds = []
    for i, t_start, t_end in round_bounds(n):
        m = discretization_m(2**i, h)
        grid = build_grid(m)
        table, env_idx = round_tables(schedule, grid, t_start, t_end)
        size = t_end - t_start + 1
        gamma = rng.standard_gamma(k, size=size)
        plays = np.zeros(len(grid), dtype=np.int64)
        means = np.zeros(len(grid), dtype=np.float64)
        chosen = np.empty(size, dtype=np.int64)
        rewards = np.empty(size, dtype=np.float64)
        kernels.ucb1_run(table, env_idx, gamma, float(k), float(cap), plays, means, chosen, rewards)
        costs = table[env_idx, chosen] / cap
        cols.add(i, grid, chosen, rewards, costs)
        rounds.append(
            RoundRecord(i, t_start, t_end, m, plays, means, grid.covering_radius, grid.nominal_radius)
        )
    return cols.build("blb", rounds, cap)
