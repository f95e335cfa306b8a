"""Tracking moving beams: the doubling-grid learner with sliding frames.

Inside every round, statistics live for one frame of ``window`` steps.  A
frame is warmed during the second half of its predecessor (its passive
slot, where the predecessor still chooses the arms) and takes over for its
own second half (active slot).  Resetting every W/2 steps bounds how stale
the acting statistics can be.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .blb import HolderParams, _Columns, build_grid, discretization_m, round_bounds, round_tables
from .errors import InputDomainError
from .schedule import as_schedule
from .trace import RegretTrace, RoundRecord

DEFAULT_WINDOW = 250


@dataclass(frozen=True)
class DriftConfig:
    window: int = DEFAULT_WINDOW
    holder: HolderParams = HolderParams()

    def __post_init__(self):
        if int(self.window) != self.window or self.window < 2 or self.window % 2:
            raise InputDomainError(f"window must be an even integer >= 2, got {self.window!r}")


@dataclass(frozen=True)
class Frame:
    """Offsets within a round; ``passive`` is empty for the first frame."""

    number: int
    start: int
    active_start: int
    end: int  # exclusive, truncated at the round end


def frame_layout(round_length: int, window: int) -> list[Frame]:
    """Frames a round of ``round_length`` steps is cut into."""
    DriftConfig(window)
    half = window // 2
    frames = [Frame(1, 0, 0, min(window, round_length))]
    if round_length <= window:
        return frames
    w = 2
    while (w * half) < round_length:
        start = (w - 1) * half
        frames.append(Frame(w, start, w * half, min((w + 1) * half, round_length)))
        w += 1
    return frames


def run_drifting_blb(
    env_source,
    n: int,
    cfg: DriftConfig = DriftConfig(),
    rng: np.random.Generator | None = None,
) -> RegretTrace:
    schedule = as_schedule(env_source)
    rng = np.random.default_rng() if rng is None else rng
    ref = schedule.reference
    k, cap = ref.samples_per_dwell, ref.reward_cap
    cols = _Columns.empty()
    rounds = []
    for i, t_start, t_end in round_bounds(n):
        m = discretization_m(2**i, cfg.holder)
        grid = build_grid(m)
        table, env_idx = round_tables(schedule, grid, t_start, t_end)
        size = t_end - t_start + 1
        gamma = rng.standard_gamma(k, size=size)
        a = len(grid)
        act_plays, next_plays = np.zeros(a, dtype=np.int64), np.zeros(a, dtype=np.int64)
        act_means, next_means = np.zeros(a), np.zeros(a)
        chosen = np.empty(size, dtype=np.int64)
        rewards = np.empty(size, dtype=np.float64)
        frames = np.empty(size, dtype=np.int64)
        last = kernels.drifting_run(
            table, env_idx, gamma, float(k), float(cap), int(cfg.window),
            act_plays, act_means, next_plays, next_means, chosen, rewards, frames,
        )
        cols.add(i, grid, chosen, rewards, table[env_idx, chosen] / cap, frames)
        rounds.append(
            RoundRecord(
                i, t_start, t_end, m, act_plays, act_means,
                grid.covering_radius, grid.nominal_radius, frames=int(last),
            )
        )
    return cols.build("drifting-blb", rounds, cap, keep_frames=True)


def selected_elevation_series(trace: RegretTrace) -> tuple[np.ndarray, np.ndarray]:
    """``(steps, elevations)`` of the played directions."""
    if len(trace) == 0:
        raise InputDomainError("trace is empty")
    return trace.step, trace.elevation.copy()


def modal_value(values: np.ndarray) -> float:
    """Most frequent value; ties go to the smallest."""
    uniq, counts = np.unique(values, return_counts=True)
    return float(uniq[np.argmax(counts)])
