"""Finite-armed bandit statistics, UCB1 and the epsilon-greedy baseline."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .channel import Strategy
from .errors import ContractViolation, InputDomainError


@dataclass(frozen=True)
class ArmStats:
    plays: int = 0
    mean_reward: float = 0.0


@dataclass(frozen=True, eq=False)
class ArmSet:
    """Ordered arms with their play counts and running mean rewards.

    Treated as a value: :func:`ucb1_update` returns a new set.
    """

    strategies: tuple[Strategy, ...]
    plays: np.ndarray
    means: np.ndarray

    @classmethod
    def fresh(cls, strategies: Sequence[Strategy]) -> "ArmSet":
        n = len(strategies)
        return cls(tuple(strategies), np.zeros(n, dtype=np.int64), np.zeros(n, dtype=np.float64))

    def __len__(self) -> int:
        return len(self.strategies)

    @property
    def total_plays(self) -> int:
        return int(self.plays.sum())

    @property
    def arms(self) -> list[tuple[Strategy, ArmStats]]:
        return [
            (s, ArmStats(int(p), float(m))) for s, p, m in zip(self.strategies, self.plays, self.means)
        ]


def _require_arms(arm_set: ArmSet) -> None:
    if len(arm_set) == 0:
        raise InputDomainError("arm set is empty")


def ucb1_select(arm_set: ArmSet) -> int:
    """Lowest-index unplayed arm, else argmax of mean + sqrt(2 ln t / plays)."""
    _require_arms(arm_set)
    return int(kernels.ucb1_choose(arm_set.plays, arm_set.means, arm_set.total_plays))


def ucb1_update(arm_set: ArmSet, index: int, reward: float) -> ArmSet:
    if not 0 <= index < len(arm_set):
        raise ContractViolation(f"arm index {index} out of range")
    if not 0.0 <= reward <= 1.0:
        raise ContractViolation(f"reward {reward!r} outside [0, 1]")
    plays = arm_set.plays.copy()
    means = arm_set.means.copy()
    kernels.stats_update(plays, means, index, float(reward))
    return ArmSet(arm_set.strategies, plays, means)


def exploration_probability(epsilon0: float, global_t: int) -> float:
    return epsilon0 ** (global_t / 10.0)


def epsilon_greedy_select(
    arm_set: ArmSet, global_t: int, epsilon0: float, rng: np.random.Generator
) -> int:
    """Uniform arm with probability epsilon0 ** (global_t / 10), else the best mean."""
    _require_arms(arm_set)
    if not 0.0 < epsilon0 < 1.0:
        raise InputDomainError(f"epsilon0 must lie in (0, 1), got {epsilon0!r}")
    # two uniforms per call, matching the pre-drawn pairs used by the batch kernel
    u_explore, u_pick = rng.random(2)
    if u_explore < exploration_probability(epsilon0, global_t):
        return min(int(u_pick * len(arm_set)), len(arm_set) - 1)
    return int(kernels.greedy_choose(arm_set.means))
