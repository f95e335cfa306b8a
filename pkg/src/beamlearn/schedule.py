"""Piecewise-constant environments for stationary and drifting runs."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .channel import (
    Environment,
    PathComponent,
    array_response,
    snr_many,
    synthesize_channel,
)
from .errors import ContractViolation, InputDomainError


@dataclass(frozen=True)
class ChangeSchedule:
    """``(step, paths)`` entries; each replaces the channel from ``step`` on."""

    entries: tuple[tuple[int, tuple[PathComponent, ...]], ...] = ()

    def __post_init__(self):
        entries = tuple((int(step), tuple(paths)) for step, paths in self.entries)
        steps = [s for s, _ in entries]
        if any(b <= a for a, b in zip(steps, steps[1:])):
            raise InputDomainError("change steps must be strictly increasing")
        if any(s < 1 for s in steps):
            raise InputDomainError("change steps start at 1")
        if any(not paths for _, paths in entries):
            raise InputDomainError("every change must list at least one path")
        object.__setattr__(self, "entries", entries)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def steps(self) -> list[int]:
        return [s for s, _ in self.entries]


def aligned_precoder(env_or_paths, bs_config=None) -> np.ndarray:
    """BS beam steered along the first path's departure direction."""
    if isinstance(env_or_paths, Environment):
        paths, bs_config = env_or_paths.channel.paths, env_or_paths.channel.bs_config
    else:
        paths = env_or_paths
    first = paths[0]
    return array_response(bs_config, first.aod_azimuth, first.aod_elevation)


@dataclass(frozen=True, eq=False)
class EnvSchedule:
    """Environment in force at each 1-based step: ``envs[i]`` from ``starts[i]`` on."""

    starts: tuple[int, ...]
    envs: tuple[Environment, ...]
    _starts_arr: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not self.envs or len(self.starts) != len(self.envs):
            raise InputDomainError("need one start step per environment")
        if self.starts[0] != 1:
            raise InputDomainError("the first environment must start at step 1")
        if any(b <= a for a, b in zip(self.starts, self.starts[1:])):
            raise InputDomainError("start steps must be strictly increasing")
        ref = self.envs[0]
        for env in self.envs[1:]:
            if (
                env.reward_cap != ref.reward_cap
                or env.samples_per_dwell != ref.samples_per_dwell
                or env.channel.ue_config != ref.channel.ue_config
            ):
                raise InputDomainError("scheduled environments must share cap, K and UE array")
        object.__setattr__(self, "_starts_arr", np.asarray(self.starts, dtype=np.int64))

    @classmethod
    def constant(cls, env: Environment) -> "EnvSchedule":
        return cls((1,), (env,))

    @classmethod
    def from_changes(
        cls, base: Environment, changes: ChangeSchedule | None, realign_precoder: bool = True
    ) -> "EnvSchedule":
        """Apply ``changes`` on top of ``base``; the BS re-steers to the new first path by default."""
        starts, envs = [1], [base]
        bs_cfg, ue_cfg = base.channel.bs_config, base.channel.ue_config
        for step, paths in (changes.entries if changes else ()):
            channel = synthesize_channel(bs_cfg, ue_cfg, paths)
            precoder = aligned_precoder(paths, bs_cfg) if realign_precoder else base.precoder
            env = Environment(
                channel,
                precoder,
                base.tx_power,
                base.noise_power,
                base.samples_per_dwell,
                base.reward_cap,
                base.mean_path_power,
            )
            if step == 1:
                envs[0] = env
            else:
                starts.append(step)
                envs.append(env)
        return cls(tuple(starts), tuple(envs))

    @property
    def is_stationary(self) -> bool:
        return len(self.envs) == 1

    @property
    def reference(self) -> Environment:
        return self.envs[0]

    def index_at(self, steps) -> np.ndarray:
        steps = np.asarray(steps, dtype=np.int64)
        if np.any(steps < 1):
            raise ContractViolation("steps are 1-based")
        return np.searchsorted(self._starts_arr, steps, side="right") - 1

    def at(self, step: int) -> Environment:
        return self.envs[int(self.index_at([step])[0])]

    def arm_snr_table(self, azimuth, elevation) -> np.ndarray:
        """Unnormalized SNR of every arm under every scheduled environment, shape (E, A)."""
        return np.stack([snr_many(env, azimuth, elevation) for env in self.envs])


def as_schedule(env_source) -> EnvSchedule:
    if isinstance(env_source, EnvSchedule):
        return env_source
    if isinstance(env_source, Environment):
        return EnvSchedule.constant(env_source)
    raise InputDomainError(f"expected Environment or EnvSchedule, got {type(env_source).__name__}")


def split_segments(starts: Sequence[int], n: int) -> list[tuple[int, int]]:
    """Inclusive step ranges covered by each start, clipped to ``[1, n]``."""
    bounds = [s for s in starts if s <= n] + [n + 1]
    return [(a, b - 1) for a, b in zip(bounds, bounds[1:])]
