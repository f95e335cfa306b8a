from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .channel import Strategy
from .errors import ContractViolation

CSV_COLUMNS = (
    "step",
    "round",
    "m",
    "azimuth_rad",
    "elevation_rad",
    "reward",
    "expected_cost",
    "cum_regret",
)


@dataclass(frozen=True, eq=False)
class RoundRecord:
    round_index: int
    t_start: int
    t_end: int
    m: int
    plays: np.ndarray
    means: np.ndarray
    covering_radius: float = float("nan")  # worst nearest-arm distance, azimuth wrapping
    nominal_radius: float = float("nan")  # sqrt(2 / M^2), the bound used in the regret proof
    frames: int = 1

    @property
    def length(self) -> int:
        return self.t_end - self.t_start + 1


@dataclass(frozen=True, eq=False)
class RegretTrace:
    """Per-step record of a run; steps are 1-based."""

    algorithm: str
    round: np.ndarray
    m: np.ndarray
    arm: np.ndarray
    azimuth: np.ndarray
    elevation: np.ndarray
    reward: np.ndarray
    expected_cost: np.ndarray
    rounds: list[RoundRecord] = field(default_factory=list)
    frame: np.ndarray | None = None
    oracle: np.ndarray | None = None
    cum_regret: np.ndarray | None = None
    reward_cap: float = 1.0

    def __post_init__(self):
        n = len(self.reward)
        for name in ("round", "m", "arm", "azimuth", "elevation", "expected_cost"):
            if len(getattr(self, name)) != n:
                raise ContractViolation(f"trace column {name!r} has the wrong length")

    def __len__(self) -> int:
        return len(self.reward)

    @property
    def step(self) -> np.ndarray:
        return np.arange(1, len(self) + 1)

    def strategy(self, t: int) -> Strategy:
        return Strategy(float(self.azimuth[t - 1]), float(self.elevation[t - 1]))

    def with_oracle(self, oracle_per_step) -> "RegretTrace":
        from .harness.regret import cumulative_regret

        oracle = np.broadcast_to(np.asarray(oracle_per_step, dtype=float), (len(self),)).copy()
        return replace(self, oracle=oracle, cum_regret=cumulative_regret(self, oracle, self.expected_cost))

    def average_reward(self) -> np.ndarray:
        """Cumulative average of the noisy normalized reward."""
        return np.cumsum(self.reward) / self.step

    def average_expected_cost(self) -> np.ndarray:
        return np.cumsum(self.expected_cost) / self.step

    @property
    def summary(self) -> dict:
        out = {
            "algorithm": self.algorithm,
            "horizon": len(self),
            "final_average_reward": float(self.average_reward()[-1]),
            "final_average_expected_cost": float(self.average_expected_cost()[-1]),
            "final_average_snr": float(self.average_expected_cost()[-1] * self.reward_cap),
        }
        if self.oracle is not None:
            out["oracle_value"] = float(self.oracle[-1])
            out["final_cum_regret"] = float(self.cum_regret[-1])
        return out
