"""Blind beam-direction learning for mmWave planar arrays with continuum-armed bandits."""

from ._accel import backend
from .bandit import ArmSet, ArmStats, epsilon_greedy_select, ucb1_select, ucb1_update
from .baselines import run_eps_greedy_grid, run_ucb1_grid
from .blb import GridSpec, HolderParams, build_grid, discretization_m, run_blb
from .channel import (
    ChannelRealization,
    Environment,
    PathComponent,
    PlanarArrayConfig,
    Strategy,
    array_response,
    expected_cost,
    measure_reward,
    synthesize_channel,
)
from .drifting import DriftConfig, run_drifting_blb, selected_elevation_series
from .errors import ConfigError, ContractViolation, InputDomainError
from .schedule import ChangeSchedule, EnvSchedule
from .trace import RegretTrace, RoundRecord

__version__ = "0.1.0"
