from .experiment import ExperimentResult, SweepReport, report, run_experiment, simulate, sweep
from .holder import HolderReport, holder_probe
from .oracle import oracle_optimal, oracle_series
from .regret import cumulative_regret, regret_exponent_fit
from .scenario import ScenarioConfig, build_environment, dump_config, load_config, parse_config_text, seed_streams
