"""Command line entry point: ``beamlearn run|sweep|oracle|probe-holder|report``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .errors import ConfigError, ContractViolation, InputDomainError
from .harness.experiment import format_table, report, run_experiment, sweep
from .harness.holder import holder_probe
from .harness.oracle import oracle_series
from .harness.scenario import FIELD_NAMES, load_config, parse_value, build_environment, seed_streams

log = logging.getLogger("beamlearn")

EXIT_OK, EXIT_CONFIG, EXIT_CONTRACT = 0, 2, 3


def _add_scenario_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="flat key = value scenario file")
    p.add_argument("--out", type=Path, help="output directory")
    for name in FIELD_NAMES:
        p.add_argument(f"--{name.replace('_', '-')}", dest=f"field_{name}", metavar="VALUE")


def _scenario(args):
    overrides = {}
    for name in FIELD_NAMES:
        value = getattr(args, f"field_{name}", None)
        if value is not None:
            overrides[name] = parse_value(name, value)
    return load_config(args.config, overrides)


class _ArgParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgParser(prog="beamlearn", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgParser)

    p = sub.add_parser("run", help="run one scenario, write trace CSV and summary")
    _add_scenario_flags(p)

    p = sub.add_parser("sweep", help="run one scenario over several seeds")
    _add_scenario_flags(p)
    p.add_argument("--seeds", required=True, help="comma list or range a:b")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("oracle", help="print the best direction(s) and their value")
    _add_scenario_flags(p)

    p = sub.add_parser("probe-holder", help="empirical Hölder constant of the SNR surface")
    _add_scenario_flags(p)
    p.add_argument("--pairs", type=int, default=100_000)
    p.add_argument("--delta", type=float, default=0.05)

    p = sub.add_parser("report", help="summarize trace CSVs")
    p.add_argument("paths", nargs="+", type=Path, help="CSV files or directories")
    return parser


def _parse_seeds(text: str) -> list[int]:
    if ":" in text:
        a, b = text.split(":", 1)
        return list(range(int(a), int(b)))
    return [int(s) for s in text.split(",") if s.strip()]


def _cmd_run(args) -> None:
    cfg = _scenario(args)
    result = run_experiment(cfg, args.out)
    print(json.dumps(result.summary, indent=2, sort_keys=True))
    if result.csv_path:
        log.info("wrote %s", result.csv_path)


def _cmd_sweep(args) -> None:
    cfg = _scenario(args)
    seeds = _parse_seeds(args.seeds)
    rep = sweep(cfg, seeds, args.out, workers=args.workers)
    finals = rep.final_average_rewards
    print(
        json.dumps(
            {
                "algorithm": cfg.algorithm,
                "seeds": list(rep.seeds),
                "final_average_reward_mean": float(finals.mean()),
                "final_average_reward_std": float(finals.std()),
                "final_cum_regret_mean": float(rep.mean_regret[-1]),
                "final_cum_regret_std": float(rep.std_regret[-1]),
            },
            indent=2,
        )
    )


def _cmd_oracle(args) -> None:
    cfg = _scenario(args)
    schedule = build_environment(cfg)
    _, points = oracle_series(schedule, cfg.horizon, cfg.oracle_resolution)
    for start, s, value in points:
        print(
            f"from step {start}: azimuth={s.azimuth:.9f} elevation={s.elevation:.9f} "
            f"value={value:.9g} snr={value * schedule.reference.reward_cap:.9g}"
        )


def _cmd_probe(args) -> None:
    cfg = _scenario(args)
    env = build_environment(cfg).reference
    rng = seed_streams(cfg.seed)["exploration"]
    rep = holder_probe(env, args.pairs, args.delta, cfg.holder, rng)
    print("\n".join(rep.lines()))
    print("holds" if rep.holds else "VIOLATED")


def _cmd_report(args) -> None:
    files = []
    for p in args.paths:
        files.extend(sorted(p.glob("*.csv")) if p.is_dir() else [p])
    print(format_table(report(files)), end="")


COMMANDS = {
    "run": _cmd_run,
    "sweep": _cmd_sweep,
    "oracle": _cmd_oracle,
    "probe-holder": _cmd_probe,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ContractViolation, InputDomainError) as exc:
        print(f"contract violation: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
