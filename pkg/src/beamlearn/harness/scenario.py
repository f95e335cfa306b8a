"""Scenario configuration, flat ``key = value`` config files and environment setup."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from ..blb import HolderParams
from ..channel import (
    HALF_PI,
    Environment,
    PathComponent,
    PlanarArrayConfig,
    random_paths,
    synthesize_channel,
)
from ..drifting import DEFAULT_WINDOW
from ..errors import ConfigError, InputDomainError
from ..schedule import ChangeSchedule, EnvSchedule, aligned_precoder

ALGORITHMS = ("blb", "drifting-blb", "ucb1-grid", "eps-greedy-grid")
STREAMS = ("channel", "symbols", "noise", "exploration")


@dataclass(frozen=True)
class ScenarioConfig:
    bs_config: PlanarArrayConfig = PlanarArrayConfig(8, 8)
    ue_config: PlanarArrayConfig = PlanarArrayConfig(4, 4)
    num_paths: int = 5
    mean_path_power: float = 1.0
    snr_db: float = -20.0
    first_path_aoa: tuple[float, float] = (math.pi / 3, math.pi / 3)
    holder: HolderParams = HolderParams()
    horizon: int = 20_000
    algorithm: str = "blb"
    grid_resolution: int = 10
    epsilon0: float = 0.9
    window: int = DEFAULT_WINDOW
    seed: int = 0
    samples_per_dwell: int = 10
    change_schedule: str = "none"
    oracle_resolution: int = 512

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}; expected one of {ALGORITHMS}")
        if self.num_paths < 1:
            raise ConfigError("num_paths must be >= 1")
        if not self.mean_path_power > 0:
            raise ConfigError("mean_path_power must be positive")
        if self.horizon < 1:
            raise ConfigError("horizon must be >= 1")
        if self.grid_resolution < 1:
            raise ConfigError("grid_resolution must be >= 1")
        if not 0.0 < self.epsilon0 < 1.0:
            raise ConfigError("epsilon0 must lie in (0, 1)")
        if self.window < 2 or self.window % 2:
            raise ConfigError("window must be an even integer >= 2")
        if self.samples_per_dwell < 1:
            raise ConfigError("samples_per_dwell must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.oracle_resolution < 2:
            raise ConfigError("oracle_resolution must be >= 2")
        parse_change_spec(self.change_schedule)

    @property
    def tx_power(self) -> float:
        return 10.0 ** (self.snr_db / 10.0)

    def replace(self, **changes) -> "ScenarioConfig":
        return replace(self, **changes)


# --- flat config parsing -------------------------------------------------------


def _parse_array(text: str) -> PlanarArrayConfig:
    spec, _, spacing = text.partition("@")
    try:
        y, z = (int(v) for v in spec.lower().split("x"))
        return PlanarArrayConfig(y, z, float(spacing) if spacing else 0.5)
    except (ValueError, InputDomainError) as exc:
        raise ConfigError(f"array must look like YxZ or YxZ@spacing, got {text!r}") from exc


def _parse_pair(text: str) -> tuple[float, float]:
    parts = [p for p in text.replace(",", " ").split() if p]
    if len(parts) != 2:
        raise ConfigError(f"expected two numbers, got {text!r}")
    return float(parts[0]), float(parts[1])


def _parse_holder(text: str) -> HolderParams:
    try:
        return HolderParams(*_parse_pair(text))
    except InputDomainError as exc:
        raise ConfigError(str(exc)) from exc


def _format_array(cfg: PlanarArrayConfig) -> str:
    return f"{cfg.y_count}x{cfg.z_count}@{cfg.spacing_ratio:g}"


_PARSERS = {
    "bs_config": _parse_array,
    "ue_config": _parse_array,
    "first_path_aoa": _parse_pair,
    "holder": _parse_holder,
    "num_paths": int,
    "horizon": int,
    "grid_resolution": int,
    "window": int,
    "seed": int,
    "samples_per_dwell": int,
    "oracle_resolution": int,
    "mean_path_power": float,
    "snr_db": float,
    "epsilon0": float,
    "algorithm": str,
    "change_schedule": str,
}

FIELD_NAMES = tuple(f.name for f in fields(ScenarioConfig))


def parse_value(key: str, text: str):
    if key not in _PARSERS:
        raise ConfigError(f"unknown config key {key!r}")
    try:
        return _PARSERS[key](text.strip())
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {text!r}") from exc


def parse_config_text(text: str) -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key = key.strip()
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = parse_value(key, value)
    return values


def load_config(path=None, overrides: dict | None = None) -> ScenarioConfig:
    """Defaults, then the file at ``path``, then ``overrides`` (already parsed)."""
    values = {}
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        values.update(parse_config_text(text))
    values.update(overrides or {})
    return ScenarioConfig(**values)


def dump_config(cfg: ScenarioConfig) -> str:
    out = []
    for name in FIELD_NAMES:
        v = getattr(cfg, name)
        if isinstance(v, PlanarArrayConfig):
            v = _format_array(v)
        elif isinstance(v, HolderParams):
            v = f"{v.l_h!r}, {v.alpha_h!r}"
        elif isinstance(v, tuple):
            v = ", ".join(repr(x) for x in v)
        out.append(f"{name} = {v}")
    return "\n".join(out) + "\n"


# --- environments -----------------------------------------------------------------


def parse_change_spec(spec: str) -> tuple[str, object]:
    """``none``, ``elevation:<period>`` or ``file:<path.json>``."""
    spec = (spec or "none").strip()
    if spec == "none":
        return "none", None
    kind, _, arg = spec.partition(":")
    if kind == "elevation":
        try:
            period = int(arg)
        except ValueError:
            period = 0
        if period < 1:
            raise ConfigError(f"elevation change period must be a positive integer, got {arg!r}")
        return "elevation", period
    if kind == "file" and arg:
        return "file", arg
    raise ConfigError(f"unknown change_schedule {spec!r}")


def load_change_file(path) -> ChangeSchedule:
    try:
        data = json.loads(Path(path).read_text())
        entries = []
        for item in data:
            paths = [
                PathComponent(
                    complex(p["gain_re"], p["gain_im"]),
                    p["aoa_azimuth"], p["aoa_elevation"], p["aod_azimuth"], p["aod_elevation"],
                )
                for p in item["paths"]
            ]
            entries.append((int(item["step"]), paths))
        return ChangeSchedule(tuple(entries))
    except (OSError, KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad change schedule file {path}: {exc}") from exc


def elevation_changes(
    paths: list[PathComponent], period: int, horizon: int, rng: np.random.Generator
) -> ChangeSchedule:
    """Redraw the first path's arrival elevation uniformly every ``period`` steps."""
    entries = []
    current = list(paths)
    for step in range(period + 1, horizon + 1, period):
        first = current[0]
        new_el = float(rng.uniform(-HALF_PI, HALF_PI))
        current = [replace(first, aoa_elevation=new_el)] + current[1:]
        entries.append((step, tuple(current)))
    return ChangeSchedule(tuple(entries))


def seed_streams(seed: int) -> dict[str, np.random.Generator]:
    """Independent generators, split in the fixed order channel, symbols, noise, exploration."""
    children = np.random.SeedSequence(seed).spawn(len(STREAMS))
    return {name: np.random.Generator(np.random.PCG64(ss)) for name, ss in zip(STREAMS, children)}


def build_environment(cfg: ScenarioConfig, rng: np.random.Generator | None = None) -> EnvSchedule:
    """Channel, aligned BS precoder and (optionally) its change schedule."""
    rng = seed_streams(cfg.seed)["channel"] if rng is None else rng
    paths = random_paths(rng, cfg.num_paths, cfg.mean_path_power, cfg.first_path_aoa)
    channel = synthesize_channel(cfg.bs_config, cfg.ue_config, paths)
    env = Environment(
        channel,
        aligned_precoder(paths, cfg.bs_config),
        tx_power=cfg.tx_power,
        noise_power=1.0,
        samples_per_dwell=cfg.samples_per_dwell,
        mean_path_power=cfg.mean_path_power,
    )
    kind, arg = parse_change_spec(cfg.change_schedule)
    if kind == "elevation":
        changes = elevation_changes(paths, arg, cfg.horizon, rng)
    elif kind == "file":
        changes = load_change_file(arg)
    else:
        changes = None
    return EnvSchedule.from_changes(env, changes)
