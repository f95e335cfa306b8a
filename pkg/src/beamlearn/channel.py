"""Planar-array responses, the ray-based mmWave channel, and SNR rewards."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy import stats

from .errors import InputDomainError

TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi
DEFAULT_SAMPLES_PER_DWELL = 10


@dataclass(frozen=True)
class PlanarArrayConfig:
    """Uniform planar array with ``y_count`` x ``z_count`` isotropic elements."""

    y_count: int
    z_count: int
    spacing_ratio: float = 0.5  # d / lambda

    def __post_init__(self):
        if int(self.y_count) != self.y_count or self.y_count < 1:
            raise InputDomainError(f"y_count must be a positive integer, got {self.y_count!r}")
        if int(self.z_count) != self.z_count or self.z_count < 1:
            raise InputDomainError(f"z_count must be a positive integer, got {self.z_count!r}")
        if not (math.isfinite(self.spacing_ratio) and self.spacing_ratio > 0):
            raise InputDomainError(f"spacing_ratio must be positive, got {self.spacing_ratio!r}")

    @property
    def size(self) -> int:
        return self.y_count * self.z_count

    @classmethod
    def square(cls, n_elements: int, spacing_ratio: float = 0.5) -> "PlanarArrayConfig":
        side = math.isqrt(n_elements)
        if side * side != n_elements:
            raise InputDomainError(f"{n_elements} elements do not form a square array")
        return cls(side, side, spacing_ratio)


def _check_angles(azimuth: float, elevation: float) -> None:
    if not (math.isfinite(azimuth) and math.isfinite(elevation)):
        raise InputDomainError(f"angles must be finite, got ({azimuth!r}, {elevation!r})")
    if not (0.0 <= azimuth <= TWO_PI):
        raise InputDomainError(f"azimuth {azimuth!r} outside [0, 2pi]")
    if not (-HALF_PI <= elevation <= HALF_PI):
        raise InputDomainError(f"elevation {elevation!r} outside [-pi/2, pi/2]")


@dataclass(frozen=True)
class Strategy:
    """One arm: a receive direction (azimuth, elevation) in radians."""

    azimuth: float
    elevation: float

    def __post_init__(self):
        _check_angles(self.azimuth, self.elevation)


@dataclass(frozen=True)
class PathComponent:
    gain: complex
    aoa_azimuth: float
    aoa_elevation: float
    aod_azimuth: float
    aod_elevation: float

    def __post_init__(self):
        _check_angles(self.aoa_azimuth, self.aoa_elevation)
        _check_angles(self.aod_azimuth, self.aod_elevation)


def _element_offsets(cfg: PlanarArrayConfig) -> tuple[np.ndarray, np.ndarray]:
    # m-major ordering: element index = m * Z + n
    m = np.repeat(np.arange(cfg.y_count, dtype=float), cfg.z_count)
    n = np.tile(np.arange(cfg.z_count, dtype=float), cfg.y_count)
    return m, n


def array_responses(cfg: PlanarArrayConfig, azimuth, elevation) -> np.ndarray:
    """Stack of response vectors, shape ``(len(azimuth), N)``."""
    az = np.atleast_1d(np.asarray(azimuth, dtype=float))
    el = np.atleast_1d(np.asarray(elevation, dtype=float))
    if not (np.all(np.isfinite(az)) and np.all(np.isfinite(el))):
        raise InputDomainError("angles must be finite")
    m, n = _element_offsets(cfg)
    phase = TWO_PI * cfg.spacing_ratio * (
        np.outer(np.sin(az) * np.sin(el), m) + np.outer(np.cos(el), n)
    )
    return np.exp(1j * phase) / math.sqrt(cfg.size)


def array_response(cfg: PlanarArrayConfig, azimuth: float, elevation: float) -> np.ndarray:
    """Unit-norm response of ``cfg`` toward (azimuth, elevation)."""
    if not (math.isfinite(azimuth) and math.isfinite(elevation)):
        raise InputDomainError(f"angles must be finite, got ({azimuth!r}, {elevation!r})")
    return array_responses(cfg, azimuth, elevation)[0]


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    matrix: np.ndarray  # N_UE x N_BS
    paths: tuple[PathComponent, ...]
    bs_config: PlanarArrayConfig
    ue_config: PlanarArrayConfig

    def __post_init__(self):
        expected = (self.ue_config.size, self.bs_config.size)
        if self.matrix.shape != expected:
            raise InputDomainError(f"channel matrix shape {self.matrix.shape} != {expected}")


def synthesize_channel(
    bs_cfg: PlanarArrayConfig, ue_cfg: PlanarArrayConfig, paths: Sequence[PathComponent]
) -> ChannelRealization:
    """Sum of ``L`` rank-one ray contributions scaled by sqrt(N_BS N_UE / L)."""
    paths = tuple(paths)
    if not paths:
        raise InputDomainError("a channel needs at least one path")
    n_paths = len(paths)
    if n_paths > min(bs_cfg.size, ue_cfg.size):
        warnings.warn(
            f"{n_paths} paths exceed min(N_BS, N_UE) = {min(bs_cfg.size, ue_cfg.size)}; "
            "the sparse-channel assumption no longer holds",
            stacklevel=2,
        )
    gains = np.array([p.gain for p in paths], dtype=complex)
    a_ue = array_responses(ue_cfg, [p.aoa_azimuth for p in paths], [p.aoa_elevation for p in paths])
    a_bs = array_responses(bs_cfg, [p.aod_azimuth for p in paths], [p.aod_elevation for p in paths])
    scale = math.sqrt(bs_cfg.size * ue_cfg.size / n_paths)
    matrix = scale * (a_ue.T * gains) @ a_bs.conj()
    return ChannelRealization(matrix, paths, bs_cfg, ue_cfg)


def rayleigh_gain(rng: np.random.Generator, mean_power: float = 1.0) -> complex:
    g = rng.standard_normal(2)
    return complex(g[0], g[1]) * math.sqrt(mean_power / 2.0)


def random_angles(rng: np.random.Generator) -> tuple[float, float]:
    return float(rng.uniform(0.0, TWO_PI)), float(rng.uniform(-HALF_PI, HALF_PI))


def random_paths(
    rng: np.random.Generator,
    num_paths: int,
    mean_path_power: float = 1.0,
    first_aoa: tuple[float, float] | None = None,
) -> list[PathComponent]:
    """Rayleigh-faded paths with uniform angles; optionally pin the first path's arrival."""
    if num_paths < 1:
        raise InputDomainError("num_paths must be >= 1")
    paths = []
    for l in range(num_paths):
        gain = rayleigh_gain(rng, mean_path_power)
        aoa = random_angles(rng)
        aod = random_angles(rng)
        if l == 0 and first_aoa is not None:
            aoa = (float(first_aoa[0]), float(first_aoa[1]))
        paths.append(PathComponent(gain, aoa[0], aoa[1], aod[0], aod[1]))
    return paths


def default_reward_cap(
    tx_power: float, noise_power: float, n_bs: int, n_ue: int, mean_path_power: float = 1.0
) -> float:
    """Aligned single-path SNR: (P / sigma^2) * N_BS * N_UE * mean path power."""
    return tx_power / noise_power * n_bs * n_ue * mean_path_power


@dataclass(frozen=True, eq=False)
class Environment:
    """Everything needed to answer "what does strategy s yield".

    ``reward_cap`` defaults to :func:`default_reward_cap`; it must be given
    explicitly when ``tx_power`` is zero.
    """

    channel: ChannelRealization
    precoder: np.ndarray
    tx_power: float
    noise_power: float = 1.0
    samples_per_dwell: int = DEFAULT_SAMPLES_PER_DWELL
    reward_cap: float | None = None
    mean_path_power: float = field(default=1.0, repr=False)

    def __post_init__(self):
        f = np.asarray(self.precoder, dtype=complex)
        if f.shape != (self.channel.bs_config.size,):
            raise InputDomainError(f"precoder shape {f.shape} != ({self.channel.bs_config.size},)")
        if abs(np.vdot(f, f).real - 1.0) > 1e-12:
            raise InputDomainError("precoder must have unit norm")
        object.__setattr__(self, "precoder", f)
        if not (self.tx_power >= 0 and math.isfinite(self.tx_power)):
            raise InputDomainError(f"tx_power must be finite and >= 0, got {self.tx_power!r}")
        if not self.noise_power > 0:
            raise InputDomainError(f"noise_power must be positive, got {self.noise_power!r}")
        if int(self.samples_per_dwell) != self.samples_per_dwell or self.samples_per_dwell < 1:
            raise InputDomainError(f"samples_per_dwell must be >= 1, got {self.samples_per_dwell!r}")
        if self.reward_cap is None:
            cap = default_reward_cap(
                self.tx_power,
                self.noise_power,
                self.channel.bs_config.size,
                self.channel.ue_config.size,
                self.mean_path_power,
            )
            object.__setattr__(self, "reward_cap", cap)
        if not self.reward_cap > 0:
            raise InputDomainError("reward_cap must be positive (pass it explicitly when tx_power = 0)")

    @property
    def snr_scale(self) -> float:
        return self.tx_power / self.noise_power

    @cached_property
    def effective_channel(self) -> np.ndarray:
        """H f_RF, the N_UE-vector every combiner is applied to."""
        return self.channel.matrix @ self.precoder

    def with_channel(self, channel: ChannelRealization) -> "Environment":
        return replace(self, channel=channel)

    def with_tx_power(self, tx_power: float, keep_cap: bool = True) -> "Environment":
        return replace(self, tx_power=tx_power, reward_cap=self.reward_cap if keep_cap else None)


def combiner_snr(env: Environment, combiner: np.ndarray) -> float:
    """Noiseless SNR (P / sigma^2) |w^H H f|^2 for an arbitrary combiner ``w``."""
    return env.snr_scale * abs(np.vdot(combiner, env.effective_channel)) ** 2


def snr_many(env: Environment, azimuth, elevation) -> np.ndarray:
    """Unnormalized noiseless SNR for many directions at once."""
    w = array_responses(env.channel.ue_config, azimuth, elevation)
    return env.snr_scale * np.abs(w.conj() @ env.effective_channel) ** 2


def expected_costs(env: Environment, azimuth, elevation) -> np.ndarray:
    return snr_many(env, azimuth, elevation) / env.reward_cap


def expected_cost(env: Environment, s: Strategy) -> float:
    """Noiseless normalized SNR of direction ``s``."""
    return float(expected_costs(env, s.azimuth, s.elevation)[0])


def estimate_snr(env: Environment, s: Strategy, rng: np.random.Generator) -> float:
    """Unbiased SNR estimate from ``samples_per_dwell`` received symbols (may be negative).

    Draws Gaussian symbols of power P and white noise vectors, combines them
    with the response toward ``s`` and subtracts the known noise floor.
    """
    k = env.samples_per_dwell
    if k < 1:
        raise InputDomainError("samples_per_dwell must be >= 1")
    w = array_response(env.channel.ue_config, s.azimuth, s.elevation)
    n_ue = w.shape[0]
    symbols = math.sqrt(env.tx_power / 2.0) * (rng.standard_normal(k) + 1j * rng.standard_normal(k))
    noise = math.sqrt(env.noise_power / 2.0) * (
        rng.standard_normal((n_ue, k)) + 1j * rng.standard_normal((n_ue, k))
    )
    received = np.outer(env.effective_channel, symbols) + noise
    y = w.conj() @ received
    return (float(np.mean(np.abs(y) ** 2)) - env.noise_power) / env.noise_power


def measure_reward(env: Environment, s: Strategy, rng: np.random.Generator) -> float:
    """Noisy reward in [0, 1]: the SNR estimate floored at 0, normalized, capped at 1."""
    return min(max(0.0, estimate_snr(env, s, rng)) / env.reward_cap, 1.0)


def expected_reward(env: Environment, s: Strategy) -> float:
    """Exact mean of :func:`measure_reward`, floor and cap included.

    With a unit-norm combiner each y_k is circular Gaussian with variance
    P|g|^2 + sigma^2, so K * mean|y|^2 / (P|g|^2 + sigma^2) ~ Gamma(K).
    """
    return float(clipped_reward_mean(snr_many(env, s.azimuth, s.elevation), env.samples_per_dwell, env.reward_cap)[0])


def clipped_reward_mean(snr, k: int, cap: float) -> np.ndarray:
    snr = np.asarray(snr, dtype=float)
    theta = snr + 1.0
    lo = k / theta
    hi = k * (1.0 + cap) / theta
    g_k = stats.gamma(k)
    g_k1 = stats.gamma(k + 1)
    body = theta * (g_k1.cdf(hi) - g_k1.cdf(lo)) - (g_k.cdf(hi) - g_k.cdf(lo))
    return (body + cap * g_k.sf(hi)) / cap
