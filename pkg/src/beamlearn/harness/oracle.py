"""Brute-force best direction for a known environment."""

from __future__ import annotations

import math

import numpy as np
from scipy import optimize

from ..channel import HALF_PI, TWO_PI, Environment, Strategy, expected_costs
from ..errors import InputDomainError
from ..schedule import EnvSchedule, split_segments

DEFAULT_RESOLUTION = 512
_CHUNK = 1 << 14


def _eval_grid(env: Environment, az: np.ndarray, el: np.ndarray) -> np.ndarray:
    aa, ee = np.meshgrid(az, el, indexing="ij")
    aa, ee = aa.ravel(), ee.ravel()
    out = np.empty(aa.size)
    for lo in range(0, aa.size, _CHUNK):
        out[lo : lo + _CHUNK] = expected_costs(env, aa[lo : lo + _CHUNK], ee[lo : lo + _CHUNK])
    return out.reshape(len(az), len(el))


def _local_grid(center: float, step: float, lo: float, hi: float, points: int = 10) -> np.ndarray:
    fine = center + step * np.arange(-points, points + 1) / points
    return np.unique(np.clip(fine, lo, hi))


def oracle_optimal(env: Environment, coarse_resolution: int = DEFAULT_RESOLUTION) -> tuple[Strategy, float]:
    """Best direction and its normalized expected cost.

    Coarse grid with ``coarse_resolution`` azimuth intervals and half as many
    elevation intervals (equal angular spacing), one 10x finer grid over the
    cells around the best point, then a bounded Nelder-Mead polish.
    """
    if coarse_resolution < 2:
        raise InputDomainError(f"coarse_resolution must be >= 2, got {coarse_resolution!r}")
    n_az = int(coarse_resolution)
    n_el = max(1, n_az // 2)
    az = np.linspace(0.0, TWO_PI, n_az + 1)
    el = np.linspace(-HALF_PI, HALF_PI, n_el + 1)
    coarse = _eval_grid(env, az, el)
    i, j = np.unravel_index(np.argmax(coarse), coarse.shape)
    best_az, best_el, best = az[i], el[j], coarse[i, j]

    faz = _local_grid(best_az, TWO_PI / n_az, 0.0, TWO_PI)
    fel = _local_grid(best_el, math.pi / n_el, -HALF_PI, HALF_PI)
    fine = _eval_grid(env, faz, fel)
    i, j = np.unravel_index(np.argmax(fine), fine.shape)
    if fine[i, j] > best:
        best_az, best_el, best = faz[i], fel[j], fine[i, j]

    if best > 0:
        res = optimize.minimize(
            lambda x: -expected_costs(env, x[0], x[1])[0],
            x0=[best_az, best_el],
            method="Nelder-Mead",
            bounds=[(0.0, TWO_PI), (-HALF_PI, HALF_PI)],
            options={"xatol": 1e-11, "fatol": 1e-16, "maxiter": 2000},
        )
        if -res.fun > best:
            best_az, best_el, best = float(res.x[0]), float(res.x[1]), float(-res.fun)
    return Strategy(float(best_az), float(best_el)), float(best)


def oracle_series(
    schedule: EnvSchedule, n: int, coarse_resolution: int = DEFAULT_RESOLUTION
) -> tuple[np.ndarray, list[tuple[int, Strategy, float]]]:
    """Per-step oracle value over ``n`` steps, recomputed after each change."""
    values = np.empty(n)
    points = []
    for (a, b), env in zip(split_segments(schedule.starts, n), schedule.envs):
        s, v = oracle_optimal(env, coarse_resolution)
        values[a - 1 : b] = v
        points.append((a, s, v))
    return values, points
