"""Empirical check of the Hölder condition on the expected-cost surface."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..blb import HolderParams
from ..channel import HALF_PI, TWO_PI, Environment, expected_costs
from ..errors import InputDomainError


@dataclass(frozen=True, eq=False)
class HolderReport:
    max_ratio: float
    ratios: np.ndarray
    distances: np.ndarray
    l_h: float
    alpha_h: float
    delta: float
    exponent: float  # slope of the binned worst-case |dC| against distance, log-log

    @property
    def holds(self) -> bool:
        return self.max_ratio <= self.l_h

    def quantiles(self, qs=(0.5, 0.9, 0.99, 0.999)) -> dict[float, float]:
        return {q: float(np.quantile(self.ratios, q)) for q in qs}

    def lines(self) -> list[str]:
        out = [
            f"pairs={len(self.ratios)} delta={self.delta:g} alpha_h={self.alpha_h:g}",
            f"max ratio (empirical L_H) = {self.max_ratio:.6g}  (assumed L_H = {self.l_h:g})",
            f"worst-case exponent ~ {self.exponent:.3f}",
        ]
        out += [f"  q{q:g}: {v:.6g}" for q, v in self.quantiles().items()]
        return out


def _binned_exponent(dist, diff, bins=12) -> float:
    edges = np.geomspace(dist.min(), dist.max(), bins + 1)
    xs, ys = [], []
    for lo, hi in zip(edges, edges[1:]):
        sel = (dist >= lo) & (dist < hi) & (diff > 0)
        if sel.any():
            xs.append(np.sqrt(lo * hi))
            ys.append(diff[sel].max())
    if len(xs) < 2:
        return float("nan")
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def holder_probe(
    env: Environment,
    num_pairs: int,
    delta: float,
    holder: HolderParams = HolderParams(),
    rng: np.random.Generator | None = None,
    normalized: bool = True,
) -> HolderReport:
    """Sample pairs within ``delta`` of each other and report |dC| / |ds|^alpha_h.

    Pairs are drawn with a uniform first point and a second point uniform in
    the disc of radius ``delta`` around it (clipped to the domain).
    Coincident pairs are skipped.
    """
    if not delta > 0:
        raise InputDomainError(f"delta must be positive, got {delta!r}")
    rng = np.random.default_rng() if rng is None else rng
    az = rng.uniform(0.0, TWO_PI, num_pairs)
    el = rng.uniform(-HALF_PI, HALF_PI, num_pairs)
    radius = delta * np.sqrt(rng.random(num_pairs))
    heading = rng.uniform(0.0, TWO_PI, num_pairs)
    az2 = np.clip(az + radius * np.cos(heading), 0.0, TWO_PI)
    el2 = np.clip(el + radius * np.sin(heading), -HALF_PI, HALF_PI)
    dist = np.hypot(az2 - az, el2 - el)
    keep = dist > 0
    az, el, az2, el2, dist = az[keep], el[keep], az2[keep], el2[keep], dist[keep]
    c1 = expected_costs(env, az, el)
    c2 = expected_costs(env, az2, el2)
    diff = np.abs(c1 - c2)
    if not normalized:
        diff = diff * env.reward_cap
    ratios = diff / dist**holder.alpha_h
    return HolderReport(
        max_ratio=float(ratios.max()) if ratios.size else 0.0,
        ratios=ratios,
        distances=dist,
        l_h=holder.l_h,
        alpha_h=holder.alpha_h,
        delta=float(delta),
        exponent=_binned_exponent(dist, diff) if ratios.size else float("nan"),
    )
