from __future__ import annotations

import numpy as np

from ..errors import ContractViolation, InputDomainError


def cumulative_regret(trace, oracle_value, per_step_expected_costs) -> np.ndarray:
    """R_t = sum over tau <= t of (oracle_tau - expected cost of the played arm)."""
    costs = np.asarray(per_step_expected_costs, dtype=float)
    oracle = np.asarray(oracle_value, dtype=float)
    if oracle.ndim == 0:
        oracle = np.full(costs.shape, float(oracle))
    if trace is not None and len(trace) != len(costs):
        raise ContractViolation(f"trace has {len(trace)} steps but {len(costs)} costs were given")
    if oracle.shape != costs.shape:
        raise ContractViolation(f"oracle length {oracle.shape} != cost length {costs.shape}")
    return np.cumsum(oracle - costs)


def regret_exponent_fit(regret, fit_range: tuple[int, int], steps=None) -> float:
    """Least-squares slope of ln R_t against ln t for t in ``fit_range`` (inclusive).

    Nonpositive regret values are dropped before fitting.
    """
    regret = np.asarray(regret, dtype=float)
    steps = np.arange(1, len(regret) + 1) if steps is None else np.asarray(steps, dtype=float)
    lo, hi = fit_range
    keep = (steps >= lo) & (steps <= hi) & (regret > 0)
    if keep.sum() < 2:
        raise InputDomainError(f"fewer than two positive regret values in t in [{lo}, {hi}]")
    slope, _ = np.polyfit(np.log(steps[keep]), np.log(regret[keep]), 1)
    return float(slope)


def log_spaced_steps(lo: int, hi: int, count: int = 200) -> np.ndarray:
    return np.unique(np.round(np.geomspace(lo, hi, count)).astype(np.int64))
