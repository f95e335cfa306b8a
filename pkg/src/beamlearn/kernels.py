"""Per-step bandit loops.

Every function here runs either under numba or as interpreted numpy (see
``_accel``).  Scalars that feed transcendental functions go through
``math`` so both paths call the same libm routines and agree bit for bit.

Noise enters through pre-drawn ``gamma_draws``: with a unit-norm combiner the
K filtered samples y_k are i.i.d. circular Gaussian with variance
P|g|^2 + sigma^2, so K * mean|y|^2 / (P|g|^2 + sigma^2) is Gamma(K, 1).
"""

from __future__ import annotations

import math

import numpy as np

from ._accel import njit


@njit
def ucb1_choose(plays, means, total):
    j = np.argmin(plays)
    if plays[j] == 0:
        return j
    scale = 2.0 * math.log(total)
    index = means + np.sqrt(scale / plays)
    return np.argmax(index)


@njit
def greedy_choose(means):
    return np.argmax(means)


@njit
def stats_update(plays, means, j, reward):
    plays[j] += 1
    means[j] += (reward - means[j]) / plays[j]


@njit
def noisy_reward(snr, gamma_draw, k, cap):
    # SNR estimate = mean|y|^2 / sigma^2 - 1, floored at 0, normalized, capped at 1
    raw = (snr + 1.0) * gamma_draw / k - 1.0
    if raw < 0.0:
        raw = 0.0
    r = raw / cap
    if r > 1.0:
        r = 1.0
    return r


@njit
def ucb1_run(arm_snr, env_idx, gamma_draws, k, cap, plays, means, chosen, rewards):
    """Play ``len(env_idx)`` UCB1 steps, mutating ``plays``/``means`` in place."""
    total = 0
    for a in range(plays.shape[0]):
        total += plays[a]
    for t in range(env_idx.shape[0]):
        j = ucb1_choose(plays, means, total)
        r = noisy_reward(arm_snr[env_idx[t], j], gamma_draws[t], k, cap)
        stats_update(plays, means, j, r)
        total += 1
        chosen[t] = j
        rewards[t] = r


@njit
def eps_greedy_run(
    arm_snr, env_idx, gamma_draws, u_explore, u_pick, eps0, t0, k, cap, plays, means, chosen, rewards
):
    """Epsilon-greedy with exploration probability eps0 ** (t / 10), t = t0, t0 + 1, ..."""
    n_arms = plays.shape[0]
    for i in range(env_idx.shape[0]):
        p = eps0 ** ((t0 + i) / 10.0)
        if u_explore[i] < p:
            j = int(u_pick[i] * n_arms)
            if j >= n_arms:
                j = n_arms - 1
        else:
            j = greedy_choose(means)
        r = noisy_reward(arm_snr[env_idx[i], j], gamma_draws[i], k, cap)
        stats_update(plays, means, j, r)
        chosen[i] = j
        rewards[i] = r


@njit
def drifting_run(
    arm_snr, env_idx, gamma_draws, k, cap, window, act_plays, act_means, next_plays, next_means,
    chosen, rewards, frames,
):
    """One BLB round split into overlapping frames of ``window`` steps.

    Frame 1 spans [0, W) and acts throughout.  Frame w >= 2 spans
    [(w-1)W/2, (w+1)W/2): it is warmed (updated, not consulted) in its first
    half while frame w-1 acts, then acts in its second half.  Statistics of a
    frame start from zero.  Returns the number of the last acting frame.
    """
    half = window // 2
    n_steps = env_idx.shape[0]
    frame = 1
    warming = False
    act_total = 0
    next_total = 0
    for tau in range(n_steps):
        if tau >= half and tau % half == 0:
            if tau >= window:
                act_plays[:] = next_plays
                act_means[:] = next_means
                act_total = next_total
                frame += 1
            next_plays[:] = 0
            next_means[:] = 0.0
            next_total = 0
            warming = tau + half < n_steps
        j = ucb1_choose(act_plays, act_means, act_total)
        r = noisy_reward(arm_snr[env_idx[tau], j], gamma_draws[tau], k, cap)
        stats_update(act_plays, act_means, j, r)
        act_total += 1
        if warming:
            stats_update(next_plays, next_means, j, r)
            next_total += 1
        chosen[tau] = j
        rewards[tau] = r
        frames[tau] = frame
    return frame


@njit
def ucb1_run_presampled(reward_table, plays, means, chosen):
    """UCB1 where ``reward_table[t, a]`` is the reward arm ``a`` would pay at step t."""
    total = 0
    for a in range(plays.shape[0]):
        total += plays[a]
    for t in range(reward_table.shape[0]):
        j = ucb1_choose(plays, means, total)
        stats_update(plays, means, j, reward_table[t, j])
        total += 1
        chosen[t] = j
