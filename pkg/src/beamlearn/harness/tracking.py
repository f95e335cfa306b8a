"""Did the learner follow a moving beam?"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..drifting import modal_value


def elevation_gap(elevation: float, target: float) -> float:
    """Distance to ``target`` up to sign.

    The planar-array response depends on (sin az sin el, cos el), so
    (az + pi, -el) sees exactly the same SNR as (az, el); an oracle
    elevation is only defined up to its sign.
    """
    return min(abs(elevation - target), abs(elevation + target))


@dataclass(frozen=True)
class ChangeEvent:
    step: int
    oracle_elevation: float
    modal_elevation: float
    gap: float
    converged: bool


def reconvergence_events(trace, oracle_points, delay: int, span: int, tolerance: float) -> list[ChangeEvent]:
    """For each change, modal played elevation over steps [change + delay, change + delay + span].

    Changes whose window runs past the end of the trace are skipped.
    """
    events = []
    for start, s, _ in oracle_points[1:]:
        lo, hi = start + delay, start + delay + span
        if hi > len(trace):
            continue
        e = modal_value(trace.elevation[lo - 1 : hi])
        gap = elevation_gap(e, s.elevation)
        events.append(ChangeEvent(start, s.elevation, e, gap, gap <= tolerance))
    return events


def converged_fraction(events) -> float:
    return float(np.mean([e.converged for e in events])) if events else float("nan")
