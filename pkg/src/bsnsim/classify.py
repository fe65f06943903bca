"""Threshold-based activity classification and abnormal-event detection.

Two detection methods run side by side: (i) per-axis peak-to-peak change per
window against a delta threshold, and (ii) the total acceleration against a
[low, high] band. Firings from either method that fall within one window of
each other merge into a single abnormal event.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import ParameterError
from .motion import AccelSample, AccelTrace


class ActivityClass(Enum):
    REST = "rest"
    SLOW_ACTIVITY = "slow_activity"
    FAST_ACTIVITY = "fast_activity"


class AbnormalTrigger(Enum):
    TOTAL_ACCEL_BOUND = "total_accel_bound"
    PER_AXIS_DELTA = "per_axis_delta"


@dataclass(frozen=True)
class ClassifierConfig:
    low_threshold_g: float = 0.9
    high_threshold_g: float = 1.3
    axis_delta_threshold_g: float = 2.0
    window_s: float = 1.0
    rest_band_g: tuple[float, float] = (0.95, 1.05)
    rest_std_bound_g: float = 0.05

    def __post_init__(self):
        if not (0.0 < self.low_threshold_g < 1.0 < self.high_threshold_g):
            raise ParameterError(
                f"need 0 < low < 1 < high, got [{self.low_threshold_g}, {self.high_threshold_g}]"
            )
        if self.window_s <= 0:
            raise ParameterError(f"window_s must be positive, got {self.window_s}")


@dataclass(frozen=True)
class AbnormalEvent:
    t_start: float
    t_end: float
    trigger: AbnormalTrigger
    peak_total_a: float


def classify_window(samples: Sequence[AccelSample], cfg: ClassifierConfig | None = None) -> ActivityClass:
    """Classify one window of samples as rest, slow, or fast activity.

    Order-invariant: every criterion depends only on per-axis extrema,
    variance, and the set of total-acceleration values.
    """
    cfg = cfg or ClassifierConfig()
    if not samples:
        raise ParameterError("window holds no samples")
    ax = np.array([s.ax for s in samples])
    ay = np.array([s.ay for s in samples])
    az = np.array([s.az for s in samples])
    total = np.sqrt(ax**2 + ay**2 + az**2)

    lo, hi = cfg.rest_band_g
    in_rest_band = bool(total.min() >= lo and total.max() <= hi)
    quiet = all(float(np.std(a)) <= cfg.rest_std_bound_g for a in (ax, ay, az))
    if in_rest_band and quiet:
        return ActivityClass.REST

    out_of_band = bool(total.min() < cfg.low_threshold_g or total.max() > cfg.high_threshold_g)
    axis_delta = max(float(a.max() - a.min()) for a in (ax, ay, az))
    if out_of_band or axis_delta > cfg.axis_delta_threshold_g:
        return ActivityClass.FAST_ACTIVITY
    return ActivityClass.SLOW_ACTIVITY


def detect_abnormal(trace: AccelTrace, cfg: ClassifierConfig | None = None) -> list[AbnormalEvent]:
    """Find maximal regions where either detection method fires.

    Method (ii) is evaluated per sample; method (i) over half-overlapping
    sliding windows, marking every sample of a firing window. Firing runs
    separated by at most one window merge into one event.
    """
    cfg = cfg or ClassifierConfig()
    n = len(trace)
    if n == 0:
        raise ParameterError("trace holds no samples")
    total = trace.total()
    fire_total = (total < cfg.low_threshold_g) | (total > cfg.high_threshold_g)

    w = max(1, int(round(cfg.window_s * trace.rate_hz)))
    hop = max(1, w // 2)
    fire_axis = np.zeros(n, dtype=bool)
    for start in range(0, n, hop):
        end = min(n, start + w)
        for arr in (trace.ax, trace.ay, trace.az):
            seg = arr[start:end]
            if seg.max() - seg.min() > cfg.axis_delta_threshold_g:
                fire_axis[start:end] = True
                break
        if end == n:
            break

    fire = fire_total | fire_axis
    idx = np.flatnonzero(fire)
    if idx.size == 0:
        return []

    events: list[AbnormalEvent] = []
    run_start = idx[0]
    prev = idx[0]
    for i in idx[1:]:
        if i - prev > w:  # gap longer than one window: close the run
            events.append(_make_event(trace, total, fire_total, run_start, prev))
            run_start = i
        prev = i
    events.append(_make_event(trace, total, fire_total, run_start, prev))
    return events


def _make_event(trace: AccelTrace, total, fire_total, start: int, end: int) -> AbnormalEvent:
    region = slice(start, end + 1)
    if fire_total[region].any():
        trigger = AbnormalTrigger.TOTAL_ACCEL_BOUND
        fired = np.flatnonzero(fire_total[region]) + start
    else:
        trigger = AbnormalTrigger.PER_AXIS_DELTA
        fired = np.arange(start, end + 1)
    peak_idx = fired[np.argmax(np.abs(total[fired] - 1.0))]
    return AbnormalEvent(
        t_start=float(trace.t[start]),
        t_end=float(trace.t[end]),
        trigger=trigger,
        peak_total_a=float(total[peak_idx]),
    )


def events_to_csv(events: Sequence[AbnormalEvent]) -> str:
    """Render events as `t_start,t_end,trigger,peak_total_a` rows."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["t_start", "t_end", "trigger", "peak_total_a"])
    for ev in events:
        writer.writerow([f"{ev.t_start:.6g}", f"{ev.t_end:.6g}", ev.trigger.value, f"{ev.peak_total_a:.6g}"])
    return buf.getvalue()
