"""Adaptive channel selection: scan all 16 802.15.4 channels, score each by
expected round-trip message loss, and hop only past a hysteresis margin."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ParameterError
from .linksim import echo_success_probs
from .rf import ChannelSpec, InterferenceCalibration, WPAN_INDEX_RANGE
from .scenario import Scenario

DEFAULT_HYSTERESIS = 0.001


@dataclass(frozen=True)
class ScanReport:
    """Interference score (expected loss per message) per channel 11..26."""

    scores: tuple[float, ...]

    def __post_init__(self):
        if len(self.scores) != len(WPAN_INDEX_RANGE):
            raise ParameterError(f"scan report needs {len(WPAN_INDEX_RANGE)} entries")
        if any(not np.isfinite(s) or s < 0 for s in self.scores):
            raise ParameterError("scores must be finite and non-negative")

    def score(self, channel: int) -> float:
        return self.scores[channel - WPAN_INDEX_RANGE.start]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["channel", "score"])
        for channel, score in zip(WPAN_INDEX_RANGE, self.scores):
            writer.writerow([channel, f"{score:.8g}"])
        return buf.getvalue()


def scan(
    scenario: Scenario,
    calibration: InterferenceCalibration | None = None,
    tx_power_dbm: float | None = None,
    noise_sigma: float = 0.0,
    seed: int = 0,
) -> ScanReport:
    """Score every channel as 1 - round-trip success probability.

    noise_sigma > 0 adds seeded measurement noise for robustness tests.
    """
    power = scenario.tx_power_dbm if tx_power_dbm is None else tx_power_dbm
    scores = []
    for index in WPAN_INDEX_RANGE:
        p_out, p_in = echo_success_probs(scenario, ChannelSpec.wpan(index), power, calibration)
        scores.append(1.0 - p_out * p_in)
    if noise_sigma > 0.0:
        rng = np.random.default_rng(seed)
        scores = [max(0.0, s + rng.normal(0.0, noise_sigma)) for s in scores]
    return ScanReport(scores=tuple(scores))


def select_channel(report: ScanReport) -> int:
    """Channel index with the minimal score; ties break toward channel 11."""
    best = min(range(len(report.scores)), key=lambda i: (report.scores[i], i))
    return WPAN_INDEX_RANGE.start + best


def adaptive_policy(
    timeline: Sequence[tuple[float, Scenario]],
    horizon_s: float,
    rescan_period_s: float,
    initial_channel: int | None = None,
    hysteresis: float = DEFAULT_HYSTERESIS,
    calibration: InterferenceCalibration | None = None,
) -> list[tuple[float, int]]:
    """Rescan on a fixed period over a piecewise-constant environment.

    The channel changes only when the scan's best channel beats the current
    channel's fresh score by more than the hysteresis margin.
    """
    if rescan_period_s <= 0:
        raise ParameterError(f"rescan_period_s must be positive, got {rescan_period_s}")
    if not timeline:
        raise ParameterError("environment timeline is empty")
    changes = sorted(timeline, key=lambda item: item[0])

    def environment_at(t: float) -> Scenario:
        active = changes[0][1]
        for t_change, env in changes:
            if t_change <= t:
                active = env
            else:
                break
        return active

    current = initial_channel
    schedule: list[tuple[float, int]] = []
    t = 0.0
    while t < horizon_s:
        report = scan(environment_at(t), calibration)
        best = select_channel(report)
        if current is None:
            current = best
        elif report.score(best) < report.score(current) - hysteresis:
            current = best
        schedule.append((t, current))
        t += rescan_period_s
    return schedule
