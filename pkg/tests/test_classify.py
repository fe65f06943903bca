"""Window classification and abnormal-event detection."""

import random

import numpy as np
import pytest

from bsnsim.classify import (
    AbnormalTrigger,
    ActivityClass,
    ClassifierConfig,
    classify_window,
    detect_abnormal,
    events_to_csv,
)
from bsnsim.errors import ParameterError
from bsnsim.motion import AccelSample, ActivityKind, compose_schedule, generate_trace


def _window(values):
    return [AccelSample(i / 60.0, ax, ay, az) for i, (ax, ay, az) in enumerate(values)]


def test_constant_gravity_is_rest():
    window = _window([(0.0, 0.0, 1.0)] * 60)
    assert classify_window(window) is ActivityClass.REST


def test_in_band_oscillation_is_slow():
    # total oscillates within [0.95, 1.25]: outside the rest band, inside [0.9, 1.3]
    values = [(0.0, 0.0, 0.95 + 0.3 * (i % 2)) for i in range(60)]
    assert classify_window(_window(values)) is ActivityClass.SLOW_ACTIVITY


def test_out_of_band_total_is_fast():
    values = [(0.0, 0.0, 1.0)] * 59 + [(0.0, 0.0, 2.1)]
    assert classify_window(_window(values)) is ActivityClass.FAST_ACTIVITY


def test_axis_delta_is_fast():
    # totals stay in band but the z axis swings more than 2 g
    values = [(0.0, 0.0, 1.1), (0.0, 0.0, -1.1)] * 30
    assert classify_window(_window(values)) is ActivityClass.FAST_ACTIVITY


def test_empty_window_rejected():
    with pytest.raises(ParameterError):
        classify_window([])


def test_order_invariance():
    trace = generate_trace(ActivityKind.SLOW_WALK, 1.0, 60.0, seed=5)
    window = list(trace.samples())
    rng = random.Random(3)
    for _ in range(20):
        shuffled = window[:]
        rng.shuffle(shuffled)
        assert classify_window(shuffled) is classify_window(window)


def test_rest_trace_has_no_events():
    for seed in range(20):
        trace = generate_trace(ActivityKind.REST, 10.0, 60.0, seed=seed)
        assert detect_abnormal(trace) == []


def test_slow_walk_has_no_events():
    for seed in range(20):
        trace = generate_trace(ActivityKind.SLOW_WALK, 10.0, 60.0, seed=seed)
        assert detect_abnormal(trace) == []


def test_rest_fall_rest_yields_one_event_over_fall():
    trace = compose_schedule(
        [(ActivityKind.REST, 4.0), (ActivityKind.FALL, 3.0), (ActivityKind.REST, 4.0)], seed=11
    )
    events = detect_abnormal(trace)
    assert len(events) == 1
    event = events[0]
    fall_start, fall_end = 4.0, 7.0
    assert event.t_start < fall_end and event.t_end > fall_start
    assert event.trigger is AbnormalTrigger.TOTAL_ACCEL_BOUND
    assert event.peak_total_a > 1.3 or event.peak_total_a < 0.9


def test_brute_force_cross_check():
    # every sample with total outside the band must land inside some event
    trace = compose_schedule(
        [(ActivityKind.REST, 3.0), (ActivityKind.JUMP, 3.0), (ActivityKind.REST, 3.0)], seed=7
    )
    events = detect_abnormal(trace)
    total = trace.total()
    outside = np.flatnonzero((total < 0.9) | (total > 1.3))
    assert outside.size > 0
    for i in outside:
        t = trace.t[i]
        assert any(ev.t_start <= t <= ev.t_end for ev in events)


def test_monotonicity_in_band_width():
    cfg_narrow = ClassifierConfig(low_threshold_g=0.92, high_threshold_g=1.25)
    cfg_wide = ClassifierConfig(low_threshold_g=0.85, high_threshold_g=1.45)
    for seed in range(10):
        trace = compose_schedule(
            [(ActivityKind.REST, 2.0), (ActivityKind.FALL, 3.0), (ActivityKind.REST, 2.0), (ActivityKind.JUMP, 3.0)],
            seed=seed,
        )
        n_narrow = len(detect_abnormal(trace, cfg_narrow))
        n_wide = len(detect_abnormal(trace, cfg_wide))
        assert n_wide <= n_narrow


def test_config_validation():
    with pytest.raises(ParameterError):
        ClassifierConfig(low_threshold_g=1.1)
    with pytest.raises(ParameterError):
        ClassifierConfig(high_threshold_g=0.8)
    with pytest.raises(ParameterError):
        ClassifierConfig(window_s=0.0)


def test_events_csv_shape():
    trace = compose_schedule([(ActivityKind.REST, 2.0), (ActivityKind.FALL, 2.0)], seed=2)
    text = events_to_csv(detect_abnormal(trace))
    lines = text.strip().splitlines()
    assert lines[0] == "t_start,t_end,trigger,peak_total_a"
    assert len(lines) == 2
    fields = lines[1].split(",")
    assert float(fields[0]) <= float(fields[1])
