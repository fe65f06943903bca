"""Echo-test and star-network simulation over the interference model.

The echo protocol mirrors the two-module test bed: the base sends fixed
32-character messages, the remote loops each one back, and a message counts
as delivered only when the echoed copy returns before the timeout. Message
airtime is 250 kbps plus 1 ms of fixed overhead; a lost round trip consumes
exactly the timeout before the next message goes out.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, ScenarioError
from .frames import FRAME_LEN, SensorFrame, encode_frame
from .motion import AccelTrace
from .rf import ChannelSpec, InterferenceCalibration, link_budget, message_success_prob
from .scenario import Scenario
from .sensor import ReplayResult, initial_state, replay_trace

TX_RATE_BPS = 250_000
TX_OVERHEAD_MS = 1.0
LOG_MAGIC = b"BSLOG1\x00\x00"
FRAME_AIRTIME_MS = FRAME_LEN * 8 / TX_RATE_BPS * 1000.0 + TX_OVERHEAD_MS
MAC_CAPACITY = 0.9  # carrier-sense MAC defers cleanly below this offered load


def message_airtime_ms(n_chars: int) -> float:
    return n_chars * 8 / TX_RATE_BPS * 1000.0 + TX_OVERHEAD_MS


@dataclass(frozen=True)
class EchoTestConfig:
    channel: ChannelSpec
    tx_power_dbm: float
    n_messages: int = 1000
    message_len_chars: int = 32
    timeout_ms: float = 100.0
    runs: int = 10

    def __post_init__(self):
        if self.n_messages <= 0 or self.runs <= 0 or self.timeout_ms <= 0:
            raise ParameterError("n_messages, runs and timeout_ms must be positive")


@dataclass(frozen=True)
class RunStats:
    per_run_success: tuple[int, ...]
    n_messages: int
    mean_ratio: float
    std_ratio: float
    per_run_elapsed_ms: tuple[float, ...] = ()

    @classmethod
    def from_counts(cls, counts, n_messages: int, elapsed_ms=()) -> "RunStats":
        ratios = np.asarray(counts, dtype=float) / n_messages
        std = float(np.std(ratios, ddof=1)) if len(ratios) > 1 else 0.0
        return cls(
            per_run_success=tuple(int(c) for c in counts),
            n_messages=n_messages,
            mean_ratio=float(np.mean(ratios)),
            std_ratio=std,
            per_run_elapsed_ms=tuple(float(e) for e in elapsed_ms),
        )


def direction_success_prob(
    scenario: Scenario,
    channel: ChannelSpec,
    tx_power_dbm: float,
    tx_node: str,
    rx_node: str,
    calibration: InterferenceCalibration | None = None,
) -> float:
    """Per-message delivery probability for one direction of a link."""
    tx_pos = scenario.node(tx_node)
    rx_pos = scenario.node(rx_node)
    obstacles = tuple(scenario.obstacles.values())
    table = scenario.material_table()
    budget = link_budget(tx_power_dbm, tx_pos, rx_pos, obstacles, channel.center_mhz, table)
    return message_success_prob(
        budget,
        channel,
        tuple(scenario.interferers.values()),
        rx_position=rx_pos,
        obstacles=obstacles,
        material_loss=table,
        calibration=calibration,
    )


def echo_success_probs(
    scenario: Scenario,
    channel: ChannelSpec,
    tx_power_dbm: float,
    calibration: InterferenceCalibration | None = None,
) -> tuple[float, float]:
    """(outbound, inbound) per-message probabilities for the base<->remote pair."""
    for node in ("base", "remote"):
        if node not in scenario.nodes:
            raise ScenarioError(f"echo test needs node {node!r} in scenario {scenario.name!r}")
    p_out = direction_success_prob(scenario, channel, tx_power_dbm, "base", "remote", calibration)
    p_in = direction_success_prob(scenario, channel, tx_power_dbm, "remote", "base", calibration)
    return p_out, p_in


def simulate_echo_runs(p_out: float, p_in: float, cfg: EchoTestConfig, seed: int) -> RunStats:
    """Monte Carlo echo runs with pinned per-direction probabilities."""
    rng = np.random.default_rng(seed)
    airtime = message_airtime_ms(cfg.message_len_chars)
    counts = []
    elapsed = []
    for _ in range(cfg.runs):
        ok = (rng.random(cfg.n_messages) < p_out) & (rng.random(cfg.n_messages) < p_in)
        n_ok = int(ok.sum())
        counts.append(n_ok)
        elapsed.append(n_ok * 2.0 * airtime + (cfg.n_messages - n_ok) * cfg.timeout_ms)
    return RunStats.from_counts(counts, cfg.n_messages, elapsed)


def run_echo_test(
    cfg: EchoTestConfig,
    scenario: Scenario,
    seed: int,
    calibration: InterferenceCalibration | None = None,
) -> RunStats:
    """The full echo experiment: probabilities from the scenario, then runs."""
    p_out, p_in = echo_success_probs(scenario, cfg.channel, cfg.tx_power_dbm, calibration)
    return simulate_echo_runs(p_out, p_in, cfg, seed)


@dataclass
class NodeDelivery:
    node: str
    emitted: int
    delivered: int
    stats: RunStats


@dataclass
class StarResult:
    deliveries: dict[str, NodeDelivery]
    logged: list[tuple[float, str, SensorFrame]] = field(default_factory=list)

    def log_bytes(self) -> bytes:
        return LOG_MAGIC + b"".join(encode_frame(frame) for _, _, frame in self.logged)


def run_star_network(
    scenario: Scenario,
    traces: dict[str, AccelTrace],
    duration_s: float,
    seed: int,
    calibration: InterferenceCalibration | None = None,
    logger_node: str = "base",
) -> StarResult:
    """Drive each sensor node's state machine and transport its frames.

    Sensor nodes share the channel via carrier sensing: below the MAC
    capacity every frame gets airtime; above it the excess offered load is
    dropped at random. Surviving frames face the per-link interference
    probability independently. The logger records deliveries in emission
    order (ties broken by node name).
    """
    if not traces:
        raise ParameterError("star network needs at least one sensor node trace")
    if duration_s <= 0:
        raise ParameterError(f"duration_s must be positive, got {duration_s}")
    if logger_node not in scenario.nodes:
        raise ScenarioError(f"scenario {scenario.name!r} has no logger node {logger_node!r}")
    channel = ChannelSpec.wpan(scenario.channel)
    rng = np.random.default_rng(seed)

    emissions: dict[str, ReplayResult] = {}
    for idx, name in enumerate(sorted(traces)):
        if name not in scenario.nodes:
            raise ScenarioError(f"scenario {scenario.name!r} has no node {name!r}")
        trace = traces[name]
        n_keep = min(len(trace), int(round(duration_s * trace.rate_hz)))
        clipped = AccelTrace(
            rate_hz=trace.rate_hz,
            t=trace.t[:n_keep],
            ax=trace.ax[:n_keep],
            ay=trace.ay[:n_keep],
            az=trace.az[:n_keep],
            labels=trace.labels[:n_keep],
        )
        state = initial_state(node_id=idx + 1, sample_rate_hz=trace.rate_hz)
        emissions[name] = replay_trace(state, clipped)

    offered = sum(len(r.frames) for r in emissions.values()) * (FRAME_AIRTIME_MS / 1000.0) / duration_s
    drop_prob = 0.0 if offered <= MAC_CAPACITY else 1.0 - MAC_CAPACITY / offered

    deliveries: dict[str, NodeDelivery] = {}
    logged: list[tuple[float, str, SensorFrame]] = []
    for name in sorted(emissions):
        frames = emissions[name].frames
        p_link = direction_success_prob(
            scenario, channel, scenario.tx_power_dbm, name, logger_node, calibration
        )
        p = p_link * (1.0 - drop_prob)
        if frames:
            keep = rng.random(len(frames)) < p
        else:
            keep = np.zeros(0, dtype=bool)
        delivered = [(t, name, frame) for (t, frame), ok in zip(frames, keep) if ok]
        logged.extend(delivered)
        deliveries[name] = NodeDelivery(
            node=name,
            emitted=len(frames),
            delivered=len(delivered),
            stats=RunStats.from_counts([len(delivered)], max(1, len(frames))),
        )
    logged.sort(key=lambda item: (item[0], item[1]))
    return StarResult(deliveries=deliveries, logged=logged)


def read_frame_log(data: bytes) -> list[SensorFrame]:
    """Decode a binary frame log, validating the magic and every CRC."""
    from .frames import decode_frame

    if not data.startswith(LOG_MAGIC):
        raise ParameterError("not a frame log: bad magic header")
    body = data[len(LOG_MAGIC):]
    if len(body) % FRAME_LEN != 0:
        raise ParameterError(f"frame log length {len(body)} is not a multiple of {FRAME_LEN}")
    return [decode_frame(body[i : i + FRAME_LEN]) for i in range(0, len(body), FRAME_LEN)]
