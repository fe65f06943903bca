"""2.4 GHz spectrum model: channel geometry, path loss with material
attenuation, and per-message success probability under interference.

Channel plans
    802.15.4: channels 11..26, center 2405 + 5*(index-11) MHz, 2 MHz occupied.
    802.11b/g: channels 1..11, center 2412 + 5*(index-1) MHz, 25 MHz occupied.
    Microwave oven: fixed 2450 MHz emission, 20 MHz wide.

A message on a clear link always succeeds while the received power stays
above the -92 dBm sensitivity floor. Each active interferer then knocks out
messages independently with probability

    activity_factor * (spectral overlap / victim bandwidth) * power_factor

where the power factor is a logistic function of the interferer-to-signal
power ratio seen at the receiver, evaluated with a per-standard spectral
mask so off-center interferer energy counts at reduced weight. The logistic
midpoint/scale and the oven spectral slopes are calibration constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence

from .errors import ParameterError

Point = tuple[float, float]

RECEIVER_SENSITIVITY_DBM = -92.0
WPAN_INDEX_RANGE = range(11, 27)
WLAN_INDEX_RANGE = range(1, 12)


class RadioStandard(Enum):
    WPAN_154 = "wpan"
    WLAN_80211 = "wlan"
    MICROWAVE_OVEN = "oven"


def channel_center_freq(standard: RadioStandard, index: int) -> float:
    """Center frequency in MHz for a channel index of the given standard."""
    if standard is RadioStandard.WPAN_154:
        if index not in WPAN_INDEX_RANGE:
            raise ParameterError(f"802.15.4 channel must be 11..26, got {index}")
        return 2405.0 + 5.0 * (index - 11)
    if standard is RadioStandard.WLAN_80211:
        if index not in WLAN_INDEX_RANGE:
            raise ParameterError(f"802.11 channel must be 1..11, got {index}")
        return 2412.0 + 5.0 * (index - 1)
    return 2450.0


@dataclass(frozen=True)
class ChannelSpec:
    standard: RadioStandard
    index: int
    center_mhz: float
    occupied_bw_mhz: float

    @classmethod
    def wpan(cls, index: int) -> "ChannelSpec":
        return cls(RadioStandard.WPAN_154, index, channel_center_freq(RadioStandard.WPAN_154, index), 2.0)

    @classmethod
    def wlan(cls, index: int) -> "ChannelSpec":
        return cls(RadioStandard.WLAN_80211, index, channel_center_freq(RadioStandard.WLAN_80211, index), 25.0)

    @classmethod
    def microwave_oven(cls) -> "ChannelSpec":
        return cls(RadioStandard.MICROWAVE_OVEN, 0, 2450.0, 20.0)


def spectral_overlap(a: ChannelSpec, b: ChannelSpec) -> float:
    """Width in MHz of the intersection of two occupied-frequency intervals."""
    lo = max(a.center_mhz - a.occupied_bw_mhz / 2.0, b.center_mhz - b.occupied_bw_mhz / 2.0)
    hi = min(a.center_mhz + a.occupied_bw_mhz / 2.0, b.center_mhz + b.occupied_bw_mhz / 2.0)
    return max(0.0, hi - lo)


class Material(Enum):
    DRYWALL = "drywall"
    PLYWOOD = "plywood"
    GLASS = "glass"
    BRICK = "brick"
    CONCRETE = "concrete"
    ALUMINUM_SIDING = "aluminum_siding"
    METAL_APPLIANCE = "metal_appliance"
    PLANT_FOLIAGE = "plant_foliage"


# Per-traversal attenuation. Drywall/plywood/glass/brick/concrete follow the
# NIST construction-material figures; the appliance and foliage entries are
# fitted so the qualitative home-test outcomes emerge. All overridable per
# scenario.
DEFAULT_MATERIAL_LOSS_DB: dict[Material, float] = {
    Material.DRYWALL: 0.5,
    Material.PLYWOOD: 0.5,
    Material.GLASS: 3.0,
    Material.BRICK: 5.0,
    Material.CONCRETE: 30.0,
    Material.ALUMINUM_SIDING: 40.0,
    Material.METAL_APPLIANCE: 12.0,
    Material.PLANT_FOLIAGE: 15.0,
}

# Foliage scatters only in the near field: the loss applies when an endpoint
# of the path sits within this distance of the obstacle.
DEFAULT_NEAR_FIELD_M: dict[Material, float] = {
    Material.PLANT_FOLIAGE: 0.5,
}


@dataclass(frozen=True)
class Wall:
    x1: float
    y1: float
    x2: float
    y2: float


@dataclass(frozen=True)
class Disc:
    x: float
    y: float
    radius: float


@dataclass(frozen=True)
class Obstacle:
    material: Material
    shape: Wall | Disc
    loss_db: float | None = None          # None: use the material table
    near_field_m: float | None = None     # None: use the material default

    def effective_loss_db(self, table: Mapping[Material, float] | None = None) -> float:
        if self.loss_db is not None:
            return self.loss_db
        table = table or DEFAULT_MATERIAL_LOSS_DB
        return table[self.material]

    def effective_near_field_m(self) -> float | None:
        if self.near_field_m is not None:
            return self.near_field_m
        return DEFAULT_NEAR_FIELD_M.get(self.material)


def _orient(a: Point, b: Point, c: Point) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool:
    d1 = _orient(q1, q2, p1)
    d2 = _orient(q1, q2, p2)
    d3 = _orient(p1, p2, q1)
    d4 = _orient(p1, p2, q2)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)):
        return True
    # collinear touches count as a crossing
    for d, a, b, c in ((d1, q1, q2, p1), (d2, q1, q2, p2), (d3, p1, p2, q1), (d4, p1, p2, q2)):
        if d == 0 and _on_segment(a, b, c):
            return True
    return False


def _on_segment(a: Point, b: Point, c: Point) -> bool:
    return min(a[0], b[0]) <= c[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= c[1] <= max(a[1], b[1])


def _point_segment_distance(p: Point, a: Point, b: Point) -> float:
    abx, aby = b[0] - a[0], b[1] - a[1]
    apx, apy = p[0] - a[0], p[1] - a[1]
    denom = abx * abx + aby * aby
    if denom == 0.0:
        return math.hypot(apx, apy)
    t = min(1.0, max(0.0, (apx * abx + apy * aby) / denom))
    return math.hypot(p[0] - (a[0] + t * abx), p[1] - (a[1] + t * aby))


def _path_hits(shape: Wall | Disc, p1: Point, p2: Point) -> bool:
    if isinstance(shape, Wall):
        return _segments_intersect(p1, p2, (shape.x1, shape.y1), (shape.x2, shape.y2))
    return _point_segment_distance((shape.x, shape.y), p1, p2) <= shape.radius


def _endpoint_distance(shape: Wall | Disc, p: Point) -> float:
    if isinstance(shape, Wall):
        return _point_segment_distance(p, (shape.x1, shape.y1), (shape.x2, shape.y2))
    return max(0.0, math.hypot(p[0] - shape.x, p[1] - shape.y) - shape.radius)


def crossed_obstacles(p1: Point, p2: Point, obstacles: Sequence[Obstacle]) -> list[Obstacle]:
    """Obstacles whose geometry intersects the straight path p1 -> p2.

    Near-field-only materials count only when an endpoint lies within their
    near-field distance of the obstacle.
    """
    hit = []
    for ob in obstacles:
        if not _path_hits(ob.shape, p1, p2):
            continue
        near = ob.effective_near_field_m()
        if near is not None:
            if min(_endpoint_distance(ob.shape, p1), _endpoint_distance(ob.shape, p2)) > near:
                continue
        hit.append(ob)
    return hit


def path_loss(
    distance_m: float,
    obstacles_crossed: Sequence[Obstacle] = (),
    freq_mhz: float = 2450.0,
    material_loss: Mapping[Material, float] | None = None,
) -> float:
    """Free-space loss 20*log10(d) + 20*log10(f) - 27.55 plus obstacle losses."""
    if distance_m <= 0:
        raise ParameterError(f"distance_m must be positive, got {distance_m}")
    loss = 20.0 * math.log10(distance_m) + 20.0 * math.log10(freq_mhz) - 27.55
    for ob in obstacles_crossed:
        loss += ob.effective_loss_db(material_loss)
    return loss


@dataclass(frozen=True)
class LinkBudget:
    tx_power_dbm: float
    path_loss_db: float
    sensitivity_dbm: float = RECEIVER_SENSITIVITY_DBM

    @property
    def rx_power_dbm(self) -> float:
        return self.tx_power_dbm - self.path_loss_db

    @property
    def margin_db(self) -> float:
        return self.rx_power_dbm - self.sensitivity_dbm


def link_budget(
    tx_power_dbm: float,
    tx_pos: Point,
    rx_pos: Point,
    obstacles: Sequence[Obstacle] = (),
    freq_mhz: float = 2450.0,
    material_loss: Mapping[Material, float] | None = None,
    sensitivity_dbm: float = RECEIVER_SENSITIVITY_DBM,
) -> LinkBudget:
    d = max(0.05, math.hypot(rx_pos[0] - tx_pos[0], rx_pos[1] - tx_pos[1]))
    crossed = crossed_obstacles(tx_pos, rx_pos, obstacles)
    return LinkBudget(
        tx_power_dbm=tx_power_dbm,
        path_loss_db=path_loss(d, crossed, freq_mhz, material_loss),
        sensitivity_dbm=sensitivity_dbm,
    )


@dataclass(frozen=True)
class Interferer:
    channel: ChannelSpec
    position: Point
    tx_power_dbm: float
    activity_factor: float
    enabled: bool = True
    influence_radius_m: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.activity_factor <= 1.0:
            raise ParameterError(f"activity_factor must be in [0, 1], got {self.activity_factor}")


@dataclass(frozen=True)
class InterferenceCalibration:
    """Constants of the collision model, fitted against the home test tables."""

    logistic_midpoint_db: float = 14.128051
    logistic_scale_db: float = 2.085178
    oven_slope_low_db_per_mhz: float = 0.829670
    oven_slope_high_db_per_mhz: float = 1.030789


DEFAULT_CALIBRATION = InterferenceCalibration()


def spectral_weight_db(standard: RadioStandard, delta_mhz: float, calib: InterferenceCalibration) -> float:
    """In-band weighting of interferer power at a victim offset from its center.

    802.11 uses a flat main lobe with a steep shoulder; the magnetron
    emission falls off linearly per MHz with independent slopes below and
    above its 2450 MHz peak.
    """
    if standard is RadioStandard.WLAN_80211:
        d = abs(delta_mhz)
        if d <= 9.0:
            return 0.0
        if d <= 11.0:
            return -20.0 * (d - 9.0) / 2.0
        if d <= 22.0:
            return -20.0 - 25.0 * (d - 11.0) / 11.0
        return -45.0
    if standard is RadioStandard.MICROWAVE_OVEN:
        if delta_mhz < 0:
            return -calib.oven_slope_low_db_per_mhz * (-delta_mhz)
        return -calib.oven_slope_high_db_per_mhz * delta_mhz
    return 0.0


def _logistic(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def interference_power_factor(isr_db: float, calib: InterferenceCalibration) -> float:
    """Collision effectiveness in [0, 1] as a logistic of the I/S ratio in dB."""
    return _logistic((isr_db - calib.logistic_midpoint_db) / calib.logistic_scale_db)


def message_success_prob(
    link: LinkBudget,
    victim: ChannelSpec,
    interferers: Sequence[Interferer] = (),
    rx_position: Point | None = None,
    obstacles: Sequence[Obstacle] = (),
    material_loss: Mapping[Material, float] | None = None,
    calibration: InterferenceCalibration | None = None,
) -> float:
    """Probability that one message on the victim link is delivered.

    Zero below the sensitivity floor; otherwise the product over active
    interferers of their independent per-message survival terms.
    """
    if victim.standard is not RadioStandard.WPAN_154:
        raise ParameterError("victim channel must be an 802.15.4 channel")
    if link.margin_db < 0:
        return 0.0
    calib = calibration or DEFAULT_CALIBRATION
    p = 1.0
    for it in interferers:
        if not it.enabled or it.activity_factor <= 0.0:
            continue
        overlap = spectral_overlap(victim, it.channel)
        if overlap <= 0.0:
            continue
        if rx_position is None:
            raise ParameterError("rx_position required to evaluate interferers")
        d = math.hypot(rx_position[0] - it.position[0], rx_position[1] - it.position[1])
        if it.influence_radius_m is not None and d > it.influence_radius_m:
            continue
        d = max(d, 0.05)
        crossed = crossed_obstacles(it.position, rx_position, obstacles)
        i_rx = (
            it.tx_power_dbm
            - path_loss(d, crossed, it.channel.center_mhz, material_loss)
            + spectral_weight_db(it.channel.standard, victim.center_mhz - it.channel.center_mhz, calib)
        )
        isr = i_rx - link.rx_power_dbm
        pf = interference_power_factor(isr, calib)
        p *= 1.0 - min(1.0, it.activity_factor) * (overlap / victim.occupied_bw_mhz) * pf
    return max(0.0, min(1.0, p))

