"""Link budget arithmetic for 60 GHz mesh backhaul links.

Conventions: powers in dBm, gains in dB, distances in meters, angles in
radians. Noise and interference are always summed in linear milliwatts;
only the final ratio is converted back to dB.

Functions:
- fspl_db: free-space path loss 20*log10(4*pi*f*d/c).
- antenna_gain_db: directional gain of the sine (sinc) pattern at an
  off-boresight angle, clamped at a configurable sidelobe floor.
- received_power_dbm: boresight-to-boresight received power of an
  established link.
- interference_power_dbm: power leaked from one active link into the
  receiver of another, using the off-boresight angles of both antennas.
- total_interference_dbm: linear-domain sum over a set of active links.
- link_snir_db: signal over (noise + total interference), in dB.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, NamedTuple

SPEED_OF_LIGHT_M_S = 299_792_458.0

#: Sentinel for an empty interference sum (0 mW).
NO_INTERFERENCE_DBM = float("-inf")


class DirectedLink(NamedTuple):
    """One directed transmission tx -> rx between two mesh nodes."""

    tx: int
    rx: int


@dataclass(frozen=True)
class RadioConfig:
    """Radio constants shared by every backhaul link.

    Defaults are the 60 GHz fixed-wireless values used throughout the
    test scenarios: 30 dBm transmit power, 0.0205 dB/m rain fade margin,
    0.016 dB/m oxygen attenuation, 20 dB array gain and -100 dBm thermal
    noise.

    ``pattern_shape`` (rad^-1) sets the main-lobe width of the sine
    pattern and ``pattern_floor_db`` the relative sidelobe floor; both
    are model choices, not measured values. With ``eirp_mode`` the
    transmit power is read as EIRP, so only the relative transmit
    pattern (gain minus boresight gain) is applied on the tx side.
    """

    tx_power_dbm: float = 30.0
    carrier_hz: float = 60e9
    rain_margin_db_per_m: float = 0.0205
    o2_atten_db_per_m: float = 0.016
    boresight_gain_db: float = 20.0
    noise_dbm: float = -100.0
    pattern_shape: float = 10.0
    pattern_floor_db: float = -30.0
    eirp_mode: bool = False

    def __post_init__(self) -> None:
        if self.carrier_hz <= 0:
            raise ValueError(f"carrier_hz must be positive, got {self.carrier_hz}")
        if self.rain_margin_db_per_m < 0:
            raise ValueError("rain_margin_db_per_m must be non-negative")
        if self.o2_atten_db_per_m < 0:
            raise ValueError("o2_atten_db_per_m must be non-negative")
        if self.pattern_shape <= 0:
            raise ValueError("pattern_shape must be positive")
        if self.pattern_floor_db > 0:
            raise ValueError("pattern_floor_db must be <= 0")

    def with_noise(self, noise_dbm: float) -> "RadioConfig":
        """Copy of this config with a different receiver noise power."""
        return replace(self, noise_dbm=noise_dbm)

    @property
    def noise_mw(self) -> float:
        return 10.0 ** (self.noise_dbm / 10.0)


@dataclass(frozen=True)
class InterferenceContext:
    """The set of simultaneously active backhaul links seen as interferers.

    Only BS-to-BS links belong here; user access links are on dedicated
    resources and never interfere.
    """

    active_links: frozenset[DirectedLink]

    @classmethod
    def of(cls, links: Iterable[tuple[int, int]]) -> "InterferenceContext":
        return cls(frozenset(DirectedLink(*l) for l in links))

    def validate_bs_only(self, net) -> None:
        for link in self.active_links:
            if net.is_user(link.tx) or net.is_user(link.rx):
                raise ValueError(f"interference link {link} touches a user node")

    def __iter__(self):
        return iter(self.active_links)

    def __len__(self) -> int:
        return len(self.active_links)


def fspl_db(carrier_hz: float, distance_m: float) -> float:
    """Free-space path loss in dB: 20*log10(4*pi*f*d/c)."""
    if distance_m <= 0:
        raise ValueError(f"distance_m must be positive, got {distance_m}")
    if carrier_hz <= 0:
        raise ValueError(f"carrier_hz must be positive, got {carrier_hz}")
    return 20.0 * math.log10(4.0 * math.pi * carrier_hz * distance_m / SPEED_OF_LIGHT_M_S)


def antenna_gain_db(theta_rad: float, cfg: RadioConfig) -> float:
    """Directional antenna gain at angle ``theta_rad`` off boresight.

    Sine pattern: boresight gain plus 20*log10(|sinc(B_w * theta)|),
    clamped below at ``pattern_floor_db``. Even in theta.
    """
    x = cfg.pattern_shape * theta_rad
    if x == 0.0:
        relative = 0.0
    else:
        s = abs(math.sin(x) / x)
        if s == 0.0:
            relative = cfg.pattern_floor_db
        else:
            relative = max(cfg.pattern_floor_db, 20.0 * math.log10(s))
    return cfg.boresight_gain_db + relative


def _tx_gain_db(theta_rad: float, cfg: RadioConfig) -> float:
    # EIRP already includes the boresight gain, so only the relative
    # pattern rolls off the transmit side in that mode.
    gain = antenna_gain_db(theta_rad, cfg)
    if cfg.eirp_mode:
        return gain - cfg.boresight_gain_db
    return gain


def received_power_dbm(distance_m: float, cfg: RadioConfig) -> float:
    """Received power of an established link, both antennas on boresight.

    P_tx + G_rx(0) - FSPL - d*FM_rain - d*Att_O2 + G_tx(0); the transmit
    gain term is dropped when ``cfg.eirp_mode`` is set.
    """
    if distance_m <= 0:
        raise ValueError(f"distance_m must be positive, got {distance_m}")
    loss = (
        fspl_db(cfg.carrier_hz, distance_m)
        + distance_m * cfg.rain_margin_db_per_m
        + distance_m * cfg.o2_atten_db_per_m
    )
    return cfg.tx_power_dbm + antenna_gain_db(0.0, cfg) - loss + _tx_gain_db(0.0, cfg)


def interference_power_dbm(
    victim_rx: int,
    victim_partner_tx: int,
    interferer_tx: int,
    interferer_partner_rx: int,
    geometry,
    cfg: RadioConfig,
) -> float:
    """Power leaked by ``interferer_tx`` into the receiver at ``victim_rx``.

    The victim's antenna is aimed at its own transmitter
    ``victim_partner_tx``; the interferer's antenna is aimed at its own
    receiver ``interferer_partner_rx``. Both off-boresight angles are
    taken from the planar geometry, which must provide ``distance_m``
    and ``angle_at``.
    """
    d = geometry.distance_m(victim_rx, interferer_tx)
    alpha = geometry.angle_at(victim_rx, victim_partner_tx, interferer_tx)
    beta = geometry.angle_at(interferer_tx, interferer_partner_rx, victim_rx)
    loss = (
        fspl_db(cfg.carrier_hz, d)
        + d * cfg.rain_margin_db_per_m
        + d * cfg.o2_atten_db_per_m
    )
    return cfg.tx_power_dbm + antenna_gain_db(alpha, cfg) - loss + _tx_gain_db(beta, cfg)


def total_interference_dbm(
    victim_rx: int,
    victim_partner_tx: int,
    ctx: Iterable[tuple[int, int]],
    geometry,
    cfg: RadioConfig,
) -> float:
    """Sum of all interferer powers at ``victim_rx``, in dBm.

    Summation happens in linear milliwatts; an empty context yields the
    -inf sentinel. Links are visited in sorted order so the float sum is
    reproducible.
    """
    total_mw = 0.0
    for tx, rx in sorted(ctx):
        p_in = interference_power_dbm(victim_rx, victim_partner_tx, tx, rx, geometry, cfg)
        total_mw += 10.0 ** (p_in / 10.0)
    if total_mw == 0.0:
        return NO_INTERFERENCE_DBM
    return 10.0 * math.log10(total_mw)


def link_snir_db(
    tx_node: int,
    rx_node: int,
    ctx: Iterable[tuple[int, int]],
    geometry,
    cfg: RadioConfig,
) -> float:
    """SNIR of the directed link tx -> rx under the given interferer set.

    Signal and (noise + interference) are combined in milliwatts, the
    ratio returned in dB. Asymmetric in general: the receiving end
    determines both the signal path and the interference seen.
    """
    prx = received_power_dbm(geometry.distance_m(tx_node, rx_node), cfg)
    denom_mw = cfg.noise_mw
    for tx, rx in sorted(ctx):
        p_in = interference_power_dbm(rx_node, tx_node, tx, rx, geometry, cfg)
        denom_mw += 10.0 ** (p_in / 10.0)
    return prx - 10.0 * math.log10(denom_mw)


def exclude_interferers(
    tx_node: int, rx_node: int, links: Iterable[tuple[int, int]]
) -> list[DirectedLink]:
    """Filter an interferer set down to the links that can affect tx -> rx.

    Dropped: the link itself, links transmitted by the receiver (a node
    does not interfere with its own receiver) and links transmitted by
    the transmitter (one transmit beam per BS). The identical-link case
    is covered by the transmitter rule.
    """
    kept = [
        DirectedLink(t, r)
        for t, r in links
        if t != tx_node and t != rx_node
    ]
    kept.sort()
    return kept
