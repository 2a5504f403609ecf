"""Latency and bandwidth models for edge applications served from orbit.

Four patterns are covered: offloading computation from a surface device,
two parties talking through the constellation, a pull-through cache for
data coming from Earth, and on-orbit reduction of data headed to Earth.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable, TextIO

from .coverage import fmt
from .network import TopologySnapshot, shortest_path

APPS_CSV_HEADER = ("scenario", "quantity", "value", "unit", "assumptions")

EARTH_RTT_S = 360.0
EARTH_BANDWIDTH_BPS = 40_500.0
# no published figure for the orbital access link; an assumption throughout
ORBIT_BANDWIDTH_BPS = 100e6


@dataclass(frozen=True)
class EarthLink:
    rtt_s: float = EARTH_RTT_S
    bandwidth_bps: float = EARTH_BANDWIDTH_BPS

    def __post_init__(self) -> None:
        if not (self.rtt_s > 0 and self.bandwidth_bps > 0):
            raise ValueError("Earth link parameters must be positive")


@dataclass(frozen=True)
class OrbitLink:
    rtt_ms: float = 12.5
    bandwidth_bps: float = ORBIT_BANDWIDTH_BPS

    def __post_init__(self) -> None:
        if not (self.rtt_ms > 0 and self.bandwidth_bps > 0):
            raise ValueError("orbit link parameters must be positive")


def offload_latency(payload_bits: float, uplink_bps: float, exec_time_s: float, orbit: OrbitLink) -> float:
    """Seconds to ship a payload up, run it on a satellite and get the answer back."""
    if payload_bits < 0 or exec_time_s < 0:
        raise ValueError("payload and execution time must be non-negative")
    if payload_bits > 0 and not uplink_bps > 0:
        raise ValueError("uplink rate must be positive")
    transmit = payload_bits / uplink_bps if payload_bits else 0.0
    return transmit + exec_time_s + orbit.rtt_ms / 1_000.0


def collaboration_latency(
    snap: TopologySnapshot, station_a: str, station_b: str, service_time_ms: float = 0.0
) -> float | None:
    """One-way ms between two stations over the snapshot, or None when no path exists.

    ``service_time_ms`` is added for on-path processing.
    """
    route = shortest_path(snap, station_a, station_b)
    if route is None:
        return None
    return route.delay_ms + service_time_ms


def cache_fetch_latency(object_bits: float, hit: bool, earth: EarthLink, orbit: OrbitLink) -> float:
    """Seconds for a surface client to get an object through an orbital pull-through cache.

    A miss pays the Earth round trip and Earth-link transfer on top of the
    orbital leg.
    """
    if object_bits < 0:
        raise ValueError("object size must be non-negative")
    latency = orbit.rtt_ms / 1_000.0 + object_bits / orbit.bandwidth_bps
    if not hit:
        latency += earth.rtt_s + object_bits / earth.bandwidth_bps
    return latency


@dataclass(frozen=True)
class UplinkResult:
    rate_bps: float
    fits_earth_link: bool


def preprocess_uplink_rate(
    raw_bps: float, retention_fraction: float, earth: EarthLink = EarthLink()
) -> UplinkResult:
    """Rate left for the Earth link after filtering/aggregation keeps ``retention_fraction``."""
    if not 0.0 <= retention_fraction <= 1.0:
        raise ValueError(f"retention_fraction must lie in [0, 1], got {retention_fraction!r}")
    if raw_bps < 0:
        raise ValueError("raw rate must be non-negative")
    rate = raw_bps * retention_fraction
    return UplinkResult(rate, rate <= earth.bandwidth_bps)


def write_apps_csv(rows: Iterable[tuple[str, str, float, str, str]], out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(APPS_CSV_HEADER)
    for scenario, quantity, value, unit, assumptions in rows:
        cell = value if isinstance(value, str) else fmt(value)
        writer.writerow([scenario, quantity, cell, unit, assumptions])
