"""Back-of-the-envelope feasibility numbers: transmit power, dust, soft errors, landing mass."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, TextIO

from .astro import MARS, BodyParameters, areostationary_altitude
from .coverage import fmt, slant_range

QUANTITY_CSV_HEADER = ("quantity", "value", "unit")

# Worst-case Ka-band attenuation through a large dust storm.
DUST_STORM_WORST_CASE_DB = 3.0
# Mean interval between planet-encircling dust storms; annotation only.
GLOBAL_DUST_STORM_INTERVAL_EARTH_YEARS = 5.5

SOFT_ERROR_RATE_HIGH = 1e-3  # per processor-day, shielded COTS in LEO
SOFT_ERROR_RATE_LOW = 1e-4
FIVE_YEARS_DAYS = 1_826

MARS2020_ROVER_KG = 1_025.0
MARS2020_EDL_KG = {
    "backshell": 575.0,
    "heat_shield": 440.0,
    "descent_stage": 670.0,
    "propellant": 400.0,
}


@dataclass(frozen=True)
class LinkReference:
    """A known-good link: ``power_w`` closes ``data_rate_bps`` over ``distance_km``."""

    power_w: float
    data_rate_bps: float
    distance_km: float

    def __post_init__(self) -> None:
        for name in ("power_w", "data_rate_bps", "distance_km"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")


def link_distance(
    body: BodyParameters, altitude_km: float, min_elevation_deg: float = 25.0, mode: str = "edge"
) -> float:
    """Ground-to-satellite distance used for power scaling.

    ``edge`` is the slant range at the minimum elevation (worst case),
    ``nadir`` is the altitude itself.
    """
    if mode == "edge":
        return slant_range(body.radius_km, altitude_km, min_elevation_deg)
    if mode == "nadir":
        return float(altitude_km)
    raise ValueError(f"unknown distance mode {mode!r}; expected 'edge' or 'nadir'")


def scale_power(ref: LinkReference, new_distance_km: float) -> float:
    """Transmit power for the same rate and margin at a new distance (inverse-square)."""
    if not new_distance_km > 0.0:
        raise ValueError("distance must be positive")
    ratio = new_distance_km / ref.distance_km
    return ref.power_w * ratio * ratio


def attenuation_factor(attenuation_db: float) -> float:
    if attenuation_db < 0.0:
        raise ValueError("attenuation must be non-negative")
    return 10.0 ** (-attenuation_db / 10.0)


def expected_soft_errors(rate_per_processor_day: float, processors: float, days: float) -> float:
    """Mean number of soft errors, treating each processor-day as an independent Poisson process."""
    if min(rate_per_processor_day, processors, days) < 0:
        raise ValueError("inputs must be non-negative")
    return rate_per_processor_day * processors * days


@dataclass(frozen=True)
class MassBudget:
    payload_kg: float
    edl_components: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.payload_kg < 0 or any(m < 0 for m in self.edl_components.values()):
            raise ValueError("masses must be non-negative")


MARS2020 = MassBudget(MARS2020_ROVER_KG, MARS2020_EDL_KG)


def mass_overhead(budget: MassBudget) -> tuple[float, float]:
    """Return (total EDL mass, EDL mass / payload mass)."""
    if not budget.payload_kg > 0:
        raise ValueError("payload mass must be positive to compute an overhead ratio")
    total = math.fsum(budget.edl_components.values())
    return total, total / budget.payload_kg


def power_comparison(
    body: BodyParameters = MARS,
    ref_power_w: float = 10.0,
    ref_rate_bps: float = 1_000.0,
    ref_altitude_km: float | None = None,
    target_altitude_km: float = 1_000.0,
    min_elevation_deg: float = 25.0,
    mode: str = "edge",
) -> dict[str, float]:
    """Scale a reference link at ``ref_altitude_km`` (default: areostationary) to a lower orbit."""
    if ref_altitude_km is None:
        ref_altitude_km = areostationary_altitude(body)
    d_ref = link_distance(body, ref_altitude_km, min_elevation_deg, mode)
    d_new = link_distance(body, target_altitude_km, min_elevation_deg, mode)
    ref = LinkReference(ref_power_w, ref_rate_bps, d_ref)
    return {
        "reference_distance_km": d_ref,
        "target_distance_km": d_new,
        "target_power_w": scale_power(ref, d_new),
    }


def write_quantities_csv(rows: Iterable[tuple[str, float, str]], out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(QUANTITY_CSV_HEADER)
    for name, value, unit in rows:
        writer.writerow([name, fmt(value), unit])
