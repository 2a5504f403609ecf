"""Walker constellations and ground-station catalogs."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, TextIO

import numpy as np

from .astro import BodyParameters, CircularOrbit, propagate_many

DEFAULT_MIN_ELEVATION_DEG = 25.0
CATALOG_HEADER = ("name", "lat_deg", "lon_deg", "min_elevation_deg")


@dataclass(frozen=True)
class WalkerConfig:
    """Walker pattern parameters.

    ``raan_spread_deg`` is 180 for a Walker Star and 360 for a Walker Delta.
    ``phasing_offset_deg`` is added once per plane index, so plane p is
    shifted by ``p * phasing_offset_deg`` along-track.
    """

    planes: int = 9
    sats_per_plane: int = 9
    altitude_km: float = 1_120.0
    inclination_deg: float = 90.0
    raan_spread_deg: float = 180.0
    phasing_offset_deg: float = 0.0

    def __post_init__(self) -> None:
        if self.planes < 1 or self.sats_per_plane < 1:
            raise ValueError("planes and sats_per_plane must be >= 1")
        if not (math.isfinite(self.altitude_km) and self.altitude_km > 0.0):
            raise ValueError(f"altitude_km must be positive, got {self.altitude_km!r}")
        if not 0.0 <= self.inclination_deg <= 180.0:
            raise ValueError(f"inclination_deg must lie in [0, 180], got {self.inclination_deg!r}")

    @property
    def total(self) -> int:
        return self.planes * self.sats_per_plane


@dataclass(frozen=True)
class Satellite:
    plane: int
    slot: int
    orbit: CircularOrbit

    @property
    def label(self) -> str:
        return f"sat{self.plane}.{self.slot}"


@dataclass(frozen=True)
class Constellation:
    satellites: tuple[Satellite, ...]
    config: WalkerConfig | None = None

    def __len__(self) -> int:
        return len(self.satellites)

    @property
    def orbits(self) -> list[CircularOrbit]:
        return [s.orbit for s in self.satellites]

    def index(self, plane: int, slot: int) -> int:
        if self.config is None:
            for i, s in enumerate(self.satellites):
                if (s.plane, s.slot) == (plane, slot):
                    return i
            raise KeyError((plane, slot))
        return plane * self.config.sats_per_plane + slot

    def positions(self, body: BodyParameters, t: float) -> np.ndarray:
        """Inertial positions of all satellites at time t, shape (n, 3)."""
        return propagate_many(body, self.orbits, t)

    @classmethod
    def from_orbits(cls, orbits: Iterable[CircularOrbit]) -> Constellation:
        """Ad-hoc constellation, one orbit per plane."""
        return cls(tuple(Satellite(i, 0, o) for i, o in enumerate(orbits)))


EMPTY = Constellation(())


def generate_walker(config: WalkerConfig = WalkerConfig()) -> Constellation:
    sats = []
    for p in range(config.planes):
        raan = p * config.raan_spread_deg / config.planes
        for s in range(config.sats_per_plane):
            phase = s * 360.0 / config.sats_per_plane + p * config.phasing_offset_deg
            orbit = CircularOrbit(config.altitude_km, config.inclination_deg, raan, phase)
            sats.append(Satellite(p, s, orbit))
    return Constellation(tuple(sats), config)


@dataclass(frozen=True)
class GroundStation:
    name: str
    lat_deg: float
    lon_deg: float
    min_elevation_deg: float = DEFAULT_MIN_ELEVATION_DEG

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("ground station name must not be empty")
        if not -90.0 <= self.lat_deg <= 90.0:
            raise ValueError(f"{self.name}: latitude {self.lat_deg} outside [-90, 90]")
        if not -180.0 <= self.lon_deg < 180.0:
            raise ValueError(f"{self.name}: longitude {self.lon_deg} outside [-180, 180)")
        if not 0.0 <= self.min_elevation_deg < 90.0:
            raise ValueError(
                f"{self.name}: min elevation {self.min_elevation_deg} outside [0, 90)"
            )


class CatalogError(ValueError):
    """Raised for malformed ground-station catalogs; ``line`` is 1-based."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def load_ground_stations(catalog: TextIO | str) -> list[GroundStation]:
    """Parse a ground-station CSV catalog.

    Accepts an open text stream or the catalog text itself. Lines starting
    with ``#`` and blank lines are skipped; the first remaining line must be
    the header ``name,lat_deg,lon_deg,min_elevation_deg``.
    """
    text = catalog if isinstance(catalog, str) else catalog.read()
    if text.startswith("﻿"):
        text = text[1:]
    stations: list[GroundStation] = []
    seen: set[str] = set()
    header_seen = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f.strip() for f in next(csv.reader(io.StringIO(line)))]
        if not header_seen:
            if tuple(fields) != CATALOG_HEADER:
                raise CatalogError(lineno, f"expected header {','.join(CATALOG_HEADER)!r}")
            header_seen = True
            continue
        if len(fields) not in (3, 4):
            raise CatalogError(lineno, f"expected 3 or 4 fields, got {len(fields)}")
        name = fields[0]
        try:
            lat = float(fields[1])
            lon = float(fields[2])
            elev = (
                float(fields[3])
                if len(fields) == 4 and fields[3] != ""
                else DEFAULT_MIN_ELEVATION_DEG
            )
        except ValueError as exc:
            raise CatalogError(lineno, f"non-numeric field ({exc})") from None
        if name in seen:
            raise CatalogError(lineno, f"duplicate station name {name!r}")
        try:
            station = GroundStation(name, lat, lon, elev)
        except ValueError as exc:
            raise CatalogError(lineno, str(exc)) from None
        seen.add(name)
        stations.append(station)
    if not header_seen:
        raise CatalogError(1, "missing header")
    return stations


def default_ground_stations() -> list[GroundStation]:
    """The bundled catalog of Mars landing sites."""
    text = resources.files("marsorbit.data").joinpath("landing_sites.csv").read_text("utf-8")
    return load_ground_stations(text)
