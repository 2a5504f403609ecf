"""Visibility geometry, round-trip times and surface coverage statistics."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import TextIO

import numpy as np

from .astro import (
    MARS,
    SPEED_OF_LIGHT_KM_S,
    BodyParameters,
    InertialPosition,
    body_fixed_from_inertial,
    ground_point_position,
    orbital_period,
    unit_vectors_from_latlon,
)
from .constellation import Constellation, GroundStation

COVERAGE_CSV_HEADER = ("lat_band_deg", "covered_fraction", "max_rtt_ms", "mean_rtt_ms")
GAPS_CSV_HEADER = ("lat_band_deg", "uncovered_fraction", "max_gap_s")


def coverage_half_angle(radius_km: float, altitude_km: float, min_elevation_deg: float) -> float:
    """Earth-central (here: Mars-central) half-angle of one satellite's footprint, in degrees."""
    if altitude_km <= 0.0:
        raise ValueError(f"altitude must be positive, got {altitude_km!r}")
    if not 0.0 <= min_elevation_deg <= 90.0:
        raise ValueError(f"elevation must lie in [0, 90], got {min_elevation_deg!r}")
    eps = math.radians(min_elevation_deg)
    ratio = radius_km * math.cos(eps) / (radius_km + altitude_km)
    return max(0.0, math.degrees(math.acos(ratio) - eps))


def min_equatorial_ring(coverage_half_angle_deg: float) -> int:
    """Fewest equally spaced equatorial satellites whose footprints close the equator."""
    if not 0.0 < coverage_half_angle_deg <= 90.0:
        raise ValueError(f"half-angle must lie in (0, 90], got {coverage_half_angle_deg!r}")
    return math.ceil(180.0 / coverage_half_angle_deg)


def slant_range(radius_km: float, altitude_km: float, elevation_deg: float) -> float:
    """Station-to-satellite distance when the satellite is seen at ``elevation_deg``."""
    if elevation_deg == 90.0:
        return float(altitude_km)
    eps = math.radians(elevation_deg)
    r = radius_km + altitude_km
    rc = radius_km * math.cos(eps)
    return math.sqrt(r * r - rc * rc) - radius_km * math.sin(eps)


def rtt_ms(distance_km: float, processing_delay_ms: float = 0.0) -> float:
    """Out-and-back light time over ``distance_km`` plus an optional fixed processing delay."""
    if distance_km < 0.0:
        raise ValueError(f"distance must be non-negative, got {distance_km!r}")
    return 2_000.0 * distance_km / SPEED_OF_LIGHT_KM_S + processing_delay_ms


def elevation(station, satellite) -> float:
    """Elevation of ``satellite`` above the local horizon of ``station``, in degrees.

    Both positions must be in the same frame at the same instant.
    """
    st = station.as_array() if isinstance(station, InertialPosition) else np.asarray(station, float)
    sat = (
        satellite.as_array() if isinstance(satellite, InertialPosition) else np.asarray(satellite, float)
    )
    los = sat - st
    if not np.any(los):
        raise ValueError("station and satellite positions coincide")
    zenith = st / np.linalg.norm(st)
    up = float(los @ zenith)
    across = float(np.linalg.norm(np.cross(los, zenith)))
    return math.degrees(math.atan2(up, across))


def elevation_and_range(ground: np.ndarray, sats: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Pairwise elevation (deg) and slant range (km) for ground (n, 3) and sats (m, 3)."""
    ground = np.atleast_2d(ground)
    sats = np.atleast_2d(sats)
    g_norm = np.linalg.norm(ground, axis=1)
    up = (ground / g_norm[:, None]) @ sats.T - g_norm[:, None]
    rng = np.linalg.norm(sats[None, :, :] - ground[:, None, :], axis=2)
    across = np.sqrt(np.maximum(rng * rng - up * up, 0.0))
    return np.degrees(np.arctan2(up, across)), rng


@dataclass(frozen=True)
class VisibilitySample:
    time_s: float
    station: GroundStation
    satellite: int
    elevation_deg: float
    slant_range_km: float
    rtt_ms: float

    @property
    def visible(self) -> bool:
        return self.elevation_deg >= self.station.min_elevation_deg


def visibility(
    constellation: Constellation,
    station: GroundStation,
    t: float,
    body: BodyParameters = MARS,
    processing_delay_ms: float = 0.0,
) -> list[VisibilitySample]:
    """One sample per satellite, visible or not, for ``station`` at time t."""
    if len(constellation) == 0:
        return []
    st = ground_point_position(body, station.lat_deg, station.lon_deg, t).as_array()
    el, rng = elevation_and_range(st[None, :], constellation.positions(body, t))
    return [
        VisibilitySample(t, station, i, float(el[0, i]), float(rng[0, i]),
                         rtt_ms(float(rng[0, i]), processing_delay_ms))
        for i in range(len(constellation))
    ]


# --- surface grid ---------------------------------------------------------


def latlon_grid(grid_deg: float) -> tuple[np.ndarray, np.ndarray]:
    """Cell-center latitudes and longitudes of a regular lattice.

    The step is adjusted so it divides 180 and 360 evenly.
    """
    if not 0.0 < grid_deg <= 30.0:
        raise ValueError(f"grid_deg must lie in (0, 30], got {grid_deg!r}")
    n_lat = max(1, round(180.0 / grid_deg))
    n_lon = max(1, round(360.0 / grid_deg))
    lats = -90.0 + (np.arange(n_lat) + 0.5) * (180.0 / n_lat)
    lons = -180.0 + (np.arange(n_lon) + 0.5) * (360.0 / n_lon)
    return lats, lons


def time_steps(t0: float, t1: float, dt: float) -> np.ndarray:
    if not t1 > t0:
        raise ValueError(f"t1 must exceed t0 (got {t0!r}, {t1!r})")
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    n = int(math.floor((t1 - t0) / dt + 1e-9)) + 1
    return t0 + dt * np.arange(n)


def _nearest_visible(
    up_dot: np.ndarray, sat_r2: np.ndarray, radius: float, sin_eps: float, uniform: bool
) -> np.ndarray:
    """Slant range to the nearest visible satellite per grid point (inf if none).

    ``up_dot`` holds s·ĝ for each (point, satellite) pair.
    """
    if up_dot.shape[1] == 0:
        return np.full(up_dot.shape[0], np.inf)
    if uniform:
        # same radius for all satellites: nearest == highest == max projection
        best = up_dot.max(axis=1)
        rng = np.sqrt(np.maximum(sat_r2[0] + radius * radius - 2.0 * radius * best, 0.0))
        ok = best - radius >= sin_eps * rng
        return np.where(ok, rng, np.inf)
    rng = np.sqrt(np.maximum(sat_r2[None, :] + radius * radius - 2.0 * radius * up_dot, 0.0))
    ok = up_dot - radius >= sin_eps * rng
    return np.where(ok, rng, np.inf).min(axis=1)


def visible_mask(
    constellation: Constellation,
    body: BodyParameters,
    lat_deg: np.ndarray,
    lon_deg: np.ndarray,
    t: float,
    min_elevation_deg: float,
) -> np.ndarray:
    """Boolean mask: does each surface point see at least one satellite at time t."""
    return np.isfinite(
        _nearest_range_at(constellation, body, unit_vectors_from_latlon(lat_deg, lon_deg), t,
                          math.sin(math.radians(min_elevation_deg)))
    )


def _nearest_range_at(constellation, body, ground_units, t, sin_eps):
    sats = body_fixed_from_inertial(body, constellation.positions(body, t), t)
    r2 = np.einsum("ij,ij->i", sats, sats)
    uniform = bool(len(r2)) and np.ptp(r2) <= 1e-9 * r2[0]
    flat = ground_units.reshape(-1, 3)
    out = _nearest_visible(flat @ sats.T, r2, body.radius_km, sin_eps, uniform)
    return out.reshape(ground_units.shape[:-1])


@dataclass(frozen=True)
class BandStats:
    lat_min_deg: float
    lat_max_deg: float
    covered_fraction: float
    max_rtt_ms: float
    mean_rtt_ms: float
    max_gap_s: float

    @property
    def label(self) -> str:
        return f"{self.lat_min_deg:g}:{self.lat_max_deg:g}"


@dataclass(frozen=True)
class CoverageReport:
    """Coverage statistics over a lat/lon lattice and a time window.

    Fractions are area-weighted by cos(latitude). RTT statistics are taken
    over covered samples only and are NaN when nothing is covered.
    ``max_gap_s`` is the longest run of consecutive uncovered steps at any
    single grid point, times dt (runs are truncated by the window edges).
    """

    grid_deg: float
    t0_s: float
    t1_s: float
    dt_s: float
    min_elevation_deg: float
    steps: int
    covered_fraction: float
    max_rtt_ms: float
    mean_rtt_ms: float
    max_gap_s: float
    bands: tuple[BandStats, ...]


def coverage_report(
    constellation: Constellation,
    body: BodyParameters = MARS,
    grid_deg: float = 2.0,
    t0: float = 0.0,
    t1: float | None = None,
    dt: float = 10.0,
    min_elevation: float = 25.0,
    band_deg: float = 10.0,
    processing_delay_ms: float = 0.0,
) -> CoverageReport:
    """Evaluate coverage of every grid point at every time step.

    ``t1`` defaults to one orbital period of the first satellite (or t0 + dt
    for an empty constellation).
    """
    if t1 is None:
        if len(constellation):
            t1 = t0 + orbital_period(body, constellation.satellites[0].orbit)
        else:
            t1 = t0 + dt
    times = time_steps(t0, t1, dt)
    lats, lons = latlon_grid(grid_deg)
    lat_mesh, lon_mesh = np.meshgrid(lats, lons, indexing="ij")
    units = unit_vectors_from_latlon(lat_mesh, lon_mesh)
    weights = np.cos(np.radians(lats))
    sin_eps = math.sin(math.radians(min_elevation))

    shape = lat_mesh.shape
    covered_count = np.zeros(shape, dtype=np.int64)
    rtt_sum = np.zeros(shape)
    rtt_max = np.full(shape, -np.inf)
    run = np.zeros(shape, dtype=np.int64)
    longest_run = np.zeros(shape, dtype=np.int64)

    for t in times:
        if len(constellation):
            rng = _nearest_range_at(constellation, body, units, float(t), sin_eps)
        else:
            rng = np.full(shape, np.inf)
        cov = np.isfinite(rng)
        rtt = np.where(cov, 2_000.0 * np.where(cov, rng, 0.0) / SPEED_OF_LIGHT_KM_S
                       + processing_delay_ms, 0.0)
        covered_count += cov
        rtt_sum += rtt
        np.maximum(rtt_max, np.where(cov, rtt, -np.inf), out=rtt_max)
        run = np.where(cov, 0, run + 1)
        np.maximum(longest_run, run, out=longest_run)

    n_steps = len(times)

    def aggregate(rows: slice) -> tuple[float, float, float, float]:
        w = weights[rows]
        n_lon = shape[1]
        total_w = float(np.sum(w)) * n_lon * n_steps
        cov_w = float(np.sum(w * covered_count[rows].sum(axis=1)))
        rtt_w = float(np.sum(w * rtt_sum[rows].sum(axis=1)))
        frac = min(1.0, cov_w / total_w) if total_w > 0 else 0.0
        if cov_w > 0:
            mean = rtt_w / cov_w
            mx = float(rtt_max[rows].max())
        else:
            mean = mx = math.nan
        gap = float(longest_run[rows].max()) * dt
        return frac, mx, mean, gap

    bands = []
    n_bands = max(1, round(180.0 / band_deg))
    edges = np.linspace(-90.0, 90.0, n_bands + 1)
    for lo, hi in zip(edges[:-1], edges[1:]):
        idx = np.nonzero((lats >= lo) & (lats < hi))[0]
        if len(idx) == 0:
            continue
        frac, mx, mean, gap = aggregate(slice(idx[0], idx[-1] + 1))
        bands.append(BandStats(float(lo), float(hi), frac, mx, mean, gap))

    frac, mx, mean, gap = aggregate(slice(None))
    return CoverageReport(
        grid_deg=grid_deg,
        t0_s=float(t0),
        t1_s=float(t1),
        dt_s=float(dt),
        min_elevation_deg=float(min_elevation),
        steps=n_steps,
        covered_fraction=frac,
        max_rtt_ms=mx,
        mean_rtt_ms=mean,
        max_gap_s=gap,
        bands=tuple(bands),
    )


def fmt(value: float) -> str:
    """Fixed output formatting: 6 significant digits."""
    if isinstance(value, float) and math.isnan(value):
        return "nan"
    return f"{value:.6g}"


def write_coverage_csv(report: CoverageReport, out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(COVERAGE_CSV_HEADER)
    for b in report.bands:
        writer.writerow([b.label, fmt(b.covered_fraction), fmt(b.max_rtt_ms), fmt(b.mean_rtt_ms)])
    writer.writerow(["ALL", fmt(report.covered_fraction), fmt(report.max_rtt_ms),
                     fmt(report.mean_rtt_ms)])


def write_gaps_csv(report: CoverageReport, out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(GAPS_CSV_HEADER)
    for b in report.bands:
        writer.writerow([b.label, fmt(1.0 - b.covered_fraction), fmt(b.max_gap_s)])
    writer.writerow(["ALL", fmt(1.0 - report.covered_fraction), fmt(report.max_gap_s)])
