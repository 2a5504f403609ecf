"""Scenario-driven command line front end.

Scenario files are flat ``key=value`` text, one assignment per line, with
``#`` comments. Every key is optional; see ``SCENARIO_KEYS`` for the list.
Example::

    walker.planes=4
    coverage.grid_deg=5
    mass.edl.heat_shield=440

Usage::

    marsorbit --config scenario.txt --output out/ --command coverage
"""

from __future__ import annotations

import argparse
import io
import logging
import math
import statistics
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Callable

from . import __version__
from .appmodels import (
    EarthLink,
    OrbitLink,
    cache_fetch_latency,
    offload_latency,
    preprocess_uplink_rate,
    write_apps_csv,
)
from .astro import BodyParameters, areostationary_altitude, orbital_period
from .constellation import (
    CatalogError,
    Constellation,
    GroundStation,
    WalkerConfig,
    default_ground_stations,
    generate_walker,
    load_ground_stations,
)
from .coverage import (
    coverage_half_angle,
    coverage_report,
    min_equatorial_ring,
    rtt_ms,
    slant_range,
    time_steps,
    write_coverage_csv,
    write_gaps_csv,
)
from .feasibility import (
    DUST_STORM_WORST_CASE_DB,
    GLOBAL_DUST_STORM_INTERVAL_EARTH_YEARS,
    MARS2020_EDL_KG,
    MARS2020_ROVER_KG,
    MassBudget,
    attenuation_factor,
    expected_soft_errors,
    mass_overhead,
    power_comparison,
    write_quantities_csv,
)
from .network import (
    POLICIES,
    build_plus_grid,
    handover_timeline,
    shortest_paths_from,
    snapshot,
    write_routes_csv,
    write_timeline_csv,
)

logger = logging.getLogger(__name__)

COMMANDS = ("coverage", "rtt", "route", "handover", "linkbudget", "mass", "apps", "all")
BUILTIN_CATALOG = "builtin"
EDL_PREFIX = "mass.edl."

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2


class ScenarioError(ValueError):
    pass


def _key(name: str, help: str = ""):
    return {"key": name, "help": help}


@dataclass(frozen=True)
class Scenario:
    body_radius_km: float = field(default=3_389.5, metadata=_key("body.radius_km"))
    body_gm_km3_s2: float = field(default=42_828.37, metadata=_key("body.gm_km3_s2"))
    body_rotation_period_s: float = field(default=88_642.44, metadata=_key("body.rotation_period_s"))

    walker_planes: int = field(default=9, metadata=_key("walker.planes"))
    walker_sats_per_plane: int = field(default=9, metadata=_key("walker.sats_per_plane"))
    walker_altitude_km: float = field(default=1_120.0, metadata=_key("walker.altitude_km"))
    walker_inclination_deg: float = field(default=90.0, metadata=_key("walker.inclination_deg"))
    walker_raan_spread_deg: float = field(default=180.0, metadata=_key("walker.raan_spread_deg"))
    walker_phasing_offset_deg: float = field(default=0.0, metadata=_key("walker.phasing_offset_deg"))

    stations_catalog: str = field(default=BUILTIN_CATALOG, metadata=_key("stations.catalog"))

    # t1 < 0 means "one orbital period after t0"
    time_t0_s: float = field(default=0.0, metadata=_key("time.t0_s"))
    time_t1_s: float = field(default=-1.0, metadata=_key("time.t1_s"))
    time_dt_s: float = field(default=10.0, metadata=_key("time.dt_s"))
    route_dt_s: float = field(default=60.0, metadata=_key("route.dt_s"))

    coverage_grid_deg: float = field(default=2.0, metadata=_key("coverage.grid_deg"))
    coverage_min_elevation_deg: float = field(default=25.0, metadata=_key("coverage.min_elevation_deg"))
    coverage_band_deg: float = field(default=10.0, metadata=_key("coverage.band_deg"))
    coverage_processing_delay_ms: float = field(
        default=0.0, metadata=_key("coverage.processing_delay_ms")
    )

    network_cross_seam: bool = field(default=False, metadata=_key("network.cross_seam"))
    handover_policy: str = field(default="max-elevation", metadata=_key("handover.policy"))

    link_ref_power_w: float = field(default=10.0, metadata=_key("link.ref_power_w"))
    link_ref_rate_bps: float = field(default=1_000.0, metadata=_key("link.ref_rate_bps"))
    # < 0 means areostationary
    link_ref_altitude_km: float = field(default=-1.0, metadata=_key("link.ref_altitude_km"))
    link_target_altitude_km: float = field(default=1_000.0, metadata=_key("link.target_altitude_km"))
    link_distance_mode: str = field(default="edge", metadata=_key("link.distance_mode"))
    link_dust_attenuation_db: float = field(
        default=DUST_STORM_WORST_CASE_DB, metadata=_key("link.dust_attenuation_db")
    )

    soft_errors_rate_per_day: float = field(default=1e-3, metadata=_key("soft_errors.rate_per_day"))
    # < 0 means one processor per satellite
    soft_errors_processors: float = field(default=-1.0, metadata=_key("soft_errors.processors"))
    soft_errors_days: float = field(default=1_826.0, metadata=_key("soft_errors.days"))

    mass_payload_kg: float = field(default=MARS2020_ROVER_KG, metadata=_key("mass.payload_kg"))
    mass_edl: tuple[tuple[str, float], ...] = field(
        default=tuple(MARS2020_EDL_KG.items()), metadata=_key("mass.edl.*")
    )

    earth_rtt_s: float = field(default=360.0, metadata=_key("earth.rtt_s"))
    earth_bandwidth_bps: float = field(default=40_500.0, metadata=_key("earth.bandwidth_bps"))
    orbit_bandwidth_bps: float = field(default=100e6, metadata=_key("orbit.bandwidth_bps"))

    apps_payload_bits: float = field(default=8e6, metadata=_key("apps.payload_bits"))
    apps_uplink_bps: float = field(default=1e6, metadata=_key("apps.uplink_bps"))
    apps_exec_time_s: float = field(default=0.5, metadata=_key("apps.exec_time_s"))
    apps_object_bits: float = field(default=8e6, metadata=_key("apps.object_bits"))
    apps_raw_bps: float = field(default=405_000.0, metadata=_key("apps.raw_bps"))
    apps_retention_fraction: float = field(default=0.1, metadata=_key("apps.retention_fraction"))
    apps_service_time_ms: float = field(default=0.0, metadata=_key("apps.service_time_ms"))

    output_dir: str = field(default="out", metadata=_key("output.dir"))

    # --- derived objects ---

    @property
    def body(self) -> BodyParameters:
        return BodyParameters(self.body_radius_km, self.body_gm_km3_s2, self.body_rotation_period_s)

    @property
    def walker(self) -> WalkerConfig:
        return WalkerConfig(
            planes=self.walker_planes,
            sats_per_plane=self.walker_sats_per_plane,
            altitude_km=self.walker_altitude_km,
            inclination_deg=self.walker_inclination_deg,
            raan_spread_deg=self.walker_raan_spread_deg,
            phasing_offset_deg=self.walker_phasing_offset_deg,
        )

    @property
    def window(self) -> tuple[float, float]:
        t1 = self.time_t1_s
        if t1 < 0:
            t1 = self.time_t0_s + orbital_period(self.body, self.walker_altitude_km)
        return self.time_t0_s, t1

    @property
    def mass_budget(self) -> MassBudget:
        return MassBudget(self.mass_payload_kg, dict(self.mass_edl))

    def stations(self) -> list[GroundStation]:
        if self.stations_catalog == BUILTIN_CATALOG:
            return default_ground_stations()
        with open(self.stations_catalog, encoding="utf-8") as fh:
            return load_ground_stations(fh)

    def validate(self) -> None:
        try:
            self.body
            self.walker
            self.mass_budget
        except ValueError as exc:
            raise ScenarioError(str(exc)) from None
        t0, t1 = self.window
        checks = [
            (t1 > t0, "time.t1_s must exceed time.t0_s"),
            (self.time_dt_s > 0, "time.dt_s must be positive"),
            (self.route_dt_s > 0, "route.dt_s must be positive"),
            (0 < self.coverage_grid_deg <= 30, "coverage.grid_deg must lie in (0, 30]"),
            (0 <= self.coverage_min_elevation_deg < 90, "coverage.min_elevation_deg must lie in [0, 90)"),
            (0 < self.coverage_band_deg <= 180, "coverage.band_deg must lie in (0, 180]"),
            (self.coverage_processing_delay_ms >= 0, "coverage.processing_delay_ms must be >= 0"),
            (self.handover_policy in POLICIES, f"handover.policy must be one of {POLICIES}"),
            (self.link_ref_power_w > 0, "link.ref_power_w must be positive"),
            (self.link_ref_rate_bps > 0, "link.ref_rate_bps must be positive"),
            (self.link_target_altitude_km > 0, "link.target_altitude_km must be positive"),
            (self.link_ref_altitude_km != 0, "link.ref_altitude_km must be positive (or < 0 for areostationary)"),
            (self.link_distance_mode in ("edge", "nadir"), "link.distance_mode must be edge or nadir"),
            (self.link_dust_attenuation_db >= 0, "link.dust_attenuation_db must be >= 0"),
            (self.soft_errors_rate_per_day >= 0, "soft_errors.rate_per_day must be >= 0"),
            (self.soft_errors_days >= 0, "soft_errors.days must be >= 0"),
            (self.mass_payload_kg > 0, "mass.payload_kg must be positive"),
            (self.earth_rtt_s > 0, "earth.rtt_s must be positive"),
            (self.earth_bandwidth_bps > 0, "earth.bandwidth_bps must be positive"),
            (self.orbit_bandwidth_bps > 0, "orbit.bandwidth_bps must be positive"),
            (self.apps_payload_bits >= 0, "apps.payload_bits must be >= 0"),
            (self.apps_uplink_bps > 0, "apps.uplink_bps must be positive"),
            (self.apps_exec_time_s >= 0, "apps.exec_time_s must be >= 0"),
            (self.apps_object_bits >= 0, "apps.object_bits must be >= 0"),
            (self.apps_raw_bps >= 0, "apps.raw_bps must be >= 0"),
            (0 <= self.apps_retention_fraction <= 1, "apps.retention_fraction must lie in [0, 1]"),
            (self.apps_service_time_ms >= 0, "apps.service_time_ms must be >= 0"),
        ]
        for ok, message in checks:
            if not ok:
                raise ScenarioError(message)
        if self.stations_catalog != BUILTIN_CATALOG and not Path(self.stations_catalog).is_file():
            raise ScenarioError(f"stations.catalog: no such file {self.stations_catalog!r}")

    def effective_lines(self) -> list[str]:
        lines = []
        for f in fields(self):
            if f.name == "mass_edl":
                lines.extend(f"{EDL_PREFIX}{k}={_render(v)}" for k, v in self.mass_edl)
            else:
                lines.append(f"{f.metadata['key']}={_render(getattr(self, f.name))}")
        return lines


SCENARIO_KEYS: dict[str, str] = {
    f.metadata["key"]: f.name for f in fields(Scenario) if f.name != "mass_edl"
}


def _render(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _convert(raw: str, typ: str, lineno: int, key: str):
    try:
        if typ == "int":
            return int(raw)
        if typ == "float":
            value = float(raw)
            if not math.isfinite(value):
                raise ValueError("not finite")
            return value
        if typ == "bool":
            lowered = raw.lower()
            if lowered in ("true", "yes", "1", "on"):
                return True
            if lowered in ("false", "no", "0", "off"):
                return False
            raise ValueError("not a boolean")
        return raw
    except ValueError:
        raise ScenarioError(f"line {lineno}: {key}: expected {typ}, got {raw!r}") from None


def parse_scenario(source: str | Path | io.TextIOBase | None = None) -> Scenario:
    """Read a scenario from a path, an open stream, or ``None`` for the defaults.

    Relative ``stations.catalog`` paths resolve against the scenario file's
    directory.
    """
    if source is None:
        return Scenario()
    base = Path(".")
    if isinstance(source, (str, Path)):
        path = Path(source)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ScenarioError(f"cannot read scenario {path}: {exc.strerror}") from None
        base = path.parent
    else:
        text = source.read()

    types = {f.name: f.type for f in fields(Scenario)}
    updates: dict[str, object] = {}
    edl: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ScenarioError(f"line {lineno}: expected key=value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key.startswith(EDL_PREFIX) and len(key) > len(EDL_PREFIX):
            edl[key[len(EDL_PREFIX):]] = _convert(value, "float", lineno, key)
            continue
        if key not in SCENARIO_KEYS:
            raise ScenarioError(f"line {lineno}: unknown key {key!r}")
        name = SCENARIO_KEYS[key]
        updates[name] = _convert(value, str(types[name]), lineno, key)

    if "stations_catalog" in updates and updates["stations_catalog"] != BUILTIN_CATALOG:
        catalog = Path(str(updates["stations_catalog"]))
        if not catalog.is_absolute():
            catalog = base / catalog
        updates["stations_catalog"] = str(catalog)
    if edl:
        updates["mass_edl"] = tuple(edl.items())
    scenario = replace(Scenario(), **updates)
    scenario.validate()
    return scenario


# --- commands ---------------------------------------------------------------


class Context:
    """Lazily built shared objects for one run."""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.body = scenario.body
        self._constellation: Constellation | None = None
        self._stations: list[GroundStation] | None = None
        self._route_rows: list | None = None

    @property
    def constellation(self) -> Constellation:
        if self._constellation is None:
            self._constellation = generate_walker(self.scenario.walker)
        return self._constellation

    @property
    def stations(self) -> list[GroundStation]:
        if self._stations is None:
            try:
                self._stations = self.scenario.stations()
            except CatalogError as exc:
                raise ScenarioError(f"{self.scenario.stations_catalog}: {exc}") from None
        return self._stations

    def route_times(self):
        t0, t1 = self.scenario.window
        return time_steps(t0, t1, self.scenario.route_dt_s)

    def route_rows(self):
        """(t, src, dst, Route|None) for every unordered station pair and route step."""
        if self._route_rows is None:
            self._route_rows = self._compute_route_rows()
        return self._route_rows

    def _compute_route_rows(self):
        stations = self.stations
        if len(stations) < 2:
            raise ScenarioError("routing needs at least two ground stations in the catalog")
        sc = self.scenario
        topo = build_plus_grid(sc.walker_planes, sc.walker_sats_per_plane, sc.network_cross_seam)
        rows = []
        for t in self.route_times():
            snap = snapshot(self.constellation, topo, stations, float(t), self.body)
            for i, a in enumerate(stations[:-1]):
                routes = shortest_paths_from(snap, a.name)
                for b in stations[i + 1:]:
                    rows.append((float(t), a.name, b.name, routes.get(snap.node(b.name))))
        return rows


def cmd_coverage(ctx: Context) -> dict[str, Callable]:
    sc = ctx.scenario
    t0, t1 = sc.window
    report = coverage_report(
        ctx.constellation, ctx.body, sc.coverage_grid_deg, t0, t1, sc.time_dt_s,
        sc.coverage_min_elevation_deg, sc.coverage_band_deg, sc.coverage_processing_delay_ms,
    )
    return {
        "coverage.csv": lambda out: write_coverage_csv(report, out),
        "coverage_gaps.csv": lambda out: write_gaps_csv(report, out),
    }


def cmd_rtt(ctx: Context) -> dict[str, Callable]:
    sc = ctx.scenario
    R = ctx.body.radius_km
    eps = sc.coverage_min_elevation_deg
    areo = areostationary_altitude(ctx.body)
    rows: list = []
    for name, h in (("areostationary", areo), ("orbit_1000km", 1_000.0),
                    ("constellation", sc.walker_altitude_km)):
        alpha = coverage_half_angle(R, h, eps)
        d = slant_range(R, h, eps)
        rows += [
            (f"{name}_altitude", h, "km"),
            (f"{name}_coverage_half_angle", alpha, "deg"),
            (f"{name}_equatorial_ring", min_equatorial_ring(alpha) if alpha > 0 else math.nan, "satellites"),
            (f"{name}_edge_slant_range", d, "km"),
            (f"{name}_edge_rtt", rtt_ms(d, sc.coverage_processing_delay_ms), "ms"),
            (f"{name}_nadir_rtt", rtt_ms(h, sc.coverage_processing_delay_ms), "ms"),
        ]
    rows.append(("constellation_orbital_period", orbital_period(ctx.body, sc.walker_altitude_km), "s"))
    rows.append(("constellation_satellites", len(ctx.constellation), "satellites"))
    return {"rtt.csv": lambda out: write_quantities_csv(rows, out)}


def cmd_route(ctx: Context) -> dict[str, Callable]:
    rows = ctx.route_rows()
    return {"routes.csv": lambda out: write_routes_csv(rows, out)}


def cmd_handover(ctx: Context) -> dict[str, Callable]:
    sc = ctx.scenario
    if not ctx.stations:
        raise ScenarioError("handover needs at least one ground station in the catalog")
    t0, t1 = sc.window
    rows = []
    for station in ctx.stations:
        for iv in handover_timeline(ctx.constellation, station, t0, t1, sc.time_dt_s,
                                    sc.handover_policy, ctx.body):
            rows.append((station.name, iv))
    return {"handover.csv": lambda out: write_timeline_csv(rows, ctx.constellation, out)}


def cmd_linkbudget(ctx: Context) -> dict[str, Callable]:
    sc = ctx.scenario
    ref_alt = None if sc.link_ref_altitude_km < 0 else sc.link_ref_altitude_km
    rows = []
    for mode in ("edge", "nadir"):
        p = power_comparison(ctx.body, sc.link_ref_power_w, sc.link_ref_rate_bps, ref_alt,
                             sc.link_target_altitude_km, sc.coverage_min_elevation_deg, mode)
        rows += [
            (f"reference_distance_{mode}", p["reference_distance_km"], "km"),
            (f"target_distance_{mode}", p["target_distance_km"], "km"),
            (f"target_power_{mode}", p["target_power_w"], "W"),
        ]
        if mode == sc.link_distance_mode:
            selected = p["target_power_w"]
    rows.append(("target_power", selected, "W"))
    rows.append(("reference_power", sc.link_ref_power_w, "W"))
    rows.append(("reference_rate", sc.link_ref_rate_bps, "bit/s"))
    factor = attenuation_factor(sc.link_dust_attenuation_db)
    rows += [
        ("dust_attenuation", sc.link_dust_attenuation_db, "dB"),
        ("dust_received_power_factor", factor, "1"),
        ("dust_compensated_target_power", selected / factor, "W"),
        ("global_dust_storm_interval", GLOBAL_DUST_STORM_INTERVAL_EARTH_YEARS, "Earth years"),
    ]
    processors = sc.soft_errors_processors
    if processors < 0:
        processors = len(ctx.constellation)
    rows += [
        ("soft_error_rate", sc.soft_errors_rate_per_day, "1/processor/day"),
        ("soft_error_processors", processors, "processors"),
        ("soft_errors_per_day", expected_soft_errors(sc.soft_errors_rate_per_day, processors, 1), "errors"),
        ("soft_errors_mission_days", sc.soft_errors_days, "days"),
        ("soft_errors_mission", expected_soft_errors(sc.soft_errors_rate_per_day, processors,
                                                     sc.soft_errors_days), "errors"),
    ]
    return {"linkbudget.csv": lambda out: write_quantities_csv(rows, out)}


def cmd_mass(ctx: Context) -> dict[str, Callable]:
    budget = ctx.scenario.mass_budget
    total, ratio = mass_overhead(budget)
    rows = [("payload", budget.payload_kg, "kg")]
    rows += [(f"edl_{name}", kg, "kg") for name, kg in budget.edl_components.items()]
    rows += [("edl_total", total, "kg"), ("overhead_ratio", ratio, "1"),
             ("overhead_percent", 100.0 * ratio, "%")]
    return {"mass.csv": lambda out: write_quantities_csv(rows, out)}


def cmd_apps(ctx: Context) -> dict[str, Callable]:
    sc = ctx.scenario
    R = ctx.body.radius_km
    eps = sc.coverage_min_elevation_deg
    earth = EarthLink(sc.earth_rtt_s, sc.earth_bandwidth_bps)
    orbit_rtt = rtt_ms(slant_range(R, sc.walker_altitude_km, eps), sc.coverage_processing_delay_ms)
    areo_rtt = rtt_ms(slant_range(R, areostationary_altitude(ctx.body), eps),
                      sc.coverage_processing_delay_ms)
    orbit = OrbitLink(orbit_rtt, sc.orbit_bandwidth_bps)
    areo = OrbitLink(areo_rtt, sc.orbit_bandwidth_bps)
    bw_note = f"orbit bandwidth {sc.orbit_bandwidth_bps:.6g} bit/s assumed"
    earth_note = f"Earth RTT {sc.earth_rtt_s:.6g} s fixed; Earth link {sc.earth_bandwidth_bps:.6g} bit/s"
    rtt_note = "orbit RTT = worst case at minimum elevation"
    rows: list = [
        ("offload", "latency_constellation",
         offload_latency(sc.apps_payload_bits, sc.apps_uplink_bps, sc.apps_exec_time_s, orbit), "s", rtt_note),
        ("offload", "latency_areostationary",
         offload_latency(sc.apps_payload_bits, sc.apps_uplink_bps, sc.apps_exec_time_s, areo), "s", rtt_note),
        ("cache", "hit_latency",
         cache_fetch_latency(sc.apps_object_bits, True, earth, orbit), "s", bw_note),
        ("cache", "miss_latency",
         cache_fetch_latency(sc.apps_object_bits, False, earth, orbit), "s", f"{bw_note}; {earth_note}"),
    ]
    up = preprocess_uplink_rate(sc.apps_raw_bps, sc.apps_retention_fraction, earth)
    rows += [
        ("preprocess", "earth_uplink_rate", up.rate_bps, "bit/s", earth_note),
        ("preprocess", "fits_earth_link", "true" if up.fits_earth_link else "false", "bool", earth_note),
    ]
    if len(ctx.stations) >= 2:
        delays = []
        unreachable = 0
        for _, _, _, route in ctx.route_rows():
            if route is None:
                unreachable += 1
            else:
                delays.append(route.delay_ms + sc.apps_service_time_ms)
        note = f"all station pairs every {sc.route_dt_s:.6g} s over the window; service time {sc.apps_service_time_ms:.6g} ms"
        if delays:
            rows += [
                ("collaboration", "one_way_delay_min", min(delays), "ms", note),
                ("collaboration", "one_way_delay_median", statistics.median(delays), "ms", note),
                ("collaboration", "one_way_delay_max", max(delays), "ms", note),
            ]
        rows.append(("collaboration", "unreachable_fraction",
                     unreachable / (unreachable + len(delays)), "1", note))
    return {"apps.csv": lambda out: write_apps_csv(rows, out)}


HANDLERS: dict[str, Callable[[Context], dict[str, Callable]]] = {
    "coverage": cmd_coverage,
    "rtt": cmd_rtt,
    "route": cmd_route,
    "handover": cmd_handover,
    "linkbudget": cmd_linkbudget,
    "mass": cmd_mass,
    "apps": cmd_apps,
}


def _header(command: str, scenario: Scenario) -> str:
    lines = [f"# marsorbit {__version__}", f"# command: {command}"]
    lines += [f"# {line}" for line in scenario.effective_lines()]
    return "\n".join(lines) + "\n"


def run(command: str, scenario: Scenario, output_dir: str | Path | None = None) -> list[Path]:
    """Execute ``command`` and write its CSV files; returns the written paths."""
    if command not in COMMANDS:
        raise ScenarioError(f"unknown command {command!r}; expected one of {COMMANDS}")
    out_dir = Path(output_dir if output_dir is not None else scenario.output_dir)
    ctx = Context(scenario)
    names = list(HANDLERS) if command == "all" else [command]
    # compute everything before touching the filesystem
    pending: list[tuple[str, str, Callable]] = []
    for name in names:
        for filename, writer in HANDLERS[name](ctx).items():
            pending.append((name, filename, writer))

    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out_dir}: {exc.strerror}") from None
    written = []
    effective = out_dir / "scenario.effective.txt"
    _write_text(effective, "\n".join(scenario.effective_lines()) + "\n")
    written.append(effective)
    for name, filename, writer in pending:
        buf = io.StringIO()
        buf.write(_header(name, scenario))
        writer(buf)
        path = out_dir / filename
        _write_text(path, buf.getvalue())
        written.append(path)
    return written


def _write_text(path: Path, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="marsorbit",
        description="Low-Mars-orbit constellation coverage, routing and feasibility reports",
    )
    parser.add_argument("--config", help="scenario file (key=value lines); defaults if omitted")
    parser.add_argument("--output", help="output directory (overrides output.dir)")
    parser.add_argument("--command", default="all", choices=COMMANDS)
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        scenario = parse_scenario(args.config)
        paths = run(args.command, scenario, args.output)
    except ScenarioError as exc:
        print(f"marsorbit: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # noqa: BLE001 - report, don't trace
        print(f"marsorbit: runtime error: {exc}", file=sys.stderr)
        logger.debug("traceback", exc_info=True)
        return EXIT_RUNTIME
    for p in paths:
        logger.info("wrote %s", p)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
