"""+GRID inter-satellite links, time-varying snapshots, routing and handovers."""

from __future__ import annotations

import csv
import heapq
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, TextIO

import numpy as np

from .astro import (
    MARS,
    SPEED_OF_LIGHT_KM_S,
    BodyParameters,
    inertial_from_body_fixed,
    propagate_array,
    unit_vectors_from_latlon,
)
from .constellation import Constellation, GroundStation
from .coverage import elevation_and_range, fmt, time_steps

logger = logging.getLogger(__name__)

ROUTES_CSV_HEADER = ("t_s", "src", "dst", "delay_ms", "hops", "path")
TIMELINE_CSV_HEADER = ("t_start_s", "t_end_s", "station", "satellite")
POLICIES = ("max-elevation", "min-rtt")


def one_way_delay_ms(distance_km: float) -> float:
    return 1_000.0 * distance_km / SPEED_OF_LIGHT_KM_S


@dataclass(frozen=True)
class IslTopology:
    """Satellite-to-satellite edges; satellite (p, s) has index p * S + s."""

    planes: int
    sats_per_plane: int
    cross_seam: bool
    edges: tuple[tuple[int, int], ...]

    def degrees(self) -> list[int]:
        deg = [0] * (self.planes * self.sats_per_plane)
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return deg


def build_plus_grid(planes: int, sats_per_plane: int, cross_seam: bool = False) -> IslTopology:
    """Each satellite links to slot +-1 in its plane and the same slot in adjacent planes.

    The seam between the last and first plane is only bridged when
    ``cross_seam`` is set. Duplicate pairs (two planes with a seam link) are
    merged, so the result is a simple graph.
    """
    if planes < 1:
        raise ValueError(f"planes must be >= 1, got {planes}")
    if sats_per_plane < 3:
        raise ValueError(f"+GRID needs at least 3 satellites per plane, got {sats_per_plane}")
    S = sats_per_plane
    edges: set[tuple[int, int]] = set()

    def add(a: int, b: int) -> None:
        if a != b:
            edges.add((min(a, b), max(a, b)))

    for p in range(planes):
        for s in range(S):
            i = p * S + s
            add(i, p * S + (s + 1) % S)
            if p + 1 < planes:
                add(i, (p + 1) * S + s)
            elif cross_seam and planes > 1:
                add(i, s)
    return IslTopology(planes, S, cross_seam, tuple(sorted(edges)))


def line_of_sight(a: np.ndarray, b: np.ndarray, radius_km: float) -> bool:
    """True when the segment a-b does not pass through the sphere of ``radius_km``."""
    a = np.asarray(a, dtype=float)
    d = np.asarray(b, dtype=float) - a
    dd = float(d @ d)
    if dd == 0.0:
        return float(a @ a) > radius_km * radius_km
    u = min(1.0, max(0.0, -float(a @ d) / dd))
    closest = a + u * d
    return float(closest @ closest) > radius_km * radius_km


@dataclass
class TopologySnapshot:
    """Undirected weighted graph at one instant.

    Nodes are indexed satellites first (constellation order), then ground
    stations (catalog order). Weights are one-way propagation delays in ms.
    """

    time_s: float
    labels: tuple[str, ...]
    n_satellites: int
    adjacency: dict[int, dict[int, float]]
    positions: np.ndarray | None = None
    _index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self._index = {name: i for i, name in enumerate(self.labels)}
        if len(self._index) != len(self.labels):
            raise ValueError("node labels must be unique")

    @classmethod
    def from_edges(
        cls,
        labels: Sequence[str],
        edges: Iterable[tuple[int, int, float]],
        time_s: float = 0.0,
        n_satellites: int = 0,
    ) -> TopologySnapshot:
        adj: dict[int, dict[int, float]] = {i: {} for i in range(len(labels))}
        for a, b, w in edges:
            if a == b:
                raise ValueError("self loops are not allowed")
            if not w > 0.0:
                raise ValueError(f"edge weight must be positive, got {w!r}")
            adj[a][b] = w
            adj[b][a] = w
        return cls(time_s, tuple(labels), n_satellites, adj)

    def __len__(self) -> int:
        return len(self.labels)

    def node(self, key: int | str) -> int:
        if isinstance(key, str):
            try:
                return self._index[key]
            except KeyError:
                raise KeyError(f"unknown node {key!r}") from None
        if not 0 <= key < len(self.labels):
            raise KeyError(f"unknown node index {key}")
        return key

    def weight(self, a: int | str, b: int | str) -> float:
        return self.adjacency[self.node(a)][self.node(b)]

    def edges(self) -> list[tuple[int, int, float]]:
        return sorted(
            (a, b, w) for a, nbrs in self.adjacency.items() for b, w in nbrs.items() if a < b
        )

    def degree(self, key: int | str) -> int:
        return len(self.adjacency[self.node(key)])


def station_positions(
    body: BodyParameters, stations: Sequence[GroundStation], t: float
) -> np.ndarray:
    if not stations:
        return np.zeros((0, 3))
    lat = np.array([s.lat_deg for s in stations])
    lon = np.array([s.lon_deg for s in stations])
    fixed = body.radius_km * unit_vectors_from_latlon(lat, lon)
    return inertial_from_body_fixed(body, fixed, t)


def snapshot(
    constellation: Constellation,
    topology: IslTopology | None,
    stations: Sequence[GroundStation],
    t: float,
    body: BodyParameters = MARS,
) -> TopologySnapshot:
    n_sat = len(constellation)
    if topology is not None and topology.planes * topology.sats_per_plane != n_sat:
        raise ValueError(
            f"topology covers {topology.planes * topology.sats_per_plane} satellites, "
            f"constellation has {n_sat}"
        )
    sats = constellation.positions(body, t)
    ground = station_positions(body, stations, t)
    labels = [s.label for s in constellation.satellites] + [g.name for g in stations]
    edges: list[tuple[int, int, float]] = []
    for a, b in topology.edges if topology is not None else ():
        if not line_of_sight(sats[a], sats[b], body.radius_km):
            logger.debug("ISL %s-%s occluded at t=%s; dropped", labels[a], labels[b], t)
            continue
        edges.append((a, b, one_way_delay_ms(float(np.linalg.norm(sats[a] - sats[b])))))
    if n_sat and len(stations):
        el, rng = elevation_and_range(ground, sats)
        for g, station in enumerate(stations):
            for i in np.nonzero(el[g] >= station.min_elevation_deg)[0]:
                edges.append((n_sat + g, int(i), one_way_delay_ms(float(rng[g, i]))))
    snap = TopologySnapshot.from_edges(labels, edges, time_s=float(t), n_satellites=n_sat)
    snap.positions = np.vstack([sats, ground]) if len(labels) else np.zeros((0, 3))
    return snap


@dataclass(frozen=True)
class Route:
    nodes: tuple[str, ...]
    indices: tuple[int, ...]
    delay_ms: float

    @property
    def hops(self) -> int:
        return len(self.indices) - 1

    @property
    def rtt_ms(self) -> float:
        return 2.0 * self.delay_ms


def shortest_paths_from(snap: TopologySnapshot, src: int | str) -> dict[int, Route]:
    """Dijkstra from ``src`` to every reachable node.

    Among equal-delay routes the lexicographically smallest node-index
    sequence wins, which makes results independent of insertion order.
    """
    s = snap.node(src)
    heap: list[tuple[float, tuple[int, ...]]] = [(0.0, (s,))]
    done: dict[int, tuple[float, tuple[int, ...]]] = {}
    while heap:
        dist, path = heapq.heappop(heap)
        u = path[-1]
        if u in done:
            continue
        done[u] = (dist, path)
        for v, w in snap.adjacency[u].items():
            if v not in done:
                heapq.heappush(heap, (dist + w, path + (v,)))
    return {
        v: Route(tuple(snap.labels[i] for i in path), path, dist)
        for v, (dist, path) in done.items()
    }


def shortest_path(snap: TopologySnapshot, src: int | str, dst: int | str) -> Route | None:
    """Minimum one-way delay route, or None when ``dst`` is unreachable."""
    d = snap.node(dst)
    return shortest_paths_from(snap, src).get(d)


# --- handovers ------------------------------------------------------------


@dataclass(frozen=True)
class ServingInterval:
    t_start_s: float
    t_end_s: float
    satellite: int | None


def handover_timeline(
    constellation: Constellation,
    station: GroundStation,
    t0: float,
    t1: float,
    dt: float,
    policy: str = "max-elevation",
    body: BodyParameters = MARS,
) -> list[ServingInterval]:
    """Serving satellite over [t0, t1] sampled every dt, merged into constant intervals.

    A sample's choice holds until the next sample; gaps in coverage appear as
    intervals with ``satellite=None``.
    """
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}; expected one of {POLICIES}")
    times = time_steps(t0, t1, dt)
    serving: list[int | None]
    if len(constellation) == 0:
        serving = [None] * len(times)
    else:
        sats = np.stack([propagate_array(body, o, times) for o in constellation.orbits], axis=1)
        fixed = body.radius_km * unit_vectors_from_latlon(station.lat_deg, station.lon_deg)
        serving = []
        for k, t in enumerate(times):
            ground = inertial_from_body_fixed(body, fixed, float(t))
            el, rng = elevation_and_range(ground[None, :], sats[k])
            el, rng = el[0], rng[0]
            visible = el >= station.min_elevation_deg
            if not visible.any():
                serving.append(None)
            elif policy == "max-elevation":
                serving.append(int(np.argmax(np.where(visible, el, -np.inf))))
            else:
                serving.append(int(np.argmin(np.where(visible, rng, np.inf))))

    intervals: list[ServingInterval] = []
    start = 0
    for k in range(1, len(times) + 1):
        if k == len(times) or serving[k] != serving[start]:
            end = float(times[k]) if k < len(times) else float(t1)
            intervals.append(ServingInterval(float(times[start]), end, serving[start]))
            start = k
    return intervals


def handover_count(intervals: Sequence[ServingInterval]) -> int:
    return max(0, len(intervals) - 1)


def write_routes_csv(
    rows: Iterable[tuple[float, str, str, Route | None]], out: TextIO
) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(ROUTES_CSV_HEADER)
    for t, src, dst, route in rows:
        if route is None:
            writer.writerow([fmt(t), src, dst, "unreachable", "", ""])
        else:
            writer.writerow([fmt(t), src, dst, fmt(route.delay_ms), route.hops,
                             ">".join(route.nodes)])


def write_timeline_csv(
    rows: Iterable[tuple[str, ServingInterval]], constellation: Constellation, out: TextIO
) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(TIMELINE_CSV_HEADER)
    for name, iv in rows:
        sat = "none" if iv.satellite is None else constellation.satellites[iv.satellite].label
        writer.writerow([fmt(iv.t_start_s), fmt(iv.t_end_s), name, sat])


def great_circle_delay_ms(body: BodyParameters, a: GroundStation, b: GroundStation) -> float:
    """Surface great-circle distance between two stations as a one-way light delay."""
    u = unit_vectors_from_latlon(a.lat_deg, a.lon_deg)
    v = unit_vectors_from_latlon(b.lat_deg, b.lon_deg)
    angle = math.atan2(float(np.linalg.norm(np.cross(u, v))), float(u @ v))
    return one_way_delay_ms(body.radius_km * angle)
