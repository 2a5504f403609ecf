"""Body constants, circular two-body propagation and frame conversions.

Two frames are used throughout the package:

* body-centered inertial (BCI): fixed with respect to the stars
* body-fixed (BF): rotates with the planet about +z

The frames coincide at t = 0. All lengths are km, all times are seconds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SPEED_OF_LIGHT_KM_S = 299_792.458

MARS_RADIUS_KM = 3_389.5
MARS_GM_KM3_S2 = 42_828.37
MARS_SIDEREAL_DAY_S = 88_642.44  # 24.6229 h


def normalize_deg(angle: float) -> float:
    """Wrap an angle into [0, 360)."""
    a = math.fmod(angle, 360.0)
    if a < 0.0:
        a += 360.0
    # fmod of e.g. -1e-17 gives 360.0 after the shift
    return 0.0 if a >= 360.0 else a


@dataclass(frozen=True)
class BodyParameters:
    radius_km: float = MARS_RADIUS_KM
    gm_km3_s2: float = MARS_GM_KM3_S2
    rotation_period_s: float = MARS_SIDEREAL_DAY_S

    def __post_init__(self) -> None:
        for name in ("radius_km", "gm_km3_s2", "rotation_period_s"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")

    @property
    def rotation_rate_rad_s(self) -> float:
        return 2.0 * math.pi / self.rotation_period_s


MARS = BodyParameters()


@dataclass(frozen=True)
class CircularOrbit:
    """A circular orbit; ``phase_deg`` is the argument of latitude at t = 0."""

    altitude_km: float
    inclination_deg: float = 0.0
    raan_deg: float = 0.0
    phase_deg: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.altitude_km) and self.altitude_km > 0.0):
            raise ValueError(f"altitude_km must be positive, got {self.altitude_km!r}")
        if not 0.0 <= self.inclination_deg <= 180.0:
            raise ValueError(f"inclination_deg must lie in [0, 180], got {self.inclination_deg!r}")
        object.__setattr__(self, "raan_deg", normalize_deg(self.raan_deg))
        object.__setattr__(self, "phase_deg", normalize_deg(self.phase_deg))

    def radius_km(self, body: BodyParameters) -> float:
        return body.radius_km + self.altitude_km


@dataclass(frozen=True)
class InertialPosition:
    x_km: float
    y_km: float
    z_km: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x_km, self.y_km, self.z_km])

    def norm(self) -> float:
        return math.sqrt(self.x_km**2 + self.y_km**2 + self.z_km**2)

    @classmethod
    def from_array(cls, v) -> InertialPosition:
        return cls(float(v[0]), float(v[1]), float(v[2]))


def areostationary_altitude(body: BodyParameters = MARS) -> float:
    """Altitude of the body-synchronous circular orbit, in km."""
    t = body.rotation_period_s
    return (body.gm_km3_s2 * t * t / (4.0 * math.pi**2)) ** (1.0 / 3.0) - body.radius_km


def orbital_period(body: BodyParameters, orbit: CircularOrbit | float) -> float:
    """Period in seconds. ``orbit`` may be a CircularOrbit or an altitude in km."""
    altitude = orbit.altitude_km if isinstance(orbit, CircularOrbit) else float(orbit)
    a = body.radius_km + altitude
    return 2.0 * math.pi * math.sqrt(a**3 / body.gm_km3_s2)


def _orbit_basis(orbit: CircularOrbit) -> tuple[np.ndarray, np.ndarray]:
    """Unit vectors spanning the orbital plane: node direction and its in-plane normal."""
    raan = math.radians(orbit.raan_deg)
    inc = math.radians(orbit.inclination_deg)
    cr, sr = math.cos(raan), math.sin(raan)
    ci, si = math.cos(inc), math.sin(inc)
    # Rz(raan) @ Rx(inc) applied to x and y
    node = np.array([cr, sr, 0.0])
    normal = np.array([-sr * ci, cr * ci, si])
    return node, normal


def _phase_rad(body: BodyParameters, orbit: CircularOrbit, t):
    mean_motion = 2.0 * math.pi / orbital_period(body, orbit)
    return math.radians(orbit.phase_deg) + mean_motion * np.asarray(t, dtype=float)


def propagate(body: BodyParameters, orbit: CircularOrbit, t: float) -> InertialPosition:
    if not math.isfinite(t):
        raise ValueError(f"t must be finite, got {t!r}")
    return InertialPosition.from_array(propagate_array(body, orbit, t))


def propagate_array(body: BodyParameters, orbit: CircularOrbit, t) -> np.ndarray:
    """Vectorized ``propagate``: returns shape (..., 3) for scalar or array ``t``."""
    node, normal = _orbit_basis(orbit)
    theta = _phase_rad(body, orbit, t)
    a = orbit.radius_km(body)
    c = np.cos(theta)[..., None]
    s = np.sin(theta)[..., None]
    return a * (c * node + s * normal)


def propagate_many(body: BodyParameters, orbits, t: float) -> np.ndarray:
    """Inertial positions of several orbits at one instant, shape (n, 3)."""
    if len(orbits) == 0:
        return np.zeros((0, 3))
    return np.stack([propagate_array(body, o, t) for o in orbits])


def _rotation_z(angle_rad: float) -> np.ndarray:
    c, s = math.cos(angle_rad), math.sin(angle_rad)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def body_fixed_rotation(body: BodyParameters, t: float) -> np.ndarray:
    """Matrix taking inertial vectors to the body-fixed frame at time t."""
    return _rotation_z(-body.rotation_rate_rad_s * t)


def body_fixed_from_inertial(body: BodyParameters, p, t: float):
    """Rotate an inertial vector (InertialPosition or array (..., 3)) into the body-fixed frame."""
    rot = body_fixed_rotation(body, t)
    if isinstance(p, InertialPosition):
        return InertialPosition.from_array(rot @ p.as_array())
    return np.asarray(p, dtype=float) @ rot.T


def inertial_from_body_fixed(body: BodyParameters, p, t: float):
    rot = body_fixed_rotation(body, t).T
    if isinstance(p, InertialPosition):
        return InertialPosition.from_array(rot @ p.as_array())
    return np.asarray(p, dtype=float) @ rot.T


def latlon_from_body_fixed(body: BodyParameters, p) -> tuple[float, float]:
    """Geocentric latitude/longitude in degrees; longitude is 0 at the poles."""
    x, y, z = (p.x_km, p.y_km, p.z_km) if isinstance(p, InertialPosition) else map(float, p)
    rho = math.hypot(x, y)
    if rho == 0.0 and z == 0.0:
        raise ValueError("cannot take lat/lon of the origin")
    lat = math.degrees(math.atan2(z, rho))
    if rho <= 1e-12 * abs(z):
        return lat, 0.0
    lon = math.degrees(math.atan2(y, x))
    if lon >= 180.0:
        lon -= 360.0
    return lat, lon


def unit_vectors_from_latlon(lat_deg, lon_deg) -> np.ndarray:
    """Surface unit vectors for arrays of latitude/longitude, shape (..., 3)."""
    lat = np.radians(np.asarray(lat_deg, dtype=float))
    lon = np.radians(np.asarray(lon_deg, dtype=float))
    cl = np.cos(lat)
    return np.stack([cl * np.cos(lon), cl * np.sin(lon), np.sin(lat)], axis=-1)


def ground_point_position(
    body: BodyParameters, lat_deg: float, lon_deg: float, t: float = 0.0
) -> InertialPosition:
    """Inertial position at time t of a point fixed on the surface."""
    if not -90.0 <= lat_deg <= 90.0:
        raise ValueError(f"latitude out of range: {lat_deg!r}")
    fixed = body.radius_km * unit_vectors_from_latlon(lat_deg, lon_deg)
    if abs(lat_deg) == 90.0:
        fixed = np.array([0.0, 0.0, math.copysign(body.radius_km, lat_deg)])
    return inertial_from_body_fixed(body, InertialPosition.from_array(fixed), t)


def central_angle_deg(u, v) -> np.ndarray:
    """Angle between direction vectors, in degrees (broadcasting over leading axes)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    cross = np.linalg.norm(np.cross(u, v), axis=-1)
    dot = np.sum(u * v, axis=-1)
    return np.degrees(np.arctan2(cross, dot))
