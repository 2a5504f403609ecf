import io

import pytest
from hypothesis import given
from hypothesis import strategies as st

from marsorbit.constellation import (
    CatalogError,
    GroundStation,
    WalkerConfig,
    default_ground_stations,
    generate_walker,
    load_ground_stations,
)

HEADER = "name,lat_deg,lon_deg,min_elevation_deg\n"


class TestWalker:
    def test_default_design(self):
        c = generate_walker(WalkerConfig())
        assert len(c) == 81
        raans = sorted({s.orbit.raan_deg for s in c.satellites})
        assert raans == pytest.approx([20.0 * p for p in range(9)])
        plane0 = [s.orbit.phase_deg for s in c.satellites if s.plane == 0]
        assert plane0 == pytest.approx([40.0 * s for s in range(9)])
        assert all(s.orbit.altitude_km == 1_120.0 for s in c.satellites)
        assert all(s.orbit.inclination_deg == 90.0 for s in c.satellites)

    def test_single(self):
        c = generate_walker(WalkerConfig(planes=1, sats_per_plane=1))
        (sat,) = c.satellites
        assert (sat.orbit.raan_deg, sat.orbit.phase_deg) == (0.0, 0.0)

    def test_phasing_offset(self):
        c = generate_walker(WalkerConfig(planes=2, sats_per_plane=2, phasing_offset_deg=90.0))
        assert [s.orbit.phase_deg for s in c.satellites if s.plane == 1] == [90.0, 270.0]

    def test_delta_spread(self):
        c = generate_walker(WalkerConfig(planes=4, sats_per_plane=1, raan_spread_deg=360.0))
        assert [s.orbit.raan_deg for s in c.satellites] == [0.0, 90.0, 180.0, 270.0]

    def test_sorted_and_indexed(self):
        c = generate_walker()
        keys = [(s.plane, s.slot) for s in c.satellites]
        assert keys == sorted(keys)
        assert c.index(3, 4) == 31
        assert c.satellites[31].label == "sat3.4"

    @pytest.mark.parametrize("kwargs", [{"planes": 0}, {"sats_per_plane": 0}, {"altitude_km": -5.0}])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            WalkerConfig(**kwargs)

    @given(P=st.integers(1, 16), S=st.integers(1, 16), off=st.floats(0, 360))
    def test_size_and_plane_sharing(self, P, S, off):
        cfg = WalkerConfig(planes=P, sats_per_plane=S, phasing_offset_deg=off)
        c = generate_walker(cfg)
        assert len(c) == P * S
        for p in range(P):
            plane = {(s.orbit.raan_deg, s.orbit.inclination_deg) for s in c.satellites if s.plane == p}
            assert len(plane) == 1
        assert generate_walker(cfg) == c


class TestCatalog:
    def test_default_elevation(self):
        (gs,) = load_ground_stations(HEADER + "Equator0,0,0,\n")
        assert gs == GroundStation("Equator0", 0.0, 0.0, 25.0)

    def test_three_field_row(self):
        (gs,) = load_ground_stations(HEADER + "A,10,20\n")
        assert gs.min_elevation_deg == 25.0

    def test_explicit_elevation_and_stream(self):
        (gs,) = load_ground_stations(io.StringIO(HEADER + "A,10,-20,10\n"))
        assert (gs.lat_deg, gs.lon_deg, gs.min_elevation_deg) == (10.0, -20.0, 10.0)

    def test_header_only(self):
        assert load_ground_stations(HEADER) == []

    def test_comments_and_crlf(self):
        text = "# sites\r\n" + HEADER.replace("\n", "\r\n") + "# skip\r\nA,1,2,\r\nB,3,4,5\r\n"
        assert [g.name for g in load_ground_stations(text)] == ["A", "B"]

    def test_latitude_out_of_range_names_line(self):
        with pytest.raises(CatalogError) as err:
            load_ground_stations(HEADER + "ok,0,0,\nbad,95,0,\n")
        assert err.value.line == 3
        assert "line 3" in str(err.value)

    @pytest.mark.parametrize(
        "row",
        ["x,0,180,", "x,0,-181,", "x,0,0,90", "x,0,0,-1", "x,abc,0,", "x,0", "x,1,2,3,4"],
    )
    def test_malformed(self, row):
        with pytest.raises(CatalogError) as err:
            load_ground_stations(HEADER + row + "\n")
        assert err.value.line == 2

    def test_duplicate_names(self):
        with pytest.raises(CatalogError, match="duplicate"):
            load_ground_stations(HEADER + "A,0,0,\nA,1,1,\n")

    def test_bad_header(self):
        with pytest.raises(CatalogError):
            load_ground_stations("name,lat,lon\nA,0,0\n")

    def test_bundled_catalog(self):
        stations = default_ground_stations()
        assert len(stations) >= 5
        assert len({s.name for s in stations}) == len(stations)
        assert all(s.min_elevation_deg == 25.0 for s in stations)
