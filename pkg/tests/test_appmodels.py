import io

import pytest
from hypothesis import given
from hypothesis import strategies as st

from marsorbit.appmodels import (
    APPS_CSV_HEADER,
    EarthLink,
    OrbitLink,
    cache_fetch_latency,
    collaboration_latency,
    offload_latency,
    preprocess_uplink_rate,
    write_apps_csv,
)
from marsorbit.astro import CircularOrbit
from marsorbit.constellation import Constellation, GroundStation, default_ground_stations, generate_walker
from marsorbit.network import TopologySnapshot, build_plus_grid, snapshot

FAST_ORBIT = OrbitLink(12.5, 1e8)


class TestOffload:
    def test_propagation_only(self):
        assert offload_latency(0, 1e6, 0.0, OrbitLink(12.5)) == pytest.approx(0.0125)

    def test_sum(self):
        assert offload_latency(8e6, 1e6, 0.5, OrbitLink(12.5)) == pytest.approx(8.5125, abs=1e-12)

    def test_areostationary_contrast(self):
        assert offload_latency(8e6, 1e6, 0.5, OrbitLink(125.0)) == pytest.approx(8.625, abs=1e-12)

    @given(
        bits=st.floats(0, 1e9), up=st.floats(1, 1e9), ex=st.floats(0, 100),
        rtt=st.floats(0.1, 500), d=st.floats(0, 10),
    )
    def test_monotone(self, bits, up, ex, rtt, d):
        base = offload_latency(bits, up, ex, OrbitLink(rtt))
        assert offload_latency(bits + d, up, ex, OrbitLink(rtt)) >= base
        assert offload_latency(bits, up, ex + d, OrbitLink(rtt)) >= base
        assert offload_latency(bits, up, ex, OrbitLink(rtt + d)) >= base
        # faster uplink never hurts
        assert offload_latency(bits, up + d, ex, OrbitLink(rtt)) <= base


class TestCache:
    def test_miss(self):
        assert cache_fetch_latency(8e6, False, EarthLink(), FAST_ORBIT) == pytest.approx(557.62, abs=0.01)

    def test_hit(self):
        assert cache_fetch_latency(8e6, True, EarthLink(), FAST_ORBIT) == pytest.approx(0.0925, abs=0.001)

    def test_empty_object_miss(self):
        assert cache_fetch_latency(0, False, EarthLink(), FAST_ORBIT) == pytest.approx(360.0125)

    @given(bits=st.floats(1e-3, 1e12))
    def test_hit_beats_miss(self, bits):
        assert cache_fetch_latency(bits, True, EarthLink(), OrbitLink()) < cache_fetch_latency(
            bits, False, EarthLink(), OrbitLink()
        )

    def test_links_validated(self):
        with pytest.raises(ValueError):
            EarthLink(rtt_s=0)
        with pytest.raises(ValueError):
            OrbitLink(bandwidth_bps=-1)


class TestPreprocess:
    def test_saturates_default_link(self):
        r = preprocess_uplink_rate(405_000, 0.1)
        assert r.rate_bps == pytest.approx(40_500)
        assert r.fits_earth_link

    def test_identity_and_zero(self):
        assert preprocess_uplink_rate(1234.0, 1.0).rate_bps == 1234.0
        assert preprocess_uplink_rate(1234.0, 0.0).rate_bps == 0.0

    def test_too_much(self):
        assert not preprocess_uplink_rate(405_000, 0.2).fits_earth_link

    @pytest.mark.parametrize("f", [-0.1, 1.1])
    def test_domain(self, f):
        with pytest.raises(ValueError):
            preprocess_uplink_rate(1.0, f)

    @given(a=st.floats(0, 1e9), k=st.floats(0, 100), f=st.floats(0, 1))
    def test_linear(self, a, k, f):
        assert preprocess_uplink_rate(k * a, f).rate_bps == pytest.approx(
            k * preprocess_uplink_rate(a, f).rate_bps, rel=1e-12, abs=1e-300
        )


class TestCollaboration:
    def test_same_station(self):
        snap = TopologySnapshot.from_edges(["a", "b"], [(0, 1, 2.0)])
        assert collaboration_latency(snap, "a", "a") == 0.0

    def test_common_satellite(self):
        c = Constellation.from_orbits([CircularOrbit(1_120.0, 90.0, 0.0, 0.0)])
        snap = snapshot(c, None, [GroundStation("a", 3.0, 0.0), GroundStation("b", 0.0, 4.0)], 0.0)
        assert collaboration_latency(snap, "a", "b") == pytest.approx(
            snap.weight("a", 0) + snap.weight(0, "b"), rel=1e-15
        )
        assert collaboration_latency(snap, "a", "b", service_time_ms=5.0) == pytest.approx(
            snap.weight("a", 0) + snap.weight(0, "b") + 5.0
        )

    def test_unreachable(self):
        snap = TopologySnapshot.from_edges(["a", "b"], [])
        assert collaboration_latency(snap, "a", "b") is None

    def test_symmetric(self):
        snap = snapshot(generate_walker(), build_plus_grid(9, 9), default_ground_stations(), 1_500.0)
        names = [s.name for s in default_ground_stations()]
        for a in names[:4]:
            for b in names[4:]:
                assert collaboration_latency(snap, a, b) == pytest.approx(
                    collaboration_latency(snap, b, a), rel=1e-12
                )


def test_apps_csv():
    buf = io.StringIO()
    write_apps_csv([("cache", "hit_latency", 0.0925, "s", "assumed"), ("p", "fits", "true", "bool", "")], buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == ",".join(APPS_CSV_HEADER)
    assert lines[1] == "cache,hit_latency,0.0925,s,assumed"
    assert lines[2] == "p,fits,true,bool,"
