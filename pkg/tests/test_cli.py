import csv
import io
import statistics

import pytest

from marsorbit.cli import (
    COMMANDS,
    Context,
    Scenario,
    ScenarioError,
    main,
    parse_scenario,
    run,
)


def data_rows(path):
    lines = [l for l in path.read_text().splitlines() if not l.startswith("#")]
    return list(csv.reader(lines))


def quantities(path):
    return {row[0]: row[1] for row in data_rows(path)[1:]}


class TestParse:
    def test_none_is_default(self):
        s = parse_scenario(None)
        assert s == Scenario()
        assert s.walker.total == 81

    def test_empty_file(self, tmp_path):
        f = tmp_path / "s.txt"
        f.write_text("")
        s = parse_scenario(f)
        assert (s.walker.total, s.walker_altitude_km, s.coverage_min_elevation_deg) == (81, 1_120.0, 25.0)
        assert (s.earth_rtt_s, s.earth_bandwidth_bps) == (360.0, 40_500.0)

    def test_single_override(self):
        s = parse_scenario(io.StringIO("walker.planes=4\n"))
        assert (s.walker_planes, s.walker_sats_per_plane) == (4, 9)
        assert s.walker.total == 36

    def test_comments_whitespace_types(self):
        s = parse_scenario(io.StringIO("# c\n\n  coverage.grid_deg = 5  \nnetwork.cross_seam=true\n"))
        assert s.coverage_grid_deg == 5.0
        assert s.network_cross_seam is True

    def test_negative_altitude(self):
        with pytest.raises(ScenarioError):
            parse_scenario(io.StringIO("walker.altitude_km=-5\n"))

    def test_unknown_key(self):
        with pytest.raises(ScenarioError, match="walker.colour"):
            parse_scenario(io.StringIO("walker.planes=3\nwalker.colour=red\n"))

    def test_type_mismatch_line_number(self):
        with pytest.raises(ScenarioError, match="line 2"):
            parse_scenario(io.StringIO("# x\nwalker.planes=nine\n"))

    def test_missing_equals(self):
        with pytest.raises(ScenarioError, match="line 1"):
            parse_scenario(io.StringIO("walker.planes\n"))

    def test_edl_components_replace_defaults(self):
        s = parse_scenario(io.StringIO("mass.payload_kg=100\nmass.edl.chute=50\nmass.edl.legs=25\n"))
        assert dict(s.mass_edl) == {"chute": 50.0, "legs": 25.0}

    def test_catalog_relative_to_scenario(self, tmp_path):
        (tmp_path / "sites.csv").write_text("name,lat_deg,lon_deg,min_elevation_deg\nA,0,0,\n")
        f = tmp_path / "s.txt"
        f.write_text("stations.catalog=sites.csv\n")
        s = parse_scenario(f)
        assert [g.name for g in s.stations()] == ["A"]

    def test_missing_catalog(self):
        with pytest.raises(ScenarioError, match="no such file"):
            parse_scenario(io.StringIO("stations.catalog=/nonexistent/x.csv\n"))

    @pytest.mark.parametrize(
        "line",
        ["time.dt_s=0", "coverage.grid_deg=40", "handover.policy=random", "apps.retention_fraction=2",
         "time.t0_s=10\ntime.t1_s=5", "link.distance_mode=sideways", "walker.sats_per_plane=0"],
    )
    def test_validation(self, line):
        with pytest.raises(ScenarioError):
            parse_scenario(io.StringIO(line + "\n"))

    def test_effective_lines_round_trip(self):
        s = parse_scenario(io.StringIO("walker.planes=5\nmass.edl.chute=12.5\n"))
        again = parse_scenario(io.StringIO("\n".join(s.effective_lines())))
        assert again == s


FAST = "coverage.grid_deg=10\ntime.dt_s=120\nroute.dt_s=1200\n"


@pytest.fixture
def fast_config(tmp_path):
    f = tmp_path / "fast.txt"
    f.write_text(FAST)
    return f


class TestRun:
    @pytest.mark.parametrize("command", [c for c in COMMANDS if c != "all"])
    def test_each_command(self, command, fast_config, tmp_path):
        out = tmp_path / "out"
        assert main(["--config", str(fast_config), "--output", str(out), "--command", command]) == 0
        assert (out / "scenario.effective.txt").exists()
        for f in out.glob("*.csv"):
            text = f.read_text()
            assert text.startswith("# marsorbit ")
            assert f"# command: {command}" in text
            assert "# walker.planes=9" in text

    def test_coverage_summary(self, fast_config, tmp_path):
        run("coverage", parse_scenario(fast_config), tmp_path)
        rows = data_rows(tmp_path / "coverage.csv")
        assert rows[0] == ["lat_band_deg", "covered_fraction", "max_rtt_ms", "mean_rtt_ms"]
        summary = rows[-1]
        assert summary[0] == "ALL"
        assert float(summary[2]) <= 12.5

    def test_mass_row(self, tmp_path):
        run("mass", Scenario(), tmp_path)
        q = quantities(tmp_path / "mass.csv")
        assert float(q["edl_total"]) == 2_085.0
        assert float(q["overhead_ratio"]) > 2.0

    def test_linkbudget_rows(self, tmp_path):
        run("linkbudget", Scenario(), tmp_path)
        q = quantities(tmp_path / "linkbudget.csv")
        assert 0.03 <= float(q["target_power"]) <= 0.13
        assert float(q["dust_received_power_factor"]) == pytest.approx(0.501, abs=0.001)
        assert float(q["soft_errors_per_day"]) == 0.081

    def test_rtt_rows(self, tmp_path):
        run("rtt", Scenario(), tmp_path)
        q = quantities(tmp_path / "rtt.csv")
        assert float(q["areostationary_edge_rtt"]) == pytest.approx(125, abs=1)
        assert float(q["constellation_edge_rtt"]) == pytest.approx(12.5, abs=0.1)
        assert float(q["orbit_1000km_edge_rtt"]) == pytest.approx(11.4, abs=0.2)
        assert q["areostationary_equatorial_ring"] == "4"

    def test_route_empty_catalog(self, tmp_path, capsys):
        cat = tmp_path / "empty.csv"
        cat.write_text("name,lat_deg,lon_deg,min_elevation_deg\n")
        cfg = tmp_path / "s.txt"
        cfg.write_text(f"stations.catalog={cat}\n")
        code = main(["--config", str(cfg), "--output", str(tmp_path / "o"), "--command", "route"])
        assert code != 0
        assert "station" in capsys.readouterr().err
        assert not (tmp_path / "o" / "routes.csv").exists()

    def test_bad_catalog_reports_line(self, tmp_path, capsys):
        cat = tmp_path / "bad.csv"
        cat.write_text("name,lat_deg,lon_deg,min_elevation_deg\nA,95,0,\n")
        cfg = tmp_path / "s.txt"
        cfg.write_text(f"stations.catalog={cat}\n")
        assert main(["--config", str(cfg), "--output", str(tmp_path / "o"), "--command", "handover"]) == 1
        assert "line 2" in capsys.readouterr().err

    def test_validation_exit_code(self, tmp_path, capsys):
        cfg = tmp_path / "s.txt"
        cfg.write_text("walker.altitude_km=-5\n")
        assert main(["--config", str(cfg), "--output", str(tmp_path / "o")]) == 1
        assert "error" in capsys.readouterr().err

    def test_missing_config_file(self, tmp_path):
        assert main(["--config", str(tmp_path / "nope.txt"), "--output", str(tmp_path)]) == 1

    def test_unwritable_output_is_runtime_error(self, tmp_path, capsys):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        assert main(["--output", str(blocker / "sub"), "--command", "mass"]) == 2
        assert "runtime error" in capsys.readouterr().err

    def test_unknown_command_rejected(self):
        with pytest.raises(ScenarioError):
            run("teleport", Scenario(), ".")


def test_collaboration_regression():
    # frozen from the default scenario: 10 catalog sites, 45 pairs, 60 s steps over one period
    rows = Context(Scenario()).route_rows()
    delays = [r.delay_ms for *_, r in rows if r is not None]
    assert len(rows) == 6_930 and len(delays) == 6_930
    assert min(delays) == pytest.approx(7.769876859057453, rel=1e-9)
    assert statistics.median(delays) == pytest.approx(32.642049581243285, rel=1e-9)
    assert max(delays) == pytest.approx(63.20248336107959, rel=1e-9)
