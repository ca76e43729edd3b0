"""TOML config decoding and deterministic artifact writers."""

from __future__ import annotations

import json

import numpy as np
import pytest

from pmcflow import (
    MinkowskiTorus,
    load_config,
    parse_config,
    read_monitors_ndjson,
    run,
    verify_identity,
    write_monitors_ndjson,
    write_residuals_csv,
    write_run_artifacts,
    write_slopes_json,
    write_snapshot_csv,
)
from pmcflow.errors import ConfigError
from pmcflow.io import build_manifest, write_manifest

from conftest import crossing_setup

MINIMAL = """
family = "minkowski-torus"
u0-preset = "const"
p = 1.0
tau = 0.1
t_max = 1.0

[grid]
n = 1
sizes = [16]
"""

CROSSING = """
family = "robertson-walker"
a-preset = "crossing"
u0-preset = "sinusoid"
p = 0.5
tau = 0.5
t_max = 2.0
integrator = "rk2"

[grid]
n = 1
sizes = [32]

[u0]
amplitude = 0.05
offset = 1.0

[output]
stride = 5
snapshot-stride = 100
dir = "artifacts"
"""


class TestParseConfig:
    def test_minimal_defaults(self):
        setup = parse_config(MINIMAL)
        assert setup.flow.cfl_safety == 0.2
        assert setup.flow.eps_stationary == 1e-6
        assert setup.flow.integrator == "euler"
        assert setup.flow.monitor_stride == 1
        assert setup.initial.grid.periods == (2.0 * np.pi,)
        assert str(setup.out_dir) == "out"
        np.testing.assert_array_equal(setup.initial.u, 0.0)

    def test_full_config(self):
        setup = parse_config(CROSSING)
        assert setup.flow.p == 0.5 and setup.flow.tau == 0.5
        assert setup.flow.monitor_stride == 5
        assert setup.flow.snapshot_stride == 100
        assert str(setup.out_dir) == "artifacts"
        x = setup.initial.grid.coordinates()[..., 0]
        np.testing.assert_allclose(setup.initial.u, 1.0 + 0.05 * np.sin(x))

    def test_sinusoid_mode(self):
        text = CROSSING.replace("amplitude = 0.05", "amplitude = 0.05\nmode = 3")
        setup = parse_config(text)
        x = setup.initial.grid.coordinates()[..., 0]
        np.testing.assert_allclose(setup.initial.u, 1.0 + 0.05 * np.sin(3.0 * x))

    def test_u0_from_file(self, tmp_path):
        values = 0.2 + 0.01 * np.arange(16.0)
        np.savetxt(tmp_path / "heights.txt", values)
        text = MINIMAL + '\n[u0]\npath = "heights.txt"\n'
        text = text.replace('u0-preset = "const"', 'u0-preset = "file"')
        setup = parse_config(text, config_dir=tmp_path)
        np.testing.assert_allclose(setup.initial.u, values)

    def test_two_dimensional_grid(self):
        text = MINIMAL.replace("n = 1", "n = 2").replace("sizes = [16]",
                                                         "sizes = [16, 8]\nperiods = [6.283, 3.1415]")
        setup = parse_config(text)
        assert setup.initial.grid.sizes == (16, 8)
        assert setup.initial.u.shape == (16, 8)


class TestParseErrors:
    @pytest.mark.parametrize("mutate,needle", [
        (lambda s: s.replace("p = 1.0", "p = 1.5"), "p"),
        (lambda s: s.replace("tau = 0.1", "tau = -0.2"), "tau"),
        (lambda s: s.replace('family = "minkowski-torus"',
                             'family = "anti-de-sitter"'), "family"),
        (lambda s: s + "\nwarp = 9\n", "warp"),
        (lambda s: s.replace("sizes = [16]", "sizes = [16, 16]"), "sizes"),
        (lambda s: s.replace("n = 1", "n = 3"), "n"),
        (lambda s: s.replace('u0-preset = "const"', 'u0-preset = "bumps"'), "u0-preset"),
        (lambda s: s + '\na-preset = "crossing"\n', "a-preset"),
    ])
    def test_diagnostic_names_offending_key(self, mutate, needle):
        with pytest.raises(ConfigError) as info:
            parse_config(mutate(MINIMAL))
        assert needle in str(info.value)

    def test_robertson_walker_requires_scale_preset(self):
        text = MINIMAL.replace('family = "minkowski-torus"',
                               'family = "robertson-walker"')
        with pytest.raises(ConfigError) as info:
            parse_config(text)
        assert "a-preset" in str(info.value)

    def test_malformed_toml_reports_location(self):
        with pytest.raises(ConfigError) as info:
            parse_config("family = \np = 1.0\n")
        assert "line" in str(info.value)

    def test_sinusoid_requires_amplitude(self):
        text = MINIMAL.replace('u0-preset = "const"', 'u0-preset = "sinusoid"')
        with pytest.raises(ConfigError) as info:
            parse_config(text)
        assert "amplitude" in str(info.value)

    def test_file_size_mismatch(self, tmp_path):
        np.savetxt(tmp_path / "short.txt", np.zeros(5))
        text = MINIMAL.replace('u0-preset = "const"', 'u0-preset = "file"')
        text += '\n[u0]\npath = "short.txt"\n'
        with pytest.raises(ConfigError) as info:
            parse_config(text, config_dir=tmp_path)
        assert "16" in str(info.value)

    def test_missing_file(self, tmp_path):
        miss = tmp_path / "nope.toml"
        with pytest.raises(ConfigError):
            load_config(miss)

    def test_wrong_value_types(self):
        with pytest.raises(ConfigError):
            parse_config(MINIMAL.replace("p = 1.0", 'p = "one"'))
        with pytest.raises(ConfigError):
            parse_config(MINIMAL.replace("sizes = [16]", 'sizes = "16"'))


@pytest.fixture(scope="module")
def tiny_run():
    state, config = crossing_setup(1.0, 0.3, 16, t_max=0.5, snapshot_stride=50)
    return run(state, config)


class TestMonitorsIO:
    def test_round_trip(self, tmp_path, tiny_run):
        path = tmp_path / "monitors.ndjson"
        write_monitors_ndjson(tiny_run.monitors, path)
        back = read_monitors_ndjson(path)
        assert back == list(tiny_run.monitors)

    def test_bytes_are_reproducible(self, tmp_path, tiny_run):
        a, b = tmp_path / "a.ndjson", tmp_path / "b.ndjson"
        write_monitors_ndjson(tiny_run.monitors, a)
        write_monitors_ndjson(tiny_run.monitors, b)
        assert a.read_bytes() == b.read_bytes()

    def test_null_encodes_unused_envelope(self, tmp_path, tiny_run):
        path = tmp_path / "m.ndjson"
        write_monitors_ndjson(tiny_run.monitors, path)
        first = json.loads(path.read_text().splitlines()[0])
        assert first["bound44_lhs"] is None  # p = 1 uses the exponential bound
        assert first["bound45_lhs"] is not None


class TestSnapshotCsv:
    def test_values_round_trip_exactly(self, tmp_path, tiny_run):
        state = tiny_run.final_state
        path = tmp_path / "u.csv"
        write_snapshot_csv(state, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "x1,u"
        vals = np.array([float(line.split(",")[1]) for line in lines[1:]])
        np.testing.assert_array_equal(vals, state.u)

    def test_run_artifacts_layout(self, tmp_path, tiny_run):
        write_run_artifacts(tiny_run, tmp_path / "out")
        assert (tmp_path / "out" / "monitors.ndjson").exists()
        snaps = sorted((tmp_path / "out" / "snapshots").glob("u_*.csv"))
        assert len(snaps) == len(tiny_run.states)
        assert snaps[0].name == "u_0.csv"


class TestManifest:
    def test_build_and_write(self, tmp_path, tiny_run):
        manifest = build_manifest({"p": 1.0}, tiny_run, {"eps": 1e-6}, 1.25)
        path = tmp_path / "manifest.json"
        write_manifest(manifest, path)
        data = json.loads(path.read_text())
        assert data["termination"] == tiny_run.termination
        assert data["steps"] == tiny_run.steps
        assert data["config"] == {"p": 1.0}
        assert data["version"]
        assert data["wall_time_s"] == 1.25


class TestVerifierArtifacts:
    def test_residuals_and_slopes(self, tmp_path):
        report = verify_identity("codazzi", "minkowski",
                                 dt_list=(0.1, 0.05), h_list=(16, 32))
        write_residuals_csv([report], tmp_path / "residuals.csv")
        write_slopes_json([report], tmp_path / "slopes.json")
        lines = (tmp_path / "residuals.csv").read_text().splitlines()
        assert lines[0] == "identity,dt,h,max_residual"
        assert len(lines) == 1 + 4
        slopes = json.loads((tmp_path / "slopes.json").read_text())
        assert slopes[0]["identity"] == "codazzi"
        assert slopes[0]["exact"] is True
