"""Persistence formats, configuration parsing and the command line."""

import json
import struct

import numpy as np
import pytest

from skdv.cli import EXIT_INVALID, EXIT_NUMERICAL, EXIT_OK, main
from skdv.config import ConfigError, parse_config
from skdv.exceptions import GridError
from skdv.grid import SpaceTimeField, SpatialGrid, TimeGrid
from skdv.io import MAGIC, dumps_json, field_from_bytes, field_to_bytes, read_field, read_json, write_field


# binary fields -------------------------------------------------------------------

def _field(rng, real=False):
    sg, tg = SpatialGrid(16, 3.0), TimeGrid(-1.0, 2.0, 5)
    v = rng.normal(size=(6, 16))
    if not real:
        v = v + 1j * rng.normal(size=(6, 16))
    return SpaceTimeField(sg, tg, v, real)


@pytest.mark.parametrize("real", [False, True])
def test_field_round_trip(rng, tmp_path, real):
    f = _field(rng, real)
    g = read_field(write_field(tmp_path / "f.bin", f))
    assert g.spatial == f.spatial and g.temporal == f.temporal
    assert g.is_real_valued == real
    assert np.array_equal(g.values, f.values)


def test_field_layout_is_documented(rng):
    f = _field(rng)
    b = field_to_bytes(f)
    magic, nt, nx, flags, period, t0, t1 = struct.unpack_from("<8sQQQddd", b)
    assert (magic, nt, nx, flags, period, t0, t1) == (MAGIC, 6, 16, 0, 3.0, -1.0, 2.0)
    first = np.frombuffer(b, "<f8", count=2, offset=56)
    assert first[0] == f.values[0, 0].real and first[1] == f.values[0, 0].imag
    assert len(b) == 56 + 16 * 6 * 16


def test_corrupt_fields_rejected(rng):
    b = field_to_bytes(_field(rng))
    with pytest.raises(GridError):
        field_from_bytes(b[:20])
    with pytest.raises(GridError):
        field_from_bytes(b"XXXXXXXX" + b[8:])
    with pytest.raises(GridError):
        field_from_bytes(b[:-16])


def test_json_is_canonical():
    a = dumps_json({"b": np.float64(1.5), "a": np.arange(3)})
    assert a == '{\n  "a": [\n    0,\n    1,\n    2\n  ],\n  "b": 1.5\n}\n'


# configuration -----------------------------------------------------------------------

def test_config_defaults_and_sections():
    cfg = parse_config("command = solve\nlambda = 0.015625\n[grid]\nnum_points = 128\n")
    assert cfg.command == "solve" and cfg["lambda"] == 2.0 ** -6
    assert cfg["grid.num_points"] == 128 and cfg["grid.num_steps"] == 512
    assert cfg.lines["grid.num_points"] == 4


def test_non_dyadic_lambda_is_reported_with_line():
    with pytest.raises(ConfigError) as exc:
        parse_config("command = solve\nlambda=0.1\n")
    assert exc.value.errors == ["line 2: lambda: lambda must be a dyadic reciprocal"]


def test_all_errors_collected():
    text = "command = sweep\nfoo = 1\n[grid]\nnum_points = 100\nnum_points = 64\nbroken line\n[]\n"
    with pytest.raises(ConfigError) as exc:
        parse_config(text)
    errs = exc.value.errors
    assert any(e.startswith("line 2: unknown key 'foo'") for e in errs)
    assert any(e.startswith("line 4: grid.num_points") for e in errs)
    assert any(e.startswith("line 6: expected key = value") for e in errs)
    assert any(e.startswith("line 7: malformed section") for e in errs)
    assert any(e == "line 0: missing required key 'sweep.cases'" for e in errs)


def test_duplicate_key_reports_first_line():
    with pytest.raises(ConfigError) as exc:
        parse_config("command = probe\nseed = 1\nseed = 2\n[probe]\ns1 = 0\ns2 = 0\n")
    assert exc.value.errors == ["line 3: duplicate key 'seed' (first on line 2)"]


def test_time_window_checked():
    with pytest.raises(ConfigError, match="longer than 4"):
        parse_config("command = solve\neps0 = 1e-3\n[grid]\nt_min = -3\nt_max = 3\n")


# command line -------------------------------------------------------------------------

def _run(tmp_path, text, *extra, name="run"):
    cfg = tmp_path / f"{name}.cfg"
    cfg.write_text(text)
    out = tmp_path / name
    return main(["--config", str(cfg), "--out", str(out), *extra]), out


def test_cli_missing_command(tmp_path, capsys):
    status, _ = _run(tmp_path, "")
    assert status == EXIT_INVALID
    assert "line 0: missing required key 'command'" in capsys.readouterr().err


def test_cli_probe_outputs_and_manifest(tmp_path):
    text = "command = probe\n[probe]\ns1 = -0.1875\ns2 = -0.75\nn_list = 4, 8, 16\n"
    status, out = _run(tmp_path, text)
    assert status == EXIT_OK
    rep = read_json(out / "probe.json")
    assert rep["N"] == [4, 8, 16]
    man = read_json(out / "manifest.json")
    assert man["exit_status"] == 0 and set(man["outputs"]) == {"probe.json", "probe.csv"}
    assert (out / "probe.csv").read_text().splitlines()[0] == "N,R,config"


def test_cli_reruns_are_byte_identical(tmp_path):
    text = ("command = sweep\nseed = 3\n[sweep]\ncases = LIN-S, LIN-K\ntrials = 2\nmax_n = 8\n"
            "lambdas = 0.25\n")
    s1, a = _run(tmp_path, text, name="a")
    s2, b = _run(tmp_path, text, name="b")
    assert s1 == s2 == EXIT_OK
    for name in ("sweep_LIN-S.json", "sweep_LIN-S.csv", "sweep_LIN-K.csv", "sweep_summary.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    assert read_json(a / "manifest.json")["outputs"] == read_json(b / "manifest.json")["outputs"]


def test_cli_seed_override_changes_data(tmp_path):
    text = "command = sweep\n[sweep]\ncases = LIN-S\ntrials = 1\nmax_n = 4\nlambdas = 0.25\n"
    _, a = _run(tmp_path, text, "--seed", "1", name="a")
    _, b = _run(tmp_path, text, "--seed", "2", name="b")
    assert (a / "sweep_LIN-S.csv").read_bytes() != (b / "sweep_LIN-S.csv").read_bytes()
    assert read_json(a / "manifest.json")["config"]["seed"] == 1


def test_cli_solve_writes_fields(tmp_path):
    text = ("command = solve\nlambda = 0.0625\n[grid]\nnum_points = 32\nnum_steps = 128\n"
            "[data]\namplitude = 0.001\n[solve]\ndump_fields = true\nreference = true\n")
    status, out = _run(tmp_path, text)
    assert status == EXIT_OK
    rep = read_json(out / "solve.json")
    assert rep["trace"]["converged"]
    assert rep["reference"]["u_distance"] < 1e-6
    u = read_field(out / "u.bin")
    assert u.values.shape == (129, 32)
    assert read_field(out / "v.bin").is_real_valued


@pytest.mark.filterwarnings("ignore::skdv.exceptions.ResolutionWarning")
def test_cli_numerical_failure_exit_code(tmp_path):
    text = ("command = solve\nlambda = 0.25\n[grid]\nnum_points = 32\nnum_steps = 64\n"
            "[data]\namplitude = 200\n[solve]\nmax_iters = 4\n")
    status, out = _run(tmp_path, text)
    assert status == EXIT_NUMERICAL
    err = read_json(out / "error.json")
    assert err["type"] == "NumericalFailure"
    assert read_json(out / "manifest.json")["exit_status"] == EXIT_NUMERICAL


def test_cli_precondition_exit_code(tmp_path):
    # KDV-LOW starts at N1 = 4, so max_n = 2 empties its axis
    text = "command = sweep\n[sweep]\ncases = KDV-LOW\nmax_n = 2\n"
    status, out = _run(tmp_path, text)
    assert status == EXIT_INVALID
    assert "max_n" in json.loads((out / "error.json").read_text())["messages"][0]


def test_cli_threads_env(tmp_path, monkeypatch):
    monkeypatch.setenv("SKDV_THREADS", "zero")
    status, _ = _run(tmp_path, "command = probe\n[probe]\ns1 = 0\ns2 = 0\n")
    assert status == EXIT_INVALID


def test_cli_f_term_and_norms(tmp_path):
    base = "lambda = 0.0625\n[grid]\nnum_points = 32\nnum_steps = 128\n[data]\namplitude = 0.01\n"
    s, out = _run(tmp_path, "command = f-term\n" + base, name="f")
    assert s == EXIT_OK
    F = read_field(out / "F.bin")
    assert F.is_real_valued
    assert read_json(out / "f_term.json")["sup_t_l2"] > 0
    s, out = _run(tmp_path, "command = norms\n" + base, name="n")
    assert s == EXIT_OK
    n = read_json(out / "norms.json")["norms"]
    assert n["lower"]["Y(eta K v0)"]["total"] <= n["upper"]["Y(eta K v0)"]["total"]
