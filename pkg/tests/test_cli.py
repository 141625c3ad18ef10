import json
import subprocess
import sys

import pytest

_RUN = [sys.executable, "-W", "ignore::UserWarning", "-m", "rhode.cli"]


def _cli(*args):
    return subprocess.run(_RUN + list(args), capture_output=True, text=True)


def _write(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def _coarse_demo_config(tmp_path, **overrides):
    payload = {
        "coefficient": {"family": "demo"},
        "mesh": {"truncation_height": 80.0, "step": 0.2},
        "evaluation": {"line": {"im": 1.8, "re_min": -5.0, "re_max": 5.0,
                                "count": 10}},
    }
    payload.update(overrides)
    return _write(tmp_path, "run.json", payload)


def test_solve_writes_csv_with_exact_header(tmp_path):
    cfg = _coarse_demo_config(tmp_path)
    out = tmp_path / "u.csv"
    res = _cli("solve", "--config", cfg, "--out", str(out))
    assert res.returncode == 0, res.stderr
    lines = out.read_text().splitlines()
    assert lines[0] == ("Re z,Im z,Re U11,Im U11,Re U12,Im U12,"
                        "Re U21,Im U21,Re U22,Im U22")
    assert len(lines) == 11


def test_solve_output_is_byte_deterministic(tmp_path):
    cfg = _coarse_demo_config(tmp_path)
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert _cli("solve", "--config", cfg, "--out", str(out1)).returncode == 0
    assert _cli("solve", "--config", cfg, "--out", str(out2)).returncode == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_cache_coherence(tmp_path):
    cfg = _coarse_demo_config(tmp_path)
    cache = tmp_path / "r.txt"
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    r1 = _cli("solve", "--config", cfg, "--out", str(out1),
              "--cache", str(cache))
    assert r1.returncode == 0 and cache.exists()
    r2 = _cli("solve", "--config", cfg, "--out", str(out2),
              "--cache", str(cache))
    assert r2.returncode == 0
    assert "cache" in r2.stdout
    assert out1.read_bytes() == out2.read_bytes()


def test_cache_mismatch_is_solver_error(tmp_path):
    cfg = _coarse_demo_config(tmp_path)
    cache = tmp_path / "r.txt"
    assert _cli("solve", "--config", cfg, "--cache",
                str(cache)).returncode == 0
    # a cache built for a different mesh must be refused
    cfg2 = _coarse_demo_config(tmp_path,
                               mesh={"truncation_height": 80.0, "step": 0.4})
    res = _cli("solve", "--config", cfg2, "--cache", str(cache))
    assert res.returncode == 3
    assert "CacheMismatch" in res.stderr


def test_config_syntax_error_reports_position(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"coefficient": {"family": "demo"} "mesh": {}}')
    res = _cli("solve", "--config", str(bad))
    assert res.returncode == 2
    assert "bad.json:1:" in res.stderr


def test_unknown_family_is_config_error(tmp_path):
    cfg = _write(tmp_path, "x.json", {
        "coefficient": {"family": "mystery"},
        "mesh": {"truncation_height": 10.0, "step": 0.1},
    })
    res = _cli("solve", "--config", cfg)
    assert res.returncode == 2
    assert "unknown family" in res.stderr


def test_demo_base_conflict_is_config_error(tmp_path):
    cfg = _write(tmp_path, "x.json", {
        "coefficient": {"family": "demo"},
        "cut": {"base": [0.0, 3.0]},
        "mesh": {"truncation_height": 10.0, "step": 0.1},
    })
    res = _cli("solve", "--config", cfg)
    assert res.returncode == 2
    assert "pinned" in res.stderr


def test_evaluation_point_on_cut_is_solver_error(tmp_path):
    cfg = _coarse_demo_config(
        tmp_path, evaluation={"points": [[0.0, 10.0]]})
    res = _cli("solve", "--config", cfg)
    assert res.returncode == 3
    assert "10j" in res.stderr


def test_validate_breach_exits_4(tmp_path):
    cfg = _coarse_demo_config(
        tmp_path, mesh={"truncation_height": 80.0, "step": 1.0})
    res = _cli("validate", "--config", cfg)
    assert res.returncode == 4
    assert "BREACH" in res.stdout


def test_validate_ok_exits_0(tmp_path):
    cfg = _coarse_demo_config(
        tmp_path, mesh={"truncation_height": 80.0, "step": 0.05})
    res = _cli("validate", "--config", cfg)
    assert res.returncode == 0, res.stdout + res.stderr


def test_validate_scalar_family_exits_0(tmp_path):
    # The diagonal fast path skips the march; the loop-identity check must
    # still produce a finite (passing) value rather than a NaN breach.
    cfg = _write(tmp_path, "scalar.json", {
        "coefficient": {"family": "scalar",
                        "m": {"num": [26.0, 2.0, 1.0],
                              "den": [25.0, 2.0, 1.0]}},
        "cut": {"base": [0.0, 2.0]},
        "mesh": {"truncation_height": 80.0, "step": 0.1},
        "evaluation": {"line": {"im": 1.0, "re_min": -5.0, "re_max": 5.0,
                                "count": 10}},
    })
    out = tmp_path / "checks.csv"
    res = _cli("validate", "--config", cfg, "--out", str(out))
    assert res.returncode == 0, res.stdout + res.stderr
    assert "BREACH" not in res.stdout
    loop_rows = [line for line in out.read_text().splitlines()
                 if line.startswith("loop-identity")]
    assert loop_rows and loop_rows[0].endswith(",ok")
    assert "nan" not in loop_rows[0]


def test_converge_unsupported_family_exits_2(tmp_path):
    cfg = _write(tmp_path, "rat.json", {
        "coefficient": {"family": "rational", "entries": [
            [{"num": [1.0]}, {"num": [0.0]}],
            [{"num": [0.0]}, {"num": [2.0]}],
        ]},
        "cut": {"base": [0.0, 1.0]},
        "mesh": {"truncation_height": 21.0, "step": 0.1},
    })
    res = _cli("converge", "--config", cfg)
    assert res.returncode == 2
    assert "rational" in res.stderr


def test_oracle_compare_emits_side_by_side(tmp_path):
    cfg = _coarse_demo_config(tmp_path)
    out = tmp_path / "oc.csv"
    res = _cli("oracle-compare", "--config", cfg, "--out", str(out))
    assert res.returncode == 0
    header = out.read_text().splitlines()[0]
    assert header.endswith("Re O22,Im O22,max_abs_dev")
    assert "oracle deviation max" in res.stdout


def test_mode_key_in_config_is_overridden_by_subcommand(tmp_path):
    cfg = _coarse_demo_config(tmp_path, mode="validate")
    out = tmp_path / "u.csv"
    res = _cli("solve", "--config", cfg, "--out", str(out))
    assert res.returncode == 0
    assert out.read_text().startswith("Re z,Im z")
