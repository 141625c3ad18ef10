"""Run configuration: a single JSON file describing one solver run.

Complex numbers are [re, im] pairs (plain numbers are accepted as reals);
polynomials are ascending-power coefficient lists; rational functions are
{"num": [...], "den": [...]} objects or bare polynomial lists.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .jumps import (
    ConstantCoefficient,
    JumpCoefficient,
    KhrapkovCoefficient,
    RationalFn,
    ScalarCoefficient,
    demo_coefficient,
)
from .mesh import HalfLineCut

_MODES = ("solve", "validate", "converge", "oracle-compare")

_DEFAULT_TOL = {"jump": 1e-2, "det": 1e-4, "concat": 1e-10}


@dataclass
class RunConfig:
    """Parsed, validated run description."""

    mode: str
    family: str
    coefficient: JumpCoefficient
    cut: HalfLineCut
    truncation_height: float
    step: float
    points: np.ndarray
    tolerances: dict = field(default_factory=dict)
    workers: int = 0
    output: str | None = None
    cache: str | None = None
    source: str = "<config>"


def _err(path: str, msg: str) -> ConfigError:
    return ConfigError(f"{path}: {msg}")


def _get(obj: dict, key: str, path: str, required: bool = False, default=None):
    if key not in obj:
        if required:
            raise _err(f"{path}.{key}", "missing required key")
        return default
    return obj[key]


def _real_of(v, path: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise _err(path, f"expected a real number, got {v!r}")
    return float(v)


def _int_of(v, path: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise _err(path, f"expected an integer, got {v!r}")
    return int(v)


def _complex_of(v, path: str) -> complex:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(float(v), 0.0)
    if (
        isinstance(v, list)
        and len(v) == 2
        and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v)
    ):
        return complex(float(v[0]), float(v[1]))
    raise _err(path, f"expected a number or [re, im] pair, got {v!r}")


def _poly_of(v, path: str) -> np.ndarray:
    if not isinstance(v, list) or not v:
        raise _err(path, "expected a nonempty coefficient list (ascending powers)")
    return np.array([_complex_of(c, f"{path}[{k}]") for k, c in enumerate(v)])


def _rational_of(v, path: str) -> RationalFn:
    if isinstance(v, dict):
        unknown = set(v) - {"num", "den"}
        if unknown:
            raise _err(path, f"unknown keys {sorted(unknown)} in rational function")
        num = _poly_of(_get(v, "num", path, required=True), f"{path}.num")
        den = (
            _poly_of(v["den"], f"{path}.den") if "den" in v else np.array([1.0 + 0j])
        )
        return RationalFn(num, den)
    return RationalFn(_poly_of(v, path))


def _build_coefficient(spec, base: complex | None, path: str):
    if not isinstance(spec, dict):
        raise _err(path, "expected an object with a 'family' tag")
    family = _get(spec, "family", path, required=True)
    if family not in ("demo", "khrapkov", "scalar", "constant", "rational"):
        raise _err(f"{path}.family", f"unknown family {family!r}")
    if family == "demo":
        coef = demo_coefficient()
        if base is not None and base != coef.base:
            raise _err(
                "cut.base",
                f"demo coefficient is pinned to base 2i, got {base}",
            )
        return "demo", coef
    if base is None:
        raise _err("cut.base", f"required for family '{family}'")
    if family == "khrapkov":
        decays = bool(_get(spec, "decays", path, default=True))
        coef = KhrapkovCoefficient(
            c=_rational_of(_get(spec, "c", path, required=True), f"{path}.c"),
            p=_rational_of(_get(spec, "p", path, required=True), f"{path}.p"),
            l=_poly_of(_get(spec, "l", path, required=True), f"{path}.l"),
            m=_poly_of(_get(spec, "m", path, required=True), f"{path}.m"),
            n=_poly_of(_get(spec, "n", path, required=True), f"{path}.n"),
            base=base,
            decays=decays,
        )
        return family, coef
    if family == "scalar":
        m = _rational_of(_get(spec, "m", path, required=True), f"{path}.m")
        return family, ScalarCoefficient(m, base)
    if family == "constant":
        raw = _get(spec, "matrix", path, required=True)
        if not isinstance(raw, list) or len(raw) != 4:
            raise _err(f"{path}.matrix", "expected 4 entries, row-major")
        k = np.array(
            [_complex_of(x, f"{path}.matrix[{j}]") for j, x in enumerate(raw)]
        ).reshape(2, 2)
        return family, ConstantCoefficient(k, base)
    raw = _get(spec, "entries", path, required=True)
    if (
        not isinstance(raw, list)
        or len(raw) != 2
        or any(not isinstance(row, list) or len(row) != 2 for row in raw)
    ):
        raise _err(f"{path}.entries", "expected a 2x2 nested list")
    ent = [
        [
            _rational_of(raw[i][j], f"{path}.entries[{i}][{j}]")
            for j in range(2)
        ]
        for i in range(2)
    ]
    from .jumps import RationalCoefficient

    return family, RationalCoefficient(ent, base)


def _build_points(spec, base: complex, path: str) -> np.ndarray:
    if spec is None:
        # Default sweep: a horizontal line just below the cut base.
        im = base.imag - 0.2
        return np.linspace(-10.0, 10.0, 100) + 1j * im
    if not isinstance(spec, dict):
        raise _err(path, "expected an object with 'line' or 'points'")
    if ("line" in spec) == ("points" in spec):
        raise _err(path, "give exactly one of 'line' or 'points'")
    if "points" in spec:
        raw = spec["points"]
        if not isinstance(raw, list) or not raw:
            raise _err(f"{path}.points", "expected a nonempty list")
        return np.array(
            [_complex_of(p, f"{path}.points[{k}]") for k, p in enumerate(raw)]
        )
    line = spec["line"]
    if not isinstance(line, dict):
        raise _err(f"{path}.line", "expected an object")
    im = _real_of(_get(line, "im", f"{path}.line", required=True), f"{path}.line.im")
    re_min = _real_of(
        _get(line, "re_min", f"{path}.line", default=-10.0), f"{path}.line.re_min"
    )
    re_max = _real_of(
        _get(line, "re_max", f"{path}.line", default=10.0), f"{path}.line.re_max"
    )
    count = _int_of(
        _get(line, "count", f"{path}.line", default=100), f"{path}.line.count"
    )
    if count < 1:
        raise _err(f"{path}.line.count", "need at least one point")
    if re_max < re_min:
        raise _err(f"{path}.line", f"re_max {re_max} < re_min {re_min}")
    return np.linspace(re_min, re_max, count) + 1j * im


def parse_config(path: str, mode: str | None = None) -> RunConfig:
    """Load and validate a JSON run configuration.

    mode (from the CLI subcommand) overrides any 'mode' key in the file.
    Raises ConfigError with the file position for syntax errors and with the
    key path for semantic ones.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be an object")
    cfg_mode = mode or _get(raw, "mode", "config", default="solve")
    if cfg_mode not in _MODES:
        raise _err("mode", f"expected one of {list(_MODES)}, got {cfg_mode!r}")

    cut_spec = _get(raw, "cut", "config", default=None)
    base = None
    if cut_spec is not None:
        if not isinstance(cut_spec, dict):
            raise _err("cut", "expected an object")
        if "base" in cut_spec:
            base = _complex_of(cut_spec["base"], "cut.base")

    family, coef = _build_coefficient(
        _get(raw, "coefficient", "config", required=True), base, "coefficient"
    )
    cut = HalfLineCut(coef.base)

    mesh_spec = _get(raw, "mesh", "config", required=True)
    if not isinstance(mesh_spec, dict):
        raise _err("mesh", "expected an object")
    height = _real_of(
        _get(mesh_spec, "truncation_height", "mesh", required=True),
        "mesh.truncation_height",
    )
    step = _real_of(_get(mesh_spec, "step", "mesh", required=True), "mesh.step")
    if step <= 0:
        raise _err("mesh.step", f"must be positive, got {step}")
    if height <= cut.base.imag:
        raise _err(
            "mesh.truncation_height",
            f"must exceed Im(base) = {cut.base.imag}, got {height}",
        )

    points = _build_points(_get(raw, "evaluation", "config", default=None),
                           cut.base, "evaluation")

    tol = dict(_DEFAULT_TOL)
    tol_spec = _get(raw, "tolerances", "config", default=None)
    if tol_spec is not None:
        if not isinstance(tol_spec, dict):
            raise _err("tolerances", "expected an object")
        for key, val in tol_spec.items():
            if key not in ("jump", "det", "concat", "inverse"):
                raise _err(f"tolerances.{key}", "unknown tolerance")
            v = _real_of(val, f"tolerances.{key}")
            if v <= 0:
                raise _err(f"tolerances.{key}", "must be positive")
            tol[key] = v

    workers = _get(raw, "workers", "config", default=0)
    workers = _int_of(workers, "workers")
    if workers < 0:
        raise _err("workers", "must be >= 0 (0 means all cores)")

    output = _get(raw, "output", "config", default=None)
    if output is not None and not isinstance(output, str):
        raise _err("output", "expected a path string")
    cache = _get(raw, "cache", "config", default=None)
    if cache is not None and not isinstance(cache, str):
        raise _err("cache", "expected a path string")

    known = {
        "mode", "coefficient", "cut", "mesh", "evaluation", "tolerances",
        "workers", "output", "cache",
    }
    unknown = set(raw) - known
    if unknown:
        raise _err(sorted(unknown)[0], "unknown top-level key")

    return RunConfig(
        mode=cfg_mode,
        family=family,
        coefficient=coef,
        cut=cut,
        truncation_height=height,
        step=step,
        points=points,
        tolerances=tol,
        workers=workers,
        output=output,
        cache=cache,
        source=str(path),
    )
