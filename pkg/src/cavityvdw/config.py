"""Run configuration loading.

Strict schema: unknown keys are rejected by name, every resolved value
carries a provenance tag ("user" or "default"), and validation failures
name the offending key together with the violated constraint. Physics
parameters with no safe default (scenario, cavity geometry, free-space
transition frequency) are required.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

import yaml

from .constants import C
from .errors import ConfigError

SCENARIOS = ("free-space", "planar")
MODES = ("scan-rabi", "dressed", "potential", "force", "weak-limit", "kk-check", "xcheck")
VARIANTS = ("corrected", "as-printed")
FORMATS = ("csv", "jsonl")
SWEEP_TARGETS = ("joint", "A", "B")

# modes that need a cavity mode behind them
PLANAR_ONLY_MODES = ("scan-rabi", "dressed", "force", "weak-limit", "kk-check")

_TOP_KEYS = ("scenario", "mode", "variant", "seed", "cavity", "atoms", "sweep",
             "tolerances", "output")
_CAVITY_KEYS = ("d", "delta", "nu")
_ATOM_KEYS = ("z_a", "z_b", "position_a", "position_b", "omega10",
              "dipole_norm", "orientation")
_SWEEP_KEYS = ("points", "target", "span", "kk_offsets", "weak_ratios", "theta")
_TOL_KEYS = ("quadrature_rel", "xcheck")
_OUT_KEYS = ("path", "format")

_REQUIRED = object()


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run description; every field is validated."""

    scenario: str
    mode: str
    variant: str
    seed: int
    cavity_d: float | None
    cavity_delta: float | None
    cavity_nu: int | None
    z_a: float | None
    z_b: float | None
    position_a: tuple[float, float, float] | None
    position_b: tuple[float, float, float] | None
    omega10: float
    dipole_norm: float
    orientation: tuple[float, float, float]
    sweep_points: int
    sweep_target: str
    sweep_span: tuple[float, float]
    kk_offsets: tuple[float, ...]
    weak_ratios: tuple[float, ...]
    theta: float
    tol_quadrature: float
    tol_xcheck: float | None
    out_path: str | None
    out_format: str
    source_sha256: str
    provenance: dict[str, str]


def _fail(path: str, constraint: str) -> None:
    raise ConfigError(f"{path}: {constraint}")


def _num(path: str, value: Any) -> float:
    # YAML 1.1 reads "2.0e15" (no exponent sign) as a string; accept such
    # strings when they parse cleanly as floats
    if isinstance(value, str):
        try:
            value = float(value)
        except ValueError:
            _fail(path, "expected a number")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(path, "expected a number")
    v = float(value)
    if not math.isfinite(v):
        _fail(path, "must be finite")
    return v


def _intval(path: str, value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(path, "expected an integer")
    return int(value)


def _strval(path: str, value: Any) -> str:
    if not isinstance(value, str):
        _fail(path, "expected a string")
    return value


def _enum(path: str, value: Any, allowed: tuple[str, ...]) -> str:
    v = _strval(path, value)
    if v not in allowed:
        _fail(path, f"must be one of {', '.join(allowed)}")
    return v


def _vec3(path: str, value: Any) -> tuple[float, float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 3:
        _fail(path, "expected a list of 3 numbers")
    return tuple(_num(f"{path}[{i}]", v) for i, v in enumerate(value))


def _floats(path: str, value: Any) -> tuple[float, ...]:
    if not isinstance(value, (list, tuple)) or not value:
        _fail(path, "expected a non-empty list of numbers")
    return tuple(_num(f"{path}[{i}]", v) for i, v in enumerate(value))


def _span(path: str, value: Any) -> tuple[float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        _fail(path, "expected a list [low, high]")
    lo = _num(f"{path}[0]", value[0])
    hi = _num(f"{path}[1]", value[1])
    if not lo < hi:
        _fail(path, "must satisfy low < high")
    return lo, hi


def _section(data: Mapping[str, Any], name: str, allowed: tuple[str, ...]) -> dict:
    raw = data.get(name)
    if raw is None:
        return {}
    if not isinstance(raw, Mapping):
        _fail(name, "expected a mapping of settings")
    for key in raw:
        if key not in allowed:
            _fail(f"{name}.{key}", "unknown key")
    return dict(raw)


class _Resolver:
    """Pulls values out of a parsed section, tracking user/default origin."""

    def __init__(self) -> None:
        self.provenance: dict[str, str] = {}

    def take(self, section: Mapping[str, Any], path: str, default: Any, coerce) -> Any:
        key = path.split(".")[-1]
        if key in section and section[key] is not None:
            self.provenance[path] = "user"
            return coerce(path, section[key])
        if default is _REQUIRED:
            _fail(path, "required but not set")
        self.provenance[path] = "default"
        return default

    def reject(self, section: Mapping[str, Any], path: str, why: str) -> None:
        if path.split(".")[-1] in section:
            _fail(path, why)


def load_config(path: str | Path) -> RunConfig:
    """Read and validate a YAML run configuration."""
    p = Path(path)
    try:
        raw = p.read_bytes()
    except FileNotFoundError:
        raise ConfigError(f"config: file not found: {p}") from None
    except OSError as exc:
        raise ConfigError(f"config: unreadable: {p}: {exc}") from None

    try:
        data = yaml.safe_load(raw)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise ConfigError(f"config: parse error{where}: {exc.problem or exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"config: parse error: {exc}") from None

    if data is None:
        data = {}
    if not isinstance(data, Mapping):
        raise ConfigError("config: top level must be a mapping")
    for key in data:
        if key not in _TOP_KEYS:
            _fail(str(key), "unknown key")

    return _resolve(data, hashlib.sha256(raw).hexdigest())


def _resolve(data: Mapping[str, Any], sha: str) -> RunConfig:
    res = _Resolver()
    top = dict(data)

    scenario = res.take(top, "scenario", _REQUIRED,
                        lambda p, v: _enum(p, v, SCENARIOS))
    default_mode = "scan-rabi" if scenario == "planar" else "potential"
    mode = res.take(top, "mode", default_mode, lambda p, v: _enum(p, v, MODES))
    variant = res.take(top, "variant", "corrected",
                       lambda p, v: _enum(p, v, VARIANTS))
    seed = res.take(top, "seed", 0, _intval)
    if seed < 0:
        _fail("seed", "must be >= 0")

    if scenario != "planar" and mode in PLANAR_ONLY_MODES:
        _fail("mode", f"'{mode}' requires scenario 'planar'")

    cavity = _section(data, "cavity", _CAVITY_KEYS)
    atoms = _section(data, "atoms", _ATOM_KEYS)
    sweep = _section(data, "sweep", _SWEEP_KEYS)
    tol = _section(data, "tolerances", _TOL_KEYS)
    out = _section(data, "output", _OUT_KEYS)

    if scenario == "planar":
        d = res.take(cavity, "cavity.d", _REQUIRED, _num)
        if d <= 0.0:
            _fail("cavity.d", "must be > 0")
        delta = res.take(cavity, "cavity.delta", _REQUIRED, _num)
        if not 0.0 < delta < 0.1:
            _fail("cavity.delta", "must satisfy 0 < delta < 0.1 (model-validity bound)")
        nu = res.take(cavity, "cavity.nu", _REQUIRED, _intval)
        if nu < 1:
            _fail("cavity.nu", "must be >= 1")

        res.reject(atoms, "atoms.position_a", "not applicable to scenario 'planar' (use atoms.z_a)")
        res.reject(atoms, "atoms.position_b", "not applicable to scenario 'planar' (use atoms.z_b)")
        z_a = res.take(atoms, "atoms.z_a", d / 2.0, _num)
        z_b = res.take(atoms, "atoms.z_b", d / 2.0, _num)
        for path, z in (("atoms.z_a", z_a), ("atoms.z_b", z_b)):
            if not 0.0 <= z <= d:
                _fail(path, "must lie within [0, cavity.d]")
        omega10 = res.take(atoms, "atoms.omega10", nu * math.pi * C / d, _num)
        position_a = position_b = None
    else:
        for key in _CAVITY_KEYS:
            res.reject(cavity, f"cavity.{key}", "not applicable to scenario 'free-space'")
        res.reject(atoms, "atoms.z_a", "not applicable to scenario 'free-space' (use atoms.position_a)")
        res.reject(atoms, "atoms.z_b", "not applicable to scenario 'free-space' (use atoms.position_b)")
        d = delta = None
        nu = None
        z_a = z_b = None
        position_a = res.take(atoms, "atoms.position_a", (0.0, 0.0, 0.0), _vec3)
        position_b = res.take(atoms, "atoms.position_b", (0.0, 0.0, 1.0e-7), _vec3)
        if position_a == position_b:
            _fail("atoms.position_b", "must differ from atoms.position_a")
        omega10 = res.take(atoms, "atoms.omega10", _REQUIRED, _num)
    if omega10 <= 0.0:
        _fail("atoms.omega10", "must be > 0")

    dipole_norm = res.take(atoms, "atoms.dipole_norm", 1.0e-29, _num)
    if dipole_norm <= 0.0:
        _fail("atoms.dipole_norm", "must be > 0")

    orientation = res.take(atoms, "atoms.orientation", (1.0, 0.0, 0.0), _orientation)
    if scenario == "planar" and (orientation[1] != 0.0 or orientation[2] != 0.0):
        _fail("atoms.orientation", "scenario 'planar' supports x-aligned dipoles only")

    points = res.take(sweep, "sweep.points", 200, _intval)
    if points < 1:
        _fail("sweep.points", "must be >= 1")
    target = res.take(sweep, "sweep.target", "joint",
                      lambda p, v: _enum(p, v, SWEEP_TARGETS))
    default_span = (0.001, 0.999) if scenario == "planar" else (0.5, 2.0)
    span = res.take(sweep, "sweep.span", default_span, _span)
    if scenario == "planar":
        if span[0] < 0.0 or span[1] > 1.0:
            _fail("sweep.span", "must lie within [0, 1] (fractions of cavity.d)")
    elif span[0] <= 0.0:
        _fail("sweep.span", "must be > 0 (multiples of the configured separation)")

    kk_offsets = res.take(sweep, "sweep.kk_offsets",
                          (-1.0e3, -3.0e2, -1.0e2, 1.0e2, 3.0e2, 1.0e3), _floats)
    if any(abs(o) < 100.0 for o in kk_offsets):
        _fail("sweep.kk_offsets",
              "offsets must be at least 100 mode widths from resonance "
              "(asymptotic-regime comparison)")
    weak_ratios = res.take(sweep, "sweep.weak_ratios",
                           (1.0e1, 1.0e2, 1.0e3, 1.0e4), _floats)
    if any(r <= 0.0 for r in weak_ratios):
        _fail("sweep.weak_ratios", "ratios must be > 0")
    theta = res.take(sweep, "sweep.theta", 0.6, _num)
    if not 0.0 <= theta < math.pi:
        _fail("sweep.theta", "must lie within [0, pi)")

    tol_quad = res.take(tol, "tolerances.quadrature_rel", 1.0e-9, _num)
    if tol_quad <= 0.0:
        _fail("tolerances.quadrature_rel", "must be > 0")
    tol_xcheck = res.take(tol, "tolerances.xcheck", None, _num)
    if tol_xcheck is not None and tol_xcheck <= 0.0:
        _fail("tolerances.xcheck", "must be > 0")

    out_path = res.take(out, "output.path", None, _strval)
    out_format = res.take(out, "output.format", "csv",
                          lambda p, v: _enum(p, v, FORMATS))

    return RunConfig(
        scenario=scenario, mode=mode, variant=variant, seed=seed,
        cavity_d=d, cavity_delta=delta, cavity_nu=nu,
        z_a=z_a, z_b=z_b, position_a=position_a, position_b=position_b,
        omega10=omega10, dipole_norm=dipole_norm, orientation=orientation,
        sweep_points=points, sweep_target=target, sweep_span=span,
        kk_offsets=kk_offsets, weak_ratios=weak_ratios, theta=theta,
        tol_quadrature=tol_quad, tol_xcheck=tol_xcheck,
        out_path=out_path, out_format=out_format,
        source_sha256=sha, provenance=res.provenance,
    )


def _orientation(path: str, value: Any) -> tuple[float, float, float]:
    if isinstance(value, str):
        axes = {"x": (1.0, 0.0, 0.0), "y": (0.0, 1.0, 0.0), "z": (0.0, 0.0, 1.0)}
        if value not in axes:
            _fail(path, "expected 'x', 'y', 'z', or a list of 3 numbers")
        return axes[value]
    vec = _vec3(path, value)
    norm = math.sqrt(sum(v * v for v in vec))
    if norm == 0.0:
        _fail(path, "must be a nonzero direction")
    return tuple(v / norm for v in vec)
