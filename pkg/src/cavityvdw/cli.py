"""Command-line surface: deterministic tabular runs over the library.

Every subcommand loads a YAML config, evaluates one mode of operation and
writes a data table (CSV or JSON lines) plus a JSON manifest holding the
config hash, physical constants, variant flags, tolerances and value
provenance. Outputs carry no timestamps, so identical configs give
byte-identical files. Exit codes: 0 success, 1 validation or numeric
failure, 2 tolerance failure in xcheck.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from pathlib import Path

import numpy as np

from .config import PLANAR_ONLY_MODES, RunConfig, load_config
from .constants import C, EPS0, HBAR, MU0
from .dressed import DressedSystem, coupling_angle, force_theta, potential_pm, potential_theta
from .errors import ConfigError, DomainError, FitError, QuadratureError
from .greens import (
    FreeSpaceGreens,
    PlanarCavity,
    QuadratureControl,
    SpectralFunction,
    kk_real_from_imag,
)
from .modecoupling import AtomSpec, lorentzian_profile
from .planarcavity import PlanarScenario, free_decay_rate, scan_rabi
from .tabular import Table
from .weakfield import (
    free_space_resonant_potential,
    narrow_mode_real_contraction,
    resonant_potential,
    weak_limit_potentials,
)


@dataclasses.dataclass(frozen=True)
class RunResult:
    table: Table
    manifest: dict
    failures: int


# --------------------------------------------------------------- assembly

def _cavity(cfg: RunConfig) -> PlanarCavity:
    return PlanarCavity(d=cfg.cavity_d, delta=cfg.cavity_delta, nu=cfg.cavity_nu)


def _planar_scenario(cfg: RunConfig) -> PlanarScenario:
    cav = _cavity(cfg)
    dip = tuple(cfg.dipole_norm * o for o in cfg.orientation)
    return PlanarScenario(
        cavity=cav,
        atom_a=AtomSpec(position=(0.0, 0.0, cfg.z_a), omega10=cfg.omega10, dipole=dip),
        atom_b=AtomSpec(position=(0.0, 0.0, cfg.z_b), omega10=cfg.omega10, dipole=dip),
    )


def _grid(cfg: RunConfig, d: float) -> np.ndarray:
    lo, hi = cfg.sweep_span
    zs = np.linspace(lo, hi, cfg.sweep_points) * d
    # stay off the idealized plates; mirrors the scenario's own interior clamp
    return np.clip(zs, 1e-6 * d, (1.0 - 1e-6) * d)


def _trial_at(scn: PlanarScenario, target: str, z: float) -> PlanarScenario:
    z_a = z if target in ("joint", "A") else scn.atom_a.position[2]
    z_b = z if target in ("joint", "B") else scn.atom_b.position[2]
    return PlanarScenario(
        cavity=scn.cavity,
        atom_a=AtomSpec(position=(0.0, 0.0, z_a), omega10=scn.atom_a.omega10,
                        dipole=scn.atom_a.dipole),
        atom_b=AtomSpec(position=(0.0, 0.0, z_b), omega10=scn.atom_b.omega10,
                        dipole=scn.atom_b.dipole),
    )


# ------------------------------------------------------------------ modes

def _mode_scan_rabi(cfg: RunConfig) -> tuple[Table, dict, int]:
    scn = _planar_scenario(cfg)
    table = scan_rabi(scn, cfg.sweep_target, _grid(cfg, scn.cavity.d))
    return table, {"omega2_unit": C * scn.gamma0 / scn.cavity.d}, 0


def _mode_dressed(cfg: RunConfig) -> tuple[Table, dict, int]:
    scn = _planar_scenario(cfg)
    w_unit = math.sqrt(C * scn.gamma0 / scn.cavity.d)
    rows = []
    for z in _grid(cfg, scn.cavity.d):
        trial = _trial_at(scn, cfg.sweep_target, float(z))
        omega_r = trial.rabi(trial.position_a, trial.position_b)
        sysd = DressedSystem.from_coupling(omega_r, trial.detuning)
        rows.append({
            "z_A": trial.atom_a.position[2],
            "z_B": trial.atom_b.position[2],
            "omega_r": sysd.omega_r,
            "omega": sysd.omega,
            "theta_c": sysd.theta_c,
            "e_plus": sysd.e_plus,
            "e_minus": sysd.e_minus,
            "omega_r_dimless": sysd.omega_r / w_unit,
            "omega_dimless": sysd.omega / w_unit,
            "e_plus_dimless": sysd.e_plus / (HBAR * w_unit),
            "e_minus_dimless": sysd.e_minus / (HBAR * w_unit),
        })
    cols = tuple(rows[0].keys())
    norm = {"frequency_unit": w_unit, "energy_unit": HBAR * w_unit}
    return Table(columns=cols, rows=tuple(rows)), norm, 0


def _mode_potential(cfg: RunConfig) -> tuple[Table, dict, int]:
    if cfg.scenario == "planar":
        return _mode_potential_planar(cfg)
    return _mode_potential_free_space(cfg)


def _mode_potential_planar(cfg: RunConfig) -> tuple[Table, dict, int]:
    scn = _planar_scenario(cfg)
    w_unit = math.sqrt(C * scn.gamma0 / scn.cavity.d)
    e_unit = HBAR * w_unit
    rows = []
    for z in _grid(cfg, scn.cavity.d):
        trial = _trial_at(scn, cfg.sweep_target, float(z))
        omega_r = trial.rabi(trial.position_a, trial.position_b)
        sysd = DressedSystem.from_coupling(omega_r, trial.detuning)
        u_plus, u_minus = potential_pm(sysd.omega)
        u_theta = potential_theta(cfg.theta, sysd)
        rows.append({
            "z_A": trial.atom_a.position[2],
            "z_B": trial.atom_b.position[2],
            "omega_r": omega_r,
            "u_plus": u_plus,
            "u_minus": u_minus,
            "u_theta": u_theta,
            "omega_r_dimless": omega_r / w_unit,
            "u_plus_dimless": u_plus / e_unit,
            "u_minus_dimless": u_minus / e_unit,
            "u_theta_dimless": u_theta / e_unit,
        })
    cols = tuple(rows[0].keys())
    return Table(columns=cols, rows=tuple(rows)), {"energy_unit": e_unit}, 0


def _mode_potential_free_space(cfg: RunConfig) -> tuple[Table, dict, int]:
    a = np.asarray(cfg.position_a, dtype=float)
    b = np.asarray(cfg.position_b, dtype=float)
    direction = (b - a) / np.linalg.norm(b - a)
    sep0 = float(np.linalg.norm(b - a))
    dip = tuple(cfg.dipole_norm * o for o in cfg.orientation)
    gamma0 = free_decay_rate(cfg.omega10, cfg.dipole_norm)
    e_unit = HBAR * gamma0
    provider = FreeSpaceGreens()
    rows = []
    lo, hi = cfg.sweep_span
    for mult in np.linspace(lo, hi, cfg.sweep_points):
        sep = float(mult) * sep0
        atom_a = AtomSpec(position=tuple(a), omega10=cfg.omega10, dipole=dip)
        atom_b = AtomSpec(position=tuple(a + sep * direction), omega10=cfg.omega10, dipole=dip)
        breakdown = resonant_potential(atom_a, atom_b, provider)
        rows.append({
            "separation": sep,
            "u_interaction": breakdown.interaction,
            "u_total": breakdown.total,
            "u_interaction_dimless": breakdown.interaction / e_unit,
            "u_total_dimless": breakdown.total / e_unit,
        })
    cols = tuple(rows[0].keys())
    return Table(columns=cols, rows=tuple(rows)), {"energy_unit": e_unit}, 0


def _mode_force(cfg: RunConfig) -> tuple[Table, dict, int]:
    scn = _planar_scenario(cfg)
    d = scn.cavity.d
    w_unit = math.sqrt(C * scn.gamma0 / d)
    f_unit = HBAR * w_unit / d
    rows = []
    for z in _grid(cfg, d):
        trial = _trial_at(scn, cfg.sweep_target, float(z))
        f_cor = force_theta(trial, cfg.theta, "A", "corrected")
        f_ap = force_theta(trial, cfg.theta, "A", "as-printed")
        f_sel = f_cor if cfg.variant == "corrected" else f_ap
        rows.append({
            "z_A": trial.atom_a.position[2],
            "z_B": trial.atom_b.position[2],
            "f_theta_z": float(f_sel[2]),
            "f_theta_corrected_z": float(f_cor[2]),
            "f_theta_as_printed_z": float(f_ap[2]),
            "f_theta_z_dimless": float(f_sel[2]) / f_unit,
            "f_theta_corrected_z_dimless": float(f_cor[2]) / f_unit,
            "f_theta_as_printed_z_dimless": float(f_ap[2]) / f_unit,
        })
    cols = tuple(rows[0].keys())
    return Table(columns=cols, rows=tuple(rows)), {"force_unit": f_unit}, 0


def _mode_weak_limit(cfg: RunConfig) -> tuple[Table, dict, int]:
    scn = _planar_scenario(cfg)
    omega_r = scn.rabi(scn.position_a, scn.position_b)
    if omega_r == 0.0:
        raise DomainError(
            "configured positions give zero coupling (both atoms on nodes); "
            "the weak-limit comparison is empty"
        )
    gamma_nu = scn.cavity.gamma_nu
    n = omega_r**2 / (math.pi * gamma_nu)
    e_unit = HBAR * omega_r
    rows = []
    for ratio in cfg.weak_ratios:
        detuning = ratio * omega_r
        omega = math.hypot(omega_r, detuning)
        strong_plus = HBAR * (omega - detuning) / 2.0
        strong_minus = HBAR * (detuning - omega) / 2.0
        weak_plus, weak_minus = weak_limit_potentials(gamma_nu, n, detuning)
        rows.append({
            "ratio": ratio,
            "detuning": detuning,
            "u_plus_strong": strong_plus,
            "u_plus_weak": weak_plus,
            "u_minus_strong": strong_minus,
            "u_minus_weak": weak_minus,
            "rel_dev_plus": abs(strong_plus / weak_plus - 1.0),
            "rel_dev_minus": abs(strong_minus / weak_minus - 1.0),
            "u_plus_strong_dimless": strong_plus / e_unit,
            "u_plus_weak_dimless": weak_plus / e_unit,
            "u_minus_strong_dimless": strong_minus / e_unit,
            "u_minus_weak_dimless": weak_minus / e_unit,
        })
    cols = tuple(rows[0].keys())
    return Table(columns=cols, rows=tuple(rows)), {"energy_unit": e_unit}, 0


def _mode_kk_check(cfg: RunConfig) -> tuple[Table, dict, int]:
    cav = _cavity(cfg)
    gamma, om_nu = cav.gamma_nu, cav.omega_nu
    span = 5.0e4 * gamma
    # unit-peak Lorentzian; the transform is linear in the peak value
    sf = SpectralFunction(
        func=lambda w: lorentzian_profile(1.0, om_nu, gamma, w),
        support=(om_nu - span, om_nu + span),
        hint_points=(om_nu - gamma, om_nu, om_nu + gamma),
    )
    control = QuadratureControl(rel_tol=cfg.tol_quadrature)
    rows = []
    for offset in cfg.kk_offsets:
        omega = om_nu + offset * gamma
        numeric = kk_real_from_imag(sf, omega, control) / math.pi
        closed = narrow_mode_real_contraction(1.0, gamma, om_nu, omega)
        rows.append({
            "offset_widths": offset,
            "omega": omega,
            "kk_numeric_over_pi": numeric,
            "closed_form": closed,
            "rel_error": abs(numeric / closed - 1.0),
        })
    cols = tuple(rows[0].keys())
    return Table(columns=cols, rows=tuple(rows)), {"peak": 1.0}, 0


_XCHECK_TOLS = {
    "free-space-route-equivalence": 1.0e-12,
    "force-gradient-corrected": 1.0e-6,
    "force-as-printed-ratio": 1.0e-6,
    "weak-limit-ladder": 1.0e-5,
    "kk-asymptote": 1.0e-2,
}


def _mode_xcheck(cfg: RunConfig) -> tuple[Table, dict, int]:
    rng = np.random.default_rng(cfg.seed)
    if cfg.scenario == "planar":
        cav = _cavity(cfg)
    else:
        cav = PlanarCavity(d=1.0e-6, delta=1.0e-3, nu=1)
    dnorm = cfg.dipole_norm
    tols = dict(_XCHECK_TOLS)
    if cfg.tol_xcheck is not None:
        tols = {name: cfg.tol_xcheck for name in tols}
    checks: list[tuple[str, float]] = []

    # dual-route free-space interaction: closed trig form vs tensor contraction
    provider = FreeSpaceGreens()
    worst = 0.0
    for _ in range(100):
        w = 10.0 ** rng.uniform(14.5, 15.5)
        k = w / C
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        r = (rng.uniform(0.3, 3.0) / k) * direction
        d_a = rng.normal(size=3) * dnorm
        d_b = rng.normal(size=3) * dnorm
        closed = free_space_resonant_potential(d_a, d_b, k, r)
        contraction = resonant_potential(
            AtomSpec(position=(0.0, 0.0, 0.0), omega10=w, dipole=tuple(d_a)),
            AtomSpec(position=tuple(r), omega10=w, dipole=tuple(d_b)),
            provider,
        ).interaction
        scale = max(abs(closed), abs(contraction))
        worst = max(worst, abs(closed - contraction) / scale)
    checks.append(("free-space-route-equivalence", worst))

    # superposition force against a finite-difference potential gradient,
    # and the as-printed variant's 1/sin(2 theta_c) excess
    worst_grad = 0.0
    worst_ratio = 0.0
    h = 1.0e-5 * cav.d
    for _ in range(100):
        z_a, z_b = rng.uniform(0.05, 0.95, size=2) * cav.d
        ratio_delta = rng.uniform(-3.0, 3.0)
        theta = rng.uniform(0.1, 1.45) + (math.pi / 2.0 if rng.random() < 0.5 else 0.0)
        probe = PlanarScenario.resonant(cav, z_a, z_b, dnorm)
        omega_r0 = probe.rabi(probe.position_a, probe.position_b)
        if omega_r0 == 0.0:
            continue
        detuning = ratio_delta * omega_r0
        dip = (dnorm, 0.0, 0.0)
        w10 = cav.omega_nu - detuning
        scn = PlanarScenario(
            cavity=cav,
            atom_a=AtomSpec(position=(0.0, 0.0, z_a), omega10=w10, dipole=dip),
            atom_b=AtomSpec(position=(0.0, 0.0, z_b), omega10=w10, dipole=dip),
        )

        def u_at(p):
            sysd = DressedSystem.from_coupling(scn.rabi(p, scn.position_b), scn.detuning)
            return potential_theta(theta, sysd)

        base = np.asarray(scn.position_a, dtype=float)
        fd = np.zeros(3)
        for i in range(3):
            e = np.zeros(3)
            e[i] = 1.0
            d1 = (u_at(base + h * e) - u_at(base - h * e)) / (2.0 * h)
            d2 = (u_at(base + 0.5 * h * e) - u_at(base - 0.5 * h * e)) / h
            fd[i] = (4.0 * d2 - d1) / 3.0
        f_cor = force_theta(scn, theta, "A", "corrected")
        worst_grad = max(worst_grad, float(np.linalg.norm(f_cor + fd) / np.linalg.norm(fd)))

        f_ap = force_theta(scn, theta, "A", "as-printed")
        sin2tc = math.sin(2.0 * coupling_angle(scn.rabi(scn.position_a, scn.position_b),
                                               scn.detuning))
        norm_cor = float(np.linalg.norm(f_cor))
        if norm_cor > 0.0:
            worst_ratio = max(
                worst_ratio,
                abs(float(np.linalg.norm(f_ap)) * abs(sin2tc) / norm_cor - 1.0),
            )
    checks.append(("force-gradient-corrected", worst_grad))
    checks.append(("force-as-printed-ratio", worst_ratio))

    # dressed ladder against the far-detuned closed form at ratio 1e3
    z_anti = cav.d / (2.0 * cav.nu)
    scnw = PlanarScenario.resonant(cav, z_anti, z_anti, dnorm)
    omega_r = scnw.rabi(scnw.position_a, scnw.position_b)
    detuning = 1.0e3 * omega_r
    omega = math.hypot(omega_r, detuning)
    n = omega_r**2 / (math.pi * cav.gamma_nu)
    weak_plus, weak_minus = weak_limit_potentials(cav.gamma_nu, n, detuning)
    strong_plus = HBAR * (omega - detuning) / 2.0
    strong_minus = HBAR * (detuning - omega) / 2.0
    checks.append(("weak-limit-ladder",
                   max(abs(strong_plus / weak_plus - 1.0),
                       abs(strong_minus / weak_minus - 1.0))))

    # principal-value transform against the far-detuned 1/(omega_nu - omega)
    gamma, om_nu = cav.gamma_nu, cav.omega_nu
    span = 5.0e4 * gamma
    sf = SpectralFunction(
        func=lambda w: lorentzian_profile(1.0, om_nu, gamma, w),
        support=(om_nu - span, om_nu + span),
        hint_points=(om_nu - gamma, om_nu, om_nu + gamma),
    )
    control = QuadratureControl(rel_tol=cfg.tol_quadrature)
    worst_kk = 0.0
    for offset in (-1.0e3, 1.0e3):
        w_eval = om_nu + offset * gamma
        numeric = kk_real_from_imag(sf, w_eval, control) / math.pi
        closed = narrow_mode_real_contraction(1.0, gamma, om_nu, w_eval)
        worst_kk = max(worst_kk, abs(numeric / closed - 1.0))
    checks.append(("kk-asymptote", worst_kk))

    rows = []
    failures = 0
    for name, measured in checks:
        ok = measured <= tols[name]
        failures += 0 if ok else 1
        rows.append({
            "check": name,
            "measured": measured,
            "tolerance": tols[name],
            "status": "pass" if ok else "fail",
        })
    table = Table(columns=("check", "measured", "tolerance", "status"), rows=tuple(rows))
    return table, {"samples": 100}, failures


_MODE_RUNNERS = {
    "scan-rabi": _mode_scan_rabi,
    "dressed": _mode_dressed,
    "potential": _mode_potential,
    "force": _mode_force,
    "weak-limit": _mode_weak_limit,
    "kk-check": _mode_kk_check,
    "xcheck": _mode_xcheck,
}


# ------------------------------------------------------------------ runner

def run(cfg: RunConfig) -> RunResult:
    """Evaluate the configured mode; returns the table, manifest and the
    number of xcheck tolerance failures (zero for every other mode)."""
    table, norm, failures = _MODE_RUNNERS[cfg.mode](cfg)
    manifest = {
        "config_sha256": cfg.source_sha256,
        "scenario": cfg.scenario,
        "mode": cfg.mode,
        "variant": cfg.variant,
        "seed": cfg.seed,
        "constants": {"c": C, "hbar": HBAR, "eps0": EPS0, "mu0": MU0},
        "tolerances": {
            "quadrature_rel": cfg.tol_quadrature,
            "xcheck": cfg.tol_xcheck if cfg.tol_xcheck is not None else dict(_XCHECK_TOLS),
        },
        "normalization": norm,
        "provenance": dict(sorted(cfg.provenance.items())),
        "columns": list(table.columns),
        "rows": len(table),
        "xcheck_failures": failures,
    }
    return RunResult(table=table, manifest=manifest, failures=failures)


# ------------------------------------------------------------------ export

def _cell(value) -> str:
    if isinstance(value, bool):
        raise DomainError("boolean cells are not part of the table contract")
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        if "," in value or '"' in value or "\n" in value:
            raise DomainError(f"cell value needs quoting, unsupported: {value!r}")
        return value
    raise DomainError(f"unsupported cell type {type(value).__name__}")


def export(table: Table, path: str | Path, fmt: str) -> None:
    """Write the table; CSV carries 17 significant digits so values
    round-trip bit exactly, JSON lines uses shortest-round-trip floats."""
    if len(table) == 0:
        raise DomainError("refusing to export an empty table")
    if fmt not in ("csv", "jsonl"):
        raise DomainError(f"unknown format {fmt!r}; use 'csv' or 'jsonl'")
    lines = []
    if fmt == "csv":
        lines.append(",".join(table.columns))
        for row in table.rows:
            lines.append(",".join(_cell(row[c]) for c in table.columns))
    else:
        for row in table.rows:
            lines.append(json.dumps({c: row[c] for c in table.columns}))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def write_manifest(manifest: dict, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
        newline="\n",
    )


# --------------------------------------------------------------------- CLI

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cavityvdw",
        description="Two-atom cavity coupling tables: Rabi scans, dressed "
                    "levels, potentials, forces and consistency checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _MODE_RUNNERS:
        p = sub.add_parser(name, help=f"run the {name} mode")
        p.add_argument("--config", required=True, help="YAML run configuration")
        p.add_argument("--out", default=None, help="output table path")
        p.add_argument("--format", default=None, choices=("csv", "jsonl"))
        p.add_argument("--variant", default=None, choices=("corrected", "as-printed"))
        p.add_argument("--tolerance", default=None, type=float,
                       help="uniform xcheck tolerance override")
    return parser


def _apply_overrides(cfg: RunConfig, args: argparse.Namespace) -> RunConfig:
    updates: dict = {}
    provenance = dict(cfg.provenance)
    if cfg.provenance.get("mode") == "user" and cfg.mode != args.command:
        raise ConfigError(
            f"mode: config sets '{cfg.mode}' but the subcommand is '{args.command}'"
        )
    updates["mode"] = args.command
    provenance["mode"] = provenance.get("mode", "default")
    if args.command in PLANAR_ONLY_MODES and cfg.scenario != "planar":
        raise ConfigError(f"mode: '{args.command}' requires scenario 'planar'")
    if args.out is not None:
        updates["out_path"] = args.out
        provenance["output.path"] = "user"
    if args.format is not None:
        updates["out_format"] = args.format
        provenance["output.format"] = "user"
    if args.variant is not None:
        updates["variant"] = args.variant
        provenance["variant"] = "user"
    if args.tolerance is not None:
        if args.tolerance <= 0.0:
            raise ConfigError("tolerance: must be > 0")
        updates["tol_xcheck"] = args.tolerance
        provenance["tolerances.xcheck"] = "user"
    updates["provenance"] = provenance
    return dataclasses.replace(cfg, **updates)


def _default_out(cfg: RunConfig) -> str:
    ext = "csv" if cfg.out_format == "csv" else "jsonl"
    return f"cavityvdw-{cfg.mode}.{ext}"


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _apply_overrides(load_config(args.config), args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        result = run(cfg)
    except (ConfigError, DomainError, QuadratureError, FitError) as exc:
        print(f"error [{cfg.mode}]: {exc}", file=sys.stderr)
        return 1

    out_path = cfg.out_path or _default_out(cfg)
    manifest_path = f"{out_path}.manifest.json"
    try:
        export(result.table, out_path, cfg.out_format)
        write_manifest(result.manifest, manifest_path)
    except (DomainError, OSError) as exc:
        print(f"error [{cfg.mode}]: {exc}", file=sys.stderr)
        return 1

    if cfg.mode == "xcheck":
        for row in result.table.rows:
            print(f"[{row['status'].upper():4s}] {row['check']}: "
                  f"measured {row['measured']:.3e} vs tolerance {row['tolerance']:.3e}")
    print(f"wrote {out_path} ({len(result.table)} rows)")
    print(f"wrote {manifest_path}")
    return 2 if result.failures else 0


if __name__ == "__main__":
    sys.exit(main())
