"""Two atoms on the axis of a planar cavity: derived cavity rates, the
position-dependent squared Rabi contributions, and sweep tables.

At exact resonance (omega10 = omega_nu) the squared Rabi frequency has the
mode-product closed form

    Omega_total^2 = (3 c Gamma0 / 2 d) (sin(nu pi z_A/d) + sin(nu pi z_B/d))^2,

splitting into single-atom parts (3 c Gamma0 / 2 d) sin^2 and the cross part
(3 c Gamma0 / d) sin sin. Dipoles are transverse to the cavity axis (x by
convention); atoms are clamped to strictly interior positions since the
mirror planes are idealized boundaries.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .constants import C, HBAR, MU0
from .errors import DomainError
from .greens import PlanarCavity
from .modecoupling import AtomSpec
from .tabular import Table

_EDGE = 1e-6  # interior clamp, fraction of d


def free_decay_rate(omega10: float, dipole_norm: float) -> float:
    """Free-space spontaneous decay rate omega^3 |d|^2 / (3 pi eps0 hbar c^3)
    [rad/s]."""
    if not (omega10 > 0.0 and dipole_norm > 0.0):
        raise DomainError(
            f"decay rate needs positive inputs, got omega10={omega10}, |d|={dipole_norm}"
        )
    eps0 = 1.0 / (MU0 * C**2)
    return omega10**3 * dipole_norm**2 / (3.0 * math.pi * eps0 * HBAR * C**3)


def cavity_mode_width(cav: PlanarCavity) -> float:
    """gamma_nu = 2 c delta / d [rad/s]."""
    return cav.gamma_nu


def resonance_frequency(cav: PlanarCavity) -> float:
    """omega_nu = nu pi c / d [rad/s]."""
    return cav.omega_nu


def _clamp_interior(z: float, d: float, label: str) -> float:
    lo, hi = _EDGE * d, (1.0 - _EDGE) * d
    if z < lo or z > hi:
        if z < 0.0 or z > d:
            raise DomainError(f"{label} = {z} lies outside the cavity [0, {d}]")
        clamped = min(max(z, lo), hi)
        warnings.warn(
            f"{label} = {z:.6g} clamped to the interior value {clamped:.6g} "
            f"(mirror planes are idealized boundaries)",
            stacklevel=3,
        )
        return clamped
    return z


@dataclass(frozen=True)
class PlanarScenario:
    """Concrete coupling scenario for the planar cavity; also satisfies the
    protocol the dressed-state force operations differentiate through."""

    cavity: PlanarCavity
    atom_a: AtomSpec
    atom_b: AtomSpec

    def __post_init__(self):
        cav = self.cavity
        if self.atom_a.omega10 != self.atom_b.omega10:
            raise DomainError(
                f"identical atoms required: omega10 {self.atom_a.omega10} != "
                f"{self.atom_b.omega10}"
            )
        atoms = {}
        for label, atom in (("atom_a", self.atom_a), ("atom_b", self.atom_b)):
            pos = np.asarray(atom.position, dtype=float)
            if pos[0] != 0.0 or pos[1] != 0.0:
                raise DomainError(f"{label} must sit on the cavity axis (x = y = 0)")
            dip = np.asarray(atom.dipole, dtype=float)
            if dip[1] != 0.0 or dip[2] != 0.0:
                raise DomainError(
                    f"{label} dipole must point along x (transverse convention), got {atom.dipole}"
                )
            z = _clamp_interior(float(pos[2]), cav.d, f"{label} z")
            if z != pos[2]:
                atom = AtomSpec(position=(0.0, 0.0, z), omega10=atom.omega10, dipole=atom.dipole)
            atoms[label] = atom
        object.__setattr__(self, "atom_a", atoms["atom_a"])
        object.__setattr__(self, "atom_b", atoms["atom_b"])

    @classmethod
    def resonant(
        cls, cavity: PlanarCavity, z_a: float, z_b: float, dipole_norm: float = 1.0e-29
    ) -> "PlanarScenario":
        """Scenario with omega10 locked to the cavity resonance."""
        w = cavity.omega_nu
        dip = (dipole_norm, 0.0, 0.0)
        return cls(
            cavity=cavity,
            atom_a=AtomSpec(position=(0.0, 0.0, z_a), omega10=w, dipole=dip),
            atom_b=AtomSpec(position=(0.0, 0.0, z_b), omega10=w, dipole=dip),
        )

    # protocol surface used by the dressed module
    @property
    def detuning(self) -> float:
        return self.cavity.omega_nu - self.atom_a.omega10

    @property
    def position_a(self) -> tuple[float, float, float]:
        return self.atom_a.position

    @property
    def position_b(self) -> tuple[float, float, float]:
        return self.atom_b.position

    @property
    def length_scale(self) -> float:
        return self.cavity.d

    @property
    def on_resonance(self) -> bool:
        return abs(self.detuning) <= 1e-9 * self.cavity.omega_nu

    @property
    def gamma0(self) -> float:
        return free_decay_rate(self.atom_a.omega10, self.atom_a.dipole_norm)

    def mode_value(self, z: float) -> float:
        return math.sin(self.cavity.nu * math.pi * z / self.cavity.d)

    def rabi(self, r_a, r_b) -> float:
        """Omega_R at trial positions [rad/s]; pure, no clamping, so it can
        be finite-differenced."""
        s = self.mode_value(float(r_a[2])) + self.mode_value(float(r_b[2]))
        return math.sqrt(3.0 * C * self.gamma0 / (2.0 * self.cavity.d)) * abs(s)


@dataclass(frozen=True)
class RabiBreakdown:
    """Squared Rabi contributions [(rad/s)^2]; total is their exact sum and
    is a perfect square, hence nonnegative."""

    omega2_a: float
    omega2_b: float
    omega2_ab: float
    omega2_total: float

    def __post_init__(self):
        expected = self.omega2_a + self.omega2_b + self.omega2_ab
        if not math.isclose(self.omega2_total, expected, rel_tol=1e-12, abs_tol=1e-30):
            raise DomainError("omega2_total must equal omega2_a + omega2_b + omega2_ab")
        if self.omega2_total < 0.0:
            raise DomainError(f"omega2_total must be >= 0, got {self.omega2_total}")


def rabi_contributions(scn: PlanarScenario) -> RabiBreakdown:
    """Mode-product squared Rabi contributions at exact resonance."""
    if not scn.on_resonance:
        raise DomainError(
            f"scenario is detuned by {scn.detuning:.6g} rad/s; the resonant "
            "closed form needs omega10 = omega_nu. Use the dressed module "
            "with Delta != 0 instead."
        )
    base = 3.0 * C * scn.gamma0 / (2.0 * scn.cavity.d)
    s_a = scn.mode_value(scn.atom_a.position[2])
    s_b = scn.mode_value(scn.atom_b.position[2])
    o_a = base * s_a**2
    o_b = base * s_b**2
    o_ab = 2.0 * base * s_a * s_b
    return RabiBreakdown(o_a, o_b, o_ab, o_a + o_b + o_ab)


_SCAN_COLUMNS = (
    "z_A",
    "z_B",
    "omega2_A",
    "omega2_B",
    "omega2_AB",
    "omega2_total",
    "omega2_A_dimless",
    "omega2_B_dimless",
    "omega2_AB_dimless",
    "omega2_total_dimless",
)


def scan_rabi(scn: PlanarScenario, sweep: str, grid) -> Table:
    """Sweep table of the squared Rabi contributions.

    sweep selects what the grid drives: "joint" moves both atoms together
    (z_A = z_B = z), "A" moves atom A with z_B held, "B" moves atom B with
    z_A held. Values are reported in SI and in units of c Gamma0 / d.
    """
    if sweep not in ("joint", "A", "B"):
        raise DomainError(f"sweep must be 'joint', 'A' or 'B', got {sweep!r}")
    zs = np.asarray(grid, dtype=float)
    if zs.ndim != 1 or zs.size == 0:
        raise DomainError("sweep grid must be a nonempty 1-d sequence of positions")
    d = scn.cavity.d
    if float(zs.min()) < 0.0 or float(zs.max()) > d:
        raise DomainError(f"grid positions must lie within [0, {d}]")
    zs = np.clip(zs, _EDGE * d, (1.0 - _EDGE) * d)
    norm = d / (C * scn.gamma0)
    rows = []
    for z in zs:
        z_a = z if sweep in ("joint", "A") else scn.atom_a.position[2]
        z_b = z if sweep in ("joint", "B") else scn.atom_b.position[2]
        trial = PlanarScenario(
            cavity=scn.cavity,
            atom_a=AtomSpec(position=(0.0, 0.0, z_a), omega10=scn.atom_a.omega10,
                            dipole=scn.atom_a.dipole),
            atom_b=AtomSpec(position=(0.0, 0.0, z_b), omega10=scn.atom_b.omega10,
                            dipole=scn.atom_b.dipole),
        )
        rb = rabi_contributions(trial)
        rows.append({
            "z_A": float(z_a),
            "z_B": float(z_b),
            "omega2_A": rb.omega2_a,
            "omega2_B": rb.omega2_b,
            "omega2_AB": rb.omega2_ab,
            "omega2_total": rb.omega2_total,
            "omega2_A_dimless": rb.omega2_a * norm,
            "omega2_B_dimless": rb.omega2_b * norm,
            "omega2_AB_dimless": rb.omega2_ab * norm,
            "omega2_total_dimless": rb.omega2_total * norm,
        })
    return Table(columns=_SCAN_COLUMNS, rows=tuple(rows))
