"""Perturbative (weak-coupling) resonant potentials: the Green's-tensor
contraction route, its free-space closed form, and the narrow-mode limits
that the dressed-state ladder must reproduce far from resonance.

Conventions: the excited-state resonant potential splits into two
single-atom terms weighted -1/2 and an interaction term weighted -1, each a
contraction -mu0 omega10^2 d . Re G . d. In free space the coincident Re G
diverges (it renormalizes into the bare transition frequency), so providers
advertise through ComplexDyad.real_status whether a finite real part exists;
absent that, the single-atom terms are omitted and flagged rather than
faked. Principal-value transforms follow the Hilbert normalization
(1/pi) P Int f(w)/(w - omega) dw, so the far-detuned image of a unit-peak
Lorentzian is gamma/(2 (omega_nu - omega)); the kk_real_from_imag quadrature
returns the bare integral, larger by pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .constants import C, HBAR, MU0
from .errors import DomainError
from .greens import ComplexDyad, QuadratureControl, SpectralFunction, kk_real_from_imag
from .modecoupling import AtomSpec, ModeModel, lorentzian_profile

_REAL_OK = ("full", "scattering-only")


@dataclass(frozen=True)
class ResonantPotentialBreakdown:
    """Terms of the resonant potential [J]. single_a/single_b are None when
    the provider cannot supply a finite coincident Re G (free space); total
    always sums exactly the terms that are present."""

    single_a: float | None
    single_b: float | None
    interaction: float
    total: float

    @property
    def singles_omitted(self) -> bool:
        return self.single_a is None or self.single_b is None


def _re_contraction(dyad: ComplexDyad, d1, d2) -> float | None:
    if dyad.real_status not in _REAL_OK:
        return None
    return float(np.asarray(d1, dtype=float) @ dyad.real_part @ np.asarray(d2, dtype=float))


def resonant_potential(a: AtomSpec, b: AtomSpec, greens) -> ResonantPotentialBreakdown:
    """Resonant excited-state potential of two shared-excitation atoms in
    the environment described by the Green's provider."""
    if a.omega10 != b.omega10:
        raise DomainError(
            f"resonant potential requires identical atoms; "
            f"omega10 differs: {a.omega10} vs {b.omega10}"
        )
    w = a.omega10
    pref = MU0 * w**2
    cross = _re_contraction(greens.tensor(a.position, b.position, w), a.dipole, b.dipole)
    if cross is None:
        raise DomainError("provider has no real part at distinct points; cannot proceed")
    interaction = -pref * cross
    sa = _re_contraction(greens.tensor(a.position, a.position, w), a.dipole, a.dipole)
    sb = _re_contraction(greens.tensor(b.position, b.position, w), b.dipole, b.dipole)
    single_a = None if sa is None else -0.5 * pref * sa
    single_b = None if sb is None else -0.5 * pref * sb
    total = interaction
    if single_a is not None:
        total += single_a
    if single_b is not None:
        total += single_b
    return ResonantPotentialBreakdown(single_a, single_b, interaction, total)


def free_space_resonant_potential(d_a, d_b, k: float, r) -> float:
    """Closed-form free-space interaction term [J]:

        -(1/4 pi eps0) d_Aa d_Bb [ (delta_ab - e_a e_b) k^2 cos(kr)/r
            - (delta_ab - 3 e_a e_b) (k sin(kr)/r^2 + cos(kr)/r^3) ].

    The 1/(4 pi eps0) makes the bracket's Gaussian-structure SI-correct; it
    is exactly -mu0 omega^2 d_A . Re G_free . d_B.
    """
    if not k > 0.0:
        raise DomainError(f"wavenumber must be positive, got {k}")
    rv = np.asarray(r, dtype=float)
    rmag = float(np.linalg.norm(rv))
    if rmag == 0.0:
        raise DomainError("free-space resonant potential diverges at zero separation")
    e = rv / rmag
    da = np.asarray(d_a, dtype=float)
    db = np.asarray(d_b, dtype=float)
    x = k * rmag
    eye = np.eye(3)
    ee = np.outer(e, e)
    trans = (eye - ee) * (k**2 * math.cos(x) / rmag)
    near = (eye - 3.0 * ee) * (k * math.sin(x) / rmag**2 + math.cos(x) / rmag**3)
    eps0 = 1.0 / (MU0 * C**2)
    return float(-(1.0 / (4.0 * math.pi * eps0)) * (da @ (trans - near) @ db))


def weak_limit_potentials(gamma_nu: float, mode_norm: float, detuning: float) -> tuple[float, float]:
    """(U+, U-) = (+, -) hbar gamma_nu pi N / (4 Delta) [J]."""
    if not gamma_nu > 0.0:
        raise DomainError(f"mode width must be positive, got {gamma_nu}")
    if mode_norm < 0.0:
        raise DomainError(f"collective norm must be >= 0, got {mode_norm}")
    if detuning == 0.0:
        raise DomainError("weak-coupling limit is undefined on resonance (Delta = 0)")
    u = HBAR * gamma_nu * math.pi * mode_norm / (4.0 * detuning)
    return (u, -u)


def weak_theta_potential(theta, omega_r: float, detuning: float) -> float:
    """-(hbar / 4 Delta) cos(2 theta) Omega_R^2 [J]."""
    if detuning == 0.0:
        raise DomainError("weak-coupling limit is undefined on resonance (Delta = 0)")
    th = theta.theta if hasattr(theta, "theta") else float(theta)
    return -(HBAR / (4.0 * detuning)) * math.cos(2.0 * th) * omega_r**2


def weak_theta_force(theta, omega_r: float, grad_omega_r, detuning: float) -> np.ndarray:
    """+(hbar / 2 Delta) cos(2 theta) Omega_R grad Omega_R [N]."""
    if detuning == 0.0:
        raise DomainError("weak-coupling limit is undefined on resonance (Delta = 0)")
    th = theta.theta if hasattr(theta, "theta") else float(theta)
    g = np.asarray(grad_omega_r, dtype=float)
    return (HBAR / (2.0 * detuning)) * math.cos(2.0 * th) * omega_r * g


def narrow_mode_real_contraction(
    g2_peak: float, gamma_nu: float, omega_nu: float, omega: float
) -> float:
    """Far-detuned Hilbert image of a Lorentzian squared coupling [rad/s]:
    gamma_nu g2_peak / (2 (omega_nu - omega)). Callers must stay at least
    100 mode widths away from the line center."""
    if not gamma_nu > 0.0:
        raise DomainError(f"mode width must be positive, got {gamma_nu}")
    ratio = abs(omega - omega_nu) / gamma_nu
    if ratio < 100.0:
        raise DomainError(
            f"asymptotic contraction needs |omega - omega_nu| >= 100 gamma_nu; "
            f"got {ratio:.3g} widths"
        )
    return gamma_nu * g2_peak / (2.0 * (omega_nu - omega))


class NarrowModeGreens:
    """Green's provider for a single narrow mode described by a ModeModel.

    The imaginary part of each contraction is the Lorentzian profile of the
    stored peak couplings; the real part is its Hilbert image, either in
    closed form (exact transform of the Lorentzian, valid at any detuning)
    or through the principal-value quadrature (real_route="kk-numeric").
    Tensors are returned identity-proportional, so only parallel-dipole
    contractions are meaningful; positions must match one of the two atoms.
    """

    def __init__(
        self,
        mode: ModeModel,
        atom_a: AtomSpec,
        atom_b: AtomSpec,
        real_route: Literal["closed-form", "kk-numeric"] = "closed-form",
        control: QuadratureControl | None = None,
    ):
        if real_route not in ("closed-form", "kk-numeric"):
            raise DomainError(f"unknown real_route {real_route!r}")
        self.mode = mode
        self.atom_a = atom_a
        self.atom_b = atom_b
        self.real_route = real_route
        self.control = control or QuadratureControl()

    def _identify(self, pos) -> str:
        p = np.asarray(pos, dtype=float)
        for label, atom in (("A", self.atom_a), ("B", self.atom_b)):
            if np.max(np.abs(p - np.asarray(atom.position))) <= 1e-12 * (
                1.0 + float(np.max(np.abs(atom.position)))
            ):
                return label
        raise DomainError(f"position {pos} matches neither stored atom")

    def _pair(self, r1, r2) -> tuple[float, float]:
        key = frozenset((self._identify(r1), self._identify(r2)))
        if key == {"A"}:
            return self.mode.g2_aa, self.atom_a.dipole_norm**2
        if key == {"B"}:
            return self.mode.g2_bb, self.atom_b.dipole_norm**2
        return self.mode.g2_ab, self.atom_a.dipole_norm * self.atom_b.dipole_norm

    def _re_g2(self, g2_peak: float, omega: float) -> float:
        m = self.mode
        if self.real_route == "closed-form":
            dw = m.omega_nu - omega
            return g2_peak * (m.gamma_nu / 2.0) * dw / (dw**2 + m.gamma_nu**2 / 4.0)
        span = 5.0e4 * m.gamma_nu
        sf = SpectralFunction(
            func=lambda w: lorentzian_profile(g2_peak, m.omega_nu, m.gamma_nu, w),
            support=(m.omega_nu - span, m.omega_nu + span),
            hint_points=(m.omega_nu - m.gamma_nu, m.omega_nu, m.omega_nu + m.gamma_nu),
        )
        return kk_real_from_imag(sf, omega, self.control) / math.pi

    def tensor(self, r1, r2, omega: float) -> ComplexDyad:
        if not omega > 0.0:
            raise DomainError(f"angular frequency must be positive, got {omega}")
        g2_peak, dnorm2 = self._pair(r1, r2)
        m = self.mode
        scale = HBAR * math.pi / (MU0 * omega**2 * dnorm2)
        im_entry = scale * lorentzian_profile(g2_peak, m.omega_nu, m.gamma_nu, omega)
        re_entry = scale * self._re_g2(g2_peak, omega)
        coincident = bool(np.all(np.asarray(r1, float) == np.asarray(r2, float)))
        status = "scattering-only" if coincident else "full"
        return ComplexDyad(
            matrix=(re_entry + 1j * im_entry) * np.eye(3, dtype=complex),
            real_status=status,
        )
