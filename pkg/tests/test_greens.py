import math
import cmath

import numpy as np
import pytest

from cavityvdw.constants import C
from cavityvdw.errors import DomainError, QuadratureError
from cavityvdw.greens import (
    ComplexDyad,
    PlanarCavity,
    QuadratureControl,
    SpectralFunction,
    FreeSpaceGreens,
    PlanarCavityGreens,
    free_space_green,
    free_space_im_green_coincident,
    kk_real_from_imag,
    planar_cavity_green,
    planar_resonant_im_gxx,
    planar_scattering_components,
)

from oracles import (
    image_series_xx,
    image_series_zz,
    lorentzian_principal_value,
    small_kr_diagonal_imag,
    transverse_scalar,
)

RNG = np.random.default_rng(20260814)

ONE_OVER_SIX_PI = 0.05305164769729845


# ----------------------------------------------------------------- free space

def test_free_space_symmetric_and_even():
    k = 2.7e6
    r = np.array([0.3e-6, -0.9e-6, 0.4e-6])
    g = free_space_green(k, r)
    m = g.matrix
    assert np.allclose(m, m.T, rtol=0, atol=1e-30)
    g2 = free_space_green(k, -r)
    assert np.allclose(m, g2.matrix, rtol=0, atol=1e-30)


def test_free_space_far_field_transverse():
    # at kr >> 1 the tensor approaches e^{ikr}/(4 pi r) (delta - e e),
    # with the residual falling off like 1/(kr)
    k = 1.0e7
    for kr in (1.0e4, 1.0e6):
        rmag = kr / k
        e = np.array([1.0, 2.0, -2.0]) / 3.0
        r = rmag * e
        g = free_space_green(k, r).matrix
        lead = cmath.exp(1j * kr) / (4.0 * math.pi * rmag) * (np.eye(3) - np.outer(e, e))
        scale = abs(cmath.exp(1j * kr) / (4.0 * math.pi * rmag))
        dev = np.max(np.abs(g - lead)) / scale
        assert dev < 4.0 / kr


def test_free_space_small_kr_series_per_axis():
    # kr = 1e-2: truncation of the cubic series is ~1e-8 relative while
    # round-off cancellation in the full tensor stays near 1e-10
    k = 1.0e6 / 3.0
    r_vec = np.array([1.0e-8, -2.0e-8, 2.0e-8])
    g = free_space_green(k, r_vec).matrix
    expect = small_kr_diagonal_imag(k, r_vec)
    for a in range(3):
        assert g[a, a].imag == pytest.approx(expect[a], rel=1e-6)


def test_coincident_imag_limit():
    # frozen value 1/(6 pi) at k = 1
    d = free_space_im_green_coincident(1.0)
    assert isinstance(d, ComplexDyad)
    assert d.real_status == "excluded"
    m = d.imag_part
    assert np.allclose(m, ONE_OVER_SIX_PI * np.eye(3), rtol=1e-15, atol=0)
    with pytest.raises(DomainError):
        d.real_part
    # small-separation limit of the full tensor approaches it; kr = 1e-3
    # balances the O((kr)^2) truncation against 1/(kr)^2 round-off
    k = 3.3e6
    g = free_space_green(k, np.array([3.0e-10, 0.0, 0.0]))
    assert np.allclose(g.imag_part, (k / (6.0 * math.pi)) * np.eye(3), rtol=1e-5, atol=0)


def test_free_space_rejects_zero_separation():
    with pytest.raises(DomainError):
        free_space_green(1.0e6, np.zeros(3))
    with pytest.raises(DomainError):
        free_space_green(-1.0, np.array([1.0, 0.0, 0.0]))


# ----------------------------------------------------- planar quadrature core

def _random_geometries(n):
    out = []
    for _ in range(n):
        d = float(RNG.uniform(0.4e-6, 3.0e-6))
        z = float(RNG.uniform(0.08, 0.92)) * d
        zp = float(RNG.uniform(0.08, 0.92)) * d
        kd = float(RNG.uniform(1.2, 9.5))
        omega = kd * C / d
        delta = float(10.0 ** RNG.uniform(-3.0, -1.1))
        out.append((d, delta, z, zp, omega))
    return out


def test_planar_scattering_matches_image_series():
    ctrl = QuadratureControl(rel_tol=1e-10)
    for d, delta, z, zp, omega in _random_geometries(8):
        r = 1.0 - delta
        trans, longi, _ = planar_scattering_components(d, -r, r, z, zp, omega, ctrl)
        oracle_t = image_series_xx(d, delta, z, zp, omega)
        oracle_l = image_series_zz(d, delta, z, zp, omega)
        st = max(abs(oracle_t), omega / C / (6.0 * math.pi))
        sl = max(abs(oracle_l), omega / C / (6.0 * math.pi))
        assert abs(trans - oracle_t) / st < 5e-9
        assert abs(longi - oracle_l) / sl < 5e-9


def test_planar_scattering_transparent_walls_vanish():
    trans, longi, err = planar_scattering_components(
        1.0e-6, 0.0, 0.0, 0.4e-6, 0.7e-6, 2.0e15, QuadratureControl()
    )
    assert trans == 0.0 and longi == 0.0 and err == 0.0


def test_planar_scattering_reciprocity():
    ctrl = QuadratureControl(rel_tol=1e-10)
    d, delta, omega = 1.1e-6, 7.0e-3, 2.5e15
    r = 1.0 - delta
    a = planar_scattering_components(d, -r, r, 0.31 * d, 0.77 * d, omega, ctrl)
    b = planar_scattering_components(d, -r, r, 0.77 * d, 0.31 * d, omega, ctrl)
    assert a[0] == pytest.approx(b[0], rel=1e-11, abs=1e-30)
    assert a[1] == pytest.approx(b[1], rel=1e-11, abs=1e-30)


def test_planar_cavity_green_distinct_points_total():
    # the returned dyad is scattering plus the free-space direct part
    cav = PlanarCavity(d=1.3e-6, delta=4.0e-3, nu=1)
    omega = 1.9e15
    z, zp = 0.35 * cav.d, 0.6 * cav.d
    g = planar_cavity_green(cav, z, zp, omega)
    assert g.real_status == "full"
    k = omega / C
    direct = free_space_green(k, np.array([0.0, 0.0, z - zp])).matrix
    scat_xx = image_series_xx(cav.d, cav.delta, z, zp, omega)
    scat_zz = image_series_zz(cav.d, cav.delta, z, zp, omega)
    assert g.matrix[0, 0] == pytest.approx(direct[0, 0] + scat_xx, rel=2e-8)
    assert g.matrix[1, 1] == pytest.approx(direct[1, 1] + scat_xx, rel=2e-8)
    assert g.matrix[2, 2] == pytest.approx(direct[2, 2] + scat_zz, rel=2e-8)
    assert abs(g.matrix[0, 1]) == 0.0 and abs(g.matrix[0, 2]) == 0.0


def test_planar_cavity_green_coincident_keeps_imag_only_bulk():
    cav = PlanarCavity(d=1.0e-6, delta=5.0e-3, nu=1)
    omega = 2.2e15
    z = 0.41 * cav.d
    g = planar_cavity_green(cav, z, z, omega)
    assert g.real_status == "scattering-only"
    k = omega / C
    scat_xx = image_series_xx(cav.d, cav.delta, z, z, omega)
    assert g.matrix[0, 0].imag == pytest.approx(k / (6.0 * math.pi) + scat_xx.imag, rel=2e-8)
    # real part is the scattering contribution alone
    assert g.matrix[0, 0].real == pytest.approx(scat_xx.real, rel=2e-8)


def test_planar_quadrature_weak_reflection_one_bounce():
    # at very small reflection the single-image term dominates the series
    d, delta, omega = 1.0e-6, 0.0499, 2.4e15
    z = zp = 0.5 * d
    r = 1.0 - delta
    trans, _, _ = planar_scattering_components(d, -r, r, z, zp, omega, QuadratureControl(rel_tol=1e-10))
    k = omega / C
    one_bounce = r * (-(transverse_scalar(k, z + zp) + transverse_scalar(k, 2 * d - z - zp)))
    two_bounce = r**2 * 2.0 * transverse_scalar(k, 2 * d)
    assert abs(trans - one_bounce) < 3.0 * abs(two_bounce)


# --------------------------------------------------------------- providers

def test_free_space_provider_tensor_and_coincident():
    prov = FreeSpaceGreens()
    omega = 2.0e15
    r1 = np.array([0.1e-6, 0.2e-6, 0.3e-6])
    r2 = np.array([-0.4e-6, 0.0, 0.9e-6])
    g = prov.tensor(r1, r2, omega)
    ref = free_space_green(omega / C, r1 - r2)
    assert np.allclose(g.matrix, ref.matrix, rtol=0, atol=0)
    gc = prov.tensor(r1, r1, omega)
    assert gc.real_status == "excluded"
    assert gc.matrix[0, 0].imag == pytest.approx(omega / C / (6.0 * math.pi), rel=1e-15)


def test_planar_provider_requires_on_axis_points():
    cav = PlanarCavity(d=1.0e-6, delta=1.0e-2, nu=1)
    prov = PlanarCavityGreens(cav)
    with pytest.raises(DomainError):
        prov.tensor(np.array([1e-8, 0.0, 0.3e-6]), np.array([0.0, 0.0, 0.5e-6]), 2e15)
    g = prov.tensor(np.array([0.0, 0.0, 0.3e-6]), np.array([0.0, 0.0, 0.5e-6]), 2e15)
    ref = planar_cavity_green(cav, 0.3e-6, 0.5e-6, 2e15)
    assert np.allclose(g.matrix, ref.matrix, rtol=0, atol=0)


def test_planar_cavity_validation():
    with pytest.raises(DomainError):
        PlanarCavity(d=-1.0, delta=1e-3, nu=1)
    with pytest.raises(DomainError):
        PlanarCavity(d=1e-6, delta=0.0, nu=1)
    with pytest.raises(DomainError):
        PlanarCavity(d=1e-6, delta=0.2, nu=1)
    with pytest.raises(DomainError):
        PlanarCavity(d=1e-6, delta=1e-3, nu=0)
    cav = PlanarCavity(d=1.0e-6, delta=1.0e-3, nu=1)
    assert cav.omega_nu == pytest.approx(941825783654426.6, rel=1e-15)
    assert cav.gamma_nu == pytest.approx(599584916000.0, rel=1e-15)
    assert cav.r_p == 1.0 - cav.delta and cav.r_s == -(1.0 - cav.delta)


# ------------------------------------------------------- resonant closed form

def test_resonant_im_gxx_antinode_peak_value():
    # omega_nu^3 sin^2(pi/2) / (4 pi c delta), with both atoms at the antinode
    cav = PlanarCavity(d=1.0e-6, delta=1.0e-3, nu=1)
    got = planar_resonant_im_gxx(cav, cav.d / 2, cav.d / 2, cav.omega_nu)
    expect = cav.omega_nu**3 / (4.0 * math.pi * C * cav.delta)
    assert got == pytest.approx(expect, rel=1e-13)


def test_resonant_im_gxx_nodes_and_positivity():
    cav = PlanarCavity(d=2.0e-6, delta=2.0e-3, nu=2)
    w = cav.omega_nu
    peak_scale = w**3 / (4.0 * math.pi * C * cav.delta)
    # nodes of the nu = 2 mode sit at 0, d/2, d (d/2 only up to the
    # floating-point representation of sin(pi))
    for z in (0.0, cav.d / 2, cav.d):
        assert planar_resonant_im_gxx(cav, z, 0.3 * cav.d, w) == pytest.approx(
            0.0, abs=1e-14 * peak_scale
        )
    zs = np.linspace(0.0, cav.d, 41)
    for z in zs:
        assert planar_resonant_im_gxx(cav, z, z, w) >= 0.0


def test_resonant_im_gxx_mode_product_structure():
    cav = PlanarCavity(d=1.5e-6, delta=3.0e-3, nu=3)
    w = cav.omega_nu
    peak = cav.omega_nu**3 / (4.0 * math.pi * C * cav.delta)
    for za, zb in ((0.21, 0.64), (0.11, 0.87), (0.5, 0.5)):
        got = planar_resonant_im_gxx(cav, za * cav.d, zb * cav.d, w)
        expect = peak * math.sin(3 * math.pi * za) * math.sin(3 * math.pi * zb)
        assert got == pytest.approx(expect, rel=1e-13, abs=1e-22)


def test_resonant_im_gxx_lorentzian_detuning():
    cav = PlanarCavity(d=1.0e-6, delta=1.0e-3, nu=1)
    w0, g = cav.omega_nu, cav.gamma_nu
    base = planar_resonant_im_gxx(cav, 0.3 * cav.d, 0.7 * cav.d, w0)
    det = planar_resonant_im_gxx(cav, 0.3 * cav.d, 0.7 * cav.d, w0 + g / 2)
    assert det == pytest.approx(base / 2.0, rel=1e-12)


def test_resonant_im_gxx_window_and_position_domain():
    cav = PlanarCavity(d=1.0e-6, delta=1.0e-3, nu=1)
    # one full omega_nu of detuning is ~1.57e3 mode widths here
    with pytest.raises(DomainError):
        planar_resonant_im_gxx(cav, 0.5e-6, 0.5e-6, cav.omega_nu * 2.0)
    with pytest.raises(DomainError):
        planar_resonant_im_gxx(cav, -0.1e-6, 0.5e-6, cav.omega_nu)
    with pytest.raises(DomainError):
        planar_resonant_im_gxx(cav, 0.5e-6, 1.1e-6, cav.omega_nu)


def test_resonant_im_gxx_as_printed_variant_diagonal_constant():
    # the as-printed combination collapses to a position-independent value
    # on the diagonal z_A = z_B, which is the defect the corrected variant
    # repairs; both variants must stay available
    cav = PlanarCavity(d=1.0e-6, delta=1.0e-3, nu=1)
    w = cav.omega_nu
    vals = [
        planar_resonant_im_gxx(cav, f * cav.d, f * cav.d, w, variant="as-printed")
        for f in (0.1, 0.25, 0.5, 0.9)
    ]
    assert max(vals) == pytest.approx(min(vals), rel=1e-12)
    corrected = [
        planar_resonant_im_gxx(cav, f * cav.d, f * cav.d, w, variant="corrected")
        for f in (0.1, 0.25, 0.5, 0.9)
    ]
    assert max(corrected) > 10.0 * min(corrected)
    with pytest.raises(DomainError):
        planar_resonant_im_gxx(cav, 0.5e-6, 0.5e-6, w, variant="bogus")


# ----------------------------------------------------------------- KK route

def _lorentzian_spectral(peak, w0, gamma):
    def f(w):
        return peak * (gamma**2 / 4.0) / ((w - w0) ** 2 + gamma**2 / 4.0)

    return SpectralFunction(
        func=f,
        support=(w0 - 5e4 * gamma, w0 + 5e4 * gamma),
        poles=(),
        hint_points=(w0 - gamma, w0, w0 + gamma),
    )


def test_kk_lorentzian_matches_exact_principal_value():
    peak, w0, gamma = 2.3, 1.0e15, 1.0e11
    sf = _lorentzian_spectral(peak, w0, gamma)
    for shift in (-300.0, -3.0, 2.0, 250.0):
        w = w0 + shift * gamma
        got = kk_real_from_imag(sf, w)
        exact = lorentzian_principal_value(peak, w0, gamma, w)
        assert got == pytest.approx(exact, rel=2e-6)


def test_kk_far_detuned_asymptote():
    # far below the line the bare principal value approaches
    # pi * peak * gamma / (2 (w0 - w)) within one percent at 1e3 gamma
    peak, w0, gamma = 1.0, 9.4e14, 6.0e11
    sf = _lorentzian_spectral(peak, w0, gamma)
    w = w0 - 1.0e3 * gamma
    got = kk_real_from_imag(sf, w)
    asym = math.pi * peak * gamma / (2.0 * (w0 - w))
    assert abs(got - asym) / abs(asym) < 1e-2


def test_kk_on_resonance_is_zero_and_linear():
    peak, w0, gamma = 1.7, 8.0e14, 2.0e11
    sf = _lorentzian_spectral(peak, w0, gamma)
    scale = math.pi * peak * gamma
    assert abs(kk_real_from_imag(sf, w0)) < 1e-8 * scale
    sf2 = _lorentzian_spectral(2.0 * peak, w0, gamma)
    w = w0 + 7.0 * gamma
    assert kk_real_from_imag(sf2, w) == pytest.approx(2.0 * kk_real_from_imag(sf, w), rel=1e-9)


def test_kk_zero_function_gives_zero():
    sf = SpectralFunction(func=lambda w: 0.0, support=(1.0e14, 2.0e14))
    assert kk_real_from_imag(sf, 1.5e14) == 0.0
    assert kk_real_from_imag(sf, 3.0e14) == 0.0


def test_kk_pole_exclusion():
    sf = SpectralFunction(
        func=lambda w: 1.0,
        support=(1.0e14, 2.0e14),
        poles=(1.5e14,),
        exclusion_radius=1.0e12,
    )
    with pytest.raises(DomainError):
        kk_real_from_imag(sf, 1.5e14 + 1.0e11)


# --------------------------------------------------- full scan line shape

def test_planar_scan_step_height_and_width():
    # sweeping through the lowest cutoff, Im G_xx rises as a step of height
    # sin^2(pi z_A/d) sin^2-free s_A s_B / (2 d) = 1/(2 d) at the antinode,
    # broadened to an arctan profile of Lorentzian width gamma = 2 c delta/d;
    # above cutoff the guided-mode weight decays as (1 + (omega_nu/omega)^2)/2
    cav = PlanarCavity(d=1.0e-6, delta=1.0e-3, nu=1)
    ctrl = QuadratureControl(rel_tol=1e-9)
    z = cav.d / 2
    w0, g = cav.omega_nu, cav.gamma_nu
    step = 1.0 / (2.0 * cav.d)

    def level(w):
        trans, _, _ = planar_scattering_components(cav.d, cav.r_s, cav.r_p, z, z, w, ctrl)
        return trans.imag + (w / C) / (6.0 * math.pi)

    assert level(w0 - 600.0 * g) < 1e-3 * step
    assert level(w0) == pytest.approx(0.5 * step, rel=5e-3)
    # quartile heights at +-gamma/2 pin the step width to the mode width
    assert level(w0 - g / 2) == pytest.approx(0.25 * step, rel=5e-3)
    assert level(w0 + g / 2) == pytest.approx(0.75 * step, rel=5e-3)

    def model(s):
        w = w0 + s * g
        return (0.5 + math.atan(2.0 * s) / math.pi) * (1.0 + (w0 / w) ** 2) / 2.0 * step

    for s in (6.0, 60.0, 600.0):
        assert level(w0 + s * g) == pytest.approx(model(s), rel=3e-3)


def test_quadrature_control_validation():
    with pytest.raises(DomainError):
        QuadratureControl(rel_tol=0.0)
    with pytest.raises(DomainError):
        QuadratureControl(rel_tol=1e-8, limit=0)
