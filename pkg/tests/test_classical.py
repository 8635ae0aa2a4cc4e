import math

import mpmath
import numpy as np
import pytest
from scipy.integrate import solve_ivp

from paramosc import classical
from paramosc.classical import CosineDrive, CustomProfile, ErmakovParams, SechPulse
from paramosc.errors import DomainError

SQRT2 = math.sqrt(2.0)


def test_cosine_sigma_matches_closed_form():
    params = ErmakovParams(2.0, 0.6)
    lay = classical.layer(CosineDrive(), params)
    t = np.linspace(0, 4, 41)
    s2, _ = classical.harmonic_closed_form(params, 0.0, 0.0, t)
    assert np.allclose(lay.sigma(t)[0] ** 2, s2, rtol=1e-13)


def test_b_is_positive_root():
    p = classical.layer(CosineDrive(), ErmakovParams(SQRT2, SQRT2)).params
    # w0 = 2 for Omega = 1: b = sqrt(4ac - 4) = 2
    assert math.isclose(p.b, 2.0, rel_tol=1e-14)


def test_b_override_and_errors():
    lay = classical.layer(CosineDrive(), ErmakovParams(SQRT2, SQRT2, b=-2.0))
    assert lay.params.b == -2.0
    with pytest.raises(DomainError):
        classical.layer(CosineDrive(), ErmakovParams(SQRT2, SQRT2, b=1.0))
    with pytest.raises(DomainError):
        classical.layer(CosineDrive(), ErmakovParams(-1.0, 1.0))
    with pytest.raises(DomainError):
        # 4ac < 16/w0^2 = 4
        classical.layer(CosineDrive(), ErmakovParams(0.5, 0.5))
    with pytest.raises(DomainError):
        classical.layer(SechPulse(), ErmakovParams(1.0, 2.0))


def test_ermakov_equation_cosine():
    lay = classical.layer(*(CosineDrive(), ErmakovParams(2.0, 0.6)))
    h = 1e-3
    for t in (0.2, 1.3):
        sd = [float(lay.sigma(t + j * h)[1]) for j in (-2, -1, 1, 2)]
        sdd = (sd[0] - 8 * sd[1] + 8 * sd[2] - sd[3]) / (12 * h)
        s = float(lay.sigma(t)[0])
        assert abs(sdd + 4 * s - 4 / s**3) < 1e-8


def test_driven_trajectory_solves_forced_equation():
    prof = CosineDrive(amplitude=0.7, phase=0.3, F0=1.0, alpha=3.0)
    lay = classical.layer(prof, ErmakovParams(1, 1))
    h = 1e-3
    for t in (0.4, 2.0):
        gd = [float(lay.trajectory(t + j * h)[1]) for j in (-2, -1, 1, 2)]
        gdd = (gd[0] - 8 * gd[1] + 8 * gd[2] - gd[3]) / (12 * h)
        g = float(lay.trajectory(t)[0])
        assert abs(gdd + 4 * g - 2 * prof.force(t)) < 1e-9


def test_resonant_trajectory_and_tags():
    prof = CosineDrive(F0=1.0, alpha=2.0)
    assert prof.resonant and "non-periodic" in prof.tags
    t = np.linspace(0, 10, 11)
    g, _ = classical.layer(prof, ErmakovParams(1, 1)).trajectory(t)
    assert np.allclose(g, 0.5 * t * np.sin(2 * t), atol=1e-14)
    assert not CosineDrive(F0=1.0, alpha=3.0).resonant
    assert not CosineDrive(F0=0.0, alpha=2.0).resonant


def test_tau_harmonic_limit():
    # sigma = 1 gives tau = t
    assert math.isclose(classical.phase_time(CosineDrive(), ErmakovParams(1, 1), 2.3), 2.3, rel_tol=1e-13)


def test_tau_against_mpmath_quad():
    params = ErmakovParams(2.0, 0.6)
    s2 = lambda t: (1.3 + 0.7 * mpmath.cos(4 * t) + mpmath.sqrt(0.2) * mpmath.sin(4 * t))  # noqa: E731
    ref = float(mpmath.quad(lambda t: 1 / s2(t), [0, 1, 2, 2.7]))
    assert abs(classical.phase_time(CosineDrive(), params, 2.7) - ref) < 1e-12


@pytest.mark.parametrize("prof,params", [(CosineDrive(amplitude=1.0, F0=1.0, alpha=3.0), ErmakovParams(SQRT2, SQRT2)),
                                         (SechPulse(), ErmakovParams(1, 1))])
def test_tau_closed_form(prof, params):
    for t in (0.5, 2.0, 5.5):
        tc, spread = classical.phase_time_closed_form(prof, params, t)
        assert abs(tc - classical.phase_time(prof, params, t)) < 1e-8
        assert spread < 1e-8


def test_work_closed_form():
    prof = CosineDrive(amplitude=0.8, phase=0.5, F0=1.3, alpha=3.0)
    for t in (0.9, 3.0):
        assert abs(classical.layer(prof, ErmakovParams(1, 1)).work(t) - classical.cosine_work_closed_form(prof, t)) < 1e-12
    res = CosineDrive(amplitude=0.0, F0=1.0, alpha=2.0)
    assert abs(classical.layer(res, ErmakovParams(1, 1)).work(2.0) - classical.cosine_work_closed_form(res, 2.0)) < 1e-12


def test_sech_generic_closed_form_example_values():
    # q'' + (2 + 15 sech^2(t - 6)) q = 0
    q, qd, mu, nu = classical.sech_basis_closed_form(2.0, 15.0, 1.0, 6.0, 6.3)
    assert math.isclose(nu, 3.905124837953327, rel_tol=1e-14)
    w = []
    for t in (6.0, 7.2):
        q1, q1d, _, _ = classical.sech_basis_closed_form(2.0, 15.0, 1.0, 6.0, t)
        w.append(q1 * np.conj(q1d) - q1d * np.conj(q1))
    assert np.allclose(w, -2j * SQRT2, atol=1e-11)


def test_sech_closed_form_against_mpmath():
    w1, w2, k, t0 = 8.0, 60.0, 1.0, 6.0
    mu, nu = math.sqrt(w1) / k, math.sqrt(0.25 + w2 / k**2)
    for t in (5.2, 6.0, 9.0):
        y = math.tanh(k * (t - t0))
        ref = complex((1 - y) ** (-0.5j * mu) * (1 + y) ** (0.5j * mu)
                      * mpmath.hyp2f1(0.5 + nu, 0.5 - nu, 1 - 1j * mu, (1 - y) / 2))
        q1, _, _, _ = classical.sech_basis_closed_form(w1, w2, k, t0, t)
        assert abs(q1 - ref) < 1e-11 * max(1, abs(ref))


def test_sech_basis_against_independent_integrator(sech):
    prof, params = sech
    lay = classical.layer(prof, params)
    q, qd, _, _ = classical.sech_basis_closed_form(4 * prof.omega1, 4 * prof.omega2_amp, prof.k, prof.t0, prof.t0)
    rhs = lambda t, y: [y[1], -4 * prof.omega2(t) * y[0]]  # noqa: E731
    for t in (0.0, 3.0, 10.0):
        sol = solve_ivp(rhs, (prof.t0, t), [q, qd], method="RK45", rtol=1e-12, atol=1e-14)
        q1, q1d, q2, q2d = lay.basis(t)
        assert abs(sol.y[0, -1] - q1) < 1e-7 * max(1, abs(q1))
        assert abs(q2 - np.conj(q1)) == 0


def test_sech_wronskian(sech):
    prof, params = sech
    lay = classical.layer(prof, params)
    assert math.isclose(abs(lay.w0), 4 * math.sqrt(prof.omega1), rel_tol=1e-14)
    for t in (0.0, 6.0, 12.0):
        assert abs(classical.wronskian(prof, t) - lay.w0) < 1e-9


def test_sech_window(sech):
    prof, params = sech
    assert prof.window == (-2.0, 14.0)
    with pytest.raises(DomainError):
        classical.classical_state(prof, params, 15.0)


def test_custom_profile_reproduces_cosine_drive():
    ref = CosineDrive(amplitude=0.5, phase=0.2, F0=1.0, alpha=3.0)
    g0, gd0 = classical.layer(ref, ErmakovParams(1.2, 1.5)).trajectory(0.0)
    cust = CustomProfile(lambda t: 1.0, lambda t: math.cos(3 * t), (0.0, 4.0), 0.0, float(g0), float(gd0))
    a = classical.classical_state(ref, ErmakovParams(1.2, 1.5), 2.5)
    b = classical.classical_state(cust, ErmakovParams(1.2, 1.5), 2.5)
    for f in ("sigma", "sigma_dot", "gamma", "gamma_dot", "tau", "work"):
        assert abs(getattr(a, f) - getattr(b, f)) < 1e-9


def test_state_fields(driven):
    cs = classical.classical_state(*driven, 0.7)
    assert abs(cs.W - cs.W_recomputed()) == 0
    assert math.isclose(float(cs.z(1.0)), (1.0 + cs.gamma) / cs.sigma)
    ks = classical.kinematic_state(*driven, 0.7)
    assert math.isnan(ks.tau) and ks.sigma == cs.sigma
