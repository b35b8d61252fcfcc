from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from csbubble.bubbles import omega1, omega1_slope
from csbubble.errors import Diverged, ProfileOverflow
from csbubble.integrator import (
    Controls,
    RadialState,
    force_terms,
    gexp,
    integrate_system,
    liouville_closure,
    origin_start,
    pohozaev_ledger,
    read_profile_csv,
    soft_exp,
    system_rhs,
    tail_bound,
    write_profile_csv,
)
from csbubble.model import ModelParams


def test_guarded_exponential():
    assert gexp(-800.0) == 0.0
    assert gexp(0.0) == 1.0
    assert gexp(700.0) == math.exp(700.0)
    with pytest.raises(ProfileOverflow):
        gexp(710.0)
    assert soft_exp(710.0) == math.inf
    assert soft_exp(-746.0) == 0.0


def test_forces_vanish():
    p = ModelParams(1.0, 1.0)
    assert force_terms(p, -800.0, -800.0) == (0.0, 0.0)
    assert force_terms(p, 0.0, 0.0) == (0.0, 0.0)
    # the normalised vacuum is a fixed point of the slope equations
    assert system_rhs(p, RadialState(3.0, 0.0, 0.0, 0.7, -0.2)) == (0.0, 0.0)


def _rhs_by_hand(p, t, u1, u2):
    """``r^2 [(1+a_k) F_k - a_k F_j]`` written out in the radius."""
    r = math.exp(t)
    F1 = (1 + p.a1) * math.exp(2 * u1) - math.exp(u1) - p.a1 * math.exp(u1 + u2)
    F2 = (1 + p.a2) * math.exp(2 * u2) - math.exp(u2) - p.a2 * math.exp(u1 + u2)
    return r * r * ((1 + p.a1) * F1 - p.a1 * F2), r * r * ((1 + p.a2) * F2 - p.a2 * F1)


def test_su3_deep_state():
    p = ModelParams(1.0, 1.0)
    dw1, dw2 = system_rhs(p, RadialState(0.0, -10.0, -10.0, 1.0, -3.0))
    assert dw1 == pytest.approx(-math.exp(-10.0), rel=1e-3)
    assert (dw1, dw2) == pytest.approx(_rhs_by_hand(p, 0.0, -10.0, -10.0), rel=1e-13)


def test_run_solves_radial_equation_in_r(su3_report):
    # central differences of the computed u(r) against u'' + u'/r = (1+a1) F1 - a1 F2
    p = su3_report.params
    prof = su3_report.profile
    for r in (0.5, 3.0, 20.0, 60.0, 300.0):
        h = 1e-3 * r
        u = [float(prof(math.log(x))[0]) for x in (r - h, r, r + h)]
        lap = (u[2] - 2 * u[1] + u[0]) / h**2 + (u[2] - u[0]) / (2 * h * r)
        F1, F2 = force_terms(p, u[1], float(prof(math.log(r))[1]))
        rhs = (1 + p.a1) * F1 - p.a1 * F2
        assert lap == pytest.approx(rhs, rel=1e-4, abs=1e-9 * abs(F1) + 1e-14)


@given(st.floats(0.1, 10), st.floats(0.1, 10), st.floats(-5, 5), st.floats(-40, -0.01), st.floats(-40, -0.01))
def test_linear_combination_identity(a1, a2, t, u1, u2):
    p = ModelParams(a1, a2)
    dw1, dw2 = system_rhs(p, RadialState(t, u1, u2, 0.0, 0.0))
    F1, F2 = force_terms(p, u1, u2)
    r2 = math.exp(2 * t)
    scale = r2 * (abs(F1) + abs(F2)) * (1 + a1) * (1 + a2) + 1e-300
    assert abs(a2 * dw1 + (1 + a1) * dw2 - r2 * (p.A - p.B) * F2) <= 1e-12 * scale
    assert abs((1 + a2) * dw1 + a1 * dw2 - r2 * (p.A - p.B) * F1) <= 1e-12 * scale


@given(st.floats(0.1, 10), st.floats(0.1, 10), st.floats(-60, -0.01), st.floats(-60, -0.01))
def test_monotonicity_trap(a1, a2, u1, u2):
    p = ModelParams(a1, a2)
    trap = -math.log(2 * p.lam)
    F = force_terms(p, u1, u2)
    u = (u1, u2)
    for k in (0, 1):
        j = 1 - k
        if u[k] < trap:
            assert F[k] < -0.5 * math.exp(u[k])
            if u[k] < u[j] < trap:
                assert F[j] < F[k] < 0


def test_monotonicity_trap_along_run(su3_report):
    p = su3_report.params
    prof = su3_report.profile
    trap = -math.log(2 * p.lam)
    for u1, u2 in zip(prof.u1, prof.u2):
        F = force_terms(p, u1, u2)
        for k, uk in enumerate((u1, u2)):
            if trap > uk > -700:
                assert F[k] < -0.5 * math.exp(uk)


def test_origin_slope_from_dirac_source():
    p = ModelParams(1.0, 1.0, 1, 0)
    for r in (1e-3, 1e-5):
        s = origin_start(p, -1.0, -8.0, r_start=r)
        assert s.w1 == pytest.approx(2.0, abs=10 * s.r**2)
        assert s.u1 == pytest.approx(2 * math.log(s.r) - 1.0, abs=10 * s.r**2)
        assert s.r <= r * (1 + 1e-12)


def test_free_logarithm_run_is_linear():
    p = ModelParams(1.0, 1.0, 1, 2)
    prof = integrate_system(p, -1500.0, -1500.0, Controls(), t_end=5.0)
    w0 = prof.y[0, 2:4]
    assert np.all(prof.w1 == w0[0]) and np.all(prof.w2 == w0[1])
    assert np.allclose(np.diff(prof.u1) / np.diff(prof.t), 2.0, rtol=1e-12)
    assert np.all(prof.Q == 0.0)
    assert np.ptp(prof.P) == 0.0
    assert pohozaev_ledger(p, prof) == 0.0


def test_crossing_zero_reports_partial_profile():
    p = ModelParams(1.0, 1.0)
    with pytest.raises(Diverged) as info:
        integrate_system(p, -0.78, math.log(0.9))
    exc = info.value
    assert exc.component == 2
    assert exc.profile is not None and exc.profile.t[-1] >= exc.t
    assert abs(float(exc.profile(exc.t)[1])) < 1e-9


def test_tightened_controls():
    c = Controls().tightened()
    assert c.rtol == pytest.approx(Controls().rtol / 10)
    assert c.atol == pytest.approx(Controls().atol / 10)
    assert c.tail_tol == Controls().tail_tol


def test_step_halving_changes_terminal_slopes_little(su3, su3_scalar):
    base = Controls()
    tight = base.tightened()
    ends = []
    for c in (base, tight):
        prof = integrate_system(su3, su3_scalar.V0, math.log(1e-6), c, t_end=30.0)
        ends.append(prof.y[-1, 2:4])
    assert np.max(np.abs(ends[0] - ends[1])) < 10 * tight.rtol


def test_pohozaev_residual_scales_with_tolerance(su3, su3_scalar):
    res = [pohozaev_ledger(su3, integrate_system(su3, su3_scalar.V0, math.log(1e-4), Controls(rtol=r, atol=r / 100),
                                                  t_end=25.0)) for r in (1e-7, 1e-8, 1e-9)]
    assert res[-1] < 1e-6
    assert res[0] > res[1] > res[2]


def test_tail_bound():
    p = ModelParams(1.0, 1.0)
    assert tail_bound(p, 10.0, -40.0, -50.0, -1.0, -5.0)[0] == math.inf
    b1, b2, I1, I2 = tail_bound(p, 10.0, -40.0, -50.0, -3.0, -5.0)
    assert I1 == pytest.approx(math.exp(-20.0))
    assert b1 == pytest.approx(4 * I1 + 2 * I2)


def test_liouville_closure_on_exact_bubble():
    # a single dominant component following omega1 exactly: the closure must return
    # the bubble's far slope -(E+2) and its remaining mass
    a1, E = 1.0, 1.0
    p = ModelParams(a1, 1.0)
    r = 1e5
    t = math.log(r)
    u1 = float(omega1(E, a1, r))
    w1 = float(omega1_slope(E, r))
    u2, w2 = u1 - 50.0, w1 - 1.0
    out = liouville_closure(p, t, u1, u2, w1, w2)
    assert out is not None
    w1_inf, w2_inf, m1, m2 = out
    assert w1_inf == pytest.approx(-(E + 2), abs=1e-12)
    from scipy.integrate import quad
    rest, _ = quad(lambda s: math.exp(float(omega1(E, a1, math.exp(s))) + 2 * s), t, t + 60, epsabs=1e-16)
    assert m1 == pytest.approx(rest, rel=1e-8)
    assert w2_inf == pytest.approx(w2 + p.a2 * m1, rel=1e-14)
    assert liouville_closure(p, t, u1, u1 - 5.0, w1, w2) is None


def test_profile_csv_round_trip(tmp_path, su3_report):
    path = tmp_path / "profile.csv"
    write_profile_csv(path, su3_report.profile)
    assert path.read_text().splitlines()[0] == "t,r,u1,u2,w1,w2,P,Q"
    back = read_profile_csv(path, su3_report.params)
    np.testing.assert_array_equal(back.t, su3_report.profile.t)
    np.testing.assert_array_equal(back.y[:, :5], su3_report.profile.y[:, :5])
