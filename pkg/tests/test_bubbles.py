from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from csbubble.bubbles import (
    BubbleProfile,
    blowdown,
    bubble_mass_quadrature,
    bubble_residual,
    compare_bubble,
    interval_mass,
    omega1,
    omega1_slope,
    omega2,
    omega2_slope,
    write_comparison_csv,
)
from csbubble.errors import DomainError
from csbubble.integrator import Controls, RadialProfile, integrate_system
from csbubble.model import ModelParams

D_vals = st.floats(2.2, 14.0)
E_vals = st.floats(0.2, 8.0)
a_vals = st.floats(0.1, 10.0)


def test_normalisations():
    assert float(omega2(5.0, 1.0, 1.0)) == pytest.approx(math.log(21 / 4), abs=1e-14)
    assert float(omega1(1.0, 1.0, 1.0)) == pytest.approx(math.log(1 / 4), abs=1e-14)
    assert float(omega2_slope(5.0, 1.0)) == pytest.approx(0.0, abs=1e-14)
    assert float(omega1_slope(1.0, 1.0)) == pytest.approx(-2.0, abs=1e-14)


def test_large_radius_stays_finite():
    v = omega2(12.0, 1.0, 1e80)
    assert math.isfinite(float(v))


@given(D_vals, E_vals)
def test_slope_limits(D, E):
    assert float(omega2_slope(D, 1e-6)) == pytest.approx(D - 2, abs=1e-4)
    assert float(omega2_slope(D, 1e6)) == pytest.approx(-(D + 2), abs=1e-4)
    assert float(omega1_slope(E, 1e-6 ** (1 / min(E, 1.0)))) == pytest.approx(E - 2, abs=1e-4)
    assert float(omega1_slope(E, 1e6 ** (1 / min(E, 1.0)))) == pytest.approx(-(E + 2), abs=1e-4)


@given(D_vals, E_vals, a_vals)
def test_ode_residual(D, E, a):
    rr = np.geomspace(0.01, 100.0, 50)
    for b in (BubbleProfile("inner-omega2", D, a), BubbleProfile("outer-omega1", E, a)):
        assert np.max(np.abs(bubble_residual(b, rr))) < 1e-9


@given(D_vals, a_vals)
def test_residual_by_finite_differences(D, a):
    b = BubbleProfile("inner-omega2", D, a)
    def lap(r, h):
        v = b.value(np.array([r - h, r, r + h]))
        return (v[2] - 2 * v[1] + v[0]) / h**2 + (v[2] - v[0]) / (2 * h * r)

    # radii near the core, where e^omega is not swamped by the individual terms
    for r in (0.6, 1.0, 1.4):
        h = 0.05 / D * r
        # Richardson on the centred stencil cancels the h^2 truncation term
        est = (4 * lap(r, h / 2) - lap(r, h)) / 3
        assert est == pytest.approx(-(1 + a) * math.exp(float(b.value(r))), rel=1e-4, abs=1e-9)


@settings(max_examples=20, deadline=None)
@given(D_vals, E_vals, a_vals)
def test_masses(D, E, a):
    inner = BubbleProfile("inner-omega2", D, a)
    outer = BubbleProfile("outer-omega1", E, a)
    assert bubble_mass_quadrature(inner) == pytest.approx(2 * D / (1 + a), abs=1e-8)
    assert bubble_mass_quadrature(outer) == pytest.approx(2 * E / (1 + a), abs=1e-8)


@pytest.mark.parametrize("bad", [lambda: omega2(2.0, 1.0, 1.0), lambda: omega1(0.0, 1.0, 1.0),
                                 lambda: omega1(1.0, 1.0, 0.0), lambda: BubbleProfile("middle", 3.0, 1.0)])
def test_domain_errors(bad):
    with pytest.raises(DomainError):
        bad()


def test_blowdown_identity(su3_report):
    prof = su3_report.profile
    r, v = blowdown(prof, 1.0, 1, s=prof.t)
    np.testing.assert_array_equal(v, prof.u1)
    np.testing.assert_array_equal(r, np.exp(prof.t))


def test_blowdown_window_checked(su3_report):
    with pytest.raises(DomainError):
        blowdown(su3_report.profile, 1e40, 1)
    with pytest.raises(DomainError):
        blowdown(su3_report.profile, 10.0, 3)


def _exact_profile(bubble: BubbleProfile, n=400):
    t = np.linspace(-4.0, 4.0, n)
    y = np.zeros((n, 7))
    y[:, 1] = bubble.value_log(t)
    y[:, 3] = bubble.slope(np.exp(t))
    y[:, 0] = y[:, 1] - 5.0
    y[:, 2] = y[:, 3]
    return RadialProfile(ModelParams(1.0, 1.0), t, y)


def test_compare_with_exact_samples():
    b = BubbleProfile("inner-omega2", 5.0, 1.0)
    r, scaled, om, diff, sup = compare_bubble(_exact_profile(b), 1.0, 2, b)
    assert sup < 1e-6
    assert r[0] == pytest.approx(0.5) and r[-1] == pytest.approx(2.0)


def test_rescaling_shifts_by_log(su3_report):
    b = BubbleProfile("inner-omega2", 5.0, 1.0)
    prof = _exact_profile(b)
    _, v1 = blowdown(prof, 1.0, 2, r=np.array([1.0]))
    _, v2 = blowdown(prof, math.e, 2, r=np.array([1 / math.e]))
    assert v2[0] == pytest.approx(v1[0] + 2.0, abs=1e-12)


def test_interval_mass_routes_agree(su3_report):
    prof = su3_report.profile
    t1, t3 = math.log(su3_report.R1), math.log(su3_report.R3)
    carried = interval_mass(prof, t1, t3, 2)
    quad = interval_mass(prof, t1, t3, 2, refine=True)
    assert carried == pytest.approx(quad, rel=1e-8)
    assert carried == pytest.approx(5.0, rel=0.05)
    assert interval_mass(prof, t1, t3, 1) < 0.05


def test_interval_mass_of_empty_region():
    prof = integrate_system(ModelParams(1.0, 1.0), -1500.0, -1500.0, Controls(), t_end=3.0)
    assert interval_mass(prof, 0.0, 3.0, 1, refine=True) == 0.0
    with pytest.raises(DomainError):
        interval_mass(prof, 0.0, 10.0, 1)


def test_comparison_csv(tmp_path):
    b = BubbleProfile("outer-omega1", 1.0, 1.0)
    out = compare_bubble(_exact_profile(b), 1.0, 2, b)
    path = tmp_path / "cmp.csv"
    write_comparison_csv(path, *out[:4])
    lines = path.read_text().splitlines()
    assert lines[0] == "r,scaled_u,omega,diff"
    assert len(lines) == 202
