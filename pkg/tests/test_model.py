from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import example, given, settings
from hypothesis import strategies as st

from csbubble.errors import DomainError
from csbubble.model import (
    CARTAN,
    ExponentPair,
    ModelParams,
    _g,
    alpha_of_gamma,
    cartan_to_params,
    gamma_cap,
    gamma_of,
    j_gap_closed_form,
    junction_point,
    limit_constants,
    quad_J,
    region_report,
    sigma_gamma_range,
    sigma_nonempty,
)

couplings = st.floats(0.05, 20.0)
orders = st.integers(0, 4)


@st.composite
def params(draw):
    return ModelParams(draw(couplings), draw(couplings), draw(orders), draw(orders))


@st.composite
def sigma_points(draw):
    p = draw(params().filter(sigma_nonempty))
    lo, hi = sigma_gamma_range(p)
    frac = draw(st.floats(1e-3, 1.0))
    gam = lo + frac * (min(hi, lo + 30.0) - lo)
    return p, gam


# ------------------------------------------------------------------ couplings


@pytest.mark.parametrize("name, expected", [("A2", (1.0, 1.0)), ("B2", (2.0, 3.0)), ("G2", (5.0, 9.0))])
def test_cartan_reduction_exact(name, expected):
    p = cartan_to_params(CARTAN[name])
    assert (p.a1, p.a2) == expected
    assert cartan_to_params(name.lower()) == p


def test_custom_matrix_matches_quotients():
    K = ((1, -1), (-1, 2))
    (k11, k12), (k21, k22) = K
    det = Fraction(k11 * k22 - k12 * k21)
    a1 = Fraction(-k12 * (k11 - k21)) / det
    a2 = Fraction(-k21 * (k22 - k12)) / det
    p = cartan_to_params(K)
    assert (p.a1, p.a2) == (float(a1), float(a2)) == (2.0, 3.0)
    assert p.a1 > 0 and p.a2 > 0


def test_float_matrix_close_to_exact():
    p = cartan_to_params(((2.0, -1.0), (-1.0, 2.0)))
    assert p.a1 == pytest.approx(1.0, rel=1e-15)


@pytest.mark.parametrize("K", [((2, 1), (-1, 2)), ((1, -2), (-2, 1)), ((-2, -1), (-1, 2))])
def test_non_competitive_matrix_rejected(K):
    with pytest.raises(DomainError):
        cartan_to_params(K)


def test_unknown_cartan_name():
    with pytest.raises(DomainError):
        cartan_to_params("E8")


@pytest.mark.parametrize("args", [(0.0, 1.0), (1.0, -2.0), (1.0, 1.0, -1, 0), (1.0, 1.0, 0, 1.5),
                                  (1.0, 1.0, True, 0), (math.inf, 1.0)])
def test_model_params_validation(args):
    with pytest.raises(DomainError):
        ModelParams(*args)


@given(couplings, couplings)
def test_derived_constants(a1, a2):
    p = ModelParams(a1, a2)
    assert p.A == (1 + a1) * (1 + a2)
    assert p.B == a1 * a2
    assert p.A - p.B == pytest.approx(p.lam, rel=1e-12)


# ----------------------------------------------------------------- quadratic J


def test_J_zero():
    assert quad_J(ModelParams(1.0, 1.0), 0.0, 0.0) == 0.0


@given(params(), st.floats(-50, 50), st.floats(-50, 50))
def test_J_symmetries(p, x, y):
    ref = quad_J(p, x, y)
    scale = max(abs(ref), 1e-300)
    for v in (quad_J(p, -x, -y),
              quad_J(p, x, -2 * p.a2 / (1 + p.a1) * x - y),
              quad_J(p, -x - 2 * p.a1 / (1 + p.a2) * y, y)):
        assert abs(v - ref) <= 1e-10 * scale + 1e-12


@given(params(), st.floats(-50, 50), st.floats(-50, 50))
def test_J_positive_definite(p, x, y):
    n = math.hypot(x, y)
    if n == 0:
        return
    # on the unit circle, where squares cannot underflow
    assert quad_J(p, x / n, y / n) > 0


# --------------------------------------------------------------------- regions


def test_su3_reference_point_in_sigma():
    p = ModelParams(1.0, 1.0)
    rep = region_report(p, (1.5, 3.0))
    assert rep.g_value == 8 * 1.5 + 4 * 3 - 24 == 0
    assert rep.h_value == pytest.approx(1.0, abs=1e-15)
    assert rep.in_sigma and rep.in_omega


def test_b2_reference_point_in_sigma():
    p = ModelParams(2.0, 3.0)
    assert region_report(p, (3.0, 2.0)).in_sigma
    assert region_report(p, (3.0, 7.5)).in_sigma
    assert not region_report(p, (3.0, 1.0)).in_sigma


def test_boundaries_of_sigma():
    p = ModelParams(1.0, 1.0)
    # alpha1 = 1 is included, alpha2 = 1 is not
    assert region_report(p, (1.0, 4.0)).in_sigma
    assert not region_report(p, (2.5, 1.0)).in_sigma


@given(params())
def test_unit_pair_outside_omega(p):
    assert not region_report(p, (1.0, 1.0)).in_omega


def test_region_report_evaluates_everything():
    p = ModelParams(1.0, 1.0)
    rep = region_report(p, (0.5, 0.5))
    assert not (rep.in_omega or rep.in_s or rep.in_sigma)
    assert len(rep.s_inequalities) == 4
    assert math.isfinite(rep.g_value) and math.isfinite(rep.h_value) and math.isfinite(rep.j_gap)


def test_sigma_nonempty_examples():
    assert sigma_nonempty(ModelParams(1.0, 1.0))
    assert not sigma_nonempty(cartan_to_params("G2"))
    small = ModelParams(0.1, 0.1)
    assert small.A - 4 * small.B == pytest.approx(1.17)
    assert not sigma_nonempty(small)
    for N1 in range(3):
        for N2 in range(3):
            q = ModelParams(0.1, 0.1, N1, N2)
            assert sigma_nonempty(q) == ((q.A - 4 * q.B) * (N1 + 1) < 2 * 0.1 * 1.1 * (N2 + 1))


@settings(max_examples=200)
@given(params())
def test_sigma_nonempty_consistent_with_line_scan(p):
    cap = gamma_cap(p)
    top = cap if math.isfinite(cap) else p.N1 + 2 + 400.0
    n = 400
    found = any(region_report(p, alpha_of_gamma(p, p.N1 + 2 + (top - p.N1 - 2) * k / n)).in_sigma
                for k in range(1, n + 1))
    if sigma_nonempty(p):
        lo, hi = sigma_gamma_range(p)
        assert lo < hi
        mid = lo + 0.5 * (min(hi, lo + 1.0) - lo)
        assert region_report(p, alpha_of_gamma(p, mid)).in_sigma
    else:
        assert not found


# -------------------------------------------------------------- gamma <-> alpha


def test_gamma_examples():
    su3 = ModelParams(1.0, 1.0)
    assert gamma_of(su3, (1.5, 3.0)) == 3.0
    b2 = ModelParams(2.0, 3.0)
    for al2 in (1.5, 2.0, 6.0):
        assert gamma_of(b2, (3.0, al2)) == pytest.approx(al2 + 2, abs=1e-14)
    assert gamma_of(su3, (1.0, 1.0)) == 1.0


def test_alpha_of_gamma_examples():
    su3 = ModelParams(1.0, 1.0)
    assert tuple(alpha_of_gamma(su3, 3.0)) == pytest.approx((1.5, 3.0), abs=1e-14)
    e = alpha_of_gamma(su3, 2.0)
    assert abs(_g(su3, *e)) < 1e-12
    assert e.alpha2 == pytest.approx(2.0, abs=1e-14)


@given(sigma_points())
def test_round_trip(pg):
    p, gam = pg
    e = alpha_of_gamma(p, gam)
    assert abs(_g(p, *e)) / p.A < 1e-9
    assert gamma_of(p, e) == pytest.approx(gam, rel=1e-12, abs=1e-12)
    back = alpha_of_gamma(p, gamma_of(p, e))
    assert back.alpha1 == pytest.approx(e.alpha1, rel=1e-12, abs=1e-12)
    assert back.alpha2 == pytest.approx(e.alpha2, rel=1e-12, abs=1e-12)


@given(sigma_points())
def test_gap_positive_and_closed_form(pg):
    p, gam = pg
    e = alpha_of_gamma(p, gam)
    rep = region_report(p, e)
    assert rep.in_sigma
    assert rep.j_gap > 0
    Ja = quad_J(p, e.alpha1 - 1, e.alpha2 - 1)
    Jn = quad_J(p, p.N1 + 1, p.N2 + 1)
    assert j_gap_closed_form(p, gam) == pytest.approx(Ja - Jn, rel=1e-10, abs=1e-10 * max(Ja, Jn))


def test_special_lines():
    for N1 in range(3):
        for N2 in range(3):
            su3 = ModelParams(1.0, 1.0, N1, N2)
            for gam in (N1 + 2.5, N1 + 3.0, gamma_cap(su3)):
                a1, a2 = alpha_of_gamma(su3, gam)
                assert 2 * a1 + a2 == pytest.approx(N1 + 2 * N2 + 6, abs=1e-12)
            b2 = ModelParams(2.0, 3.0, N1, N2)
            for gam in (N1 + 2.5, N1 + 10.0):
                assert alpha_of_gamma(b2, gam).alpha1 == pytest.approx(N1 + N2 + 3, abs=1e-12)


# ---------------------------------------------------------------- special points


def test_junction_point():
    assert junction_point(ModelParams(1.0, 1.0)) == ExponentPair(1.0, 4.0)
    p = ModelParams(1.0, 1.0, 1, 0)
    j = junction_point(p)
    assert tuple(j) == (1.0, 5.0)
    assert _g(p, *j) == 0
    with pytest.raises(DomainError):
        junction_point(ModelParams(2.0, 3.0))


def test_cap_meets_junction():
    p = ModelParams(1.0, 1.0)
    assert gamma_cap(p) == 4.0
    assert tuple(alpha_of_gamma(p, 4.0)) == pytest.approx((1.0, 4.0))
    assert gamma_cap(ModelParams(2.0, 3.0)) == math.inf


@pytest.mark.parametrize("a, alpha, expected", [
    ((1.0, 1.0), (1.5, 3.0), (3.0, 5.0, 1.0)),
    ((1.0, 1.0), (1.0, 4.0), (4.0, 6.0, 0.0)),
    ((2.0, 3.0), (3.0, 2.0), (4.0, 10.0, 4.0)),
])
def test_limit_constants(a, alpha, expected):
    bp = limit_constants(ModelParams(*a), alpha)
    assert (bp.gamma, bp.D, bp.E) == pytest.approx(expected, abs=1e-14)


def test_limit_constants_off_line():
    with pytest.raises(DomainError):
        limit_constants(ModelParams(1.0, 1.0), (2.0, 2.0))


@given(params().filter(lambda p: p.A > 2 * p.B and sigma_nonempty(p)))
@example(ModelParams(1.5, 1.0, 0, 2))
def test_cap_endpoint_in_sigma(p):
    e = alpha_of_gamma(p, gamma_cap(p))
    assert e.alpha1 == 1.0
    assert region_report(p, e).in_sigma
