"""Explicit Liouville bubbles and the diagnostics that compare runs to them.

Two radial solutions of ``w'' + w'/r + (1+a) e^w = 0`` serve as limit
profiles: ``omega2`` (regular-part exponent ``D - 2`` at the origin,
centred where its slope vanishes) and ``omega1`` (centred where
``r omega' = -2``).  Both are evaluated in log space so that ``r^D`` never
materialises.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicHermiteSpline
from scipy.special import expit

from .errors import DomainError

__all__ = [
    "BubbleProfile",
    "omega1",
    "omega2",
    "omega1_slope",
    "omega2_slope",
    "bubble_residual",
    "bubble_mass_quadrature",
    "blowdown",
    "interval_mass",
    "compare_bubble",
    "write_comparison_csv",
]


def _check(param, lower, name):
    if not param > lower:
        raise DomainError(f"{name} must exceed {lower}, got {param}")


def _logr(r):
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("radius must be positive")
    return np.log(r)


def omega2(D: float, a2: float, r):
    _check(D, 2.0, "D")
    return _omega2_log(D, a2, _logr(r))


def _omega2_log(D, a2, s):
    denom = np.logaddexp(math.log(D + 2), math.log(D - 2) + D * s)
    return math.log(2 * D * D * (D * D - 4) / (1 + a2)) + (D - 2) * s - 2 * denom


def omega2_slope(D: float, r):
    """``r omega2'(r)``."""
    _check(D, 2.0, "D")
    s = _logr(r)
    return (D - 2) - 2 * D * expit(D * s + math.log(D - 2) - math.log(D + 2))


def omega1(E: float, a1: float, r):
    _check(E, 0.0, "E")
    return _omega1_log(E, a1, _logr(r))


def _omega1_log(E, a1, s):
    return math.log(2 * E * E / (1 + a1)) + (E - 2) * s - 2 * np.logaddexp(0.0, E * s)


def omega1_slope(E: float, r):
    """``r omega1'(r)``."""
    _check(E, 0.0, "E")
    return (E - 2) - 2 * E * expit(E * _logr(r))


@dataclass(frozen=True)
class BubbleProfile:
    kind: str  # "inner-omega2" | "outer-omega1"
    param: float
    coupling: float

    def __post_init__(self):
        if self.kind == "inner-omega2":
            _check(self.param, 2.0, "D")
        elif self.kind == "outer-omega1":
            _check(self.param, 0.0, "E")
        else:
            raise DomainError(f"unknown bubble kind {self.kind!r}")

    def value(self, r):
        return self.value_log(_logr(r))

    def value_log(self, s):
        """The profile as a function of ``s = ln r``."""
        if self.kind == "inner-omega2":
            return _omega2_log(self.param, self.coupling, s)
        return _omega1_log(self.param, self.coupling, s)

    def slope(self, r):
        if self.kind == "inner-omega2":
            return omega2_slope(self.param, r)
        return omega1_slope(self.param, r)

    def slope_rate(self, r):
        """``d(r omega')/d ln r``, from the logistic form of the slope."""
        P = self.param
        s = _logr(r)
        if self.kind == "inner-omega2":
            sig = expit(P * s + math.log(P - 2) - math.log(P + 2))
        else:
            sig = expit(P * s)
        return -2 * P * P * sig * (1 - sig)

    @property
    def mass(self) -> float:
        return 2 * self.param / (1 + self.coupling)


def bubble_residual(b: BubbleProfile, r):
    """``omega'' + omega'/r + (1+a) e^omega`` from closed-form derivatives."""
    r = np.asarray(r, dtype=float)
    s = np.log(r)
    scaled = b.slope_rate(r) + (1 + b.coupling) * np.exp(b.value(r) + 2 * s)
    return scaled / (r * r)


def bubble_mass_quadrature(b: BubbleProfile) -> float:
    """``int_0^inf r e^omega dr`` by adaptive quadrature in ``ln r``."""
    f = lambda s: math.exp(float(b.value_log(s)) + 2 * s)  # noqa: E731
    lo, _ = quad(f, -np.inf, 0.0, epsabs=1e-14, epsrel=1e-12, limit=200)
    hi, _ = quad(f, 0.0, np.inf, epsabs=1e-14, epsrel=1e-12, limit=200)
    return lo + hi


# --------------------------------------------------------------------------
# comparisons against numerical profiles

_COLS = {1: (0, 2), 2: (1, 3)}


def _hermite(profile, component):
    iu, iw = _COLS[component]
    return CubicHermiteSpline(profile.t, profile.y[:, iu], profile.y[:, iw])


def _sample(profile, component, tq):
    """Hermite cubic in ``t`` on the stored ``(u, w)`` pairs.

    Query points that coincide with a stored sample return that sample.
    """
    iu, _ = _COLS[component]
    tq = np.asarray(tq, dtype=float)
    out = _hermite(profile, component)(tq)
    idx = np.searchsorted(profile.t, tq)
    idx = np.clip(idx, 0, len(profile.t) - 1)
    hit = profile.t[idx] == tq
    out[hit] = profile.y[idx[hit], iu]
    return out


def blowdown(profile, R_center: float, component: int, r=None, s=None):
    """``u_k(R r) + 2 ln R`` on a window given in ``r`` or in ``s = ln r``."""
    if component not in (1, 2):
        raise DomainError(f"component must be 1 or 2, got {component}")
    if not R_center > 0:
        raise DomainError("R_center must be positive")
    if s is None:
        s = np.log(np.geomspace(0.5, 2.0, 201) if r is None else np.asarray(r, dtype=float))
    s = np.asarray(s, dtype=float)
    lnR = math.log(R_center)
    tq = lnR + s
    if tq.min() < profile.t[0] or tq.max() > profile.t[-1]:
        raise DomainError(
            f"window [{tq.min():.6g}, {tq.max():.6g}] exceeds profile range "
            f"[{profile.t[0]:.6g}, {profile.t[-1]:.6g}]"
        )
    return np.exp(s), _sample(profile, component, tq) + 2 * lnR


def interval_mass(profile, t_lo: float, t_hi: float, component: int, refine: bool = False) -> float:
    """``int r e^{u_k} dr`` over ``ln r`` in ``[t_lo, t_hi]``.

    By default this reads the mass carried along with the integration.  With
    ``refine`` it re-integrates ``e^{2t+u}`` by Gauss-Legendre on every step,
    using the dense interpolant, which is an independent route.
    """
    if t_lo < profile.t[0] or t_hi > profile.t[-1] or t_hi < t_lo:
        raise DomainError("interval outside the profile")
    iu = _COLS[component][0]
    if not refine:
        im = 5 + component - 1
        return float(profile.dense(t_hi)[im] - profile.dense(t_lo)[im])
    x, wts = np.polynomial.legendre.leggauss(12)
    knots = profile.t[(profile.t > t_lo) & (profile.t < t_hi)]
    edges = np.concatenate([[t_lo], knots, [t_hi]])
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        if b <= a:
            continue
        s = 0.5 * (b - a) * x + 0.5 * (a + b)
        u = profile.dense(s)[iu]
        expo = 2 * s + u
        total += 0.5 * (b - a) * float(np.dot(wts, np.exp(np.where(expo < -745, -np.inf, expo))))
    return total


def compare_bubble(profile, R_center: float, component: int, bubble: BubbleProfile, r=None):
    """Blow down around ``R_center`` and subtract the bubble.

    Returns ``(r, scaled_u, omega, diff, sup_error)``.
    """
    rr, scaled = blowdown(profile, R_center, component, r=r)
    om = bubble.value(rr)
    diff = scaled - om
    return rr, scaled, om, diff, float(np.max(np.abs(diff)))


def write_comparison_csv(path, r, scaled, om, diff) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["r", "scaled_u", "omega", "diff"])
        for row in zip(r, scaled, om, diff):
            wr.writerow([repr(float(v)) for v in row])
