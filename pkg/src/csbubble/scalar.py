"""Shooting solver for the radial scalar Chern-Simons-Higgs profile.

The profile ``U`` solves

    U'' + U'/r = (1+a1)^2 e^{2U} - (1+a1) e^U,   U ~ 2 N1 ln r + V0 near 0,

and decays like ``-2 gamma ln r``.  The height ``V0`` is found by a coarse
scan followed by bisection on the achieved decay exponent.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import OdeSolution

from .errors import BracketNotFound, DomainError, ToleranceNotMet
from .integrator import Controls, gexp, soft_exp, march, series_start, validate_origin
from .model import ModelParams

__all__ = [
    "ScalarProfile",
    "ScalarRun",
    "ScalarSolution",
    "scalar_rhs",
    "scalar_gamma",
    "solve_scalar",
    "scalar_mass_quadrature",
    "write_scalar_csv",
    "TOL_GAMMA",
]

TOL_GAMMA = 1e-9
SCAN_LO, SCAN_HI = -60.0, 10.0
FLAT_MARGIN = 0.5
FLAT_SLOPE = 1e-3
FLAT_T = math.log(10.0)

_GL_X, _GL_W = np.polynomial.legendre.leggauss(12)


def scalar_rhs(p: ModelParams, u: float, w: float, t: float) -> float:
    c = 1.0 + p.a1
    return c * c * gexp(2.0 * t + 2.0 * u) - c * gexp(2.0 * t + u)


def _field(p: ModelParams):
    c = 1.0 + p.a1

    def fun(t, y):
        E = soft_exp(2.0 * t + y[0])
        EE = soft_exp(2.0 * t + 2.0 * y[0])
        dens = c * E - c * c * EE
        return np.array([y[1], -dens, dens])

    return fun


def _terms(p: ModelParams):
    c = 1.0 + p.a1
    return [[(c * c, (2,), 2 * p.N1), (-c, (1,), p.N1)]]


def _start_vector(p: ModelParams, V0: float, t0: float) -> np.ndarray:
    (u,), (w,) = series_start(t0, (p.N1,), (V0,), _terms(p))
    return np.array([u, w, 2.0 * p.N1 - w])


@dataclass
class ScalarProfile:
    """Samples ``(u, w, running mass)`` of one scalar run."""

    params: ModelParams
    t: np.ndarray
    y: np.ndarray
    dense: OdeSolution | None = field(default=None, repr=False)
    V0: float = math.nan

    u = property(lambda self: self.y[:, 0])
    w = property(lambda self: self.y[:, 1])
    running_mass = property(lambda self: self.y[:, 2])

    @property
    def r(self):
        return np.exp(self.t)

    def __call__(self, t):
        return self.dense(t)


@dataclass
class ScalarRun:
    V0: float
    classification: str  # "decaying" | "topological-side" | "not-converged"
    gamma: float | None
    tail_bound: float
    profile: ScalarProfile


@dataclass
class ScalarSolution:
    gamma: float
    V0: float
    profile: ScalarProfile = field(repr=False)
    mass: float = math.nan
    gamma_target: float = math.nan
    tail_bound: float = math.nan
    iterations: int = 0

    @property
    def tail_slope(self) -> float:
        return float(self.profile.w[-1])


def _tail_estimate(p: ModelParams, t: float, u: float, w: float) -> float:
    sig = 2.0 + w
    if sig >= 0.0:
        return math.inf
    return (1.0 + p.a1) * gexp(2.0 * t + u) / -sig


def _run(p: ModelParams, V0: float, controls: Controls) -> ScalarRun:
    fun = _field(p)
    vac = -math.log1p(p.a1)
    if V0 >= vac and p.N1 == 0:
        t0 = math.log(controls.r_start)
        y0 = _start_vector(p, V0, t0)
        prof = ScalarProfile(p, np.array([t0]), y0[None, :], None, V0)
        return ScalarRun(V0, "topological-side", None, math.inf, prof)
    r0 = validate_origin(fun, lambda t: _start_vector(p, V0, t), controls.r_start, controls, 1)
    t0 = math.log(r0)

    def stop(t_prev, t, y, interp):
        if y[0] >= vac:
            return "topological-side"
        if t > FLAT_T and y[0] > vac - FLAT_MARGIN and abs(y[1]) < FLAT_SLOPE:
            return "topological-side"
        if y[1] < -2.0 and _tail_estimate(p, t, y[0], y[1]) < controls.tail_tol:
            return "decaying"
        return None

    ts, ys, interps, reason = march(fun, t0, _start_vector(p, V0, t0), controls.t_cap, controls, stop, controlled=2)
    prof = ScalarProfile(p, ts, ys, OdeSolution(ts, interps), V0)
    t, u, w = float(ts[-1]), float(ys[-1, 0]), float(ys[-1, 1])
    bound = _tail_estimate(p, t, u, w)
    if reason == "t_end":
        reason = "decaying" if w < -2.0 and bound < 1e3 * controls.tail_tol else "not-converged"
    gamma = -w / 2.0 if reason == "decaying" else None
    return ScalarRun(V0, reason, gamma, bound, prof)


def scalar_gamma(p: ModelParams, V0: float, controls: Controls = Controls()) -> ScalarRun:
    """Integrate from height ``V0`` and classify the outcome.

    A decaying run carries ``gamma = -w/2`` at termination together with the
    bound on what the neglected tail could still change.
    """
    return _run(p, V0, controls)


def _above(run: ScalarRun, target: float) -> bool:
    # gamma grows with V0 up to the vacuum; the topological side lies beyond
    return run.classification == "topological-side" or (run.gamma is not None and run.gamma > target)


def solve_scalar(p: ModelParams, gamma_target: float, controls: Controls = Controls(),
                 tol_gamma: float = TOL_GAMMA, max_iter: int = 200) -> ScalarSolution:
    if not gamma_target > p.N1 + 2:
        raise DomainError(f"gamma must exceed N1 + 2 = {p.N1 + 2}, got {gamma_target}")
    lo = hi = None
    prev = None
    hi_topological = False
    for V0 in np.arange(SCAN_LO, SCAN_HI + 0.5, 1.0):
        run = _run(p, float(V0), controls)
        if run.classification == "not-converged":
            prev = None
            continue
        if run.gamma is not None and abs(run.gamma - gamma_target) < tol_gamma:
            return _finish(p, run, gamma_target, 0)
        if prev is not None and not _above(prev, gamma_target) and _above(run, gamma_target):
            lo, hi = prev.V0, run.V0
            hi_topological = run.classification == "topological-side"
            break
        prev = run
    if lo is None:
        raise BracketNotFound(f"no V0 in [{SCAN_LO}, {SCAN_HI}] brackets gamma = {gamma_target}")
    best = None
    for it in range(1, max_iter + 1):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        run = _run(p, mid, controls)
        if run.classification == "not-converged":
            raise ToleranceNotMet(f"run at V0 = {mid!r} did not settle before t = {controls.t_cap}")
        if run.gamma is not None:
            if best is None or abs(run.gamma - gamma_target) < abs(best.gamma - gamma_target):
                best = run
            if abs(run.gamma - gamma_target) < tol_gamma:
                return _finish(p, run, gamma_target, it)
        if _above(run, gamma_target):
            hi = mid
            hi_topological = run.classification == "topological-side"
        else:
            lo = mid
    err = math.inf if best is None else abs(best.gamma - gamma_target)
    if best is None or (best.gamma < gamma_target - tol_gamma and hi_topological):
        # bisection closed in on the edge of the decaying branch without reaching the target
        reach = "none" if best is None else f"{best.gamma:.6g}"
        raise BracketNotFound(f"gamma = {gamma_target} lies beyond the decaying branch (largest reached {reach})")
    raise ToleranceNotMet(f"bisection stalled with |gamma - target| = {err:.3g} > {tol_gamma:g}")


def scalar_mass_quadrature(prof: ScalarProfile) -> float:
    """``int r [(1+a) e^U - (1+a)^2 e^{2U}] dr`` by Gauss-Legendre on each step.

    Evaluated from the dense interpolant of ``U`` alone, independently of the
    running-mass component, plus the analytic tail beyond the last sample.
    """
    c = 1.0 + prof.params.a1
    total = 0.0
    t = prof.t
    for a, b in zip(t[:-1], t[1:]):
        s = 0.5 * (b - a) * _GL_X + 0.5 * (a + b)
        u = prof.dense(s)[0]
        dens = c * np.exp(2 * s + u) - c * c * np.exp(2 * s + 2 * u)
        total += 0.5 * (b - a) * float(np.dot(_GL_W, dens))
    # origin piece [0, r_start]: leading-order mass of the regular part
    N = prof.params.N1
    total += c * gexp(prof.V0 + (2 * N + 2) * t[0]) / (2 * N + 2)
    total += _tail_estimate(prof.params, float(t[-1]), float(prof.u[-1]), float(prof.w[-1]))
    return total


def _finish(p: ModelParams, run: ScalarRun, target: float, iterations: int) -> ScalarSolution:
    mass = scalar_mass_quadrature(run.profile)
    return ScalarSolution(run.gamma, run.V0, run.profile, mass, target, run.tail_bound, iterations)


def write_scalar_csv(path, sol: ScalarSolution) -> None:
    prof = sol.profile
    limit = 2.0 * (sol.gamma + prof.params.N1)
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["t", "r", "U", "rU'", "residual_mass"])
        for t, (u, w, m) in zip(prof.t, prof.y):
            wr.writerow([repr(float(v)) for v in (t, math.exp(t), u, w, m - limit)])
