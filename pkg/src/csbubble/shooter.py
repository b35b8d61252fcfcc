"""Shooting runs of the two-component problem for a given height ``eps``.

A run starts from ``u1 ~ 2 N1 ln r + V0`` and ``u2 ~ 2 N2 ln r + ln eps``,
integrates outward, locates the event radii

    R1  u1 = u2 once u2 has risen toward u1 from far below
    R2  first maximum of u2 after R1                (w2 = 0)
    R3  next crossing u1 = u2, u1 back on top
    R4  first radius after R3 where w1 = -2
    R5  next crossing after R3, if any

and reads off the far-field exponents ``alpha_k = -w_k(inf) / 2``.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .bubbles import BubbleProfile, compare_bubble
from .errors import Diverged
from .integrator import (
    M1,
    M2,
    U1,
    U2,
    W1,
    W2,
    Controls,
    RadialProfile,
    integrate_system,
    liouville_closure,
    pohozaev_ledger,
    tail_bound,
)
from .model import ExponentPair, ModelParams, limit_constants, quad_J

__all__ = [
    "ShootReport",
    "shoot",
    "sweep",
    "burn_in_check",
    "blowdown_errors",
    "geometric_schedule",
    "write_sweep_csv",
    "SWEEP_HEADER",
    "separation_threshold",
]

SEPARATION = 5.0
SWEEP_HEADER = [
    "eps", "R1", "R2", "R3", "R4", "R5", "alpha1", "alpha2", "mass12_13", "mass11_13",
    "mass1_tail", "mass2_tail", "pohozaev_residual", "classification",
]


@dataclass
class ShootReport:
    eps: float
    params: ModelParams
    target: ExponentPair
    V0: float
    classification: str  # entire-nontopological | crossed-zero | not-converged
    R1: float | None = None
    R2: float | None = None
    R3: float | None = None
    R4: float | None = None
    R5: float | None = None
    alpha1_eps: float = math.nan
    alpha2_eps: float = math.nan
    alpha_raw: tuple[float, float] = (math.nan, math.nan)
    alpha_bound: tuple[float, float] = (math.inf, math.inf)
    closure_used: bool = False
    slopes_at: dict = field(default_factory=dict)
    masses: dict = field(default_factory=dict)
    pohozaev_residual: float = math.nan
    sup_u2: float = math.nan
    t_end: float = math.nan
    crossing: tuple | None = None
    diagnostics: list = field(default_factory=list)
    profile: RadialProfile | None = field(default=None, repr=False)

    @property
    def alpha_error(self) -> tuple[float, float]:
        return abs(self.alpha1_eps - self.target.alpha1), abs(self.alpha2_eps - self.target.alpha2)

    @property
    def radii(self) -> dict:
        return {k: getattr(self, k) for k in ("R1", "R2", "R3", "R4", "R5")}

    def mass(self, key: str) -> float:
        return self.masses.get(key, math.nan)


def geometric_schedule(start: float = 1e-2, ratio: float = 0.1, count: int = 7) -> list[float]:
    # rounded so that 1e-2 * 0.1**2 prints as 1e-4
    return [float(format(start * ratio**k, ".15g")) for k in range(count)]


# --------------------------------------------------------------------------
# event location


def _refine(profile: RadialProfile, f, i: int) -> float:
    """Root of ``f(dense state)`` between samples ``i`` and ``i+1``."""
    a, b = profile.t[i], profile.t[i + 1]
    g = lambda s: f(profile.dense(s))  # noqa: E731
    ga, gb = g(a), g(b)
    if ga == 0.0:
        return float(a)
    if gb == 0.0 or ga * gb > 0:
        return float(b)
    return float(brentq(g, a, b, xtol=1e-12, rtol=4 * np.finfo(float).eps))


def _first_crossing(vals: np.ndarray, start: int, rising: bool, persist: bool = True) -> int | None:
    """Index ``i >= start`` with a sign change between ``i`` and ``i+1``.

    With ``persist`` the new sign must hold at ``i+2`` as well (or the run
    ends there), which screens out tangential touches.
    """
    n = len(vals)
    for i in range(start, n - 1):
        a, b = vals[i], vals[i + 1]
        hit = (a < 0 <= b) if rising else (a > 0 >= b)
        if not hit:
            continue
        if persist and i + 2 < n and ((vals[i + 2] < 0) if rising else (vals[i + 2] > 0)):
            continue
        return i
    return None


def separation_threshold(V0: float, ln_eps: float) -> float:
    """Gap ``u1 - u2`` that must open up before R1 is searched for.

    Capped at half the initial gap so that moderate heights still qualify.
    """
    return min(SEPARATION, 0.5 * (V0 - ln_eps))


def _events(profile: RadialProfile, threshold: float = SEPARATION) -> tuple[dict, list]:
    t = profile.t
    diff = profile.u1 - profile.u2
    w1, w2 = profile.w1, profile.w2
    ev = dict.fromkeys(("R1", "R2", "R3", "R4", "R5"))
    notes = []
    above = np.nonzero(diff > threshold)[0]
    if len(above) == 0:
        notes.append(f"u1 - u2 never exceeded {threshold:.3g}; R1 not searched")
        return ev, notes
    d = lambda y: y[U1] - y[U2]  # noqa: E731
    i1 = _first_crossing(diff, int(above[0]), rising=False)
    if i1 is None:
        return ev, notes
    ev["R1"] = _refine(profile, d, i1)
    i2 = _first_crossing(w2, i1, rising=False, persist=False)
    i3 = _first_crossing(diff, i1 + 1, rising=True)
    if i2 is not None:
        ev["R2"] = _refine(profile, lambda y: y[W2], i2)
    if i3 is None:
        return ev, notes
    ev["R3"] = _refine(profile, d, i3)
    i4 = _first_crossing(w1 + 2.0, i3, rising=False, persist=False)
    if i4 is not None:
        ev["R4"] = _refine(profile, lambda y: y[W1] + 2.0, i4)
    i5 = _first_crossing(diff, i3 + 1, rising=False)
    if i5 is not None:
        ev["R5"] = _refine(profile, d, i5)
    # guard against the t-values falling outside [t0, t_end]
    for k, v in ev.items():
        if v is not None and not (t[0] <= v <= t[-1]):
            notes.append(f"{k} refined outside the profile ({v})")
    return ev, notes


def _order_violations(ev: dict) -> list[str]:
    out = []
    seq = [k for k in ("R1", "R2", "R3") if ev[k] is not None]
    for a, b in zip(seq, seq[1:]):
        if not ev[a] < ev[b]:
            out.append(f"event-order-violation: {a} = {ev[a]:.6g} not before {b} = {ev[b]:.6g}")
    if ev["R1"] is not None and ev["R3"] is not None and ev["R2"] is None:
        out.append("event-order-violation: no maximum of u2 between R1 and R3")
    if ev["R2"] is not None and ev["R3"] is not None and ev["R2"] > ev["R3"]:
        out.append("event-order-violation: R2 after R3")
    for k in ("R4", "R5"):
        if ev[k] is not None and ev["R3"] is not None and not ev[k] > ev["R3"]:
            out.append(f"event-order-violation: {k} not after R3")
    return out


# --------------------------------------------------------------------------
# a single run


def _terminal_exponents(p: ModelParams, prof: RadialProfile, controls: Controls):
    s = prof.last
    b1, b2, I1, I2 = tail_bound(p, s.t, s.u1, s.u2, s.w1, s.w2)
    raw = (-s.w1 / 2, -s.w2 / 2)
    if max(b1, b2) < controls.tail_tol:
        return raw, (b1 / 2, b2 / 2), (I1, I2), False, True
    cl = liouville_closure(p, s.t, s.u1, s.u2, s.w1, s.w2)
    if cl is not None:
        w1i, w2i, r1, r2 = cl
        dom_u = max(s.u1, s.u2)
        rel = math.exp(max(dom_u, min(s.u1, s.u2) - dom_u, -745.0))
        err = (abs(w1i - s.w1) + abs(w2i - s.w2)) * rel + (1 + max(p.a1, p.a2)) ** 2 * min(r1, r2)
        return (-w1i / 2, -w2i / 2), (err / 2, err / 2), (r1, r2), True, True
    return raw, (b1 / 2, b2 / 2), (I1, I2), False, False


def shoot(p: ModelParams, e, eps: float, V0: float, controls: Controls = Controls()) -> ShootReport:
    """One shooting run at height ``eps`` with origin height ``V0``."""
    e = e if isinstance(e, ExponentPair) else ExponentPair(*map(float, e))
    bp = limit_constants(p, e)
    critical = abs(bp.E) < 1e-12
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    rep = ShootReport(eps, p, e, V0, "not-converged")

    def stop(t, y):
        b1, b2, _, _ = tail_bound(p, t, y[U1], y[U2], y[W1], y[W2])
        return "stabilized" if max(b1, b2) < controls.tail_tol else None

    try:
        prof = integrate_system(p, V0, math.log(eps), controls, stop=stop)
    except Diverged as exc:
        prof = exc.profile
        rep.classification = "crossed-zero"
        rep.crossing = (exc.component, exc.t)
        rep.diagnostics.append(str(exc))
    rep.profile = prof
    rep.t_end = float(prof.t[-1])
    rep.pohozaev_residual = pohozaev_ledger(p, prof)

    ev, notes = _events(prof, separation_threshold(V0, math.log(eps)))
    rep.diagnostics += notes
    for k, v in ev.items():
        setattr(rep, k, None if v is None else math.exp(v))
        if v is not None:
            y = prof.dense(v)
            rep.slopes_at[k] = (float(y[W1]), float(y[W2]))
    rep.diagnostics += _order_violations(ev)
    if critical and ev["R4"] is not None:
        rep.diagnostics.append("event-order-violation: w1 reached -2 after R3 in the critical case")

    u2max = float(np.max(prof.u2))
    if ev["R2"] is not None:
        u2max = max(u2max, float(prof.dense(ev["R2"])[U2]))
    rep.sup_u2 = u2max

    if rep.classification == "crossed-zero":
        return rep

    alpha, bound, rest, closed, converged = _terminal_exponents(p, prof, controls)
    rep.alpha1_eps, rep.alpha2_eps = alpha
    rep.alpha_raw = (-prof.last.w1 / 2, -prof.last.w2 / 2)
    rep.alpha_bound = bound
    rep.closure_used = closed

    if ev["R1"] is not None and ev["R3"] is not None:
        y1, y3 = prof.dense(ev["R1"]), prof.dense(ev["R3"])
        rep.masses["mass12_13"] = float(y3[M2] - y1[M2])
        rep.masses["mass11_13"] = float(y3[M1] - y1[M1])
        rep.masses["mass1_tail"] = float(prof.y[-1, M1] - y3[M1] + rest[0])
        rep.masses["mass2_tail"] = float(prof.y[-1, M2] - y3[M2] + rest[1])
    rep.masses["mass1_total"] = float(prof.y[-1, M1] + rest[0])
    rep.masses["mass2_total"] = float(prof.y[-1, M2] + rest[1])

    if not converged:
        rep.diagnostics.append(f"slopes not stabilised by t = {rep.t_end:.6g}")
        return rep
    if not (alpha[0] > 1.0 and alpha[1] > 1.0):
        rep.diagnostics.append(f"terminal exponents {alpha} do not both exceed 1")
        return rep
    rep.classification = "entire-nontopological"
    gap = quad_J(p, alpha[0] - 1, alpha[1] - 1) - quad_J(p, p.N1 + 1, p.N2 + 1)
    if not gap > 0:
        rep.diagnostics.append(f"extracted exponents violate the Pohozaev necessary condition (gap {gap:.3g})")
    return rep


# --------------------------------------------------------------------------
# schedules and comparisons


def blowdown_errors(rep: ShootReport, r=None) -> dict:
    """Sup errors of the blow-downs at R2 (against omega2) and R4 (omega1)."""
    out = {"inner": math.nan, "outer": math.nan}
    if rep.profile is None:
        return out
    bp = limit_constants(rep.params, rep.target)
    if rep.R2 is not None:
        try:
            out["inner"] = compare_bubble(rep.profile, rep.R2, 2,
                                          BubbleProfile("inner-omega2", bp.D, rep.params.a2), r)[-1]
        except ValueError:
            pass
    if rep.R4 is not None and bp.E > 0:
        try:
            out["outer"] = compare_bubble(rep.profile, rep.R4, 1,
                                          BubbleProfile("outer-omega1", bp.E, rep.params.a1), r)[-1]
        except ValueError:
            pass
    return out


def _shoot_args(args):
    return shoot(*args)


def sweep(p: ModelParams, e, eps_schedule, V0: float, controls: Controls = Controls(),
          workers: int | None = None) -> list[ShootReport]:
    """One report per ``eps``; failures are recorded in the report, not raised."""
    eps_schedule = [float(x) for x in eps_schedule]
    if any(not 0 < x < 1 for x in eps_schedule):
        raise ValueError("eps values must lie in (0, 1)")
    if any(b >= a for a, b in zip(eps_schedule, eps_schedule[1:])):
        raise ValueError("eps schedule must be strictly decreasing")
    jobs = [(p, e, x, V0, controls) for x in eps_schedule]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_shoot_args, jobs))
    return [_shoot_args(j) for j in jobs]


def _series(obj):
    """``(t, u1)`` samples from a report, a system profile or a scalar profile."""
    if isinstance(obj, ShootReport):
        obj = obj.profile
    if hasattr(obj, "profile") and not isinstance(obj, RadialProfile):
        obj = obj.profile
    if isinstance(obj, RadialProfile):
        return obj.t, obj.u1
    return obj.t, obj.u


def burn_in_check(report, scalarU, window_r: float) -> float:
    """``sup |u1 - U|`` over ``[r_start, window_r]``.

    Evaluated on the coarser of the two sample grids, with a monotone cubic
    through the finer one.
    """
    if isinstance(report, ShootReport):
        if report.classification == "crossed-zero":
            raise ValueError("burn-in check needs a run that did not cross zero")
        if report.R1 is not None and not window_r < report.R1:
            raise ValueError(f"window_r = {window_r} must lie below R1 = {report.R1:.6g}")
    ta, ua = _series(report)
    tb, ub = _series(scalarU)
    hi = math.log(window_r)
    lo = max(ta[0], tb[0])
    ma = (ta >= lo) & (ta <= hi)
    mb = (tb >= lo) & (tb <= hi)
    if ma.sum() <= mb.sum():
        coarse_t, coarse_u, fine_t, fine_u = ta[ma], ua[ma], tb, ub
    else:
        coarse_t, coarse_u, fine_t, fine_u = tb[mb], ub[mb], ta, ua
    if len(coarse_t) == 0:
        return math.nan
    fine = PchipInterpolator(fine_t, fine_u, extrapolate=False)
    return float(np.nanmax(np.abs(coarse_u - fine(coarse_t))))


def _fmt(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    if isinstance(x, str):
        return x
    return repr(float(x))


def write_sweep_csv(path, reports) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(SWEEP_HEADER)
        for rep in reports:
            m = rep.masses
            wr.writerow([
                _fmt(rep.eps), _fmt(rep.R1), _fmt(rep.R2), _fmt(rep.R3), _fmt(rep.R4), _fmt(rep.R5),
                _fmt(rep.alpha1_eps), _fmt(rep.alpha2_eps), _fmt(m.get("mass12_13")),
                _fmt(m.get("mass11_13")), _fmt(m.get("mass1_tail")), _fmt(m.get("mass2_tail")),
                _fmt(rep.pohozaev_residual), rep.classification,
            ])
