"""Radial integration of the two-component system in log-radius.

The unknowns are carried as ``(u1, u2, w1, w2)`` with ``t = ln r`` and
``w_k = r u_k'``, so that

    du_k/dt = w_k,   dw_k/dt = r^2 [(1+a_k) F_k - a_k F_{3-k}].

Every exponential is formed from a combined exponent (``2t + u``, never
``e^{2t} * e^u``), which keeps the far field representable out to
``t = 60`` and beyond.  Three running integrals ride along with the state:
the Pohozaev source ``Q`` and the masses ``m_k = int r e^{u_k} dr``.  They
are integrated by the same embedded Runge-Kutta pair as the field itself.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import DOP853, RK45, OdeSolution
from scipy.optimize import brentq

from .errors import Diverged, OriginValidationError, ProfileOverflow, StepUnderflow
from .model import ModelParams, quad_J

__all__ = [
    "Controls",
    "RadialState",
    "RadialProfile",
    "gexp",
    "soft_exp",
    "force_terms",
    "system_rhs",
    "origin_start",
    "integrate_system",
    "advance",
    "pohozaev_value",
    "pohozaev_ledger",
    "tail_bound",
    "liouville_closure",
    "march",
    "series_start",
    "write_profile_csv",
]

EXP_FLOOR = -745.0
EXP_CEIL = 709.0
# absolute tolerance that takes a component out of step-size control
FREE_ATOL = 1e300

# column layout of the augmented state
U1, U2, W1, W2, QP, M1, M2 = range(7)


@dataclass(frozen=True)
class Controls:
    """Tolerances and limits shared by every integration."""

    rtol: float = 1e-9
    atol: float = 1e-11
    tail_tol: float = 1e-12
    r_start: float = 1e-4
    t_cap: float = 60.0
    max_steps: int = 200_000
    origin_tol: float = 1e-9
    max_step: float = math.inf
    method: str = "DOP853"

    def tightened(self, factor: float = 10.0) -> Controls:
        return replace(self, rtol=self.rtol / factor, atol=self.atol / factor)


class DOP853Fifth(DOP853):
    """``DOP853`` judged by its fifth-order error estimate alone.

    The stock norm blends the fifth- and third-order estimates, which now and
    then lets a step through whose true error is far above tolerance; the
    global error then stops scaling with the tolerance.  The plain
    fifth-order estimate is more conservative and scales cleanly.
    """

    def _estimate_error_norm(self, K, h, scale):
        err5 = np.dot(K.T, self.E5) / scale
        return abs(h) * np.linalg.norm(err5) / math.sqrt(len(scale))


_METHODS = {"DOP853": DOP853Fifth, "DOP853-blended": DOP853, "RK45": RK45}


def gexp(x: float) -> float:
    """``exp`` that flushes to zero below ``-745`` and refuses to overflow."""
    if x < EXP_FLOOR:
        return 0.0
    if x > EXP_CEIL:
        raise ProfileOverflow(f"exponent {x:.6g} exceeds the representable range")
    return math.exp(x)


def soft_exp(x: float) -> float:
    """Like :func:`gexp` but returns ``inf`` on overflow.

    Used inside the vector fields: a trial Runge-Kutta stage that overshoots
    then yields a non-finite error estimate and the step is simply rejected.
    """
    if x < EXP_FLOOR:
        return 0.0
    if x > EXP_CEIL:
        return math.inf
    return math.exp(x)


@dataclass(frozen=True)
class RadialState:
    t: float
    u1: float
    u2: float
    w1: float
    w2: float

    @property
    def r(self) -> float:
        return math.exp(self.t)


def force_terms(p: ModelParams, u1: float, u2: float) -> tuple[float, float]:
    e1, e2, e12 = gexp(u1), gexp(u2), gexp(u1 + u2)
    F1 = (1.0 + p.a1) * gexp(2.0 * u1) - e1 - p.a1 * e12
    F2 = (1.0 + p.a2) * gexp(2.0 * u2) - e2 - p.a2 * e12
    return F1, F2


def _scaled_forces(p: ModelParams, t: float, u1: float, u2: float, ex=gexp):
    """``r^2 F_k`` and the exponentials they are built from."""
    s1 = 2.0 * t + u1
    s2 = 2.0 * t + u2
    E1 = ex(s1)
    E2 = ex(s2)
    E11 = ex(s1 + u1)
    E22 = ex(s2 + u2)
    E12 = ex(s1 + u2)
    G1 = (1.0 + p.a1) * E11 - E1 - p.a1 * E12
    G2 = (1.0 + p.a2) * E22 - E2 - p.a2 * E12
    return G1, G2, E1, E2, E11, E22, E12


def system_rhs(p: ModelParams, s: RadialState) -> tuple[float, float]:
    G1, G2, *_ = _scaled_forces(p, s.t, s.u1, s.u2)
    return (1.0 + p.a1) * G1 - p.a1 * G2, (1.0 + p.a2) * G2 - p.a2 * G1


def _system_field(p: ModelParams) -> Callable:
    a1, a2, lam, B = p.a1, p.a2, p.lam, p.B
    c11 = lam * a2 * (1.0 + a1)
    c22 = lam * a1 * (1.0 + a2)
    c12 = 2.0 * lam * B

    def fun(t, y):
        G1, G2, E1, E2, E11, E22, E12 = _scaled_forces(p, t, y[0], y[1], soft_exp)
        return np.array(
            [
                y[2],
                y[3],
                (1.0 + a1) * G1 - a1 * G2,
                (1.0 + a2) * G2 - a2 * G1,
                c11 * E11 + c22 * E22 - c12 * E12,
                E1,
                E2,
            ]
        )

    return fun


def pohozaev_value(p: ModelParams, t, u1, u2, w1, w2):
    """The conserved-up-to-source Pohozaev quantity ``P`` (vectorised)."""
    t, u1, u2 = np.asarray(t, float), np.asarray(u1, float), np.asarray(u2, float)
    w1, w2 = np.asarray(w1, float), np.asarray(w2, float)

    def ex(x):
        return np.exp(np.clip(x, EXP_FLOOR, EXP_CEIL)) * (x >= EXP_FLOOR)

    s1, s2 = 2 * t + u1, 2 * t + u2
    bracket = (
        p.a2 * ex(s1)
        + p.a1 * ex(s2)
        - 0.5 * p.a2 * (1 + p.a1) * ex(s1 + u1)
        - 0.5 * p.a1 * (1 + p.a2) * ex(s2 + u2)
        + p.B * ex(s1 + u2)
    )
    return quad_J(p, w1 + 2.0, w2 + 2.0) + p.lam * bracket


# --------------------------------------------------------------------------
# origin


def series_start(t0: float, N: Sequence[int], v: Sequence[float], terms) -> tuple[list, list]:
    """Regular-part expansion ``v_k(r) = v_k(0) + sum c r^{2m+2} / (2m+2)^2``.

    ``terms[k]`` lists ``(coef, powers, m)`` for monomials
    ``coef * exp(powers . v) * r^{2m}`` of the right-hand side of component
    ``k``; each is integrated exactly against the radial Laplacian.
    """
    us, ws = [], []
    for k, comp in enumerate(terms):
        u = 2.0 * N[k] * t0 + v[k]
        w = 2.0 * N[k]
        for coef, powers, m in comp:
            q = 2 * m + 2
            expo = sum(c * vj for c, vj in zip(powers, v)) + q * t0
            if not math.isfinite(expo):
                continue
            mono = coef * gexp(expo)
            u += mono / (q * q)
            w += mono / q
        us.append(u)
        ws.append(w)
    return us, ws


def _system_terms(p: ModelParams):
    a1, a2, N1, N2 = p.a1, p.a2, p.N1, p.N2
    e1, e2, e11, e22, e12 = ((1, 0), N1), ((0, 1), N2), ((2, 0), 2 * N1), ((0, 2), 2 * N2), ((1, 1), N1 + N2)
    comp1 = [
        ((1 + a1) ** 2, *e11),
        (-(1 + a1), *e1),
        (a1, *e2),
        (-a1 * (1 + a2), *e22),
        (a1 * (a2 - 1 - a1), *e12),
    ]
    comp2 = [
        ((1 + a2) ** 2, *e22),
        (-(1 + a2), *e2),
        (a2, *e1),
        (-a2 * (1 + a1), *e11),
        (a2 * (a1 - 1 - a2), *e12),
    ]
    return [comp1, comp2]


def _origin_vector(p: ModelParams, V0: float, ln_eps: float, t0: float) -> np.ndarray:
    (u1, u2), (w1, w2) = series_start(t0, (p.N1, p.N2), (V0, ln_eps), _system_terms(p))
    m1 = gexp(V0 + (2 * p.N1 + 2) * t0) / (2 * p.N1 + 2)
    m2 = gexp(ln_eps + (2 * p.N2 + 2) * t0) / (2 * p.N2 + 2)
    return np.array([u1, u2, w1, w2, 0.0, m1, m2])


def validate_origin(fun, start: Callable[[float], np.ndarray], r_start: float, controls: Controls,
                    ncomp: int) -> float:
    """Pick a start radius whose series agrees with an integrated half-step.

    The series is evaluated at ``r/2``, integrated up to ``r`` and compared
    with the series at ``r``.  On failure ``r`` is halved once more.
    """
    r = r_start
    worst = math.inf
    for _ in range(2):
        t_half, t_full = math.log(r / 2), math.log(r)
        ts, ys, _, _ = march(fun, t_half, start(t_half), t_full, controls, controlled=2 * ncomp)
        worst = float(np.max(np.abs(ys[-1][: 2 * ncomp] - start(t_full)[: 2 * ncomp])))
        if worst <= controls.origin_tol:
            return r
        r *= 0.5
    raise OriginValidationError(f"series start not validated (mismatch {worst:.3g} at r = {2 * r:.3g})")


def origin_start(p: ModelParams, V0: float, ln_eps: float, r_start: float | None = None,
                 controls: Controls = Controls()) -> RadialState:
    r0 = controls.r_start if r_start is None else r_start
    fun = _system_field(p)
    r0 = validate_origin(fun, lambda t: _origin_vector(p, V0, ln_eps, t), r0, controls, 2)
    t0 = math.log(r0)
    y = _origin_vector(p, V0, ln_eps, t0)
    return RadialState(t0, *y[:4])


# --------------------------------------------------------------------------
# marching


def march(fun, t0: float, y0, t_end: float, controls: Controls, stop=None, controlled: int | None = None):
    """Step the embedded Runge-Kutta pair from ``t0`` toward ``t_end``.

    Only the first ``controlled`` components enter the local error norm; the
    rest are running integrals that ride along on the same stages.
    ``stop(t_prev, t, y, interp)`` may return a reason string to end early.
    Returns ``(ts, ys, interpolants, reason)``.
    """
    y0 = np.asarray(y0, dtype=float)
    atol = np.full(y0.shape, controls.atol)
    if controlled is not None:
        atol[controlled:] = FREE_ATOL
    cls = _METHODS[controls.method]
    solver = cls(fun, t0, y0, t_end, rtol=controls.rtol, atol=atol, max_step=controls.max_step)
    ts = [t0]
    ys = [np.array(y0, dtype=float)]
    interps = []
    reason = "t_end"
    while solver.status == "running":
        with np.errstate(over="ignore", invalid="ignore"):
            msg = solver.step()
        if solver.status == "failed":
            raise StepUnderflow(f"integrator failed at t = {solver.t:.12g}: {msg}")
        interps.append(solver.dense_output())
        ts.append(solver.t)
        ys.append(solver.y.copy())
        if len(ts) > controls.max_steps:
            raise StepUnderflow(f"more than {controls.max_steps} steps before t = {t_end}")
        if stop is not None:
            why = stop(ts[-2], ts[-1], ys[-1], interps[-1])
            if why:
                reason = why
                break
    return np.array(ts), np.array(ys), interps, reason


@dataclass
class RadialProfile:
    """Accepted-step samples of one run plus its dense interpolant.

    ``y`` has columns ``u1, u2, w1, w2, Q, m1, m2``.
    """

    params: ModelParams
    t: np.ndarray
    y: np.ndarray
    dense: OdeSolution | None = field(default=None, repr=False)
    origin_meta: dict = field(default_factory=dict)
    stop_reason: str = ""
    _interps: list = field(default_factory=list, repr=False)

    @property
    def r(self):
        return np.exp(self.t)

    u1 = property(lambda self: self.y[:, U1])
    u2 = property(lambda self: self.y[:, U2])
    w1 = property(lambda self: self.y[:, W1])
    w2 = property(lambda self: self.y[:, W2])
    Q = property(lambda self: self.y[:, QP])
    m1 = property(lambda self: self.y[:, M1])
    m2 = property(lambda self: self.y[:, M2])

    @property
    def P(self):
        return pohozaev_value(self.params, self.t, self.u1, self.u2, self.w1, self.w2)

    @property
    def pohozaev_series(self):
        return self.t, self.P, self.Q

    def __call__(self, t):
        """Dense state at log-radius ``t`` (scalar or array)."""
        return self.dense(t)

    def state(self, t: float) -> RadialState:
        y = self.dense(t)
        return RadialState(float(t), *map(float, y[:4]))

    @property
    def last(self) -> RadialState:
        return RadialState(float(self.t[-1]), *map(float, self.y[-1, :4]))


def _profile_stop(p: ModelParams, user_stop):
    def stop(t_prev, t, y, interp):
        if y[U1] >= 0.0 or y[U2] >= 0.0:
            return "crossed-zero"
        if user_stop is not None:
            return user_stop(t, y)
        return None

    return stop


def _locate_zero(interp, t_prev, t, k):
    f = lambda s: interp(s)[k]  # noqa: E731
    if f(t_prev) >= 0.0:
        return t_prev
    return brentq(f, t_prev, t, xtol=1e-12)


def advance(profile: RadialProfile, p: ModelParams, t_end: float, controls: Controls = Controls(),
            stop=None) -> RadialProfile:
    """Extend ``profile`` to ``t_end`` (or until ``stop(t, y)`` fires).

    Raises :class:`Diverged` with the partial profile attached if either
    component reaches zero.
    """
    fun = _system_field(p)
    ts, ys, interps, reason = march(fun, float(profile.t[-1]), profile.y[-1], t_end, controls,
                                    _profile_stop(p, stop), controlled=4)
    all_interps = profile._interps + interps
    t_all = np.concatenate([profile.t, ts[1:]])
    y_all = np.vstack([profile.y, ys[1:]])
    out = RadialProfile(p, t_all, y_all, OdeSolution(t_all, all_interps) if all_interps else None,
                        dict(profile.origin_meta), reason, all_interps)
    if reason == "crossed-zero":
        k = U1 if ys[-1][U1] >= 0.0 else U2
        tz = _locate_zero(interps[-1], ts[-2], ts[-1], k)
        raise Diverged(k + 1, tz, out)
    return out


def integrate_system(p: ModelParams, V0: float, ln_eps: float, controls: Controls = Controls(),
                     t_end: float | None = None, stop=None) -> RadialProfile:
    """Start at the origin with heights ``(V0, ln eps)`` and integrate outward."""
    s = origin_start(p, V0, ln_eps, controls=controls)
    y0 = _origin_vector(p, V0, ln_eps, s.t)
    meta = {"N1": p.N1, "N2": p.N2, "V0": V0, "ln_eps": ln_eps, "r_start": math.exp(s.t)}
    start = RadialProfile(p, np.array([s.t]), y0[None, :], None, meta)
    return advance(start, p, controls.t_cap if t_end is None else t_end, controls, stop)


# --------------------------------------------------------------------------
# diagnostics


def pohozaev_ledger(p: ModelParams, profile: RadialProfile) -> float:
    """Largest normalised drift between the Pohozaev quantity and its source."""
    P = profile.P
    Q = profile.Q
    drift = (P - P[0]) - (Q - Q[0])
    return float(np.max(np.abs(drift)) / max(1.0, abs(P[0])))


def tail_bound(p: ModelParams, t: float, u1: float, u2: float, w1: float, w2: float):
    """Upper estimate of the slope change still to come beyond ``t``.

    Assumes ``2t + u_k`` keeps decreasing at its current rate.  Returns
    ``(bound1, bound2, mass1, mass2)``; infinite when either ``2 + w_k >= 0``.
    """
    sig1, sig2 = 2.0 + w1, 2.0 + w2
    if sig1 >= 0.0 or sig2 >= 0.0:
        return math.inf, math.inf, math.inf, math.inf
    I1 = gexp(2 * t + u1) / -sig1
    I2 = gexp(2 * t + u2) / -sig2
    b1 = (1 + p.a1) ** 2 * I1 + p.a1 * (1 + p.a2) * I2
    b2 = (1 + p.a2) ** 2 * I2 + p.a2 * (1 + p.a1) * I1
    return b1, b2, I1, I2


def liouville_closure(p: ModelParams, t: float, u1: float, u2: float, w1: float, w2: float,
                      gap: float = 36.0, depth: float = 30.0):
    """Close the far field of a one-component-dominated run in closed form.

    When ``u_j - u_k < -gap`` and ``u_k < -depth`` the dominant component
    obeys ``v'' = -(1 + a_k) e^v`` with ``v = 2t + u_k``, whose first
    integral fixes the terminal slope.  Returns ``None`` when the regime
    does not apply, else ``(w1_inf, w2_inf, mass1_rest, mass2_rest)``.
    """
    u = (u1, u2)
    w = [w1, w2]
    a = (p.a1, p.a2)
    k = 0 if u1 >= u2 else 1
    j = 1 - k
    if not (u[j] - u[k] < -gap and u[k] < -depth and w[k] < 0.0 and w[j] <= w[k]):
        return None
    sig = 2.0 + w[k]
    S = gexp(2 * t + u[k])
    sig_inf = -math.sqrt(sig * sig + 2.0 * (1 + a[k]) * S)
    mass_k = (sig - sig_inf) / (1 + a[k])
    w_inf = [0.0, 0.0]
    w_inf[k] = sig_inf - 2.0
    w_inf[j] = w[j] + a[j] * mass_k
    if 2.0 + w_inf[j] >= 0.0:
        return None
    mass_j = gexp(2 * t + u[j]) / -(2.0 + w_inf[j])
    masses = [0.0, 0.0]
    masses[k], masses[j] = mass_k, mass_j
    return w_inf[0], w_inf[1], masses[0], masses[1]


def _fmt(x) -> str:
    return repr(float(x))


def write_profile_csv(path, profile: RadialProfile) -> None:
    P = profile.P
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["t", "r", "u1", "u2", "w1", "w2", "P", "Q"])
        for i, t in enumerate(profile.t):
            y = profile.y[i]
            wr.writerow([_fmt(t), _fmt(math.exp(t)), _fmt(y[U1]), _fmt(y[U2]), _fmt(y[W1]), _fmt(y[W2]),
                         _fmt(P[i]), _fmt(y[QP])])


def read_profile_csv(path, p: ModelParams) -> RadialProfile:
    """Load a profile dump; the result has no dense interpolant."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    t = data[:, 0]
    y = np.zeros((len(t), 7))
    y[:, :4] = data[:, 2:6]
    y[:, QP] = data[:, 7]
    return RadialProfile(p, t, y)
