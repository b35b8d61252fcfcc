"""Parameter algebra of the rank-2 competitive Chern-Simons system.

Everything here is closed form: the reduction of a competitive coupling
matrix to the pair ``(a1, a2)``, the quadratic form ``J``, the admissible
exponent regions and the correspondence between decay exponents
``(alpha1, alpha2)`` on the construction line and the decay exponent
``gamma`` of the limiting scalar profile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Integral, Rational

from .errors import DomainError

__all__ = [
    "ModelParams",
    "ExponentPair",
    "RegionReport",
    "BubbleParams",
    "CARTAN",
    "cartan_to_params",
    "quad_J",
    "region_report",
    "sigma_nonempty",
    "gamma_of",
    "alpha_of_gamma",
    "gamma_cap",
    "junction_point",
    "sigma_gamma_range",
    "limit_constants",
    "j_gap_closed_form",
]

CARTAN = {
    "A2": ((2, -1), (-1, 2)),
    "B2": ((2, -1), (-2, 2)),
    "G2": ((2, -1), (-3, 2)),
}

TOL_G = 1e-9


@dataclass(frozen=True)
class ModelParams:
    """Couplings ``a1, a2 > 0`` and vortex multiplicities at the origin."""

    a1: float
    a2: float
    N1: int = 0
    N2: int = 0
    A: float = field(init=False)
    B: float = field(init=False)

    def __post_init__(self):
        a1, a2 = float(self.a1), float(self.a2)
        if not (a1 > 0 and a2 > 0) or not (math.isfinite(a1) and math.isfinite(a2)):
            raise DomainError(f"couplings must be positive, got a1={self.a1}, a2={self.a2}")
        for name in ("N1", "N2"):
            n = getattr(self, name)
            if isinstance(n, bool) or not float(n).is_integer() or n < 0:
                raise DomainError(f"{name} must be a non-negative integer, got {n!r}")
            object.__setattr__(self, name, int(n))
        object.__setattr__(self, "a1", a1)
        object.__setattr__(self, "a2", a2)
        A = (1.0 + a1) * (1.0 + a2)
        B = a1 * a2
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        if not math.isclose(A - B, 1.0 + a1 + a2, rel_tol=1e-12, abs_tol=0.0):
            raise DomainError(f"A - B != 1 + a1 + a2 in floating point for a={a1, a2}")

    @property
    def lam(self) -> float:
        """``1 + a1 + a2``, which equals ``A - B``."""
        return 1.0 + self.a1 + self.a2

    def with_N(self, N1: int, N2: int) -> ModelParams:
        return ModelParams(self.a1, self.a2, N1, N2)


@dataclass(frozen=True)
class ExponentPair:
    alpha1: float
    alpha2: float

    def __iter__(self):
        yield self.alpha1
        yield self.alpha2


@dataclass(frozen=True)
class RegionReport:
    in_omega: bool
    in_s: bool
    in_sigma: bool
    g_value: float
    h_value: float
    j_gap: float
    s_inequalities: tuple[bool, bool, bool, bool] = (False, False, False, False)


@dataclass(frozen=True)
class BubbleParams:
    gamma: float
    D: float
    E: float


def _as_pair(e) -> ExponentPair:
    if isinstance(e, ExponentPair):
        return e
    a1, a2 = e
    return ExponentPair(float(a1), float(a2))


def cartan_to_params(K, N1: int = 0, N2: int = 0) -> ModelParams:
    """Reduce a competitive 2x2 coupling matrix to ``(a1, a2)``.

    Integer or rational entries are reduced in exact arithmetic, so the
    Cartan matrices give their couplings without rounding.

    >>> p = cartan_to_params(CARTAN["B2"])
    >>> (p.a1, p.a2)
    (2.0, 3.0)
    """
    if isinstance(K, str):
        try:
            K = CARTAN[K.upper()]
        except KeyError:
            raise DomainError(f"unknown Cartan type {K!r}") from None
    (k11, k12), (k21, k22) = K
    entries = (k11, k12, k21, k22)
    exact = all(isinstance(x, (Integral, Rational)) and not isinstance(x, bool) for x in entries)
    if exact:
        k11, k12, k21, k22 = (Fraction(x) for x in entries)
    else:
        k11, k12, k21, k22 = (float(x) for x in entries)
    det = k11 * k22 - k12 * k21
    if not (k11 > 0 and k22 > 0 and k12 < 0 and k21 < 0 and det > 0):
        raise DomainError(
            "coupling matrix is not competitive: need a11, a22 > 0, "
            f"a12, a21 < 0 and det > 0, got {K!r}"
        )
    a1 = -k12 * (k11 - k21) / det
    a2 = -k21 * (k22 - k12) / det
    return ModelParams(float(a1), float(a2), N1, N2)


def quad_J(p: ModelParams, x: float, y: float) -> float:
    return 0.5 * p.a2 * (1.0 + p.a2) * x * x + p.B * x * y + 0.5 * p.a1 * (1.0 + p.a1) * y * y


def _g(p: ModelParams, al1: float, al2: float) -> float:
    A, B, a1, a2 = p.A, p.B, p.a1, p.a2
    c = (1.0 + a1) / a2
    return (
        (3 * A - 4 * B) * al1
        + c * (A - 2 * B) * al2
        - A * p.N1
        - c * A * p.N2
        - (4.0 + 2.0 * c) * (A - B)
    )


def _h(p: ModelParams, al1: float, al2: float) -> float:
    A, B = p.A, p.B
    return (4 * B - A) / A * (al1 - 1.0) + 2 * p.a1 / (1.0 + p.a2) * (al2 - 1.0) - (p.N1 + 1)


def _s_inequalities(p: ModelParams, al1: float, al2: float) -> tuple[bool, bool, bool, bool]:
    A, B, a1, a2, N1, N2 = p.A, p.B, p.a1, p.a2, p.N1, p.N2
    c1 = (1.0 + a1) / a2
    c2 = (1.0 + a2) / a1
    i18 = (A - 2 * B) * al2 - a2 * (1 + a2) * al1 < a2 * (1 + a2) * N1 + A * N2 + 2 * (A - B)
    i19 = (A - 2 * B) * al1 - a1 * (1 + a1) * al2 < a1 * (1 + a1) * N2 + A * N1 + 2 * (A - B)
    i20 = (3 * A - 4 * B) * al1 + c1 * (A - 2 * B) * al2 > A * N1 + c1 * A * N2 + (4 + 2 * c1) * (A - B)
    i21 = (3 * A - 4 * B) * al2 + c2 * (A - 2 * B) * al1 > A * N2 + c2 * A * N1 + (4 + 2 * c2) * (A - B)
    return bool(i18), bool(i19), bool(i20), bool(i21)


def region_report(p: ModelParams, e, tol_g: float = TOL_G) -> RegionReport:
    """Evaluate every region predicate at ``e``; nothing short-circuits."""
    al1, al2 = _as_pair(e)
    g = _g(p, al1, al2)
    h = _h(p, al1, al2)
    gap = quad_J(p, al1 - 1.0, al2 - 1.0) - quad_J(p, p.N1 + 1.0, p.N2 + 1.0)
    ineq = _s_inequalities(p, al1, al2)
    in_omega = al1 > 1 and al2 > 1 and gap > 0
    in_s = al1 > 0 and al2 > 0 and all(ineq)
    in_sigma = al1 >= 1 and al2 > 1 and abs(g) / p.A <= tol_g and h > 0
    return RegionReport(bool(in_omega), bool(in_s), bool(in_sigma), g, h, gap, ineq)


def sigma_nonempty(p: ModelParams) -> bool:
    A, B = p.A, p.B
    if not 3 * A - 4 * B > 0:
        return False
    if A - 4 * B > 0:
        return (A - 4 * B) * (p.N1 + 1) < 2 * p.a1 * (1 + p.a1) * (p.N2 + 1)
    return True


def gamma_of(p: ModelParams, e) -> float:
    al1, al2 = _as_pair(e)
    return (4 * p.B - p.A) / p.A * (al1 - 1.0) + 2 * p.a1 / (1.0 + p.a2) * (al2 - 1.0) + 1.0


def alpha_of_gamma(p: ModelParams, gamma: float) -> ExponentPair:
    """Point of the line ``g = 0`` whose limiting scalar exponent is ``gamma``."""
    A, B, a1, a2 = p.A, p.B, p.a1, p.a2
    n1, n2 = p.N1 + 1.0, p.N2 + 1.0
    gt = gamma - 1.0
    if A - 2 * B > 0:
        # same line written from the cap, so alpha1 = 1 holds exactly there
        al1 = 1.0 + (A - 2 * B) / A * (gamma_cap(p) - gamma)
    else:
        al1 = -(A - 2 * B) / A * gt + 2 * B / A * n1 + 2 * a1 / (1 + a2) * n2 + 1.0
    c = a2 / (1 + a1)
    al2 = c * (3 * A - 4 * B) / A * gt + c * (A - 4 * B) / A * n1 + (A - 4 * B) / A * n2 + 1.0
    return ExponentPair(al1, al2)


def gamma_cap(p: ModelParams) -> float:
    """Largest ``gamma`` compatible with ``alpha1 >= 1`` (infinite unless ``A > 2B``)."""
    A, B = p.A, p.B
    if A - 2 * B <= 0:
        return math.inf
    return 1.0 + 2 * B / (A - 2 * B) * (p.N1 + 1) + 2 * p.a1 * (1 + p.a1) / (A - 2 * B) * (p.N2 + 1)


def sigma_gamma_range(p: ModelParams) -> tuple[float, float]:
    """Interval ``(lo, hi]`` of ``gamma`` whose line point lies in the set.

    ``lo`` collects ``gamma > N1 + 2`` and ``alpha2 > 1`` (both strict),
    ``hi`` is the cap from ``alpha1 >= 1``.  Empty when ``lo >= hi``.
    """
    A, B = p.A, p.B
    if not 3 * A - 4 * B > 0:
        return math.nan, math.nan
    c = p.a2 / (1 + p.a1)
    at_alpha2_one = 1.0 - (A - 4 * B) * (c * (p.N1 + 1) + p.N2 + 1) / (c * (3 * A - 4 * B))
    return max(p.N1 + 2.0, at_alpha2_one), gamma_cap(p)


def junction_point(p: ModelParams) -> ExponentPair:
    """Meeting point of the type-I and type-II boundary lines (``alpha1 = 1``)."""
    A, B = p.A, p.B
    if not A - 2 * B > 0:
        raise DomainError(f"junction point needs A > 2B, got A - 2B = {A - 2 * B:.6g}")
    al2 = p.a2 * (1 + p.a2) / (A - 2 * B) * (p.N1 + 1) + A / (A - 2 * B) * (p.N2 + 1) + 1.0
    return ExponentPair(1.0, al2)


def j_gap_closed_form(p: ModelParams, gamma: float) -> float:
    """``J(alpha-1) - J(N+1)`` on the line ``g = 0``, written through ``gamma``."""
    return p.a2 * p.lam / (2 * (1 + p.a1)) * ((gamma - 1.0) ** 2 - (p.N1 + 1.0) ** 2)


def limit_constants(p: ModelParams, e, tol_g: float = TOL_G) -> BubbleParams:
    e = _as_pair(e)
    rep = region_report(p, e, tol_g)
    if not rep.in_sigma:
        raise DomainError(f"{tuple(e)} is not on the construction line (g={rep.g_value:.3g}, h={rep.h_value:.3g})")
    gamma = gamma_of(p, e)
    D = 2 * p.a2 / (1 + p.a1) * (gamma + p.N1) + 2 * p.N2 + 2
    E = 2.0 * (e.alpha1 - 1.0)
    return BubbleParams(gamma, D, E)
