"""Run configuration: presets, ``key=value`` files and flag overrides."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

from .errors import ConfigError, DomainError
from .integrator import Controls
from .model import ExponentPair, ModelParams, cartan_to_params, gamma_of, limit_constants
from .scalar import TOL_GAMMA
from .shooter import geometric_schedule

__all__ = ["RunConfig", "PRESETS", "load_config_file", "parse_pairs", "preset_config"]

PRESETS = {
    "su3-ref": dict(a1=1.0, a2=1.0, N1=0, N2=0, alpha1=1.5, alpha2=3.0),
    # gamma of the junction point (1, 4) is 4, which is also the cap
    "su3-critical": dict(a1=1.0, a2=1.0, N1=0, N2=0, alpha1=1.0, alpha2=4.0),
    "b2-ref": dict(a1=2.0, a2=3.0, N1=0, N2=0, alpha1=3.0, alpha2=2.0),
}


@dataclass(frozen=True)
class RunConfig:
    a1: float | None = None
    a2: float | None = None
    cartan: str | None = None
    N1: int = 0
    N2: int = 0
    alpha1: float | None = None
    alpha2: float | None = None
    gamma: float | None = None
    eps: float | None = None
    eps_start: float = 1e-2
    eps_ratio: float = 0.1
    eps_count: int = 7
    rtol: float = Controls.rtol
    atol: float = Controls.atol
    tol_gamma: float = TOL_GAMMA
    tail_tol: float = Controls.tail_tol
    r_start: float = Controls.r_start
    r_max: float = math.exp(Controls.t_cap)
    out: str = "out"
    workers: int = 1
    alpha_lo: float = 1.0
    alpha_hi: float = 10.0
    grid: int = 91

    # ---------------------------------------------------------------- derived

    def params(self) -> ModelParams:
        if self.cartan is not None:
            if self.a1 is not None or self.a2 is not None:
                raise ConfigError("give either a Cartan type or (a1, a2), not both")
            try:
                return cartan_to_params(_cartan_value(self.cartan), self.N1, self.N2)
            except DomainError as exc:
                raise ConfigError(str(exc)) from None
        if self.a1 is None or self.a2 is None:
            raise ConfigError("couplings missing: pass --a1 and --a2, --cartan or --preset")
        try:
            return ModelParams(self.a1, self.a2, self.N1, self.N2)
        except DomainError as exc:
            raise ConfigError(str(exc)) from None

    def target(self) -> ExponentPair:
        """Exponent pair for shooting; from ``(alpha1, alpha2)`` or ``gamma``."""
        from .model import alpha_of_gamma

        have_pair = self.alpha1 is not None or self.alpha2 is not None
        if have_pair == (self.gamma is not None):
            raise ConfigError("give exactly one of (--alpha1, --alpha2) or --gamma")
        p = self.params()
        if have_pair:
            if self.alpha1 is None or self.alpha2 is None:
                raise ConfigError("both --alpha1 and --alpha2 are needed")
            e = ExponentPair(self.alpha1, self.alpha2)
        else:
            e = alpha_of_gamma(p, self.gamma)
        try:
            limit_constants(p, e)
        except DomainError as exc:
            raise ConfigError(str(exc)) from None
        return e

    def target_gamma(self) -> float:
        if self.gamma is not None and self.alpha1 is None and self.alpha2 is None:
            return self.gamma
        return gamma_of(self.params(), self.target())

    def controls(self) -> Controls:
        if not (self.rtol > 0 and self.atol > 0 and self.tail_tol > 0 and self.r_start > 0):
            raise ConfigError("tolerances and r_start must be positive")
        if not self.r_max > 1:
            raise ConfigError("r_max must exceed 1")
        return Controls(rtol=self.rtol, atol=self.atol, tail_tol=self.tail_tol, r_start=self.r_start,
                        t_cap=math.log(self.r_max))

    def schedule(self) -> list[float]:
        if self.eps is not None:
            sched = [self.eps]
        else:
            if not 0 < self.eps_ratio < 1 or self.eps_count < 1:
                raise ConfigError("eps schedule needs 0 < ratio < 1 and count >= 1")
            sched = geometric_schedule(self.eps_start, self.eps_ratio, self.eps_count)
        for x in sched:
            if not 0 < x < 1:
                raise ConfigError(f"eps values must lie in (0, 1), got {x}")
        return sched

    def single_eps(self) -> float:
        eps = self.eps if self.eps is not None else self.schedule()[-1]
        if not 0 < eps < 1:
            raise ConfigError(f"eps must lie in (0, 1), got {eps}")
        return eps

    def updated(self, values: dict) -> RunConfig:
        return replace(self, **_coerce(values))


def _cartan_value(name: str):
    name = name.strip()
    if name.upper() in ("A2", "B2", "G2"):
        return name.upper()
    # custom matrix written as a11,a12,a21,a22
    try:
        vals = [int(x) if x.strip().lstrip("-").isdigit() else float(x) for x in name.split(",")]
    except ValueError:
        raise ConfigError(f"cannot read Cartan matrix {name!r}") from None
    if len(vals) != 4:
        raise ConfigError("a custom matrix needs four comma-separated entries")
    return ((vals[0], vals[1]), (vals[2], vals[3]))


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(values: dict) -> dict:
    out = {}
    for key, raw in values.items():
        key = key.strip().replace("-", "_")
        if key not in _TYPES:
            raise ConfigError(f"unknown configuration key {key!r}")
        if raw is None:
            continue
        kind = _TYPES[key]
        try:
            if isinstance(raw, str):
                raw = raw.strip()
            if "int" in kind:
                v = int(float(raw)) if float(raw).is_integer() else None
                if v is None:
                    raise ValueError
            elif "float" in kind:
                v = float(raw)
            else:
                v = str(raw)
        except (TypeError, ValueError):
            raise ConfigError(f"bad value for {key}: {raw!r}") from None
        out[key] = v
    return out


def parse_pairs(lines) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected key=value, got {line!r}")
        k, v = line.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def load_config_file(path) -> dict:
    try:
        with open(path) as fh:
            return parse_pairs(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None


def preset_config(name: str) -> RunConfig:
    try:
        return RunConfig().updated(PRESETS[name])
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None
