"""``csbubble`` command line: region, scalar, shoot, sweep and verify.

Settings are merged in order: preset, ``--config`` file, explicit flags.
Every data file is written with round-trip float formatting and no timestamps,
so identical settings give byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .acceptance import Suite, format_table, run_acceptance
from .bubbles import BubbleProfile, compare_bubble, write_comparison_csv
from .config import PRESETS, RunConfig, load_config_file, preset_config
from .errors import BubbleError, ConfigError, Diverged, NotConverged
from .integrator import write_profile_csv
from .model import (
    alpha_of_gamma,
    junction_point,
    limit_constants,
    region_report,
    sigma_gamma_range,
    sigma_nonempty,
)
from .scalar import solve_scalar, write_scalar_csv
from .shooter import ShootReport, blowdown_errors, shoot, sweep, write_sweep_csv

__all__ = ["main", "build_parser", "resolve_config"]

# (flag, config key, help)
_FLAGS = [
    ("--a1", "a1", "coupling a1 > 0"),
    ("--a2", "a2", "coupling a2 > 0"),
    ("--cartan", "cartan", "A2, B2, G2 or a custom matrix a11,a12,a21,a22"),
    ("--N1", "N1", "vortex order of the first component"),
    ("--N2", "N2", "vortex order of the second component"),
    ("--alpha1", "alpha1", "target decay exponent of u1"),
    ("--alpha2", "alpha2", "target decay exponent of u2"),
    ("--gamma", "gamma", "target scalar decay exponent (instead of the alpha pair)"),
    ("--eps", "eps", "single height eps in (0, 1)"),
    ("--eps-start", "eps_start", "first eps of the sweep schedule"),
    ("--eps-ratio", "eps_ratio", "ratio between successive eps"),
    ("--eps-count", "eps_count", "number of eps values"),
    ("--rtol", "rtol", "relative tolerance of the integrator"),
    ("--atol", "atol", "absolute tolerance of the integrator"),
    ("--tol-gamma", "tol_gamma", "bisection tolerance on the scalar exponent"),
    ("--tail-tol", "tail_tol", "stop once the far-field slope change is below this"),
    ("--r-start", "r_start", "radius where the origin series hands over"),
    ("--r-max", "r_max", "outer radius cap"),
    ("--workers", "workers", "worker processes for the sweep"),
    ("--alpha-lo", "alpha_lo", "lower edge of the region rectangle"),
    ("--alpha-hi", "alpha_hi", "upper edge of the region rectangle"),
    ("--grid", "grid", "points per side of the region rectangle"),
    ("--out", "out", "output directory"),
]


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    x = float(x)
    return "" if math.isnan(x) else repr(x)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--preset", choices=sorted(PRESETS), help="start from a built-in configuration")
    common.add_argument("--config", metavar="FILE", help="flat key=value settings file")
    for flag, key, text in _FLAGS:
        common.add_argument(flag, dest=key, default=None, help=text)

    ap = argparse.ArgumentParser(prog="csbubble", description="Bubbling solutions of a rank-2 "
                                 "Chern-Simons system by radial shooting.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("region", parents=[common], help="sample the exponent regions and the construction line")
    sub.add_parser("scalar", parents=[common], help="solve the scalar limit profile for gamma")
    sub.add_parser("shoot", parents=[common], help="one shooting run at a single eps")
    sub.add_parser("sweep", parents=[common], help="shoot along an eps schedule")
    sub.add_parser("verify", parents=[common], help="run the acceptance checks")
    return ap


def resolve_config(ns: argparse.Namespace) -> RunConfig:
    cfg = preset_config(ns.preset) if ns.preset else RunConfig()
    if ns.config:
        cfg = cfg.updated(load_config_file(ns.config))
    flags = {key: getattr(ns, key) for _, key, _ in _FLAGS if getattr(ns, key) is not None}
    if flags:
        # an explicit choice of coupling source or target replaces the other form
        if "cartan" in flags:
            cfg = replace(cfg, a1=None, a2=None)
        if "a1" in flags or "a2" in flags:
            cfg = replace(cfg, cartan=None)
        if "gamma" in flags:
            cfg = replace(cfg, alpha1=None, alpha2=None)
        if "alpha1" in flags or "alpha2" in flags:
            cfg = replace(cfg, gamma=None)
        cfg = cfg.updated(flags)
    return cfg


# ------------------------------------------------------------------- output


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {out}: {exc}") from None
    return out


def _write_rows(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(header)
        for row in rows:
            wr.writerow([_fmt(v) for v in row])


def write_summary(out: Path, items: list[tuple[str, object]]) -> None:
    """``summary.txt`` (one ``key = value`` per line) and ``summary.csv``."""
    with open(out / "summary.txt", "w") as fh:
        for k, v in items:
            fh.write(f"{k} = {_fmt(v)}\n")
    _write_rows(out / "summary.csv", ["key", "value"], items)


def _config_items(cfg: RunConfig) -> list[tuple[str, object]]:
    p = cfg.params()
    return [("a1", p.a1), ("a2", p.a2), ("N1", p.N1), ("N2", p.N2), ("rtol", cfg.rtol),
            ("atol", cfg.atol), ("tail_tol", cfg.tail_tol), ("r_start", cfg.r_start), ("r_max", cfg.r_max)]


def _report_items(rep: ShootReport) -> list[tuple[str, object]]:
    items = [("eps", rep.eps), ("V0", rep.V0), ("classification", rep.classification)]
    items += list(rep.radii.items())
    items += [("alpha1_eps", rep.alpha1_eps), ("alpha2_eps", rep.alpha2_eps),
              ("alpha1_target", rep.target.alpha1), ("alpha2_target", rep.target.alpha2),
              ("alpha1_error", rep.alpha_error[0]), ("alpha2_error", rep.alpha_error[1]),
              ("closure_used", rep.closure_used), ("pohozaev_residual", rep.pohozaev_residual),
              ("sup_u2", rep.sup_u2), ("t_end", rep.t_end)]
    items += sorted(rep.masses.items())
    items += [(f"diagnostic_{i}", d) for i, d in enumerate(rep.diagnostics)]
    return items


def _check_report(rep: ShootReport) -> None:
    if rep.classification == "crossed-zero":
        k, t = rep.crossing
        raise Diverged(k, t)
    if rep.classification != "entire-nontopological":
        raise NotConverged("; ".join(rep.diagnostics) or "run did not settle")


# ----------------------------------------------------------------- commands


def cmd_region(cfg: RunConfig) -> int:
    p = cfg.params()
    out = _outdir(cfg)
    if not (cfg.alpha_hi > cfg.alpha_lo and cfg.grid >= 2):
        raise ConfigError("region rectangle needs alpha_hi > alpha_lo and grid >= 2")
    axis = np.linspace(cfg.alpha_lo, cfg.alpha_hi, cfg.grid)
    rows = []
    for x in axis:
        for y in axis:
            r = region_report(p, (x, y))
            rows.append((x, y, r.g_value, r.h_value, r.j_gap, r.in_omega, r.in_s, r.in_sigma))
    _write_rows(out / "region.csv", ["alpha1", "alpha2", "g", "h", "j_gap", "in_omega", "in_s", "in_sigma"], rows)
    print(f"A = {p.A!r}, B = {p.B!r}, 3A - 4B = {3 * p.A - 4 * p.B!r}")
    if p.A > 2 * p.B:
        j = junction_point(p)
        print(f"junction point: alpha = ({j.alpha1!r}, {j.alpha2!r})")
    if not sigma_nonempty(p):
        print("Σ empty")
        return 0
    lo, hi = sigma_gamma_range(p)
    top = hi if math.isfinite(hi) else lo + 20.0
    line = []
    for gam in np.linspace(lo, top, cfg.grid + 1)[1:]:
        e = alpha_of_gamma(p, float(gam))
        bp = limit_constants(p, e)  # fails fast if the point left the set
        line.append((gam, e.alpha1, e.alpha2, bp.D, bp.E, region_report(p, e).j_gap))
    _write_rows(out / "sigma_line.csv", ["gamma", "alpha1", "alpha2", "D", "E", "j_gap"], line)
    print(f"construction line: gamma in ({lo!r}, {hi!r}" + ("]" if math.isfinite(hi) else ")"))
    return 0


def _scalar_for(cfg: RunConfig):
    p = cfg.params()
    return solve_scalar(p, cfg.target_gamma(), cfg.controls(), cfg.tol_gamma)


def cmd_scalar(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    sol = _scalar_for(cfg)
    write_scalar_csv(out / "scalar_profile.csv", sol)
    write_summary(out, _config_items(cfg) + [
        ("gamma_target", sol.gamma_target), ("gamma", sol.gamma), ("V0", sol.V0), ("mass", sol.mass),
        ("mass_limit", 2 * (sol.gamma_target + cfg.params().N1)), ("tail_bound", sol.tail_bound),
        ("iterations", sol.iterations)])
    print(f"V0 = {sol.V0:.12f}")
    print(f"gamma = {sol.gamma:.12f}")
    print(f"mass = {sol.mass:.9f}")
    return 0


def cmd_shoot(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    p, e = cfg.params(), cfg.target()
    sol = _scalar_for(cfg)
    rep = shoot(p, e, cfg.single_eps(), sol.V0, cfg.controls())
    write_profile_csv(out / "profile.csv", rep.profile)
    err = blowdown_errors(rep)
    write_summary(out, _config_items(cfg) + _report_items(rep) + [
        ("blowdown_inner", err["inner"]), ("blowdown_outer", err["outer"])])
    _print_report(rep)
    _check_report(rep)
    return 0


def _print_report(rep: ShootReport) -> None:
    radii = "  ".join(f"{k}={_fmt(v) or '-'}" for k, v in rep.radii.items())
    print(f"eps = {rep.eps:.3g}: {rep.classification}")
    print(f"  {radii}")
    print(f"  alpha = ({rep.alpha1_eps:.9f}, {rep.alpha2_eps:.9f})  target ({rep.target.alpha1:g}, "
          f"{rep.target.alpha2:g})  pohozaev residual {rep.pohozaev_residual:.2e}")
    for d in rep.diagnostics:
        print(f"  note: {d}")


def cmd_sweep(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    p, e = cfg.params(), cfg.target()
    sol = _scalar_for(cfg)
    try:
        reports = sweep(p, e, cfg.schedule(), sol.V0, cfg.controls(), cfg.workers)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    write_sweep_csv(out / "sweep.csv", reports)
    bp = limit_constants(p, e)
    conv = []
    for i, rep in enumerate(reports):
        err = blowdown_errors(rep)
        conv.append((rep.eps, *rep.alpha_error, err["inner"], err["outer"], rep.pohozaev_residual,
                     rep.classification))
        _dump_comparisons(out, i, rep, bp)
        _print_report(rep)
    _write_rows(out / "convergence.csv", ["eps", "alpha1_error", "alpha2_error", "blowdown_inner",
                                          "blowdown_outer", "pohozaev_residual", "classification"], conv)
    last = reports[-1]
    write_summary(out, _config_items(cfg) + [("V0", sol.V0), ("runs", len(reports))] + _report_items(last))
    _check_report(last)
    return 0


def _dump_comparisons(out: Path, i: int, rep: ShootReport, bp) -> None:
    p = rep.params
    jobs = [("inner", rep.R2, 2, BubbleProfile("inner-omega2", bp.D, p.a2))]
    if bp.E > 0:
        jobs.append(("outer", rep.R4, 1, BubbleProfile("outer-omega1", bp.E, p.a1)))
    for tag, R, comp, bub in jobs:
        if R is None or rep.profile is None:
            continue
        try:
            r, scaled, om, diff, _ = compare_bubble(rep.profile, R, comp, bub)
        except ValueError:
            continue
        write_comparison_csv(out / f"comparison_{tag}_{i:02d}.csv", r, scaled, om, diff)


def cmd_verify(cfg: RunConfig) -> int:
    checks = run_acceptance(suite=Suite())
    print(format_table(checks))
    ok = all(c.passed for c in checks)
    print("all checks passed" if ok else "some checks FAILED")
    return 0 if ok else 1


COMMANDS = {"region": cmd_region, "scalar": cmd_scalar, "shoot": cmd_shoot, "sweep": cmd_sweep,
            "verify": cmd_verify}


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(ns)
        return COMMANDS[ns.command](cfg)
    except BubbleError as exc:
        print(f"csbubble {ns.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
