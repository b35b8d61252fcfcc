"""Watch the generic SU(3) bubbling solution form as eps shrinks.

Shoots the reference target along the default eps schedule and prints the
event radii, the extracted decay exponents and the blow-down misfits
against the two Liouville bubbles.  All of them should settle as eps -> 0.
"""

from __future__ import annotations

import math

from csbubble import ModelParams, geometric_schedule, solve_scalar, sweep
from csbubble.shooter import blowdown_errors


def main():
    p = ModelParams(1.0, 1.0)
    target = (1.5, 3.0)
    sol = solve_scalar(p, 3.0)
    reports = sweep(p, target, geometric_schedule(), sol.V0, workers=4)
    print("   eps    ln R1  ln R2  ln R3  ln R4   alpha1   alpha2   inner   outer  class")
    for rep in reports:
        radii = "  ".join(f"{math.log(v):5.2f}" if v else "    -" for v in list(rep.radii.values())[:4])
        err = blowdown_errors(rep)
        print(f"  {rep.eps:5.0e}  {radii}  {rep.alpha1_eps:7.4f}  {rep.alpha2_eps:7.4f}  "
              f"{err['inner']:6.1e} {err['outer']:6.1e}  {rep.classification}")
    last = reports[-1]
    print(f"\nmass of u2 on [R1, R3]: {last.mass('mass12_13'):.5f}  (limit 5)")
    print(f"mass of u1 beyond R3:   {last.mass('mass1_tail'):.5f}  (limit 1)")


if __name__ == "__main__":
    main()
