"""Where can bubbling solutions be built?

For each of the three Cartan couplings, report whether the construction line
is non-empty, its gamma range, and a few points on it together with the
limit constants that shape the two bubbles.
"""

from __future__ import annotations

import math

from csbubble import (
    alpha_of_gamma,
    cartan_to_params,
    junction_point,
    limit_constants,
    sigma_gamma_range,
    sigma_nonempty,
)


def main():
    for name in ("A2", "B2", "G2"):
        p = cartan_to_params(name)
        print(f"{name}: a = ({p.a1:g}, {p.a2:g}), A = {p.A:g}, B = {p.B:g}")
        if not sigma_nonempty(p):
            print("  construction line is empty (3A - 4B <= 0)\n")
            continue
        lo, hi = sigma_gamma_range(p)
        print(f"  gamma in ({lo:g}, {hi:g}{']' if math.isfinite(hi) else ')'}")
        if p.A > 2 * p.B:
            j = junction_point(p)
            print(f"  junction with the alpha1 = 1 boundary at ({j.alpha1:g}, {j.alpha2:g})")
        top = hi if math.isfinite(hi) else lo + 6
        print("   gamma   alpha1   alpha2      D      E")
        for k in range(1, 5):
            gam = lo + (top - lo) * k / 4
            e = alpha_of_gamma(p, gam)
            bp = limit_constants(p, e)
            print(f"  {gam:6.3f}  {e.alpha1:7.3f}  {e.alpha2:7.3f}  {bp.D:6.3f}  {bp.E:5.3f}")
        print()


if __name__ == "__main__":
    main()
