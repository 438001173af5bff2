"""Power weights: characteristic constants, reverse Hölder, doubling.

Run:  python3 demos/02_weights_and_ap.py
"""

from sqlab import (
    Ball,
    BallFamily,
    GridSpec,
    WeightSpec,
    ap_characteristic,
    doubling_report,
    dual_weight,
    rh_quotient,
    subset_ratio_check,
    weighted_measure,
)

grid = GridSpec(1, 4.0, 257)
w = WeightSpec.power(0.5)
family = BallFamily.dyadic(grid)
print(f"weight |x|^0.5, {len(family)} dyadic balls, family id {family.family_id}")

# The characteristic pairs the weight with its conjugate-exponent partner.
# Both factors are cell-averaged at the singular node, so the ball products
# track the closed forms: on B(0,1) the p=2 product is (2/3) * 2 = 4/3.
# At p = 1.5 the exponent 0.5 falls outside the window -1 < gamma < p - 1:
# the conjugate power |x|^(-1) is non-integrable and the product overflows.
for p in (1.5, 2.0, 3.0):
    rep = ap_characteristic(w, p, family, grid)
    dual = dual_weight(w, p)
    print(f"p={p}: admissible={w.is_admissible(p, grid.dim)}, "
          f"characteristic {rep.supremum:.6f} (overflow={rep.overflow}), "
          f"dual exponent {dual.gamma:+.4f}")

unit = Ball((0.0,), 1.0)
print(f"\nB(0,1): weighted measure {weighted_measure(w, unit, grid):.6f} "
      f"(closed form 4/3)")
print(f"reverse Hölder quotient, r=2: {rh_quotient(w, 2.0, unit, grid):.6f} "
      f"(closed form 3/(2 sqrt 2) = 1.060660)")

# Doubling: enlarging an eligible ball by 2 grows its w-measure by at most
# 2^(dim p); the report normalizes each ratio by that rate.
eligible = family.doubling_eligible(grid, 0)
sub = BallFamily(
    balls=tuple(family.balls[i] for i in eligible),
    rule_id="eligible",
    params={},
    k_max=0,
    root_index=0,
    family_id="eligible",
)
doubling = doubling_report(w, 2.0, sub, grid)
print(f"\ndoubling over {len(eligible)} eligible balls: "
      f"max ratio {doubling.max_ratio:.4f}, "
      f"max normalized {doubling.max_normalized:.4f} (must be <= 1)")

# Subset ratios: w(E)/w(B) against (|E|/|B|)^((r-1)/r) with the per-ball
# reverse Hölder constant.  Exact discretely because subsets inherit the
# ball's own quadrature weights.
from sqlab import ball_nodes

idx, _ = ball_nodes(grid, unit)
halves = [idx[: idx.size // 2], idx[idx.size // 4 : idx.size // 2], idx]
for case in subset_ratio_check(w, 2.0, unit, halves, grid):
    print(f"subset of {case.detail['subset_size']:3d} nodes: "
          f"lhs {case.lhs:.4f} <= rhs {case.rhs:.4f}  pass={case.passed}")
