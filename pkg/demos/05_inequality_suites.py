"""Inequality suites at small scale, ending in a reproducible report.

Each suite turns one claim into a list of cases with an explicit lhs,
rhs, constant, and constant provenance, so a failure names the exact
instance that broke rather than a summary statistic.
"""

import pathlib
import tempfile

from sqlab import (
    Ball,
    BallFamily,
    GridSpec,
    HolderClassSpec,
    MorreyParams,
    TestFamilySpec,
    TimeLadder,
    WeightSpec,
    bmo_growth_suite,
    boundedness_suite,
    digest_of,
    emit_report,
    gstar_domination_suite,
    holder_average_suite,
    step_field,
    subset_doubling_suite,
)

grid = GridSpec(1, 4.0, 129)
ladder = TimeLadder(grid.spacing, 2.0, 6)
kspec = HolderClassSpec(0.5, 33, "dictionary")
family = TestFamilySpec("bumps", 6, 11)
weight = WeightSpec.power(0.5)
morrey = MorreyParams(2.0, 0.5)
balls = BallFamily.dyadic(grid, levels=5)
base = Ball((0.0,), 0.125)

suites = [
    boundedness_suite("s_alpha", family, weight, morrey, balls, kspec,
                      ladder, grid, refine=False),
    gstar_domination_suite(family, kspec, ladder, grid,
                           lam=4.0, region_levels=4),
    bmo_growth_suite(step_field(grid), base, 3, grid),
    holder_average_suite(family, weight, morrey, balls, base, 3, grid),
    subset_doubling_suite(weight, 2.0, 2.0, balls, grid),
]

print(f"{'suite':<24} {'cases':>5}  {'max ratio':>9}  verdict")
for s in suites:
    summ = s.summary()
    verdict = "pass" if summ["pass"] else "FAIL"
    print(f"{s.suite:<24} {len(s.cases):>5}  {summ['max_ratio']:>9.3g}  {verdict}")
print("(max ratio 0 marks violation-style gates: lhs is the worst violation")
print(" against rhs 0, so any passing run scores exactly 0)")

# A ratio near 1 means the case nearly saturates its bound; the provenance
# string names where the constant comes from.
tightest = max((c for s in suites for c in s.cases), key=lambda c: c.ratio)
print(f"\ntightest case: {tightest.check}")
print(f"  lhs {tightest.lhs:.6f} <= rhs {tightest.rhs:.6f} "
      f"(ratio {tightest.ratio:.4f})")
print(f"  constant {tightest.constant:g}, from: {tightest.constant_provenance}")

out_dir = pathlib.Path(tempfile.mkdtemp())
report = emit_report(suites, out_dir, digest_of({"demo": "suites"}))
print(f"\nreport in {out_dir}: {report['summary']['total_cases']} cases "
      f"across {report['summary']['total_suites']} suites, "
      f"pass = {report['summary']['pass']}")
print("summary.csv:")
print((out_dir / "summary.csv").read_text().rstrip())
