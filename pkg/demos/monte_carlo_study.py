"""Monte Carlo study of group-effect estimation under multicollinearity.

Runs the five canonical simulation cases (weak, strong and extreme within-
group correlation, unequal variability, and broken sign arrangement) with
1000 replicated responses on one fixed design per case, then prints the
per-effect means/variances and the qualitative conclusions.

Run: python demos/monte_carlo_study.py [seed]
"""

import sys

from groupfx import run_paper_suite

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0
suite = run_paper_suite(seed=seed, replicates=1000)

GROUP_EFFECTS = ("tau1", "tau2", "tau3", "tau4",
                 "tau1_w", "tau2_w", "tau3_w", "tau4_w")

DESCRIPTIONS = {
    "case1": "weak correlation (w1, w2) = (0.3, 0.4)",
    "case2": "strong correlation (0.90, 0.95)",
    "case3": "extreme correlation (0.999, 0.999)",
    "case4": "(0.99, 0.99), x2 and x5 doubled",
    "case5": "(0.90, 0.90), signs of x2 and x5 flipped",
}

for report in suite.reports:
    print(f"=== {report.label}: {DESCRIPTIONS[report.label]} ===")
    lo, hi = report.corr_ranges["g2"]
    print(f"observed within-group-2 correlations: [{lo:.3f}, {hi:.3f}]")
    print(f"{'effect':>8} {'mean':>12} {'variance':>14} {'true':>8}")
    for label in GROUP_EFFECTS:
        e = report.effect(label)
        print(f"{e.label:>8} {e.mean:12.6f} {e.variance:14.6g} {e.true_value:8.4f}")
    for label in ("beta1", "beta3", "beta6"):
        e = report.effect(label)
        print(f"{e.label:>8} {e.mean:12.6f} {e.variance:14.6g} {e.true_value:8.4f}")
    print()

print("=== Qualitative checks ===")
for check in suite.checks:
    mark = "ok " if check.passed else "FAIL"
    print(f"[{mark}] {check.name}")
    print(f"       {check.detail}")
print()
print("Reading the tables: individual coefficients of correlated variables "
      "blow up with the correlation level while their weighted group effect "
      "keeps improving; it needs the all-positive-correlations arrangement "
      "(case 5) and, unlike the plain average, survives unequal column "
      "variability (case 4). Variables outside the groups never notice.")
