"""Group-effect analysis of a dataset with strongly correlated predictors.

Builds a 15-observation dataset with two correlated predictor groups, shows
that the individual coefficients of the correlated groups are useless, then
estimates the variability-weighted group effects under the APC arrangement
and compares them with the exhaustive-search optimal effect.

Run: python demos/group_effects_analysis.py
"""

import numpy as np

from groupfx import (
    Dataset,
    SimCaseConfig,
    WeightVector,
    apc_arrangement,
    check_apc_condition,
    correlation,
    detect_groups,
    estimate_effect,
    fit_ols,
    generate_design,
    optimal_effect,
    variability_weights,
)

# One draw of the mixing design: groups {x1,x2} and {x3,x4,x5} are strongly
# correlated, x6..x10 independent; true coefficients (5,0,0,1,2,3,1,1,1,2,3).
seed = 3
config = SimCaseConfig(w1=0.85, w2=0.80, seed=seed, replicates=1)
design = generate_design(config)
eps = np.random.Generator(
    np.random.Philox(np.random.SeedSequence(seed).spawn(2)[1])
).normal(0.0, 1.0, config.n)
data = Dataset(y=design.y + eps, X=design.X, names=design.names,
               has_intercept=True)

fit = fit_ols(data)

print("=== Individual coefficients (n=15, 10 predictors) ===")
print(f"{'effect':>10} {'estimate':>10} {'std err':>9} {'t':>8} {'p':>9}")
for j in range(data.q):
    est = estimate_effect(fit, [j], WeightVector.basis(1, 0))
    print(f"{data.names[j]:>10} {est.value:10.4f} {est.std_error:9.4f} "
          f"{est.t_stat:8.3f} {est.p_value:9.6f}")
print()
print("Groups 1 and 2 carry huge standard errors; nothing in them looks "
      "significant even though the true beta3..beta5 are (1, 2, 3).")
print()

print("=== Automatic group detection (|corr| > sqrt(2)/2) ===")
corr_all = correlation(data, list(range(1, data.q)))
groups = [g for g in detect_groups(corr_all) if len(g) > 1]
print("correlated groups:",
      [[corr_all.names[i] for i in g] for g in groups])
print()

print("=== Weighted group effects under the APC arrangement ===")
for group in ([1, 2], [3, 4, 5]):
    names = [data.names[j] for j in group]
    corr = correlation(data, group)
    print(f"group {names}: APC condition met = "
          f"{check_apc_condition(corr, 0)}")
    signs = apc_arrangement(corr)
    w_w = variability_weights(corr)
    tau = estimate_effect(fit, group, w_w, signs)
    print(f"  weights  {np.round(w_w.weights, 4)}")
    print(f"  tau_w    {tau.value:8.4f}  se {tau.std_error:7.4f}  "
          f"t {tau.t_stat:7.3f}  p {tau.p_value:9.6f}")
print()
print("The weighted effect of group 2 is estimated with a standard error "
      "an order of magnitude below the individual coefficients', and its "
      "tiny p-value correctly flags a nonzero group.")
print()

print("=== Exhaustive-sign optimal effect vs the weighted effect ===")
group = [3, 4, 5]
corr = correlation(data, group)
signs_star, w_star, var_star = optimal_effect(fit, group)
w_w = variability_weights(corr)
var_w = estimate_effect(fit, group, w_w, apc_arrangement(corr)).variance
print(f"optimal signs   {signs_star.signs}")
print(f"optimal weights {np.round(w_star.weights, 4)} -> variance {var_star:.6f}")
print(f"tau_w weights   {np.round(w_w.weights, 4)} -> variance {var_w:.6f}")
print(f"max weight gap  {np.max(np.abs(w_star.weights - w_w.weights)):.4f}")
print()
print("On a strongly correlated APC group the cheap variability weighting "
      "is near-optimal; the exhaustive search buys almost nothing.")
