"""Constrained local regression on a strongly correlated group.

The weighted group effect is the one quantity of a correlated group that is
accurately estimated, so its estimate pins the group's coefficients to a
hyperplane. This demo computes the hyperplane's minimum-norm point, explores
the sphere intersection at a larger radius, and selects a candidate by
training RSS and by 5-fold cross-validation, comparing everything against
the true coefficients (1, 2, 3). Coefficients outside the group are never
touched.

Run: python demos/constrained_local_regression.py
"""

import numpy as np

from groupfx import Dataset, SimCaseConfig, fit_ols, generate_design, solve_clr

seed = 3
config = SimCaseConfig(w1=0.85, w2=0.80, seed=seed, replicates=1)
design = generate_design(config)
eps = np.random.Generator(
    np.random.Philox(np.random.SeedSequence(seed).spawn(2)[1])
).normal(0.0, 1.0, config.n)
data = Dataset(y=design.y + eps, X=design.X, names=design.names,
               has_intercept=True)

group = [3, 4, 5]
beta_true = np.array([1.0, 2.0, 3.0])
fit = fit_ols(data)

print("=== The problem ===")
print(f"true group coefficients: {beta_true}")
print(f"raw OLS estimates:       {np.round(fit.beta_hat[group], 4)}")
print("The OLS values are far off; their standard errors exceed 2.5.")
print()

for selection in ("min-rss", "kfold"):
    sol = solve_clr(data, group, c_offset=3.0, selection=selection, seed=7)
    print(f"=== Selection strategy: {selection} ===")
    print(f"effect line: {np.round(sol.problem.w.weights, 4)} . beta = "
          f"{sol.problem.tau_hat:.4f} (se {sol.diagnostics['tau_se']:.4f})")
    print(f"minimum-norm point beta* = {np.round(sol.beta_star, 6)}  "
          f"||beta*||^2 = {sol.min_norm_sq:.4f}")
    print(f"sphere radius^2 c = {sol.c:.4f}")
    for k, cand in enumerate(sol.candidates, start=1):
        print(f"  candidate {k}: {np.round(cand, 6)}  "
              f"score {sol.diagnostics['scores'][k-1]:.4f}")
    chosen_orig = sol.signs.signs * sol.chosen
    print(f"chosen point: {np.round(chosen_orig, 6)}")
    print(f"  distance to truth: CLR {np.linalg.norm(chosen_orig - beta_true):.4f}"
          f" vs OLS {np.linalg.norm(fit.beta_hat[group] - beta_true):.4f}")
    outside = [j for j in range(data.q) if j not in group]
    assert np.array_equal(sol.full_beta[outside], fit.beta_hat[outside])
    print("  coefficients outside the group: unchanged")
    print()

print("Both strategies land an estimate dramatically closer to (1, 2, 3) "
      "than raw least squares, while leaving every other coefficient alone.")
