"""Group effects for strongly correlated predictors.

Covers the sign arrangement that turns a strongly correlated group into an
all-positive-correlations (APC) configuration, construction of the
variability-weighted effect, estimation of arbitrary weighted effects with
exact variances and t tests, the eigendecomposition form of an effect
variance, and the exhaustive-sign quadratic search for the minimum-variance
normalized effect.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc

from .exceptions import (
    ConvergenceError,
    DimensionMismatchError,
    GroupTooLargeError,
    ZeroVarianceError,
)
from .linmod import CorrelationMatrix, OlsFit

# Minimum |correlation| with the anchor variable that guarantees an APC
# arrangement exists (cos of a 45-degree half-angle cone).
APC_THRESHOLD = math.sqrt(2.0) / 2.0

# Exhaustive sign enumeration is capped at 2^(p-1) subproblems.
MAX_OPTIMAL_GROUP = 20

_WEIGHT_TOL = 1e-10


@dataclass(frozen=True)
class WeightVector:
    """Effect weights together with their normalization regime.

    ``simplex``: weights sum to 1 and are nonnegative (proper averages);
    ``signed_l1``: absolute weights sum to 1 (normalized effects);
    ``raw``: no constraint.
    """

    weights: np.ndarray
    regime: str = "simplex"

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64).reshape(-1)
        if w.size == 0 or not np.all(np.isfinite(w)):
            raise DimensionMismatchError("weights must be a non-empty finite vector")
        if self.regime == "simplex":
            if np.any(w < -_WEIGHT_TOL) or abs(w.sum() - 1.0) > _WEIGHT_TOL:
                raise ValueError("simplex weights must be nonnegative and sum to 1")
        elif self.regime == "signed_l1":
            if abs(np.abs(w).sum() - 1.0) > _WEIGHT_TOL:
                raise ValueError("signed_l1 weights must have absolute sum 1")
        elif self.regime != "raw":
            raise ValueError(f"unknown weight regime {self.regime!r}")
        object.__setattr__(self, "weights", w)

    @property
    def p(self) -> int:
        return self.weights.shape[0]

    @classmethod
    def average(cls, p: int) -> "WeightVector":
        """The equal-weight vector (1/p, ..., 1/p)."""
        return cls(np.full(p, 1.0 / p), "simplex")

    @classmethod
    def basis(cls, p: int, j: int) -> "WeightVector":
        """The j-th unit basis vector (an individual effect)."""
        w = np.zeros(p)
        w[j] = 1.0
        return cls(w, "simplex")


@dataclass(frozen=True)
class SignArrangement:
    """A choice of +-1 signs for the group's variables. The first entry is
    +1 by convention: the two globally flipped APC sets are equivalent."""

    signs: np.ndarray
    condition_met: bool = True
    anchor: int = 0

    def __post_init__(self):
        s = np.asarray(self.signs, dtype=np.float64).reshape(-1)
        if not np.all(np.isin(s, (-1.0, 1.0))):
            raise ValueError("signs must be +1 or -1")
        if s[0] != 1.0:
            raise ValueError("first sign must be +1 by convention")
        object.__setattr__(self, "signs", s)

    @property
    def p(self) -> int:
        return self.signs.shape[0]

    @classmethod
    def all_positive(cls, p: int) -> "SignArrangement":
        return cls(np.ones(p))


@dataclass(frozen=True)
class EffectEstimate:
    """Point estimate of a group effect with its exact standard error and a
    two-sided t test against zero."""

    value: float
    variance: float
    std_error: float
    t_stat: float
    p_value: float
    dof: int


def t_sf_two_sided(t: float, dof: int) -> float:
    """Two-sided tail probability P(|T| > |t|) for Student's t.

    Evaluated through the regularized incomplete beta function:
    I_x(dof/2, 1/2) with x = dof / (dof + t^2).
    """
    if dof <= 0:
        raise ValueError("degrees of freedom must be positive")
    if not np.isfinite(t):
        return 0.0
    if t == 0.0:
        return 1.0
    x = dof / (dof + t * t)
    return float(betainc(0.5 * dof, 0.5, x))


def check_apc_condition(corr: CorrelationMatrix, anchor: int = 0) -> bool:
    """True when every other variable's |correlation| with the anchor exceeds
    sqrt(2)/2, which guarantees an APC arrangement exists."""
    p = corr.p
    if anchor < 0 or anchor >= p:
        raise DimensionMismatchError(f"anchor {anchor} out of range for p={p}")
    others = np.abs(np.delete(corr.values[anchor], anchor))
    return bool(np.all(others > APC_THRESHOLD))


def _anchor_score(corr: CorrelationMatrix, anchor: int) -> float:
    return float(np.min(np.abs(np.delete(corr.values[anchor], anchor))))


def apc_arrangement(corr: CorrelationMatrix, anchor: int | None = None) -> SignArrangement:
    """Sign arrangement that makes the group's correlations all positive.

    Signs follow the anchor variable: sgn(corr(anchor, j)) for each j, with
    zero correlations kept at +1 and the whole vector flipped if needed so
    the first entry is +1. When no anchor is given, the first variable is
    used if it satisfies the APC condition, otherwise the first satisfying
    anchor; if none qualifies, the anchor with the largest worst-case
    |correlation| is used and ``condition_met`` is False (the result is then
    not guaranteed to be APC).
    """
    p = corr.p
    if p < 2:
        raise DimensionMismatchError("a group needs at least two variables")

    if anchor is None:
        candidates = [a for a in range(p) if check_apc_condition(corr, a)]
        if candidates:
            chosen = candidates[0] if 0 not in candidates else 0
        else:
            chosen = max(range(p), key=lambda a: _anchor_score(corr, a))
        failure = "APC condition fails for every anchor"
    else:
        chosen = int(anchor)
        if chosen < 0 or chosen >= p:
            raise DimensionMismatchError(f"anchor {chosen} out of range for p={p}")
        failure = f"APC condition fails for anchor {chosen}"

    met = check_apc_condition(corr, chosen)
    if not met:
        warnings.warn(
            f"{failure}; returned arrangement is not guaranteed to make "
            "all correlations positive",
            stacklevel=2,
        )

    row = corr.values[chosen]
    signs = np.where(row < 0.0, -1.0, 1.0)
    signs[chosen] = 1.0
    if signs[0] < 0:
        signs = -signs
    return SignArrangement(signs=signs, condition_met=met, anchor=chosen)


def variability_weights(corr: CorrelationMatrix) -> WeightVector:
    """Simplex weights proportional to each column's centered L2 norm:
    w_j = s_j / sum(s_i). Equal variability reduces to the equal-weight
    vector."""
    s = corr.column_sds
    if np.any(s <= 0.0):
        raise ZeroVarianceError("column sd-norms must be positive")
    return WeightVector(s / s.sum(), "simplex")


def estimate_effect(
    fit: OlsFit,
    group,
    w: WeightVector,
    signs: SignArrangement | None = None,
) -> EffectEstimate:
    """Estimate the group effect sum_i signs_i w_i beta_{group(i)}.

    The variance is the exact quadratic form of the signed weights over the
    group block of sigma2_hat * (X'X)^{-1}; the p-value is a two-sided t
    test on the fit's residual degrees of freedom.
    """
    idx = [int(j) for j in group]
    q = fit.beta_hat.shape[0]
    for j in idx:
        if j < 0 or j >= q:
            raise DimensionMismatchError(f"group index {j} out of range")
    wv = np.asarray(getattr(w, "weights", w), dtype=np.float64).reshape(-1)
    if wv.shape[0] != len(idx):
        raise DimensionMismatchError(
            f"{wv.shape[0]} weights for a group of {len(idx)}"
        )
    if signs is None:
        sv = np.ones(len(idx))
    else:
        sv = signs.signs
        if sv.shape[0] != len(idx):
            raise DimensionMismatchError("sign arrangement does not match group size")

    wt = sv * wv
    value = float(wt @ fit.beta_hat[idx])
    cov_block = fit.cov[np.ix_(idx, idx)]
    variance = max(float(wt @ cov_block @ wt), 0.0)
    se = math.sqrt(variance)
    if se > 0.0:
        t = value / se
        p = t_sf_two_sided(t, fit.dof)
    else:
        # degenerate zero-variance fit (e.g. noiseless data)
        t = math.copysign(math.inf, value) if value != 0.0 else 0.0
        p = 0.0 if value != 0.0 else 1.0
    return EffectEstimate(
        value=value, variance=variance, std_error=se, t_stat=float(t),
        p_value=float(p), dof=fit.dof,
    )


def silvey_variance(fit: OlsFit, c) -> tuple[float, np.ndarray, np.ndarray]:
    """Effect variance through the eigensystem of X'X.

    Decomposes c over the orthonormal eigenvectors of X'X (eigenvalues
    lambda_1 >= ... >= lambda_q) and returns
    (sigma2_hat * sum alpha_i^2 / lambda_i, alphas, lambdas); identical to
    the direct quadratic form c' cov c, but exposing which directions make
    the effect hard to estimate.
    """
    c = np.asarray(c, dtype=np.float64).reshape(-1)
    q = fit.xtx.shape[0]
    if c.shape[0] != q:
        raise DimensionMismatchError(f"expected a length-{q} coefficient vector")
    try:
        lam, V = np.linalg.eigh(fit.xtx)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigendecomposition failed: {exc}") from exc
    order = np.argsort(lam)[::-1]
    lam = lam[order]
    V = V[:, order]
    if lam[-1] <= 0.0:
        raise ConvergenceError("X'X is not positive definite")
    alphas = V.T @ c
    variance = float(fit.sigma2_hat * np.sum(alphas**2 / lam))
    return variance, alphas, lam


def project_to_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex
    {u : u_i >= 0, sum u_i = 1}."""
    v = np.asarray(v, dtype=np.float64).reshape(-1)
    u = np.sort(v)[::-1]
    cssv = np.cumsum(u) - 1.0
    ind = np.arange(1, v.size + 1)
    rho = ind[u - cssv / ind > 0][-1]
    theta = cssv[rho - 1] / rho
    return np.maximum(v - theta, 0.0)


def _minimize_orthant(M: np.ndarray, u0: np.ndarray | None = None,
                      tol: float = 1e-10, max_iter: int = 100_000) -> np.ndarray:
    """Minimize u' M u over the probability simplex by projected gradient
    with fixed step 1/L, L the largest eigenvalue of the objective Hessian."""
    p = M.shape[0]
    lmax = float(np.linalg.eigvalsh(M)[-1])
    if lmax <= 0.0:
        raise ConvergenceError("orthant matrix is not positive definite")
    step = 1.0 / (2.0 * lmax)
    u = np.full(p, 1.0 / p) if u0 is None else u0.copy()
    for _ in range(max_iter):
        u_next = project_to_simplex(u - step * 2.0 * (M @ u))
        if np.max(np.abs(u_next - u)) < tol:
            return u_next
        u = u_next
    raise ConvergenceError(
        f"projected gradient did not converge within {max_iter} iterations"
    )


def optimal_effect(fit: OlsFit, group) -> tuple[SignArrangement, WeightVector, float]:
    """Minimum-variance normalized group effect by exhaustive sign search.

    With the first sign fixed at +1 (a global flip leaves the variance
    unchanged), each of the 2^(p-1) sign arrangements poses a convex
    quadratic program over the simplex, solved by projected gradient. The
    winner is returned as (signs, simplex weights, estimator variance), with
    ties broken toward the lexicographically smallest sign vector.
    """
    idx = [int(j) for j in group]
    p = len(idx)
    if p < 1:
        raise DimensionMismatchError("group must contain at least one column")
    if p > MAX_OPTIMAL_GROUP:
        raise GroupTooLargeError(
            f"group size {p} exceeds the 2^p enumeration bound ({MAX_OPTIMAL_GROUP})"
        )
    q = fit.beta_hat.shape[0]
    for j in idx:
        if j < 0 or j >= q:
            raise DimensionMismatchError(f"group index {j} out of range")

    A = fit.xtx_inv[np.ix_(idx, idx)]
    best = None
    for tail in itertools.product((-1.0, 1.0), repeat=p - 1):
        s = np.array((1.0,) + tail)
        M = A * np.outer(s, s)
        u = _minimize_orthant(M)
        val = float(u @ M @ u)
        if best is None or val < best[0]:
            best = (val, s, u)

    val, s, u = best
    return (
        SignArrangement(signs=s),
        WeightVector(u, "simplex"),
        fit.sigma2_hat * val,
    )


def detect_groups(corr: CorrelationMatrix, threshold: float = APC_THRESHOLD):
    """Connected components of the |correlation| > threshold graph, as lists
    of indices into the correlation matrix. Singletons are included."""
    p = corr.p
    adj = np.abs(corr.values) > threshold
    seen = [False] * p
    groups = []
    for start in range(p):
        if seen[start]:
            continue
        comp, stack = [], [start]
        seen[start] = True
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in range(p):
                if j != i and adj[i, j] and not seen[j]:
                    seen[j] = True
                    stack.append(j)
        groups.append(sorted(comp))
    return groups
