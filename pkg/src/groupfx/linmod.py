"""Linear-model fitting and correlation machinery.

Everything downstream (uniform-model analytics, group effects, constrained
local regression, the simulation harness) consumes the three value types
defined here: :class:`Dataset`, :class:`OlsFit` and :class:`CorrelationMatrix`.
All operations are pure functions of their inputs; the returned objects are
immutable in spirit and safe to share across threads.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    DataFormatError,
    DimensionMismatchError,
    SingularDesignError,
    ZeroVarianceError,
)

# Designs with reciprocal condition number of X'X below this are rejected.
# Chosen to admit the near-singular r = 0.999 designs studied here while
# still refusing exact collinearity.
RCOND_MIN = 1e-12

INTERCEPT_NAME = "intercept"


@dataclass(frozen=True)
class Dataset:
    """A response vector plus named predictor columns.

    When ``has_intercept`` is true the first column of ``X`` must be the
    explicit all-ones intercept column; this keeps the intercepted model on
    the same code path as the plain one.
    """

    y: np.ndarray
    X: np.ndarray
    names: tuple[str, ...]
    has_intercept: bool = False

    def __post_init__(self):
        y = np.asarray(self.y, dtype=np.float64).reshape(-1)
        X = np.asarray(self.X, dtype=np.float64)
        if X.ndim != 2:
            raise DimensionMismatchError("X must be a 2-D array")
        if y.shape[0] != X.shape[0]:
            raise DimensionMismatchError(
                f"y has {y.shape[0]} rows but X has {X.shape[0]}"
            )
        if len(self.names) != X.shape[1]:
            raise DimensionMismatchError(
                f"{len(self.names)} names for {X.shape[1]} columns"
            )
        if not np.all(np.isfinite(y)) or not np.all(np.isfinite(X)):
            raise DataFormatError("response and predictors must be finite")
        if self.has_intercept and not np.allclose(X[:, 0], 1.0):
            raise DataFormatError("declared intercept column is not all ones")
        start = 1 if self.has_intercept else 0
        for j in range(start, X.shape[1]):
            if np.ptp(X[:, j]) == 0.0:
                raise ZeroVarianceError(
                    f"column {self.names[j]!r} is constant but not the intercept"
                )
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "names", tuple(self.names))

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def q(self) -> int:
        return self.X.shape[1]

    @classmethod
    def from_columns(cls, y, columns, names, add_intercept=True) -> "Dataset":
        """Assemble a dataset from predictor columns, optionally prepending
        the explicit intercept column."""
        cols = [np.asarray(c, dtype=np.float64).reshape(-1) for c in columns]
        names = list(names)
        if len(cols) != len(names):
            raise DimensionMismatchError("one name per column required")
        if add_intercept:
            n = len(np.asarray(y).reshape(-1))
            cols = [np.ones(n)] + cols
            names = [INTERCEPT_NAME] + names
        return cls(
            y=np.asarray(y, dtype=np.float64),
            X=np.column_stack(cols),
            names=tuple(names),
            has_intercept=add_intercept,
        )


@dataclass(frozen=True)
class OlsFit:
    """Least-squares fit: coefficients, residual variance and the unscaled
    covariance (X'X)^{-1} that every variance formula downstream consumes."""

    beta_hat: np.ndarray
    sigma2_hat: float
    xtx: np.ndarray
    xtx_inv: np.ndarray
    dof: int
    rss: float

    @property
    def cov(self) -> np.ndarray:
        """Estimated covariance of beta_hat: sigma2_hat * (X'X)^{-1}."""
        return self.sigma2_hat * self.xtx_inv

    @property
    def std_errors(self) -> np.ndarray:
        return np.sqrt(np.diag(self.cov))


@dataclass(frozen=True)
class CorrelationMatrix:
    """Pearson correlations of a predictor group, plus the centered L2 norms
    s_j of the underlying columns (the variability scales)."""

    values: np.ndarray
    column_sds: np.ndarray
    names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        R = np.asarray(self.values, dtype=np.float64)
        s = np.asarray(self.column_sds, dtype=np.float64).reshape(-1)
        if R.ndim != 2 or R.shape[0] != R.shape[1]:
            raise DimensionMismatchError("correlation matrix must be square")
        if s.shape[0] != R.shape[0]:
            raise DimensionMismatchError("one column sd per variable required")
        if not np.allclose(np.diag(R), 1.0, atol=1e-10):
            raise ValueError("correlation matrix diagonal must be 1")
        if not np.allclose(R, R.T, atol=1e-10):
            raise ValueError("correlation matrix must be symmetric")
        if np.any(np.abs(R) > 1.0 + 1e-10):
            raise ValueError("correlations must lie in [-1, 1]")
        if np.any(s <= 0.0):
            raise ZeroVarianceError("column sd-norms must be positive")
        # Exact unit diagonal and symmetry, whatever roundoff came in.
        R = 0.5 * (R + R.T)
        np.fill_diagonal(R, 1.0)
        object.__setattr__(self, "values", R)
        object.__setattr__(self, "column_sds", s)
        object.__setattr__(self, "names", tuple(self.names))

    @property
    def p(self) -> int:
        return self.values.shape[0]


def fit_ols(data: Dataset) -> OlsFit:
    """Fit ordinary least squares via QR decomposition.

    (X'X)^{-1} is formed explicitly because the group-effect variance
    formulas consume it directly.

    Raises
    ------
    SingularDesignError
        If n <= q or the reciprocal condition number of X'X falls below
        ``RCOND_MIN``.
    """
    X, y = data.X, data.y
    n, q = X.shape
    if n <= q:
        raise SingularDesignError(f"n={n} observations cannot fit q={q} parameters")

    sv = np.linalg.svd(X, compute_uv=False)
    # rcond of X'X is the squared singular-value ratio of X.
    rcond = (sv[-1] / sv[0]) ** 2 if sv[0] > 0 else 0.0
    if not np.isfinite(rcond) or rcond < RCOND_MIN:
        raise SingularDesignError(
            f"design is numerically singular (rcond of X'X = {rcond:.3e})"
        )

    Q, R = np.linalg.qr(X)
    beta = np.linalg.solve(R, Q.T @ y)
    resid = y - X @ beta
    rss = float(resid @ resid)
    dof = n - q
    sigma2 = rss / dof

    r_inv = np.linalg.solve(R, np.eye(q))
    xtx_inv = r_inv @ r_inv.T
    xtx_inv = 0.5 * (xtx_inv + xtx_inv.T)

    return OlsFit(
        beta_hat=beta,
        sigma2_hat=sigma2,
        xtx=X.T @ X,
        xtx_inv=xtx_inv,
        dof=dof,
        rss=rss,
    )


def _check_group(data: Dataset, group) -> list[int]:
    idx = [int(j) for j in group]
    if len(idx) == 0:
        raise DimensionMismatchError("group must contain at least one column")
    if len(set(idx)) != len(idx):
        raise DimensionMismatchError("group indices must be distinct")
    for j in idx:
        if j < 0 or j >= data.q:
            raise DimensionMismatchError(f"column index {j} out of range")
    return idx


def correlation(data: Dataset, group) -> CorrelationMatrix:
    """Pearson correlation matrix of the selected columns.

    The companion scales are the centered L2 norms
    s_j = ||x_j - mean(x_j)||, so the correlation is the plain ratio of
    centered cross products with no sample-size denominator.
    """
    idx = _check_group(data, group)
    cols = data.X[:, idx]
    centered = cols - cols.mean(axis=0)
    s = np.sqrt(np.sum(centered**2, axis=0))
    if np.any(s <= 0.0):
        bad = data.names[idx[int(np.argmin(s))]]
        raise ZeroVarianceError(f"column {bad!r} has zero variance")
    R = (centered.T @ centered) / np.outer(s, s)
    np.fill_diagonal(R, 1.0)
    R = np.clip(R, -1.0, 1.0)
    return CorrelationMatrix(
        values=R, column_sds=s, names=tuple(data.names[j] for j in idx)
    )


def standardize(data: Dataset, group) -> tuple[Dataset, np.ndarray]:
    """Build the standardized model for a predictor group.

    The response and every predictor column are centered (absorbing the
    intercept, which is dropped) and the group columns are additionally
    scaled to unit L2 norm. Returns the standardized dataset and the scale
    vector S of group norms, so coefficients map back as beta = S^{-1} beta'
    on the group block while all other slopes are unchanged.
    """
    if not data.has_intercept:
        raise ValueError("standardize requires an intercepted model")
    idx = _check_group(data, group)
    if 0 in idx:
        raise ValueError("the intercept column cannot be standardized")

    keep = [j for j in range(data.q) if j != 0]
    cols = data.X[:, keep]
    centered = cols - cols.mean(axis=0)
    names = [data.names[j] for j in keep]

    pos = {j: k for k, j in enumerate(keep)}
    scales = np.sqrt(np.sum(centered[:, [pos[j] for j in idx]] ** 2, axis=0))
    if np.any(scales <= 0.0):
        raise ZeroVarianceError("group column has zero variance")
    for j, s in zip(idx, scales):
        centered[:, pos[j]] /= s

    out = Dataset(
        y=data.y - data.y.mean(),
        X=centered,
        names=tuple(names),
        has_intercept=False,
    )
    return out, scales


def load_csv(path, response: str, add_intercept: bool = True) -> Dataset:
    """Read a headered CSV file into a :class:`Dataset`.

    The named response column becomes y; all remaining columns become
    predictors in file order. Missing or non-numeric cells are rejected.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if response not in header:
            raise DataFormatError(
                f"{path}: response column {response!r} not found in header"
            )
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DataFormatError(
                    f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}"
                )
            try:
                vals = [float(v) for v in row]
            except ValueError:
                raise DataFormatError(
                    f"{path}:{lineno}: missing or non-numeric value"
                ) from None
            if not all(np.isfinite(vals)):
                raise DataFormatError(f"{path}:{lineno}: non-finite value")
            rows.append(vals)
    if not rows:
        raise DataFormatError(f"{path}: no data rows")

    table = np.asarray(rows, dtype=np.float64)
    r_col = header.index(response)
    y = table[:, r_col]
    pred_idx = [j for j in range(len(header)) if j != r_col]
    return Dataset.from_columns(
        y,
        [table[:, j] for j in pred_idx],
        [header[j] for j in pred_idx],
        add_intercept=add_intercept,
    )
