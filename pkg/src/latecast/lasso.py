"""Penalized long-run regression with a BIC-selected penalty.

Estimates the log-level relation between the target and its peers by
minimizing

    (1/K) * sum_t w_t * (y_t - x_t' beta)^2  +  lam * sum_j |beta_j|

where K is the number of window rows (not the total weight mass).  The
solver is cyclic coordinate descent with covariance updates over a
geometric penalty path with warm starts; the reported fit is the path
entry with minimal BIC.  Under this loss scaling the coordinate update
soft-thresholds at lam/2:

    beta_j <- S((c_j - (G beta)_j + G_jj beta_j) / K, lam/2) / (G_jj / K)

with G = X'WX and c = X'Wy.  With standardization on (the default) the
problem is solved in scaled coordinates where G_jj/K = 1 and mapped
back, so the penalty treats peers symmetrically regardless of units.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, EstimationError


@dataclass
class LassoConfig:
    """Solver controls.

    ``tol`` bounds the largest absolute coefficient update in one sweep
    (in solving coordinates); ``check_objective`` turns on a per-sweep
    assertion that the objective never increases, for debugging.
    """

    n_lambdas: int = 100
    lambda_min_ratio: float = 1e-4
    tol: float = 1e-8
    max_iter: int = 10000
    standardize: bool = True
    intercept: bool = False
    check_objective: bool = False

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.n_lambdas < 2:
            raise ValueError("n_lambdas must be >= 2")
        if self.lambda_min_ratio <= 0 or self.lambda_min_ratio >= 1:
            raise ValueError("lambda_min_ratio must be in (0, 1)")


@dataclass
class LassoFit:
    """Selected long-run fit: coefficients, support, and the search path."""

    beta: np.ndarray
    support: tuple[int, ...]
    lambda_: float
    bic: float
    residuals: np.ndarray
    path: list[tuple[float, np.ndarray, float]] = field(repr=False, default_factory=list)
    intercept_: float = 0.0

    def to_json(self, peer_names: list[str] | None = None) -> dict:
        names = (
            [peer_names[j] for j in self.support]
            if peer_names is not None
            else list(self.support)
        )
        return {
            "beta": [float(b) for b in self.beta],
            "support": names,
            "lambda": float(self.lambda_),
            "bic": float(self.bic),
            "intercept": float(self.intercept_),
        }


def soft_threshold(z: float, gamma: float) -> float:
    """sign(z) * max(|z| - gamma, 0)."""
    if z > gamma:
        return z - gamma
    if z < -gamma:
        return z + gamma
    return 0.0


class _Prepared:
    """Validated problem in solving coordinates, with Gram caches."""

    __slots__ = ("Xs", "ys", "scales", "active", "x_means", "y_mean",
                 "G", "c", "yWy", "K", "p")

    def __init__(self, y, X, weights, config: LassoConfig):
        y = np.asarray(y, dtype=float)
        X = np.asarray(X, dtype=float)
        w = np.asarray(weights, dtype=float)
        if X.ndim != 2:
            raise ValueError("X must be a 2-d matrix")
        K, p = X.shape
        if y.shape != (K,):
            raise ValueError(f"y has length {y.shape}, X has {K} rows")
        if w.shape != (K,):
            raise ValueError(f"weights has length {w.shape}, X has {K} rows")
        if np.any(w <= 0):
            raise ValueError("weights must be strictly positive")

        if config.intercept:
            wsum = w.sum()
            self.x_means = (w @ X) / wsum
            self.y_mean = float(w @ y) / wsum
            Xc = X - self.x_means
            yc = y - self.y_mean
        else:
            self.x_means = np.zeros(p)
            self.y_mean = 0.0
            Xc = X
            yc = y

        col_mass = np.einsum("t,tj,tj->j", w, Xc, Xc)
        self.active = col_mass > 0.0
        if config.standardize:
            self.scales = np.where(self.active, np.sqrt(col_mass / K), 1.0)
        else:
            self.scales = np.ones(p)
        self.Xs = Xc / self.scales
        self.ys = yc
        self.G = self.Xs.T @ (w[:, None] * self.Xs)
        self.c = self.Xs.T @ (w * yc)
        self.yWy = float(w @ (yc * yc))
        self.K = K
        self.p = p

    def to_solving(self, beta: np.ndarray) -> np.ndarray:
        b = np.asarray(beta, dtype=float) * self.scales
        b[~self.active] = 0.0
        return b

    def to_original(self, beta_s: np.ndarray) -> np.ndarray:
        return beta_s / self.scales

    def objective(self, beta_s: np.ndarray, lam: float) -> float:
        quad = beta_s @ self.G @ beta_s - 2.0 * (self.c @ beta_s) + self.yWy
        return quad / self.K + lam * np.abs(beta_s).sum()

    def gradient(self, beta_s: np.ndarray) -> np.ndarray:
        return (2.0 / self.K) * (self.G @ beta_s - self.c)


def _try_exact_jump(prep: _Prepared, lam: float, beta: np.ndarray,
                    Gbeta: np.ndarray) -> bool:
    """Jump to the exact minimizer on the current support, if admissible.

    On a fixed support with fixed signs the optimality conditions are a
    linear system; solving it sidesteps the slow crawl coordinate
    descent suffers on near-collinear columns.  The jump is taken only
    when the solution keeps the assumed signs and does not push the
    objective uphill beyond rounding; ties are accepted because on flat
    valleys the iterate can differ from the minimizer by far more than
    the objective can resolve.  If the true support is larger, later
    sweeps pull the missing column in and a later jump solves the
    enlarged system.  Convergence is still declared by the sweep
    criterion.
    """
    S = np.flatnonzero(beta)
    if S.size == 0:
        return False
    signs = np.sign(beta[S])
    sol = None
    for _ in range(S.size):
        A = prep.G[np.ix_(S, S)] / prep.K
        rhs = prep.c[S] / prep.K - (lam / 2.0) * signs
        sol, *_ = np.linalg.lstsq(A, rhs, rcond=None)
        if lam == 0.0:
            break
        keep = np.sign(sol) == signs
        if keep.all():
            break
        if not keep.any():
            return False
        S, signs = S[keep], signs[keep]
    else:
        return False
    cand = np.zeros_like(beta)
    cand[S] = sol
    cur = prep.objective(beta, lam)
    if prep.objective(cand, lam) > cur + 1e-12 * max(1.0, abs(cur)):
        return False
    beta[:] = cand
    Gbeta[:] = prep.G @ beta
    return True


def _cd_solve(prep: _Prepared, lam: float, beta0_s: np.ndarray,
              config: LassoConfig) -> tuple[np.ndarray, int]:
    """Cyclic coordinate descent from a warm start, in solving coordinates."""
    beta = beta0_s.copy()
    Gbeta = prep.G @ beta
    diag = np.diag(prep.G)
    idx = np.flatnonzero(prep.active)
    half_lam = lam / 2.0
    prev_obj = prep.objective(beta, lam) if config.check_objective else None
    stall_ref = None

    for it in range(1, config.max_iter + 1):
        if (it - 1) % 5 == 0:
            _try_exact_jump(prep, lam, beta, Gbeta)
        max_delta = 0.0
        for j in idx:
            gjj = diag[j] / prep.K
            rho = (prep.c[j] - Gbeta[j] + diag[j] * beta[j]) / prep.K
            new = soft_threshold(rho, half_lam) / gjj
            d = new - beta[j]
            if d != 0.0:
                Gbeta += prep.G[:, j] * d
                beta[j] = new
                if abs(d) > max_delta:
                    max_delta = abs(d)
        if config.check_objective:
            obj = prep.objective(beta, lam)
            assert obj <= prev_obj + 1e-12 * max(1.0, abs(prev_obj)), (
                f"objective rose {prev_obj} -> {obj} at sweep {it}"
            )
            prev_obj = obj
        if max_delta < config.tol:
            return beta, it
        if it % 5 == 0:
            # Near-duplicate columns form a flat valley where the sweep
            # criterion is unreachable: mass shuffles between the twins
            # at a constant rate while the objective is done moving.
            # When five sweeps bring no real decay of the update size
            # and the iterate already certifies optimality at half the
            # advertised KKT tolerance, the crawl is pure bookkeeping
            # and the iterate is the answer.
            if stall_ref is not None and max_delta > 0.5 * stall_ref:
                if _kkt_gap(prep, beta, lam) <= 5e-7:
                    return beta, it
            stall_ref = max_delta

    gap = _kkt_gap(prep, beta, lam)
    raise ConvergenceError(
        f"coordinate descent did not converge in {config.max_iter} sweeps "
        f"(last max update {max_delta:.3e}, KKT gap {gap:.3e})",
        last_beta=prep.to_original(beta),
        gap=gap,
    )


def _kkt_gap(prep: _Prepared, beta_s: np.ndarray, lam: float) -> float:
    grad = prep.gradient(beta_s)
    worst = 0.0
    for j in np.flatnonzero(prep.active):
        if beta_s[j] != 0.0:
            v = abs(grad[j] + lam * math.copysign(1.0, beta_s[j]))
        else:
            v = max(0.0, abs(grad[j]) - lam)
        if v > worst:
            worst = v
    return worst


def fit_lasso(y, X, weights, lam: float, config: LassoConfig | None = None,
              beta0=None) -> tuple[np.ndarray, int]:
    """Solve the weighted problem at one penalty value.

    Parameters
    ----------
    lam : float
        Penalty. Must be non-negative; 0 gives weighted least squares.
    beta0 : array, optional
        Warm start in original coordinates.

    Returns
    -------
    (beta, iterations)
        Coefficients in original coordinates and the sweep count.
        Convergence normally means the largest coefficient update of a
        sweep fell below ``config.tol``; on designs with near-duplicate
        columns, where that criterion is unreachable, the solver instead
        returns the iterate once progress has stalled and its KKT
        residual is below half the documented 1e-6 tolerance.

    Raises
    ------
    ConvergenceError
        If ``config.max_iter`` sweeps do not reach either criterion; the
        error carries the last iterate and a KKT residual as gap proxy.
    """
    if lam < 0:
        raise ValueError("lam must be non-negative")
    config = config or LassoConfig()
    prep = _Prepared(y, X, weights, config)
    beta0_s = (prep.to_solving(beta0) if beta0 is not None
               else np.zeros(prep.p))
    beta_s, iters = _cd_solve(prep, lam, beta0_s, config)
    return prep.to_original(beta_s), iters


def lambda_path(y, X, weights, config: LassoConfig | None = None) -> np.ndarray:
    """Geometric penalty grid from the all-zero point downward.

    The first entry is the smallest penalty whose solution is the zero
    vector, ``max_j (2/K) |[X'Wy]_j|`` in solving coordinates; the grid
    decays geometrically to ``lambda_min_ratio`` times that.
    """
    config = config or LassoConfig()
    prep = _Prepared(y, X, weights, config)
    if not prep.active.any():
        raise EstimationError(
            "design matrix has no usable column (all columns are "
            "constant or zero under the given weights)"
        )
    lam_max = float(np.max(2.0 * np.abs(prep.c[prep.active]) / prep.K))
    if lam_max <= 0.0:
        # response orthogonal to every column: any penalty gives the
        # zero solution, so the grid anchor is arbitrary
        lam_max = 1.0
    return np.geomspace(lam_max, lam_max * config.lambda_min_ratio,
                        config.n_lambdas)


def bic(y, X, weights, beta, intercept: float | None = None) -> float:
    """K * ln(RSS_w / K) + df * ln(K).

    ``RSS_w`` is the weighted residual sum of squares, ``df`` the number
    of nonzero coefficients (plus one when an intercept was fitted), and
    ``K`` the row count.  The weights enter only through RSS_w: the
    emphasis scheme duplicates information rather than adding it, so the
    sample size stays K.
    """
    y = np.asarray(y, dtype=float)
    X = np.asarray(X, dtype=float)
    w = np.asarray(weights, dtype=float)
    beta = np.asarray(beta, dtype=float)
    K = len(y)
    fitted = X @ beta
    if intercept is not None:
        fitted = fitted + intercept
    resid = y - fitted
    rss = float(w @ (resid * resid))
    df = int(np.count_nonzero(beta)) + (1 if intercept is not None else 0)
    if rss <= 0.0:
        warnings.warn("perfect fit: weighted RSS is zero, BIC is -inf",
                      RuntimeWarning, stacklevel=2)
        return -math.inf
    return K * math.log(rss / K) + df * math.log(K)


def _argmin_bic(bics) -> int:
    """Index of the smallest BIC; ties go to the earliest entry.

    Paths run from large penalties to small, so the earliest tied entry
    is the sparser model.
    """
    best = 0
    for i in range(1, len(bics)):
        if bics[i] < bics[best]:
            best = i
    return best


def select_by_bic(y, X, weights, config: LassoConfig | None = None) -> LassoFit:
    """Fit the full penalty path and keep the BIC-minimal entry."""
    config = config or LassoConfig()
    lams = lambda_path(y, X, weights, config)
    prep = _Prepared(y, X, weights, config)
    y = np.asarray(y, dtype=float)
    X = np.asarray(X, dtype=float)

    path: list[tuple[float, np.ndarray, float]] = []
    beta_s = np.zeros(prep.p)
    for lam in lams:
        beta_s, _ = _cd_solve(prep, float(lam), beta_s, config)
        beta = prep.to_original(beta_s)
        icept = (prep.y_mean - float(prep.x_means @ beta)
                 if config.intercept else None)
        b = bic(y, X, weights, beta, intercept=icept)
        path.append((float(lam), beta, b))

    k = _argmin_bic([b for _, _, b in path])
    lam, beta, best_bic = path[k]
    icept = (prep.y_mean - float(prep.x_means @ beta)
             if config.intercept else 0.0)
    fitted = X @ beta + icept
    return LassoFit(
        beta=beta,
        support=tuple(int(j) for j in np.flatnonzero(beta)),
        lambda_=lam,
        bic=best_bic,
        residuals=y - fitted,
        path=path,
        intercept_=icept,
    )


def kkt_violation(y, X, weights, beta, lam: float,
                  config: LassoConfig | None = None) -> float:
    """Largest optimality violation of ``beta``, in solving coordinates.

    Zero (up to tolerance) iff ``beta`` solves the problem at ``lam``:
    on-support gradients must equal -lam * sign(beta_j), off-support
    gradients must not exceed lam in magnitude.
    """
    config = config or LassoConfig()
    prep = _Prepared(y, X, weights, config)
    return _kkt_gap(prep, prep.to_solving(np.asarray(beta, float)), lam)
