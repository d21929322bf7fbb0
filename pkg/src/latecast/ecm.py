"""Error-correction step, recursive forecasts, and simulated bands.

Given the long-run coefficients beta from the penalized first step, the
second step regresses the target's daily log change on the selected
peers' log changes and the lagged equilibrium gap:

    dy_t = dx_t' pi + gamma * (y_{t-1} - x_{t-1}' beta) + u_t

by weighted least squares on the rolling window.  Log forecasts then
follow the recursion

    yhat_{T+h} = dx_{T+h}' pi - gamma * x_{T+h-1}' beta
                 + (1 + gamma) * yhat_{T+h-1}

where the peer values are observed (peers are ahead on the epidemic-age
scale), and level forecasts multiply exp(yhat) by a smearing factor
alpha, the window mean of exp(u), to undo the log-transform bias.
Confidence bands come from re-running the recursion with normal shocks.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .align import AlignedPanel
from .errors import EstimationError, ForecastError
from .lasso import LassoFit


@dataclass
class EcmFit:
    """Second-step estimates on the selected peers.

    ``support`` indexes columns of the panel's peer matrix; ``beta`` and
    ``pi`` are restricted to those columns.  ``fitted_log`` holds the
    in-sample one-step fitted log levels over the regression rows and
    ``residuals_u`` the matching residuals, so the bias correction
    ``alpha`` can be recomputed as the plain mean of exp(residuals_u).
    """

    support: tuple[int, ...]
    peer_names: tuple[str, ...]
    beta: np.ndarray
    pi: np.ndarray
    gamma: float
    sigma2: float
    alpha: float
    window: int
    fitted_log: np.ndarray
    residuals_u: np.ndarray
    fallback: bool = False

    def to_json(self) -> dict:
        return {
            "support": list(self.peer_names),
            "beta": {n: float(b) for n, b in zip(self.peer_names, self.beta)},
            "pi": {n: float(v) for n, v in zip(self.peer_names, self.pi)},
            "gamma": float(self.gamma),
            "sigma2": float(self.sigma2),
            "alpha": float(self.alpha),
            "window": int(self.window),
            "fallback": bool(self.fallback),
        }


@dataclass
class ForecastPath:
    """Point forecasts and simulated band endpoints, horizons 1..H."""

    horizons: np.ndarray
    y_hat: np.ndarray
    level_hat: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    level_median: np.ndarray
    new_hat: np.ndarray
    new_lower: np.ndarray
    new_upper: np.ndarray
    rate_hat: np.ndarray
    rate_lower: np.ndarray
    rate_upper: np.ndarray
    n_sims: int
    seed: int
    confidence: float

    def to_json(self) -> dict:
        out = {
            "horizons": [int(h) for h in self.horizons],
            "n_sims": int(self.n_sims),
            "seed": int(self.seed),
            "confidence": float(self.confidence),
        }
        for name in ("y_hat", "level_hat", "lower", "upper", "level_median",
                     "new_hat", "new_lower", "new_upper",
                     "rate_hat", "rate_lower", "rate_upper"):
            out[name] = [float(v) for v in getattr(self, name)]
        return out


def weighted_least_squares(y, X, weights) -> tuple[np.ndarray, list[int]]:
    """WLS coefficients with collinear columns dropped.

    Solves min_b sum_t w_t (y_t - x_t' b)^2 via pivoted QR on the
    sqrt(w)-scaled system.  Columns beyond the numerical rank get a zero
    coefficient; their indices are returned so callers can warn.
    """
    y = np.asarray(y, dtype=float)
    X = np.asarray(X, dtype=float)
    w = np.asarray(weights, dtype=float)
    sw = np.sqrt(w)
    Xs = X * sw[:, None]
    ys = y * sw
    n, q = Xs.shape
    Q, R, piv = scipy.linalg.qr(Xs, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    if diag.size == 0 or diag[0] == 0.0:
        return np.zeros(q), list(range(q))
    rank = int(np.sum(diag > diag[0] * max(n, q) * np.finfo(float).eps))
    coef = np.zeros(q)
    keep = piv[:rank]
    rhs = Q[:, :rank].T @ ys
    coef[keep] = scipy.linalg.solve_triangular(R[:rank, :rank], rhs)
    dropped = sorted(int(j) for j in piv[rank:])
    return coef, dropped


def _weighted_corr(y, x, w) -> float:
    wsum = w.sum()
    ym = (w @ y) / wsum
    xm = (w @ x) / wsum
    cov = w @ ((y - ym) * (x - xm))
    vy = w @ ((y - ym) ** 2)
    vx = w @ ((x - xm) ** 2)
    if vy <= 0.0 or vx <= 0.0:
        return -math.inf
    return float(cov / math.sqrt(vy * vx))


def _fallback_peer(panel: AlignedPanel) -> tuple[int, float]:
    """Best weighted-correlation peer and its no-constant OLS slope."""
    y = panel.window_y
    w = panel.window_weights
    rows = panel.window_slice
    best_j, best_abs = -1, -math.inf
    for j in range(panel.X.shape[1]):
        r = _weighted_corr(y, panel.X[rows, j], w)
        if math.isfinite(r) and abs(r) > best_abs:
            best_j, best_abs = j, abs(r)
    if best_j < 0:
        raise EstimationError(
            "empty support and no peer column varies over the window"
        )
    x = panel.X[rows, best_j]
    denom = float(w @ (x * x))
    if denom <= 0.0:
        raise EstimationError("fallback peer has zero weighted norm")
    return best_j, float(w @ (x * y)) / denom


def fit_ecm(panel: AlignedPanel, lasso: LassoFit) -> EcmFit:
    """Estimate the error-correction equation on the selected peers.

    The regression rows are the window observations whose one-day lag
    exists; with the default setup that is all of them.  If the first
    step selected nothing, the model degrades to the equilibrium gap
    against the single best-correlated peer (slope by ordinary least
    squares, short-run terms fixed at zero) and the fit is marked as a
    fallback.

    The shock variance divides the weighted residual sum of squares by
    rows minus fitted parameters rather than by the row count, to stay
    unbiased on the short windows this method targets.

    Raises
    ------
    EstimationError
        If fewer than two usable rows remain, or no fallback peer
        varies over the window.
    """
    fallback = lasso.support == ()
    if fallback:
        j, slope = _fallback_peer(panel)
        support = (j,)
        beta_sub = np.array([slope])
        warnings.warn(
            f"first step selected no peer; falling back to equilibrium gap "
            f"against {panel.peer_names[j]!r}", RuntimeWarning, stacklevel=2,
        )
    else:
        support = tuple(lasso.support)
        beta_sub = np.asarray(lasso.beta, dtype=float)[list(support)]

    y = panel.y
    Xsub = panel.X[: panel.tau_len, list(support)]
    z = y - Xsub @ beta_sub

    lo = panel.tau_len - panel.window
    rows = [i for i in range(lo, panel.tau_len) if i >= 1]
    if len(rows) < 2:
        raise EstimationError(
            f"need at least 2 rows with a lag to fit the error-correction "
            f"step, have {len(rows)}"
        )
    rows = np.asarray(rows)
    dy = y[rows] - y[rows - 1]
    dx = Xsub[rows] - Xsub[rows - 1]
    z_lag = z[rows - 1]
    w = panel.weights[rows]

    if fallback:
        design = z_lag[:, None]
    else:
        design = np.column_stack([dx, z_lag])
    coef, dropped = weighted_least_squares(dy, design, w)
    if dropped:
        labels = []
        for d in dropped:
            if not fallback and d < len(support):
                labels.append(f"short-run {panel.peer_names[support[d]]!r}")
            else:
                labels.append("equilibrium gap")
        warnings.warn(
            "collinear columns dropped from the error-correction design: "
            + ", ".join(labels), RuntimeWarning, stacklevel=2,
        )
    if fallback:
        pi = np.zeros(1)
        gamma = float(coef[0])
    else:
        pi = coef[: len(support)].copy()
        gamma = float(coef[len(support)])

    fitted_dy = design @ coef
    fitted_log = y[rows - 1] + fitted_dy
    resid = dy - fitted_dy
    q_eff = design.shape[1] - len(dropped)
    dof = len(rows) - q_eff
    if dof <= 0:
        warnings.warn(
            "no residual degrees of freedom; setting the shock variance "
            "to zero", RuntimeWarning, stacklevel=2,
        )
        sigma2 = 0.0
    else:
        sigma2 = float(w @ (resid * resid)) / dof

    if not -1.0 <= 1.0 + gamma <= 1.0:
        warnings.warn(
            f"error-correction loading gamma={gamma:.4f} puts the recursion "
            f"coefficient 1+gamma outside [-1, 1]; forecasts may diverge",
            RuntimeWarning, stacklevel=2,
        )

    return EcmFit(
        support=support,
        peer_names=tuple(panel.peer_names[j] for j in support),
        beta=beta_sub,
        pi=pi,
        gamma=gamma,
        sigma2=sigma2,
        alpha=level_bias_correction(resid),
        window=panel.window,
        fitted_log=fitted_log,
        residuals_u=resid,
        fallback=fallback,
    )


def level_bias_correction(residuals) -> float:
    """Smearing factor: plain mean of exp(residual) over the window."""
    r = np.asarray(residuals, dtype=float)
    return float(np.mean(np.exp(r)))


def _peer_rows_through(fit: EcmFit, panel: AlignedPanel, last_row: int) -> np.ndarray:
    X = panel.X[:, list(fit.support)]
    if X.shape[0] <= last_row:
        raise ForecastError(
            f"peer matrix ends at tau={X.shape[0]}, need tau={last_row + 1} "
            f"(peers: {', '.join(fit.peer_names)})"
        )
    bad = np.argwhere(~np.isfinite(X[: last_row + 1]))
    if bad.size:
        i, j = bad[0]
        raise ForecastError(
            f"peer {fit.peer_names[j]!r} has no usable value at tau={i + 1}"
        )
    return X


def forecast_log(fit: EcmFit, panel: AlignedPanel, H: int,
                 use_fitted_seed: bool = False) -> np.ndarray:
    """Recursive log-scale forecasts for horizons 1..H.

    The recursion starts from the last observed log level (or, with
    ``use_fitted_seed``, from the last in-sample fitted value) and plugs
    in the peers' observed future values.
    """
    if H < 1:
        raise ValueError("H must be >= 1")
    T = panel.tau_len
    X = _peer_rows_through(fit, panel, T + H - 1)
    seed_val = float(fit.fitted_log[-1]) if use_fitted_seed else float(panel.y[T - 1])

    out = np.empty(H)
    prev = seed_val
    for h in range(1, H + 1):
        dx = X[T + h - 1] - X[T + h - 2]
        long_run = X[T + h - 2] @ fit.beta
        prev = float(dx @ fit.pi) - fit.gamma * float(long_run) + (1.0 + fit.gamma) * prev
        out[h - 1] = prev
    return out


def forecast_levels(fit: EcmFit, y_hat) -> np.ndarray:
    """Bias-corrected level forecasts alpha * exp(y_hat)."""
    y_hat = np.asarray(y_hat, dtype=float)
    with np.errstate(over="raise"):
        try:
            levels = fit.alpha * np.exp(y_hat)
        except FloatingPointError:
            worst = float(np.max(y_hat))
            raise ForecastError(
                f"level forecast overflows: log value {worst:.2f} exceeds "
                f"the representable range"
            ) from None
    if not np.all(np.isfinite(levels)):
        worst = float(np.max(y_hat))
        raise ForecastError(
            f"level forecast overflows: log value {worst:.2f} exceeds "
            f"the representable range"
        )
    return levels


def simulate_log_paths(fit: EcmFit, panel: AlignedPanel, H: int,
                       n_sims: int, seed: int) -> np.ndarray:
    """Monte Carlo log paths: the point recursion plus shock deviations.

    The shock recursion shares the (1 + gamma) propagation of the point
    forecast, so each path is one draw of the recursion with iid
    N(0, sigma2) disturbances.  Returns an (n_sims, H) matrix.
    """
    if n_sims < 1:
        raise ValueError("n_sims must be >= 1")
    point = forecast_log(fit, panel, H)
    rng = np.random.default_rng(seed)
    shocks = rng.normal(0.0, math.sqrt(max(fit.sigma2, 0.0)), size=(n_sims, H))
    dev = np.zeros((n_sims, H))
    dev[:, 0] = shocks[:, 0]
    for h in range(1, H):
        dev[:, h] = (1.0 + fit.gamma) * dev[:, h - 1] + shocks[:, h]
    return point[None, :] + dev


def simulate_bands(fit: EcmFit, panel: AlignedPanel, H: int,
                   n_sims: int = 10000, seed: int = 0,
                   confidence: float = 0.95) -> ForecastPath:
    """Point forecasts with simulated level bands and derived columns.

    Bands are per-horizon empirical quantiles of the simulated level
    paths at (1-c)/2 and 1-(1-c)/2; the bias correction is applied
    inside every path so point and band share the same treatment.
    Daily-new and growth-rate columns are computed per path against the
    previous day's level (anchored at the last observed level) and
    quantiled the same way.
    """
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must be in (0, 1)")
    y_hat = forecast_log(fit, panel, H)
    level_hat = forecast_levels(fit, y_hat)
    if fit.sigma2 <= 0.0:
        warnings.warn(
            "shock variance is zero; bands collapse to the point path",
            RuntimeWarning, stacklevel=2,
        )
    log_paths = simulate_log_paths(fit, panel, H, n_sims, seed)
    level_paths = forecast_levels(fit, log_paths)

    anchor = float(np.exp(panel.y[panel.tau_len - 1]))
    prev_paths = np.concatenate(
        [np.full((n_sims, 1), anchor), level_paths[:, :-1]], axis=1
    )
    new_paths = level_paths - prev_paths
    rate_paths = level_paths / prev_paths - 1.0

    prev_point = np.concatenate([[anchor], level_hat[:-1]])
    new_hat = level_hat - prev_point
    rate_hat = level_hat / prev_point - 1.0

    lo_q = (1.0 - confidence) / 2.0
    hi_q = 1.0 - lo_q

    def quant(a, q):
        return np.quantile(a, q, axis=0)

    return ForecastPath(
        horizons=np.arange(1, H + 1),
        y_hat=y_hat,
        level_hat=level_hat,
        lower=quant(level_paths, lo_q),
        upper=quant(level_paths, hi_q),
        level_median=quant(level_paths, 0.5),
        new_hat=new_hat,
        new_lower=quant(new_paths, lo_q),
        new_upper=quant(new_paths, hi_q),
        rate_hat=rate_hat,
        rate_lower=quant(rate_paths, lo_q),
        rate_upper=quant(rate_paths, hi_q),
        n_sims=n_sims,
        seed=seed,
        confidence=confidence,
    )
