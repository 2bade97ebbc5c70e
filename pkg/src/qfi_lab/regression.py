"""Linear regression with standard errors, shared by slope fits and the CLI."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RegressionResult:
    slope: float
    intercept: float
    slope_stderr: float
    r_squared: float

    def __post_init__(self):
        if not self.slope_stderr >= 0.0:
            raise ValueError(f"slope_stderr must be >= 0, got {self.slope_stderr}")


def linear_regression(x, y, y_err=None) -> RegressionResult:
    """Ordinary or weighted least-squares line fit.

    With y_err given, points are weighted by 1/sigma^2 and the slope standard
    error is the known-error one, sqrt(1/sum(w*(x-xbar)^2)); an infinite
    error drops a point entirely.  Without y_err the standard error comes
    from the residual variance with n-2 degrees of freedom.  Requires at
    least 3 points and a non-degenerate x spread.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-d arrays of equal length")
    if x.size < 3:
        raise ValueError(f"need at least 3 points, got {x.size}")

    if y_err is not None:
        sigma = np.asarray(y_err, dtype=float)
        if sigma.shape != x.shape:
            raise ValueError("y_err must match x in shape")
        if np.any(sigma <= 0.0):
            raise ValueError("y_err entries must be positive (inf drops a point)")
        w = np.zeros_like(sigma)
        finite = np.isfinite(sigma)
        w[finite] = 1.0 / sigma[finite] ** 2
    else:
        w = np.ones_like(x)
    if np.count_nonzero(w) < 3:
        raise ValueError("fewer than 3 points carry finite weight")

    wsum = float(np.sum(w))
    xbar = float(np.sum(w * x)) / wsum
    ybar = float(np.sum(w * y)) / wsum
    dx = x - xbar
    sxx = float(np.sum(w * dx * dx))
    if sxx <= 0.0 or not np.any(np.abs(dx[w > 0]) > 0.0):
        raise ValueError("degenerate x grid: all weighted x values coincide")

    slope = float(np.sum(w * dx * (y - ybar))) / sxx
    intercept = ybar - slope * xbar

    resid = y - (intercept + slope * x)
    ss_res = float(np.sum(w * resid * resid))
    ss_tot = float(np.sum(w * (y - ybar) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot

    if y_err is not None:
        slope_stderr = math.sqrt(1.0 / sxx)
    else:
        n_eff = int(np.count_nonzero(w))
        var = ss_res / (n_eff - 2) if n_eff > 2 else 0.0
        slope_stderr = math.sqrt(max(var, 0.0) / sxx)
    return RegressionResult(slope, intercept, slope_stderr, r_squared)
