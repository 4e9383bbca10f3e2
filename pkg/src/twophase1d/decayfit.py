"""Algebraic decay-rate estimation for norm time series.

Fits are ordinary least squares of log value against log(1+t), matching the
(1+t)^alpha form of the predicted rates; the fitted slope is the exponent.
"""

import warnings
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class FitResult:
    alpha: float
    stderr: float
    window: tuple
    r2: float
    predicted: float | None
    tolerance: float
    verdict: str | None       # "pass"/"fail", None when no prediction given

    def __str__(self):
        tail = ""
        if self.predicted is not None:
            tail = (f" predicted={self.predicted:+.4f}"
                    f" tol={self.tolerance:.3f} {self.verdict}")
        return (f"alpha={self.alpha:+.4f} stderr={self.stderr:.2e}"
                f" window=[{self.window[0]:g},{self.window[1]:g}]"
                f" r2={self.r2:.6f}" + tail)


def _coerce_series(series):
    if isinstance(series, tuple) and len(series) == 2:
        ts, vals = np.asarray(series[0], float), np.asarray(series[1], float)
    else:
        arr = np.asarray(series, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("series must be (t, value) pairs")
        ts, vals = arr[:, 0], arr[:, 1]
    if ts.shape != vals.shape or ts.ndim != 1:
        raise ValueError("series must be (t, value) pairs")
    if np.any(np.diff(ts) <= 0):
        raise ValueError("times must be strictly increasing")
    return ts, vals


def _positive_prefix(ts, vals, what):
    bad = np.nonzero(vals <= 0)[0]
    if bad.size:
        cut = bad[0]
        warnings.warn(
            f"{what}: value hit the round-off floor at t={ts[cut]:g}; "
            f"truncating to the positive prefix", RuntimeWarning)
        return ts[:cut], vals[:cut]
    return ts, vals


def fit_exponent(series, window=None, predicted=None, tolerance=0.03):
    """Least-squares exponent of value ~ C (1+t)^alpha over a time window.

    Non-positive values truncate the window with a warning (the series
    reached the round-off floor); fewer than 8 surviving samples is an error.
    When a predicted exponent is supplied the verdict records whether
    |alpha - predicted| <= tolerance.
    """
    ts, vals = _coerce_series(series)
    if window is None:
        window = (float(ts[0]), float(ts[-1]))
    t0, t1 = float(window[0]), float(window[1])
    if not t0 < t1:
        raise ValueError(f"window must satisfy t0 < t1, got ({t0}, {t1})")
    m = (ts >= t0) & (ts <= t1)
    ts, vals = _positive_prefix(ts[m], vals[m], "fit_exponent")
    if len(ts) < 8:
        raise ValueError(f"need at least 8 samples in window, have {len(ts)}")
    x = np.log1p(ts)
    y = np.log(vals)
    n = len(x)
    xm, ym = x.mean(), y.mean()
    sxx = np.sum((x - xm) ** 2)
    alpha = float(np.sum((x - xm) * (y - ym)) / sxx)
    resid = y - (ym + alpha * (x - xm))
    ssr = float(np.sum(resid ** 2))
    sst = float(np.sum((y - ym) ** 2))
    stderr = float(np.sqrt(ssr / (n - 2) / sxx))
    r2 = 1.0 if sst == 0.0 else min(1.0, max(0.0, 1.0 - ssr / sst))
    verdict = None
    if predicted is not None:
        verdict = "pass" if abs(alpha - predicted) <= tolerance else "fail"
    return FitResult(alpha, stderr, (t0, t1), r2, predicted, tolerance, verdict)


def local_slope(series):
    """Centered-difference slope of log value vs log(1+t) at each sample.

    One-sided at the ends. Used to eyeball where a series has entered its
    asymptotic regime before committing to a fit window.
    """
    ts, vals = _coerce_series(series)
    ts, vals = _positive_prefix(ts, vals, "local_slope")
    if len(ts) < 3:
        raise ValueError(f"need at least 3 positive samples, have {len(ts)}")
    x = np.log1p(ts)
    y = np.log(vals)
    out = np.empty_like(y)
    out[1:-1] = (y[2:] - y[:-2]) / (x[2:] - x[:-2])
    out[0] = (y[1] - y[0]) / (x[1] - x[0])
    out[-1] = (y[-1] - y[-2]) / (x[-1] - x[-2])
    return ts, out
