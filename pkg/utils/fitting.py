"""Least-squares fits for growth rates and decay envelopes."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from sklearn.linear_model import LinearRegression


@dataclass(frozen=True)
class LineFit:
    slope: float
    intercept: float
    r2: float
    points: int

    def as_dict(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept, "r2": self.r2, "points": self.points}


def fit_line(xs: Sequence[float], ys: Sequence[float]) -> LineFit:
    if len(xs) != len(ys):
        raise ValueError(f"length mismatch: {len(xs)} x-values, {len(ys)} y-values")
    if len(xs) < 2:
        raise ValueError("need at least two points to fit a line")
    X = np.asarray(xs, dtype=float).reshape(-1, 1)
    y = np.asarray(ys, dtype=float)
    reg = LinearRegression().fit(X, y)
    r2 = float(reg.score(X, y)) if np.ptp(y) > 0 else 1.0
    return LineFit(float(reg.coef_[0]), float(reg.intercept_), r2, len(xs))


def fit_exponential_rate(ns: Sequence[float], values: Sequence[float]) -> LineFit:
    """Slope of log(value) against n; non-positive values are skipped."""
    pairs = [(n, math.log(v)) for n, v in zip(ns, values) if v > 0]
    return fit_line([p[0] for p in pairs], [p[1] for p in pairs])


def fit_power_law(ns: Sequence[float], values: Sequence[float]) -> LineFit:
    """Log-log slope; non-positive entries are skipped."""
    pairs = [(math.log(n), math.log(v)) for n, v in zip(ns, values) if n > 0 and v > 0]
    return fit_line([p[0] for p in pairs], [p[1] for p in pairs])


def envelope_constant(ns: Sequence[float], values: Sequence[float], envelope) -> float:
    """Smallest C with value ≤ C·envelope(n) at every sampled n."""
    ratios = [v / envelope(n) for n, v in zip(ns, values) if envelope(n) > 0]
    return max(ratios, default=0.0)


__all__ = ["LineFit", "fit_line", "fit_exponential_rate", "fit_power_law", "envelope_constant"]
