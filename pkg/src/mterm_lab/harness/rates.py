"""Least-squares rate fits in log-log coordinates."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

LOG_FLOOR = 1e-13


@dataclass
class RateFit:
    slope: float
    intercept: float
    residual_rms: float
    m_range: tuple
    n_points: int
    target: float
    slack: float
    passed: bool

    def to_dict(self) -> dict:
        return asdict(self)


def fit_rate(values, target: float, slack: float = 0.15, m_range=None) -> RateFit:
    """Fit ``log v = intercept + slope * log m`` over ``(m, v)`` pairs.

    Points outside ``m_range`` (inclusive) or with ``v <= 1e-13`` are dropped.
    ``passed`` is ``|slope - target| <= slack``.
    """
    pts = [(float(m), float(v)) for m, v in values]
    if m_range is not None:
        lo, hi = m_range
        pts = [(m, v) for m, v in pts if lo <= m <= hi]
    pts = [(m, v) for m, v in pts if v > LOG_FLOOR and m > 0]
    if len(pts) < 3:
        raise ValueError(f"need at least 3 usable points for a rate fit, got {len(pts)}")
    x = np.log([m for m, _ in pts])
    y = np.log([v for _, v in pts])
    A = np.stack([x, np.ones_like(x)], axis=1)
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    rms = math.sqrt(float(np.mean((A @ np.array([slope, intercept]) - y) ** 2)))
    used = (min(m for m, _ in pts), max(m for m, _ in pts))
    return RateFit(
        float(slope), float(intercept), rms, used, len(pts), target, slack, bool(abs(slope - target) <= slack)
    )
