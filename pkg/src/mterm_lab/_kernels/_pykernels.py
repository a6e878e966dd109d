"""Pure-Python reference kernels.

Same signatures and semantics as the compiled ``_ckernels`` module. Results
agree with the compiled path to rounding (summation order differs).
"""
import math

import numpy as np

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_REFINE_HALF_WIDTH = 1e-6


def lp_dist(x, y, p):
    diff = np.abs(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))
    if math.isinf(p):
        return float(diff.max()) if diff.size else 0.0
    return float(np.sum(diff**p) ** (1.0 / p))


def _power_sum(r, d, lam, p):
    return float(np.sum(np.abs(r - lam * d) ** p))


def _slope(r, d, lam, p):
    # derivative of sum |r - lam d|^p in lam
    e = r - lam * d
    return float(-p * np.sum(d * np.sign(e) * np.abs(e) ** (p - 1.0)))


def _bisect_slope(r, d, p, lo, hi):
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _slope(r, d, mid, p) > 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def segment_argmin(r, d, p, tol):
    """Minimize ``||r - lam * d||_p`` over ``lam`` in [0, 1].

    Golden-section search on the p-th power (same minimizer, no root), then
    bisection on the sign of the derivative inside a small bracket around
    the golden-section point. Returns ``(lam, value)``.
    """
    r = np.ascontiguousarray(r, dtype=float)
    d = np.ascontiguousarray(d, dtype=float)
    if not np.any(d):
        return 0.0, float(np.sum(np.abs(r) ** p) ** (1.0 / p))

    a, b = 0.0, 1.0
    c = b - GOLDEN * (b - a)
    e = a + GOLDEN * (b - a)
    fc = _power_sum(r, d, c, p)
    fe = _power_sum(r, d, e, p)
    while b - a > tol:
        if fc < fe:
            b, e, fe = e, c, fc
            c = b - GOLDEN * (b - a)
            fc = _power_sum(r, d, c, p)
        else:
            a, c, fc = c, e, fe
            e = a + GOLDEN * (b - a)
            fe = _power_sum(r, d, e, p)
    lam = 0.5 * (a + b)

    lo = max(0.0, lam - _REFINE_HALF_WIDTH)
    hi = min(1.0, lam + _REFINE_HALF_WIDTH)
    s_lo = _slope(r, d, lo, p)
    s_hi = _slope(r, d, hi, p)
    if s_lo <= 0.0 <= s_hi:
        if lo == 0.0 and s_lo >= 0.0:
            lam = 0.0
        elif hi == 1.0 and s_hi <= 0.0:
            lam = 1.0
        else:
            lam = _bisect_slope(r, d, p, lo, hi)
    else:
        if _slope(r, d, 0.0, p) >= 0.0:
            lam = 0.0
        elif _slope(r, d, 1.0, p) <= 0.0:
            lam = 1.0
        else:
            lam = _bisect_slope(r, d, p, 0.0, 1.0)

    best = _power_sum(r, d, lam, p)
    for end in (0.0, 1.0):
        val = _power_sum(r, d, end, p)
        if val < best:
            lam, best = end, val
    return lam, best ** (1.0 / p)


def farthest_point_traversal(points, p, n_centers, start=0):
    """Gonzalez traversal under the l_p distance.

    Returns ``(order, radii)``: ``order[i]`` is the i-th chosen sample and
    ``radii[i]`` the covering radius of the first ``i + 1`` centers. Ties go
    to the smallest index.
    """
    X = np.ascontiguousarray(points, dtype=float)
    n = X.shape[0]
    n_centers = min(int(n_centers), n)
    order = np.empty(n_centers, dtype=np.int64)
    radii = np.empty(n_centers, dtype=float)
    if n_centers == 0:
        return order, radii
    inf = math.isinf(p)

    # distances kept as p-th powers: same ordering, root taken once per radius
    def powdist_to(i):
        diff = X - X[i]
        if inf:
            return np.abs(diff).max(axis=1)
        if p == 2.0:
            return np.einsum("ij,ij->i", diff, diff)
        return np.sum(np.abs(diff) ** p, axis=1)

    order[0] = start
    nearest = powdist_to(start)
    for k in range(n_centers):
        if k > 0:
            nearest = np.minimum(nearest, powdist_to(order[k]))
        nxt = int(np.argmax(nearest))
        top = float(nearest[nxt])
        radii[k] = top if inf else (math.sqrt(top) if p == 2.0 else top ** (1.0 / p))
        if k + 1 < n_centers:
            order[k + 1] = nxt
    return order, radii


def _modulus_value(x, y, u, p):
    return 0.5 * (lp_dist(x, -u * y, p) + lp_dist(x, u * y, p)) - 1.0


def _normalize(v, p):
    return v / lp_dist(v, np.zeros_like(v), p)


def modulus_ascent(x, y, u, p, sweeps, step):
    """Coordinate ascent of 0.5(|x+uy| + |x-uy|) - 1 over unit x, y.

    Each sweep tries +-step on every coordinate of x then y (renormalizing);
    the step halves after a sweep without improvement. Returns
    ``(value, x, y)``.
    """
    x = _normalize(np.array(x, dtype=float), p)
    y = _normalize(np.array(y, dtype=float), p)
    best = _modulus_value(x, y, u, p)
    n = x.shape[0]
    for _ in range(int(sweeps)):
        improved = False
        for which in (0, 1):
            for i in range(n):
                for sgn in (1.0, -1.0):
                    cand_x = x.copy()
                    cand_y = y.copy()
                    target = cand_x if which == 0 else cand_y
                    target[i] += sgn * step
                    if not np.any(target):
                        continue
                    cand_x = _normalize(cand_x, p)
                    cand_y = _normalize(cand_y, p)
                    val = _modulus_value(cand_x, cand_y, u, p)
                    if val > best:
                        best, x, y = val, cand_x, cand_y
                        improved = True
                        break
        if not improved:
            step *= 0.5
    return best, x, y
