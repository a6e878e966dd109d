"""Ground truth for best m-term approximation.

For the canonical basis, keeping the m largest coordinates is optimal in
every l_p, so the error is the norm of the sorted tail. General systems are
handled by exhaustive search over supports on tiny instances.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .space import lp_norm
from .systems import SymmetricSystem

MAX_BRUTE_ATOMS = 12
MAX_BRUTE_M = 4


@dataclass
class MTermResult:
    support: tuple
    coefs: np.ndarray
    error: float
    exact: bool = True


def sigma_m_canonical(x, m: int, p: float) -> MTermResult:
    """Best m-term error of ``x`` in the canonical basis, measured in l_p.

    ``p`` may be any value in (0, inf]; for p < 1 the tail is measured with
    the quasi-norm ``(sum |x_j|^p)^(1/p)``.
    """
    x = np.asarray(x, dtype=float)
    if not 0 <= m <= x.size:
        raise ValueError(f"m must lie in [0, {x.size}]")
    if not p > 0:
        raise ValueError("p must be positive")
    order = np.argsort(-np.abs(x), kind="stable")
    support = tuple(sorted(int(j) for j in order[:m]))
    tail = x[order[m:]]
    return MTermResult(support, x[list(support)], lp_norm(tail, p), True)


def _fit_lp(A: np.ndarray, f: np.ndarray, p: float, restarts: int = 3) -> tuple[np.ndarray, float]:
    """Best-effort minimizer of ``||f - A c||_p`` (convex for p >= 1)."""
    c0 = np.linalg.lstsq(A, f, rcond=None)[0]

    def obj(c):
        return float(np.sum(np.abs(f - A @ c) ** p))

    best_c, best = c0, obj(c0)
    rng = np.random.default_rng(0)
    starts = [c0] + [c0 + 0.1 * rng.standard_normal(c0.size) for _ in range(restarts - 1)]
    for start in starts:
        c = start.copy()
        val = obj(c)
        for _ in range(50):
            prev = val
            for i in range(c.size):
                def line(t, i=i):
                    trial = c.copy()
                    trial[i] = t
                    return obj(trial)

                res = minimize_scalar(line, bracket=(c[i] - 1.0, c[i] + 1.0))
                if res.fun < val:
                    c[i], val = res.x, res.fun
            if prev - val <= 1e-15 * max(prev, 1.0):
                break
        polished = minimize(obj, c, method="BFGS", options={"gtol": 1e-14})
        if polished.fun < val:
            c, val = polished.x, polished.fun
        if val < best:
            best_c, best = c, val
    return best_c, best ** (1.0 / p)


def sigma_m_bruteforce(system: SymmetricSystem, f, m: int) -> MTermResult:
    """Exhaustive best m-term approximation over all supports of size ``m``.

    Exact for p = 2 (least squares per support). For p != 2 the inner
    problem is solved by coordinate descent from the least-squares start
    with restarts, so the result is an upper bound and ``exact`` is False.
    Ties between supports go to the lexicographically smallest one.
    """
    if system.n_atoms > MAX_BRUTE_ATOMS or m > MAX_BRUTE_M:
        raise ValueError("instance too large for brute force")
    space = system.space
    f = space.check(f)
    p = space.p
    hilbert = p == 2.0
    m = min(m, system.n_atoms)
    if m == 0:
        return MTermResult((), np.zeros(0), lp_norm(f, p), True)
    best = None
    for support in itertools.combinations(range(system.n_atoms), m):
        A = system.atoms[:, support]
        if hilbert:
            c = np.linalg.lstsq(A, f, rcond=None)[0]
            err = lp_norm(f - A @ c, p)
        else:
            c, err = _fit_lp(A, f, p)
        if best is None or err < best.error:
            best = MTermResult(support, c, err, hilbert)
    return best


def tail_bound_check(x, m: int, p: float, q: float) -> tuple[float, float, bool]:
    """Sorted-tail inequality ``(sum_{j>m} x_j^p)^(1/p) <= m^(1/p-1/q) ||x||_q``."""
    if q > p:
        raise ValueError("tail bound needs q <= p")
    if m < 1:
        raise ValueError("m must be >= 1")
    x = np.sort(np.abs(np.asarray(x, dtype=float)))[::-1]
    lhs = lp_norm(x[m:], p)
    rhs = m ** (1.0 / p - 1.0 / q) * lp_norm(x, q)
    return lhs, rhs, bool(lhs <= rhs + 1e-12)
