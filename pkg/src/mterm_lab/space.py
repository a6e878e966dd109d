"""The ambient space l_p^n: norms, norming functionals, modulus of smoothness.

Functionals are represented by dual vectors; the pairing is the Euclidean
dot product.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels

SEGMENT_TOL = 1e-12


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class LpSpace:
    """Real l_p^n with 1 < p < inf.

    The smoothness data follow the standard bounds on the modulus of
    smoothness of L_p: ``rho(u) <= u^p / p`` for ``p <= 2`` and
    ``rho(u) <= (p - 1) u^2 / 2`` for ``p >= 2``, i.e. ``rho(u) <= gamma u^q``.
    """

    dim: int
    lebesgue_p: float

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim!r}")
        p = float(self.lebesgue_p)
        if not (1.0 < p < math.inf):
            raise ValueError(
                f"lebesgue_p must lie in (1, inf), got {self.lebesgue_p!r}: "
                "l_1 and l_inf are not uniformly smooth"
            )
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "lebesgue_p", p)

    @property
    def p(self) -> float:
        return self.lebesgue_p

    @property
    def smooth_q(self) -> float:
        return min(self.lebesgue_p, 2.0)

    @property
    def gamma(self) -> float:
        p = self.lebesgue_p
        return 1.0 / p if p <= 2.0 else (p - 1.0) / 2.0

    @property
    def conj_p(self) -> float:
        """Recursion exponent ``q / (q - 1)``; equals ``max(p / (p - 1), 2)``."""
        q = self.smooth_q
        return q / (q - 1.0)

    @property
    def dual_p(self) -> float:
        p = self.lebesgue_p
        return p / (p - 1.0)

    def smoothness_bound(self, u):
        """The analytic upper bound ``gamma * u**q`` on ``rho(u)``."""
        return self.gamma * np.asarray(u, dtype=float) ** self.smooth_q

    def check(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim != 1 or x.shape[0] != self.dim:
            raise DimensionError(f"expected a vector of length {self.dim}, got shape {x.shape}")
        return x


def lp_norm(x, p: float) -> float:
    """l_p (quasi-)norm for any p in (0, inf]."""
    x = np.abs(np.asarray(x, dtype=float))
    if x.size == 0:
        return 0.0
    if math.isinf(p):
        return float(x.max())
    return float(np.sum(x**p) ** (1.0 / p))


def norm(space: LpSpace, x) -> float:
    return lp_norm(space.check(x), space.p)


def norming_functional(space: LpSpace, f) -> np.ndarray:
    """Dual vector ``g`` with ``<g, f> = ||f||_p`` and ``||g||_{p'} = 1``.

    ``g_i = sign(f_i) |f_i|^{p-1} / ||f||_p^{p-1}``. Unique for 1 < p < inf.
    """
    f = space.check(f)
    nrm = lp_norm(f, space.p)
    if nrm == 0.0:
        raise ValueError("functional undefined at zero")
    # scale first to keep |f_i|^{p-1} in range
    z = f / nrm
    return np.sign(z) * np.abs(z) ** (space.p - 1.0)


def modulus_smoothness_estimate(
    space: LpSpace,
    u: float,
    n_samples: int = 8,
    seed: int = 0,
    sweeps: int = 200,
    warm_start: list | None = None,
) -> float:
    """Lower estimate of the modulus of smoothness ``rho(u)``.

    Maximizes ``0.5 (||x + u y|| + ||x - u y||) - 1`` over seeded random unit
    pairs refined by coordinate ascent with step halving. Every returned value
    is attained by an explicit unit pair, so it never exceeds ``rho(u)``.

    ``warm_start`` may hold ``(x, y)`` pairs (e.g. optimizers found at a
    smaller ``u``); they are refined alongside the random starts.
    """
    if u <= 0:
        raise ValueError("u must be positive")
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    value, _ = _modulus_search(space, float(u), n_samples, seed, sweeps, warm_start)
    return value


def _modulus_search(space, u, n_samples, seed, sweeps, warm_start):
    rng = np.random.default_rng(seed)
    starts = [(rng.standard_normal(space.dim), rng.standard_normal(space.dim)) for _ in range(n_samples)]
    if warm_start:
        starts = list(warm_start) + starts
    best, best_pair = -math.inf, None
    for x0, y0 in starts:
        val, x, y = _kernels.modulus_ascent(x0, y0, u, space.p, sweeps, 0.25)
        if val > best:
            best, best_pair = val, (x, y)
    return max(best, 0.0), best_pair


def modulus_smoothness_curve(space: LpSpace, us, n_samples: int = 8, seed: int = 0, sweeps: int = 200) -> np.ndarray:
    """Estimates of ``rho`` on an increasing grid of ``u``.

    The optimizer found at each ``u`` warm-starts the next one; since
    ``0.5 (||x + u y|| + ||x - u y||)`` is nondecreasing in ``u`` for a fixed
    pair, the curve is nondecreasing.
    """
    us = np.asarray(us, dtype=float)
    if np.any(np.diff(us) < 0):
        raise ValueError("u grid must be nondecreasing")
    out = np.empty_like(us)
    pair = None
    for i, u in enumerate(us):
        val, new_pair = _modulus_search(space, float(u), n_samples, seed, sweeps, [pair] if pair else None)
        out[i] = val
        pair = new_pair
    return out


def segment_min(space: LpSpace, f, a, b, tol: float = SEGMENT_TOL) -> tuple[float, float]:
    """Minimize ``||f - ((1 - lam) a + lam b)||_p`` over ``lam`` in [0, 1].

    The objective is convex in ``lam``; golden-section search brackets the
    minimizer to ``tol`` and a derivative-sign bisection refines it.
    Returns ``(lam, value)`` with ``value <= min(phi(0), phi(1))``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    f, a, b = space.check(f), space.check(a), space.check(b)
    return _kernels.segment_argmin(f - a, b - a, space.p, tol)
