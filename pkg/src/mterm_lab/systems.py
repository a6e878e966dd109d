"""Finite symmetric systems, their q-hulls, and the Hilbert hull distance.

Atoms are stored once as matrix columns; ``-g`` is implicitly a member for
every stored ``g``. Selections are reported as ``(index, sign)``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .space import LpSpace

NORM_TOL = 1e-12


@dataclass(frozen=True)
class SymmetricSystem:
    space: LpSpace
    atoms: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        atoms = np.array(self.atoms, dtype=float)
        if atoms.ndim != 2 or atoms.shape[0] != self.space.dim:
            raise ValueError(f"atoms must have shape ({self.space.dim}, n_atoms), got {atoms.shape}")
        norms = self.column_norms(atoms)
        if np.any(norms > 1.0 + NORM_TOL):
            raise ValueError(f"atom norms must be <= 1, max is {norms.max()!r}")
        if self.normalized and np.any(np.abs(norms - 1.0) > NORM_TOL):
            raise ValueError("normalized system has atoms with norm != 1")
        atoms.setflags(write=False)
        object.__setattr__(self, "atoms", atoms)

    def column_norms(self, atoms=None) -> np.ndarray:
        atoms = self.atoms if atoms is None else atoms
        return np.sum(np.abs(atoms) ** self.space.p, axis=0) ** (1.0 / self.space.p)

    @property
    def n_atoms(self) -> int:
        return self.atoms.shape[1]

    def to_json(self) -> str:
        """Bit-reproducible JSON: ``repr`` of a float round-trips exactly."""
        doc = {
            "dim": self.space.dim,
            "p": self.space.p,
            "normalized": self.normalized,
            "atoms": [[float(v) for v in col] for col in self.atoms.T],
        }
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> SymmetricSystem:
        doc = json.loads(text)
        space = LpSpace(doc["dim"], doc["p"])
        atoms = np.array(doc["atoms"], dtype=float).T.reshape(space.dim, -1)
        return cls(space, atoms, bool(doc.get("normalized", True)))


@dataclass
class CoefRepr:
    """Coefficients ``c`` over the atoms of ``system``, tagged with a hull exponent."""

    system: SymmetricSystem
    coefs: np.ndarray
    hull_q: float = 1.0
    hull_member: bool = field(default=True)

    def __post_init__(self):
        self.coefs = np.asarray(self.coefs, dtype=float)
        if self.coefs.shape != (self.system.n_atoms,):
            raise ValueError(f"coefs must have length {self.system.n_atoms}")
        if not (0.0 < self.hull_q <= 1.0):
            raise ValueError("hull_q must lie in (0, 1]")

    def hull_mass(self) -> float:
        return float(np.sum(np.abs(self.coefs) ** self.hull_q))

    def in_hull(self, tol: float = NORM_TOL) -> bool:
        return self.hull_mass() <= 1.0 + tol


def canonical_system(space: LpSpace) -> SymmetricSystem:
    return SymmetricSystem(space, np.eye(space.dim), normalized=True)


def random_system(space: LpSpace, n_atoms: int, seed: int) -> SymmetricSystem:
    if n_atoms < 1:
        raise ValueError("n_atoms must be >= 1")
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((space.dim, n_atoms))
    norms = np.sum(np.abs(raw) ** space.p, axis=0) ** (1.0 / space.p)
    return SymmetricSystem(space, raw / norms, normalized=True)


def sample_hull(system: SymmetricSystem, hull_q: float, seed: int, support=None) -> CoefRepr:
    """Draw an element of A_q with ``sum |c_j|^q = 1``.

    Weights are uniform on the probability simplex (normalized exponentials),
    ``|c_j| = w_j^(1/q)``, signs independent and uniform. With ``support``
    (an index array) the simplex is restricted to that face, which lets rate
    studies reach sparse, near-extremal members of the hull.
    """
    if not (0.0 < hull_q <= 1.0):
        raise ValueError(f"hull_q must lie in (0, 1], got {hull_q!r}")
    rng = np.random.default_rng(seed)
    n = system.n_atoms
    idx = np.arange(n) if support is None else np.asarray(support, dtype=int)
    expo = rng.standard_exponential(idx.size)
    w = expo / expo.sum()
    signs = np.where(rng.random(idx.size) < 0.5, -1.0, 1.0)
    coefs = np.zeros(n)
    coefs[idx] = signs * w ** (1.0 / hull_q)
    return CoefRepr(system, coefs, hull_q)


def synthesize(repr_: CoefRepr) -> np.ndarray:
    return repr_.system.atoms @ repr_.coefs


@dataclass
class HullDistance:
    b_upper: float
    b_lower: float
    witness: CoefRepr
    iterations: int
    history: list = field(default_factory=list)


def hull_distance_l2(
    system: SymmetricSystem, f, tol: float = 1e-10, max_iter: int = 10000
) -> HullDistance:
    """Certified distance from ``f`` to the symmetric convex hull A_1 (p = 2).

    Away-step Frank-Wolfe on ``h(phi) = ||f - phi||^2`` over the vertices
    ``+-g_j``. The Frank-Wolfe gap bounds ``h(phi) - h*`` so every iterate
    yields ``b_lower^2 = h - gap``. Stops when both
    ``b_upper^2 - b_lower^2 <= tol`` and ``b_upper - b_lower <= tol``.
    """
    if system.space.p != 2.0:
        raise ValueError("certified hull distance requires Hilbert case")
    f = system.space.check(f)
    G = system.atoms
    n = system.n_atoms
    V = np.hstack([G, -G])  # vertex k < n is +g_k, k >= n is -g_{k-n}
    w = np.zeros(2 * n)
    k0 = int(np.argmax(V.T @ f))
    w[k0] = 1.0
    phi = V[:, k0].copy()

    best_lower_sq = 0.0
    history = []
    it = 0
    for it in range(1, max_iter + 1):
        resid = phi - f
        h = float(resid @ resid)
        grad = 2.0 * resid
        scores = V.T @ grad
        s = int(np.argmin(scores))
        gap = float(grad @ phi - scores[s])
        best_lower_sq = max(best_lower_sq, h - gap)
        upper, lower = math.sqrt(h), math.sqrt(max(best_lower_sq, 0.0))
        history.append((upper, lower))
        if h - best_lower_sq <= tol and upper - lower <= tol:
            break

        active = np.flatnonzero(w > 0.0)
        fw_dir = V[:, s] - phi
        a = active[int(np.argmax(scores[active]))]
        away_dir = phi - V[:, a]
        away_gap = float(scores[a] - grad @ phi)
        use_away = away_gap > gap
        if use_away:
            d = away_dir
            gmax = w[a] / (1.0 - w[a]) if w[a] < 1.0 else 1e12
        else:
            d = fw_dir
            gmax = 1.0
        dd = float(d @ d)
        if dd == 0.0:
            break
        step = min(max(-float(resid @ d) / dd, 0.0), gmax)
        if use_away:
            w *= 1.0 + step
            w[a] -= step
            if step == gmax:
                w[a] = 0.0
        else:
            w *= 1.0 - step
            w[s] += step
        phi = phi + step * d
    coefs = w[:n] - w[n:]
    witness = CoefRepr(system, coefs, 1.0)
    upper, lower = history[-1]
    return HullDistance(upper, lower, witness, it, history)
