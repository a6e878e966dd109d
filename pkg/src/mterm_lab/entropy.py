"""Covering nets, entropy brackets and the multiscale net composer.

Nets carry a certificate saying how coverage is known:

``grid-exact``
    analytic covering radius of a product grid in l_inf.
``sampled``
    max observed distance over a finite sample (an empirical claim about
    that sample only).
``composed``
    triangle-inequality composition of certified parents.

Entropy numbers are only ever bracketed, never claimed exactly: greedy
covers give upper bounds with centers restricted to the sample, and the
matching packings give lower bounds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from . import _kernels
from .space import LpSpace

BALL_NET_CONSTANT = 3.0
MULTISCALE_GUARD = 2**20


@dataclass(frozen=True)
class NetAmbient:
    """R^dim with the l_p metric, 1 <= p <= inf."""

    dim: int
    p: float

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if not self.p >= 1.0:
            raise ValueError("net ambients need p >= 1")

    @classmethod
    def linf(cls, dim: int) -> NetAmbient:
        return cls(int(dim), math.inf)

    @classmethod
    def of(cls, space) -> NetAmbient:
        if isinstance(space, NetAmbient):
            return space
        if isinstance(space, LpSpace):
            return cls(space.dim, space.p)
        raise TypeError(f"cannot use {type(space).__name__} as a net ambient")

    def dist(self, x, y) -> np.ndarray:
        diff = np.abs(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))
        if math.isinf(self.p):
            return diff.max(axis=-1)
        return np.sum(diff**self.p, axis=-1) ** (1.0 / self.p)

    def label(self) -> str:
        return f"l_inf^{self.dim}" if math.isinf(self.p) else f"l_{self.p:g}^{self.dim}"


@dataclass
class EpsNet:
    centers: np.ndarray
    radius: float
    ambient: NetAmbient
    certificate: dict = field(default_factory=dict)

    def __post_init__(self):
        self.centers = np.atleast_2d(np.asarray(self.centers, dtype=float))
        if self.centers.shape[1] != self.ambient.dim:
            raise ValueError("center dimension does not match the ambient")
        if self.radius < 0:
            raise ValueError("radius must be nonnegative")

    def __len__(self) -> int:
        return self.centers.shape[0]

    def nearest(self, points) -> tuple[np.ndarray, np.ndarray]:
        """Distance to and index of the nearest center, via a k-d tree."""
        tree = cKDTree(self.centers)
        dist, idx = tree.query(np.atleast_2d(points), k=1, p=self.ambient.p)
        return dist, idx

    def to_dict(self) -> dict:
        return {
            "ambient": {"dim": self.ambient.dim, "p": "inf" if math.isinf(self.ambient.p) else self.ambient.p},
            "radius": self.radius,
            "certificate": self.certificate,
            "centers": self.centers.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> EpsNet:
        amb = doc["ambient"]
        p = math.inf if amb["p"] == "inf" else float(amb["p"])
        centers = np.array(doc["centers"], dtype=float).reshape(-1, amb["dim"])
        return cls(centers, float(doc["radius"]), NetAmbient(int(amb["dim"]), p), dict(doc["certificate"]))


@dataclass
class CoverageReport:
    n_points: int
    max_distance: float
    violations: int
    radius: float

    @property
    def passed(self) -> bool:
        return self.violations == 0


def verify_coverage(net: EpsNet, points, slack: float = 1e-12) -> CoverageReport:
    points = np.atleast_2d(np.asarray(points, dtype=float))
    dist, _ = net.nearest(points)
    bad = int(np.count_nonzero(dist > net.radius + slack))
    return CoverageReport(points.shape[0], float(dist.max()), bad, net.radius)


def _axis_bits(d: int, k: int) -> list[int]:
    base, extra = divmod(k, d)
    return [base + 1 if i < extra else base for i in range(d)]


def grid_net_ball(d: int, k: int) -> EpsNet:
    """2^k centers covering the l_inf unit ball [-1, 1]^d.

    Per-axis counts are powers of two differing by at most a factor 2;
    centers are cell midpoints, so the covering radius is the reciprocal of
    the smallest per-axis count, at most ``2 * 2^(-k/d)``.
    """
    if d < 1 or k < 0:
        raise ValueError("need d >= 1 and k >= 0")
    bits = _axis_bits(d, k)
    axes = []
    for b in bits:
        c = 2**b
        axes.append(-1.0 + (2.0 * np.arange(c) + 1.0) / c)
    mesh = np.meshgrid(*axes, indexing="ij")
    centers = np.stack([m.ravel() for m in mesh], axis=1)
    radius = 1.0 / 2 ** min(bits)
    cert = {"kind": "grid-exact", "axis_bits": bits, "eq_bound": BALL_NET_CONSTANT * 2.0 ** (-k / d)}
    return EpsNet(centers, radius, NetAmbient.linf(d), cert)


def compose_product_net(net_A: EpsNet, net_ball: EpsNet) -> EpsNet:
    """Net for A from a net for A and a net for the unit ball.

    Centers ``y_i + eps_A z_j``: if ``||a - y_i|| <= eps_A`` then
    ``(a - y_i) / eps_A`` is in the unit ball and is within ``eps_ball`` of
    some ``z_j``, so radius ``eps_A * eps_ball`` suffices.
    """
    if net_A.ambient != net_ball.ambient:
        raise ValueError(f"ambient mismatch: {net_A.ambient.label()} vs {net_ball.ambient.label()}")
    eps_a = net_A.radius
    centers = (net_A.centers[:, None, :] + eps_a * net_ball.centers[None, :, :]).reshape(-1, net_A.ambient.dim)
    cert = {
        "kind": "composed",
        "parents": [net_A.certificate.get("kind"), net_ball.certificate.get("kind")],
        "sizes": [len(net_A), len(net_ball)],
        "radii": [net_A.radius, net_ball.radius],
    }
    return EpsNet(centers, eps_a * net_ball.radius, net_A.ambient, cert)


def sample_net(samples, n_centers: int, space, start: int = 0) -> EpsNet:
    """Farthest-point net with centers drawn from ``samples``."""
    amb = NetAmbient.of(space)
    X = np.atleast_2d(np.asarray(samples, dtype=float))
    order, radii = _kernels.farthest_point_traversal(X, amb.p, n_centers, start)
    radius = float(radii[-1])
    cert = {
        "kind": "sampled",
        "n_samples": int(X.shape[0]),
        "max_observed_distance": radius,
        "centers_from": "samples",
    }
    return EpsNet(X[order], radius, amb, cert)


@dataclass(frozen=True)
class EntropyPoint:
    k: int
    eps_upper: float
    eps_lower: float


def empirical_entropy_curve(samples, k_max: int, space) -> list[EntropyPoint]:
    """Bracket ``eps_k`` of a finite sample for k = 0..k_max.

    Farthest-point traversal gives, for ``c = 2^k`` centers, the covering
    radius ``r`` of the sample (upper bound, centers in the sample) and
    ``c + 1`` points that are pairwise at least ``r`` apart; no ``c`` balls
    of radius below ``r / 2`` can cover them (lower bound).
    """
    X = np.atleast_2d(np.asarray(samples, dtype=float))
    if X.shape[0] == 0:
        raise ValueError("samples must be nonempty")
    amb = NetAmbient.of(space)
    n = X.shape[0]
    n_c = min(2**k_max + 1, n)
    _, radii = _kernels.farthest_point_traversal(X, amb.p, n_c, 0)
    out = []
    for k in range(k_max + 1):
        c = 2**k
        if c >= n:
            out.append(EntropyPoint(k, 0.0, 0.0))
            continue
        r = float(radii[c - 1])
        out.append(EntropyPoint(k, r, 0.5 * r))
    return out


def composed_ball_entropy_bound(space, F_net: EpsNet, extra_k: int) -> EpsNet:
    """Refine a net of a compact in an n-dimensional l_inf space by 2^extra_k.

    Composes ``F_net`` with ``grid_net_ball(n, extra_k)``; the reported radius
    uses the ball-net constant, ``eps_F * 3 * 2^(-extra_k / n)``, which the
    grid's exact radius never exceeds.
    """
    amb = NetAmbient.of(space)
    if extra_k < 0:
        raise ValueError("extra_k must be >= 0")
    if F_net.ambient != amb or not math.isinf(amb.p):
        raise ValueError(
            f"dimension bookkeeping mismatch: net lives in {F_net.ambient.label()}, expected l_inf^{amb.dim}"
        )
    n = amb.dim
    ball = grid_net_ball(n, extra_k)
    composed = compose_product_net(F_net, ball)
    composed.certificate["grid_radius"] = composed.radius
    composed.radius = F_net.radius * BALL_NET_CONSTANT * 2.0 ** (-extra_k / n)
    return composed


# ---------------------------------------------------------------------------
# multiscale composition


def budget_bits(l: int, r: float) -> tuple[int, ...]:
    """``n_s = floor((r + 1)(l - s) 2^(s+1))`` for s = 1..l."""
    return tuple(int(math.floor((r + 1.0) * (l - s) * 2 ** (s + 1))) for s in range(1, l + 1))


@dataclass
class MultiscaleBudget:
    """Per-scale bit budgets and subspace collections.

    ``collections[s-1]`` lists coordinate subspaces (tuples of ambient
    coordinates) of dimension at most ``2^(s+1)``. ``l_r`` is the number of
    scales that get nets; the remaining scales only enter the error budget.
    """

    l: int
    r: float
    collections: list
    ambient_dim: int
    l_r: int | None = None
    n_s: tuple | None = None

    def __post_init__(self):
        if self.l < 1 or self.r <= 0:
            raise ValueError("need l >= 1 and r > 0")
        expected = budget_bits(self.l, self.r)
        if self.n_s is None:
            self.n_s = expected
        elif tuple(self.n_s) != expected:
            raise ValueError(f"budget inconsistency: n_s={tuple(self.n_s)} but the formula gives {expected}")
        self.n_s = tuple(self.n_s)
        if len(self.collections) != self.l:
            raise ValueError(f"need one subspace collection per scale ({self.l})")
        colls = []
        for s, coll in enumerate(self.collections, start=1):
            if not coll:
                raise ValueError(f"scale {s} has an empty collection")
            fixed = []
            for sub in coll:
                sub = tuple(int(i) for i in sub)
                if len(sub) > 2 ** (s + 1):
                    raise ValueError(f"scale {s} subspace dimension {len(sub)} exceeds 2^{s + 1}")
                if len(set(sub)) != len(sub) or min(sub) < 0 or max(sub) >= self.ambient_dim:
                    raise ValueError(f"bad subspace coordinates {sub}")
                fixed.append(sub)
            colls.append(fixed)
        self.collections = colls
        if self.l_r is None:
            self.l_r = self.proof_depth()
        if not 0 <= self.l_r <= self.l:
            raise ValueError("l_r must lie in [0, l]")

    def proof_depth(self) -> int:
        """Largest depth <= l - 2 whose bit total stays within 2^(l-1)."""
        depth, total = 0, 0
        for s in range(1, self.l - 1):
            total += self.n_s[s - 1]
            if total > 2 ** (self.l - 1):
                break
            depth = s
        return depth

    def collection_sizes(self) -> list[int]:
        return [len(c) for c in self.collections]

    def size_factors(self) -> list[int]:
        """``M_s = |collection_s| * 2^{n_s}`` for the netted scales."""
        return [len(self.collections[s - 1]) * 2 ** self.n_s[s - 1] for s in range(1, self.l_r + 1)]

    def total_size(self) -> int:
        return math.prod(self.size_factors())

    def flags(self) -> dict:
        bits_used = sum(self.n_s[: self.l_r])
        return {
            "depth_within_l_minus_2": self.l_r <= self.l - 2,
            "bits_within_2^(l-1)": bits_used <= 2 ** (self.l - 1),
            "size_within_2^(2^l)": math.log2(max(self.total_size(), 1)) <= 2**self.l,
        }


@dataclass
class MultiscaleNet:
    net: EpsNet
    budget: MultiscaleBudget
    chain: list
    scale_nets: list
    offsets: list

    def decode(self, parts) -> int:
        """Index into ``net.centers`` of the element assembled scale by scale.

        ``parts[s-1] = (subspace_index, t_s)`` with ``t_s`` given in the
        subspace's own coordinates.
        """
        b = self.budget
        index = 0
        for s in range(1, b.l_r + 1):
            sub_idx, t = parts[s - 1]
            scale = 2.0 ** (-b.r * (s - 1))
            _, j = self.scale_nets[s - 1][sub_idx].nearest(np.asarray(t) / scale)
            pos = self.offsets[s - 1][sub_idx] + int(j[0])
            index = index * b.size_factors()[s - 1] + pos
        return index


def multiscale_compose(budget: MultiscaleBudget, scale_nets=None, guard: int = MULTISCALE_GUARD) -> MultiscaleNet:
    """Weighted Minkowski-sum net over the netted scales.

    Elements are ``sum_s 2^(-r(s-1)) y^s`` with ``y^s`` from the union of the
    scale-s subspace nets. The radius is the explicit error chain: the final
    residual ``2^(-r l)``, a net term ``2^(-r(s-1)) * 3 * 2^(-n_s / 2^(s+1))``
    per netted scale and ``2^(-r(s-1))`` per remaining scale.
    """
    b = budget
    total = b.total_size()
    if total > guard:
        raise ValueError(f"composed net would have {total} elements, above the guard {guard}")
    if scale_nets is None:
        scale_nets = [
            [grid_net_ball(len(sub), b.n_s[s - 1]) for sub in b.collections[s - 1]] for s in range(1, b.l_r + 1)
        ]
    if len(scale_nets) < b.l_r:
        raise ValueError("need a net list for every netted scale")
    N = b.ambient_dim
    blocks, offsets = [], []
    for s in range(1, b.l_r + 1):
        nets = scale_nets[s - 1]
        subs = b.collections[s - 1]
        if len(nets) != len(subs):
            raise ValueError(f"scale {s}: {len(nets)} nets for {len(subs)} subspaces")
        rows, offs, pos = [], [], 0
        for sub, net in zip(subs, nets):
            if len(net) != 2 ** b.n_s[s - 1]:
                raise ValueError(f"scale {s}: net size {len(net)} != 2^{b.n_s[s - 1]}")
            if net.ambient.dim != len(sub):
                raise ValueError(f"scale {s}: net dimension does not match subspace {sub}")
            emb = np.zeros((len(net), N))
            emb[:, list(sub)] = net.centers
            rows.append(emb)
            offs.append(pos)
            pos += len(net)
        blocks.append(np.vstack(rows))
        offsets.append(offs)

    centers = np.zeros((1, N))
    for s, Y in enumerate(blocks, start=1):
        w = 2.0 ** (-b.r * (s - 1))
        centers = (centers[:, None, :] + w * Y[None, :, :]).reshape(-1, N)

    chain = [{"term": "residual", "s": b.l, "value": 2.0 ** (-b.r * b.l)}]
    for s in range(1, b.l + 1):
        w = 2.0 ** (-b.r * (s - 1))
        if s <= b.l_r:
            eps = BALL_NET_CONSTANT * 2.0 ** (-b.n_s[s - 1] / 2 ** (s + 1))
            chain.append({"term": "net", "s": s, "value": w * eps})
        else:
            chain.append({"term": "tail", "s": s, "value": w})
    radius = math.fsum(t["value"] for t in chain)
    cert = {
        "kind": "composed",
        "parents": ["grid-exact"] * b.l_r,
        "size_factors": b.size_factors(),
        "C_r": radius / 2.0 ** (-b.r * b.l_r),
        "flags": b.flags(),
    }
    net = EpsNet(centers, radius, NetAmbient.linf(N), cert)
    return MultiscaleNet(net, b, chain, scale_nets, offsets)


def sample_hr_member(budget: MultiscaleBudget, rng: np.random.Generator):
    """Random ``f = sum_s t_s + e`` with ``t_s`` in a scale-s subspace.

    ``||t_s||_inf <= 2^(-r(s-1))`` and ``||e||_inf <= 2^(-r l)``. Returns
    ``(f, parts)`` with ``parts[s-1] = (subspace_index, t_s)``.
    """
    b = budget
    N = b.ambient_dim
    f = np.zeros(N)
    parts = []
    for s in range(1, b.l + 1):
        coll = b.collections[s - 1]
        j = int(rng.integers(len(coll)))
        sub = coll[j]
        t = rng.uniform(-1.0, 1.0, len(sub))
        # push a random coordinate to the boundary so extremal members occur
        t[int(rng.integers(len(sub)))] = rng.choice([-1.0, 1.0])
        t *= 2.0 ** (-b.r * (s - 1)) * rng.uniform(0.0, 1.0) ** 0.25
        f[list(sub)] += t
        parts.append((j, t))
    f += rng.uniform(-1.0, 1.0, N) * 2.0 ** (-b.r * b.l)
    return f, parts
