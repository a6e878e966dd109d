"""Weak Relaxed Greedy Algorithm over a finite symmetric system.

Each step picks an atom ``phi_m`` (with sign) whose value under the norming
functional of the current residual is within a factor ``t_m`` of the best,
then moves ``G`` to the best point on the segment ``[G_{m-1}, phi_m]``.
``G_m`` therefore stays a convex combination of signed atoms.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .space import SEGMENT_TOL, LpSpace, lp_norm, norming_functional, segment_min
from .systems import CoefRepr, SymmetricSystem, synthesize

STOP_RESIDUAL = 1e-13
POLICIES = ("exact", "lazy-weak", "random-weak")


@dataclass(frozen=True)
class WeaknessSequence:
    """``t_k`` in [0, 1] for k = 1, 2, ...

    Modes: ``constant`` (``t_k = value``), ``explicit`` (``values[k-1]``),
    ``decaying`` (``t_k = k ** -exponent``).
    """

    mode: str = "constant"
    value: float = 1.0
    values: tuple = ()
    exponent: float = 0.0

    def __post_init__(self):
        if self.mode == "constant":
            if not 0.0 <= self.value <= 1.0:
                raise ValueError("constant weakness must lie in [0, 1]")
        elif self.mode == "explicit":
            object.__setattr__(self, "values", tuple(float(v) for v in self.values))
            if any(not 0.0 <= v <= 1.0 for v in self.values):
                raise ValueError("explicit weakness values must lie in [0, 1]")
        elif self.mode == "decaying":
            if self.exponent < 0:
                raise ValueError("decaying exponent must be >= 0")
        else:
            raise ValueError(f"unknown weakness mode {self.mode!r}")

    @classmethod
    def constant(cls, t: float) -> WeaknessSequence:
        return cls("constant", value=float(t))

    @classmethod
    def explicit(cls, values) -> WeaknessSequence:
        return cls("explicit", values=tuple(values))

    @classmethod
    def decaying(cls, exponent: float) -> WeaknessSequence:
        return cls("decaying", exponent=float(exponent))

    def __call__(self, k: int) -> float:
        if k < 1:
            raise ValueError("weakness index starts at 1")
        if self.mode == "constant":
            return self.value
        if self.mode == "explicit":
            if k > len(self.values):
                raise IndexError(f"explicit weakness sequence has only {len(self.values)} terms")
            return self.values[k - 1]
        return float(k) ** (-self.exponent)

    def head(self, m: int) -> np.ndarray:
        return np.array([self(k) for k in range(1, m + 1)])


@dataclass(frozen=True)
class Selection:
    index: int
    sign: int
    weak_value: float
    sup_value: float


def select_weak(
    system: SymmetricSystem,
    functional,
    G_prev,
    t_m: float,
    policy: str = "exact",
    rng: np.random.Generator | None = None,
) -> Selection:
    """Step (1): pick a signed atom with ``F(phi - G) >= t_m * sup_g F(g - G)``.

    ``exact`` takes the argmax (smallest index, then positive sign, on ties);
    ``lazy-weak`` the first qualifier in (index, +, -) order; ``random-weak``
    a uniform qualifier drawn from ``rng``.
    """
    if system.n_atoms == 0:
        raise ValueError("empty system")
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}")
    scores = system.atoms.T @ functional
    base = float(functional @ G_prev)
    mags = np.abs(scores)
    best = int(np.argmax(mags))
    sup_value = float(mags[best]) - base

    def pick(j, sgn):
        return Selection(int(j), sgn, float(sgn * scores[j]) - base, sup_value)

    if policy == "exact":
        return pick(best, 1 if scores[best] >= 0 else -1)

    threshold = t_m * sup_value
    # column 0 is +g_j, column 1 is -g_j; row-major order gives (index, +, -)
    values = np.stack([scores, -scores], axis=1) - base
    ok = values >= threshold
    ok[best, 0 if scores[best] >= 0 else 1] = True  # the argmax always qualifies
    flat = np.flatnonzero(ok.ravel())
    if policy == "lazy-weak":
        chosen = flat[0]
    else:
        if rng is None:
            raise ValueError("random-weak policy needs an rng")
        chosen = flat[int(rng.integers(flat.size))]
    j, col = divmod(int(chosen), 2)
    return pick(j, 1 if col == 0 else -1)


@dataclass
class StepRecord:
    step: int
    atom_index: int
    atom_sign: int
    lam: float
    residual_norm: float
    a_m: float | None
    weak_value: float
    sup_value: float
    t_m: float
    recursion_rhs: float | None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        return d


@dataclass
class GreedyTrace:
    records: list[StepRecord]
    pos_weights: np.ndarray
    neg_weights: np.ndarray
    b_used: float | None
    f0_norm: float
    G: np.ndarray
    f: np.ndarray = field(repr=False)
    system: SymmetricSystem = field(repr=False, default=None)

    @property
    def residual_norms(self) -> np.ndarray:
        """``||f_m||`` for m = 0..len(records)."""
        return np.array([self.f0_norm] + [r.residual_norm for r in self.records])

    @property
    def coefs(self) -> np.ndarray:
        return self.pos_weights - self.neg_weights

    def reconstruct(self) -> np.ndarray:
        """``G_m`` rebuilt from the weights over signed atoms."""
        return self.system.atoms @ self.coefs

    def weight_sum(self) -> float:
        return float(self.pos_weights.sum() + self.neg_weights.sum())

    def n_terms(self) -> int:
        return int(np.count_nonzero(self.coefs))

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r.to_dict()) + "\n" for r in self.records)


def recursion_constants(space: LpSpace) -> dict:
    """Constants of the per-step decay bound ``a_m <= a_{m-1}(1 - C5 t^p* a^p*)``."""
    q, gamma, p_star = space.smooth_q, space.gamma, space.conj_p
    c3 = 0.5 * (2.0 ** (q + 2.0) * gamma) ** (-1.0 / (q - 1.0))
    c4 = 2.0 ** (-p_star - 1.0)
    return {"C3": c3, "C4": c4, "C5": min(c3, c4), "p_star": p_star}


def wrga_run(
    system: SymmetricSystem,
    f,
    tau: WeaknessSequence,
    m_max: int,
    policy: str = "exact",
    b: float | None = None,
    seed: int = 0,
) -> GreedyTrace:
    space = system.space
    f = space.check(f).copy()
    f0 = lp_norm(f, space.p)
    if f0 == 0.0 and m_max > 0:
        raise ValueError("f must be nonzero")
    rng = np.random.default_rng(seed) if policy == "random-weak" else None
    c5 = recursion_constants(space)["C5"] if b is not None else None
    p_star = space.conj_p

    n = system.n_atoms
    pos = np.zeros(n)
    neg = np.zeros(n)
    G = np.zeros(space.dim)
    residual = f.copy()
    res_norm = f0
    records = []
    for m in range(1, m_max + 1):
        if res_norm <= STOP_RESIDUAL:
            break
        t_m = tau(m)
        F = norming_functional(space, residual)
        sel = select_weak(system, F, G, t_m, policy, rng)
        phi = sel.sign * system.atoms[:, sel.index]
        lam, _ = segment_min(space, f, G, phi, SEGMENT_TOL)
        G = (1.0 - lam) * G + lam * phi
        pos *= 1.0 - lam
        neg *= 1.0 - lam
        (pos if sel.sign > 0 else neg)[sel.index] += lam
        residual = f - G
        prev_norm = res_norm
        res_norm = lp_norm(residual, space.p)
        a_m = rhs = None
        if b is not None:
            a_m = res_norm - b
            a_prev = prev_norm - b
            rhs = a_prev * (1.0 - c5 * t_m**p_star * abs(a_prev) ** p_star)
        records.append(
            StepRecord(m, sel.index, sel.sign, lam, res_norm, a_m, sel.weak_value, sel.sup_value, t_m, rhs)
        )
    return GreedyTrace(records, pos, neg, b, f0, G, f, system)


@dataclass
class RecursionRow:
    step: int
    a_prev: float
    a_m: float
    t_m: float
    lambda1: float
    case: str
    rhs_grid: float
    rhs_decay: float
    slack_grid: float
    slack_decay: float
    checked: bool
    passed: bool


@dataclass
class RecursionReport:
    rows: list[RecursionRow]
    constants: dict

    @property
    def violations(self) -> list[RecursionRow]:
        return [r for r in self.rows if r.checked and not r.passed]

    @property
    def passed(self) -> bool:
        return not self.violations


def recursion_check(
    trace: GreedyTrace, space: LpSpace, tau: WeaknessSequence, tol: float = 1e-8, grid: int = 1001
) -> RecursionReport:
    """Check both per-step bounds on ``a_m = ||f_m|| - b`` along a trace.

    (i) ``a_m <= a_{m-1} min_lam (1 - lam t_m + 2 gamma (2 lam / a_{m-1})^q)``
    with the minimum over a ``grid``-point lambda grid, and
    (ii) ``a_m <= a_{m-1} (1 - C5 t_m^p* a_{m-1}^p*)``.
    Steps with ``a_{m-1} <= 10 tol`` are recorded but not checked.
    """
    if trace.b_used is None:
        raise ValueError("recursion check requires hull distance")
    consts = recursion_constants(space)
    q, gamma, p_star, c5 = space.smooth_q, space.gamma, consts["p_star"], consts["C5"]
    lams = np.linspace(0.0, 1.0, grid)
    norms = trace.residual_norms
    rows = []
    for rec in trace.records:
        a_prev = norms[rec.step - 1] - trace.b_used
        a_m = norms[rec.step] - trace.b_used
        t = tau(rec.step)
        checked = a_prev > 10.0 * tol
        if checked:
            rhs_grid = a_prev * float(np.min(1.0 - lams * t + 2.0 * gamma * (2.0 * lams / a_prev) ** q))
            lambda1 = (t * a_prev**q / (2.0 ** (q + 2.0) * gamma)) ** (1.0 / (q - 1.0))
            rhs_decay = a_prev * (1.0 - c5 * t**p_star * a_prev**p_star)
        else:
            rhs_grid = rhs_decay = lambda1 = math.nan
        slack_grid = rhs_grid - a_m
        slack_decay = rhs_decay - a_m
        passed = (not checked) or (slack_grid >= -tol and slack_decay >= -tol)
        rows.append(
            RecursionRow(
                rec.step, a_prev, a_m, t, lambda1,
                "lambda1<=1" if lambda1 <= 1.0 else "lambda1>1",
                rhs_grid, rhs_decay, slack_grid, slack_decay, checked, passed,
            )
        )
    return RecursionReport(rows, consts)


@dataclass
class TwoStageResult:
    coefs: np.ndarray
    error: float
    head: np.ndarray
    tail_mass: float
    trace: GreedyTrace | None

    def n_terms(self) -> int:
        return int(np.count_nonzero(self.coefs))


def two_stage_mterm(
    repr_: CoefRepr,
    m: int,
    tau: WeaknessSequence | None = None,
    policy: str = "exact",
    seed: int = 0,
) -> TwoStageResult:
    """Deterministic <= 2m-term approximant of an A_q element, q <= 1.

    Keeps the ``m`` largest coefficients exactly, rescales the remaining tail
    ``T`` by its l_1 mass ``s1`` (so ``T / s1`` lies in A_1) and runs ``m``
    relaxed greedy steps on it.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if not repr_.in_hull():
        raise ValueError("representation violates its hull constraint")
    tau = tau or WeaknessSequence.constant(1.0)
    system = repr_.system
    c = repr_.coefs
    order = np.argsort(-np.abs(c), kind="stable")
    head = np.zeros_like(c)
    keep = order[:m]
    head[keep] = c[keep]
    tail = c - head
    s1 = float(np.sum(np.abs(tail)))
    target = synthesize(repr_)
    trace = None
    approx = head.copy()
    if s1 > 0.0:
        T = system.atoms @ tail
        if lp_norm(T, system.space.p) > 0.0:
            trace = wrga_run(system, T / s1, tau, m, policy, seed=seed)
            approx = approx + s1 * trace.coefs
    error = lp_norm(target - system.atoms @ approx, system.space.p)
    return TwoStageResult(approx, error, head, s1, trace)
