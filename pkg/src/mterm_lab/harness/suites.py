"""Reusable experiment suites shared by ``run`` and ``verify-all``."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..greedy import WeaknessSequence, recursion_check, two_stage_mterm, wrga_run
from ..space import LpSpace
from ..systems import CoefRepr, SymmetricSystem, canonical_system, random_system, sample_hull, synthesize
from .rates import fit_rate
from .seeding import rng_for, seed_for


def make_system(space: LpSpace, kind: str, n_atoms: int, seed: int, name: str) -> SymmetricSystem:
    if kind == "canonical":
        return canonical_system(space)
    if kind == "random":
        return random_system(space, n_atoms, seed_for(seed, name))
    raise ValueError(f"unknown system kind {kind!r}")


@dataclass
class RunSummary:
    p: float
    t: float
    policy: str
    run: int
    steps: int
    checked: int
    violations: int
    min_slack_grid: float
    min_slack_decay: float
    certificate_ok: bool
    monotone: bool
    hull_ok: bool
    residuals: np.ndarray
    b: float


def greedy_suite(
    seed: int,
    p: float,
    t: float,
    policy: str,
    n_runs: int,
    dim: int,
    n_atoms: int,
    m_max: int,
    tol: float = 1e-8,
    tag: str = "greedy",
):
    """Seeded WRGA runs on f in A_1 (b = 0) with per-step checks."""
    space = LpSpace(dim, p)
    tau = WeaknessSequence.constant(t)
    out = []
    for run in range(n_runs):
        name = f"{tag}/p={p:g}/t={t:g}/run={run}"
        system = random_system(space, n_atoms, seed_for(seed, name + "/system"))
        f = synthesize(sample_hull(system, 1.0, seed_for(seed, name + "/f")))
        trace = wrga_run(system, f, tau, m_max, policy, b=0.0, seed=seed_for(seed, name + "/policy"))
        out.append(summarize_run(trace, space, tau, tol, p, t, policy, run))
    return out


def summarize_run(trace, space, tau, tol, p, t, policy, run) -> RunSummary:
    report = recursion_check(trace, space, tau, tol)
    checked = [r for r in report.rows if r.checked]
    cert = all(r.weak_value >= r.t_m * r.sup_value - 1e-12 for r in trace.records)
    norms = trace.residual_norms
    monotone = bool(np.all(np.diff(norms) <= 1e-12))
    recon = trace.G - trace.reconstruct()
    hull_ok = (
        float(np.max(np.abs(recon), initial=0.0)) <= 1e-9
        and trace.weight_sum() <= 1.0 + 1e-9
        and np.all(trace.pos_weights >= 0)
        and np.all(trace.neg_weights >= 0)
        and trace.n_terms() <= len(trace.records)
    )
    return RunSummary(
        p, t, policy, run, len(trace.records), len(checked), len(report.violations),
        min((r.slack_grid for r in checked), default=math.inf),
        min((r.slack_decay for r in checked), default=math.inf),
        cert, monotone, bool(hull_ok), norms, trace.b_used,
    )


def rate_fit_for_run(summary: RunSummary, p_star: float, slack: float, m_range=(8, 60)):
    """Fit log a_m vs log m; ``None`` when the residual vanished too early."""
    a = summary.residuals - summary.b
    pts = [(m, a[m]) for m in range(1, len(a))]
    try:
        return fit_rate(pts, -1.0 / p_star, slack, m_range)
    except ValueError:
        return None


def extremal_hull_sample(system: SymmetricSystem, hull_q: float, rng: np.random.Generator) -> CoefRepr:
    """Flat member of A_q on a random support of log-uniform size.

    ``|c_j| = k^(-1/q)`` on ``k`` atoms with random signs, so
    ``sum |c_j|^q = 1``. Across sizes these are the near-extremal elements
    that realize the worst-case m-term rate.
    """
    n = system.n_atoms
    k = int(round(2.0 ** rng.uniform(0.0, math.log2(n))))
    k = min(max(k, 1), n)
    support = rng.choice(n, k, replace=False)
    coefs = np.zeros(n)
    coefs[support] = np.where(rng.random(k) < 0.5, -1.0, 1.0) * k ** (-1.0 / hull_q)
    return CoefRepr(system, coefs, hull_q)


def hull_rate_study(
    seed: int, kind: str, p: float, hull_q: float, dim: int, n_atoms: int, ms, n_samples: int, slack: float = 0.15
):
    """Max two-stage error over extremal hull samples for each m, with a rate fit."""
    space = LpSpace(dim, p)
    name = f"hull-rate/{kind}/p={p:g}/q={hull_q:g}"
    system = make_system(space, kind, n_atoms, seed, name + "/system")
    rng = rng_for(seed, name + "/samples")
    samples = [extremal_hull_sample(system, hull_q, rng) for _ in range(n_samples)]
    max_err = []
    for m in ms:
        errs = [two_stage_mterm(s, m).error for s in samples]
        max_err.append(max(errs))
    target = -(1.0 / hull_q - max(0.5, 1.0 / p))
    fit = fit_rate(list(zip(ms, max_err)), target, slack)
    return max_err, fit
