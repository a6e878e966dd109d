"""Acceptance criteria, each runnable on its own and through ``verify-all``.

Every criterion function takes the top-level seed and returns a
:class:`CriterionResult` holding a pass flag, a small summary and the
tables written to disk. Tolerances are fixed here, not calibrated.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..entropy import (
    BALL_NET_CONSTANT,
    MultiscaleBudget,
    NetAmbient,
    compose_product_net,
    empirical_entropy_curve,
    grid_net_ball,
    multiscale_compose,
    sample_hr_member,
    sample_net,
    verify_coverage,
)
from ..greedy import WeaknessSequence, recursion_check, wrga_run
from ..oracle import sigma_m_bruteforce, sigma_m_canonical, tail_bound_check
from ..space import LpSpace, lp_norm, norm, norming_functional
from ..systems import canonical_system, hull_distance_l2, random_system, sample_hull, synthesize
from . import io
from .rates import fit_rate
from .seeding import rng_for, seed_for
from .suites import greedy_suite, hull_rate_study, rate_fit_for_run


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    summary: dict
    tables: dict = field(default_factory=dict)
    hard: bool = True

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number:2d} {self.name}: {_short(self.summary)}"


def _short(summary: dict) -> str:
    keys = summary.get("_headline") or list(summary)[:3]
    return ", ".join(f"{k}={io.fmt(summary[k])}" for k in keys if k in summary)


# 1 ---------------------------------------------------------------------------


def duality(seed: int) -> CriterionResult:
    rng = rng_for(seed, "duality")
    ps, dims = (1.5, 2.0, 3.0, 4.0), (2, 10, 100)
    rows, worst_pair, worst_norm = [], 0.0, 0.0
    for i in range(1000):
        p, d = ps[i % 4], dims[(i // 4) % 3]
        space = LpSpace(d, p)
        f = rng.standard_normal(d) * 10.0 ** rng.uniform(-3, 3)
        g = norming_functional(space, f)
        nf = norm(space, f)
        pair_err = abs(float(g @ f) - nf) / nf
        dual_err = abs(lp_norm(g, space.dual_p) - 1.0)
        worst_pair, worst_norm = max(worst_pair, pair_err), max(worst_norm, dual_err)
        rows.append((i, p, d, pair_err, dual_err))
    passed = worst_pair <= 1e-9 and worst_norm <= 1e-9
    summary = {"pairs": 1000, "max_rel_pairing_error": worst_pair, "max_dual_norm_error": worst_norm}
    summary["_headline"] = ["max_rel_pairing_error", "max_dual_norm_error"]
    return CriterionResult(1, "duality", passed, summary,
                           {"duality": (("i", "p", "dim", "rel_pairing_error", "dual_norm_error"), rows)})


# 2 ---------------------------------------------------------------------------


def worked_example(seed: int) -> CriterionResult:
    space = LpSpace(2, 2.0)
    system = canonical_system(space)
    trace = wrga_run(system, np.array([0.5, 0.5]), WeaknessSequence.constant(1.0), 2, "exact", b=0.0)
    norms = [r.residual_norm for r in trace.records]
    lams = [r.lam for r in trace.records]
    atoms = [r.atom_index for r in trace.records]
    exp_norms, exp_lams = [0.5, math.sqrt(0.05)], [0.5, 0.4]
    err = max(max(abs(a - b) for a, b in zip(norms, exp_norms)), max(abs(a - b) for a, b in zip(lams, exp_lams)))
    g_err = float(np.max(np.abs(trace.G - np.array([0.3, 0.4]))))
    report = recursion_check(trace, space, WeaknessSequence.constant(1.0), 1e-8)
    passed = err <= 1e-9 and g_err <= 1e-9 and atoms == [0, 1] and report.passed
    rows = [(r.step, r.atom_index, r.atom_sign, r.lam, r.residual_norm) for r in trace.records]
    summary = {"max_abs_error": err, "G_error": g_err, "atoms": atoms, "recursion_ok": report.passed,
               "_headline": ["max_abs_error", "G_error"]}
    return CriterionResult(2, "worked-example", passed, summary,
                           {"worked_example": (("step", "atom_index", "atom_sign", "lambda", "residual_norm"), rows)})


# 3, 4 ------------------------------------------------------------------------

GREEDY_CASES = ((1.5, 1.0, "exact"), (1.5, 0.5, "lazy-weak"), (2.0, 1.0, "exact"),
                (2.0, 0.5, "lazy-weak"), (3.0, 1.0, "exact"), (3.0, 0.5, "lazy-weak"))


def _greedy_runs(seed: int):
    runs = []
    for p, t, policy in GREEDY_CASES:
        runs += greedy_suite(seed, p, t, policy, n_runs=50, dim=40, n_atoms=80, m_max=60, tol=1e-8)
    return runs


def recursion_suite(seed: int, runs=None) -> CriterionResult:
    runs = runs if runs is not None else _greedy_runs(seed)
    rows = [(r.p, r.t, r.policy, r.run, r.steps, r.checked, r.violations, r.min_slack_grid,
             r.min_slack_decay, r.certificate_ok, r.monotone, r.hull_ok) for r in runs]
    violations = sum(r.violations for r in runs)
    structural = all(r.certificate_ok and r.monotone and r.hull_ok for r in runs)
    passed = violations == 0 and structural
    summary = {"runs": len(runs), "checked_steps": sum(r.checked for r in runs), "violations": violations,
               "step1_monotone_hull_ok": structural,
               "min_slack_grid": min(r.min_slack_grid for r in runs),
               "min_slack_decay": min(r.min_slack_decay for r in runs),
               "_headline": ["runs", "checked_steps", "violations"]}
    header = ("p", "t", "policy", "run", "steps", "checked", "violations", "min_slack_grid",
              "min_slack_decay", "certificate_ok", "monotone", "hull_ok")
    return CriterionResult(3, "recursion-inequality", passed, summary, {"recursion": (header, rows)})


def rate_shape(seed: int, runs=None) -> CriterionResult:
    runs = runs if runs is not None else _greedy_runs(seed)
    rows, ok_all, vanished, worst = [], True, 0, -math.inf
    for r in runs:
        p_star = max(r.p / (r.p - 1.0), 2.0)
        fit = rate_fit_for_run(r, p_star, 0.15, (8, 60))
        limit = -1.0 / p_star + 0.15
        if fit is None:
            vanished += 1
            rows.append((r.p, r.t, r.run, "nan", limit, "vanished", True))
            continue
        ok = fit.slope <= limit
        ok_all &= ok
        worst = max(worst, fit.slope - limit)
        rows.append((r.p, r.t, r.run, fit.slope, limit, fit.n_points, ok))
    summary = {"runs": len(runs), "all_within": ok_all, "worst_margin": worst, "vanished_residuals": vanished,
               "_headline": ["all_within", "worst_margin"]}
    return CriterionResult(4, "rate-shape", ok_all, summary,
                           {"rate_shape": (("p", "t", "run", "slope", "slope_limit", "n_points", "pass"), rows)})


# 5 ---------------------------------------------------------------------------


def hilbert_bound(seed: int) -> CriterionResult:
    space = LpSpace(40, 2.0)
    tau = WeaknessSequence.constant(1.0)
    rows, overall = [], 0.0
    for run in range(50):
        name = f"hilbert/run={run}"
        system = random_system(space, 80, seed_for(seed, name + "/system"))
        f = synthesize(sample_hull(system, 1.0, seed_for(seed, name + "/f")))
        trace = wrga_run(system, f, tau, 128, "exact")
        norms = trace.residual_norms
        ms = np.arange(len(norms))
        running = float(np.max(ms * norms**2))
        overall = max(overall, running)
        rows.append((run, len(trace.records), running))
    passed = overall <= 8.0
    summary = {"runs": 50, "max_m_times_residual_sq": overall, "limit": 8.0,
               "_headline": ["max_m_times_residual_sq", "limit"]}
    return CriterionResult(5, "hilbert-boundedness", passed, summary,
                           {"hilbert": (("run", "steps", "max_m_times_residual_sq"), rows)})


# 6 ---------------------------------------------------------------------------


def offset_convergence(seed: int) -> CriterionResult:
    space = LpSpace(40, 2.0)
    tau = WeaknessSequence.constant(1.0)
    b = 0.3
    rows, ok = [], True
    for run in range(10):
        name = f"offset/run={run}"
        system = random_system(space, 20, seed_for(seed, name + "/system"))
        phi = synthesize(sample_hull(system, 1.0, seed_for(seed, name + "/phi")))
        # unit vector orthogonal to span(atoms)
        rng = rng_for(seed, name + "/v")
        Q, _ = np.linalg.qr(system.atoms)
        v = rng.standard_normal(space.dim)
        v -= Q @ (Q.T @ v)
        v *= b / np.linalg.norm(v)
        f = phi + v
        trace = wrga_run(system, f, tau, 128, "exact", b=b)
        report = recursion_check(trace, space, tau, 1e-8)
        hd = hull_distance_l2(system, f, tol=1e-10, max_iter=20000)
        final = trace.residual_norms[-1]
        gap = abs(final - b)
        run_ok = gap <= 0.05 and report.passed and abs(hd.b_upper - b) <= 1e-6
        ok &= run_ok
        rows.append((run, final, gap, len(report.violations), hd.b_lower, hd.b_upper, run_ok))
    summary = {"runs": 10, "all_ok": ok, "max_gap": max(r[2] for r in rows),
               "_headline": ["all_ok", "max_gap"]}
    header = ("run", "final_residual", "gap_to_b", "recursion_violations", "hull_b_lower", "hull_b_upper", "pass")
    return CriterionResult(6, "offset-convergence", ok, summary, {"offset": (header, rows)})


# 7 ---------------------------------------------------------------------------


def sigma_exactness(seed: int) -> CriterionResult:
    rng = rng_for(seed, "sigma/agreement")
    rows, worst = [], 0.0
    for i in range(100):
        d = 3 + i % 8
        m = 1 + i % 3
        space = LpSpace(d, 2.0)
        x = rng.standard_normal(d)
        a = sigma_m_canonical(x, m, 2.0).error
        bf = sigma_m_bruteforce(canonical_system(space), x, m).error
        worst = max(worst, abs(a - bf))
        rows.append((i, d, m, a, bf))
    tail_rows, tail_ok = [], True
    system = canonical_system(LpSpace(64, 2.0))
    for q, p in ((1.0, 2.0), (0.5, 2.0), (1.0, 3.0)):
        fails = 0
        for i in range(1000):
            c = sample_hull(system, q, seed_for(seed, f"sigma/tail/q={q:g}/p={p:g}/{i}")).coefs
            m = 1 + i % 63
            _, _, ok = tail_bound_check(c, m, p, q)
            fails += not ok
        tail_ok &= fails == 0
        tail_rows.append((q, p, 1000, fails))
    passed = worst <= 1e-10 and tail_ok
    summary = {"max_disagreement": worst, "tail_bound_all_pass": tail_ok,
               "_headline": ["max_disagreement", "tail_bound_all_pass"]}
    return CriterionResult(7, "sigma-exactness", passed, summary, {
        "sigma_agreement": (("i", "dim", "m", "canonical", "bruteforce"), rows),
        "tail_bound": (("q", "p", "samples", "failures"), tail_rows),
    })


# 8 ---------------------------------------------------------------------------

HULL_RATE_MS = (4, 8, 16, 32, 64)


def hull_rate(seed: int) -> CriterionResult:
    rows, fits, ok = [], [], True
    for kind in ("canonical", "random"):
        for p in (2.0, 3.0):
            for q in (0.5, 1.0):
                errs, fit = hull_rate_study(seed, kind, p, q, 256, 512, HULL_RATE_MS, 200, 0.15)
                ok &= fit.passed
                for m, e in zip(HULL_RATE_MS, errs):
                    rows.append((kind, p, q, m, e))
                fits.append((kind, p, q, fit.slope, fit.target, fit.slope - fit.target, fit.passed))
    failing = [f"{k}/p={p:g}/q={q:g}" for k, p, q, *_, passed in fits if not passed]
    summary = {"cases": len(fits), "failing_cases": failing or "none",
               "max_abs_deviation": max(abs(f[5]) for f in fits),
               "_headline": ["failing_cases", "max_abs_deviation"]}
    return CriterionResult(8, "hull-rate", ok, summary, {
        "hull_rate_errors": (("system", "p", "q", "m", "max_error"), rows),
        "hull_rate_fits": (("system", "p", "q", "slope", "target", "deviation", "pass"), fits),
    })


# 9 ---------------------------------------------------------------------------


def ball_nets(seed: int) -> CriterionResult:
    rng = rng_for(seed, "ball-nets")
    rows, ok = [], True
    for d in (1, 2, 3, 4):
        pts = rng.uniform(-1.0, 1.0, (100_000, d))
        # include the cube's corners, the hardest points for midpoint grids
        corners = np.array(np.meshgrid(*[[-1.0, 1.0]] * d, indexing="ij")).reshape(d, -1).T
        pts = np.vstack([corners, pts])[:100_000]
        for k in range(17):
            net = grid_net_ball(d, k)
            bound = BALL_NET_CONSTANT * 2.0 ** (-k / d)
            cov = verify_coverage(net, pts)
            good = len(net) == 2**k and net.radius <= bound and cov.passed
            ok &= good
            rows.append((d, k, len(net), net.radius, bound, cov.max_distance, cov.violations, good))
    summary = {"nets": len(rows), "all_ok": ok, "max_radius_over_bound": max(r[3] / r[4] for r in rows),
               "_headline": ["nets", "all_ok", "max_radius_over_bound"]}
    header = ("d", "k", "size", "radius", "bound", "max_observed", "violations", "pass")
    return CriterionResult(9, "ball-nets", ok, summary, {"ball_nets": (header, rows)})


# 10 --------------------------------------------------------------------------


def composition(seed: int) -> CriterionResult:
    rng = rng_for(seed, "composition")
    rows, ok = [], True
    for d, k1, k2 in ((1, 1, 1), (2, 2, 4), (2, 4, 2), (3, 3, 6)):
        amb = NetAmbient.linf(d)
        A, B = grid_net_ball(d, k1), grid_net_ball(d, k2)
        C = compose_product_net(A, B)
        pts = rng.uniform(-1.0, 1.0, (10_000, d))
        cov = verify_coverage(C, pts)
        good = len(C) == len(A) * len(B) and C.radius == A.radius * B.radius and cov.passed
        ok &= good
        rows.append(("grid*grid", d, k1, k2, len(C), C.radius, cov.max_distance, cov.violations, good))
        # a sampled compact: the l_1 ball in l_inf^d
        system = canonical_system(LpSpace(d, 2.0))
        samples = np.array([synthesize(sample_hull(system, 1.0, seed_for(seed, f"comp/{d}/{k1}/{k2}/{i}")))
                            for i in range(10_000)])
        SA = sample_net(samples, 2**k1, amb)
        SC = compose_product_net(SA, B)
        cov = verify_coverage(SC, samples)
        good = len(SC) == len(SA) * len(B) and SC.radius == SA.radius * B.radius and cov.passed
        ok &= good
        rows.append(("sampled*grid", d, k1, k2, len(SC), SC.radius, cov.max_distance, cov.violations, good))
    summary = {"compositions": len(rows), "all_ok": ok, "_headline": ["compositions", "all_ok"]}
    header = ("kind", "d", "k_A", "k_ball", "size", "radius", "max_observed", "violations", "pass")
    return CriterionResult(10, "product-composition", ok, summary, {"composition": (header, rows)})


# 11 --------------------------------------------------------------------------


def multiscale_instance(seed: int) -> MultiscaleBudget:
    rng = rng_for(seed, "multiscale/collections")
    N = 12
    colls = []
    for s in (1, 2, 3):
        dim = min(2 ** (s + 1), 8)
        colls.append([tuple(int(i) for i in np.sort(rng.choice(N, dim, replace=False))) for _ in range(4)])
    return MultiscaleBudget(3, 1.0, colls, N, l_r=1)


def multiscale(seed: int) -> CriterionResult:
    budget = multiscale_instance(seed)
    expected = tuple(math.floor(2 * (3 - s) * 2 ** (s + 1)) for s in (1, 2, 3))
    mnet = multiscale_compose(budget)
    size_ok = len(mnet.net) == budget.total_size() == math.prod(budget.size_factors())
    rng = rng_for(seed, "multiscale/members")
    members, decoded = [], []
    for _ in range(200):
        f, parts = sample_hr_member(budget, rng)
        members.append(f)
        decoded.append(mnet.net.centers[mnet.decode(parts)])
    members = np.array(members)
    decode_dist = np.abs(members - np.array(decoded)).max(axis=1)
    nearest, _ = mnet.net.nearest(members)
    radius = mnet.net.radius
    cover_ok = bool(np.all(decode_dist <= radius + 1e-12)) and bool(np.all(nearest <= decode_dist + 1e-12))
    mnet.net.certificate["sampled"] = {"n_samples": 200, "max_observed_distance": float(decode_dist.max())}
    passed = size_ok and cover_ok and budget.n_s == expected
    rows = [(i, decode_dist[i], nearest[i], radius) for i in range(200)]
    chain_rows = [(t["term"], t["s"], t["value"]) for t in mnet.chain]
    summary = {"n_s": list(budget.n_s), "l_r": budget.l_r, "size": len(mnet.net), "size_factors": budget.size_factors(),
               "radius": radius, "max_decode_distance": float(decode_dist.max()),
               "max_nearest_distance": float(nearest.max()), "flags": budget.flags(),
               "_headline": ["size", "radius", "max_decode_distance"]}
    return CriterionResult(11, "multiscale-composer", passed, summary, {
        "multiscale_members": (("member", "decode_distance", "nearest_distance", "budget"), rows),
        "multiscale_chain": (("term", "s", "value"), chain_rows),
    })


# 12 --------------------------------------------------------------------------


def entropy_brackets(seed: int) -> CriterionResult:
    n = 16
    space = LpSpace(n, 2.0)
    system = canonical_system(space)
    rows, ok, report = [], True, {}
    for q in (0.5, 1.0):
        rng = rng_for(seed, f"entropy/q={q:g}")
        samples = []
        for i in range(4096):
            k = int(round(2.0 ** rng.uniform(0.0, math.log2(n))))
            support = rng.choice(n, min(max(k, 1), n), replace=False)
            samples.append(synthesize(sample_hull(system, q, seed_for(seed, f"entropy/q={q:g}/{i}"), support)))
        curve = empirical_entropy_curve(np.array(samples), 10, space)
        up = np.array([c.eps_upper for c in curve])
        lo = np.array([c.eps_lower for c in curve])
        good = bool(np.all(lo <= up) and np.all(np.diff(up) <= 0) and np.all(np.diff(lo) <= 0))
        ok &= good
        for c in curve:
            rows.append((q, c.k, c.eps_upper, c.eps_lower))
        ks = np.arange(2, 9)
        shape = (np.log2(2 * n / ks) / ks) ** (1.0 / q - 0.5)
        emp = fit_rate(list(zip(ks, up[2:9])), 0.0, math.inf)
        ref = fit_rate(list(zip(ks, shape)), 0.0, math.inf)
        report[f"q={q:g}"] = {"empirical_slope": emp.slope, "shape_slope": ref.slope, "monotone_bracketed": good}
    summary = {"all_monotone_bracketed": ok, "sanity": report, "_headline": ["all_monotone_bracketed"]}
    return CriterionResult(12, "entropy-brackets", ok, summary,
                           {"entropy_curve": (("q", "k", "eps_upper", "eps_lower"), rows)})


CRITERIA = {
    1: duality,
    2: worked_example,
    3: recursion_suite,
    4: rate_shape,
    5: hilbert_bound,
    6: offset_convergence,
    7: sigma_exactness,
    8: hull_rate,
    9: ball_nets,
    10: composition,
    11: multiscale,
    12: entropy_brackets,
}


def run_criterion(number: int, seed: int) -> CriterionResult:
    return CRITERIA[number](seed)


def write_result(result: CriterionResult, out_dir: Path) -> None:
    stem = f"criterion_{result.number:02d}"
    for name, (header, rows) in result.tables.items():
        io.write_csv(out_dir / f"{stem}_{name}.csv", header, rows)
    doc = {k: v for k, v in result.summary.items() if not k.startswith("_")}
    io.write_json(out_dir / f"{stem}_summary.json",
                  {"criterion": result.number, "name": result.name, "passed": result.passed, "summary": doc})


def verify_all(seed: int = 42, out_dir=None, jobs: int = 1, numbers=None, echo=None) -> list[CriterionResult]:
    """Run every criterion; failures never stop the others."""
    numbers = list(numbers or CRITERIA)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = {n: pool.submit(_safe_run, n, seed) for n in numbers}
            results = [futures[n].result() for n in numbers]
    else:
        results = []
        for n in numbers:
            res = _safe_run(n, seed)
            if echo:
                echo(res.line())
            results.append(res)
    if out_dir is not None:
        out = Path(out_dir)
        for res in results:
            write_result(res, out)
        io.write_json(out / "summary.json", {
            "seed": seed,
            "passed": all(r.passed for r in results),
            "criteria": [{"criterion": r.number, "name": r.name, "passed": r.passed} for r in results],
        })
    return results


def _safe_run(number: int, seed: int) -> CriterionResult:
    try:
        return run_criterion(number, seed)
    except Exception as exc:  # reported per criterion, siblings keep running
        return CriterionResult(number, CRITERIA[number].__name__, False, {"error": f"{type(exc).__name__}: {exc}"})
