import json
import math

import numpy as np
import pytest

from mterm_lab.cli import main
from mterm_lab.harness import io
from mterm_lab.harness.config import ConfigError, parse_config
from mterm_lab.harness.experiments import run
from mterm_lab.harness.rates import fit_rate
from mterm_lab.harness.seeding import rng_for, seed_for

MS = range(1, 33)


def test_fit_examples():
    assert fit_rate([(m, 1.0 / m) for m in MS], -1.0).slope == pytest.approx(-1.0, abs=1e-12)
    fit = fit_rate([(m, 3.0 * m**-0.5) for m in MS], -0.5)
    assert fit.slope == pytest.approx(-0.5, abs=1e-12)
    assert fit.intercept == pytest.approx(math.log(3.0), abs=1e-12)
    assert fit.passed
    assert fit_rate([(m, 2.0) for m in MS], 0.0).slope == pytest.approx(0.0, abs=1e-12)


def test_fit_drops_tiny_and_out_of_range():
    vals = [(m, 1.0 / m) for m in MS] + [(40, 0.0), (50, 1e-14)]
    fit = fit_rate(vals, -1.0, m_range=(4, 16))
    assert fit.n_points == 13 and fit.m_range == (4.0, 16.0)
    with pytest.raises(ValueError, match="at least 3"):
        fit_rate([(1, 1.0), (2, 0.5), (3, 0.0)], -1.0)


def test_fit_slack():
    fit = fit_rate([(m, m**-0.8) for m in MS], -0.5, slack=0.15)
    assert not fit.passed


def test_substreams_named_and_stable():
    a = rng_for(42, "x").standard_normal(4)
    np.testing.assert_array_equal(a, rng_for(42, "x").standard_normal(4))
    assert not np.array_equal(a, rng_for(42, "y").standard_normal(4))
    assert not np.array_equal(a, rng_for(43, "x").standard_normal(4))
    assert 0 <= seed_for(42, "x") < 2**63


def test_csv_format(tmp_path):
    p = tmp_path / "t.csv"
    io.write_csv(p, ("a", "b", "c"), [(1, 0.1, True), (2, math.inf, "s")])
    assert p.read_bytes() == b"a,b,c\n1,0.10000000000000001,true\n2,inf,s\n"
    header, rows = io.read_csv(p)
    assert float(rows[0][1]) == 0.1


def test_config_rejects_unknown_and_reports_paths():
    with pytest.raises(ConfigError) as err:
        parse_config({"kind": "wrga-rate", "space": {"dim": 3, "q": 2}})
    assert "space.q" in str(err.value)
    with pytest.raises(ConfigError, match="kind"):
        parse_config({"kind": "nope"})
    with pytest.raises(ConfigError, match="tau"):
        parse_config({"kind": "wrga-rate", "tau": {"mode": "explicit"}})


def test_config_defaults():
    cfg = parse_config({"kind": "ball-net"})
    assert cfg.seed == 42 and cfg.tolerances.slack == 0.15


def test_wrga_rate_example(tmp_path):
    cfg = parse_config({
        "kind": "wrga-rate",
        "space": {"dim": 100, "p": 2.0},
        "system": {"kind": "random", "n_atoms": 200},
        "m": {"m_max": 128},
        "samples": {"n_runs": 5},
    })
    out = run(cfg, tmp_path)
    assert out.passed
    assert out.summary["fit"]["slope"] <= -0.45
    assert (tmp_path / "wrga_rate.csv").exists()
    assert json.loads((tmp_path / "run_summary.json").read_text())["passed"]


@pytest.mark.parametrize("kind,extra", [
    ("recursion-suite", {"samples": {"n_runs": 2}, "m": {"m_max": 20}}),
    ("sigma-bound", {"samples": {"n_samples": 20}, "hull_q": 0.5, "space": {"dim": 64, "p": 2.0}}),
    ("entropy-curve", {"samples": {"n_samples": 64}}),
    ("ball-net", {"nets": {"d": [1, 2], "k_max": 6, "n_check": 500}}),
    ("multiscale", {"multiscale": {"l_r": 1, "n_members": 20}}),
    ("hull-rate", {"system": {"kind": "canonical"}, "space": {"dim": 64, "p": 2.0}, "hull_q": 0.5,
                   "samples": {"n_samples": 30}, "m": {"ms": [2, 4, 8, 16]}}),
])
def test_run_kinds(tmp_path, kind, extra):
    out = run(parse_config({"kind": kind, **extra}), tmp_path)
    assert out.passed, out.summary
    assert all(f.exists() for f in out.files)


def test_run_is_byte_reproducible(tmp_path):
    cfg = parse_config({"kind": "recursion-suite", "samples": {"n_runs": 2}, "m": {"m_max": 15}})
    run(cfg, tmp_path / "a")
    run(cfg, tmp_path / "b")
    for name in ("recursion_suite.csv", "run_summary.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_numerical_failure_is_reported(tmp_path):
    # too few m values for a rate fit: reported, not raised
    cfg = parse_config({"kind": "hull-rate", "space": {"dim": 8}, "system": {"kind": "canonical"},
                        "samples": {"n_samples": 3}, "m": {"ms": [1, 2]}})
    out = run(cfg, tmp_path)
    assert not out.passed and "error" in out.summary


def test_cli_malformed_config(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"kind": "wrga-rate", "bogus": 1}))
    assert main(["run", str(bad)]) != 0
    assert "bogus" in capsys.readouterr().err
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    assert main(["run", str(broken)]) != 0


def test_cli_trace_and_plot_data(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"kind": "wrga-rate", "m": {"m_max": 5}, "output": {"out_dir": str(tmp_path / "o")}}))
    assert main(["trace", str(cfg)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 5 and json.loads(lines[0])["step"] == 1
    # five steps are too few for the asymptotic slope; only the artifact matters here
    assert main(["run", str(cfg)]) in (0, 1)
    capsys.readouterr()
    assert main(["plot-data", str(tmp_path / "o" / "wrga_rate.csv")]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "x,y,series" and out[1].endswith(",max_residual")
    assert len(out) == 1 + 2 * 6


def test_verify_all_parallel_matches_serial(tmp_path):
    from mterm_lab.harness.criteria import verify_all

    numbers = [1, 2, 7]
    serial = verify_all(42, tmp_path / "s", jobs=1, numbers=numbers)
    parallel = verify_all(42, tmp_path / "p", jobs=2, numbers=numbers)
    assert [r.passed for r in serial] == [r.passed for r in parallel] == [True] * 3
    for f in sorted((tmp_path / "s").iterdir()):
        assert f.read_bytes() == (tmp_path / "p" / f.name).read_bytes()
