import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mterm_lab.space import (
    DimensionError,
    LpSpace,
    lp_norm,
    modulus_smoothness_curve,
    modulus_smoothness_estimate,
    norm,
    norming_functional,
    segment_min,
)


@pytest.mark.parametrize("p", [1.0, 0.5, math.inf])
def test_space_rejects_non_smooth(p):
    with pytest.raises(ValueError):
        LpSpace(3, p)


@pytest.mark.parametrize("p,q,gamma,conj", [(1.5, 1.5, 1 / 1.5, 3.0), (2.0, 2.0, 0.5, 2.0), (3.0, 2.0, 1.0, 2.0)])
def test_smoothness_parameters(p, q, gamma, conj):
    s = LpSpace(4, p)
    assert s.smooth_q == q
    assert s.gamma == pytest.approx(gamma)
    assert s.conj_p == pytest.approx(conj)
    assert s.conj_p == pytest.approx(max(p / (p - 1), 2.0))


def test_norm_examples():
    assert norm(LpSpace(2, 2.0), [3.0, 4.0]) == pytest.approx(5.0, abs=1e-15)
    assert norm(LpSpace(2, 3.0), [0.0, 0.0]) == 0.0
    assert norm(LpSpace(2, 3.0), [1.0, 1.0]) == pytest.approx(2 ** (1 / 3), abs=1e-12)
    assert lp_norm(np.array([1.0, -3.0]), math.inf) == 3.0


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        norm(LpSpace(3, 2.0), [1.0, 2.0])


def test_norming_functional_examples():
    s4 = LpSpace(2, 4.0)
    np.testing.assert_allclose(norming_functional(LpSpace(3, 3.0), [1.0, 0, 0]), [1.0, 0, 0])
    np.testing.assert_allclose(norming_functional(LpSpace(2, 2.0), [3.0, 4.0]), [0.6, 0.8])
    g = norming_functional(s4, [1.0, 1.0])
    np.testing.assert_allclose(g, [2 ** -0.75] * 2, atol=1e-15)
    assert lp_norm(g, 4 / 3) == pytest.approx(1.0, abs=1e-12)


def test_norming_functional_zero():
    with pytest.raises(ValueError, match="undefined at zero"):
        norming_functional(LpSpace(2, 2.0), [0.0, 0.0])


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31), st.sampled_from([1.5, 2.0, 3.0, 4.0]), st.integers(1, 30), st.floats(-6, 6))
def test_norming_functional_duality(seed, p, d, log_scale):
    s = LpSpace(d, p)
    f = np.random.default_rng(seed).standard_normal(d) * 10.0**log_scale
    g = norming_functional(s, f)
    assert abs(g @ f - norm(s, f)) <= 1e-9 * norm(s, f)
    assert abs(lp_norm(g, s.dual_p) - 1.0) <= 1e-9


def test_modulus_hilbert_value():
    s = LpSpace(4, 2.0)
    est = modulus_smoothness_estimate(s, 1.0)
    exact = math.sqrt(2.0) - 1.0
    assert est <= exact + 1e-12
    assert est == pytest.approx(exact, abs=1e-3)


@pytest.mark.parametrize("p,u,bound", [(3.0, 0.1, 0.01), (1.5, 0.1, 0.1**1.5 / 1.5)])
def test_modulus_below_power_bound(p, u, bound):
    s = LpSpace(5, p)
    est = modulus_smoothness_estimate(s, u)
    assert 0.0 <= est <= bound + 1e-12
    assert s.smoothness_bound(u) == pytest.approx(bound)


def test_modulus_curve_monotone():
    s = LpSpace(3, 3.0)
    us = [0.05, 0.1, 0.2, 0.4, 0.8]
    vals = modulus_smoothness_curve(s, us)
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    assert all(v <= s.smoothness_bound(u) + 1e-12 for u, v in zip(us, vals))


def test_segment_min_examples():
    s = LpSpace(2, 2.0)
    f = np.array([0.5, 0.5])
    lam, val = segment_min(s, f, np.zeros(2), np.array([1.0, 0.0]))
    assert (lam, val) == pytest.approx((0.5, 0.5), abs=1e-12)
    lam, val = segment_min(s, f, np.array([0.5, 0.0]), np.array([0.0, 1.0]))
    assert lam == pytest.approx(0.4, abs=1e-12)
    assert val == pytest.approx(math.sqrt(0.05), abs=1e-12)
    lam, val = segment_min(s, f, f, np.array([1.0, 0.0]))
    assert lam == 0.0 and val == 0.0
