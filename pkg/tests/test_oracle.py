import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mterm_lab.oracle import sigma_m_bruteforce, sigma_m_canonical, tail_bound_check
from mterm_lab.space import LpSpace
from mterm_lab.systems import SymmetricSystem, canonical_system, random_system, sample_hull


def test_canonical_examples():
    assert sigma_m_canonical([1.0, 0.0, 0.0], 1, 3.0).error == 0.0
    x = 1.0 / np.arange(1, 5)
    assert sigma_m_canonical(x, 2, 2.0).error == pytest.approx(math.sqrt(1 / 9 + 1 / 16), abs=1e-15)
    assert sigma_m_canonical(x, 0, 2.0).error == pytest.approx(np.linalg.norm(x))


def test_canonical_quasi_norm():
    r = sigma_m_canonical([4.0, 1.0, 1.0], 1, 0.5)
    assert r.error == pytest.approx(4.0)
    assert r.support == (0,)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_bruteforce_matches_canonical(p):
    rng = np.random.default_rng(int(p * 10))
    for i in range(30):
        d, m = 3 + i % 8, 1 + i % 3
        x = rng.standard_normal(d)
        bf = sigma_m_bruteforce(canonical_system(LpSpace(d, p)), x, m)
        assert bf.error == pytest.approx(sigma_m_canonical(x, m, p).error, abs=1e-10)


def test_bruteforce_examples():
    sp = LpSpace(3, 2.0)
    s = random_system(sp, 5, seed=2)
    assert sigma_m_bruteforce(s, 0.7 * s.atoms[:, 3], 1).error == pytest.approx(0.0, abs=1e-12)
    ortho = SymmetricSystem(LpSpace(2, 2.0), np.eye(2))
    assert sigma_m_bruteforce(ortho, np.array([1.0, 1.0]), 1).error == pytest.approx(1.0)


def test_bruteforce_guard():
    s = random_system(LpSpace(3, 2.0), 13, seed=0)
    with pytest.raises(ValueError, match="too large"):
        sigma_m_bruteforce(s, np.ones(3), 1)


def test_tail_bound_examples():
    lhs, _, ok = tail_bound_check(np.eye(5)[0], 1, 2.0, 1.0)
    assert lhs == 0.0 and ok
    x = np.full(16, 1.0 / 16)
    lhs, rhs, ok = tail_bound_check(x, 4, 2.0, 1.0)
    assert lhs == pytest.approx(math.sqrt(12) / 16, abs=1e-15)
    assert rhs == pytest.approx(0.5)
    assert ok


def test_tail_bound_errors():
    with pytest.raises(ValueError):
        tail_bound_check([1.0], 1, 1.0, 2.0)
    with pytest.raises(ValueError):
        tail_bound_check([1.0], 0, 2.0, 1.0)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**31), st.sampled_from([(1.0, 2.0), (0.5, 2.0), (1.0, 3.0)]), st.integers(1, 31))
def test_tail_bound_on_hull_samples(seed, qp, m):
    q, p = qp
    c = sample_hull(canonical_system(LpSpace(32, 2.0)), q, seed).coefs
    assert tail_bound_check(c, m, p, q)[2]
