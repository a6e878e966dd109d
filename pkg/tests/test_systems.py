import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mterm_lab.space import LpSpace, lp_norm
from mterm_lab.systems import (
    CoefRepr,
    SymmetricSystem,
    canonical_system,
    hull_distance_l2,
    random_system,
    sample_hull,
    synthesize,
)


def test_canonical():
    s = canonical_system(LpSpace(3, 3.0))
    np.testing.assert_array_equal(s.atoms, np.eye(3))
    assert canonical_system(LpSpace(1, 2.0)).atoms.tolist() == [[1.0]]


def test_random_system_unit_and_deterministic():
    sp = LpSpace(4, 3.0)
    a = random_system(sp, 8, seed=1)
    assert a.atoms.shape == (4, 8)
    np.testing.assert_allclose(a.column_norms(), 1.0, atol=1e-12)
    np.testing.assert_array_equal(a.atoms, random_system(sp, 8, seed=1).atoms)
    one = random_system(LpSpace(2, 2.0), 1, seed=7)
    assert one.n_atoms == 1 and lp_norm(one.atoms[:, 0], 2.0) == pytest.approx(1.0)


def test_system_validation():
    sp = LpSpace(2, 2.0)
    with pytest.raises(ValueError):
        SymmetricSystem(sp, np.array([[2.0], [0.0]]))
    with pytest.raises(ValueError):
        SymmetricSystem(sp, np.array([[0.5], [0.0]]))
    sub = SymmetricSystem(sp, np.array([[0.5], [0.0]]), normalized=False)
    assert sub.n_atoms == 1
    with pytest.raises(ValueError):
        SymmetricSystem(sp, np.ones((3, 2)) / math.sqrt(3))


def test_atoms_read_only():
    s = canonical_system(LpSpace(2, 2.0))
    with pytest.raises(ValueError):
        s.atoms[0, 0] = 3.0


def test_json_round_trip():
    s = random_system(LpSpace(5, 1.5), 7, seed=3)
    back = SymmetricSystem.from_json(s.to_json())
    np.testing.assert_array_equal(back.atoms, s.atoms)
    assert back.space == s.space
    assert back.to_json() == s.to_json()


@pytest.mark.parametrize("q", [1.0, 0.5, 0.25])
def test_sample_hull_mass(q):
    s = random_system(LpSpace(6, 2.0), 12, seed=0)
    r = sample_hull(s, q, seed=5)
    assert np.sum(np.abs(r.coefs) ** q) == pytest.approx(1.0, abs=1e-12)
    assert r.in_hull()


def test_sample_hull_single_atom():
    r = sample_hull(canonical_system(LpSpace(1, 2.0)), 1.0, seed=2)
    assert abs(r.coefs[0]) == pytest.approx(1.0)


def test_synthesize_examples():
    s = canonical_system(LpSpace(3, 2.0))
    np.testing.assert_array_equal(synthesize(CoefRepr(s, np.array([1.0, 0, 0]))), [1.0, 0, 0])
    np.testing.assert_array_equal(synthesize(CoefRepr(s, np.zeros(3))), np.zeros(3))
    v = synthesize(CoefRepr(s, np.array([0.5, -0.5, 0.0])))
    assert lp_norm(v, 2.0) == pytest.approx(math.sqrt(2) / 2)


def test_hull_distance_member():
    s = random_system(LpSpace(5, 2.0), 9, seed=4)
    f = synthesize(sample_hull(s, 1.0, seed=1))
    hd = hull_distance_l2(s, f, tol=1e-10)
    assert hd.b_upper <= 1e-4
    assert hd.b_lower <= hd.b_upper


def test_hull_distance_single_atom():
    s = random_system(LpSpace(3, 2.0), 1, seed=9)
    f = 2.0 * s.atoms[:, 0]
    hd = hull_distance_l2(s, f, tol=1e-10)
    assert hd.b_upper == pytest.approx(1.0, abs=1e-9)
    assert hd.b_lower == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**31), st.floats(0.05, 1.0))
def test_hull_distance_orthogonal_offset(seed, b):
    space = LpSpace(3, 2.0)
    # two atoms spanning a plane, offset along the normal
    s = random_system(space, 2, seed=seed)
    normal = np.cross(s.atoms[:, 0], s.atoms[:, 1])
    normal /= np.linalg.norm(normal)
    phi = synthesize(sample_hull(s, 1.0, seed=seed + 1))
    hd = hull_distance_l2(s, phi + b * normal, tol=1e-10)
    assert hd.b_upper == pytest.approx(b, abs=1e-6)
    assert hd.b_lower <= hd.b_upper + 1e-12
    # direct projection of the offset point onto the plane lands in the hull
    assert np.linalg.norm((phi + b * normal) - synthesize(hd.witness)) == pytest.approx(hd.b_upper, abs=1e-12)


def test_hull_distance_needs_hilbert():
    s = canonical_system(LpSpace(2, 3.0))
    with pytest.raises(ValueError, match="Hilbert"):
        hull_distance_l2(s, np.array([1.0, 1.0]))
