import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mterm_lab.entropy import (
    EpsNet,
    MultiscaleBudget,
    NetAmbient,
    budget_bits,
    compose_product_net,
    composed_ball_entropy_bound,
    empirical_entropy_curve,
    grid_net_ball,
    multiscale_compose,
    sample_hr_member,
    sample_net,
    verify_coverage,
)
from mterm_lab.space import LpSpace


@pytest.mark.parametrize("d,k,radius", [(2, 4, 0.25), (1, 0, 1.0), (3, 3, 0.5)])
def test_grid_examples(d, k, radius):
    net = grid_net_ball(d, k)
    assert len(net) == 2**k
    assert net.radius == pytest.approx(radius)
    assert net.radius <= 3 * 2 ** (-k / d)


def test_grid_single_center_is_origin():
    np.testing.assert_array_equal(grid_net_ball(1, 0).centers, [[0.0]])


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 4), st.integers(0, 12), st.integers(0, 2**31))
def test_grid_coverage(d, k, seed):
    net = grid_net_ball(d, k)
    pts = np.random.default_rng(seed).uniform(-1, 1, (2000, d))
    assert verify_coverage(net, pts).passed
    assert net.radius <= 3 * 2 ** (-k / d)


def test_compose_identity_and_hand_example():
    amb = NetAmbient.linf(1)
    A = grid_net_ball(1, 1)
    unit = EpsNet(np.zeros((1, 1)), 1.0, amb)
    same = compose_product_net(A, unit)
    assert same.radius == A.radius and len(same) == len(A)
    C = compose_product_net(A, grid_net_ball(1, 1))
    assert len(C) == 4 and C.radius == 0.25
    np.testing.assert_allclose(np.sort(C.centers[:, 0]), [-0.75, -0.25, 0.25, 0.75])


def test_compose_ambient_mismatch():
    with pytest.raises(ValueError, match="ambient"):
        compose_product_net(grid_net_ball(1, 1), grid_net_ball(2, 1))


def test_compose_sampled_coverage():
    rng = np.random.default_rng(3)
    amb = NetAmbient.linf(2)
    pts = rng.uniform(-1, 1, (10_000, 2)) * [1.0, 0.3]
    A = sample_net(pts, 16, amb)
    C = compose_product_net(A, grid_net_ball(2, 4))
    assert len(C) == 16 * 16
    assert C.radius == pytest.approx(A.radius * 0.25)
    assert verify_coverage(C, pts).passed


def test_entropy_curve_examples():
    sp = LpSpace(3, 2.0)
    same = np.tile([0.1, 0.2, 0.3], (10, 1))
    assert all(pt.eps_upper == 0.0 for pt in empirical_entropy_curve(same, 3, sp))
    two = np.array([[1.0, 0, 0], [-1.0, 0, 0]])
    first = empirical_entropy_curve(two, 0, sp)[0]
    assert first.eps_upper == pytest.approx(2.0) and first.eps_lower >= 1.0


def test_entropy_curve_monotone_bracketed():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((500, 4))
    curve = empirical_entropy_curve(X, 8, LpSpace(4, 2.0))
    up = [c.eps_upper for c in curve]
    assert all(b <= a for a, b in zip(up, up[1:]))
    assert all(c.eps_lower <= c.eps_upper for c in curve)


def test_composed_bound_examples():
    amb = NetAmbient.linf(2)
    rng = np.random.default_rng(1)
    pts = rng.uniform(-1, 1, (5000, 2)) * 0.5
    F = sample_net(pts, 8, amb)
    assert composed_ball_entropy_bound(amb, F, 0).radius == pytest.approx(3 * F.radius)
    refined = composed_ball_entropy_bound(amb, F, 4)
    assert refined.radius == pytest.approx(F.radius * 0.75)
    assert verify_coverage(refined, pts).passed
    with pytest.raises(ValueError, match="bookkeeping"):
        composed_ball_entropy_bound(NetAmbient.linf(3), F, 1)


def test_net_dict_round_trip():
    net = grid_net_ball(2, 3)
    back = EpsNet.from_dict(net.to_dict())
    np.testing.assert_array_equal(back.centers, net.centers)
    assert back.radius == net.radius and back.ambient == net.ambient


def test_budget_formula():
    assert budget_bits(3, 1.0) == (16, 16, 0)
    with pytest.raises(ValueError, match="budget"):
        MultiscaleBudget(2, 1.0, [[(0, 1)], [(0, 1)]], 2, n_s=(3, 0))


def test_multiscale_two_scales_bookkeeping():
    b = MultiscaleBudget(2, 1.0, [[(0, 1)], [(0, 1)]], 2, l_r=2)
    mnet = multiscale_compose(b)
    assert len(mnet.net) == 2 ** b.n_s[0] * 2 ** b.n_s[1] == math.prod(b.size_factors())
    assert b.flags()  # the explicit depth is recorded


def test_multiscale_zero_member_covered():
    b = MultiscaleBudget(2, 1.0, [[(0, 1)], [(0, 1)]], 2, l_r=1)
    mnet = multiscale_compose(b)
    f = np.zeros(2)
    d, _ = mnet.net.nearest(f[None, :])
    assert d[0] <= mnet.net.radius


def test_multiscale_members_covered():
    rng = np.random.default_rng(7)
    colls = [[(0, 1, 2, 3)], [tuple(range(8))], [tuple(range(8))]]
    b = MultiscaleBudget(3, 1.0, colls, 8, l_r=1)
    mnet = multiscale_compose(b)
    for _ in range(200):
        f, parts = sample_hr_member(b, rng)
        center = mnet.net.centers[mnet.decode(parts)]
        assert np.max(np.abs(f - center)) <= mnet.net.radius + 1e-12


def test_multiscale_guard():
    b = MultiscaleBudget(3, 1.0, [[(0, 1, 2, 3)]] * 3, 4, l_r=2)
    with pytest.raises(ValueError, match="guard"):
        multiscale_compose(b, guard=2**10)
