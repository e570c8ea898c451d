import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from pnt.regularizers import INFEASIBLE, L1, Box, Norm2, Zero, box_prox, l1_prox, reg_value


def test_l1_prox_examples():
    assert np.array_equal(l1_prox(1.0, np.array([3.0, -0.5, 1.0]), 1.0), [2.0, 0.0, 0.0])
    u = np.array([0.3, -7.0, 2.5])
    assert np.array_equal(l1_prox(0.0, u, 3.0), u)
    assert np.allclose(l1_prox(0.3, np.array([-0.7]), 1.0), [-0.4])


def test_box_prox_examples():
    assert np.array_equal(box_prox([0, 0], [1, 1], np.array([2.0, -1.0])), [1.0, 0.0])
    assert np.array_equal(box_prox([0, 0], [1, 1], np.array([0.2, 0.9]), 5.0), [0.2, 0.9])
    assert np.array_equal(box_prox([-1], [1], np.array([0.5])), [0.5])
    with pytest.raises(ValueError):
        Box([1.0], [0.0])


def test_reg_value_examples():
    assert reg_value(L1(2.0), [1.0, -3.0]) == 8.0
    assert reg_value(Zero(), [4.0, 5.0]) == 0.0
    assert reg_value(Box([0.0], [1.0]), [2.0]) == INFEASIBLE
    assert 1e308 < INFEASIBLE and not math.isnan(INFEASIBLE - 1.0)


def test_norm2_prox_block_threshold():
    g = Norm2(1.0)
    assert np.array_equal(g.prox(np.array([0.3, 0.4]), 1.0), [0.0, 0.0])
    assert np.allclose(g.prox(np.array([3.0, 4.0]), 1.0), [2.4, 3.2])


def regularizers(n):
    return [Zero(), L1(0.7), Box(-np.ones(n), 2 * np.ones(n)), Norm2(1.3)]


def test_prox_invariants():
    rng = np.random.default_rng(0)
    n = 4
    for g in regularizers(n):
        for _ in range(200):
            u, v = rng.standard_normal((2, n)) * 3
            t = rng.uniform(0.05, 3)
            pu, pv = g.prox(u, t), g.prox(v, t)
            assert np.linalg.norm(pu - pv) <= np.linalg.norm(u - v) + 1e-12
            assert (pu - pv) @ (u - v) >= (pu - pv) @ (pu - pv) - 1e-12
        for _ in range(200):
            u = rng.standard_normal(n) * 3
            t = rng.uniform(0.05, 3)
            p = g.prox(u, t)
            best = g.value(p) + (p - u) @ (p - u) / (2 * t)
            comps = p + rng.standard_normal((50, n)) * rng.uniform(1e-3, 1, (50, 1))
            for x in comps:
                assert best <= g.value(x) + (x - u) @ (x - u) / (2 * t) + 1e-12


@settings(max_examples=100, deadline=None)
@given(arrays(np.float64, 5, elements=st.floats(-10, 10)), st.floats(0.01, 10))
def test_separable_prox_is_coordinatewise(u, t):
    for g in regularizers(5)[:3]:
        full = g.prox(u, t)
        coords = np.array([g.prox_coordinate(j, u[j], t) for j in range(5)])
        assert np.array_equal(full, coords)
        w, lo, hi = g.cd_params(5)
        compiled_rule = np.clip(np.sign(u) * np.maximum(np.abs(u) - w * t, 0.0), lo, hi)
        assert np.array_equal(full, compiled_rule)


def test_subgradient_distance_l1():
    g = L1(1.0)
    # x_1 != 0: point subdifferential; x_2 = 0: interval [-1, 1]
    assert g.subgradient_distance(np.array([0.5, 2.5]), np.array([1.0, 0.0])) == pytest.approx(np.hypot(1.5, 1.5))
    assert g.subgradient_distance(np.array([0.5]), np.array([0.0])) == 0.0
