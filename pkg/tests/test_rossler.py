"""测试 Rössler 向量场与误差动力学"""

import numpy as np
import pytest

from hjbnet.exceptions import InvalidStateError
from hjbnet.models.params import RosslerParams
from hjbnet.models.results import TrajectoryBound
from hjbnet.utils.rossler import controlled_field, error_field, pair_error, rossler_field

P = RosslerParams()


class TestRosslerField:
    """测试未受控向量场"""

    def test_origin_is_fixed_point(self):
        """测试原点是不动点"""
        assert np.array_equal(rossler_field(np.zeros(3), P), np.zeros(3))

    @pytest.mark.parametrize(
        "state, expected",
        [
            ((1.0, 1.0, 1.0), (-2.0, 1.36, -3.1)),
            ((-1.0, 2.0, 0.0), (-2.0, -0.28, -0.4)),
        ],
    )
    def test_direct_substitution(self, state, expected):
        """测试直接代入"""
        assert np.allclose(rossler_field(np.array(state), P), expected, atol=1e-12)

    def test_vectorized_over_nodes(self):
        """测试一次计算多个节点"""
        states = np.array([[1.0, 1.0, 1.0], [-1.0, 2.0, 0.0]])
        out = rossler_field(states, P)
        assert out.shape == (2, 3)
        assert np.allclose(out[1], (-2.0, -0.28, -0.4))

    @pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
    def test_non_finite_rejected(self, bad):
        """测试非有限输入报错"""
        with pytest.raises(InvalidStateError):
            rossler_field(np.array([0.0, bad, 0.0]), P)

    def test_wrong_shape_rejected(self):
        """测试最后一维不是 3 时报错"""
        with pytest.raises(InvalidStateError):
            rossler_field(np.zeros(4), P)


class TestControlledField:
    """测试受控向量场"""

    def test_zero_state_zero_control(self):
        assert np.array_equal(controlled_field(np.zeros(3), P, np.zeros(3)), np.zeros(3))

    def test_control_cancels_field(self):
        """测试控制抵消 (1,1,1) 处的向量场"""
        out = controlled_field(np.ones(3), P, np.array([2.0, -1.36, 3.1]))
        assert np.allclose(out, 0.0, atol=1e-12)

    def test_control_added_at_origin(self):
        out = controlled_field(np.zeros(3), P, np.array([1.0, 2.0, 3.0]))
        assert np.array_equal(out, [1.0, 2.0, 3.0])

    def test_non_finite_control_rejected(self):
        with pytest.raises(InvalidStateError):
            controlled_field(np.zeros(3), P, np.array([np.nan, 0.0, 0.0]))


class TestErrorField:
    """测试节点对误差动力学"""

    def test_synchronized_manifold_invariant(self):
        """测试零误差保持为零"""
        xj = np.array([3.0, -2.0, 0.5])
        assert np.array_equal(error_field(np.zeros(3), xj, P, np.zeros(3)), np.zeros(3))

    def test_direct_substitution(self):
        out = error_field(np.array([1.0, 0.0, 0.0]), np.array([0.0, 0.0, 1.0]), P, np.zeros(3))
        assert np.allclose(out, (0.0, 1.0, 1.4), atol=1e-12)

    def test_consistency_with_field_difference(self):
        """测试误差动力学等于两个向量场之差（1000 组随机状态）"""
        rng = np.random.default_rng(1234)
        si = rng.uniform(-10.0, 10.0, size=(1000, 3))
        sj = rng.uniform(-10.0, 10.0, size=(1000, 3))
        lhs = error_field(si - sj, sj, P, np.zeros((1000, 3)))
        rhs = rossler_field(si, P) - rossler_field(sj, P)
        assert np.max(np.abs(lhs - rhs)) < 1e-12

    def test_pair_control_enters_additively(self):
        e = np.array([0.5, -0.2, 0.1])
        xj = np.array([1.0, 2.0, 3.0])
        u = np.array([0.1, 0.2, 0.3])
        assert np.allclose(error_field(e, xj, P, u) - error_field(e, xj, P, np.zeros(3)), u)


class TestPairError:
    """测试节点对误差"""

    def test_antisymmetry(self):
        """测试 e_ij = −e_ji"""
        rng = np.random.default_rng(7)
        for _ in range(100):
            si, sj = rng.uniform(-10.0, 10.0, size=(2, 3))
            assert np.array_equal(pair_error(si, sj), -pair_error(sj, si))


class TestTrajectoryBound:
    """测试轨迹界的记录"""

    def test_running_maximum_never_decreases(self):
        bound = TrajectoryBound.empty(2)
        history = []
        rng = np.random.default_rng(3)
        for _ in range(20):
            bound.update(rng.normal(size=(2, 3)))
            history.append(bound.node_max.copy())
        history = np.array(history)
        assert np.all(np.diff(history, axis=0) >= 0.0)
        assert np.all(bound.node_max <= bound.l_max)

    def test_l_max_is_norm(self):
        bound = TrajectoryBound.empty(2)
        bound.update(np.array([[3.0, 4.0, 0.0], [0.0, 0.0, 1.0]]))
        assert bound.l_max == pytest.approx(5.0)
        assert bound.node_max.tolist() == pytest.approx([5.0, 1.0])
