import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from samadyn.transmission import (TendonConfigMatrix, joints_from_motors,
                                  motors_from_joints, transmission_ratio)

RATIOS = (0.25, 0.5, 1.0)


def test_ratio_unity():
    assert transmission_ratio(0.015, 0.015) == 1.0


def test_ratio_half():
    assert transmission_ratio(0.01, 0.02) == 0.5


def test_ratio_rejects_nonpositive_joint_pulley():
    with pytest.raises(ValueError):
        transmission_ratio(0.01, -0.02)
    with pytest.raises(ValueError):
        transmission_ratio(0.01, 0.0)


def test_config_matrix_rows():
    r = 0.5
    F = TendonConfigMatrix(r).F
    expected = np.array([
        [1, 0, 0, 0, 0, 0],
        [0, r, -r, 0, 0, 0],
        [0, 0, r, -r, 0, 0],
        [0, 0, 0, 0, r, 0],
        [0, 0, 0, 0, 0, 1],
    ])
    assert np.array_equal(F, expected)
    assert np.linalg.matrix_rank(F) == 5


def test_joints_from_single_motors():
    F = TendonConfigMatrix(0.5)
    e = np.eye(6)
    assert np.allclose(joints_from_motors(F, e[1]), [0, 0.5, 0, 0, 0])
    assert np.allclose(joints_from_motors(F, e[2]), [0, -0.5, 0.5, 0, 0])
    assert np.allclose(joints_from_motors(F, np.zeros(6)), np.zeros(5))


def test_motors_from_joints_zero():
    F = TendonConfigMatrix(0.5)
    assert np.allclose(motors_from_joints(F, np.zeros(5)), np.zeros(6))


def test_shoulder_joint_decouples():
    # joint 1 is driven by motor 1 alone; the minimum-norm inverse keeps the
    # remaining motors at rest
    F = TendonConfigMatrix(0.5)
    q_m = motors_from_joints(F, np.array([1.0, 0, 0, 0, 0]))
    assert q_m[0] == pytest.approx(1.0, abs=1e-12)
    assert np.abs(q_m[1:]).max() < 1e-12


@pytest.mark.parametrize("r", RATIOS)
def test_pseudo_inverse_identity(r):
    F = TendonConfigMatrix(r)
    assert np.abs(F.F @ np.linalg.pinv(F.F) - np.eye(5)).max() < 1e-9


@pytest.mark.parametrize("r", RATIOS)
def test_joint_motor_joint_roundtrip(r, rng):
    F = TendonConfigMatrix(r)
    for _ in range(200):
        q_a = rng.uniform(-np.pi, np.pi, 5)
        back = joints_from_motors(F, motors_from_joints(F, q_a))
        assert np.abs(back - q_a).max() < 1e-9


def test_minimum_norm_matches_lstsq_oracle(rng):
    F = TendonConfigMatrix(0.4)
    for _ in range(50):
        q_a = rng.normal(size=5)
        q_m = motors_from_joints(F, q_a)
        oracle = np.linalg.lstsq(F.F, q_a, rcond=None)[0]
        assert np.allclose(q_m, oracle, atol=1e-10)


@given(st.floats(-5, 5), st.floats(-5, 5),
       st.lists(st.floats(-3, 3), min_size=6, max_size=6),
       st.lists(st.floats(-3, 3), min_size=6, max_size=6))
@settings(max_examples=60, deadline=None)
def test_forward_map_linearity(a, b, x, y):
    F = TendonConfigMatrix(0.5)
    x, y = np.array(x), np.array(y)
    lhs = joints_from_motors(F, a * x + b * y)
    rhs = a * joints_from_motors(F, x) + b * joints_from_motors(F, y)
    assert np.allclose(lhs, rhs, atol=1e-9)


def test_inverse_map_linearity(rng):
    F = TendonConfigMatrix(0.7)
    x, y = rng.normal(size=5), rng.normal(size=5)
    a, b = 1.7, -0.3
    lhs = motors_from_joints(F, a * x + b * y)
    rhs = a * motors_from_joints(F, x) + b * motors_from_joints(F, y)
    assert np.allclose(lhs, rhs, atol=1e-12)


def test_dimension_checks():
    F = TendonConfigMatrix(0.5)
    with pytest.raises(ValueError):
        joints_from_motors(F, np.zeros(5))
    with pytest.raises(ValueError):
        motors_from_joints(F, np.zeros(6))
    with pytest.raises(ValueError):
        TendonConfigMatrix(-0.5)
