import numpy as np
import pytest

from evedge.errors import NonPositiveDepth
from evedge.geometry import (
    CameraIntrinsics,
    MotionParams,
    PoseSE3,
    backproject,
    compose,
    inverse,
    project,
    project_array,
    projection_jacobian,
    quaternion_from_rotation,
    rodrigues,
    rodrigues_many,
    rotation_from_quaternion,
    rotation_log,
    se3_exp,
    se3_log,
    so3_right_jacobian,
    transform_point,
)

K = CameraIntrinsics(fx=100.0, fy=100.0, cx=50.0, cy=50.0, width=101, height=101)


def random_pose(rng) -> PoseSE3:
    rvec = rng.uniform(-1.0, 1.0, 3)
    rvec *= rng.uniform(0.0, 3.0) / max(np.linalg.norm(rvec), 1e-12)
    return PoseSE3(rodrigues(rvec), rng.uniform(-2.0, 2.0, 3))


def test_project_on_axis():
    assert np.allclose(project([0, 0, 1], K), [50.0, 50.0])


def test_project_off_axis():
    assert np.allclose(project([1, 0, 2], K), [100.0, 50.0])


def test_project_behind_camera():
    with pytest.raises(NonPositiveDepth):
        project([0, 0, -1], K)


def test_backproject_center():
    assert np.allclose(backproject([50, 50], 2.0, K), [0, 0, 2.0])


def test_backproject_off_center():
    assert np.allclose(backproject([150, 50], 1.0, K), [1, 0, 1])


def test_backproject_rejects_nonpositive_depth():
    with pytest.raises(NonPositiveDepth):
        backproject([50, 50], 0.0, K)


def test_project_backproject_roundtrip():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        px = rng.uniform([0, 0], [K.width - 1, K.height - 1])
        depth = 10.0 ** rng.uniform(-3, 3)
        assert np.linalg.norm(project(backproject(px, depth, K), K) - px) < 1e-9


def test_project_array_matches_scalar():
    rng = np.random.default_rng(1)
    pts = rng.uniform(-1, 1, (200, 3))
    pts[:, 2] = rng.uniform(0.1, 5.0, 200)
    uv, valid = project_array(pts, K)
    assert valid.all()
    for i in range(0, 200, 17):
        assert np.allclose(uv[i], project(pts[i], K))


def test_project_array_flags_bad_depth():
    uv, valid = project_array(np.array([[0, 0, 1.0], [0, 0, -1.0]]), K)
    assert valid.tolist() == [True, False]


def test_exp_of_zero_is_identity():
    p = se3_exp(MotionParams())
    assert np.allclose(p.rotation, np.eye(3))
    assert np.allclose(p.translation, 0)


def test_exp_quarter_turn_about_z():
    p = se3_exp(MotionParams(np.zeros(3), [0, 0, np.pi / 2]))
    expected = np.array([[0, -1, 0], [1, 0, 0], [0, 0, 1.0]])
    assert np.allclose(p.rotation, expected, atol=1e-12)


def test_exp_log_roundtrip():
    rng = np.random.default_rng(2)
    for _ in range(1000):
        rvec = rng.uniform(-1, 1, 3)
        rvec *= rng.uniform(0.0, 3.0) / max(np.linalg.norm(rvec), 1e-12)
        theta = MotionParams(rng.uniform(-5, 5, 3), rvec)
        back = se3_log(se3_exp(theta))
        assert np.linalg.norm(back.as_vector() - theta.as_vector()) < 1e-9


def test_log_near_pi():
    rvec = np.array([0.0, 0.0, np.pi - 1e-9])
    assert np.linalg.norm(rotation_log(rodrigues(rvec)) - rvec) < 1e-6


def test_pose_invariants():
    rng = np.random.default_rng(3)
    for _ in range(100):
        p = random_pose(rng)
        assert np.linalg.norm(p.rotation.T @ p.rotation - np.eye(3)) < 1e-9
        assert abs(np.linalg.det(p.rotation) - 1.0) < 1e-9
        ident = compose(p, inverse(p))
        assert np.linalg.norm(ident.rotation - np.eye(3)) < 1e-9
        assert np.linalg.norm(ident.translation) < 1e-9


def test_compose_with_identity():
    rng = np.random.default_rng(4)
    p = random_pose(rng)
    q = compose(p, PoseSE3.identity())
    assert np.allclose(q.rotation, p.rotation)
    assert np.allclose(q.translation, p.translation)


def test_double_inverse():
    rng = np.random.default_rng(5)
    p = random_pose(rng)
    q = inverse(inverse(p))
    assert np.allclose(q.rotation, p.rotation, atol=1e-12)
    assert np.allclose(q.translation, p.translation, atol=1e-12)


def test_associativity_and_action():
    rng = np.random.default_rng(6)
    for _ in range(1000):
        a, b, c = (random_pose(rng) for _ in range(3))
        ab_c = compose(compose(a, b), c)
        a_bc = compose(a, compose(b, c))
        assert np.linalg.norm(ab_c.rotation - a_bc.rotation) < 1e-9
        assert np.linalg.norm(ab_c.translation - a_bc.translation) < 1e-9
        pt = rng.uniform(-3, 3, 3)
        lhs = transform_point(compose(a, b), pt)
        rhs = transform_point(a, transform_point(b, pt))
        assert np.linalg.norm(lhs - rhs) < 1e-9


def test_rodrigues_many_matches_scalar():
    rng = np.random.default_rng(7)
    rvecs = rng.uniform(-2, 2, (50, 3))
    rvecs[0] = 0.0
    batch = rodrigues_many(rvecs)
    for i in range(50):
        assert np.allclose(batch[i], rodrigues(rvecs[i]), atol=1e-12)


def test_projection_jacobian_finite_difference():
    rng = np.random.default_rng(8)
    for _ in range(50):
        pt = np.array([rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0.5, 5)])
        jac = projection_jacobian(pt, K)
        h = 1e-6
        fd = np.empty((2, 3))
        for j in range(3):
            dp = np.zeros(3)
            dp[j] = h
            fd[:, j] = (project(pt + dp, K) - project(pt - dp, K)) / (2 * h)
        assert np.linalg.norm(jac - fd) / np.linalg.norm(fd) < 1e-6


def test_right_jacobian_maps_rate_to_body_velocity():
    # w_body = vee(R^T dR/dt) must equal Jr(r) @ dr/dt
    rng = np.random.default_rng(9)
    for _ in range(20):
        r = rng.uniform(-1, 1, 3)
        rdot = rng.uniform(-1, 1, 3)
        h = 1e-7
        r_plus = rodrigues(r + h * rdot)
        r_minus = rodrigues(r - h * rdot)
        dr = (r_plus - r_minus) / (2 * h)
        omega_fd = rodrigues(r).T @ dr
        omega_fd = np.array([omega_fd[2, 1], omega_fd[0, 2], omega_fd[1, 0]])
        omega = so3_right_jacobian(r) @ rdot
        assert np.linalg.norm(omega - omega_fd) < 1e-5


def test_quaternion_roundtrip():
    rng = np.random.default_rng(10)
    for _ in range(200):
        rot = random_pose(rng).rotation
        q = quaternion_from_rotation(rot)
        assert abs(np.linalg.norm(q) - 1.0) < 1e-12
        assert np.linalg.norm(rotation_from_quaternion(q) - rot) < 1e-9


def test_intrinsics_validation():
    with pytest.raises(ValueError):
        CameraIntrinsics(fx=-1, fy=1, cx=0, cy=0, width=10, height=10)
    with pytest.raises(ValueError):
        CameraIntrinsics(fx=1, fy=1, cx=10, cy=0, width=10, height=10)
