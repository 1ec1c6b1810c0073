"""Rigid-body and pinhole-camera kernel.

Poses are stored as a rotation matrix plus translation and exchanged as a
6-vector of motion parameters: translation stacked with a Rodrigues rotation
vector. All values are immutable after construction and safe to share.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NonPositiveDepth

_MIN_DEPTH = 1e-9
_SMALL_ANGLE = 1e-8


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class CameraIntrinsics:
    """Distortion-free pinhole camera."""

    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError("focal lengths must be positive")
        if not (0 <= self.cx < self.width) or not (0 <= self.cy < self.height):
            raise ValueError("principal point outside the image")


@dataclass(frozen=True)
class PoseSE3:
    """Rigid transform: x_out = rotation @ x_in + translation."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rotation", _readonly(np.asarray(self.rotation).reshape(3, 3)))
        object.__setattr__(self, "translation", _readonly(np.asarray(self.translation).reshape(3)))

    @staticmethod
    def identity() -> "PoseSE3":
        return PoseSE3(np.eye(3), np.zeros(3))

    def matrix(self) -> np.ndarray:
        """4x4 homogeneous form."""
        m = np.eye(4)
        m[:3, :3] = self.rotation
        m[:3, 3] = self.translation
        return m


@dataclass(frozen=True)
class MotionParams:
    """6-DoF parametrization: translation plus Rodrigues rotation vector."""

    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))
    rotation_rodrigues: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        object.__setattr__(self, "translation", _readonly(np.asarray(self.translation).reshape(3)))
        object.__setattr__(
            self, "rotation_rodrigues", _readonly(np.asarray(self.rotation_rodrigues).reshape(3))
        )

    @staticmethod
    def from_vector(v: np.ndarray) -> "MotionParams":
        v = np.asarray(v, dtype=float).reshape(6)
        return MotionParams(v[:3], v[3:])

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.translation, self.rotation_rodrigues])


def skew(v: np.ndarray) -> np.ndarray:
    x, y, z = v
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def rodrigues(rvec: np.ndarray) -> np.ndarray:
    """Rotation matrix from a Rodrigues vector (angle * unit axis)."""
    rvec = np.asarray(rvec, dtype=float).reshape(3)
    angle = np.linalg.norm(rvec)
    k = skew(rvec)
    if angle < _SMALL_ANGLE:
        # second-order Taylor expansion; exact enough below 1e-8 rad
        return np.eye(3) + k + 0.5 * (k @ k)
    a = np.sin(angle) / angle
    b = (1.0 - np.cos(angle)) / (angle * angle)
    return np.eye(3) + a * k + b * (k @ k)


def rodrigues_many(rvecs: np.ndarray) -> np.ndarray:
    """Vectorized rodrigues: (N,3) -> (N,3,3)."""
    rvecs = np.asarray(rvecs, dtype=float).reshape(-1, 3)
    n = rvecs.shape[0]
    angles = np.linalg.norm(rvecs, axis=1)
    k = np.zeros((n, 3, 3))
    k[:, 0, 1] = -rvecs[:, 2]
    k[:, 0, 2] = rvecs[:, 1]
    k[:, 1, 0] = rvecs[:, 2]
    k[:, 1, 2] = -rvecs[:, 0]
    k[:, 2, 0] = -rvecs[:, 1]
    k[:, 2, 1] = rvecs[:, 0]
    kk = k @ k
    small = angles < _SMALL_ANGLE
    safe = np.where(small, 1.0, angles)
    a = np.where(small, 1.0, np.sin(safe) / safe)[:, None, None]
    b = np.where(small, 0.5, (1.0 - np.cos(safe)) / (safe * safe))[:, None, None]
    return np.eye(3)[None] + a * k + b * kk


def rotation_log(rot: np.ndarray) -> np.ndarray:
    """Rodrigues vector of a rotation matrix (angle < pi)."""
    rot = np.asarray(rot, dtype=float).reshape(3, 3)
    cos_angle = np.clip((np.trace(rot) - 1.0) / 2.0, -1.0, 1.0)
    angle = np.arccos(cos_angle)
    vee = 0.5 * np.array([rot[2, 1] - rot[1, 2], rot[0, 2] - rot[2, 0], rot[1, 0] - rot[0, 1]])
    if angle < _SMALL_ANGLE:
        return vee
    if angle > np.pi - 1e-6:
        # sin(angle) ~ 0: recover the axis from the symmetric part
        m = (rot + np.eye(3)) / 2.0
        axis = np.sqrt(np.maximum(np.diag(m), 0.0))
        i = int(np.argmax(axis))
        if axis[i] > 0:
            axis = m[:, i] / axis[i]
            axis /= np.linalg.norm(axis)
        # fix the sign using the (possibly tiny) skew part
        if np.dot(axis, vee) < 0:
            axis = -axis
        return angle * axis
    return (angle / np.sin(angle)) * vee


def so3_right_jacobian(rvec: np.ndarray) -> np.ndarray:
    """Right Jacobian of the rotation exponential.

    Maps the time derivative of a Rodrigues vector to the body-frame angular
    velocity: w = Jr(r) @ dr/dt.
    """
    rvec = np.asarray(rvec, dtype=float).reshape(3)
    angle = np.linalg.norm(rvec)
    k = skew(rvec)
    if angle < _SMALL_ANGLE:
        return np.eye(3) - 0.5 * k + (k @ k) / 6.0
    a = (1.0 - np.cos(angle)) / (angle * angle)
    b = (angle - np.sin(angle)) / (angle ** 3)
    return np.eye(3) - a * k + b * (k @ k)


def se3_exp(params: MotionParams) -> PoseSE3:
    """Pose from motion parameters: rotation via Rodrigues, translation direct."""
    return PoseSE3(rodrigues(params.rotation_rodrigues), params.translation)


def se3_log(pose: PoseSE3) -> MotionParams:
    """Inverse of se3_exp; requires rotation angle < pi."""
    return MotionParams(pose.translation, rotation_log(pose.rotation))


def compose(a: PoseSE3, b: PoseSE3) -> PoseSE3:
    return PoseSE3(a.rotation @ b.rotation, a.rotation @ b.translation + a.translation)


def inverse(a: PoseSE3) -> PoseSE3:
    rt = a.rotation.T
    return PoseSE3(rt, -rt @ a.translation)


def transform_point(a: PoseSE3, p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    return p @ a.rotation.T + a.translation


def project(point: np.ndarray, intr: CameraIntrinsics) -> np.ndarray:
    """Pinhole projection of a camera-frame point to sub-pixel coordinates."""
    x, y, z = np.asarray(point, dtype=float).reshape(3)
    if z <= _MIN_DEPTH:
        raise NonPositiveDepth(f"z={z}")
    return np.array([intr.fx * x / z + intr.cx, intr.fy * y / z + intr.cy])


def project_array(points: np.ndarray, intr: CameraIntrinsics) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized projection: (N,3) -> ((N,2) pixels, (N,) bool valid-depth mask).

    Pixels with non-positive depth are left at 0 and flagged invalid.
    """
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    z = points[:, 2]
    valid = z > _MIN_DEPTH
    zs = np.where(valid, z, 1.0)
    uv = np.empty((points.shape[0], 2))
    uv[:, 0] = intr.fx * points[:, 0] / zs + intr.cx
    uv[:, 1] = intr.fy * points[:, 1] / zs + intr.cy
    uv[~valid] = 0.0
    return uv, valid


def backproject(pixel: np.ndarray, depth: float, intr: CameraIntrinsics) -> np.ndarray:
    """Camera-frame point of a pixel at the given depth (z-coordinate)."""
    if depth <= _MIN_DEPTH:
        raise NonPositiveDepth(f"depth={depth}")
    u, v = np.asarray(pixel, dtype=float).reshape(2)
    return np.array([(u - intr.cx) / intr.fx * depth, (v - intr.cy) / intr.fy * depth, depth])


def projection_jacobian(point: np.ndarray, intr: CameraIntrinsics) -> np.ndarray:
    """2x3 derivative of project() w.r.t. the camera-frame point."""
    x, y, z = np.asarray(point, dtype=float).reshape(3)
    if z <= _MIN_DEPTH:
        raise NonPositiveDepth(f"z={z}")
    return np.array(
        [
            [intr.fx / z, 0.0, -intr.fx * x / (z * z)],
            [0.0, intr.fy / z, -intr.fy * y / (z * z)],
        ]
    )


def quaternion_from_rotation(rot: np.ndarray) -> np.ndarray:
    """Unit quaternion (qx, qy, qz, qw) of a rotation matrix."""
    rot = np.asarray(rot, dtype=float).reshape(3, 3)
    t = np.trace(rot)
    if t > 0:
        s = np.sqrt(t + 1.0) * 2.0
        qw = 0.25 * s
        qx = (rot[2, 1] - rot[1, 2]) / s
        qy = (rot[0, 2] - rot[2, 0]) / s
        qz = (rot[1, 0] - rot[0, 1]) / s
    else:
        i = int(np.argmax(np.diag(rot)))
        if i == 0:
            s = np.sqrt(1.0 + rot[0, 0] - rot[1, 1] - rot[2, 2]) * 2.0
            qx = 0.25 * s
            qy = (rot[0, 1] + rot[1, 0]) / s
            qz = (rot[0, 2] + rot[2, 0]) / s
            qw = (rot[2, 1] - rot[1, 2]) / s
        elif i == 1:
            s = np.sqrt(1.0 - rot[0, 0] + rot[1, 1] - rot[2, 2]) * 2.0
            qx = (rot[0, 1] + rot[1, 0]) / s
            qy = 0.25 * s
            qz = (rot[1, 2] + rot[2, 1]) / s
            qw = (rot[0, 2] - rot[2, 0]) / s
        else:
            s = np.sqrt(1.0 - rot[0, 0] - rot[1, 1] + rot[2, 2]) * 2.0
            qx = (rot[0, 2] + rot[2, 0]) / s
            qy = (rot[1, 2] + rot[2, 1]) / s
            qz = 0.25 * s
            qw = (rot[1, 0] - rot[0, 1]) / s
    q = np.array([qx, qy, qz, qw])
    return q / np.linalg.norm(q)


def rotation_from_quaternion(q: np.ndarray) -> np.ndarray:
    """Rotation matrix from a quaternion (qx, qy, qz, qw)."""
    x, y, z, w = np.asarray(q, dtype=float).reshape(4)
    n = np.sqrt(x * x + y * y + z * z + w * w)
    x, y, z, w = x / n, y / n, z / n, w / n
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
            [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
            [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
        ]
    )
