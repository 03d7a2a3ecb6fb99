"""Homogeneous 2D geometry and 3D rotation primitives.

Points and lines of the projective plane are plain ``numpy`` arrays of shape
``(3,)``; homographies and rotations are ``(3, 3)`` arrays.  All functions are
pure and never modify their arguments.

Axis convention (camera frame): x to the right, y down, z forward along the
optical axis.  Pixel coordinates follow the same orientation, with the
principal point at the image centre.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InfiniteInput, SingularH, ZeroResult

#: Relative magnitude below which a homogeneous component counts as zero.
EPS = 1e-12


def as_vec3(v) -> np.ndarray:
    a = np.asarray(v, dtype=float).reshape(-1)
    if a.shape != (3,):
        raise ValueError(f"expected 3 homogeneous coordinates, got shape {a.shape}")
    if not np.any(a):
        raise ValueError("homogeneous vector must not be all zero")
    return a


def point(x: float, y: float, w: float = 1.0) -> np.ndarray:
    return as_vec3((x, y, w))


def line(a: float, b: float, c: float) -> np.ndarray:
    return as_vec3((a, b, c))


def cross(u, v) -> np.ndarray:
    """Join of two points, or meet of two lines.

    Raises :class:`ZeroResult` when ``u`` and ``v`` are proportional, i.e. the
    same point (or line) was given twice.
    """
    u = as_vec3(u)
    v = as_vec3(v)
    r = np.cross(u, v)
    if np.linalg.norm(r) <= EPS * np.linalg.norm(u) * np.linalg.norm(v):
        raise ZeroResult("cross product of proportional vectors")
    return r


def canonical(v) -> np.ndarray:
    """Scale a homogeneous vector or matrix so its largest-magnitude entry is +1."""
    a = np.asarray(v, dtype=float)
    flat = a.reshape(-1)
    k = int(np.argmax(np.abs(flat)))
    if flat[k] == 0:
        raise ValueError("cannot canonicalise a zero array")
    return a / flat[k]


def unit(v) -> np.ndarray:
    a = np.asarray(v, dtype=float)
    return a / np.linalg.norm(a)


def proportional(u, v, tol: float = 1e-9) -> bool:
    """True when ``u`` and ``v`` agree up to a nonzero scale (sign included)."""
    return angle_between_rays(u, v) < tol


def angle_between_rays(u, v) -> float:
    """Angle between the 1-D subspaces spanned by ``u`` and ``v`` (sign-blind)."""
    u = unit(u)
    v = unit(v)
    s = np.linalg.norm(np.cross(u, v))
    c = abs(float(np.dot(u, v)))
    return math.atan2(s, c)


def is_at_infinity(p) -> bool:
    p = as_vec3(p)
    return abs(p[2]) <= EPS * np.linalg.norm(p[:2])


def is_line_at_infinity(l) -> bool:
    l = as_vec3(l)
    return np.hypot(l[0], l[1]) <= EPS * abs(l[2])


def dehomogenize(p) -> np.ndarray:
    p = as_vec3(p)
    if is_at_infinity(p):
        raise InfiniteInput("point at infinity has no Euclidean coordinates")
    return p[:2] / p[2]


def normalize_line(l) -> np.ndarray:
    """Scale ``l`` so that a**2 + b**2 == 1 (sign unchanged)."""
    l = as_vec3(l)
    n = math.hypot(l[0], l[1])
    if n == 0:
        raise InfiniteInput("the line at infinity has no normal direction")
    return l / n


def point_line_distance(p, l) -> float:
    """Euclidean distance in pixels from a finite point to a finite line."""
    xy = dehomogenize(p)
    l = as_vec3(l)
    n = math.hypot(l[0], l[1])
    if n <= EPS * abs(l[2]):
        raise InfiniteInput("distance to the line at infinity is undefined")
    return abs(l[0] * xy[0] + l[1] * xy[1] + l[2]) / n


def foot_of_perpendicular(p, l) -> np.ndarray:
    """Closest point of line ``l`` to the finite point ``p`` (Euclidean 2-vector)."""
    xy = dehomogenize(p)
    l = normalize_line(l)
    d = l[0] * xy[0] + l[1] * xy[1] + l[2]
    return xy - d * l[:2]


def apply_homography(H, p) -> np.ndarray:
    """Return ``H @ p`` without dehomogenising; w may be zero or negative."""
    return np.asarray(H, dtype=float) @ as_vec3(p)


def transform_line(H, l) -> np.ndarray:
    """Image of line ``l`` under the point homography ``H``, i.e. ``H^-T l``."""
    H = np.asarray(H, dtype=float)
    try:
        return np.linalg.solve(H.T, as_vec3(l))
    except np.linalg.LinAlgError as exc:
        raise SingularH("homography is singular") from exc


def check_homography(H) -> np.ndarray:
    H = np.asarray(H, dtype=float)
    if H.shape != (3, 3):
        raise ValueError(f"homography must be 3x3, got {H.shape}")
    scale = np.abs(H).max()
    if scale == 0 or abs(np.linalg.det(H / scale)) < 1e-14:
        raise SingularH("homography is singular")
    return H


# -- rotations ---------------------------------------------------------------

def rot_x(t: float) -> np.ndarray:
    c, s = math.cos(t), math.sin(t)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rot_y(t: float) -> np.ndarray:
    c, s = math.cos(t), math.sin(t)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rot_z(t: float) -> np.ndarray:
    c, s = math.cos(t), math.sin(t)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rotation_from_angles(tilt: float, roll: float, yaw: float) -> np.ndarray:
    """Camera rotation ``R_z(roll) @ R_x(tilt) @ R_y(yaw)``.

    ``R`` maps coordinates in the *level frame* (x right, y down, z forward
    and horizontal) to camera coordinates.  With this convention a positive
    ``tilt`` pitches the optical axis below the horizontal: the optical axis
    expressed in the level frame is the third row of ``R``, which equals
    ``(0, sin(tilt), cos(tilt))`` when roll and yaw are zero, so ``tilt = pi/2``
    looks straight down.  A positive ``roll`` makes the imaged horizon slope
    with increasing pixel y to the right.
    """
    return rot_z(roll) @ rot_x(tilt) @ rot_y(yaw)


#: World frame (X east, Y north, Z up) -> level camera frame (x right, y down, z forward).
WORLD_TO_LEVEL = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]])


def check_rotation(R, tol: float = 1e-12) -> np.ndarray:
    R = np.asarray(R, dtype=float)
    if R.shape != (3, 3):
        raise ValueError(f"rotation must be 3x3, got {R.shape}")
    if np.abs(R.T @ R - np.eye(3)).max() > tol:
        raise ValueError("matrix is not orthonormal")
    if abs(np.linalg.det(R) - 1.0) > tol:
        raise ValueError("rotation must have determinant +1")
    return R


# -- intrinsics --------------------------------------------------------------

@dataclass(frozen=True)
class CameraIntrinsics:
    """Square pixels, zero skew, principal point at the image centre."""

    f: float
    width: float
    height: float

    def __post_init__(self):
        if not self.f > 0:
            raise ValueError(f"focal length must be positive, got {self.f}")
        if not (self.width > 0 and self.height > 0):
            raise ValueError("image dimensions must be positive")

    @property
    def principal_point(self) -> np.ndarray:
        return np.array([self.width / 2.0, self.height / 2.0, 1.0])

    @property
    def K(self) -> np.ndarray:
        return intrinsic_matrix(self.f, self.width, self.height)

    @property
    def K_inv(self) -> np.ndarray:
        return intrinsic_matrix_inv(self.f, self.width, self.height)

    @property
    def omega(self) -> np.ndarray:
        """Image of the absolute conic, ``(K K^T)^-1``."""
        Ki = self.K_inv
        return Ki.T @ Ki


def intrinsic_matrix(f: float, width: float, height: float) -> np.ndarray:
    return np.array([[f, 0.0, width / 2.0], [0.0, f, height / 2.0], [0.0, 0.0, 1.0]])


def intrinsic_matrix_inv(f: float, width: float, height: float) -> np.ndarray:
    return np.array(
        [[1.0 / f, 0.0, -width / (2.0 * f)], [0.0, 1.0 / f, -height / (2.0 * f)], [0.0, 0.0, 1.0]]
    )


def in_plane_rotation(angle: float, center=(0.0, 0.0)) -> np.ndarray:
    """Pixel-space rotation by ``angle`` about ``center`` (y-down image axes)."""
    cx, cy = center
    c, s = math.cos(angle), math.sin(angle)
    return np.array(
        [
            [c, -s, cx - c * cx + s * cy],
            [s, c, cy - s * cx - c * cy],
            [0.0, 0.0, 1.0],
        ]
    )
