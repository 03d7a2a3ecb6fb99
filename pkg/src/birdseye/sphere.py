"""Finite codes for image points and lines, including those at infinity.

A sphere of radius ``r`` rests on the image plane with its centre ``C`` at
height ``r`` above the principal point.  Image coordinates are first shifted to
the principal point and divided by the half-diagonal of the image, so one
codec serves every resolution.

* A point ``P`` is coded by joining it to ``C``; the ray meets the lower
  hemisphere at ``s`` and the code is the orthogonal projection of ``s`` onto
  the plane.  Points at infinity land on the boundary circle.
* A line ``l`` spans a plane with ``C``.  The normal of that plane through
  ``C`` meets the lower hemisphere at ``s``; again the code is the projection
  of ``s``.  The line at infinity codes to the origin.
* A horizontal vanishing point on a known horizon is coded by a single signed
  angle measured at ``C`` from the foot of the perpendicular onto the horizon.

Every code lies in the closed disk of radius ``r``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BoundaryUndefined, NotOnHorizon, OutsideDisk
from .geometry import as_vec3

BOUNDARY_ULPS = 4 * 2.0**-52


@dataclass(frozen=True)
class CodecFrame:
    width: float
    height: float
    r: float = 1.0

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise ValueError("image dimensions must be positive")
        if not self.r > 0:
            raise ValueError("sphere radius must be positive")

    @property
    def half_diagonal(self) -> float:
        return 0.5 * math.hypot(self.width, self.height)

    @property
    def N(self) -> np.ndarray:
        """Pixel -> normalised point transform."""
        s = self.half_diagonal
        return np.array(
            [
                [1.0 / s, 0.0, -self.width / (2.0 * s)],
                [0.0, 1.0 / s, -self.height / (2.0 * s)],
                [0.0, 0.0, 1.0],
            ]
        )

    @property
    def N_inv(self) -> np.ndarray:
        s = self.half_diagonal
        return np.array([[s, 0.0, self.width / 2.0], [0.0, s, self.height / 2.0], [0.0, 0.0, 1.0]])

    def point_to_normalized(self, p) -> np.ndarray:
        return self.N @ as_vec3(p)

    def point_from_normalized(self, p) -> np.ndarray:
        return self.N_inv @ as_vec3(p)

    def line_to_normalized(self, l) -> np.ndarray:
        # lines transform with the inverse transpose
        return self.N_inv.T @ as_vec3(l)

    def line_from_normalized(self, l) -> np.ndarray:
        return self.N.T @ as_vec3(l)


def _sign(x: float) -> float:
    return -1.0 if x < 0 else 1.0


def encode_point(P, frame: CodecFrame) -> np.ndarray:
    """Code of an image point (pixels, homogeneous).

    For a point at infinity the code is ``r * d / |d|`` where ``d`` is the
    direction carried by the given representative, so ``(dx, dy, 0)`` and
    ``(-dx, -dy, 0)`` give antipodal boundary codes for the same point.
    """
    X, Y, W = frame.point_to_normalized(P)
    r = frame.r
    # r * (x, y) / |(x, y, -r)| with x = X/W, written without dividing by W
    q = _sign(W) * r * np.array([X, Y]) / math.sqrt(X * X + Y * Y + (r * W) ** 2)
    # rounding can push distant points an ulp past the circle; different
    # hypot implementations round differently, so satisfy both
    while max(math.hypot(q[0], q[1]), float(np.hypot(q[0], q[1]))) > r:
        q *= 1.0 - 2.0**-52
    return q


def decode_point(Q, frame: CodecFrame) -> np.ndarray:
    """Inverse of :func:`encode_point`; returns a homogeneous pixel point.

    Boundary codes decode to points at infinity (third coordinate exactly 0);
    codes within a few ulps of the circle count as boundary codes.
    """
    qx, qy = (float(q) for q in Q)
    r = frame.r
    q = math.hypot(qx, qy)
    if q > r + 1e-12:
        raise OutsideDisk(f"|Q| = {q:.6g} exceeds r = {r}")
    depth = 0.0 if q >= r * (1.0 - BOUNDARY_ULPS) else math.sqrt(r * r - q * q)
    return frame.point_from_normalized((r * qx, r * qy, depth))


def _line_sphere_point(l_n: np.ndarray, r: float) -> np.ndarray:
    a, b, c = l_n
    n = np.array([a, b, -c / r])
    nz = n[2]
    if nz != 0:
        sigma = -_sign(nz)
    elif b != 0:
        sigma = -_sign(b)  # equator: prefer s_y < 0
    else:
        sigma = _sign(a)  # then s_x > 0
    return sigma * r * n / np.linalg.norm(n)


def encode_line(l, frame: CodecFrame) -> np.ndarray:
    """Code of an image line (pixel coefficients ``a x + b y + c = 0``)."""
    s = _line_sphere_point(frame.line_to_normalized(l), frame.r)
    return s[:2].copy()


def decode_line(Q, frame: CodecFrame) -> np.ndarray:
    """Inverse of :func:`encode_line`; returns pixel line coefficients.

    Codes on (or numerically at) the boundary circle belong to lines through
    the principal point whose orientation sign cannot be recovered, and raise
    :class:`BoundaryUndefined`.
    """
    qx, qy = (float(q) for q in Q)
    r = frame.r
    q2 = qx * qx + qy * qy
    if math.sqrt(q2) >= r - 1e-12:
        raise BoundaryUndefined("line code on the boundary circle is ambiguous")
    sz = -math.sqrt(r * r - q2)
    return frame.line_from_normalized((qx, qy, -r * sz))


# -- horizontal vanishing point ------------------------------------------------

def _horizon_frame(h, frame: CodecFrame):
    """Foot ``F`` of the perpendicular from the principal point to ``h``, the
    distance ``|C - F|`` and the unit direction ``t`` along ``h`` used as the
    positive sense of the angle (the foot direction turned by +90 degrees in
    y-down image axes)."""
    a, b, c = frame.line_to_normalized(h)
    nrm = math.hypot(a, b)
    if nrm == 0:
        raise NotOnHorizon("horizon is the line at infinity")
    a, b, c = a / nrm, b / nrm, c / nrm
    foot = -c * np.array([a, b])
    if c < 0:
        u = np.array([a, b])
    elif c > 0:
        u = -np.array([a, b])
    else:
        # horizon through the principal point: orient the normal downwards
        u = np.array([a, b]) * (_sign(b) if b != 0 else _sign(a))
    t = np.array([-u[1], u[0]])
    dist = math.hypot(abs(c), frame.r)
    return foot, dist, t, np.array([a, b, c])


def encode_horizontal_vp(h, vp, frame: CodecFrame, tol: float = 1e-6) -> float:
    """Signed angle at the sphere centre between the horizon foot and ``vp``.

    ``vp`` must lie on ``h``: the sine of the angle between the ray from ``C``
    through ``vp`` and the plane spanned by ``C`` and ``h`` must be below
    ``tol``.  Returns a value in ``[-pi/2, pi/2]``; the end points are reached
    only by points at infinity.
    """
    foot, dist, t, l_n = _horizon_frame(h, frame)
    X, Y, W = frame.point_to_normalized(vp)
    r = frame.r
    ray = np.array([X, Y, -r * W])
    plane_normal = np.array([l_n[0], l_n[1], -l_n[2] / r])
    off = abs(ray @ plane_normal) / (np.linalg.norm(ray) * np.linalg.norm(plane_normal))
    if off > tol:
        raise NotOnHorizon(f"vanishing point is off the horizon by {off:.3g}")
    sw = _sign(W)
    along = (X - foot[0] * W) * t[0] + (Y - foot[1] * W) * t[1]
    return math.atan2(sw * along, abs(W) * dist)


def decode_horizontal_vp(h, theta: float, frame: CodecFrame) -> np.ndarray:
    """Point of ``h`` at signed angle ``theta`` from the foot (homogeneous pixels)."""
    if not abs(theta) <= math.pi / 2:
        raise ValueError(f"angle {theta} outside [-pi/2, pi/2]")
    foot, dist, t, _ = _horizon_frame(h, frame)
    c, s = math.cos(theta), math.sin(theta)
    xy = foot * c + dist * s * t
    return frame.point_from_normalized((xy[0], xy[1], c))


# -- the four-scalar representation -------------------------------------------

def encode_geometry(horizon, vz, frame: CodecFrame) -> np.ndarray:
    """Horizon code followed by vertical-vanishing-point code: four scalars in ``[-r, r]``."""
    return np.concatenate([encode_line(horizon, frame), encode_point(vz, frame)])


def decode_geometry(codes, frame: CodecFrame):
    """Inverse of :func:`encode_geometry`; returns ``(horizon, vz)`` in pixels."""
    codes = np.asarray(codes, dtype=float).reshape(4)
    return decode_line(codes[:2], frame), decode_point(codes[2:], frame)
