import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from birdseye.errors import InfiniteInput, ZeroResult
from birdseye.geometry import (
    apply_homography,
    canonical,
    check_rotation,
    cross,
    intrinsic_matrix,
    point_line_distance,
    proportional,
    rotation_from_angles,
    WORLD_TO_LEVEL,
)
from birdseye.rectify import build_h_rot
from birdseye.synthetic import CameraModel, ground_truth

from oracles import elementary_rotation, fit_line, matmul3, project


def test_cross_join_of_points():
    assert proportional(cross([0, 0, 1], [1, 0, 1]), [0, 1, 0])


def test_cross_meet_of_lines():
    assert proportional(cross([1, 0, 0], [0, 1, 0]), [0, 0, 1])


def test_cross_parallel_raises():
    with pytest.raises(ZeroResult):
        cross([1, 2, 3], [2, 4, 6])


def test_horizon_from_vanishing_points_matches_far_projection():
    cam = CameraModel(f=800.0, width=1280, height=720, tilt=0.3, roll=0.07, yaw=0.4, cam_height=6.0)
    rec = ground_truth(cam)
    h = cross(rec.v_x, rec.v_y)
    h = h / math.hypot(h[0], h[1])
    # two ground points 1e9 m away in different directions
    far = 1e9 * np.array([[math.cos(a), math.sin(a), 0.0] for a in (1.2, 1.9)])
    xy, depth = project(cam.K, cam.R, cam.center, far)
    assert np.all(depth > 0)
    oracle = fit_line(xy[0], xy[1])
    assert proportional(h, oracle, tol=1e-8)


def test_rotation_identity():
    assert np.array_equal(rotation_from_angles(0, 0, 0), np.eye(3))


def test_rotation_quarter_turn_looks_down():
    R = rotation_from_angles(math.pi / 2, 0.0, 0.0)
    # optical axis in world coordinates is the third row of the full world->camera rotation
    axis_world = (R @ WORLD_TO_LEVEL)[2]
    np.testing.assert_allclose(axis_world, [0, 0, -1], atol=1e-15)


def test_rotation_matches_elementary_product():
    tilt, roll, yaw = 0.3, 0.1, 0.2
    oracle = matmul3(
        matmul3(elementary_rotation("z", roll), elementary_rotation("x", tilt)),
        elementary_rotation("y", yaw),
    )
    assert np.abs(rotation_from_angles(tilt, roll, yaw) - oracle).max() < 1e-12


def test_rotation_invariants_many(rng):
    for t, r, y in rng.uniform(-math.pi, math.pi, size=(10_000, 3)):
        check_rotation(rotation_from_angles(t, r, y), tol=1e-12)


def test_apply_homography_identity(rng):
    p = rng.normal(size=3)
    np.testing.assert_array_equal(apply_homography(np.eye(3), p), p)
    K = intrinsic_matrix(500, 1000, 800)
    np.testing.assert_allclose(apply_homography(K @ np.eye(3) @ np.linalg.inv(K), p), p, atol=1e-12)


def test_apply_h_rot_equals_rotated_camera(example_camera):
    cam = CameraModel(f=650.0, width=1000, height=800, tilt=math.radians(25), roll=math.radians(4), yaw=0.3, cam_height=4.0)
    H = build_h_rot(cam.f, cam.tilt, cam.roll, cam.width, cam.height)
    nadir = CameraModel(f=cam.f, width=cam.width, height=cam.height, tilt=math.pi / 2, roll=0.0, yaw=cam.yaw, cam_height=4.0)
    ground = np.array([[1.5, 9.0, 0.0], [-2.0, 12.0, 0.0], [0.3, 7.5, 0.0]])
    before, _ = project(cam.K, cam.R, cam.center, ground)
    after, _ = project(nadir.K, nadir.R, nadir.center, ground)
    for b, a in zip(before, after):
        q = apply_homography(H, [b[0], b[1], 1.0])
        np.testing.assert_allclose(q[:2] / q[2], a, atol=1e-9)


def test_point_line_distance_examples(example_record):
    assert point_line_distance([0, 0, 1], [0, 1, -5]) == 5
    assert point_line_distance([3, 5, 1], [0, 1, -5]) == 0
    d = point_line_distance([500, 500, 1], example_record.horizon)
    assert d == pytest.approx(500 * math.tan(math.radians(30)), abs=1e-9)
    assert d == pytest.approx(288.675, abs=5e-4)


def test_point_line_distance_rejects_infinity():
    with pytest.raises(InfiniteInput):
        point_line_distance([1, 0, 0], [0, 1, -5])
    with pytest.raises(InfiniteInput):
        point_line_distance([1, 1, 1], [0, 0, 1])


def test_canonical_largest_entry_is_one():
    H = np.array([[2.0, -8.0, 1.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    C = canonical(H)
    assert C[0, 1] == 1.0 and np.abs(C).max() == 1.0


finite = st.floats(-1e3, 1e3, allow_nan=False, allow_subnormal=False)
scales = st.floats(1e-6, 1e6)


@settings(max_examples=300, deadline=None)
@given(st.tuples(finite, finite, finite), st.tuples(finite, finite, finite), scales, scales)
def test_cross_scale_invariance(u, v, a, b):
    u, v = np.array(u), np.array(v)
    if np.linalg.norm(np.cross(u, v)) < 1e-3 * max(np.linalg.norm(u) * np.linalg.norm(v), 1e-300):
        return
    assert proportional(cross(u, v), cross(a * u, b * v), tol=1e-9)


@settings(max_examples=300, deadline=None)
@given(st.tuples(finite, finite), st.tuples(finite, finite), st.tuples(finite, finite))
def test_duality(p, q, s):
    P, Q, S = (np.array([*x, 1.0]) for x in (p, q, s))
    area = abs(np.linalg.det(np.array([P, Q, S])))
    if area < 1.0:
        return
    assert proportional(cross(cross(P, Q), cross(P, S)), P, tol=1e-6)


@settings(max_examples=200, deadline=None)
@given(st.tuples(finite, finite), st.tuples(finite, finite, finite), scales, scales)
def test_distance_scale_invariance(p, l, a, b):
    l = np.array(l)
    if math.hypot(l[0], l[1]) < 1e-3:
        return
    P = np.array([*p, 1.0])
    d0 = point_line_distance(P, l)
    assert point_line_distance(a * P, b * l) == pytest.approx(d0, rel=1e-9, abs=1e-9)
