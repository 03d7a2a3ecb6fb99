import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from birdseye.errors import BoundaryUndefined, NotOnHorizon, OutsideDisk
from birdseye.geometry import angle_between_rays, proportional
from birdseye.sphere import (
    CodecFrame,
    decode_geometry,
    decode_horizontal_vp,
    decode_line,
    decode_point,
    encode_geometry,
    encode_horizontal_vp,
    encode_line,
    encode_point,
)
from birdseye.synthetic import CameraModel, ground_truth

FRAME = CodecFrame(1000, 1000)


def pix(x, y, w=1.0):
    """Normalised coordinates -> homogeneous pixels."""
    return FRAME.point_from_normalized((x, y, w))


def pix_line(a, b, c):
    return FRAME.line_from_normalized((a, b, c))


# -- points ----------------------------------------------------------------------

def test_principal_point_codes_to_origin():
    np.testing.assert_array_equal(encode_point([500, 500, 1], FRAME), [0, 0])


def test_point_at_infinity_on_boundary():
    np.testing.assert_allclose(encode_point([1, 0, 0], FRAME), [1, 0], atol=1e-15)


def test_point_hand_example():
    # v = (0.5, 0, -1), |v| = 1.118034
    q = encode_point(pix(0.5, 0), FRAME)
    np.testing.assert_allclose(q, [0.5 / math.sqrt(1.25), 0], atol=1e-15)
    assert q[0] == pytest.approx(0.44721, abs=5e-6)


def test_decode_point_examples():
    assert proportional(decode_point([0, 0], FRAME), [500, 500, 1])
    p = FRAME.point_to_normalized(decode_point([0.5 / math.sqrt(1.25), 0], FRAME))
    np.testing.assert_allclose(p[:2] / p[2], [0.5, 0], atol=1e-12)


def test_decode_point_outside_disk():
    with pytest.raises(OutsideDisk):
        decode_point([0.8, 0.7], FRAME)


def test_boundary_codes_decode_to_infinity(rng):
    for a in rng.uniform(0, 2 * math.pi, 100):
        P = decode_point([math.cos(a), math.sin(a)], FRAME)
        assert P[2] == 0.0


def test_point_round_trip_many(rng):
    xy = rng.uniform(-5, 5, size=(10_000, 2))
    frame = CodecFrame(1280, 720)
    worst = 0.0
    for x, y in xy:
        P = frame.point_from_normalized((x, y, 1.0))
        back = frame.point_to_normalized(decode_point(encode_point(P, frame), frame))
        worst = max(worst, np.abs(back[:2] / back[2] - (x, y)).max())
    assert worst < 1e-9


def test_code_norm_bounds(rng):
    n = 100_000
    P = rng.normal(size=(n, 3)) * rng.uniform(0.1, 1000, size=(n, 1))
    P[:, 2] = rng.choice([0.0, 1e-12, -1e-12, 1.0, -1.0], size=n)
    P[P[:, 2] == 0.0, :2] += 1e-3  # keep the vector nonzero
    for p in P:
        q = np.hypot(*encode_point(p, FRAME))
        if p[2] == 0:
            assert abs(q - 1.0) < 1e-15
        elif abs(p[2]) == 1.0:
            # finite points strictly inside (up to rounding for very distant points)
            assert q <= 1.0
        else:
            assert q <= 1.0


def test_finite_points_strictly_inside(rng):
    for x, y in rng.uniform(-20, 20, size=(1000, 2)):
        assert np.hypot(*encode_point(pix(x, y), FRAME)) < 1.0


def test_monotone_along_ray():
    d = np.array([0.6, -0.8])
    norms = [np.hypot(*encode_point(pix(*(t * d)), FRAME)) for t in np.linspace(0, 50, 200)]
    assert np.all(np.diff(norms) > 0)


# -- lines -----------------------------------------------------------------------

def test_line_at_infinity_codes_to_origin():
    np.testing.assert_allclose(encode_line([0, 0, 1], FRAME), [0, 0], atol=0)


def test_line_examples():
    # n = (0, 1, 0.5), |n| = 1.118034, s = (0, -0.89443, -0.44721)
    q = encode_line(pix_line(0, 1, -0.5), FRAME)
    np.testing.assert_allclose(q, [0, -1 / math.sqrt(1.25)], atol=1e-15)
    assert q[1] == pytest.approx(-0.89443, abs=5e-6)
    q = encode_line(pix_line(1, 0, -0.5), FRAME)
    np.testing.assert_allclose(q, [-1 / math.sqrt(1.25), 0], atol=1e-15)


def test_decode_line_examples():
    assert proportional(decode_line([0, 0], FRAME), [0, 0, 1])
    l = FRAME.line_to_normalized(decode_line([0, -1 / math.sqrt(1.25)], FRAME))
    assert proportional(l, [0, 1, -0.5], tol=1e-12)


def test_decode_line_boundary_is_error():
    with pytest.raises(BoundaryUndefined):
        decode_line([0.6, 0.8], FRAME)


def test_line_through_principal_point_tie_break():
    q = encode_line(pix_line(0.3, 0.7, 0.0), FRAME)
    assert q[1] < 0 and np.hypot(*q) == pytest.approx(1.0)
    q = encode_line(pix_line(1.0, 0.0, 0.0), FRAME)
    assert q[0] > 0 and q[1] == 0


def test_line_round_trip_many(rng):
    frame = CodecFrame(1920, 1080)
    worst = 0.0
    for _ in range(10_000):
        t = rng.uniform(0, 2 * math.pi)
        dist = rng.uniform(1e-3, 50) * rng.choice([-1, 1])
        l = np.array([math.cos(t), math.sin(t), dist]) * rng.uniform(0.01, 100)
        L = frame.line_from_normalized(l)
        back = frame.line_to_normalized(decode_line(encode_line(L, frame), frame))
        worst = max(worst, angle_between_rays(back, l))
    assert worst < 1e-9


@settings(max_examples=300, deadline=None)
@given(
    st.tuples(st.floats(-1e4, 1e4), st.floats(-1e4, 1e4), st.floats(-1e4, 1e4)),
    st.floats(1e-6, 1e6),
)
def test_codes_scale_invariant(v, k):
    v = np.array(v)
    if np.linalg.norm(v) < 1e-6:
        return
    np.testing.assert_allclose(encode_point(k * v, FRAME), encode_point(v, FRAME), atol=1e-12)
    np.testing.assert_allclose(encode_line(k * v, FRAME), encode_line(v, FRAME), atol=1e-12)
    np.testing.assert_allclose(encode_line(-k * v, FRAME), encode_line(v, FRAME), atol=1e-12)
    if v[2] != 0:
        np.testing.assert_allclose(encode_point(-k * v, FRAME), encode_point(v, FRAME), atol=1e-12)


@settings(max_examples=300, deadline=None)
@given(st.floats(-5, 5), st.floats(-5, 5))
def test_point_round_trip_property(x, y):
    back = FRAME.point_to_normalized(decode_point(encode_point(pix(x, y), FRAME), FRAME))
    np.testing.assert_allclose(back[:2] / back[2], [x, y], atol=1e-9)


# -- horizontal vanishing point -------------------------------------------------------

def test_vp_at_foot_is_zero():
    h = pix_line(0, 1, -0.3)
    foot = pix(0.0, 0.3)
    assert encode_horizontal_vp(h, foot, FRAME) == 0.0


def test_vp_at_infinity_is_quarter_turn():
    h = pix_line(0, 1, -0.3)
    theta = encode_horizontal_vp(h, [1.0, 0.0, 0.0], FRAME)
    assert abs(theta) == pytest.approx(math.pi / 2)
    assert encode_horizontal_vp(h, [-1.0, 0.0, 0.0], FRAME) == pytest.approx(-theta)


def test_vp_off_horizon_rejected():
    with pytest.raises(NotOnHorizon):
        encode_horizontal_vp(pix_line(0, 1, -0.3), pix(0.2, 0.5), FRAME)


def test_vp_angle_matches_geometry():
    # horizon y = 0.3, vp at x = 0.4: angle at C between (0, 0.3, -1) and (0.4, 0.3, -1)
    theta = encode_horizontal_vp(pix_line(0, 1, -0.3), pix(0.4, 0.3), FRAME)
    assert abs(theta) == pytest.approx(math.atan(0.4 / math.hypot(0.3, 1.0)), abs=1e-14)


def test_vp_synthetic_round_trip():
    cam = CameraModel(f=500.0, width=1000, height=1000, tilt=math.radians(30), yaw=math.radians(15), cam_height=5)
    rec = ground_truth(cam)
    theta = encode_horizontal_vp(rec.horizon, rec.v_x, FRAME)
    assert theta == rec.theta_align
    vp = decode_horizontal_vp(rec.horizon, theta, FRAME)
    a = FRAME.point_to_normalized(vp)
    b = FRAME.point_to_normalized(rec.v_x)
    np.testing.assert_allclose(a[:2] / a[2], b[:2] / b[2], atol=1e-9)


def test_vp_decode_mirrors_encode_examples():
    h = pix_line(0, 1, -0.3)
    assert proportional(decode_horizontal_vp(h, 0.0, FRAME), pix(0.0, 0.3))
    p = decode_horizontal_vp(h, math.pi / 2, FRAME)
    assert abs(p[2]) < 1e-15 and abs(p[1]) < 1e-12


def test_vp_round_trip_many(rng):
    frame = CodecFrame(1280, 720)
    for _ in range(2000):
        t = rng.uniform(-math.pi / 2, math.pi / 2) * 0.999
        dist = rng.uniform(0.05, 3) * rng.choice([-1, 1])
        a = rng.uniform(0, 2 * math.pi)
        h = frame.line_from_normalized((math.cos(a), math.sin(a), dist))
        vp = decode_horizontal_vp(h, t, frame)
        assert encode_horizontal_vp(h, vp, frame) == pytest.approx(t, abs=1e-9)


def test_geometry_round_trip(example_record):
    frame = example_record.frame
    h, vz = decode_geometry(example_record.encoded, frame)
    assert proportional(h, example_record.horizon, tol=1e-9)
    assert proportional(vz, example_record.v_z, tol=1e-9)
    np.testing.assert_allclose(encode_geometry(h, vz, frame), example_record.encoded, atol=1e-12)
