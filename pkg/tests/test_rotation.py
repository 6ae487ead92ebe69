import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mkin.curves import ParamCurve, StarlikeCurve, circle
from mkin.errors import CenterPoint, MeasureMismatch
from mkin.plane import PlaneContext
from mkin.rotation import (GeneralRotation, angle_between, brass_check, compose, from_polar, make_measure,
                           motion_apply, rotate, to_polar, unit_circle_measure)

LINF = PlaneContext.lp(math.inf)
L4 = PlaneContext.lp(4.0)
EUC = PlaneContext.euclidean()


def ellipse(a, b):
    return ParamCurve(lambda t: np.stack([a * np.cos(t), b * np.sin(t)], axis=-1),
                      lambda t: np.stack([-a * np.sin(t), b * np.cos(t)], axis=-1),
                      (0.0, 2 * math.pi), closed=True, name="ellipse")


def test_euclidean_rotation_is_ordinary():
    q = np.array([[0.3, -1.2], [2.0, 0.5]])
    th = 0.9
    R = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
    assert np.allclose(rotate(GeneralRotation(unit_circle_measure(EUC), th), q), q @ R.T, atol=1e-10)


def test_linf_eighth_turn_reaches_corner():
    rot = GeneralRotation(unit_circle_measure(LINF), math.pi / 4)
    assert np.allclose(rotate(rot, [1.0, 0.0]), [1.0, 1.0], atol=1e-12)
    assert np.allclose(rotate(rot, [0.0, -2.0]), [2.0, -2.0], atol=1e-12)


def test_area_measure_on_ellipse_shifts_parameter():
    # sector area of (a cos t, b sin t) grows linearly in t
    m = make_measure(StarlikeCurve(ellipse(2.0, 0.5)), "area")
    rot = GeneralRotation(m, 1.1)
    t = 0.4
    out = rotate(rot, [2 * math.cos(t), 0.5 * math.sin(t)])
    assert np.allclose(out, [2 * math.cos(t + 1.1), 0.5 * math.sin(t + 1.1)], atol=1e-10)


def test_center_is_fixed():
    rot = GeneralRotation(unit_circle_measure(L4), 2.0)
    assert np.array_equal(rotate(rot, [0.0, 0.0]), [0.0, 0.0])


def test_theta_reduced_mod_two_pi():
    meas = unit_circle_measure(L4)
    assert GeneralRotation(meas, 7.0).theta == pytest.approx(7.0 - 2 * math.pi)


def test_compose_requires_same_class():
    a = GeneralRotation(unit_circle_measure(L4), 1.0)
    b = GeneralRotation(unit_circle_measure(LINF), 1.0)
    assert compose(a, a).theta == pytest.approx(2.0)
    with pytest.raises(MeasureMismatch):
        compose(a, b)


def test_polar_round_trip():
    meas = unit_circle_measure(L4)
    q0, q = np.array([1.0, 0.0]), np.array([-0.4, 0.9])
    r, ang = to_polar(meas, L4, q0, q)
    assert np.allclose(from_polar(meas, L4, q0, r, ang), q, atol=1e-10)
    with pytest.raises(CenterPoint):
        to_polar(meas, L4, q0, [0.0, 0.0])


def test_angle_between_quarter_linf():
    meas = unit_circle_measure(LINF)
    assert angle_between(meas, (1.0, 0.0), (0.0, 1.0)) == pytest.approx(math.pi / 2, abs=1e-12)
    assert angle_between(meas, (0.0, 1.0), (1.0, 0.0)) == pytest.approx(3 * math.pi / 2, abs=1e-12)


def test_motion_apply_moves_center():
    rot = GeneralRotation(unit_circle_measure(EUC), math.pi / 2)
    assert np.allclose(motion_apply(rot, (1.0, 1.0), (2.0, 1.0)), [1.0, 2.0], atol=1e-10)


def test_brass_conditions():
    assert brass_check(unit_circle_measure(L4)).all_ok()
    off = make_measure(StarlikeCurve(circle((0.3, 0.0), 1.0), center=(0.3, 0.0)), "density",
                       density=lambda t: 1.0 + 0.5 * np.cos(np.asarray(t)))
    rep = brass_check(off)
    assert rep.total_ok and not rep.symmetric


@settings(max_examples=25, deadline=None)
@given(st.floats(-10, 10), st.floats(-10, 10), st.floats(0.05, 20))
def test_group_and_homothety_l4(a, b, lam):
    meas = unit_circle_measure(L4)
    q = np.array([0.7, -0.2])
    r1, r2 = GeneralRotation(meas, a), GeneralRotation(meas, b)
    assert np.allclose(rotate(r1, rotate(r2, q)), rotate(GeneralRotation(meas, a + b), q), atol=1e-9)
    assert np.allclose(rotate(r1, lam * q), lam * rotate(r1, q), atol=1e-9 * lam)
    assert L4.norm(rotate(r1, q)) == pytest.approx(L4.norm(q), rel=1e-10)
