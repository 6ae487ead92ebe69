import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mkin.curves import (ArcLengthCurve, StarlikeCurve, arc_length, circle, heliocentric_ellipse, homothet,
                         line, nephroid, polygonal_length, polyline, radial_point, tangent_direction)
from mkin.errors import BadParams, DomainViolation, NotStarlike
from mkin.plane import PlaneContext

L4 = PlaneContext.lp(4.0)
EUC = PlaneContext.euclidean()


def test_segment_length_is_norm_of_chord():
    c = line((0.5, -1.0), (1.0, 2.0))
    assert arc_length(c, L4, 0.0, 1.5) == pytest.approx(1.5 * (1 + 2**4) ** 0.25, rel=1e-12)


def test_circle_arc_euclidean():
    assert arc_length(circle((1, 2), 3.0), EUC, 0.2, 1.7) == pytest.approx(4.5, rel=1e-12)


def test_quadrature_matches_polygonal_limit():
    c = nephroid()
    assert arc_length(c, L4, 0.1, 2.0) == pytest.approx(polygonal_length(c, L4, 0.1, 2.0, 200000), abs=1e-6)


def test_eccentricity_zero_ellipse_is_circle():
    e = heliocentric_ellipse(2.0, 0.0)
    assert np.allclose(np.hypot(*e(np.linspace(0, 6, 7)).T), 2.0)


def test_homothet_scales_length():
    c = nephroid()
    big = homothet(c, (1.0, 1.0), 2.5)
    assert arc_length(big, L4, 0.3, 1.9) == pytest.approx(2.5 * arc_length(c, L4, 0.3, 1.9), rel=1e-10)
    with pytest.raises(BadParams):
        homothet(c, (0, 0), 0.0)


def test_polyline_length():
    p = polyline([(0, 0), (1, 0), (1, 2)])
    assert arc_length(p, L4, *p.domain) == pytest.approx(3.0, rel=1e-12)


def test_arclength_curve_has_unit_speed():
    a = ArcLengthCurve(nephroid(), L4)
    s = np.linspace(0.1, a.length - 0.1, 17)
    assert np.allclose(L4.norm(a.derivative(s)), 1.0, atol=1e-9)
    assert np.allclose(a.s_of_t(a.t_of_s(s)), s, atol=1e-10)


def test_arclength_second_derivative_euclidean_circle():
    a = ArcLengthCurve(circle((0, 0), 2.0), EUC)
    s = 1.3
    assert np.allclose(a.second_derivative(s), -a(s) / 4.0, atol=1e-7)


def test_tangent_direction_unit():
    d = tangent_direction(circle(), L4, 0.7)
    assert L4.norm(d) == pytest.approx(1.0, abs=1e-12)


def test_open_curve_domain():
    c = line()
    with pytest.raises(DomainViolation):
        c.check_domain(1e3)


def test_starlike_ray_crossing():
    sc = StarlikeCurve(circle((0.0, 0.0), 2.0))
    assert np.allclose(radial_point(sc, (1.0, 1.0)), [math.sqrt(2), math.sqrt(2)], atol=1e-9)


def test_not_starlike():
    with pytest.raises(NotStarlike):
        StarlikeCurve(circle((3.0, 0.0), 1.0))
    with pytest.raises(NotStarlike):
        StarlikeCurve(line())


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 3.0), st.floats(0.01, 3.0), st.floats(0.01, 3.0))
def test_arc_length_additive(a, d1, d2):
    c = nephroid()
    whole = arc_length(c, L4, a, a + d1 + d2)
    assert whole == pytest.approx(arc_length(c, L4, a, a + d1) + arc_length(c, L4, a + d1, a + d1 + d2), abs=1e-9)
