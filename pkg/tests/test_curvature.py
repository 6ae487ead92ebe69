import math

import numpy as np
import pytest
from scipy.special import gamma

from mkin import curvature as cv
from mkin import kinematics as kin
from mkin.curves import ArcLengthCurve, circle, line
from mkin.errors import NonSmoothBall
from mkin.plane import PlaneContext

EUC = PlaneContext.euclidean()
L4 = PlaneContext.lp(4.0)
L4_SIGMA = math.pi / (4 * gamma(1.25) ** 2 / gamma(1.5))


def cycloid():
    return kin.RollingMotion(line((0, 0), (1, 0)), circle((0, 1), 1, -math.pi / 2), EUC, s_max=10)


def test_busemann_sine():
    assert cv.busemann_sine(EUC, (1, 0), (1, 1)) == pytest.approx(math.sqrt(0.5), abs=1e-12)
    assert cv.busemann_sine(L4, (1, 0), (0, 1)) == pytest.approx(L4_SIGMA, abs=1e-9)
    assert cv.busemann_sine(L4, (1, 0), (-3, 0)) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("r", [0.5, 2.0])
def test_euclidean_circle_curvature(r):
    c = ArcLengthCurve(circle(radius=r), EUC)
    est = cv.curvature_limit(c, EUC, 0.4)
    assert est.value == pytest.approx(1 / r, abs=1e-8)
    assert est.order >= 1.5


def test_limit_and_formula_agree_l4():
    sample = cv.busemann_curvature_formula(ArcLengthCurve(circle(radius=2.0), L4), L4, 0.5)
    assert sample.chi_limit == pytest.approx(sample.chi_formula, abs=1e-8)
    assert sample.chi_limit == pytest.approx(0.46509755785519225, abs=1e-7)


def test_q_derivative():
    for h in (1e-2, 1e-3):
        assert cv.q_derivative_check(ArcLengthCurve(circle(), EUC), EUC, 0.7, h) <= 1e-10
    # in l4 the residual settles at a nonzero value instead of vanishing
    vals = [cv.q_derivative_check(ArcLengthCurve(circle(), L4), L4, 0.7, h) for h in (1e-3, 1e-4)]
    assert vals[1] == pytest.approx(2.5216, abs=1e-3)
    assert abs(vals[0] - vals[1]) < 1e-3
    with pytest.raises(NonSmoothBall):
        cv.q_derivative_check(ArcLengthCurve(circle(), PlaneContext.lp(math.inf)), PlaneContext.lp(math.inf), 0.7, 1e-3)


def test_cycloid_inflection_pole_is_wheel_center():
    pd = cv.pole_data(cycloid(), EUC)
    assert np.allclose(pd.K, [0, 0]) and pd.phi_dot == pytest.approx(-1.0, abs=1e-9)
    assert np.allclose(cv.inflection_pole(cycloid(), EUC), [0.0, 1.0], atol=1e-9)


def test_inflection_curve_l4_has_return_curve():
    m = kin.circle_on_circle(L4, 1.0, 0.5, 0.4)
    ic = cv.inflection_curve(m, L4, 64)
    assert ic.membership_residuals(L4, m).max() <= 1e-8
    good = np.all(np.isfinite(ic.points), axis=1)
    assert np.allclose(ic.return_points[good], 2 * ic.K - ic.points[good])


def test_first_es_cycloid_off_axis():
    r = cv.es_first(cycloid(), EUC, (0.4, 1.5))
    assert r.residual_first <= 1e-8
    assert r.residual_directed <= 1e-8


def test_second_es_euclidean_circles():
    s = cv.es_second(kin.circle_on_circle(EUC, 1.0, 0.5, 0.4), EUC)
    assert s.lhs == pytest.approx(-1.0, abs=1e-8)
    assert s.alpha_K == pytest.approx(1.0, abs=1e-8)
    assert s.residual <= 1e-8


def test_combined_euclidean():
    assert cv.es_combined(EUC).max_residual <= 1e-8


def test_unit_area_scale():
    lam = cv.unit_area_scale(L4)
    assert L4.scaled(lam).sigma_plane() == pytest.approx(1.0, abs=1e-8)


def test_law_of_sines_l4():
    rng = np.random.default_rng(0)
    for a, b in rng.normal(size=(50, 2, 2)):
        euc = abs(a[0] * b[1] - a[1] * b[0]) / (np.hypot(*a) * np.hypot(*b))
        val = cv.busemann_sine(L4, a, b) * L4.sigma_line(a) * L4.sigma_line(b) / L4.sigma_plane()
        assert val == pytest.approx(euc, abs=1e-9)
