import math

import numpy as np
import pytest

from mkin.numerics import CumulativeIntegral, golden_section_min, observed_order, richardson


def test_cumulative_integral_and_inverse():
    F = CumulativeIntegral(lambda t: 1.0 + np.cos(t) ** 2, np.linspace(0, 2 * math.pi, 9), periodic=True)
    t = np.array([0.3, 2.0, 5.5])
    exact = 1.5 * t + np.sin(2 * t) / 4
    assert np.allclose(F(t), exact, atol=1e-13)
    assert F.total == pytest.approx(3 * math.pi, abs=1e-13)
    assert F(2 * math.pi + 0.3) == pytest.approx(3 * math.pi + exact[0], abs=1e-12)
    assert np.allclose(F.inverse(exact), t, atol=1e-13)


def test_bad_knots():
    with pytest.raises(ValueError):
        CumulativeIntegral(np.cos, [1.0, 0.0])


def test_richardson_removes_h2():
    f = lambda h: 2.0 + 3 * h**2 + 5 * h**4
    assert richardson([f(0.1), f(0.05), f(0.025)]) == pytest.approx(2.0, abs=1e-13)


def test_observed_order():
    assert observed_order([1 + 0.1**2, 1 + 0.05**2, 1 + 0.025**2]) == pytest.approx(2.0)
    assert observed_order([1.0, 1.0 + 1e-13, 1.0]) == math.inf


def test_golden_section():
    x = golden_section_min(lambda t: (t - 0.3) ** 2, 0.0, 1.0)
    x = x[0] if isinstance(x, tuple) else x
    assert x == pytest.approx(0.3, abs=1e-6)
