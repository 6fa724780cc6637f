import math

import numpy as np
import pytest

from plapcomp import _rk, quadrature
from plapcomp.errors import DomainError, StiffnessError
from plapcomp.functions import RadialFunction, builtin_test_functions, gaussian, lorentzian
from plapcomp.reports import BoundReport, tolerance_band


def harmonic(t, f, w):
    return w, -f


def test_integrator_harmonic_oscillator():
    traj = _rk.integrate(harmonic, 0.0, 1.0, 0.0, 3.0, dense=True)
    assert traj.f_end == pytest.approx(math.cos(3.0), abs=1e-9)
    assert traj.w_end == pytest.approx(-math.sin(3.0), abs=1e-9)
    assert traj.zeros == pytest.approx([math.pi / 2], abs=1e-10)
    t = np.linspace(0.0, 3.0, 50)
    f, w = traj(t)
    assert f == pytest.approx(np.cos(t), abs=1e-8)
    assert w == pytest.approx(-np.sin(t), abs=1e-8)


def test_integrator_stops_at_zero():
    traj = _rk.integrate(harmonic, 0.0, 1.0, 0.0, 10.0, stop_at_zero=True)
    assert traj.stopped_at_zero
    assert traj.t_end == pytest.approx(math.pi / 2, abs=1e-10)


def test_integrator_step_budget():
    with pytest.raises(StiffnessError):
        _rk.integrate(harmonic, 0.0, 1.0, 0.0, 100.0, max_steps=5)


def test_quadrature_is_exact_for_polynomials():
    assert quadrature.integrate(lambda x: x ** 7, 0.0, 2.0, cells=3) == pytest.approx(2 ** 8 / 8, rel=1e-14)
    V = quadrature.CumulativeMeasure(lambda x: 3 * x ** 2, 2.0, cells=16)
    assert V(np.array([0.5, 1.3, 2.0])) == pytest.approx([0.125, 1.3 ** 3, 8.0], rel=1e-13)
    assert V.total == pytest.approx(8.0, rel=1e-14)


@pytest.mark.parametrize("f", [gaussian(0.7), lorentzian(1.5)])
def test_analytic_derivatives(f):
    t, h = 0.8, 1e-4
    for lo, hi in ((f.f, f.df), (f.df, f.d2f), (f.d2f, f.d3f)):
        assert float(hi(t)) == pytest.approx((float(lo(t + h)) - float(lo(t - h))) / (2 * h), rel=1e-6)


def test_builtin_functions_decrease():
    for D in (1.0, math.pi, 5.0):
        t = np.linspace(1e-3, D - 1e-3, 200)
        for f in builtin_test_functions(D):
            assert np.all(f.df(t) < 0)


def test_from_samples():
    t = np.linspace(0, 2, 201)
    f = RadialFunction.from_samples(t, np.sin(t), np.cos(t))
    assert float(f(1.234)) == pytest.approx(math.sin(1.234), abs=1e-9)
    assert float(f.d2f(1.234)) == pytest.approx(-math.sin(1.234), abs=1e-3)
    with pytest.raises(DomainError):
        RadialFunction.from_samples(t[:3], t[:3])


def test_report_verdicts():
    assert tolerance_band() == 1e-8
    assert tolerance_band(1e-7, 2e-9) == pytest.approx(1e-5)
    assert BoundReport("x", 1.0, 1.0, -5e-9, {}).verdict == "holds"
    assert BoundReport("x", 1.0, 1.0, -2e-8, {}).verdict == "violated"
    assert BoundReport("x", 1.0, 1.0, float("nan"), {}).verdict == "inconclusive"
    assert BoundReport("x", 1.0, 1.0, 1.0, {}, report_only=True).verdict == "inconclusive"
    assert math.isnan(BoundReport("x", 1.0, 1.0, 0.0, {}).measured_norm)
