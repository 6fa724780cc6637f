import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import jn_zeros

from plapcomp.errors import DomainError, ProfileError
from plapcomp.model import ModelSpace
from plapcomp.radial import (interval_problem, model_ball_problem, p_rayleigh_quotient, pi_p,
                             profile_ball_problem, rayleigh_minimize_grid, solve_first_dirichlet,
                             solve_first_dirichlet_model, solve_first_dirichlet_profile,
                             solve_first_neumann_radial)
from plapcomp.warped import flat_profile, model_profile, perturbed_sphere_profile

slow = settings(max_examples=8, deadline=None)


def interval_oracle(p, T=1.0):
    return (p - 1) * (pi_p(p) / (2 * T)) ** p


def test_pi_p_at_two():
    assert pi_p(2.0) == pytest.approx(math.pi, rel=1e-15)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0, 4.0])
def test_interval_closed_form(p):
    res = solve_first_dirichlet(interval_problem(1.0, p))
    assert res.lam == pytest.approx(interval_oracle(p), rel=1e-8)


@slow
@given(p=st.floats(1.3, 5.0), T=st.floats(0.3, 3.0))
def test_interval_closed_form_property(p, T):
    res = solve_first_dirichlet(interval_problem(T, p))
    assert res.lam == pytest.approx(interval_oracle(p, T), rel=1e-7)


@pytest.mark.parametrize("n, k", [(2, 0), (3, 0.5), (4, 1)])
def test_flat_ball_bessel(n, k):
    # j_{n/2-1, 1}^2 on the unit ball; n = 3 is pi^2
    z = math.pi if n == 3 else jn_zeros(k, 1)[0]
    res = solve_first_dirichlet_model(ModelSpace(n, 0.0), 1.0, 2.0)
    assert res.lam == pytest.approx(z * z, rel=1e-8)


@pytest.mark.parametrize("n, K", [(2, 1.0), (3, 1.0), (2, 2.0), (3, 2.0)])
def test_hemisphere_is_nK(n, K):
    res = solve_first_dirichlet_model(ModelSpace(n, K), 0.5 * math.pi / math.sqrt(K), 2.0)
    assert res.lam == pytest.approx(n * K, rel=1e-8)


def test_eigenfunction_shape_and_flux():
    res = solve_first_dirichlet_model(ModelSpace(3, 1.0), 1.2, 3.0)
    assert res.f[0] == 1.0
    assert abs(res.f[-1]) < 1e-8
    assert np.max(res.fprime) <= 1e-8
    assert np.all(res.f >= -1e-8)
    assert res.zero_count == 0
    assert res.residual < 1e-7
    assert res.bracket_width <= 1e-8 * res.lam * 1.01


@slow
@given(r1=st.floats(0.3, 2.8), dr=st.floats(0.02, 0.3), p=st.sampled_from([1.5, 2.0, 3.0]))
def test_domain_monotonicity(r1, dr, p):
    m = ModelSpace(2, 1.0)
    r2 = min(r1 + dr, 3.1)
    assert solve_first_dirichlet_model(m, r2, p).lam < solve_first_dirichlet_model(m, r1, p).lam


@slow
@given(c=st.floats(0.2, 5.0), p=st.sampled_from([1.6, 2.0, 2.7]))
def test_flat_scale_invariance(c, p):
    m = ModelSpace(3, 0.0)
    lam1 = solve_first_dirichlet_model(m, 1.0, p).lam
    lamc = solve_first_dirichlet_model(m, c, p).lam
    assert lamc == pytest.approx(lam1 * c ** (-p), rel=1e-7)


def test_curved_scale_invariance():
    # metric scaled by c^2 turns B_K(r) into B_{K/c^2}(c r) and lambda into c^-p lambda
    p, c = 2.5, 1.7
    lam = solve_first_dirichlet_model(ModelSpace(2, 1.0), 1.0, p).lam
    lamc = solve_first_dirichlet_model(ModelSpace(2, 1.0 / c ** 2), c, p).lam
    assert lamc == pytest.approx(lam * c ** (-p), rel=1e-7)


def test_p_continuity():
    m = ModelSpace(2, 1.0)
    lam = [solve_first_dirichlet_model(m, 1.0, p).lam for p in (1.999, 2.0, 2.001)]
    assert abs(lam[0] - lam[1]) < 0.02 and abs(lam[2] - lam[1]) < 0.02
    # central second difference is small: lambda is smooth in p
    assert abs(lam[0] - 2 * lam[1] + lam[2]) < 1e-4


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_grid_minimizer_agrees(p):
    prob = model_ball_problem(ModelSpace(2, 1.0), 1.3, p)
    lam_shoot = solve_first_dirichlet(prob).lam
    lam_grid, f = rayleigh_minimize_grid(prob, 512)
    assert lam_grid == pytest.approx(lam_shoot, rel=1e-3)
    assert np.max(np.abs(f)) == pytest.approx(1.0)
    assert f[-1] == 0.0


def test_grid_minimizer_converges_at_second_order():
    prob = interval_problem(1.0, 2.0)
    exact = interval_oracle(2.0)
    errs = [abs(rayleigh_minimize_grid(prob, n)[0] - exact) for n in (128, 256)]
    assert math.log2(errs[0] / errs[1]) > 1.8


def test_grid_minimizer_neumann():
    prob = interval_problem(1.0, 2.0, bc="neumann")
    lam, f = rayleigh_minimize_grid(prob, 256)
    assert lam == pytest.approx(math.pi ** 2, rel=1e-3)


def test_ramp_quotient():
    t = np.linspace(0.0, 1.0, 2001)
    q = p_rayleigh_quotient(1.0 - t, interval_problem(1.0, 2.0), fprime=-np.ones_like(t))
    assert q == pytest.approx(3.0, rel=1e-12)
    assert p_rayleigh_quotient(1.0 - t, interval_problem(1.0, 2.0)) == pytest.approx(3.0, rel=1e-6)


def test_quotient_of_eigenfunction_is_eigenvalue():
    prob = model_ball_problem(ModelSpace(3, -1.0), 1.0, 3.0)
    res = solve_first_dirichlet(prob)
    assert p_rayleigh_quotient(res.f, prob, res.fprime) == pytest.approx(res.lam, rel=1e-6)


def test_quotient_rejects_boundary_violation():
    t = np.linspace(0.0, 1.0, 101)
    with pytest.raises(DomainError):
        p_rayleigh_quotient(np.ones_like(t), interval_problem(1.0, 2.0))


def test_profile_solver_matches_model():
    prof = model_profile(3, 1.0)
    a = solve_first_dirichlet_profile(prof, 1.0, 2.5).lam
    b = solve_first_dirichlet_model(ModelSpace(3, 1.0), 1.0, 2.5).lam
    assert a == pytest.approx(b, rel=1e-8)


@pytest.mark.parametrize("n, K", [(2, 1.0), (3, 2.0)])
def test_neumann_sphere(n, K):
    res = solve_first_neumann_radial(model_profile(n, K), 2.0)
    assert res.lam == pytest.approx(n * K, rel=1e-7)
    assert res.nodal_radius == pytest.approx(0.5 * math.pi / math.sqrt(K), rel=1e-6)
    assert res.extra["nodal_ok"]
    assert abs(res.extra["orthogonality"]) < 1e-8


@pytest.mark.parametrize("p", [1.5, 3.0])
def test_neumann_sphere_equals_hemisphere(p):
    mu = solve_first_neumann_radial(model_profile(2, 1.0), p).lam
    hemi = solve_first_dirichlet_model(ModelSpace(2, 1.0), math.pi / 2, p).lam
    assert mu == pytest.approx(hemi, rel=1e-6)


def test_neumann_nodal_identity_on_perturbed_sphere():
    res = solve_first_neumann_radial(perturbed_sphere_profile(2, 0.05), 3.0)
    assert res.zero_count == 1
    assert res.extra["nodal_deviation"] < 1e-6
    assert res.extra["lambda_plus"] == pytest.approx(res.lam, rel=1e-6)


def test_domain_errors():
    with pytest.raises(DomainError):
        model_ball_problem(ModelSpace(2, 1.0), math.pi, 2.0)
    with pytest.raises(DomainError):
        interval_problem(1.0, 1.0)
    with pytest.raises(DomainError):
        profile_ball_problem(flat_profile(2, 1.0), 1.5, 2.0)
    with pytest.raises(DomainError):
        profile_ball_problem(model_profile(2, 1.0), math.pi, 2.0)
    with pytest.raises((DomainError, ProfileError)):
        solve_first_neumann_radial(flat_profile(2, 1.0), 2.0)
    with pytest.raises(DomainError):
        rayleigh_minimize_grid(interval_problem(1.0, 2.0), 16)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_zero_count_is_monotone_along_the_solve(p):
    for prob in (model_ball_problem(ModelSpace(3, 1.0), 2.0, p),
                 profile_ball_problem(perturbed_sphere_profile(2, 0.05), 1.2, p)):
        assert solve_first_dirichlet(prob).extra["sturm_monotone"]
