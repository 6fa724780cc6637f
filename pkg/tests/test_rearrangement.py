import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from plapcomp import quadrature
from plapcomp.errors import DomainError, ProfileError
from plapcomp.functions import RadialFunction, cosine, gaussian, polynomial
from plapcomp.model import ModelSpace, model_ball_volume
from plapcomp.radial import solve_first_dirichlet_profile
from plapcomp.rearrangement import (_matching_radii, coarea_audit, decreasing_rearrangement,
                                    equimeasurability_error, faber_krahn_check, isoperimetric_check,
                                    obata_check, rearrangement_by_sorting, spherical_rearrangement,
                                    volume_matching_radius)
from plapcomp.warped import ball_volume, flat_profile, model_profile, perturbed_sphere_profile


def lp_mass(f, profile, R, p):
    nodes, weights = quadrature.gl_nodes(0.0, R, 4096)
    return float(np.dot(weights * profile.area_density(nodes), np.abs(f(nodes)) ** p))


def ground_state(profile, R, p):
    res = solve_first_dirichlet_profile(profile, R, p)
    return RadialFunction.from_samples(res.t, np.maximum(res.f, 0.0), res.fprime, "ground state")


WIGGLY = polynomial([2.5, 3.0, -4.0, 1.0])  # positive on [0, 3], two turning points


@pytest.mark.parametrize("f, prof, R", [
    (gaussian(1.0), model_profile(2, 1.0), 2.0),
    (WIGGLY, flat_profile(3, 3.0), 3.0),
    (WIGGLY, perturbed_sphere_profile(2, 0.05), 3.0),
])
def test_equimeasurable_and_mass_preserving(f, prof, R):
    fbar = decreasing_rearrangement(f, prof, R)
    assert equimeasurability_error(fbar) < 1e-8
    for p in (1.5, 2.0, 3.0):
        exact = lp_mass(f, prof, R, p)
        assert fbar.lp_mass(p) == pytest.approx(exact, rel=1e-8)
    assert np.all(np.diff(fbar.values) <= 0)
    assert fbar.total == pytest.approx(ball_volume(prof, R), rel=1e-12)


def test_monotone_function_is_its_own_rearrangement():
    prof = model_profile(3, 1.0)
    f = cosine(0.5)
    fbar = decreasing_rearrangement(f, prof, 2.5)
    for t in (0.3, 1.0, 2.2):
        assert fbar(ball_volume(prof, t)) == pytest.approx(float(f(t)), rel=1e-7)


def test_sorting_oracle_agrees():
    prof = flat_profile(2, 3.0)
    fbar = decreasing_rearrangement(WIGGLY, prof, 3.0)
    s_mid, vals, w = rearrangement_by_sorting(WIGGLY, prof, 3.0)
    for p in (1.5, 2.0, 3.0):
        assert float(np.dot(w, vals ** p)) == pytest.approx(fbar.lp_mass(p), rel=1e-8)
    # pointwise agreement up to the oscillation of f over one refined cell
    osc = np.max(np.abs(np.diff(WIGGLY(np.linspace(0, 3, 4096 * 16 + 1)))))
    assert np.max(np.abs(fbar(s_mid) - vals)) <= 2 * osc


@settings(max_examples=15, deadline=None)
@given(c=st.lists(st.floats(-1.0, 1.0), min_size=2, max_size=4), R=st.floats(0.5, 2.5))
def test_rearrangement_properties(c, R):
    # shift a random polynomial to be positive on [0, R]
    P = polynomial([0.0] + list(c))
    vals = P(np.linspace(0, R, 2001))
    # levels are resolved to eps / spread, so nearly constant functions are out of scope
    assume(np.ptp(vals) > 1e-3)
    low = float(np.min(vals))
    f = polynomial([1.0 - low] + list(c))
    prof = model_profile(2, 1.0)
    fbar = decreasing_rearrangement(f, prof, R)
    assert equimeasurability_error(fbar) < 1e-8
    assert fbar.lp_mass(2.0) == pytest.approx(lp_mass(f, prof, R, 2.0), rel=1e-8)
    assert np.all(np.diff(fbar.values) <= 0)


def test_constant_and_negative_functions():
    prof = model_profile(2, 1.0)
    fbar = decreasing_rearrangement(polynomial([2.0]), prof, 1.0)
    assert fbar(0.3) == 2.0
    assert fbar.lp_mass(2.0) == pytest.approx(4.0 * ball_volume(prof, 1.0), rel=1e-12)
    with pytest.raises(DomainError):
        decreasing_rearrangement(polynomial([-1.0, 1.0]), prof, 1.0)


def test_volume_matching_radius():
    m = ModelSpace(3, 1.0)
    for frac in (0.01, 0.3, 0.5, 0.97):
        r = volume_matching_radius(m, frac)
        assert model_ball_volume(m, r) / m.volume == pytest.approx(frac, rel=1e-12)
    assert _matching_radii(m, [0.3, 0.5]) == pytest.approx([volume_matching_radius(m, 0.3), math.pi / 2], rel=1e-10)
    with pytest.raises(DomainError):
        volume_matching_radius(ModelSpace(3, 0.0), 0.5)


def test_spherical_rearrangement_preserves_mass():
    prof = perturbed_sphere_profile(2, 0.05)
    f = ground_state(prof, 1.2, 2.0)
    model = ModelSpace(2, 1.0)
    beta = ball_volume(prof, None) / model.volume
    sph = spherical_rearrangement(decreasing_rearrangement(f, prof, 1.2), model, beta)
    assert sph.lp_mass(2.0) == pytest.approx(lp_mass(f, prof, 1.2, 2.0), rel=1e-8)
    assert sph.gradient_integral(2.0) == pytest.approx(sph.gradient_integral_coarea(2.0), rel=1e-6)


# ------------------------------------------------------------- co-area


def test_coarea_order_and_holder():
    prof = model_profile(3, 1.0)
    f = ground_state(prof, math.pi / 2, 2.0)
    lsp = coarea_audit(f, prof, radius=math.pi / 2, p=2.0, n_thresholds=32)
    assert np.all(lsp.holder_ok)
    spread = float(np.ptp(lsp.levels.v))
    assert lsp.coarea_order(1e-3 * spread) >= 0.9


def test_coarea_flags_critical_levels():
    prof = flat_profile(2, 3.0)
    # f' vanishes at t = (8 - sqrt 28)/6, the maximum of f; just below it |f'| is tiny
    top = float(WIGGLY((8 - math.sqrt(28)) / 6))
    lsp = coarea_audit(WIGGLY, prof, thresholds=[top - 1e-10, 2.6], radius=3.0, crit_tol=1e-4)
    assert lsp.flagged[0]
    assert not lsp.flagged[1]
    assert np.all(lsp.holder_ok)


# ------------------------------------------------------------- isoperimetric checks


@pytest.mark.parametrize("n, R", [(2, 0.7), (3, 1.5707963267948966), (4, 2.5)])
def test_isoperimetric_model_is_sharp(n, R):
    rep = isoperimetric_check(model_profile(n, 1.0), 1.0, R)
    assert rep.details["alpha_min"] == pytest.approx(1.0, abs=1e-9)
    assert rep.verdict == "holds"


def test_isoperimetric_perturbed():
    rep = isoperimetric_check(perturbed_sphere_profile(2, 0.05), 1.0, 1.0, alpha=1.2)
    assert 0.8 < rep.details["alpha_min"] < 1.2
    assert rep.verdict == "holds"


def test_faber_krahn_model():
    rep = faber_krahn_check(model_profile(2, 1.0), 1.0, 2.0, 1.0)
    d = rep.details
    assert d["alpha_required"] == pytest.approx(1.0, abs=1e-6)
    assert d["equimeasurability_error"] < 1e-8
    assert d["lp_mass_error"] < 1e-8
    assert rep.verdict == "holds"


def test_faber_krahn_replay_chain():
    rep = faber_krahn_check(perturbed_sphere_profile(2, 0.05), 1.0, 3.0, 1.2)
    d = rep.details
    assert d["chain_ok"]
    assert d["alpha_required"] <= d["alpha_ps"] * (1 + 1e-6) <= d["alpha_iso_max"] * (1 + 2e-6)
    assert d["replay_consistency"] < 1e-5
    assert d["lp_mass_error"] < 1e-8


def test_closed_only_checks():
    with pytest.raises(ProfileError):
        faber_krahn_check(flat_profile(2, 1.0), 1.0, 2.0, 0.5)
    with pytest.raises(DomainError):
        isoperimetric_check(model_profile(2, 1.0), 0.0, 1.0)
    with pytest.raises(DomainError):
        isoperimetric_check(model_profile(2, 1.0), 1.0, math.pi)


def test_obata_model_and_perturbed():
    rep = obata_check(model_profile(3, 1.0), 1.0, 2.0)
    assert rep.details["alpha_required"] == pytest.approx(1.0, abs=1e-6)
    rep2 = obata_check(perturbed_sphere_profile(3, 0.01), 1.0, 2.0, alpha=1.001)
    assert rep2.details["alpha_required"] < 1.001
    assert rep2.verdict == "holds"
