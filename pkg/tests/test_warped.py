import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from plapcomp.errors import DomainError, ProfileError
from plapcomp.model import ModelSpace, model_ball_volume
from plapcomp.warped import (WarpedProfile, ball_volume, curvature_report, flat_profile,
                             hyperbolic_profile, integral_curvature_norm, laplacian_excess_psi,
                             laplacian_of_r, min_ricci_K, model_profile, parse_profile,
                             perturbed_sphere_profile, psi_norm, ricci_eigenvalues, table_profile)


@pytest.mark.parametrize("n, K", [(2, 1.0), (3, 2.0), (4, 0.5)])
def test_model_profile_has_constant_ricci(n, K):
    prof = model_profile(n, K)
    t = np.linspace(0.1, prof.D - 0.1, 7)
    radial, tangential = ricci_eigenvalues(prof, t)
    assert radial == pytest.approx((n - 1) * K, rel=1e-12)
    assert tangential == pytest.approx((n - 1) * K, rel=1e-10)
    # (1 - phi'^2) / phi^2 cancels near the pole, which costs a few digits
    assert min_ricci_K(prof) == pytest.approx(K, rel=1e-8)
    assert integral_curvature_norm(prof, K, n / 2 + 1) == pytest.approx(0.0, abs=1e-12)
    assert psi_norm(prof, K, 4.0, 0.9 * prof.D) == pytest.approx(0.0, abs=1e-12)


def test_ball_volume_matches_model():
    prof = model_profile(3, 1.0)
    assert ball_volume(prof, 1.2) == pytest.approx(model_ball_volume(ModelSpace(3, 1.0), 1.2), rel=1e-12)
    assert ball_volume(prof, None) == pytest.approx(2 * math.pi ** 2, rel=1e-12)


def test_flat_and_hyperbolic():
    flat = flat_profile(3, 2.0)
    assert laplacian_of_r(flat, 0.5) == pytest.approx(4.0)
    assert min_ricci_K(flat) == pytest.approx(0.0, abs=1e-12)
    hyp = hyperbolic_profile(2, 1.5)
    assert min_ricci_K(hyp) == pytest.approx(-1.0, rel=1e-12)
    # against K = 0 the hyperbolic plane is short by exactly 1 everywhere
    assert integral_curvature_norm(hyp, 0.0, 2.0) == pytest.approx(1.0, rel=1e-12)
    assert laplacian_excess_psi(hyp, 0.0, 1.0) == pytest.approx(1 / math.tanh(1.0) - 1.0)


def test_perturbed_norm_shrinks_with_amplitude():
    norms = [integral_curvature_norm(perturbed_sphere_profile(3, a), 1.0, 2.0) for a in (0.08, 0.04, 0.02, 0.01)]
    assert all(x > y > 0 for x, y in zip(norms, norms[1:]))
    # the shortfall is linear in a to leading order
    assert norms[-2] / norms[-1] == pytest.approx(2.0, rel=0.05)


@settings(max_examples=25, deadline=None)
@given(c=st.floats(0.3, 3.0), a=st.floats(0.005, 0.08))
def test_norms_scale_like_curvature(c, a):
    # metric times c^2: curvature and its normalized norms scale by 1/c^2
    prof = perturbed_sphere_profile(2, a)
    big = prof.scaled(c)
    base = integral_curvature_norm(prof, 1.0, 2.0)
    assert integral_curvature_norm(big, 1.0 / c ** 2, 2.0) == pytest.approx(base / c ** 2, rel=1e-9)
    assert min_ricci_K(big) == pytest.approx(min_ricci_K(prof) / c ** 2, rel=1e-8)


def test_reflection_preserves_volume():
    prof = perturbed_sphere_profile(2, 0.05, 3)
    ref = prof.reflected()
    assert ball_volume(ref, None) == pytest.approx(ball_volume(prof, None), rel=1e-12)
    assert ball_volume(ref, 1.0) == pytest.approx(ball_volume(prof, None) - ball_volume(prof, math.pi - 1.0), rel=1e-10)


def test_parse_profile_syntax():
    assert parse_profile("sphere", 2, K=4.0).D == pytest.approx(math.pi / 2)
    assert parse_profile("flat", 3).D == 1.0
    assert parse_profile("hyperbolic", 3, D=2.5).D == 2.5
    assert parse_profile("perturbed-sphere:0.02", 2).name == "perturbed-sphere(0.02,2)"
    assert parse_profile("perturbed-sphere:0.02,3", 2).name == "perturbed-sphere(0.02,3)"
    for bad in ("cube", "perturbed-sphere:", "perturbed-sphere:1,2,3"):
        with pytest.raises(DomainError):
            parse_profile(bad, 2, K=1.0)
    with pytest.raises(DomainError):
        parse_profile("sphere", 2)


def _write_table(path, t, phi):
    path.write_text("t,phi\n" + "".join(f"{float(a)!r},{float(b)!r}\n" for a, b in zip(t, phi)))
    return path


def test_table_profile_reproduces_sphere(tmp_path):
    t = np.linspace(0.0, math.pi, 801)
    path = _write_table(tmp_path / "s.csv", t, np.sin(t))
    prof = parse_profile(f"table:{path}", 2)
    assert prof.closed and prof.D == pytest.approx(math.pi)
    assert ball_volume(prof, None) == pytest.approx(4 * math.pi, rel=1e-8)
    assert min_ricci_K(prof) == pytest.approx(1.0, abs=1e-3)


def test_open_table_profile(tmp_path):
    t = np.linspace(0.0, 1.0, 101)
    prof = table_profile(3, _write_table(tmp_path / "f.csv", t, t))
    assert not prof.closed
    assert ball_volume(prof, 1.0) == pytest.approx(4 / 3 * math.pi, rel=1e-10)


@pytest.mark.parametrize("body, message", [
    ("x,y\n0,0\n1,1\n2,2\n3,3\n", "header"),
    ("t,phi\n0,0\n1,1\n", "4 data rows"),
    ("t,phi\n0,0\n1,1\n1,2\n3,3\n", "increasing"),
    ("t,phi\n0,0.1\n1,1\n2,2\n3,3\n", r"phi\(0\)"),
    ("t,phi\n0,0\n1,1\n2,-1\n3,3\n", "positive"),
    ("t,phi\n0,0\n1,one\n2,2\n3,3\n", "non-numeric"),
])
def test_table_profile_rejects_bad_files(tmp_path, body, message):
    path = tmp_path / "bad.csv"
    path.write_text(body)
    with pytest.raises(ProfileError, match=message):
        table_profile(2, path)


def test_profile_validation():
    with pytest.raises(ProfileError):
        WarpedProfile(2, 1.0, lambda t: np.asarray(t) + 1.0, lambda t: 1.0 + 0 * np.asarray(t),
                      lambda t: 0 * np.asarray(t), False)
    with pytest.raises(ProfileError):
        WarpedProfile(2, 1.0, lambda t: 2 * np.asarray(t), lambda t: 2 + 0 * np.asarray(t),
                      lambda t: 0 * np.asarray(t), False)


def test_curvature_domain_errors():
    prof = model_profile(2, 1.0)
    with pytest.raises(DomainError):
        ricci_eigenvalues(prof, 0.0)
    with pytest.raises(DomainError):
        integral_curvature_norm(prof, 1.0, 1.0)
    with pytest.raises(DomainError):
        laplacian_excess_psi(flat_profile(2, 5.0), 1.0, 3.5)


def test_curvature_report_refines_consistently():
    rep = curvature_report(perturbed_sphere_profile(3, 0.05), 1.0, [2.0, 3.0])
    for q in (2.0, 3.0):
        assert rep.norms[q] == pytest.approx(rep.norms_refined[q], rel=1e-8)
    assert np.all(rep.ric_minus_K >= 0)
