"""Explicit eigenvalue bounds and numerical checks of the comparison estimates.

Every check measures the curvature hypothesis instead of assuming it and
returns a :class:`BoundReport`.  Radial identities give exact Hessians,
Laplacians and Ricci terms; the only finite difference is the outer
Laplacian in :func:`p_bochner_residual` when p != 2.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import optimize

from . import quadrature
from .errors import DomainError, ProfileError, VacuousBoundError
from .functions import RadialFunction
from .model import ModelSpace, model_ball_volume, model_laplacian_of_r
from .radial import (DEFAULT_TOL, solve_first_dirichlet_model, solve_first_dirichlet_profile,
                     solve_first_neumann_radial)
from .reports import BoundReport, tolerance_band
from .warped import (WarpedProfile, ball_volume, integral_curvature_norm, laplacian_excess_psi,
                     laplacian_of_r, psi_norm)

# --------------------------------------------------------------- explicit bounds


def _lichnerowicz_factor(n: int, p: float) -> float:
    s = math.sqrt(n) * (p - 2.0)
    return (s + n) / ((p - 1.0) * (s + n - 1.0))


def lichnerowicz_lower_bound(n: int, p: float, K: float, eps: float) -> float:
    """Lower bound on mu_{1,p} under an integral Ricci bound eps (returns mu, not mu^(2/p))."""
    if not p >= 2:
        raise DomainError(f"the Lichnerowicz-type bound needs p >= 2, got {p}")
    if not K > 0:
        raise DomainError(f"the Lichnerowicz-type bound needs K > 0, got {K}")
    if eps < 0:
        raise DomainError(f"eps must be nonnegative, got {eps}")
    room = (n - 1) * K - 2.0 * eps
    if room <= 0:
        raise VacuousBoundError(f"(n-1)K - 2 eps = {room} <= 0: the bound is vacuous")
    return (_lichnerowicz_factor(n, p) * room) ** (p / 2.0)


def explicit_pointwise_bound(n: int, p: float, K: float) -> float:
    """The eps = 0 case of :func:`lichnerowicz_lower_bound`."""
    return lichnerowicz_lower_bound(n, p, K, 0.0)


def matei_baseline_bound(n: int, p: float, K: float) -> float:
    """((n-1)K/(p-1))^(p/2), the pointwise-Ricci baseline."""
    if not K > 0 or not p > 1:
        raise DomainError(f"baseline bound needs K > 0 and p > 1, got K={K}, p={p}")
    return ((n - 1) * K / (p - 1.0)) ** (p / 2.0)


def sobolev_threshold(p: float, C_s: float) -> float:
    """Largest eps with (p-2) - C_s eps p^2/4 >= 0; +inf when p = 2."""
    if not C_s > 0:
        raise DomainError(f"Sobolev constant must be positive, got {C_s}")
    if p < 2:
        raise DomainError(f"threshold defined for p >= 2, got {p}")
    if p == 2:
        return math.inf
    return 4.0 * (p - 2.0) / (C_s * p * p)


def sobolev_ratio(profile: WarpedProfile, q: float, f: RadialFunction,
                  cells: int = quadrature.DEFAULT_CELLS) -> float:
    """Smallest C_s for which the normalized Sobolev inequality holds for this f.

    ((avg f^(2q/(q-1)))^((q-1)/q) - 2 avg f^2) / avg |grad f|^2, with averages
    over the whole closed profile.
    """
    if not profile.closed:
        raise ProfileError("sobolev_ratio averages over a closed profile")
    if not q > 1:
        raise DomainError(f"q must exceed 1, got {q}")
    nodes, weights = quadrature.gl_nodes(0.0, profile.D, cells)
    dens = weights * profile.area_density(nodes)
    vol = dens.sum()
    vals = np.abs(f(nodes))
    grad = float(np.dot(dens, f.df(nodes) ** 2) / vol)
    if grad <= 0:
        raise DomainError("sobolev_ratio needs a nonconstant function")
    s = 2.0 * q / (q - 1.0)
    high = float(np.dot(dens, vals ** s) / vol) ** ((q - 1.0) / q)
    low = float(np.dot(dens, vals ** 2) / vol)
    return (high - 2.0 * low) / grad


# ---------------------------------------------------------- pointwise identities


def _profile_terms(profile: WarpedProfile, t: float):
    if not 0 < t < profile.D:
        raise DomainError(f"t must lie in (0, {profile.D}), got {t}")
    phi, dphi, ddphi = (float(profile.phi(t)), float(profile.dphi(t)), float(profile.ddphi(t)))
    return phi, dphi, ddphi


def _derivs(f: RadialFunction, t: float):
    if f.d2f is None:
        raise DomainError(f"{f.name} has no second derivative")
    return float(f(t)), float(f.df(t)), float(f.d2f(t))


def p_laplacian_radial(profile: WarpedProfile, p: float, f: RadialFunction, t: float) -> float:
    """(p-1)|f'|^(p-2) f'' + Delta r |f'|^(p-2) f'."""
    phi, dphi, _ = _profile_terms(profile, t)
    _, f1, f2 = _derivs(f, t)
    if f1 == 0.0 and p < 2:
        raise DomainError("p-Laplacian is singular at a critical point when p < 2")
    a = abs(f1) ** (p - 2.0) if f1 != 0.0 else (1.0 if p == 2 else 0.0)
    lap_r = (profile.n - 1) * dphi / phi
    return (p - 1.0) * a * f2 + lap_r * a * f1


def p_laplacian_expansion(profile: WarpedProfile, p: float, f: RadialFunction, t: float) -> float:
    """(p-2)|grad f|^(p-4) Hess f(grad f, grad f) + |grad f|^(p-2) Delta f, from the Hessian."""
    phi, dphi, _ = _profile_terms(profile, t)
    _, f1, f2 = _derivs(f, t)
    if f1 == 0.0:
        raise DomainError("expansion form is undefined at a critical point")
    n = profile.n
    grad = abs(f1)
    # Hessian is diag(f'', f' phi'/phi, ..., f' phi'/phi) in the frame (d_r, e_1, ..., e_{n-1})
    hess_rr = f2
    hess_tan = f1 * dphi / phi
    hess_grad_grad = hess_rr * f1 * f1
    lap = hess_rr + (n - 1) * hess_tan
    return (p - 2.0) * grad ** (p - 4.0) * hess_grad_grad + grad ** (p - 2.0) * lap


def _outer_laplacian_fd(profile, g, t, h):
    phi, dphi, _ = _profile_terms(profile, t)
    gm, g0, gp = g(t - h), g(t), g(t + h)
    d1 = (gp - gm) / (2 * h)
    d2 = (gp - 2 * g0 + gm) / (h * h)
    return d2 + (profile.n - 1) * dphi / phi * d1


def p_bochner_residual(profile: WarpedProfile, p: float, f: RadialFunction, t: float,
                       h: float | None = None, richardson: bool = True) -> float:
    """Signed residual of the p-Bochner identity for a radial f at distance t.

    LHS is (1/p) Delta |grad f|^p; RHS is
    (p-2)|grad f|^(p-2) |grad |grad f||^2
        + |grad f|^(p-2) (|Hess f|^2 + <grad f, grad Delta f> + Ric(grad f, grad f)).
    For p = 2 the left side is evaluated exactly from f'''; otherwise by
    central differences of step h, optionally Richardson-extrapolated.
    """
    lhs, rhs = _bochner_sides(profile, p, f, t, h, richardson)
    return lhs - rhs


def bochner_check(profile: WarpedProfile, p: float, f: RadialFunction, t: float,
                  rel_tol: float = 1e-8) -> BoundReport:
    """The p-Bochner identity as a report: holds when |residual| <= rel_tol * scale."""
    lhs, rhs = _bochner_sides(profile, p, f, t, None, True)
    scale = max(1.0, abs(lhs), abs(rhs))
    return BoundReport(
        "bochner", lhs, rhs, -abs(lhs - rhs),
        {"n": profile.n, "p": p, "t": t, "function": f.name, "profile": profile.name},
        band=rel_tol * scale,
        details={"residual": lhs - rhs, "outer_laplacian": "exact" if p == 2 else "richardson"},
    )


def _bochner_sides(profile, p, f, t, h, richardson):
    if f.d3f is None:
        raise DomainError(f"{f.name} has no third derivative")
    n = profile.n
    phi, dphi, ddphi = _profile_terms(profile, t)
    f1, f2, f3 = float(f.df(t)), float(f.d2f(t)), float(f.d3f(t))
    if abs(f1) < 1e-12:
        raise DomainError(f"degenerate gradient |f'({t})| = {abs(f1):.2e}")
    ratio = dphi / phi
    ratio_prime = (ddphi * phi - dphi * dphi) / (phi * phi)

    if p == 2:
        g1 = 2 * f1 * f2
        g2 = 2 * f2 * f2 + 2 * f1 * f3
        lhs = 0.5 * (g2 + (n - 1) * ratio * g1)
    else:
        if h is None:
            h = 1e-3
        h = min(h, 0.25 * min(t, profile.D - t))

        def g(s):
            return abs(float(f.df(s))) ** p

        coarse = _outer_laplacian_fd(profile, g, t, h)
        if richardson:
            fine = _outer_laplacian_fd(profile, g, t, 0.5 * h)
            lap = (4 * fine - coarse) / 3.0
        else:
            lap = coarse
        lhs = lap / p

    a = abs(f1) ** (p - 2.0)
    hess_sq = f2 * f2 + (n - 1) * (f1 * ratio) ** 2
    grad_lap = f3 + (n - 1) * (ratio_prime * f1 + ratio * f2)
    ric_rr = -(n - 1) * ddphi / phi
    rhs = (p - 2.0) * a * f2 * f2 + a * (hess_sq + f1 * grad_lap + ric_rr * f1 * f1)
    return lhs, rhs


def p_laplace_comparison_check(profile: WarpedProfile, K: float, p: float, f: RadialFunction,
                               t: float) -> BoundReport:
    """Delta_p f >= model Delta_p f + f'|f'|^(p-2) psi for radial f with f' <= 0."""
    n = profile.n
    _, f1, f2 = _derivs(f, t)
    if f1 > 0:
        raise DomainError(f"comparison needs f'(t) <= 0, got {f1}")
    if f1 == 0.0 and p < 2:
        raise DomainError("p-Laplacian is singular at a critical point when p < 2")
    a = abs(f1) ** (p - 2.0) if f1 != 0.0 else (1.0 if p == 2 else 0.0)
    model = ModelSpace(n, K)
    lap_r = float(laplacian_of_r(profile, t))
    lap_r_model = float(model_laplacian_of_r(model, t))
    psi = laplacian_excess_psi(profile, K, t)
    lhs = (p - 1.0) * a * f2 + lap_r * a * f1
    rhs = (p - 1.0) * a * f2 + lap_r_model * a * f1 + f1 * a * psi
    scale = max(1.0, abs(lhs), abs(rhs))
    return BoundReport(
        "p-comparison", lhs, rhs, lhs - rhs,
        {"n": n, "p": p, "K": K, "t": t, "function": f.name, "profile": profile.name},
        band=1e-12 * scale,
        details={"laplacian_r": lap_r, "model_laplacian_r": lap_r_model, "psi": psi},
    )


# ---------------------------------------------------------------- integral checks


def volume_doubling_check(profile: WarpedProfile, K: float, q: float, r: float, r0: float) -> BoundReport:
    """vol B(r)/vol B(r0) <= 2 vol B_K(r)/vol B_K(r0), with the measured curvature norm."""
    if not 0 < r0 < r <= profile.D * (1 + 1e-12):
        raise DomainError(f"need 0 < r0 < r <= {profile.D}, got r0={r0}, r={r}")
    model = ModelSpace(profile.n, K)
    if K > 0 and r > model.diameter * (1 + 1e-12):
        raise DomainError(f"model ball radius {r} exceeds the model diameter {model.diameter}")
    ratio = ball_volume(profile, r) / ball_volume(profile, r0)
    ratio_model = model_ball_volume(model, min(r, model.diameter)) / model_ball_volume(model, r0)
    eps = integral_curvature_norm(profile, K, q, r)
    rhs = 2.0 * ratio_model
    return BoundReport(
        "doubling", ratio, rhs, rhs - ratio,
        {"n": profile.n, "K": K, "q": q, "radius": r, "r0": r0, "measured_norm": eps,
         "profile": profile.name},
        band=1e-10 * rhs,
        details={"quotient": ratio / ratio_model, "model_ratio": ratio_model},
    )


def laplace_comparison_norm_check(profile: WarpedProfile, K: float, q: float, r: float) -> BoundReport:
    """Empirical C(n, q) = ||psi||*_{2q} / sqrt(||Ric_-^K||*_q) on the pole ball; report only."""
    eps = integral_curvature_norm(profile, K, q, r)
    psi = psi_norm(profile, K, 2.0 * q, r)
    if eps == 0.0:
        ratio = 0.0 if psi == 0.0 else math.inf
    else:
        ratio = psi / math.sqrt(eps)
    return BoundReport(
        "laplace-norm", psi, math.sqrt(eps), math.nan,
        {"n": profile.n, "K": K, "q": q, "radius": r, "measured_norm": eps, "profile": profile.name},
        report_only=True,
        details={"psi_norm": psi, "empirical_constant": ratio},
    )


def _ball_integrals(profile, f: RadialFunction, r, p, cells=quadrature.DEFAULT_CELLS):
    nodes, weights = quadrature.gl_nodes(0.0, r, cells)
    dens = weights * profile.area_density(nodes)
    return nodes, dens


def cheng_gap_check(profile: WarpedProfile, K: float, p: float, q: float, r: float,
                    tol: float = DEFAULT_TOL) -> BoundReport:
    """Dirichlet eigenvalue of a pole ball against the model ball of the same radius.

    Transplants the model eigenfunction onto the ball and reports its Rayleigh
    quotient Q together with the Hoelder error term
    E = 2 Q^(1-1/p) ||psi||*_{2 qbar} (vol B(r)/vol B(r0))^(1/p), so that
    lambda(B) <= Q <= lambda_model + E; the verdict is on lambda(B) <= lambda_model + E.
    """
    n = profile.n
    if not 0 < r < profile.D * (1 - 1e-12):
        raise DomainError(f"the ball must have nonempty boundary: need r < {profile.D}")
    qbar = max(q, p / 2.0)
    if not qbar > n / 2.0:
        raise DomainError(f"need max(q, p/2) > n/2 = {n / 2}, got {qbar}")
    model = ModelSpace(n, K)
    res = solve_first_dirichlet_profile(profile, r, p, tol)
    res_model = solve_first_dirichlet_model(model, r, p, tol)
    lam, lam_model = res.lam, res_model.lam
    fbar = RadialFunction.from_samples(res_model.t, res_model.f, res_model.fprime, "model ground state")

    nodes, dens = _ball_integrals(profile, fbar, r, p)
    fv, dfv = fbar(nodes), fbar.df(nodes)
    mass = float(np.dot(dens, np.abs(fv) ** p))
    Q = float(np.dot(dens, np.abs(dfv) ** p)) / mass
    psi_vals = np.maximum(0.0, laplacian_excess_psi(profile, K, nodes))
    direct = float(np.dot(dens, psi_vals * np.abs(dfv) ** (p - 1.0))) / mass

    r0 = optimize.brentq(lambda s: float(fbar(s)) - 0.5, 0.0, r, xtol=1e-14)
    psi2q = psi_norm(profile, K, 2.0 * qbar, r)
    vol_ratio = ball_volume(profile, r) / ball_volume(profile, r0)
    E = 2.0 * Q ** (1.0 - 1.0 / p) * psi2q * vol_ratio ** (1.0 / p)
    eps = integral_curvature_norm(profile, K, qbar, r)
    gap = lam - lam_model
    gap_plus = max(gap, 0.0)
    constant = gap_plus / math.sqrt(eps) if eps > 0 else math.nan
    band = tolerance_band(res.bracket_width, res_model.bracket_width)
    return BoundReport(
        "cheng", lam, lam_model + E, lam_model + E - lam,
        {"n": n, "p": p, "q": q, "K": K, "radius": r, "r0": r0, "measured_norm": eps,
         "profile": profile.name},
        band=band,
        details={
            "lambda_ball": lam, "lambda_model": lam_model, "gap": gap, "gap_plus": gap_plus,
            "qbar": qbar, "empirical_constant": constant, "Q": Q, "error_term": E,
            "direct_error": direct, "psi_norm_2qbar": psi2q, "volume_ratio": vol_ratio,
            "initial_slack": lam_model + E - Q, "transplant_slack": Q - lam,
        },
    )


def lichnerowicz_empirical_check(profile: WarpedProfile, K: float, p: float, q: float,
                                 tol: float = DEFAULT_TOL, C_s: float | None = None) -> BoundReport:
    """Radial first Neumann eigenvalue against the integral Lichnerowicz-type bound.

    The radial eigenvalue bounds the true one from above, so a violation here
    is a genuine violation while a pass is evidence only.  A Sobolev constant
    ``C_s`` (user supplied, not derived) adds the admissible curvature
    threshold and the Sobolev ratio of the eigenfunction to the details.
    """
    if not profile.closed:
        raise ProfileError("the Lichnerowicz-type check needs a closed profile")
    if p < 2:
        raise DomainError(f"the Lichnerowicz-type bound needs p >= 2, got {p}")
    eps = integral_curvature_norm(profile, K, q)
    bound = lichnerowicz_lower_bound(profile.n, p, K, eps)
    res = solve_first_neumann_radial(profile, p, tol)
    mu = res.lam
    details = {"mu_radial": mu, "bound": bound, "baseline": matei_baseline_bound(profile.n, p, K),
               "nodal_radius": res.nodal_radius, "radial_class": True}
    if C_s is not None:
        f = RadialFunction.from_samples(res.t, res.f, res.fprime, "neumann eigenfunction")
        details.update({"C_s": C_s, "C_s_source": "user supplied",
                        "sobolev_threshold": sobolev_threshold(p, C_s),
                        "sobolev_ratio": sobolev_ratio(profile, q, f) if q > 1 else math.nan})
    return BoundReport(
        "lichnerowicz", mu, bound, mu - bound,
        {"n": profile.n, "p": p, "q": q, "K": K, "measured_norm": eps, "profile": profile.name},
        band=tolerance_band(res.bracket_width),
        details=details,
    )
