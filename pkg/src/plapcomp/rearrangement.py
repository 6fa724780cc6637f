"""Rearrangements, level-set bookkeeping and the isoperimetric-type checks.

Domains are pole balls of a warped profile (or the whole closed profile).  A
radial function's superlevel sets are unions of annuli, so their measures are
exact sums of V(t) = vol B(pole, t) at the crossing radii; the decreasing
rearrangement is built from that distribution function, never from sorted
samples (the sorting construction is kept only as a cross-check).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize
from scipy.interpolate import PchipInterpolator

from . import quadrature
from .errors import DomainError, ProfileError, SolverError
from .functions import RadialFunction
from .model import ModelSpace, model_area_density, model_ball_volume, model_sphere_area
from .radial import (DEFAULT_TOL, solve_first_dirichlet_model, solve_first_dirichlet_profile,
                     solve_first_neumann_radial)
from .reports import BoundReport, tolerance_band
from .warped import WarpedProfile, ball_volume, integral_curvature_norm

GRID = 4096


def _as_function(f, R: float) -> RadialFunction:
    if isinstance(f, RadialFunction):
        return f
    vals = np.asarray(f, dtype=float)
    return RadialFunction.from_samples(np.linspace(0.0, R, vals.size), vals)


class _Levels:
    """Exact level-set geometry of a radial function on the pole ball [0, R]."""

    def __init__(self, f: RadialFunction, profile: WarpedProfile, R: float, grid_size: int = GRID):
        self.f = f
        self.profile = profile
        self.R = float(R)
        t = np.linspace(0.0, self.R, grid_size + 1)
        self.t = np.union1d(t, self._critical_points(t))
        self.v = np.asarray(f(self.t), dtype=float)
        self.V = quadrature.CumulativeMeasure(profile.area_density, self.R)
        self.total = self.V.total

    def _critical_points(self, t):
        """Interior zeros of f' where it changes sign, so that every local
        extreme value is a sample and no level slips between samples."""
        d = np.asarray(self.f.df(t), dtype=float)
        cells = np.flatnonzero(np.sign(d[:-1]) * np.sign(d[1:]) < 0)
        return np.array([optimize.brentq(self.f.df, t[i], t[i + 1], xtol=1e-15, rtol=1e-15)
                         for i in cells])

    def _roots(self, lo, hi, tau):
        """Vectorised safeguarded Newton for f(t) = tau on brackets [lo, hi]."""
        f, df = self.f, self.f.df
        g_lo = f(lo) - tau
        g_hi = f(hi) - tau
        denom = np.where(g_hi != g_lo, g_hi - g_lo, 1.0)
        x = np.clip(lo - g_lo * (hi - lo) / denom, lo, hi)
        for _ in range(60):
            g = f(x) - tau
            done = np.abs(g) <= 1e-15 * max(1.0, float(np.max(np.abs(self.v))))
            same = np.sign(g) == np.sign(g_lo)
            lo = np.where(same & ~done, x, lo)
            g_lo = np.where(same & ~done, g, g_lo)
            hi = np.where(~same & ~done, x, hi)
            d = df(x)
            with np.errstate(divide="ignore", invalid="ignore"):
                newton = x - g / d
            ok = np.isfinite(newton) & (newton > lo) & (newton < hi)
            x_new = np.where(done, x, np.where(ok, newton, 0.5 * (lo + hi)))
            if np.all(np.abs(x_new - x) <= 4e-16 * max(1.0, self.R)) or np.all(done):
                x = x_new
                break
            x = x_new
        return x

    def crossings(self, taus):
        """(row, radius, direction) of every level crossing; direction +1 where f falls through tau."""
        taus = np.atleast_1d(np.asarray(taus, dtype=float))
        v = self.v
        # cell i is crossed by tau exactly when min(v_i, v_i+1) <= tau < max(v_i, v_i+1)
        lo_v = np.minimum(v[:-1], v[1:])
        hi_v = np.maximum(v[:-1], v[1:])
        order = np.argsort(taus, kind="stable")
        ts = taus[order]
        first = np.searchsorted(ts, lo_v, side="left")
        stop = np.searchsorted(ts, hi_v, side="left")
        counts = stop - first
        total = int(counts.sum())
        if total == 0:
            return np.zeros(0, int), np.zeros(0), np.zeros(0)
        ci = np.repeat(np.arange(lo_v.size), counts)
        offsets = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
        rows = order[np.repeat(first, counts) + offsets]
        tau = taus[rows]
        x = self._roots(self.t[ci], self.t[ci + 1], tau)
        dirs = np.where(v[ci] > tau, 1.0, -1.0)
        return rows, x, dirs

    def distribution(self, taus):
        """vol {f > tau} for each tau."""
        taus = np.atleast_1d(np.asarray(taus, dtype=float))
        rows, radii, dirs = self.crossings(taus)
        out = np.zeros(taus.size)
        np.add.at(out, rows, dirs * self.V(radii))
        out += np.where(self.v[-1] > taus, self.total, 0.0)
        return out

    def level_data(self, taus, p: float = 2.0):
        """Per-level area, integral of 1/|f'| and of |f'|^(p-1), and min |f'| at crossings."""
        taus = np.atleast_1d(np.asarray(taus, dtype=float))
        rows, radii, _ = self.crossings(taus)
        A = self.profile.area_density(radii)
        grad = np.abs(self.f.df(radii))
        area = np.zeros(taus.size)
        inv = np.zeros(taus.size)
        pw = np.zeros(taus.size)
        gmin = np.full(taus.size, np.inf)
        np.add.at(area, rows, A)
        with np.errstate(divide="ignore"):
            np.add.at(inv, rows, A / grad)
        np.add.at(pw, rows, A * grad ** (p - 1.0))
        np.minimum.at(gmin, rows, grad)
        return area, inv, pw, gmin

    def lp_mass(self, p: float) -> float:
        nodes, weights = quadrature.gl_nodes(0.0, self.R, GRID)
        return float(np.dot(weights * self.profile.area_density(nodes), np.abs(self.f(nodes)) ** p))


@dataclass
class RearrangedFunction:
    """Nonincreasing f-bar on [0, |Omega|] tabulated at exact (s, value) knots."""

    s: np.ndarray
    values: np.ndarray
    total: float
    levels: _Levels | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.s.size >= 2:
            self._interp = PchipInterpolator(self.s, self.values, extrapolate=False)
        else:
            self._interp = None

    def __call__(self, s):
        s = np.clip(np.asarray(s, dtype=float), 0.0, self.total)
        if self._interp is None:
            return np.full_like(s, self.values[0])
        return self._interp(s)

    def distribution(self, taus):
        """vol {s : f-bar(s) > tau}, read off the tabulated function."""
        taus = np.atleast_1d(np.asarray(taus, dtype=float))
        out = np.empty(taus.size)
        vals = self.values
        for i, tau in enumerate(taus):
            if tau >= vals[0]:
                out[i] = 0.0
            elif tau < vals[-1]:
                out[i] = self.total
            else:
                k = int(np.searchsorted(-vals, -tau, side="left"))  # vals[k-1] > tau >= vals[k]
                a, b = self.s[k - 1], self.s[k]
                if vals[k] == tau:
                    out[i] = b
                else:
                    out[i] = optimize.brentq(lambda x: float(self._interp(x)) - tau, a, b,
                                             xtol=1e-15 * self.total, rtol=4 * np.finfo(float).eps)
        return out

    def lp_mass(self, p: float) -> float:
        """Integral of f-bar^p over [0, |Omega|], Gauss-Legendre on each knot interval."""
        if self._interp is None:
            return self.total * abs(float(self.values[0])) ** p
        x, w = quadrature._leggauss(6)
        a, b = self.s[:-1], self.s[1:]
        nodes = a[:, None] + (b - a)[:, None] * x
        weights = (b - a)[:, None] * w
        return float(np.sum(weights * np.abs(self._interp(nodes)) ** p))


def decreasing_rearrangement(f, profile: WarpedProfile, radius: float | None = None,
                             grid_size: int = GRID, refine: int = 3) -> RearrangedFunction:
    """Decreasing rearrangement of a nonnegative radial function on a pole ball.

    ``f`` is a :class:`RadialFunction` or samples on ``linspace(0, radius)``;
    ``radius`` defaults to the whole profile.  The knots are the sample values
    plus ``refine`` evenly spaced levels between consecutive ones, each paired
    with its exact superlevel volume.
    """
    R = profile.D if radius is None else float(radius)
    if not 0 < R <= profile.D * (1 + 1e-12):
        raise DomainError(f"radius must lie in (0, {profile.D}], got {R}")
    R = min(R, profile.D)
    fn = _as_function(f, R)
    lev = _Levels(fn, profile, R, grid_size)
    vmax = float(np.max(lev.v))
    vmin = float(np.min(lev.v))
    if vmin < -1e-9 * max(abs(vmax), 1.0):
        raise DomainError(f"rearrangement needs f >= 0; min sample is {vmin}")
    vmin = max(vmin, 0.0)
    if vmax - vmin <= 1e-14 * max(abs(vmax), 1e-300):
        return RearrangedFunction(np.array([0.0]), np.array([vmax]), lev.total, lev)
    knots = np.unique(np.clip(lev.v, vmin, None))[::-1]
    if refine > 0:
        frac = np.arange(1, refine + 1) / (refine + 1)
        mids = knots[1:, None] + (knots[:-1] - knots[1:])[:, None] * frac[None, :]
        knots = np.unique(np.concatenate([knots, mids.ravel()]))[::-1]
    s = lev.distribution(knots)
    s[0] = 0.0
    if s[-1] < lev.total:
        s = np.append(s, lev.total)
        knots = np.append(knots, knots[-1])
    keep = np.concatenate([[True], np.diff(s) > 0])
    return RearrangedFunction(s[keep], knots[keep], lev.total, lev)


def equimeasurability_error(fbar: RearrangedFunction, n_thresholds: int = 64) -> float:
    """max |vol {f > tau} - vol {f-bar > tau}| / |Omega| over evenly spaced levels.

    The levels are spaced in value, so they generally fall between knots.
    """
    if fbar.levels is None:
        raise DomainError("equimeasurability needs the source function")
    top, bottom = float(fbar.values[0]), float(fbar.values[-1])
    taus = bottom + (top - bottom) * (np.arange(n_thresholds) + 0.5) / n_thresholds
    exact = fbar.levels.distribution(taus)
    return float(np.max(np.abs(exact - fbar.distribution(taus))) / fbar.total)


def rearrangement_by_sorting(f, profile: WarpedProfile, radius: float | None = None,
                             grid_size: int = GRID, subdivisions: int = 16):
    """Sort (value, cell measure) pairs on a refined grid; returns (s_mid, values, weights).

    Independent of the distribution-function construction; its resolution
    is the oscillation of f over one refined cell.
    """
    R = profile.D if radius is None else min(float(radius), profile.D)
    fn = _as_function(f, R)
    edges = np.linspace(0.0, R, grid_size * subdivisions + 1)
    V = quadrature.CumulativeMeasure(profile.area_density, R)
    weights = np.diff(V(edges))
    vals = fn(0.5 * (edges[:-1] + edges[1:]))
    order = np.argsort(-vals, kind="stable")
    w = weights[order]
    s_mid = np.cumsum(w) - 0.5 * w
    return s_mid, vals[order], w


# ------------------------------------------------------------ model transplant


def volume_matching_radius(model: ModelSpace, fraction: float) -> float:
    """Radius r with vol B_K(r) / vol(M_K) = fraction (K > 0)."""
    if model.K <= 0:
        raise DomainError("volume fractions need a compact model (K > 0)")
    if not 0 < fraction < 1:
        raise DomainError(f"fraction must lie in (0, 1), got {fraction}")
    vol = model.volume
    diam = model.diameter
    return optimize.brentq(lambda r: model_ball_volume(model, r) / vol - fraction,
                           1e-300, diam, xtol=1e-15 * diam, rtol=4 * np.finfo(float).eps)


def _matching_radii(model: ModelSpace, fractions) -> np.ndarray:
    """Vectorised :func:`volume_matching_radius` by Newton on a cumulative table."""
    fractions = np.asarray(fractions, dtype=float)
    diam = model.diameter
    V = quadrature.CumulativeMeasure(lambda t: model_area_density(model, t), diam)
    target = fractions * V.total
    table_r = V.edges
    table_v = V.cumulative
    r = np.interp(target, table_v, table_r)
    for _ in range(6):
        dens = model_area_density(model, r)
        step = np.where(dens > 0, (V(r) - target) / np.where(dens > 0, dens, 1.0), 0.0)
        r = np.clip(r - step, 0.0, diam)
    return r


@dataclass
class SphericalRearrangement:
    """F(rho) = f-bar(beta vol B_K(rho)) on the model ball of radius ``radius``."""

    fbar: RearrangedFunction
    model: ModelSpace
    beta: float
    radius: float

    def __post_init__(self):
        self._V = quadrature.CumulativeMeasure(lambda t: model_area_density(self.model, t), self.radius)

    def __call__(self, rho):
        return self.fbar(self.beta * self._V(rho))

    def lp_mass(self, p: float, cells: int = GRID) -> float:
        """beta times the integral of F^p over the model ball."""
        nodes, weights = quadrature.gl_nodes(0.0, self.radius, cells)
        dens = weights * model_area_density(self.model, nodes)
        return self.beta * float(np.dot(dens, np.abs(self(nodes)) ** p))

    def gradient_integral(self, p: float, grid_size: int = 8 * GRID) -> float:
        """beta times the integral of |F'|^p, F' by second-order differences."""
        from scipy.integrate import simpson

        rho = np.linspace(0.0, self.radius, grid_size + 1)
        F = self(rho)
        dF = np.gradient(F, rho, edge_order=2)
        return self.beta * float(simpson(np.abs(dF) ** p * model_area_density(self.model, rho), x=rho))

    def gradient_integral_coarea(self, p: float, levels: int = 2 * GRID) -> float:
        """Same integral by the co-area formula over levels of the source function.

        |F'| = beta A_K(rho) / G(tau) on the level tau = F(rho), where G is the
        co-area integral of 1/|grad f| of the source, so the integral becomes
        the integral over tau of (beta A_K)^p / G^(p-1).
        """
        lev = self.fbar.levels
        if lev is None:
            raise DomainError("co-area route needs the source function")
        top = float(self.fbar.values[0])
        x, w = quadrature._leggauss(4)
        edges = np.linspace(0.0, top, levels + 1)
        taus = (edges[:-1, None] + np.diff(edges)[:, None] * x).ravel()
        wts = (np.diff(edges)[:, None] * w).ravel()
        _, inv, _, _ = lev.level_data(taus, p)
        s = lev.distribution(taus)
        rho = _matching_radii(self.model, np.clip(s / self.beta / self.model.volume, 0.0, 1.0))
        AK = model_area_density(self.model, rho)
        with np.errstate(divide="ignore", invalid="ignore"):
            integrand = np.where(inv > 0, (self.beta * AK) ** p / inv ** (p - 1.0), 0.0)
        return float(np.dot(wts, integrand))


def spherical_rearrangement(fbar: RearrangedFunction, model: ModelSpace, beta: float) -> SphericalRearrangement:
    """Transplant f-bar to the model ball of volume |Omega| / beta."""
    if model.K <= 0:
        raise DomainError("spherical rearrangement needs a compact model (K > 0)")
    if not beta > 0:
        raise DomainError(f"beta must be positive, got {beta}")
    fraction = fbar.total / beta / model.volume
    if fraction > 1 + 1e-12:
        raise DomainError(f"|Omega| / beta exceeds the model volume (fraction {fraction})")
    radius = model.diameter if fraction >= 1 - 1e-12 else volume_matching_radius(model, fraction)
    return SphericalRearrangement(fbar, model, beta, radius)


# ------------------------------------------------------------------- level sets


@dataclass
class LevelSetProfile:
    thresholds: np.ndarray
    superlevel_volumes: np.ndarray
    boundary_areas: np.ndarray
    gradient_coarea: np.ndarray
    gradient_power: np.ndarray
    flagged: np.ndarray
    p: float
    levels: _Levels = field(repr=False)

    @property
    def holder_rhs(self) -> np.ndarray:
        p = self.p
        return self.gradient_coarea ** ((p - 1.0) / p) * self.gradient_power ** (1.0 / p)

    @property
    def holder_ok(self) -> np.ndarray:
        ok = self.boundary_areas <= self.holder_rhs * (1 + 1e-12) + 1e-300
        return ok | self.flagged

    def coarea_errors(self, delta: float) -> np.ndarray:
        """|one-sided difference quotient of V - G(tau)| / max G on unflagged levels.

        The step goes downward in tau unless that leaves the range of f.
        """
        taus = self.thresholds
        V0 = self.superlevel_volumes
        lowest = float(np.min(self.levels.v))
        down = taus - delta >= lowest
        step = np.where(down, -delta, delta)
        V1 = self.levels.distribution(taus + step)
        fd = (V1 - V0) / -step
        good = ~self.flagged & (down | (taus + delta <= float(np.max(self.levels.v))))
        scale = np.max(self.gradient_coarea[good]) if np.any(good) else 1.0
        err = np.abs(fd - self.gradient_coarea) / scale
        return np.where(good, err, np.nan)

    def coarea_order(self, delta: float, refinements: int = 3, margin: float = 20.0) -> float:
        """Observed order of the difference quotient over successive halvings of delta.

        Only levels at least ``margin * delta`` away from the extreme values of
        f enter, since near an extremum the asymptotic regime starts later.
        """
        v = self.levels.v
        inner = ((self.thresholds - v.min() >= margin * delta)
                 & (v.max() - self.thresholds >= margin * delta))
        if not np.any(inner & ~self.flagged):
            raise DomainError("no level is far enough from the extremes for this delta")
        errs = [np.nanmax(np.where(inner, self.coarea_errors(delta / 2 ** k), np.nan))
                for k in range(refinements)]
        orders = [math.log2(errs[k] / errs[k + 1]) for k in range(refinements - 1)]
        return min(orders)


def coarea_audit(f, profile: WarpedProfile, thresholds=None, radius: float | None = None,
                 p: float = 2.0, n_thresholds: int = 64, crit_tol: float = 1e-8) -> LevelSetProfile:
    """Level-set profile of a radial function on a pole ball.

    Default thresholds are mid-quantiles of the sampled values.  Levels
    through a critical point (|f'| below ``crit_tol`` times its maximum at a
    crossing) are flagged rather than rejected.
    """
    R = profile.D if radius is None else min(float(radius), profile.D)
    fn = _as_function(f, R)
    lev = _Levels(fn, profile, R)
    if thresholds is None:
        thresholds = np.quantile(lev.v, (np.arange(n_thresholds) + 0.5) / n_thresholds)[::-1]
    thresholds = np.asarray(thresholds, dtype=float)
    area, inv, pw, gmin = lev.level_data(thresholds, p)
    gscale = float(np.max(np.abs(fn.df(lev.t))))
    flagged = gmin < crit_tol * gscale
    return LevelSetProfile(thresholds, lev.distribution(thresholds), area, inv, pw, flagged, p, lev)


# -------------------------------------------------------- isoperimetric checks


def _closed_model(profile: WarpedProfile, K: float) -> ModelSpace:
    if not profile.closed:
        raise ProfileError("this check needs a closed profile")
    if not K > 0:
        raise DomainError(f"volume-normalised checks need K > 0, got {K}")
    return ModelSpace(profile.n, K)


def _alpha_min(profile, model, radii, total):
    """Isoperimetric ratio for pole balls of the given radii, vectorised."""
    radii = np.asarray(radii, dtype=float)
    V = quadrature.CumulativeMeasure(profile.area_density, profile.D)
    vol = V(radii)
    frac = vol / total
    r0 = _matching_radii(model, frac)
    area_model = model_area_density(model, r0)
    vol_model = frac * model.volume
    return area_model * vol / (profile.area_density(radii) * vol_model)


def isoperimetric_check(profile: WarpedProfile, K: float, domain_radius: float, alpha: float = 1.0,
                        q: float | None = None) -> BoundReport:
    """area(dB_K(r0)) <= alpha area(dOmega) vol B_K(r0) / vol(Omega) for a pole ball Omega."""
    model = _closed_model(profile, K)
    R = float(domain_radius)
    if not 0 < R < profile.D:
        raise DomainError(f"domain radius must lie in (0, {profile.D}), got {R}")
    vol_M = ball_volume(profile, None)
    vol = ball_volume(profile, R)
    frac = vol / vol_M
    if not 0 < frac < 1:
        raise DomainError(f"degenerate domain: volume fraction {frac}")
    r0 = volume_matching_radius(model, frac)
    area_model = float(model_sphere_area(model, r0))
    area = float(profile.area_density(R))
    vol_model = model_ball_volume(model, r0)
    lhs = area_model
    rhs = alpha * area * vol_model / vol
    alpha_min = area_model * vol / (area * vol_model)
    q = q if q is not None else max(2.0, profile.n / 2.0 + 0.5)
    eps = integral_curvature_norm(profile, K, q)
    return BoundReport(
        "isoperimetric", lhs, rhs, rhs - lhs,
        {"n": profile.n, "K": K, "q": q, "radius": R, "r0": r0, "alpha": alpha,
         "measured_norm": eps, "profile": profile.name},
        band=1e-10 * rhs,
        details={"alpha_min": alpha_min, "volume_fraction": frac},
    )


def faber_krahn_check(profile: WarpedProfile, K: float, p: float, domain_radius: float,
                      alpha: float = 1.0, q: float | None = None, tol: float = DEFAULT_TOL,
                      replay: bool = True) -> BoundReport:
    """alpha^p lambda(Omega) >= lambda(B_K) for a pole ball and its volume-fraction model ball.

    With ``replay`` the computed eigenfunction is rearranged onto the model
    ball and the quantities of the co-area argument are recorded:
    alpha_required <= alpha_ps <= alpha_iso_max, where alpha_ps^p is the ratio
    of the beta-weighted gradient integral of the rearrangement to that of f
    and alpha_iso_max the largest isoperimetric ratio over the level balls.
    """
    model = _closed_model(profile, K)
    R = float(domain_radius)
    if not 0 < R < profile.D:
        raise DomainError(f"domain radius must lie in (0, {profile.D}), got {R}")
    vol_M = ball_volume(profile, None)
    vol = ball_volume(profile, R)
    frac = vol / vol_M
    r_K = volume_matching_radius(model, frac)
    res = solve_first_dirichlet_profile(profile, R, p, tol)
    res_K = solve_first_dirichlet_model(model, r_K, p, tol)
    lam, lam_K = res.lam, res_K.lam
    alpha_req = (lam_K / lam) ** (1.0 / p)
    q = q if q is not None else max(2.0, profile.n / 2.0 + 0.5)
    eps = integral_curvature_norm(profile, K, q)
    details = {"alpha_required": alpha_req, "lambda_domain": lam, "lambda_model_ball": lam_K,
               "model_radius": r_K, "volume_fraction": frac}
    if replay:
        details.update(_replay(profile, model, res, R, p, vol_M, alpha_req, lam_K))
    band = tolerance_band(res.bracket_width, res_K.bracket_width)
    lhs = alpha ** p * lam
    return BoundReport(
        "faber-krahn", lhs, lam_K, lhs - lam_K,
        {"n": profile.n, "p": p, "q": q, "K": K, "radius": R, "alpha": alpha, "measured_norm": eps,
         "profile": profile.name},
        band=band, details=details,
    )


def _replay(profile, model, res, R, p, vol_M, alpha_req, lam_K):
    f = RadialFunction.from_samples(res.t, np.maximum(res.f, 0.0), res.fprime, "ground state")
    fbar = decreasing_rearrangement(f, profile, R)
    beta = vol_M / model.volume
    sph = spherical_rearrangement(fbar, model, beta)
    nodes, weights = quadrature.gl_nodes(0.0, R, GRID)
    dens = weights * profile.area_density(nodes)
    grad_f = float(np.dot(dens, np.abs(f.df(nodes)) ** p))
    mass_f = float(np.dot(dens, np.abs(f(nodes)) ** p))
    grad_fd = sph.gradient_integral(p)
    grad_co = sph.gradient_integral_coarea(p)
    mass_bar = sph.lp_mass(p)
    eq_err = equimeasurability_error(fbar)
    alpha_ps = (grad_fd / grad_f) ** (1.0 / p)
    radii = np.linspace(0.0, R, 257)[1:]
    iso = _alpha_min(profile, model, radii, vol_M)
    alpha_iso_max = float(np.max(iso))
    return {
        "beta": beta,
        "alpha_ps": alpha_ps,
        "alpha_iso_max": alpha_iso_max,
        "alpha_iso_min": float(np.min(iso)),
        "rayleigh_rearranged": grad_fd / mass_bar,
        "rayleigh_source": grad_f / mass_f,
        "equimeasurability_error": eq_err,
        "lp_mass_error": abs(mass_bar - mass_f) / mass_f,
        "fbar_lp_mass_error": abs(fbar.lp_mass(p) - mass_f) / mass_f,
        "replay_consistency": abs(grad_fd - grad_co) / grad_fd,
        "chain_ok": bool(alpha_req <= alpha_ps * (1 + 1e-6) and alpha_ps <= alpha_iso_max * (1 + 1e-6)),
        "rearranged_above_model": bool(grad_fd / mass_bar >= lam_K * (1 - 1e-6)),
        "gradient_ratio": grad_fd / grad_f,
    }


def obata_check(profile: WarpedProfile, K: float, p: float, alpha: float = 1.0,
                q: float | None = None, tol: float = DEFAULT_TOL) -> BoundReport:
    """alpha mu(M) >= mu(M_K), with mu(M_K) as the hemisphere Dirichlet eigenvalue.

    mu(M) is the radial first Neumann eigenvalue; the Dirichlet eigenvalues of
    its two nodal pole balls are recorded alongside.
    """
    model = _closed_model(profile, K)
    res = solve_first_neumann_radial(profile, p, tol)
    if res.zero_count != 1:
        raise SolverError("nodal split failed: Neumann eigenfunction does not change sign once",
                          zero_count=res.zero_count)
    hemi = solve_first_dirichlet_model(model, 0.5 * model.diameter, p, tol)
    mu, mu_K = res.lam, hemi.lam
    q = q if q is not None else max(2.0, profile.n / 2.0 + 0.5)
    eps = integral_curvature_norm(profile, K, q)
    lhs = alpha * mu
    return BoundReport(
        "obata", lhs, mu_K, lhs - mu_K,
        {"n": profile.n, "p": p, "q": q, "K": K, "alpha": alpha, "measured_norm": eps,
         "profile": profile.name},
        band=tolerance_band(res.bracket_width, hemi.bracket_width),
        details={"alpha_required": mu_K / mu, "mu": mu, "mu_model": mu_K,
                 "nodal_radius": res.nodal_radius, "lambda_plus": res.extra["lambda_plus"],
                 "lambda_minus": res.extra["lambda_minus"],
                 "nodal_deviation": res.extra["nodal_deviation"], "radial_class": True},
    )
