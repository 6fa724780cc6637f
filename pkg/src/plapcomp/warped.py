"""Rotationally symmetric manifolds dr^2 + phi(r)^2 g_{S^{n-1}}.

A :class:`WarpedProfile` carries the warping function with its first two
derivatives.  Curvature, the Laplacian of the distance to the pole, ball
volumes and the volume-normalized integral curvature norms are computed from
it.  Balls are always centred at the pole t = 0.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from . import quadrature
from .errors import DomainError, ProfileError
from .model import ModelSpace, _cn, _sn, unit_sphere_area

POLE_TOL = 1e-8


@dataclass(frozen=True)
class WarpedProfile:
    n: int
    D: float
    phi: Callable
    dphi: Callable
    ddphi: Callable
    closed: bool
    name: str = "custom"

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ProfileError(f"dimension must be an integer >= 2, got {self.n}")
        if not (self.D > 0 and math.isfinite(self.D)):
            raise ProfileError(f"domain end must be a positive finite number, got {self.D}")
        _validate(self)

    @property
    def C_n(self) -> float:
        return unit_sphere_area(self.n)

    def area_density(self, t):
        """C_n phi(t)^(n-1): the area of the geodesic sphere of radius t."""
        return self.C_n * np.asarray(self.phi(t), dtype=float) ** (self.n - 1)

    def scaled(self, c: float) -> "WarpedProfile":
        """The profile c * phi(t / c) (metric multiplied by c^2)."""
        phi, dphi, ddphi = self.phi, self.dphi, self.ddphi
        return WarpedProfile(
            self.n, c * self.D,
            lambda t: c * phi(np.asarray(t) / c),
            lambda t: dphi(np.asarray(t) / c),
            lambda t: ddphi(np.asarray(t) / c) / c,
            self.closed, f"{self.name}*{c!r}",
        )

    def reflected(self) -> "WarpedProfile":
        """The same manifold seen from the opposite pole (closed profiles only)."""
        if not self.closed:
            raise ProfileError("only closed profiles have a second pole")
        D, phi, dphi, ddphi = self.D, self.phi, self.dphi, self.ddphi
        return WarpedProfile(
            self.n, D,
            lambda t: phi(D - np.asarray(t)),
            lambda t: -dphi(D - np.asarray(t)),
            lambda t: ddphi(D - np.asarray(t)),
            True, f"{self.name}[reflected]",
        )


def _validate(profile: WarpedProfile):
    D = profile.D
    phi0, dphi0 = float(profile.phi(0.0)), float(profile.dphi(0.0))
    problems = []
    if abs(phi0) > POLE_TOL:
        problems.append(f"phi(0) = {phi0!r}, expected 0")
    if abs(dphi0 - 1.0) > POLE_TOL:
        problems.append(f"phi'(0) = {dphi0!r}, expected 1")
    interior = np.linspace(0.0, D, 2049)[1:-1]
    vals = np.asarray(profile.phi(interior))
    if np.any(~np.isfinite(vals)) or np.any(vals <= 0):
        bad = interior[np.argmax((vals <= 0) | ~np.isfinite(vals))]
        problems.append(f"phi must be positive on (0, D); fails near t = {bad:.6g}")
    phiD, dphiD = float(profile.phi(D)), float(profile.dphi(D))
    if profile.closed:
        if abs(phiD) > POLE_TOL:
            problems.append(f"closed profile needs phi(D) = 0, got {phiD!r}")
        if abs(dphiD + 1.0) > POLE_TOL:
            problems.append(f"closed profile needs phi'(D) = -1, got {dphiD!r}")
    elif phiD <= 0:
        problems.append(f"profile with boundary needs phi(D) > 0, got {phiD!r}")
    if problems:
        raise ProfileError(f"invalid profile '{profile.name}': " + "; ".join(problems))


# ---------------------------------------------------------------- families

def model_profile(n: int, K: float, D: float | None = None) -> WarpedProfile:
    """phi = sn_K.  Closed (the round sphere) when K > 0 and D is omitted."""
    if K > 0 and (D is None or D >= math.pi / math.sqrt(K) * (1 - 1e-12)):
        D, closed = math.pi / math.sqrt(K), True
    else:
        if D is None:
            raise DomainError("a profile for K <= 0 needs an explicit domain end D")
        closed = False
    return WarpedProfile(
        n, D,
        lambda t: _sn(K, np.asarray(t, dtype=float)),
        lambda t: _cn(K, np.asarray(t, dtype=float)),
        lambda t: -K * _sn(K, np.asarray(t, dtype=float)),
        closed, f"sphere(K={K!r})" if K > 0 else f"model(K={K!r})",
    )


def flat_profile(n: int, D: float) -> WarpedProfile:
    return WarpedProfile(
        n, D,
        lambda t: np.asarray(t, dtype=float),
        lambda t: np.ones_like(np.asarray(t, dtype=float)),
        lambda t: np.zeros_like(np.asarray(t, dtype=float)),
        False, "flat",
    )


def hyperbolic_profile(n: int, D: float) -> WarpedProfile:
    return WarpedProfile(n, D, np.sinh, np.cosh, np.sinh, False, "hyperbolic")


def perturbed_sphere_profile(n: int, a: float, m: int = 2) -> WarpedProfile:
    """phi(t) = sin t + a sin(m t) sin^2 t on [0, pi]: a closed deformation of the unit sphere."""
    a, m = float(a), float(m)

    def phi(t):
        t = np.asarray(t, dtype=float)
        return np.sin(t) + a * np.sin(m * t) * np.sin(t) ** 2

    def dphi(t):
        t = np.asarray(t, dtype=float)
        s, c = np.sin(t), np.cos(t)
        return c + a * (m * np.cos(m * t) * s * s + 2.0 * np.sin(m * t) * s * c)

    def ddphi(t):
        t = np.asarray(t, dtype=float)
        s, c = np.sin(t), np.cos(t)
        smt, cmt = np.sin(m * t), np.cos(m * t)
        return -s + a * (-m * m * smt * s * s + 4.0 * m * cmt * s * c + 2.0 * smt * (c * c - s * s))

    return WarpedProfile(n, math.pi, phi, dphi, ddphi, True, f"perturbed-sphere({a!r},{m:g})")


def table_profile(n: int, path) -> WarpedProfile:
    """Load a ``t,phi`` table (header required) and fit a clamped cubic spline."""
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ProfileError(f"cannot read profile table {path}: {exc}") from exc
    if len(rows) < 2:
        raise ProfileError(f"{path}: need a header line and at least 4 data rows")
    header = [c.strip().lower() for c in rows[0]]
    if header != ["t", "phi"]:
        raise ProfileError(f"{path}: header must be 't,phi', got {','.join(rows[0])!r}")
    try:
        data = np.array([[float(x) for x in r] for r in rows[1:] if r], dtype=float)
    except ValueError as exc:
        raise ProfileError(f"{path}: non-numeric entry ({exc})") from exc
    if data.ndim != 2 or data.shape[1] != 2 or data.shape[0] < 4:
        raise ProfileError(f"{path}: need two columns and at least 4 data rows")
    t, phi = data[:, 0], data[:, 1]
    if t[0] != 0.0:
        raise ProfileError(f"{path}: first t must be 0, got {t[0]!r}")
    if np.any(np.diff(t) <= 0):
        i = int(np.argmax(np.diff(t) <= 0))
        raise ProfileError(f"{path}: t must be strictly increasing (row {i + 3})")
    if abs(phi[0]) > POLE_TOL:
        raise ProfileError(f"{path}: phi(0) must be 0, got {phi[0]!r}")
    if np.any(phi[1:-1] <= 0):
        i = int(np.argmax(phi[1:-1] <= 0)) + 1
        raise ProfileError(f"{path}: phi must be positive inside, row {i + 2} has {phi[i]!r}")
    closed = abs(phi[-1]) <= POLE_TOL
    bc = ((1, 1.0), (1, -1.0)) if closed else ((1, 1.0), "not-a-knot")
    spline = CubicSpline(t, phi, bc_type=bc)
    d1, d2 = spline.derivative(1), spline.derivative(2)
    return WarpedProfile(
        n, float(t[-1]),
        lambda s: spline(np.asarray(s, dtype=float)),
        lambda s: d1(np.asarray(s, dtype=float)),
        lambda s: d2(np.asarray(s, dtype=float)),
        closed, f"table({path.name})",
    )


def parse_profile(spec: str, n: int, K: float | None = None, D: float | None = None) -> WarpedProfile:
    """Build a profile from the mini-syntax ``sphere``, ``flat``, ``hyperbolic``,
    ``perturbed-sphere:a,m`` or ``table:<path>``."""
    kind, _, arg = spec.partition(":")
    if kind == "sphere":
        if K is None:
            raise DomainError("profile 'sphere' needs K")
        return model_profile(n, K, D)
    if kind == "flat":
        return flat_profile(n, 1.0 if D is None else D)
    if kind == "hyperbolic":
        return hyperbolic_profile(n, 1.0 if D is None else D)
    if kind == "perturbed-sphere":
        parts = [p for p in arg.split(",") if p]
        if not 1 <= len(parts) <= 2:
            raise DomainError(f"expected perturbed-sphere:a,m, got {spec!r}")
        return perturbed_sphere_profile(n, float(parts[0]), int(parts[1]) if len(parts) > 1 else 2)
    if kind == "table":
        return table_profile(n, arg)
    raise DomainError(f"unknown profile {spec!r}")


# ------------------------------------------------------- pointwise geometry

def _interior(profile: WarpedProfile, t):
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0) or np.any(t >= profile.D):
        raise DomainError(f"curvature is evaluated strictly inside (0, {profile.D}); got {t}")
    return t


def _ricci(profile, t):
    n = profile.n
    phi, dphi, ddphi = profile.phi(t), profile.dphi(t), profile.ddphi(t)
    if np.any(phi <= 0):
        raise ProfileError("phi <= 0 at an evaluation point")
    radial = -(n - 1) * ddphi / phi
    tangential = -ddphi / phi + (n - 2) * (1.0 - dphi * dphi) / (phi * phi)
    return radial, tangential


def ricci_eigenvalues(profile: WarpedProfile, t):
    """Ricci eigenvalues (radial, tangential) at distance t from the pole."""
    t = _interior(profile, t)
    radial, tangential = _ricci(profile, t)
    if t.ndim == 0:
        return float(radial), float(tangential)
    return radial, tangential


def smallest_ricci(profile: WarpedProfile, t):
    radial, tangential = _ricci(profile, _interior(profile, t))
    return np.minimum(radial, tangential)


def ric_minus(profile: WarpedProfile, K: float, t):
    """((n-1) K - rho)_+ : the Ricci curvature lying below (n-1) K."""
    return np.maximum(0.0, (profile.n - 1) * K - smallest_ricci(profile, t))


def laplacian_of_r(profile: WarpedProfile, t):
    t = _interior(profile, t)
    return (profile.n - 1) * profile.dphi(t) / profile.phi(t)


def _excess(profile, K, t):
    """Raw Delta r - model Delta r (not clipped)."""
    return (profile.n - 1) * (profile.dphi(t) / profile.phi(t) - _cn(K, t) / _sn(K, t))


def _check_psi_domain(profile, K, t):
    t = _interior(profile, t)
    if K > 0 and np.any(t >= math.pi / math.sqrt(K)):
        raise DomainError(f"psi needs t < pi/sqrt(K) = {math.pi / math.sqrt(K)}")
    return t


def laplacian_excess_psi(profile: WarpedProfile, K: float, t):
    """psi = (Delta r - model Delta r)_+ at distance t from the pole."""
    t = _check_psi_domain(profile, K, t)
    val = np.maximum(0.0, _excess(profile, K, t))
    return float(val) if val.ndim == 0 else val


# ---------------------------------------------------------- integral norms

def _ball_radius(profile, radius):
    if radius is None:
        return profile.D
    if not (0 < radius <= profile.D * (1 + 1e-12)):
        raise DomainError(f"ball radius must lie in (0, {profile.D}], got {radius}")
    return min(float(radius), profile.D)


def ball_volume(profile: WarpedProfile, radius: float, cells: int = quadrature.DEFAULT_CELLS) -> float:
    """vol B(pole, radius) = C_n * integral of phi^(n-1)."""
    R = _ball_radius(profile, radius)
    return quadrature.integrate(profile.area_density, 0.0, R, cells)


def normalized_norm(profile: WarpedProfile, values: Callable, s: float, radius: float | None = None,
                    cells: int = quadrature.DEFAULT_CELLS) -> float:
    """(1/vol B * integral over B of |g|^s)^(1/s) for a radial function g."""
    R = _ball_radius(profile, radius)
    nodes, weights = quadrature.gl_nodes(0.0, R, cells)
    dens = weights * profile.area_density(nodes)
    vals = np.abs(values(nodes))
    vmax = float(vals.max()) if vals.size else 0.0
    if vmax == 0.0:
        return 0.0
    # factor out the maximum so large exponents cannot overflow
    mean = np.dot(dens, (vals / vmax) ** s) / dens.sum()
    return vmax * float(mean) ** (1.0 / s)


def _check_q(profile, q):
    if not q > profile.n / 2.0:
        raise DomainError(f"integral curvature norms need q > n/2 = {profile.n / 2}; got q = {q}")


def integral_curvature_norm(profile: WarpedProfile, K: float, q: float, center_radius: float | None = None,
                            cells: int = quadrature.DEFAULT_CELLS) -> float:
    """Normalized L^q norm of Ric_-^K over the pole ball (whole profile when no radius)."""
    _check_q(profile, q)
    return normalized_norm(profile, lambda t: ric_minus(profile, K, t), q, center_radius, cells)


def psi_norm(profile: WarpedProfile, K: float, s: float, radius: float,
             cells: int = quadrature.DEFAULT_CELLS) -> float:
    """Normalized L^s norm of the Laplacian excess psi over the pole ball."""
    if s < 1:
        raise DomainError(f"psi norm exponent must be >= 1, got {s}")
    R = _ball_radius(profile, radius)
    if K > 0 and R > math.pi / math.sqrt(K) * (1 + 1e-12):
        raise DomainError(f"psi is defined only up to pi/sqrt(K) = {math.pi / math.sqrt(K)}")
    return normalized_norm(profile, lambda t: np.maximum(0.0, _excess(profile, K, t)), s, R, cells)


def min_ricci_K(profile: WarpedProfile, grid_size: int = 4096) -> float:
    """Largest K with Ric >= (n-1) K pointwise: min rho / (n-1), refined from a grid."""
    from scipy.optimize import minimize_scalar

    h = profile.D / grid_size
    t = (np.arange(grid_size) + 0.5) * h
    rho = smallest_ricci(profile, t)
    i = int(np.argmin(rho))
    lo, hi = max(t[i] - h, 0.5 * h * 1e-3), min(t[i] + h, profile.D - 0.5 * h * 1e-3)
    res = minimize_scalar(lambda x: float(smallest_ricci(profile, x)), bounds=(lo, hi),
                          method="bounded", options={"xatol": 1e-12})
    return min(float(res.fun), float(rho[i])) / (profile.n - 1)


@dataclass
class CurvatureReport:
    grid: np.ndarray
    rho_min: np.ndarray
    ric_minus_K: np.ndarray
    psi: np.ndarray
    norms: dict
    norms_refined: dict
    K: float
    radius: float


def curvature_report(profile: WarpedProfile, K: float, qs, radius: float | None = None,
                     grid_size: int = quadrature.DEFAULT_CELLS) -> CurvatureReport:
    """Pointwise curvature samples plus normalized norms at two resolutions."""
    R = _ball_radius(profile, radius)
    grid = (np.arange(grid_size) + 0.5) * (R / grid_size)
    rho = smallest_ricci(profile, grid)
    ricm = np.maximum(0.0, (profile.n - 1) * K - rho)
    psi = np.full_like(grid, np.nan)
    ok = grid < (math.pi / math.sqrt(K) if K > 0 else math.inf)
    psi[ok] = np.maximum(0.0, _excess(profile, K, grid[ok]))
    norms = {q: integral_curvature_norm(profile, K, q, R, grid_size) for q in qs}
    refined = {q: integral_curvature_norm(profile, K, q, R, 2 * grid_size) for q in qs}
    return CurvatureReport(grid, rho, ricm, psi, norms, refined, K, R)
