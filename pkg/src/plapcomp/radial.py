"""First eigenvalues of the radial p-Laplacian by shooting.

A radial eigenfunction solves

    (A |f'|^(p-2) f')' = -lam A |f|^(p-2) f        on (0, T)

with A the area density.  The solver integrates the first-order system in
(f, w) with the flux w = A |f'|^(p-2) f', never forming f'' (the map
w -> f' is the degenerate one for p != 2).  Integration starts a small
distance delta from the pole with the local power-law asymptotics.

``rayleigh_minimize_grid`` is an independent check: it minimises the
discrete Rayleigh quotient directly and never touches the ODE.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import linalg, optimize

from . import _rk, quadrature
from .errors import BracketError, ConvergenceError, DomainError, ProfileError, SolverError
from .model import ModelSpace, model_area_density
from .warped import WarpedProfile

DEFAULT_TOL = 1e-8
DEFAULT_GRID = 4096
POLE_OFFSET = 1e-6
ODE_RTOL = 1e-10
ODE_ATOL = 1e-12
BRACKET_CAP = 2.0 ** 60


def pi_p(p: float) -> float:
    """Half-period of the one-dimensional p-sine, 2 pi / (p sin(pi / p))."""
    return 2.0 * math.pi / (p * math.sin(math.pi / p))


@dataclass(frozen=True)
class RadialProblem:
    """Weighted one-dimensional eigenproblem on (0, T).

    ``pole`` is ``"regular"`` when A vanishes like t^pole_order at 0 (a
    geodesic ball) and ``"interval"`` when A(0) > 0 with a natural condition
    f'(0) = 0.  ``left="dirichlet"`` (f(0) = 0) is understood only by the grid
    minimiser.
    """

    A: Callable
    T: float
    p: float
    bc: str = "dirichlet"
    pole: str = "regular"
    pole_order: int = 0
    left: str = "natural"
    name: str = "radial"

    def __post_init__(self):
        errs = []
        if not self.p > 1:
            errs.append(f"p must exceed 1, got {self.p}")
        if not (self.T > 0 and math.isfinite(self.T)):
            errs.append(f"T must be positive and finite, got {self.T}")
        if self.bc not in ("dirichlet", "neumann"):
            errs.append(f"bc must be 'dirichlet' or 'neumann', got {self.bc!r}")
        if self.pole not in ("regular", "interval"):
            errs.append(f"pole must be 'regular' or 'interval', got {self.pole!r}")
        if self.left not in ("natural", "dirichlet"):
            errs.append(f"left must be 'natural' or 'dirichlet', got {self.left!r}")
        if self.pole == "interval" and self.pole_order != 0:
            errs.append("an interval problem has pole_order 0")
        if errs:
            raise DomainError("; ".join(errs))
        probe = np.asarray(self.A(np.linspace(0.0, self.T, 513)[1:-1]), dtype=float)
        if np.any(~np.isfinite(probe)) or np.any(probe <= 0):
            raise DomainError(f"area density must be positive on (0, T) for {self.name}")


def interval_problem(T: float, p: float, bc: str = "dirichlet", left: str = "natural",
                     A: Callable | None = None) -> RadialProblem:
    dens = A if A is not None else (lambda t: np.ones_like(np.asarray(t, dtype=float)))
    return RadialProblem(dens, T, p, bc, "interval", 0, left, "interval")


def model_ball_problem(model: ModelSpace, r: float, p: float) -> RadialProblem:
    if not r > 0:
        raise DomainError(f"radius must be positive, got {r}")
    if model.K > 0 and r >= model.diameter * (1 - 1e-12):
        raise DomainError(f"Dirichlet ball radius must be below the diameter {model.diameter}")
    return RadialProblem(lambda t: model_area_density(model, t), r, p, "dirichlet", "regular",
                         model.n - 1, "natural", f"B_{model.K!r}({r!r}) in dim {model.n}")


def profile_ball_problem(profile: WarpedProfile, r: float, p: float) -> RadialProblem:
    if not 0 < r <= profile.D:
        raise DomainError(f"ball radius must lie in (0, {profile.D}], got {r}")
    if profile.closed and r >= profile.D * (1 - 1e-12):
        raise DomainError("a Dirichlet ball on a closed profile must stop short of the far pole")
    return RadialProblem(profile.area_density, r, p, "dirichlet", "regular", profile.n - 1,
                         "natural", f"B({r!r}) in {profile.name}")


@dataclass
class EigenResult:
    lam: float
    t: np.ndarray
    f: np.ndarray
    fprime: np.ndarray
    flux: np.ndarray
    zero_count: int
    bracket_width: float
    residual: float
    nodal_radius: float | None = None
    extra: dict = field(default_factory=dict)

    @property
    def eigenvalue(self) -> float:
        return self.lam


# ------------------------------------------------------------------ shooting

def _phi_p(x, p):
    return np.sign(x) * np.abs(x) ** (p - 1)


class _Shooter:
    """Integrates the (f, w) system from a regular pole for a given lam."""

    def __init__(self, A: Callable, T: float, p: float, pole_order: int, delta: float | None = None):
        self.A = A
        self.T = float(T)
        self.p = float(p)
        self.m = int(pole_order)
        self.delta = POLE_OFFSET * self.T if delta is None else delta
        self.q1 = 1.0 / (self.p - 1.0)
        self.n_solves = 0

    def start(self, lam):
        """State at t = delta from the local model A ~ c t^m, f(0) = 1."""
        d, m, p = self.delta, self.m, self.p
        w = -lam * float(self.A(d)) * d / (m + 1)
        f = 1.0 - (p - 1.0) / p * (lam / (m + 1)) ** self.q1 * d ** (p / (p - 1.0))
        return f, w

    def series(self, lam, t):
        t = np.asarray(t, dtype=float)
        m, p = self.m, self.p
        f = 1.0 - (p - 1.0) / p * (lam / (m + 1)) ** self.q1 * t ** (p / (p - 1.0))
        w = -lam * self.A(t) * t / (m + 1)
        return f, w

    def rhs(self, lam):
        A, q1, pm1 = self.A, self.q1, self.p - 1.0

        def rhs(t, f, w):
            a = float(A(t))
            if w < 0:
                df = -(-w / a) ** q1
            else:
                df = (w / a) ** q1
            dw = -lam * a * (f ** pm1 if f >= 0 else -((-f) ** pm1))
            return df, dw

        return rhs

    def run(self, lam, t_end=None, *, stop_at_zero=False, dense=False):
        t_end = self.T if t_end is None else t_end
        f0, w0 = self.start(lam)
        self.n_solves += 1
        return _rk.integrate(self.rhs(lam), self.delta, f0, w0, t_end, rtol=ODE_RTOL,
                             atol_f=ODE_ATOL, h0=self.delta, stop_at_zero=stop_at_zero,
                             dense=dense)

    def sample(self, lam, traj, t):
        """f and w on points t, using the pole series below delta."""
        t = np.asarray(t, dtype=float)
        f = np.empty_like(t)
        w = np.empty_like(t)
        near = t < self.delta
        f[near], w[near] = self.series(lam, t[near])
        f[~near], w[~near] = traj(t[~near])
        return f, w


def _fprime(w, A, p):
    out = np.zeros_like(w)
    pos = A > 0
    out[pos] = np.sign(w[pos]) * (np.abs(w[pos]) / A[pos]) ** (1.0 / (p - 1.0))
    return out


def _initial_guess(p, T):
    # a fixed fraction of the unweighted interval value; the doubling search
    # takes it from there, so no problem starts its bracket on the answer
    return 0.6 * (p - 1.0) * (pi_p(p) / (2.0 * T)) ** p


def _certify(g, lam, tol, lo_sign=1.0):
    """Smallest verified bracket around lam: g changes sign across it."""
    width = tol * lam
    for _ in range(12):
        a, b = lam - 0.5 * width, lam + 0.5 * width
        ga, gb = g(a), g(b)
        if lo_sign * ga > 0 and lo_sign * gb < 0:
            return width
        width *= 4.0
    return math.nan


def _flux_residual(shooter, lam, traj, t_grid, f_of, w_grid, p):
    """max |w(t) + lam * int_0^t A phi_p(f)| relative to max |w| on the grid."""
    cells = len(t_grid) - 1
    nodes, weights = quadrature.gl_nodes(0.0, t_grid[-1], cells)
    vals = weights * shooter.A(nodes) * _phi_p(f_of(nodes), p)
    cum = np.concatenate([[0.0], np.cumsum(vals.reshape(cells, -1).sum(axis=1))])
    scale = max(np.max(np.abs(w_grid)), 1e-300)
    return float(np.max(np.abs(w_grid + lam * cum)) / scale)


def _sturm_monotone(visited) -> bool:
    """True when the interior zero counts seen during the solve never decrease in lam."""
    counts = [nz for _, nz in sorted(visited)]
    return all(b >= a for a, b in zip(counts, counts[1:]))


def solve_first_dirichlet(problem: RadialProblem, tol: float = DEFAULT_TOL,
                          grid_size: int = DEFAULT_GRID) -> EigenResult:
    """First Dirichlet eigenvalue (at T) with a natural condition at the pole.

    Bisection on lam keeps a bracket whose lower end has no zero in (0, T]
    and whose upper end has exactly one interior zero; the root of f(T; lam)
    inside it is then polished with Brent's method and re-certified by a sign
    change across a relative width ``tol``.
    """
    if problem.bc != "dirichlet":
        raise DomainError("solve_first_dirichlet needs a Dirichlet condition at T")
    if problem.left != "natural":
        raise DomainError("shooting starts from a natural (pole or Neumann) left end")
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol}")
    T, p = problem.T, problem.p
    shooter = _Shooter(problem.A, T, p, problem.pole_order)
    interior = T * (1.0 - 1e-13)
    visited = []

    def classify(lam):
        tr = shooter.run(lam)
        nz = sum(1 for z in tr.zeros if z < interior)
        visited.append((lam, nz))
        return nz, tr.f_end

    lo, hi = 0.0, _initial_guess(p, T)
    cap = hi * BRACKET_CAP
    nz_hi, _ = classify(hi)
    while nz_hi == 0:
        lo, hi = hi, 2.0 * hi
        if hi > cap:
            raise BracketError("no interior zero below the growth cap", lam_hi=hi, solves=shooter.n_solves)
        nz_hi, _ = classify(hi)
    while nz_hi > 1:
        mid = 0.5 * (lo + hi)
        nz, _ = classify(mid)
        if nz == 0:
            lo = mid
        else:
            hi, nz_hi = mid, nz
    if lo == 0.0:
        lo = hi
        while True:
            lo *= 0.5
            nz, _ = classify(lo)
            if nz == 0:
                break
            hi = lo

    def g(lam):
        nz, fT = classify(lam)
        return fT if nz == 0 or fT < 0 else -abs(fT) - 1.0

    g_lo, g_hi = g(lo), g(hi)
    if not (g_lo > 0 > g_hi):
        raise BracketError("shooting bracket lost its sign change", lo=lo, hi=hi, g_lo=g_lo, g_hi=g_hi)
    lam = optimize.brentq(g, lo, hi, xtol=0.25 * tol * lo, rtol=4 * np.finfo(float).eps, maxiter=200)
    width = _certify(g, lam, tol)
    if math.isnan(width):
        width = hi - lo
    if width > tol * lam * (1 + 1e-9):
        warnings.warn(f"eigenvalue bracket {width / lam:.2e} (relative) is wider than tol {tol:.1e}",
                      RuntimeWarning, stacklevel=2)

    traj = shooter.run(lam, dense=True)
    t = np.linspace(0.0, T, grid_size + 1)
    f, w = shooter.sample(lam, traj, t)
    f[0], w[0] = 1.0, 0.0
    A_grid = np.asarray(problem.A(t), dtype=float)
    fp = _fprime(w, A_grid, p)
    resid = _flux_residual(shooter, lam, traj, t, lambda x: shooter.sample(lam, traj, x)[0], w, p)
    zc = int(np.count_nonzero(np.diff(np.sign(f[:-1])) != 0))
    return EigenResult(lam, t, f, fp, w, zc, width, resid,
                       extra={"solves": shooter.n_solves, "delta": shooter.delta,
                              "sturm_monotone": _sturm_monotone(visited)})


def solve_first_dirichlet_model(model: ModelSpace, r: float, p: float, tol: float = DEFAULT_TOL,
                                grid_size: int = DEFAULT_GRID) -> EigenResult:
    """First Dirichlet eigenvalue of the geodesic ball B_K(r) in the model space."""
    return solve_first_dirichlet(model_ball_problem(model, r, p), tol, grid_size)


def solve_first_dirichlet_profile(profile: WarpedProfile, r: float, p: float, tol: float = DEFAULT_TOL,
                                  grid_size: int = DEFAULT_GRID) -> EigenResult:
    """First Dirichlet eigenvalue of the pole ball B(x0, r) of a warped profile."""
    return solve_first_dirichlet(profile_ball_problem(profile, r, p), tol, grid_size)


def solve_first_neumann_radial(profile: WarpedProfile, p: float, tol: float = DEFAULT_TOL,
                               grid_size: int = DEFAULT_GRID, check_nodal: bool = True) -> EigenResult:
    """First nontrivial Neumann eigenvalue within the radial class on a closed profile.

    Shoots from both poles; for each lam the first zeros z_L (from t = 0) and
    z_R (from t = D) are found, and the eigenvalue is the lam with
    z_L = z_R.  z_L decreases and z_R increases with lam, so the root is unique
    and the glued function has exactly one sign change.  The result bounds the
    true first Neumann eigenvalue from above when the latter is not radial.
    """
    if not profile.closed:
        raise ProfileError("the radial Neumann problem needs a closed profile")
    if not p > 1:
        raise DomainError(f"p must exceed 1, got {p}")
    D, n = profile.D, profile.n
    refl = profile.reflected()
    left = _Shooter(profile.area_density, D, p, n - 1)
    right = _Shooter(refl.area_density, D, p, n - 1)
    end = D - left.delta

    def zeros(lam):
        tl = left.run(lam, end, stop_at_zero=True)
        tr = right.run(lam, end, stop_at_zero=True)
        zl = tl.t_end if tl.stopped_at_zero else D
        zr = D - tr.t_end if tr.stopped_at_zero else 0.0
        return zl, zr

    def h(lam):
        zl, zr = zeros(lam)
        return zl - zr

    lam0 = _initial_guess(p, 0.5 * D) * 2.0
    lo = hi = lam0
    if h(lam0) > 0:
        while True:
            hi *= 2.0
            if hi > lam0 * BRACKET_CAP:
                raise BracketError("no nodal crossing below the growth cap", lam_hi=hi)
            if h(hi) < 0:
                break
            lo = hi
    else:
        while True:
            lo *= 0.5
            if lo < lam0 / BRACKET_CAP:
                raise BracketError("no lower bracket for the Neumann eigenvalue", lam_lo=lo)
            if h(lo) > 0:
                break
            hi = lo
    lam = optimize.brentq(h, lo, hi, xtol=0.25 * tol * lo, rtol=4 * np.finfo(float).eps, maxiter=200)
    width = _certify(h, lam, tol)
    if math.isnan(width):
        width = hi - lo
    if width > tol * lam * (1 + 1e-9):
        warnings.warn(f"Neumann bracket {width / lam:.2e} (relative) is wider than tol {tol:.1e}",
                      RuntimeWarning, stacklevel=2)

    tl = left.run(lam, end, stop_at_zero=True, dense=True)
    tr = right.run(lam, end, stop_at_zero=True, dense=True)
    if not (tl.stopped_at_zero and tr.stopped_at_zero):
        raise SolverError("eigenfunction lost its nodal point", lam=lam)
    t_star = 0.5 * (tl.t_end + D - tr.t_end)
    # match fluxes at the nodal point: f = -c g(D - t) on the far side
    c = (tl.w_end / tr.w_end) ** (1.0 / (p - 1.0))

    def evaluate(x):
        x = np.asarray(x, dtype=float)
        f = np.empty_like(x)
        w = np.empty_like(x)
        lmask = x <= t_star
        f[lmask], w[lmask] = left.sample(lam, tl, np.minimum(x[lmask], tl.t_end))
        s = np.minimum(D - x[~lmask], tr.t_end)
        g, wg = right.sample(lam, tr, s)
        f[~lmask], w[~lmask] = -c * g, c ** (p - 1.0) * wg
        return f, w

    t = np.linspace(0.0, D, grid_size + 1)
    f, w = evaluate(t)
    f[0], w[0] = 1.0, 0.0
    f[-1], w[-1] = -c, 0.0
    A_grid = profile.area_density(t)
    fp = _fprime(w, A_grid, p)
    resid = _flux_residual(left, lam, tl, t, lambda x: evaluate(x)[0], w, p)
    nodes, weights = quadrature.gl_nodes(0.0, D, grid_size)
    fn = evaluate(nodes)[0]
    dens = weights * profile.area_density(nodes)
    ortho = float(np.dot(dens, _phi_p(fn, p)) / np.dot(dens, np.abs(fn) ** (p - 1)))
    zc = int(np.count_nonzero(np.diff(np.sign(f)) != 0))
    extra = {"solves": left.n_solves + right.n_solves, "orthogonality": ortho,
             "nodal_mismatch": abs(tl.t_end - (D - tr.t_end)), "far_pole_value": -c}
    if zc != 1:
        warnings.warn(f"radial Neumann eigenfunction has {zc} sign changes, expected 1",
                      RuntimeWarning, stacklevel=2)
    result = EigenResult(lam, t, f, fp, w, zc, width, resid, nodal_radius=t_star, extra=extra)
    if check_nodal:
        result.extra.update(nodal_identity(profile, p, t_star, lam, tol))
    return result


def nodal_identity(profile: WarpedProfile, p: float, t_star: float, mu: float,
                   tol: float = DEFAULT_TOL) -> dict:
    """Dirichlet eigenvalues of the two nodal pole balls [0, t*) and (t*, D]."""
    lam_plus = solve_first_dirichlet_profile(profile, t_star, p, tol, grid_size=256).lam
    lam_minus = solve_first_dirichlet_profile(profile.reflected(), profile.D - t_star, p, tol,
                                              grid_size=256).lam
    dev = max(abs(lam_plus - mu), abs(lam_minus - mu)) / mu
    return {"lambda_plus": lam_plus, "lambda_minus": lam_minus, "nodal_deviation": dev,
            "nodal_ok": dev <= 10 * tol}


# ------------------------------------------------------ variational side

def _grid(problem: RadialProblem, n_pts: int):
    t = np.linspace(0.0, problem.T, n_pts)
    h = t[1] - t[0]
    A_node = np.asarray(problem.A(t), dtype=float)
    A_mid = np.asarray(problem.A(t[:-1] + 0.5 * h), dtype=float)
    trap = np.full(n_pts, h)
    trap[[0, -1]] *= 0.5
    return t, h, A_mid, trap * A_node


def _bc_mask(problem: RadialProblem, n_pts: int):
    free = np.ones(n_pts, dtype=bool)
    if problem.bc == "dirichlet":
        free[-1] = False
    if problem.left == "dirichlet":
        free[0] = False
    return free


def p_rayleigh_quotient(f, problem: RadialProblem, fprime=None) -> float:
    """Discrete p-Rayleigh quotient of samples f on a uniform grid of [0, T].

    Without ``fprime`` the gradient term uses forward differences with the
    density at cell midpoints and the mass term the trapezoid rule; with
    ``fprime`` both integrals use Simpson's rule on the samples.
    """
    from scipy.integrate import simpson

    f = np.asarray(f, dtype=float)
    p = problem.p
    scale = np.max(np.abs(f)) if f.size else 0.0
    if scale == 0.0:
        raise DomainError("Rayleigh quotient of the zero function")
    if problem.bc == "dirichlet" and abs(f[-1]) > 1e-8 * scale:
        raise DomainError(f"f(T) = {f[-1]!r} violates the Dirichlet condition")
    if problem.left == "dirichlet" and abs(f[0]) > 1e-8 * scale:
        raise DomainError(f"f(0) = {f[0]!r} violates the Dirichlet condition")
    g = f / scale
    t, h, A_mid, wA = _grid(problem, f.size)
    if fprime is None:
        num = np.sum(A_mid * np.abs(np.diff(g) / h) ** p) * h
        den = np.dot(wA, np.abs(g) ** p)
    else:
        A_node = np.asarray(problem.A(t), dtype=float)
        gp = np.asarray(fprime, dtype=float) / scale
        num = simpson(A_node * np.abs(gp) ** p, x=t)
        den = simpson(A_node * np.abs(g) ** p, x=t)
    if den <= 0:
        raise DomainError("Rayleigh quotient denominator vanishes")
    return float(num / den)


def _neumann_shift(u, wA, p):
    """Constant c with sum wA phi_p(u - c) = 0 (the orthogonality constraint)."""
    def k(c):
        return float(np.dot(wA, _phi_p(u - c, p)))
    lo, hi = float(u.min()), float(u.max())
    if lo == hi:
        return lo
    return optimize.brentq(k, lo, hi, xtol=1e-15 * max(abs(lo), abs(hi)), rtol=4 * np.finfo(float).eps)


def rayleigh_minimize_grid(problem: RadialProblem, grid_size: int, max_iter: int = 20000,
                           rel_tol: float = 1e-10):
    """Minimise the discrete Rayleigh quotient over grid functions.

    Preconditioned gradient descent with Armijo backtracking; the
    preconditioner is the tridiagonal second variation of the quotient's
    numerator plus a mass term, refrozen at every iterate.  Boundary nodes
    are held at zero; for a Neumann condition the iterate is shifted back onto
    the orthogonality constraint after each step.  Returns ``(lam, f)`` with
    f sampled on ``linspace(0, T, grid_size + 1)`` and max |f| = 1.
    """
    if grid_size < 64:
        raise DomainError(f"grid_size must be at least 64, got {grid_size}")
    p = problem.p
    n_pts = grid_size + 1
    t, h, A_mid, wA = _grid(problem, n_pts)
    free = _bc_mask(problem, n_pts)
    neumann = problem.bc == "neumann"
    T = problem.T
    if neumann:
        u = np.cos(math.pi * t / T)
    elif problem.left == "dirichlet":
        u = np.sin(math.pi * t / T)
    else:
        u = np.cos(0.5 * math.pi * t / T)
    u[~free] = 0.0

    def quotient(u):
        du = np.diff(u) / h
        num = np.sum(A_mid * np.abs(du) ** p) * h
        den = np.dot(wA, np.abs(u) ** p)
        return num / den, du, num, den

    def project(u):
        if neumann:
            u = u - _neumann_shift(u, wA, p)
        u = u / np.max(np.abs(u))
        u[~free] = 0.0
        return u

    u = project(u)
    R, du, num, den = quotient(u)
    step = 1.0
    calm = 0
    for it in range(1, max_iter + 1):
        s = A_mid * _phi_p(du, p)
        grad_num = np.zeros(n_pts)
        grad_num[:-1] -= p * s
        grad_num[1:] += p * s
        grad_den = p * wA * _phi_p(u, p)
        grad = (grad_num - R * grad_den) / den
        eps_d = 1e-8 * max(np.max(np.abs(du)), 1e-300)
        eps_u = 1e-8
        c = p * (p - 1.0) * A_mid * (du * du + eps_d ** 2) ** (0.5 * (p - 2.0)) / h
        m = p * (p - 1.0) * wA * (u * u + eps_u ** 2) ** (0.5 * (p - 2.0))
        diag = m * R
        diag[:-1] += c
        diag[1:] += c
        off = -c
        idx = np.flatnonzero(free)
        d_f = diag[idx] / den
        o_f = (off / den)[idx[:-1]] if idx.size > 1 else np.zeros(0)
        if idx.size > 1:
            # free indices are contiguous, so the restricted matrix stays tridiagonal
            ab = np.vstack([np.concatenate([[0.0], o_f]), d_f])
            direction_f = -linalg.solveh_banded(ab, grad[idx])
        else:
            direction_f = -grad[idx] / d_f
        direction = np.zeros(n_pts)
        direction[idx] = direction_f
        slope = float(np.dot(grad, direction))
        if slope >= 0:
            direction, slope = -grad, -float(np.dot(grad, grad))
        step = min(1.0, 2.0 * step)
        while True:
            trial = project(u + step * direction)
            R_new, du_new, num_new, den_new = quotient(trial)
            if R_new <= R + 1e-4 * step * slope or step < 1e-12:
                break
            step *= 0.5
        change = abs(R - R_new) / R
        u, R, du, num, den = trial, R_new, du_new, num_new, den_new
        calm = calm + 1 if change < rel_tol else 0
        if calm >= 3:
            return float(R), u
    raise ConvergenceError("grid Rayleigh minimisation hit its iteration cap", last_quotient=float(R),
                           iterations=max_iter)
