"""Adaptive Dormand-Prince 5(4) integrator for two-component systems.

Written for the shooting solver: the state is a pair of Python floats, the
right-hand side is called with scalars, and sign changes of the first
component are located and polished to full step accuracy.  Keeping the state
scalar avoids the per-step array overhead of general-purpose solvers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import StiffnessError

_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0)
_A2 = (1 / 5,)
_A3 = (3 / 40, 9 / 40)
_A4 = (44 / 45, -56 / 15, 32 / 9)
_A5 = (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729)
_A6 = (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656)
_B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84)
_E = (-71 / 57600, 0.0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40)
# quartic continuous extension (Shampine)
_P = np.array([
    [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0, 0, 0, 0],
    [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])


def _step(rhs, t, f, w, k1f, k1w, h):
    """One Dormand-Prince step; returns new state, stage derivatives and error estimate."""
    c, a2, a3, a4, a5, a6 = _C, _A2, _A3, _A4, _A5, _A6
    k2f, k2w = rhs(t + c[1] * h, f + h * a2[0] * k1f, w + h * a2[0] * k1w)
    k3f, k3w = rhs(t + c[2] * h,
                   f + h * (a3[0] * k1f + a3[1] * k2f),
                   w + h * (a3[0] * k1w + a3[1] * k2w))
    k4f, k4w = rhs(t + c[3] * h,
                   f + h * (a4[0] * k1f + a4[1] * k2f + a4[2] * k3f),
                   w + h * (a4[0] * k1w + a4[1] * k2w + a4[2] * k3w))
    k5f, k5w = rhs(t + c[4] * h,
                   f + h * (a5[0] * k1f + a5[1] * k2f + a5[2] * k3f + a5[3] * k4f),
                   w + h * (a5[0] * k1w + a5[1] * k2w + a5[2] * k3w + a5[3] * k4w))
    k6f, k6w = rhs(t + h,
                   f + h * (a6[0] * k1f + a6[1] * k2f + a6[2] * k3f + a6[3] * k4f + a6[4] * k5f),
                   w + h * (a6[0] * k1w + a6[1] * k2w + a6[2] * k3w + a6[3] * k4w + a6[4] * k5w))
    b = _B
    fn = f + h * (b[0] * k1f + b[2] * k3f + b[3] * k4f + b[4] * k5f + b[5] * k6f)
    wn = w + h * (b[0] * k1w + b[2] * k3w + b[3] * k4w + b[4] * k5w + b[5] * k6w)
    k7f, k7w = rhs(t + h, fn, wn)
    e = _E
    ef = h * (e[0] * k1f + e[2] * k3f + e[3] * k4f + e[4] * k5f + e[5] * k6f + e[6] * k7f)
    ew = h * (e[0] * k1w + e[2] * k3w + e[3] * k4w + e[4] * k5w + e[5] * k6w + e[6] * k7w)
    ks = ((k1f, k1w), (k2f, k2w), (k3f, k3w), (k4f, k4w), (k5f, k5w), (k6f, k6w), (k7f, k7w))
    return fn, wn, ks, ef, ew


@dataclass
class Trajectory:
    """Result of one integration.  Dense output is available when requested."""

    t_end: float
    f_end: float
    w_end: float
    zeros: list = field(default_factory=list)
    stopped_at_zero: bool = False
    n_steps: int = 0
    _t0: np.ndarray | None = None
    _h: np.ndarray | None = None
    _y0: np.ndarray | None = None
    _Q: np.ndarray | None = None

    def __call__(self, t):
        """Evaluate (f, w) at points inside the integrated range."""
        if self._t0 is None:
            raise ValueError("trajectory was integrated without dense output")
        t = np.asarray(t, dtype=float)
        idx = np.clip(np.searchsorted(self._t0, t, side="right") - 1, 0, len(self._t0) - 1)
        x = (t - self._t0[idx]) / self._h[idx]
        powers = np.stack([x, x * x, x ** 3, x ** 4], axis=-1)
        incr = np.einsum("...cj,...j->...c", self._Q[idx], powers)
        y = self._y0[idx] + self._h[idx][..., None] * incr
        return y[..., 0], y[..., 1]


def _dense_poly(ks):
    K = np.array(ks)  # (7, 2)
    return K.T @ _P  # (2, 4)


def _locate_zero(rhs, t, f, w, k1f, k1w, h, ks):
    """Root of the first component inside (t, t+h], polished by Newton on exact steps."""
    q = _dense_poly(ks)[0]

    def interp(x):
        return f + h * (q[0] * x + q[1] * x * x + q[2] * x ** 3 + q[3] * x ** 4)

    lo, hi = 0.0, 1.0
    flo = f
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        fm = interp(mid)
        if (fm > 0) == (flo > 0) and fm != 0.0:
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo < 1e-14:
            break
    s = 0.5 * (lo + hi) * h
    best = None
    for _ in range(4):
        if s <= 0.0 or s > h * (1 + 1e-12):
            break
        fs, ws, ks_s, _, _ = _step(rhs, t, f, w, k1f, k1w, s)
        dfs = ks_s[6][0]
        best = (t + s, fs, ws)
        if dfs == 0.0 or not math.isfinite(dfs):
            break
        ds = fs / dfs
        s -= ds
        if abs(ds) <= 1e-15 * max(abs(t) + s, 1.0):
            fs, ws, ks_s, _, _ = _step(rhs, t, f, w, k1f, k1w, s)
            best = (t + s, fs, ws)
            break
    if best is None:
        x = 0.5 * (lo + hi)
        fs, ws, _, _, _ = _step(rhs, t, f, w, k1f, k1w, x * h)
        best = (t + x * h, fs, ws)
    return best


def integrate(rhs, t0, f0, w0, t_end, *, rtol=1e-10, atol_f=1e-12, atol_w=1e-30,
              h0=None, stop_at_zero=False, dense=False, max_steps=200000):
    """Integrate ``(f, w)' = rhs(t, f, w)`` from ``t0`` to ``t_end``.

    Sign changes of ``f`` are recorded in ``zeros``; with ``stop_at_zero`` the
    integration ends at the first one.  Raises :class:`StiffnessError` when the
    step size collapses.
    """
    t, f, w = float(t0), float(f0), float(w0)
    span = t_end - t0
    h = h0 if h0 is not None else max(abs(span) * 1e-6, 1e-14)
    k1f, k1w = rhs(t, f, w)
    zeros = []
    dense_t, dense_h, dense_y, dense_q = [], [], [], []
    n_steps = 0
    min_h = 1e-15 * max(abs(t_end), abs(t0), 1.0)
    while t < t_end:
        if n_steps >= max_steps:
            raise StiffnessError("step budget exhausted", t=t, f=f, w=w, h=h, steps=n_steps)
        last = t + h >= t_end
        if last:
            h = t_end - t
        fn, wn, ks, ef, ew = _step(rhs, t, f, w, k1f, k1w, h)
        sf = atol_f + rtol * max(abs(f), abs(fn))
        sw = atol_w + rtol * max(abs(w), abs(wn))
        err = math.sqrt(0.5 * ((ef / sf) ** 2 + (ew / sw) ** 2))
        if not math.isfinite(err):
            h *= 0.25
            if h < min_h:
                raise StiffnessError("non-finite derivative with collapsed step", t=t, f=f, w=w, h=h)
            continue
        if err > 1.0:
            h *= max(0.2, 0.9 * err ** -0.2)
            if h < min_h:
                raise StiffnessError("step size underflow", t=t, f=f, w=w, h=h, err=err)
            continue
        n_steps += 1
        crossed = (f > 0 and fn <= 0) or (f < 0 and fn >= 0)
        if crossed and not (last and fn == 0.0):
            tz, fz, wz = _locate_zero(rhs, t, f, w, k1f, k1w, h, ks)
            zeros.append(tz)
            if stop_at_zero:
                if dense:
                    dense_t.append(t); dense_h.append(h); dense_y.append((f, w))
                    dense_q.append(_dense_poly(ks))
                traj = Trajectory(tz, fz, wz, zeros, True, n_steps)
                return _attach(traj, dense, dense_t, dense_h, dense_y, dense_q)
        if dense:
            dense_t.append(t); dense_h.append(h); dense_y.append((f, w))
            dense_q.append(_dense_poly(ks))
        t = t_end if last else t + h
        f, w = fn, wn
        k1f, k1w = ks[6]
        factor = 10.0 if err == 0.0 else min(10.0, max(0.2, 0.9 * err ** -0.2))
        h *= factor
    traj = Trajectory(t, f, w, zeros, False, n_steps)
    return _attach(traj, dense, dense_t, dense_h, dense_y, dense_q)


def _attach(traj, dense, dense_t, dense_h, dense_y, dense_q):
    if dense and dense_t:
        traj._t0 = np.array(dense_t)
        traj._h = np.array(dense_h)
        traj._y0 = np.array(dense_y)
        traj._Q = np.array(dense_q)
    return traj
