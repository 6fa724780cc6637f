"""Closed-form geometry of the constant-curvature model space M^n_K.

All radial quantities are functions of the geodesic distance ``t`` from a
base point.  The warping function ``sn_k`` solves ``u'' + K u = 0`` with
``u(0) = 0``, ``u'(0) = 1``; everything else is built from it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DomainError

# below this value of |K| t^2 the trigonometric forms lose digits to cancellation
_SERIES_CUTOFF = 1e-6
_EDGE_RTOL = 1e-12


def unit_sphere_area(n: int) -> float:
    """Area of the unit (n-1)-sphere, 2 pi^(n/2) / Gamma(n/2)."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


@dataclass(frozen=True)
class ModelSpace:
    n: int
    K: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"dimension must be an integer >= 2, got {self.n}")
        if not math.isfinite(self.K):
            raise DomainError(f"curvature must be finite, got {self.K}")

    @property
    def diameter(self) -> float:
        return math.pi / math.sqrt(self.K) if self.K > 0 else math.inf

    @property
    def C_n(self) -> float:
        return unit_sphere_area(self.n)

    @property
    def volume(self) -> float:
        """Total volume; finite only for K > 0."""
        if self.K <= 0:
            return math.inf
        return unit_sphere_area(self.n + 1) * self.K ** (-self.n / 2.0)


def _check_radius(K, t, *, allow_zero=True, allow_diameter=True):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or (not allow_zero and np.any(t == 0)):
        raise DomainError(f"radius must be {'>= 0' if allow_zero else '> 0'}, got {t}")
    if K > 0:
        diam = math.pi / math.sqrt(K)
        edge = diam * (1 + _EDGE_RTOL)
        if np.any(t > edge) or (not allow_diameter and np.any(t >= diam * (1 - _EDGE_RTOL))):
            raise DomainError(f"radius {t} outside the model diameter {diam}")
    return t


def _series_mask(K, t):
    return np.abs(K) * t * t < _SERIES_CUTOFF


def _sn(K, t):
    small = _series_mask(K, t)
    Kt2 = K * t * t
    series = t * (1.0 - Kt2 / 6.0 + Kt2 * Kt2 / 120.0)
    if K > 0:
        s = math.sqrt(K)
        exact = np.sin(s * t) / s
    elif K < 0:
        s = math.sqrt(-K)
        exact = np.sinh(s * t) / s
    else:
        exact = t
    return np.where(small, series, exact)


def _cn(K, t):
    small = _series_mask(K, t)
    Kt2 = K * t * t
    series = 1.0 - Kt2 / 2.0 + Kt2 * Kt2 / 24.0
    if K > 0:
        exact = np.cos(math.sqrt(K) * t)
    elif K < 0:
        exact = np.cosh(math.sqrt(-K) * t)
    else:
        exact = np.ones_like(t)
    return np.where(small, series, exact)


def _scalar_or_array(x, like):
    return float(x) if np.ndim(like) == 0 else x


def sn_k(K: float, t):
    """Warping function of M_K: sin(sqrt(K) t)/sqrt(K), t, or sinh(sqrt(-K) t)/sqrt(-K)."""
    t = _check_radius(K, t)
    return _scalar_or_array(_sn(K, t), t)


def cn_k(K: float, t):
    """Derivative of :func:`sn_k` in t."""
    t = _check_radius(K, t)
    return _scalar_or_array(_cn(K, t), t)


def model_laplacian_of_r(model: ModelSpace, t):
    """Laplacian of the distance function in M_K, (n-1) sn'/sn."""
    t = _check_radius(model.K, t, allow_zero=False, allow_diameter=False)
    val = (model.n - 1) * _cn(model.K, t) / _sn(model.K, t)
    return _scalar_or_array(val, t)


def mean_curvature_geodesic_sphere(model: ModelSpace, r):
    """Mean curvature of the geodesic sphere of radius r (same formula as the Laplacian of r)."""
    return model_laplacian_of_r(model, r)


def model_area_density(model: ModelSpace, t):
    """C_n sn_K(t)^(n-1); no domain check, for use inside integrands."""
    t = np.asarray(t, dtype=float)
    return model.C_n * _sn(model.K, t) ** (model.n - 1)


def model_sphere_area(model: ModelSpace, r):
    """Area of the geodesic sphere of radius r."""
    r = _check_radius(model.K, r, allow_zero=False)
    val = model.C_n * np.abs(_sn(model.K, r)) ** (model.n - 1)
    return _scalar_or_array(val, r)


def _ball_volume_scalar(model: ModelSpace, r: float) -> float:
    K, m = model.K, model.n - 1
    if K > 0:
        s = math.sqrt(K)
        r = min(r, math.pi / s)
    val, _ = integrate.quad(
        lambda x: float(_sn(K, np.float64(x))) ** m, 0.0, r,
        epsabs=1e-13, epsrel=1e-13, limit=200,
    )
    return model.C_n * val


def model_ball_volume(model: ModelSpace, r):
    """Volume of the geodesic ball B_K(r) by adaptive quadrature of the area density."""
    r = _check_radius(model.K, r, allow_zero=False)
    if r.ndim == 0:
        return _ball_volume_scalar(model, float(r))
    return np.array([_ball_volume_scalar(model, float(x)) for x in r.ravel()]).reshape(r.shape)


def volume_fraction(model: ModelSpace, r: float) -> float:
    """vol B_K(r) / vol(M_K); K > 0 only."""
    if model.K <= 0:
        raise DomainError("volume fractions need a compact model (K > 0)")
    return model_ball_volume(model, r) / model.volume
