"""Radial test functions with derivatives up to third order."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.interpolate import CubicHermiteSpline, CubicSpline

from .errors import DomainError


@dataclass(frozen=True)
class RadialFunction:
    """f(t) of the distance to the pole, with its t-derivatives."""

    f: Callable
    df: Callable
    d2f: Callable | None = None
    d3f: Callable | None = None
    name: str = "f"

    def __call__(self, t):
        return self.f(t)

    @classmethod
    def from_samples(cls, t, values, fprime=None, name="samples") -> "RadialFunction":
        """Spline interpolant of samples; Hermite when derivative samples are supplied."""
        t = np.asarray(t, dtype=float)
        values = np.asarray(values, dtype=float)
        if t.shape != values.shape or t.ndim != 1 or t.size < 4:
            raise DomainError("need matching 1-D arrays of at least 4 samples")
        if fprime is None:
            spl = CubicSpline(t, values)
        else:
            spl = CubicHermiteSpline(t, values, np.asarray(fprime, dtype=float))
        d1, d2, d3 = spl.derivative(1), spl.derivative(2), spl.derivative(3)
        return cls(spl, d1, d2, d3, name)


def _const(c):
    return lambda t: np.full_like(np.asarray(t, dtype=float), c)


def cosine(c: float = 1.0) -> RadialFunction:
    """cos(c t); nonincreasing on [0, pi/c]."""
    return RadialFunction(
        lambda t: np.cos(c * np.asarray(t, dtype=float)),
        lambda t: -c * np.sin(c * np.asarray(t, dtype=float)),
        lambda t: -c * c * np.cos(c * np.asarray(t, dtype=float)),
        lambda t: c ** 3 * np.sin(c * np.asarray(t, dtype=float)),
        f"cos({c!r}t)",
    )


def polynomial(coeffs) -> RadialFunction:
    """sum_k coeffs[k] t^k."""
    P = np.polynomial.Polynomial(coeffs)
    d1, d2, d3 = P.deriv(1), P.deriv(2), P.deriv(3)
    return RadialFunction(P, d1, d2, d3, "poly" + ",".join(repr(float(c)) for c in coeffs))


def gaussian(b: float = 1.0) -> RadialFunction:
    """exp(-b t^2)."""
    def f(t):
        t = np.asarray(t, dtype=float)
        return np.exp(-b * t * t)

    def df(t):
        t = np.asarray(t, dtype=float)
        return -2 * b * t * np.exp(-b * t * t)

    def d2f(t):
        t = np.asarray(t, dtype=float)
        return (4 * b * b * t * t - 2 * b) * np.exp(-b * t * t)

    def d3f(t):
        t = np.asarray(t, dtype=float)
        return (12 * b * b * t - 8 * b ** 3 * t ** 3) * np.exp(-b * t * t)

    return RadialFunction(f, df, d2f, d3f, f"exp(-{b!r}t^2)")


def lorentzian(b: float = 1.0) -> RadialFunction:
    """1 / (1 + b t^2)."""
    def u(t):
        t = np.asarray(t, dtype=float)
        return 1.0 + b * t * t

    def f(t):
        return 1.0 / u(t)

    def df(t):
        t = np.asarray(t, dtype=float)
        return -2 * b * t / u(t) ** 2

    def d2f(t):
        t = np.asarray(t, dtype=float)
        return (6 * b * b * t * t - 2 * b) / u(t) ** 3

    def d3f(t):
        t = np.asarray(t, dtype=float)
        return 24 * b * b * t * (1 - b * t * t) / u(t) ** 4

    return RadialFunction(f, df, d2f, d3f, f"1/(1+{b!r}t^2)")


def builtin_test_functions(D: float) -> list[RadialFunction]:
    """A fixed family of smooth functions with f' < 0 on (0, D)."""
    return [
        cosine(min(1.0, 0.999 * np.pi / D)),
        polynomial([1.0, 0.0, -1.0]),
        gaussian(0.5),
        lorentzian(2.0),
    ]
