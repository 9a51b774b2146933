"""Spherical-wave propagation and the pair-product chirp along an array.

For a true source ``x_s`` and a tentative source ``x_t`` the pair product

    g(tau) = z(x(tau); x_s) * conj(z(x(tau); x_t)) * |x'(tau)|

has modulus ``alpha(tau) = |x'| / (r_s r_t)`` and phase ``-phi(tau)`` with
``phi = k (r_s - r_t)``, where ``r_s``, ``r_t`` are the distances from the
curve point to each source.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import ArrayCurve, PointLike, as_position

TWO_PI = 2.0 * math.pi
SINGULAR_DISTANCE = 1e-9


class SingularityError(ValueError):
    """A source sits on (or within 1e-9 wavelengths of) an antenna point."""


@dataclass(frozen=True)
class Wavenumber:
    k_s: float = TWO_PI

    def __post_init__(self):
        if not (self.k_s > 0 and math.isfinite(self.k_s)):
            raise ValueError(f"wave number must be finite and > 0, got {self.k_s}")

    @classmethod
    def from_wavelength(cls, wavelength: float) -> "Wavenumber":
        if not wavelength > 0:
            raise ValueError("wavelength must be > 0")
        return cls(TWO_PI / wavelength)

    @property
    def wavelength(self) -> float:
        return TWO_PI / self.k_s

    def __float__(self):
        return self.k_s


def _k(k) -> float:
    return float(k.k_s if isinstance(k, Wavenumber) else k)


def _distances(points: np.ndarray, source: PointLike) -> np.ndarray:
    s = as_position(source)
    d = np.hypot(points[..., 0] - s.x, points[..., 1] - s.y)
    if np.any(d < SINGULAR_DISTANCE):
        raise SingularityError(f"source ({s.x}, {s.y}) lies on the array")
    return d


def propagation_coeff(x: PointLike, x_s: PointLike, k=TWO_PI) -> complex:
    """``exp(-j k |x - x_s|) / |x - x_s|``."""
    p = as_position(x)
    r = float(_distances(np.array([p.x, p.y]), x_s))
    return complex(np.exp(-1j * _k(k) * r) / r)


def _geometry(curve: ArrayCurve, tau, x_s, x_t):
    t = curve._check(tau)
    pts = curve._points(t)
    return t, pts, _distances(pts, x_s), _distances(pts, x_t)


def local_phase(curve: ArrayCurve, tau, x_s: PointLike, x_t: PointLike, k=TWO_PI):
    """``phi(tau) = k (|x(tau) - x_s| - |x(tau) - x_t|)``."""
    _, _, r_s, r_t = _geometry(curve, tau, x_s, x_t)
    return _k(k) * (r_s - r_t)


def local_amplitude(curve: ArrayCurve, tau, x_s: PointLike, x_t: PointLike):
    t, _, r_s, r_t = _geometry(curve, tau, x_s, x_t)
    return curve._speeds(t) / (r_s * r_t)


def pair_product(curve: ArrayCurve, tau, x_s: PointLike, x_t: PointLike, k=TWO_PI):
    """Matched-filter integrand ``z(x; x_s) z*(x; x_t) |x'|`` along the curve.

    ``tau`` may be a scalar or an array; the result has the same shape.
    """
    t, _, r_s, r_t = _geometry(curve, tau, x_s, x_t)
    kk = _k(k)
    # one exponential of the range difference keeps the phase exact for
    # x_t == x_s (conj(z) z is then real to the last bit)
    return curve._speeds(t) / (r_s * r_t) * np.exp(-1j * kk * (r_s - r_t))


def local_wavenumber(curve: ArrayCurve, tau, x_s: PointLike, x_t: PointLike, k=TWO_PI):
    """Analytic ``d phi / d tau``.

    ``k (<x - x_s, x'> / |x - x_s| - <x - x_t, x'> / |x - x_t|)``
    """
    t, pts, r_s, r_t = _geometry(curve, tau, x_s, x_t)
    tan = curve._tangents(t)
    s, q = as_position(x_s), as_position(x_t)
    proj_s = (pts[..., 0] - s.x) * tan[..., 0] + (pts[..., 1] - s.y) * tan[..., 1]
    proj_t = (pts[..., 0] - q.x) * tan[..., 0] + (pts[..., 1] - q.y) * tan[..., 1]
    return _k(k) * (proj_s / r_s - proj_t / r_t)


@dataclass(frozen=True)
class ChirpSample:
    tau: float
    amplitude: float
    phase: float
    local_wavenumber: float

    @property
    def value(self) -> complex:
        return self.amplitude * complex(math.cos(self.phase), -math.sin(self.phase))


def chirp_sample(curve: ArrayCurve, tau: float, x_s: PointLike, x_t: PointLike, k=TWO_PI) -> ChirpSample:
    return ChirpSample(
        tau=float(tau),
        amplitude=float(local_amplitude(curve, tau, x_s, x_t)),
        phase=float(local_phase(curve, tau, x_s, x_t, k)),
        local_wavenumber=float(local_wavenumber(curve, tau, x_s, x_t, k)),
    )
