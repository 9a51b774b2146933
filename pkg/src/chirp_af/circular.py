r"""Closed forms for a circular array of radius ``r_ca`` spanning ``[-psi, psi]``.

When every source of interest is far inside the circle, the pair-product
phase reduces to a cosine of the array angle,

.. math:: \phi(\tau) \simeq -k R \cos(\tau - \theta), \qquad
          \dot\phi(\tau) = k R \sin(\tau - \theta),

with ``(R, theta)`` the polar form of ``x_s - x_t``. The band limit is then
``k R Omega(theta)`` where ``Omega`` is the visual aperture, and the
Jacobi-Anger expansion gives Bessel series for the ambiguity function.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .geometry import PointLike, as_position, normalize_angle
from .specfun import bessel_jn_orders, turning_point_order
from .spectrum import BandLimit
from .wavefield import TWO_PI

DEFAULT_ETA = 10.0


class ApproximationDomainError(ValueError):
    """A source is too close to the circle for the far-source approximation."""


class TruncationWarning(UserWarning):
    pass


@dataclass(frozen=True)
class CircularScenario:
    r_ca: float
    psi: float
    k_s: float = TWO_PI
    n: int | None = None
    eta: float = DEFAULT_ETA

    def __post_init__(self):
        if not self.r_ca > 0:
            raise ValueError("r_ca must be > 0")
        if not 0 < self.psi <= math.pi:
            raise ValueError("psi must lie in (0, pi]")
        if self.eta < 10:
            raise ValueError("eta must be >= 10")

    @property
    def step(self) -> float:
        if self.n is None:
            raise ValueError("antenna count not set")
        return 2.0 * self.psi / self.n

    def check_far_source(self, *points: PointLike) -> None:
        limit = self.r_ca / self.eta
        for p in points:
            r = as_position(p).radius
            if r > limit:
                raise ApproximationDomainError(
                    f"|x| = {r:.6g} exceeds r_ca / eta = {limit:.6g}"
                )


def phase_approx_ca(tau, R, theta, k=TWO_PI, guard: CircularScenario | None = None, sources=()):
    """Cosine approximation of the pair-product phase, ``-k R cos(tau - theta)``.

    With ``guard`` set, ``sources`` are checked against its far-source limit.
    """
    if guard is not None:
        guard.check_far_source(*sources)
    return -k * R * np.cos(np.asarray(tau, dtype=float) - theta)


def local_wavenumber_ca(tau, R, theta, k=TWO_PI):
    return k * R * np.sin(np.asarray(tau, dtype=float) - theta)


def visual_aperture(theta: float, psi: float) -> float:
    """``max |sin(tau - theta)|`` over ``tau`` in ``[-psi, psi]``."""
    if psi >= math.pi / 2:
        return 1.0
    for c in (theta + math.pi / 2, theta - math.pi / 2):
        if abs(normalize_angle(c)) <= psi + 1e-15:
            return 1.0
    return max(abs(math.sin(psi - theta)), abs(math.sin(-psi - theta)))


def band_limit_ca(R: float, theta: float, psi: float, k=TWO_PI) -> BandLimit:
    return BandLimit(k * R * visual_aperture(theta, psi), "ca")


def alias_radius(delta: float, theta: float, psi: float, wavelength: float = 1.0) -> float:
    """Separation past which the sampled array aliases: ``lambda / (delta Omega)``."""
    if not delta > 0:
        raise ValueError("delta must be > 0")
    omega = visual_aperture(theta, psi)
    if omega == 0.0:
        return math.inf
    return wavelength / (delta * omega)


def alias_fronts(delta, theta, psi, wavelength=1.0, r_window=math.inf) -> list[float]:
    """Every multiple ``m * R_max`` (m >= 1) that lies within ``r_window``."""
    r_max = alias_radius(delta, theta, psi, wavelength)
    if not math.isfinite(r_max):
        return []
    out, m = [], 1
    while m * r_max <= r_window and m <= 10_000:
        out.append(m * r_max)
        m += 1
    return out


def _check_truncation(x: float, n_max: int) -> None:
    need = turning_point_order(x)
    if n_max < need:
        tail = bessel_jn_orders(n_max + 1, x)[-1] if x <= 5000 else float("nan")
        warnings.warn(
            f"series truncated at n={n_max} below the turning-point order {need}; "
            f"next term |J_{n_max + 1}({x:.4g})| = {abs(tail):.3g}",
            TruncationWarning,
            stacklevel=3,
        )


def _bessel_terms(R, theta, k, n_max):
    x = k * R
    if n_max is None:
        n_max = turning_point_order(x)
    else:
        _check_truncation(x, n_max)
    jn = bessel_jn_orders(n_max, x)
    n = np.arange(-n_max, n_max + 1)
    # J_{-n}(x) = (-1)^n J_n(x)
    j_signed = np.where((n < 0) & (n % 2 == 1), -1.0, 1.0) * jn[np.abs(n)]
    phase = np.exp(1j * n * (math.pi / 2 - theta))
    return n, phase * j_signed


def af_ca_series_continuous(R, theta, psi, r_ca, k=TWO_PI, n_max=None) -> complex:
    """Jacobi-Anger series of the continuous-arc AF under the cosine phase.

    ``(1/r_ca) sum_n e^{j n (pi/2 - theta)} J_n(k R) * 2 sin(n psi)/n`` with the
    ``n = 0`` weight ``2 psi``; for ``psi = pi`` only ``n = 0`` survives and
    the value is ``2 pi J_0(k R) / r_ca``.
    """
    n, terms = _bessel_terms(R, theta, k, n_max)
    with np.errstate(invalid="ignore", divide="ignore"):
        w = np.where(n == 0, 2.0 * psi, 2.0 * np.sin(n * psi) / np.where(n == 0, 1, n))
    if psi == math.pi:
        # sin(n pi) is only zero up to rounding; drop the n != 0 terms exactly
        w = np.where(n == 0, 2.0 * math.pi, 0.0)
    return complex(np.sum(terms * w) / r_ca)


def sampled_arc_weights(n: np.ndarray, psi: float, N: int) -> np.ndarray:
    """``sum_i exp(j n tau_i)`` over midpoint nodes: ``sin(n psi) / sin(n psi / N)``.

    Where ``sin(n psi / N)`` vanishes (``n psi / N = m pi``) the ratio takes
    its limit ``N cos(n psi) / cos(m pi)``.
    """
    n = np.asarray(n, dtype=float)
    den = np.sin(n * psi / N)
    m = np.rint(n * psi / (N * math.pi))
    singular = np.isclose(n * psi / N, m * math.pi, rtol=0, atol=1e-12)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.sin(n * psi) / den
    limit = N * np.cos(n * psi) / np.cos(m * math.pi)
    return np.where(singular, limit, ratio)


def af_ca_series_discrete(R, theta, psi, N, k=TWO_PI, n_max=None, r_ca=None) -> complex:
    """Bessel series of the ``N``-antenna arc AF under the cosine phase.

    Without ``r_ca`` this is the bare sum with ``sin(n psi)/sin(n psi/N)``
    weights (``N`` at ``R = 0``). With ``r_ca`` it is scaled by
    ``delta / r_ca`` to match the discrete AF of a midpoint-sampled arc.
    For ``psi = pi`` only orders that are multiples of ``N`` contribute.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    n, terms = _bessel_terms(R, theta, k, n_max)
    if psi == math.pi:
        w = np.where(n % N == 0, N * np.where((n // N) * (N + 1) % 2 == 1, -1.0, 1.0), 0.0)
    else:
        w = sampled_arc_weights(n, psi, N)
    total = complex(np.sum(terms * w))
    if r_ca is not None:
        total *= (2.0 * psi / N) / r_ca
    return total


def series_along_ray(R_values, theta, psi, r_ca, k=TWO_PI, N=None):
    """Series AF samples at separations ``R_values`` in the fixed direction ``theta``."""
    out = []
    for R in np.asarray(R_values, dtype=float):
        if N is None:
            out.append(af_ca_series_continuous(R, theta, psi, r_ca, k))
        else:
            out.append(af_ca_series_discrete(R, theta, psi, N, k, r_ca=r_ca))
    return np.array(out)


def front_polyline(source: PointLike, delta, psi, multiple=1, wavelength=1.0, samples=721):
    """Alias front ``x_t = x_s - m R_max(theta) (cos theta, sin theta)``.

    Directions with an infinite radius break the line; the result is a list
    of ``(n, 2)`` arrays.
    """
    s = as_position(source)
    lines, cur = [], []
    for th in np.linspace(-math.pi, math.pi, samples):
        r = alias_radius(delta, th, psi, wavelength)
        if math.isfinite(r):
            rr = multiple * r
            cur.append((s.x - rr * math.cos(th), s.y - rr * math.sin(th)))
        elif cur:
            lines.append(np.array(cur))
            cur = []
    if cur:
        lines.append(np.array(cur))
    return lines
