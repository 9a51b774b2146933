"""Fresnel-regime closed forms for a horizontal ULA of length ``L`` centred at 0.

Angles are measured from the array axis (+x), so broadside is ``pi/2``.
With the parabolic distance expansion the pair-product phase is quadratic
in ``tau`` and the local wave number is affine,
``phi'(tau) = k (tau * Delta - Omega)``, where
``Delta = 1/R_s - 1/R_t`` and ``Omega = cos(theta_s) - cos(theta_t)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .geometry import DomainError, PointLike, PolarPosition, as_position
from .spectrum import BandLimit
from .wavefield import TWO_PI


class FresnelValidityWarning(UserWarning):
    pass


@dataclass(frozen=True)
class UlaScenario:
    L: float
    k_s: float = TWO_PI
    n: int | None = None
    gamma: float = 1.0

    def __post_init__(self):
        if not self.L > 0:
            raise ValueError("L must be > 0")
        if self.gamma < 1:
            raise ValueError("gamma must be >= 1")

    @property
    def step(self) -> float:
        if self.n is None:
            raise ValueError("antenna count not set")
        return self.L / self.n

    def check_fresnel(self, *radii: float) -> bool:
        """Warn (never raise) when a source is closer than ``gamma * L``."""
        ok = True
        for r in radii:
            if r < self.gamma * self.L:
                warnings.warn(
                    f"R = {r:.6g} < {self.gamma:g} L: the parabolic expansion is coarse here",
                    FresnelValidityWarning,
                    stacklevel=2,
                )
                ok = False
        return ok


@dataclass(frozen=True)
class UlaMismatch:
    delta: float
    omega: float

    @property
    def is_zero(self) -> bool:
        return self.delta == 0.0 and self.omega == 0.0


def _polar(p) -> PolarPosition:
    if isinstance(p, PolarPosition):
        return p
    return as_position(p).to_polar()


def fresnel_distance(tau, R_s: float, theta_s: float):
    """``R_s + tau^2 / (2 R_s) - tau cos(theta_s)``."""
    if not R_s > 0:
        raise DomainError("R_s must be > 0")
    tau = np.asarray(tau, dtype=float)
    return R_s + tau**2 / (2.0 * R_s) - tau * math.cos(theta_s)


def mismatch(x_s: PointLike | PolarPosition, x_t: PointLike | PolarPosition) -> UlaMismatch:
    s, t = _polar(x_s), _polar(x_t)
    if s.radius == 0 or t.radius == 0:
        raise DomainError("mismatch needs non-zero radii")
    return UlaMismatch(1.0 / s.radius - 1.0 / t.radius, math.cos(s.angle) - math.cos(t.angle))


def local_wavenumber_ula(tau, m: UlaMismatch, k=TWO_PI):
    return k * (np.asarray(tau, dtype=float) * m.delta - m.omega)


def band_limit_ula(m: UlaMismatch, L: float, k=TWO_PI) -> BandLimit:
    """``k (L/2 |Delta| + |Omega|)``, the larger endpoint of the affine ``|phi'|``."""
    return BandLimit(k * (0.5 * L * abs(m.delta) + abs(m.omega)), "ula")


def ula_aliasing(m: UlaMismatch, L: float, N: int, k=TWO_PI) -> bool:
    """True when ``2 pi N / L <= K_ula``; equality counts as aliasing."""
    if N < 1:
        raise ValueError("N must be >= 1")
    return 2.0 * math.pi * N / L <= band_limit_ula(m, L, k).K


def radial_alias_bounds(R_s: float, N: int, L: float, wavelength: float = 1.0) -> tuple[float, float]:
    """Radii along the source ray (``Omega = 0``) beyond which the AF aliases.

    Returns ``(lower, upper)``: aliasing for ``R_t <= lower`` and
    ``R_t >= upper``; ``upper`` is ``inf`` when ``1/R_s <= 2 N lambda / L^2``.
    """
    if not R_s > 0:
        raise DomainError("R_s must be > 0")
    c = 2.0 * N * wavelength / L**2
    lower = 1.0 / (1.0 / R_s + c)
    inv = 1.0 / R_s - c
    upper = 1.0 / inv if inv > 0 else math.inf
    return lower, upper


def folding_threshold_curves(source, L, N, k=TWO_PI, samples=721, theta_range=(1e-3, math.pi - 1e-3)):
    """Alias-onset locus ``K_ula = 2 pi N / L`` in the upper half-plane.

    For each direction ``theta_t`` the condition
    ``L/2 |1/R_s - 1/R_t| = 2 pi N / (k L) - |Omega|`` gives up to two
    radii. Returns ``{"inner": [...], "outer": [...]}`` polylines, each a
    list of ``(n, 2)`` arrays split where a branch ceases to exist.
    """
    s = _polar(source)
    budget = TWO_PI * N / (k * L)
    branches = {"inner": [], "outer": []}
    current = {"inner": [], "outer": []}
    for th in np.linspace(*theta_range, samples):
        c = budget - abs(math.cos(s.angle) - math.cos(th))
        pts = {}
        if c >= 0:
            span = 2.0 * c / L
            inv_in = 1.0 / s.radius + span
            inv_out = 1.0 / s.radius - span
            pts["inner"] = 1.0 / inv_in
            if inv_out > 0:
                pts["outer"] = 1.0 / inv_out
        for name in ("inner", "outer"):
            if name in pts:
                r = pts[name]
                current[name].append((r * math.cos(th), r * math.sin(th)))
            elif current[name]:
                branches[name].append(np.array(current[name]))
                current[name] = []
    for name in ("inner", "outer"):
        if current[name]:
            branches[name].append(np.array(current[name]))
    return branches
