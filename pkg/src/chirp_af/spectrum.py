"""Spatial spectrum of the pair product and its band limit.

The spectrum ``G(k) = int g(tau) exp(-j k tau) dtau`` over the curve domain
equals the continuous ambiguity function at ``k = 0``. Sampling the curve
with step ``delta`` folds ``G`` with period ``2*pi/delta``; the ambiguity
function is untouched as long as the band limit ``K`` of ``G`` does not
exceed that period.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import PointLike, Position, as_position
from .scenario import Scenario
from .specfun import fourier_quadrature
from .wavefield import local_wavenumber, pair_product

DEFAULT_EPS_REL = 0.01
DEFAULT_SEARCH_POINTS = 2048
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class SpectrumRangeError(ValueError):
    """The band-limit threshold is still exceeded at the edge of the k axis."""


@dataclass(frozen=True)
class BandLimit:
    K: float
    method: str
    eps_rel: float | None = None

    def __post_init__(self):
        if not (self.K >= 0 and math.isfinite(self.K)):
            raise ValueError(f"band limit must be finite and >= 0, got {self.K}")

    def __float__(self):
        return self.K


@dataclass(frozen=True)
class SpectrumGrid:
    k: np.ndarray
    values: np.ndarray
    error_estimates: np.ndarray
    scenario: Scenario
    target: Position
    nodes_used: int = 0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.k.size % 2 != 1:
            raise ValueError("spectrum axis needs an odd number of nodes")
        if not np.allclose(self.k, -self.k[::-1], rtol=0, atol=1e-12 * max(1.0, abs(self.k[-1]))):
            raise ValueError("spectrum axis must be symmetric about 0")

    @property
    def abs(self) -> np.ndarray:
        return np.abs(self.values)

    @property
    def at_zero(self) -> complex:
        return complex(self.values[self.k.size // 2])


def _maximize_abs(fn, lo: float, hi: float, points: int) -> float:
    """Max of ``|fn|`` on ``[lo, hi]``: dense grid then golden-section polish."""
    t = np.linspace(lo, hi, points)
    v = np.abs(fn(t))
    i = int(np.argmax(v))
    best = float(v[i])
    a, b = t[max(i - 1, 0)], t[min(i + 1, points - 1)]
    if b <= a:
        return best

    def h(x):
        return float(np.abs(fn(np.array([x])))[0])

    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = h(c), h(d)
    for _ in range(60):
        if b - a <= 1e-14 * max(1.0, abs(a), abs(b)):
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = h(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = h(d)
    return max(best, fc, fd)


def band_limit_from_wavenumber(
    wavenumber, lo: float, hi: float, search_points: int = DEFAULT_SEARCH_POINTS
) -> BandLimit:
    """``max |wavenumber(tau)|`` on ``[lo, hi]`` for any vectorised phase rate."""
    if search_points < 64:
        raise ValueError("search_points must be >= 64")
    return BandLimit(_maximize_abs(wavenumber, lo, hi, search_points), "chirp")


def band_limit_chirp(
    scenario: Scenario, x_t: PointLike, search_points: int = DEFAULT_SEARCH_POINTS
) -> BandLimit:
    """Band limit predicted by the chirp model: ``max |phi'(tau)|`` over the curve."""
    curve = scenario.curve
    lo, hi = curve.domain

    def wn(t):
        return local_wavenumber(curve, t, scenario.source, x_t, scenario.k_s)

    return band_limit_from_wavenumber(wn, lo, hi, search_points)


def default_k_max(scenario: Scenario, K_chirp: float) -> float:
    return 1.5 * K_chirp + 4.0 * math.pi / scenario.curve.length


def spectrum_numeric(
    scenario: Scenario,
    x_t: PointLike,
    k_max: float | None = None,
    M: int = 2049,
    rtol: float = 1e-8,
    max_nodes: int = 4_000_000,
) -> SpectrumGrid:
    """``G(k)`` on ``M`` (odd) equispaced nodes of ``[-k_max, k_max]``."""
    if M < 1 or M % 2 != 1:
        raise ValueError(f"M must be odd, got {M}")
    x_t = as_position(x_t)
    K = band_limit_chirp(scenario, x_t).K
    if k_max is None:
        k_max = default_k_max(scenario, K)
    if not k_max > 0:
        raise ValueError("k_max must be > 0")
    k = np.linspace(-k_max, k_max, M)
    k[M // 2] = 0.0
    lo, hi = scenario.curve.domain
    cycles = (K + k_max) * (hi - lo) / (2.0 * math.pi)

    def g(t):
        return pair_product(scenario.curve, t, scenario.source, x_t, scenario.k_s)

    values, err, used = fourier_quadrature(g, lo, hi, k, cycles, rtol=rtol, max_nodes=max_nodes)
    return SpectrumGrid(k, values, err, scenario, x_t, used, {"K_chirp": K, "k_max": k_max})


def band_limit_measured(spec: SpectrumGrid, eps_rel: float = DEFAULT_EPS_REL) -> BandLimit:
    """Largest ``|k|`` with ``|G(k)| > eps_rel * max |G|``."""
    if not 0 < eps_rel < 1:
        raise ValueError("eps_rel must lie in (0, 1)")
    a = spec.abs
    peak = a.max()
    if peak == 0:
        return BandLimit(0.0, "measured", eps_rel)
    above = a > eps_rel * peak
    if above[0] or above[-1]:
        raise SpectrumRangeError(
            f"|G| still exceeds {eps_rel:g} * max at k = +/-{spec.k[-1]:.6g}; "
            "recompute the spectrum with a larger k_max"
        )
    return BandLimit(float(np.abs(spec.k[above]).max()), "measured", eps_rel)


def measure_band_limit(
    scenario: Scenario,
    x_t: PointLike,
    eps_rel: float = DEFAULT_EPS_REL,
    M: int = 8193,
    k_max: float | None = None,
    max_widenings: int = 8,
) -> tuple[BandLimit, SpectrumGrid]:
    """Measured band limit, doubling ``k_max`` while the threshold hits the edge."""
    for _ in range(max_widenings + 1):
        spec = spectrum_numeric(scenario, x_t, k_max=k_max, M=M)
        try:
            return band_limit_measured(spec, eps_rel), spec
        except SpectrumRangeError:
            k_max = 2.0 * spec.meta["k_max"]
    raise SpectrumRangeError(
        f"band limit not bracketed after {max_widenings} widenings (k_max={k_max:.6g})"
    )


def no_alias(delta: float, K) -> bool:
    """True when the fold period ``2*pi/delta`` is at least the band limit."""
    if not delta > 0:
        raise ValueError("delta must be > 0")
    return 2.0 * math.pi / delta >= float(K)
