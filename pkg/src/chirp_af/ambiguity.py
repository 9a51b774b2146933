"""Ambiguity function of continuous and sampled arrays.

``A(x_t, x_s) = int g(tau; x_t, x_s) dtau`` for the continuous curve and
``sum_i g(tau_i) * delta`` for ``N`` antennas, so both share one
normalisation and the sum converges to the integral as ``N`` grows.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .geometry import PointLike, SamplingGrid, as_position
from .scenario import Scenario
from .specfun import (
    GL_DEGREE,
    QuadratureConvergenceError,
    gauss_legendre_nodes,
    oscillatory_quadrature,
    panels_for,
)
from .spectrum import band_limit_chirp
from .wavefield import SINGULAR_DISTANCE, SingularityError, TWO_PI, pair_product

AF_RTOL = 1e-8
FIELD_BLOCK = 256


def _cycles(scenario: Scenario, K: float) -> float:
    return K * scenario.curve.length / TWO_PI


def af_continuous(scenario: Scenario, x_t: PointLike, rtol: float = AF_RTOL) -> complex:
    """Quadrature of the pair product over the whole curve."""
    x_t = as_position(x_t)
    K = band_limit_chirp(scenario, x_t, search_points=256).K
    lo, hi = scenario.curve.domain

    def g(t):
        return pair_product(scenario.curve, t, scenario.source, x_t, scenario.k_s)

    return oscillatory_quadrature(g, lo, hi, _cycles(scenario, K), rtol=rtol).value


def af_discrete(scenario: Scenario, grid: SamplingGrid | int, x_t: PointLike) -> complex:
    """``delta * sum_i g(tau_i)``; ``grid`` may be an antenna count."""
    if not isinstance(grid, SamplingGrid):
        grid = scenario.grid(grid)
    g = pair_product(grid.curve, grid.nodes, scenario.source, x_t, scenario.k_s)
    return complex(np.sum(g) * grid.step)


def matched_peak(scenario: Scenario, grid: SamplingGrid | int | None = None) -> float:
    """``A(x_s, x_s)``: real and positive."""
    if grid is None:
        return af_continuous(scenario, scenario.source).real
    return af_discrete(scenario, grid, scenario.source).real


# -- batched evaluation over many tentative positions ------------------------


def _target_array(targets) -> np.ndarray:
    t = np.asarray(targets, dtype=float)
    if t.ndim == 1:
        t = t.reshape(1, 2)
    if t.shape[-1] != 2:
        raise ValueError("targets must have shape (n, 2)")
    return t.reshape(-1, 2)


def _terms(points, speeds, source, targets, k):
    """``speeds / (r_s r_t) * exp(-j k (r_s - r_t))`` for every target (rows)."""
    s = as_position(source)
    r_s = np.hypot(points[:, 0] - s.x, points[:, 1] - s.y)
    if np.any(r_s < SINGULAR_DISTANCE):
        raise SingularityError("true source lies on the array")
    r_t = np.hypot(points[None, :, 0] - targets[:, 0, None], points[None, :, 1] - targets[:, 1, None])
    bad = np.any(r_t < SINGULAR_DISTANCE, axis=1)
    r_t[bad] = np.nan
    return speeds / (r_s * r_t) * np.exp(-1j * k * (r_s - r_t))


def _chunks(n_rows: int, n_cols: int, budget: int = 2_000_000):
    step = max(1, budget // max(n_cols, 1))
    return [(i, min(i + step, n_rows)) for i in range(0, n_rows, step)]


def _curve_distance(scenario: Scenario, targets: np.ndarray) -> np.ndarray:
    """Distance from each target to the curve (exact for arcs and segments)."""
    c = scenario.curve
    if c.kind == "ula":
        half = c.L / 2
        dx = np.clip(np.abs(targets[:, 0]) - half, 0.0, None)
        return np.hypot(dx, targets[:, 1])
    ang = np.arctan2(targets[:, 1], targets[:, 0])
    r = np.hypot(targets[:, 0], targets[:, 1])
    on_arc = np.abs(ang) <= c.psi
    d_arc = np.abs(r - c.r_ca)
    ends = c.r_ca * np.array([[math.cos(c.psi), math.sin(c.psi)], [math.cos(c.psi), -math.sin(c.psi)]])
    d_end = np.min(np.hypot(targets[:, None, 0] - ends[None, :, 0], targets[:, None, 1] - ends[None, :, 1]), axis=1)
    return np.where(on_arc, np.minimum(d_arc, d_end), d_end)


def af_discrete_batch(scenario: Scenario, grid: SamplingGrid | int, targets) -> np.ndarray:
    """Discrete AF at each row of ``targets``; NaN where a target hits an antenna."""
    if not isinstance(grid, SamplingGrid):
        grid = scenario.grid(grid)
    targets = _target_array(targets)
    nodes = grid.nodes
    pts = grid.curve.points(nodes)
    w = grid.weights()
    out = np.empty(len(targets), dtype=complex)
    for a, b in _chunks(len(targets), nodes.size):
        out[a:b] = _terms(pts, w, scenario.source, targets[a:b], scenario.k_s).sum(axis=1)
    return out


def af_continuous_batch(
    scenario: Scenario, targets, rtol: float = AF_RTOL, max_nodes: int = 1_000_000
) -> tuple[np.ndarray, np.ndarray]:
    """Continuous AF for many targets sharing one composite rule per chunk.

    Returns ``(values, error_estimates)``; targets on the curve give NaN.
    Panel doubling continues until every target in the chunk meets ``rtol``.
    """
    targets = _target_array(targets)
    curve = scenario.curve
    lo, hi = curve.domain
    values = np.full(len(targets), np.nan + 0j)
    errors = np.full(len(targets), np.nan)
    ok = _curve_distance(scenario, targets) >= SINGULAR_DISTANCE
    idx = np.flatnonzero(ok)
    if idx.size == 0:
        return values, errors
    # coarse bound on |phi'| per target sets the panel count
    probe = np.linspace(lo, hi, 257)
    ppts = curve.points(probe)
    ptan = curve.tangents(probe)
    s = scenario.source
    d_s = ppts - np.array([s.x, s.y])
    proj_s = np.sum(d_s * ptan, axis=1) / np.linalg.norm(d_s, axis=1)

    def kmax(rows):
        d_t = ppts[None] - rows[:, None]
        proj_t = np.sum(d_t * ptan[None], axis=2) / np.linalg.norm(d_t, axis=2)
        # slack covers the maximum falling between probe nodes
        return 1.1 * scenario.k_s * np.max(np.abs(proj_s[None] - proj_t), axis=1)

    bounds = np.concatenate([kmax(targets[idx[a:b]]) for a, b in _chunks(idx.size, probe.size)])
    # group targets of similar oscillation so each chunk gets a fitting rule
    order = np.argsort(bounds, kind="stable")
    idx, bounds = idx[order], bounds[order]
    for a in range(0, idx.size, 256):
        b = min(a + 256, idx.size)
        rows = targets[idx[a:b]]
        panels = panels_for(float(bounds[b - 1]) * (hi - lo) / TWO_PI)

        def rule(p):
            t, w = gauss_legendre_nodes(lo, hi, p)
            pts = curve.points(t)
            spd = curve.speeds(t) * w
            acc = np.empty(len(rows), dtype=complex)
            l1 = np.empty(len(rows))
            for c0, c1 in _chunks(len(rows), t.size):
                terms = _terms(pts, spd, s, rows[c0:c1], scenario.k_s)
                acc[c0:c1] = terms.sum(axis=1)
                l1[c0:c1] = np.abs(terms).sum(axis=1)
            return acc, l1, t.size

        coarse, _, used = rule(panels)
        while True:
            fine, l1, n = rule(2 * panels)
            used += n
            err = np.abs(fine - coarse)
            if np.all(err <= np.maximum(rtol * np.abs(fine), 1e-13 * l1)):
                break
            if used + 4 * panels * GL_DEGREE > max_nodes:
                raise QuadratureConvergenceError(
                    "batched AF quadrature did not converge", fine, float(err.max()), used
                )
            coarse, panels = fine, 2 * panels
        values[idx[a:b]] = fine
        errors[idx[a:b]] = err
    return values, errors


# -- fields over tentative-position grids -------------------------------------


@dataclass(frozen=True)
class CartesianAxes:
    x: np.ndarray
    y: np.ndarray
    kind: str = field(default="cartesian", init=False)

    @classmethod
    def span(cls, x_range, nx, y_range, ny) -> "CartesianAxes":
        return cls(np.linspace(*x_range, nx), np.linspace(*y_range, ny))

    @property
    def names(self):
        return ("x", "y")

    @property
    def arrays(self):
        return (np.asarray(self.x, float), np.asarray(self.y, float))

    def targets(self) -> np.ndarray:
        # rows follow the first axis (x), columns the second (y)
        xx, yy = np.meshgrid(self.x, self.y, indexing="ij")
        return np.stack([xx.ravel(), yy.ravel()], axis=1)


@dataclass(frozen=True)
class PolarAxes:
    """Polar grid ``center + R (cos theta, sin theta)``."""

    r: np.ndarray
    theta: np.ndarray
    center: tuple[float, float] = (0.0, 0.0)
    kind: str = field(default="polar", init=False)

    @classmethod
    def span(cls, r_range, nr, theta_range, ntheta, center=(0.0, 0.0)) -> "PolarAxes":
        return cls(np.linspace(*r_range, nr), np.linspace(*theta_range, ntheta), tuple(center))

    @property
    def names(self):
        return ("R", "theta")

    @property
    def arrays(self):
        return (np.asarray(self.r, float), np.asarray(self.theta, float))

    def targets(self) -> np.ndarray:
        rr, tt = np.meshgrid(self.r, self.theta, indexing="ij")
        cx, cy = self.center
        return np.stack([cx + (rr * np.cos(tt)).ravel(), cy + (rr * np.sin(tt)).ravel()], axis=1)


def _check_axes(axes) -> None:
    for a in axes.arrays:
        if a.ndim != 1 or a.size < 1:
            raise ValueError("axes must be non-empty 1D arrays")
        if a.size > 1 and np.any(np.diff(a) <= 0):
            raise ValueError("axes must be strictly increasing")


@dataclass(frozen=True)
class ComplexField:
    axes: CartesianAxes | PolarAxes
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        shape = tuple(a.size for a in self.axes.arrays)
        if self.values.shape != shape:
            raise ValueError(f"values shape {self.values.shape} does not match axes {shape}")

    @property
    def nan_count(self) -> int:
        return int(np.count_nonzero(np.isnan(self.values)))

    def normalized(self, peak: float | None = None) -> np.ndarray:
        peak = self.meta["matched_peak"] if peak is None else peak
        return np.abs(self.values) / peak


def resolve_threads(threads: int | None = None) -> int:
    env = os.environ.get("CHIRP_AF_THREADS")
    if env:
        return max(1, int(env))
    return max(1, int(threads or 1))


def af_field(
    scenario: Scenario,
    grid: SamplingGrid | int | None,
    axes: CartesianAxes | PolarAxes,
    threads: int | None = None,
    rtol: float = AF_RTOL,
) -> ComplexField:
    """AF at every node of ``axes``; ``grid=None`` selects the continuous array.

    Nodes that fall on the array are stored as NaN and counted in the
    metadata. Work is split into contiguous row blocks so the output order
    does not depend on the thread count.
    """
    _check_axes(axes)
    if grid is not None and not isinstance(grid, SamplingGrid):
        grid = scenario.grid(grid)
    targets = axes.targets()
    n_threads = resolve_threads(threads)
    # fixed-size blocks: the quadrature rule chosen per block must not depend on the thread count
    idx = np.arange(len(targets))
    blocks = [idx[i:i + FIELD_BLOCK] for i in range(0, len(targets), FIELD_BLOCK)]

    def run(block):
        rows = targets[block]
        if grid is None:
            return af_continuous_batch(scenario, rows, rtol=rtol)[0]
        return af_discrete_batch(scenario, grid, rows)

    if n_threads == 1:
        parts = [run(b) for b in blocks]
    else:
        with ThreadPoolExecutor(n_threads) as pool:
            parts = list(pool.map(run, blocks))
    values = np.concatenate(parts).reshape(tuple(a.size for a in axes.arrays))
    peak = matched_peak(scenario, grid)
    meta = {
        "scenario": scenario.to_dict(),
        "mode": "continuous" if grid is None else "discrete",
        "N": None if grid is None else grid.n,
        "placement": None if grid is None else grid.placement,
        "axes": axes.kind,
        "matched_peak": peak,
        "nan_count": int(np.count_nonzero(np.isnan(values))),
    }
    return ComplexField(axes, values, meta)
