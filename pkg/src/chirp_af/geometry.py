"""Positions, polar coordinates and parametric array curves.

All lengths are expressed in carrier wavelengths, so the default wave number
is ``2*pi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np


class DomainError(ValueError):
    """A parameter lies outside the domain of a curve or formula."""


@dataclass(frozen=True)
class Position:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise DomainError(f"non-finite position ({self.x}, {self.y})")

    @classmethod
    def from_polar(cls, radius: float, angle: float) -> "Position":
        return cls(radius * math.cos(angle), radius * math.sin(angle))

    def to_polar(self) -> "PolarPosition":
        return PolarPosition.from_cartesian(self.x, self.y)

    @property
    def radius(self) -> float:
        return math.hypot(self.x, self.y)

    @property
    def angle(self) -> float:
        return self.to_polar().angle

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)

    def __sub__(self, other: "Position") -> "Position":
        return Position(self.x - other.x, self.y - other.y)

    def __add__(self, other: "Position") -> "Position":
        return Position(self.x + other.x, self.y + other.y)


def normalize_angle(theta: float) -> float:
    """Map an angle into (-pi, pi]."""
    t = math.atan2(math.sin(theta), math.cos(theta))
    if t <= -math.pi:
        t = math.pi
    return t


@dataclass(frozen=True)
class PolarPosition:
    radius: float
    angle: float

    def __post_init__(self):
        if not (self.radius >= 0 and math.isfinite(self.radius)):
            raise DomainError(f"radius must be finite and >= 0, got {self.radius}")
        if not math.isfinite(self.angle):
            raise DomainError("angle must be finite")
        object.__setattr__(self, "angle", normalize_angle(self.angle))

    @classmethod
    def from_cartesian(cls, x: float, y: float) -> "PolarPosition":
        r = math.hypot(x, y)
        # atan2(0, 0) is 0 but atan2(+0, -0) is pi: keep the origin at 0
        theta = math.atan2(y, x) if r > 0 else 0.0
        return cls(r, theta)

    def to_cartesian(self) -> Position:
        return Position.from_polar(self.radius, self.angle)


PointLike = Union[Position, PolarPosition, tuple, list, np.ndarray]


def as_position(p: PointLike) -> Position:
    """Coerce tuples, arrays and polar positions to a Cartesian ``Position``."""
    if isinstance(p, Position):
        return p
    if isinstance(p, PolarPosition):
        return p.to_cartesian()
    x, y = (float(v) for v in p)
    return Position(x, y)


def separation(x_s: PointLike, x_t: PointLike) -> PolarPosition:
    """Polar form of ``x_s - x_t``; the angle is 0 when the points coincide."""
    a, b = as_position(x_s), as_position(x_t)
    return PolarPosition.from_cartesian(a.x - b.x, a.y - b.y)


class ArrayCurve:
    """Parametric curve ``x(tau)`` over the compact interval ``domain``.

    Subclasses provide the vectorised ``_points``, ``_tangents`` and
    ``_speeds`` kernels. The public scalar accessors check the domain.
    """

    kind: str = ""

    @property
    def domain(self) -> tuple[float, float]:
        raise NotImplementedError

    @property
    def length(self) -> float:
        lo, hi = self.domain
        return hi - lo

    def _check(self, tau) -> np.ndarray:
        t = np.asarray(tau, dtype=float)
        lo, hi = self.domain
        # small slack so grid endpoints computed in floating point pass
        slack = 1e-12 * max(1.0, abs(lo), abs(hi))
        if np.any(~np.isfinite(t)) or np.any(t < lo - slack) or np.any(t > hi + slack):
            raise DomainError(f"tau outside [{lo}, {hi}]")
        return t

    def points(self, tau) -> np.ndarray:
        """Curve points for an array of parameters, shape ``(..., 2)``."""
        return self._points(self._check(tau))

    def tangents(self, tau) -> np.ndarray:
        return self._tangents(self._check(tau))

    def speeds(self, tau) -> np.ndarray:
        return self._speeds(self._check(tau))

    def _points(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _tangents(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _speeds(self, t: np.ndarray) -> np.ndarray:
        return np.linalg.norm(self._tangents(t), axis=-1)

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class CircularArc(ArrayCurve):
    """Arc of the origin-centred circle of radius ``r_ca`` over ``[-psi, psi]``."""

    r_ca: float
    psi: float
    kind: str = field(default="circular", init=False, repr=False)

    def __post_init__(self):
        if not self.r_ca > 0:
            raise DomainError(f"r_ca must be > 0, got {self.r_ca}")
        if not 0 < self.psi <= math.pi:
            raise DomainError(f"psi must lie in (0, pi], got {self.psi}")

    @property
    def domain(self) -> tuple[float, float]:
        return (-self.psi, self.psi)

    def _points(self, t):
        return self.r_ca * np.stack([np.cos(t), np.sin(t)], axis=-1)

    def _tangents(self, t):
        return self.r_ca * np.stack([-np.sin(t), np.cos(t)], axis=-1)

    def _speeds(self, t):
        return np.full(np.shape(t), self.r_ca)

    def to_dict(self) -> dict:
        return {"kind": "circular", "R_ca": self.r_ca, "psi": self.psi}


@dataclass(frozen=True)
class LineSegment(ArrayCurve):
    """Horizontal segment ``(tau, 0)`` for ``tau`` in ``[-L/2, L/2]``."""

    L: float
    kind: str = field(default="ula", init=False, repr=False)

    def __post_init__(self):
        if not self.L > 0:
            raise DomainError(f"L must be > 0, got {self.L}")

    @property
    def domain(self) -> tuple[float, float]:
        return (-self.L / 2, self.L / 2)

    def _points(self, t):
        return np.stack([t, np.zeros_like(t)], axis=-1)

    def _tangents(self, t):
        return np.stack([np.ones_like(t), np.zeros_like(t)], axis=-1)

    def _speeds(self, t):
        return np.ones(np.shape(t))

    def to_dict(self) -> dict:
        return {"kind": "ula", "L": self.L}


def point_at(curve: ArrayCurve, tau: float) -> Position:
    x, y = curve.points(tau)
    return Position(float(x), float(y))


def tangent_norm_at(curve: ArrayCurve, tau: float) -> float:
    return float(curve.speeds(tau))


@dataclass(frozen=True)
class SamplingGrid:
    """Uniform discretisation of a curve domain into ``n`` antenna parameters.

    ``placement="midpoint"`` puts nodes at ``lo + (i + 1/2) * step`` which keeps
    the node set symmetric and never duplicates the seam of a full circle.
    ``placement="endpoint"`` puts them at ``lo + i * step`` (the first node on
    the domain edge, still ``n`` nodes with the same step).
    """

    curve: ArrayCurve
    n: int
    placement: str = "midpoint"

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"N must be a positive integer, got {self.n}")
        if self.placement not in ("midpoint", "endpoint"):
            raise DomainError(f"unknown placement {self.placement!r}")

    @property
    def step(self) -> float:
        return self.curve.length / self.n

    @property
    def nodes(self) -> np.ndarray:
        lo, _ = self.curve.domain
        offset = 0.5 if self.placement == "midpoint" else 0.0
        return lo + (np.arange(self.n) + offset) * self.step

    def points(self) -> np.ndarray:
        return self.curve.points(self.nodes)

    def weights(self) -> np.ndarray:
        """Measure weight of each antenna, ``step * |x'(tau_i)|``."""
        return self.step * self.curve.speeds(self.nodes)


def curve_from_dict(spec: dict) -> ArrayCurve:
    kind = spec.get("kind")
    if kind in ("circular", "ca"):
        return CircularArc(float(spec["R_ca"]), float(spec["psi"]))
    if kind in ("ula", "line"):
        return LineSegment(float(spec["L"]))
    raise DomainError(f"unknown curve kind {kind!r}")
