"""Scenario bundle (carrier, array curve, true source) and its JSON form."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path

from .geometry import (
    ArrayCurve,
    DomainError,
    Position,
    SamplingGrid,
    as_position,
    curve_from_dict,
)
from .wavefield import TWO_PI


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class Scenario:
    curve: ArrayCurve
    source: Position
    k_s: float = TWO_PI
    n: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "source", as_position(self.source))
        if not (self.k_s > 0 and math.isfinite(self.k_s)):
            raise ScenarioError(f"k_s must be finite and > 0, got {self.k_s}")

    @property
    def wavelength(self) -> float:
        return TWO_PI / self.k_s

    def grid(self, n: int | None = None, placement: str = "midpoint") -> SamplingGrid:
        n = self.n if n is None else n
        if n is None:
            raise ScenarioError("scenario has no antenna count N")
        return SamplingGrid(self.curve, n, placement)

    def to_dict(self) -> dict:
        d = {
            "curve": self.curve.to_dict(),
            "k_s": self.k_s,
            "source": [self.source.x, self.source.y],
        }
        if self.n is not None:
            d["N"] = self.n
        return d

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def _parse_source(raw) -> Position:
    if isinstance(raw, dict):
        return Position.from_polar(float(raw["R"]), float(raw["theta"]))
    if isinstance(raw, (list, tuple)) and len(raw) == 2:
        return Position(float(raw[0]), float(raw[1]))
    raise ScenarioError(f"source must be [x, y] or {{'R':..,'theta':..}}, got {raw!r}")


def scenario_from_dict(d: dict, wavelength_scale: float = 1.0) -> Scenario:
    """Build a scenario; ``wavelength_scale`` converts metric inputs to wavelengths.

    With ``wavelength_scale = lambda_s`` (metres), every length in ``d`` is
    divided by it and an explicit ``k_s`` (rad/m) is multiplied by it.
    """
    try:
        curve_d = dict(d["curve"])
        s = float(wavelength_scale)
        if s != 1.0:
            for key in ("R_ca", "L"):
                if key in curve_d:
                    curve_d[key] = float(curve_d[key]) / s
        curve = curve_from_dict(curve_d)
        src = _parse_source(d["source"])
        if s != 1.0:
            src = Position(src.x / s, src.y / s)
        # an explicit k_s is metric (rad/m); the default is already per wavelength
        k_s = float(d["k_s"]) * s if "k_s" in d else TWO_PI
        n = d.get("N")
        if n is not None:
            if int(n) != n or n < 1:
                raise ScenarioError(f"N must be a positive integer, got {n}")
            n = int(n)
        return Scenario(curve, src, k_s, n)
    except KeyError as exc:
        raise ScenarioError(f"scenario is missing key {exc}") from None
    except (TypeError, DomainError) as exc:
        raise ScenarioError(str(exc)) from None


def load_scenario(path, wavelength_scale: float = 1.0) -> Scenario:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc}") from None
    if not isinstance(raw, dict):
        raise ScenarioError("scenario file must hold a JSON object")
    return scenario_from_dict(raw, wavelength_scale)
