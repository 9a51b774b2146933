"""Ambiguity functions, spatial-chirp spectra and aliasing loci of 1D arrays
in the spherical-wavefront regime."""

from .ambiguity import (
    CartesianAxes,
    ComplexField,
    PolarAxes,
    af_continuous,
    af_discrete,
    af_field,
    matched_peak,
)
from .geometry import (
    CircularArc,
    DomainError,
    LineSegment,
    PolarPosition,
    Position,
    SamplingGrid,
    point_at,
    separation,
    tangent_norm_at,
)
from .scenario import Scenario, ScenarioError, load_scenario, scenario_from_dict
from .spectrum import (
    BandLimit,
    SpectrumGrid,
    SpectrumRangeError,
    band_limit_chirp,
    band_limit_measured,
    measure_band_limit,
    no_alias,
    spectrum_numeric,
)
from .wavefield import (
    SingularityError,
    Wavenumber,
    local_phase,
    local_wavenumber,
    pair_product,
    propagation_coeff,
)

__version__ = "0.1.0"

__all__ = [
    "BandLimit",
    "CartesianAxes",
    "CircularArc",
    "ComplexField",
    "DomainError",
    "LineSegment",
    "PolarAxes",
    "PolarPosition",
    "Position",
    "SamplingGrid",
    "Scenario",
    "ScenarioError",
    "SingularityError",
    "SpectrumGrid",
    "SpectrumRangeError",
    "Wavenumber",
    "af_continuous",
    "af_discrete",
    "af_field",
    "band_limit_chirp",
    "band_limit_measured",
    "load_scenario",
    "local_phase",
    "local_wavenumber",
    "matched_peak",
    "measure_band_limit",
    "no_alias",
    "pair_product",
    "point_at",
    "propagation_coeff",
    "scenario_from_dict",
    "separation",
    "spectrum_numeric",
    "tangent_norm_at",
]
