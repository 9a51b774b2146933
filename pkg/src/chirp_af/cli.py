"""``chirp-af`` command line front end.

Every command that writes data files also writes ``<out>.manifest.json``
listing the files, the parameters and the scenario hash. Exit codes:
0 success, 1 a validation criterion failed, 2 bad scenario or arguments,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .ambiguity import CartesianAxes, PolarAxes, af_field, resolve_threads
from .circular import (
    af_ca_series_continuous,
    af_ca_series_discrete,
    alias_fronts,
    band_limit_ca,
    front_polyline,
    visual_aperture,
    alias_radius,
)
from .geometry import DomainError, Position, separation
from .scenario import Scenario, ScenarioError, load_scenario
from .specfun import BesselRangeError, QuadratureConvergenceError
from .spectrum import (
    DEFAULT_EPS_REL,
    SpectrumRangeError,
    band_limit_chirp,
    band_limit_measured,
    no_alias,
    spectrum_numeric,
)
from .ula import band_limit_ula, folding_threshold_curves, mismatch, radial_alias_bounds, ula_aliasing
from .wavefield import SingularityError

EXIT_OK, EXIT_FAILED, EXIT_SCENARIO, EXIT_NUMERIC = 0, 1, 2, 3


class NumericFailure(RuntimeError):
    pass


# -- output helpers ------------------------------------------------------------


def _num(v: float) -> str:
    return repr(float(v)) if math.isfinite(v) else ("nan" if math.isnan(v) else ("inf" if v > 0 else "-inf"))


def _g17(v: float) -> str:
    v = float(v)
    return format(v, ".17g") if math.isfinite(v) else _num(v)


def write_csv(path: Path, header: list[str], columns: list[np.ndarray]) -> None:
    cols = [np.asarray(c).ravel() for c in columns]
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in zip(*cols):
            fh.write(",".join(v if isinstance(v, str) else _g17(v) for v in row) + "\n")


def write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n")


def _json_default(o):
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")


def _finite_or_none(v):
    v = float(v)
    return v if math.isfinite(v) else None


class Run:
    """Collects output files and writes the manifest next to them."""

    def __init__(self, args, command: str, scenario: Scenario | None):
        self.args = args
        self.command = command
        self.scenario = scenario
        self.files: list[str] = []
        self.t0 = time.perf_counter()
        self.prefix = Path(args.out) if args.out else None
        if self.prefix is not None:
            self.prefix.parent.mkdir(parents=True, exist_ok=True)

    def path(self, suffix: str) -> Path:
        p = Path(f"{self.prefix}{suffix}")
        self.files.append(p.name)
        return p

    def finish(self, parameters: dict) -> None:
        if self.prefix is None:
            return
        manifest = {
            "command": self.command,
            "tool_version": __version__,
            "scenario_hash": self.scenario.digest() if self.scenario else None,
            "scenario": self.scenario.to_dict() if self.scenario else None,
            "parameters": parameters,
            "seed": self.args.seed,
            "outputs": list(self.files),
            "wall_time_s": time.perf_counter() - self.t0,
        }
        write_json(Path(f"{self.prefix}.manifest.json"), manifest)


def _scenario(args, required=True) -> Scenario | None:
    if not args.scenario:
        if required:
            raise ScenarioError("--scenario is required for this command")
        return None
    return load_scenario(args.scenario, wavelength_scale=args.wavelength_scale)


def _point(values, polar_values, default: Position | None = None, name="target") -> Position:
    if values is not None:
        return Position(*values)
    if polar_values is not None:
        return Position.from_polar(*polar_values)
    if default is not None:
        return default
    raise ScenarioError(f"give --{name} X Y or --{name}-polar R THETA")


def _print_json(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True, default=_json_default))


# -- commands ---------------------------------------------------------------------


def cmd_af_grid(args) -> int:
    sc = _scenario(args)
    if args.axes == "cartesian":
        axes = CartesianAxes.span(args.x_range, args.nx, args.y_range, args.ny)
    else:
        center = (sc.source.x, sc.source.y) if args.center_on_source else tuple(args.center)
        axes = PolarAxes.span(args.r_range, args.nr, args.theta_range, args.ntheta, center)
    if args.continuous:
        grid = None
    else:
        n = args.discrete if args.discrete is not None else sc.n
        if n is None:
            raise ScenarioError("no antenna count: pass --discrete N, --continuous, or set N in the scenario")
        grid = sc.grid(n, args.placement)
    field = af_field(sc, grid, axes, threads=args.threads)
    if field.nan_count == field.values.size:
        raise NumericFailure(f"every node is singular ({field.nan_count} NaN nodes)")

    run = Run(args, "af-grid", sc)
    a, b = axes.arrays
    aa, bb = np.meshgrid(a, b, indexing="ij")
    mag = np.abs(field.values)
    meta = dict(field.meta)
    meta["shape"] = list(field.values.shape)
    meta["axis_names"] = list(axes.names)
    meta["axis_values"] = {axes.names[0]: a.tolist(), axes.names[1]: b.tolist()}
    if axes.kind == "polar":
        meta["center"] = list(axes.center)
    meta["f32_layout"] = "little-endian float32 |A|, row-major, first axis slowest"
    if args.out is None:
        _print_json({k: meta[k] for k in ("mode", "N", "matched_peak", "nan_count", "shape")})
        return EXIT_OK
    if args.format in ("csv", "both"):
        write_csv(
            run.path(".csv"),
            [axes.names[0], axes.names[1], "re", "im", "abs", "abs_sqrt", "abs_norm"],
            [aa, bb, field.values.real, field.values.imag, mag, np.sqrt(mag), mag / meta["matched_peak"]],
        )
    if args.format in ("f32", "both"):
        p = run.path(".f32")
        mag.astype("<f4").tofile(p)
    write_json(run.path(".meta.json"), meta)
    run.finish({
        "axes": axes.kind,
        "axis_values": meta["axis_values"],
        "mode": meta["mode"],
        "N": meta["N"],
        "placement": meta["placement"],
        "format": args.format,
    })
    return EXIT_OK


def cmd_spectrum(args) -> int:
    sc = _scenario(args)
    target = _point(args.target, args.target_polar)
    spec = spectrum_numeric(sc, target, k_max=args.k_max, M=args.M)
    chirp = band_limit_chirp(sc, target)
    try:
        measured = band_limit_measured(spec, args.eps_rel).K
        note = None
    except SpectrumRangeError as exc:
        measured, note = None, str(exc)
    n = args.N if args.N is not None else sc.n
    verdict = None
    if n is not None:
        delta = sc.grid(n, args.placement).step
        verdict = {
            "N": n,
            "delta": delta,
            "fold_period": 2 * math.pi / delta,
            "no_alias_chirp": no_alias(delta, chirp.K),
            "no_alias_measured": None if measured is None else no_alias(delta, measured),
        }
    summary = {
        "scenario": sc.to_dict(),
        "target": [target.x, target.y],
        "eps_rel": args.eps_rel,
        "K_measured": measured,
        "K_chirp": chirp.K,
        "k_max": spec.meta["k_max"],
        "M": args.M,
        "G0": [spec.at_zero.real, spec.at_zero.imag],
        "max_error_estimate": float(spec.error_estimates.max()),
        "nodes_used": spec.nodes_used,
        "no_alias": verdict,
    }
    if note:
        summary["warning"] = note
    if args.out is None:
        _print_json(summary)
        return EXIT_OK
    run = Run(args, "spectrum", sc)
    write_csv(run.path(".csv"), ["k_tau", "re", "im", "abs"], [spec.k, spec.values.real, spec.values.imag, spec.abs])
    write_json(run.path(".json"), summary)
    run.finish({"target": [target.x, target.y], "k_max": args.k_max, "M": args.M, "eps_rel": args.eps_rel, "N": n})
    return EXIT_OK


def cmd_bandlimit(args) -> int:
    sc = _scenario(args)
    target = _point(args.target, args.target_polar)
    out = {"K_chirp": band_limit_chirp(sc, target, args.search_points).K}
    if args.measured:
        from .spectrum import measure_band_limit

        bl, spec = measure_band_limit(sc, target, eps_rel=args.eps_rel, M=args.M)
        out.update({"K_measured": bl.K, "eps_rel": args.eps_rel, "k_max": spec.meta["k_max"]})
    s = separation(sc.source, target)
    if sc.curve.kind == "circular":
        out["K_ca"] = band_limit_ca(s.radius, s.angle, sc.curve.psi, sc.k_s).K
    else:
        try:
            out["K_ula"] = band_limit_ula(mismatch(sc.source, target), sc.curve.L, sc.k_s).K
        except DomainError:
            pass
    _print_json(out)
    if args.out:
        run = Run(args, "bandlimit", sc)
        write_json(run.path(".json"), out)
        run.finish({"target": [target.x, target.y], "measured": args.measured})
    return EXIT_OK


def cmd_alias_locus(args) -> int:
    sc = _scenario(args)
    lines = []
    if sc.curve.kind == "circular":
        n = args.N if args.N is not None else sc.n
        if n is None:
            raise ScenarioError("alias-locus needs N")
        delta = 2 * sc.curve.psi / n
        for m in range(1, args.multiples + 1):
            for seg, pts in enumerate(front_polyline(sc.source, delta, sc.curve.psi, m, sc.wavelength, args.samples)):
                lines.append((f"front_m{m}", seg, pts))
    else:
        n = args.N if args.N is not None else sc.n
        if n is None:
            raise ScenarioError("alias-locus needs N")
        curves = folding_threshold_curves(sc.source, sc.curve.L, n, sc.k_s, samples=args.samples)
        for name, segs in curves.items():
            for seg, pts in enumerate(segs):
                lines.append((name, seg, pts))
    summary = {"N": n, "polylines": [{"branch": b, "segment": s, "points": len(p)} for b, s, p in lines]}
    if args.out is None:
        _print_json({**summary, "data": [{"branch": b, "segment": s, "xy": p.tolist()} for b, s, p in lines]})
        return EXIT_OK
    run = Run(args, "alias-locus", sc)
    branch = np.concatenate([[b] * len(p) for b, _, p in lines]) if lines else np.array([])
    segment = np.concatenate([[s] * len(p) for _, s, p in lines]) if lines else np.array([])
    xy = np.concatenate([p for _, _, p in lines]) if lines else np.zeros((0, 2))
    with open(run.path(".csv"), "w") as fh:
        fh.write("branch,segment,x,y\n")
        for b, s, (x, y) in zip(branch, segment, xy):
            fh.write(f"{b},{int(s)},{_g17(x)},{_g17(y)}\n")
    write_json(run.path(".json"), summary)
    run.finish({"N": n, "multiples": args.multiples, "samples": args.samples})
    return EXIT_OK


def cmd_ca_analyze(args) -> int:
    sc = _scenario(args)
    if sc.curve.kind != "circular":
        raise ScenarioError("ca-analyze needs a circular scenario")
    psi, r_ca = sc.curve.psi, sc.curve.r_ca
    n = args.N if args.N is not None else sc.n
    theta = args.theta
    omega = visual_aperture(theta, psi)
    out = {
        "theta": theta,
        "Omega": omega,
        "K_ca": band_limit_ca(args.separation, theta, psi, sc.k_s).K,
        "separation": args.separation,
    }
    if n is not None:
        delta = 2 * psi / n
        r_max = alias_radius(delta, theta, psi, sc.wavelength)
        out.update({
            "N": n,
            "delta": delta,
            "R_max": _finite_or_none(r_max),
            "multiples": alias_fronts(delta, theta, psi, sc.wavelength, args.window),
            "window": args.window,
        })
    if args.ray:
        start, stop, count = args.ray
        radii = np.linspace(start, stop, int(count))
        cont = [af_ca_series_continuous(r, theta, psi, r_ca, sc.k_s) / (2 * psi / r_ca) for r in radii]
        samples = {"R": radii.tolist(), "continuous_re": [c.real for c in cont], "continuous_im": [c.imag for c in cont]}
        if n is not None:
            disc = [af_ca_series_discrete(r, theta, psi, n, sc.k_s) / n for r in radii]
            samples.update({"discrete_re": [d.real for d in disc], "discrete_im": [d.imag for d in disc]})
        out["series_along_ray"] = samples
        out["series_normalization"] = "divided by the matched value (R = 0)"
    _print_json(out)
    if args.out:
        run = Run(args, "ca-analyze", sc)
        write_json(run.path(".json"), out)
        run.finish({"theta": theta, "separation": args.separation, "window": args.window, "ray": args.ray})
    return EXIT_OK


def cmd_ula_analyze(args) -> int:
    sc = _scenario(args)
    if sc.curve.kind != "ula":
        raise ScenarioError("ula-analyze needs a ULA scenario")
    target = _point(args.target, args.target_polar)
    m = mismatch(sc.source, target)
    L = sc.curve.L
    n = args.N if args.N is not None else sc.n
    out = {"Delta": m.delta, "Omega": m.omega, "K_ula": band_limit_ula(m, L, sc.k_s).K}
    if n is not None:
        lo, hi = radial_alias_bounds(sc.source.radius, n, L, sc.wavelength)
        out.update({"N": n, "aliasing": ula_aliasing(m, L, n, sc.k_s), "radial_bounds": [lo, _finite_or_none(hi)]})
    _print_json(out)
    if args.out:
        run = Run(args, "ula-analyze", sc)
        write_json(run.path(".json"), out)
        run.finish({"target": [target.x, target.y], "N": n})
    return EXIT_OK


def cmd_validate(args) -> int:
    from .validation import run_all

    only = set(args.only) if args.only else None
    results = run_all(quick=args.quick, seed=args.seed, only=only, echo=lambda s: print(s, file=sys.stderr))
    report = {
        "quick": args.quick,
        "seed": args.seed,
        "all_passed": all(r.passed for r in results),
        "criteria": [r.to_dict() for r in results],
    }
    _print_json(report)
    if args.out:
        run = Run(args, "validate", None)
        write_json(run.path(".json"), report)
        run.finish({"quick": args.quick, "only": sorted(only) if only else None})
    return EXIT_OK if report["all_passed"] else EXIT_FAILED


# -- parser -----------------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--scenario", help="scenario JSON file")
    g.add_argument("--out", help="output prefix; files are <out>.csv, <out>.meta.json, ...")
    g.add_argument("--seed", type=int, default=0, help="seed for randomized suites (default 0)")
    g.add_argument("--threads", type=int, default=1, help="worker threads (CHIRP_AF_THREADS overrides)")
    g.add_argument("--format", choices=("csv", "f32", "both"), default="csv")
    g.add_argument("--placement", choices=("midpoint", "endpoint"), default="midpoint",
                   help="antenna node placement on the parameter domain")
    g.add_argument("--wavelength-scale", type=float, default=1.0,
                   help="divide scenario lengths by this (e.g. the wavelength in metres)")
    return p


def _target_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--target", type=float, nargs=2, metavar=("X", "Y"))
    p.add_argument("--target-polar", type=float, nargs=2, metavar=("R", "THETA"))


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="chirp-af", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("af-grid", parents=[common], help="ambiguity function over a grid of tentative positions")
    p.add_argument("--axes", choices=("cartesian", "polar"), default="cartesian")
    p.add_argument("--x-range", type=float, nargs=2, default=(-10.0, 10.0))
    p.add_argument("--nx", type=int, default=101)
    p.add_argument("--y-range", type=float, nargs=2, default=(-10.0, 10.0))
    p.add_argument("--ny", type=int, default=101)
    p.add_argument("--r-range", type=float, nargs=2, default=(0.0, 10.0))
    p.add_argument("--nr", type=int, default=101)
    p.add_argument("--theta-range", type=float, nargs=2, default=(-math.pi, math.pi))
    p.add_argument("--ntheta", type=int, default=181)
    p.add_argument("--center", type=float, nargs=2, default=(0.0, 0.0), help="polar grid centre")
    p.add_argument("--center-on-source", action="store_true", help="centre the polar grid on the source")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--discrete", type=int, metavar="N", help="N-antenna array (default: scenario N)")
    mode.add_argument("--continuous", action="store_true", help="continuous array")
    p.set_defaults(func=cmd_af_grid)

    p = sub.add_parser("spectrum", parents=[common], help="spatial spectrum G(k_tau) of the pair product")
    _target_args(p)
    p.add_argument("--k-max", type=float, default=None)
    p.add_argument("--M", type=int, default=2049, help="number of k_tau nodes (odd)")
    p.add_argument("--eps-rel", type=float, default=DEFAULT_EPS_REL)
    p.add_argument("--N", type=int, default=None, help="antenna count for the no-alias verdict")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("bandlimit", parents=[common], help="chirp (and optionally measured) band limit")
    _target_args(p)
    p.add_argument("--measured", action="store_true")
    p.add_argument("--eps-rel", type=float, default=DEFAULT_EPS_REL)
    p.add_argument("--M", type=int, default=8193)
    p.add_argument("--search-points", type=int, default=2048)
    p.set_defaults(func=cmd_bandlimit)

    p = sub.add_parser("alias-locus", parents=[common], help="predicted alias fronts as polylines")
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--multiples", type=int, default=2, help="circular arrays: fronts m = 1..multiples")
    p.add_argument("--samples", type=int, default=721)
    p.set_defaults(func=cmd_alias_locus)

    p = sub.add_parser("ca-analyze", parents=[common], help="circular-array closed forms")
    p.add_argument("--theta", type=float, required=True, help="separation angle")
    p.add_argument("--separation", type=float, default=1.0, help="separation radius for K_ca")
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--window", type=float, default=200.0, help="largest radius for alias multiples")
    p.add_argument("--ray", type=float, nargs=3, metavar=("START", "STOP", "COUNT"),
                   help="series AF samples at separations along the ray")
    p.set_defaults(func=cmd_ca_analyze)

    p = sub.add_parser("ula-analyze", parents=[common], help="ULA Fresnel closed forms")
    _target_args(p)
    p.add_argument("--N", type=int, default=None)
    p.set_defaults(func=cmd_ula_analyze)

    p = sub.add_parser("validate", parents=[common], help="run the acceptance criteria")
    p.add_argument("--quick", action="store_true", help="reduced grids and suites")
    p.add_argument("--only", type=int, nargs="+", metavar="ID")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.threads = resolve_threads(args.threads)
    try:
        return args.func(args)
    except (ScenarioError, DomainError, SingularityError) as exc:
        print(f"chirp-af: scenario error: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    except (QuadratureConvergenceError, SpectrumRangeError, BesselRangeError, NumericFailure) as exc:
        print(f"chirp-af: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"chirp-af: invalid input: {exc}", file=sys.stderr)
        return EXIT_SCENARIO


if __name__ == "__main__":
    sys.exit(main())
