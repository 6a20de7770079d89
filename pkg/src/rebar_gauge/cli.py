"""Command-line interface: ``rebar-gauge <command> ...``."""

import argparse
import json
from pathlib import Path
import sys

import numpy as np

from . import __version__
from .curve import band_peak_index, build_curve, default_diameters
from .errors import AmbiguityError, OutOfRangeError, RebarGaugeError
from .estimator import calibrate_permittivity, permittivity_from_plate
from .geometry import ScanGeometry
from .io import (
    atomic_write_text,
    file_digest,
    read_bscan,
    read_json,
    read_spectrum,
    read_trace,
    write_bscan,
    write_json,
    write_trace,
)
from .scattering import BarModel, MediumModel
from .sigproc import Spectrum, Trace, auto_band, forward_spectrum
from .synth import BScan, BuriedBar, SynthScenario, generate_bscan, generate_scan
from .workflow import analyze, extract_bscan_pairs, grid_from, prepare_pair

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_RANGE = 3
EXIT_VALIDITY = 4


class UsageError(RebarGaugeError, ValueError):
    pass


def _floats(text, count, name):
    parts = text.split(":")
    if len(parts) != count:
        raise UsageError(f"{name} expects {count} colon-separated numbers, got {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError as exc:
        raise UsageError(f"{name}: {exc}") from exc


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        atomic_write_text(out, text)


def _emit_json(record, out):
    _emit(json.dumps(record, indent=2, sort_keys=True) + "\n", out)


def _grid(args):
    return None if args.grid is None else grid_from(_floats(args.grid, 3, "--grid"))


def _band(args):
    return None if args.band is None else _floats(args.band, 2, "--band")


def _base_report(command, inputs, params):
    existing = [p for p in inputs if p is not None]
    return {
        "tool": "rebar-gauge",
        "version": __version__,
        "command": command,
        "inputs": [str(p) for p in existing],
        "inputs_sha256": file_digest(*existing) if existing else None,
        "params": params,
    }


# estimate


def _permittivity(args, perp, par, band):
    """Return ``(eps_r, source, warnings)`` from whichever option was given."""
    if args.er is not None:
        return args.er, "direct", []
    if args.plate is not None:
        delay, depth = _floats(args.plate, 2, "--plate")
        cal = permittivity_from_plate(delay, depth)
        notes = []
        if cal.unphysical:
            notes.append(
                f"plate calibration gives eps_r={cal.relative_permittivity:.4g} < 1; "
                "check the time-zero of the plate echo"
            )
        return cal.relative_permittivity, "plate", notes
    d_known, ratio_known = _floats(args.calib_bar, 2, "--calib-bar")
    prep = prepare_pair(perp, par, fc=args.fc, band=band)
    use_band = band if band is not None else auto_band(forward_spectrum(prep.par))
    spectrum = forward_spectrum(prep.par, use_band)
    fc = args.fc if args.fc is not None else prep.gate_fc
    er = calibrate_permittivity(d_known, ratio_known, spectrum, prep.s_t, fc=fc)
    return er, "calibration-bar", []


def cmd_estimate(args):
    perp = read_trace(args.perp)
    par = read_trace(args.par)
    bg_perp = read_trace(args.bg_perp) if args.bg_perp else None
    bg_par = read_trace(args.bg_par) if args.bg_par else None
    band, grid = _band(args), _grid(args)
    params = {
        "band_hz": band, "grid_mm": args.grid, "fc_hz": args.fc, "er": args.er,
        "plate": args.plate, "calib_bar": args.calib_bar, "depth_m": args.depth,
    }
    report = _base_report("estimate", [args.perp, args.par, args.bg_perp, args.bg_par], params)

    er, er_source, notes = _permittivity(args, perp, par, band)
    medium = MediumModel(er)
    report["relative_permittivity"] = er
    report["permittivity_source"] = er_source
    try:
        result = analyze(perp, par, medium, bg_perp, bg_par, band=band, fc=args.fc,
                         diameters_mm=grid)
    except (OutOfRangeError, AmbiguityError) as exc:
        report["error"] = str(exc)
        report["warnings"] = notes
        _emit_json(report, args.out)
        return EXIT_RANGE
    notes.extend(result.warnings)
    if args.depth is not None:
        notes.extend(ScanGeometry(depth=args.depth).warnings(result.fc, medium))
    est = result.estimate
    report.update(
        ratio=result.ratio,
        s_t=result.s_t,
        band_hz=list(result.band),
        fc_hz=result.fc,
        diameter_mm=est.diameter_mm,
        in_validity_range=est.in_validity_range,
        validity_diameter_mm=result.curve.validity_diameter_mm,
        curve_slope_per_mm=est.curve_slope_at_estimate,
        warnings=notes,
    )
    _emit_json(report, args.out)
    return EXIT_OK if est.in_validity_range else EXIT_VALIDITY


# curve


def cmd_curve(args):
    if (args.trace is None) == (args.spectrum is None):
        raise UsageError("give exactly one of --trace or --spectrum")
    band, grid = _band(args), _grid(args)
    medium = MediumModel(args.er)
    if args.trace is not None:
        trace = read_trace(args.trace)
        prep = prepare_pair(trace, trace, fc=args.fc, band=band)
        use_band = band if band is not None else auto_band(forward_spectrum(prep.par))
        spectrum = forward_spectrum(prep.par, use_band)
        s_t = prep.s_t
        fc = args.fc if args.fc is not None else (
            prep.gate_fc if band is None else 0.5 * (band[0] + band[1]))
    else:
        spectrum = read_spectrum(args.spectrum)
        if band is not None:
            keep = (spectrum.frequencies >= band[0]) & (spectrum.frequencies <= band[1])
            if not np.any(keep):
                raise UsageError("no spectrum rows inside --band")
            first = int(np.flatnonzero(keep)[0])
            spectrum = Spectrum(spectrum.bins[keep], spectrum.frequencies[first],
                                      spectrum.df, spectrum.n_time)
        s_t = args.st if args.st is not None else band_peak_index(spectrum)
        lo, hi = spectrum.band
        fc = args.fc if args.fc is not None else 0.5 * (lo + hi)
    if grid is None:
        grid = default_diameters(fc, medium)
    curve = build_curve(spectrum, s_t, medium, grid, fc=fc)
    _emit(curve.to_csv(), args.out)
    return EXIT_OK


# synth


def _bscan_from_record(record, seed):
    medium = MediumModel(float(record.get("relative_permittivity", 1.0)))
    bars = [
        BuriedBar(BarModel.from_diameter_mm(float(b["diameter_mm"])), float(b["position_m"]),
                  float(b["depth_m"]))
        for b in record["bars"]
    ]
    spacing = float(record["trace_spacing_m"])
    count = int(record["n_positions"])
    x0 = float(record.get("x0_m", 0.0))
    positions = x0 + spacing * np.arange(count)
    return generate_bscan(
        bars, medium, positions,
        fc=float(record.get("fc_hz", 1e9)),
        dt=float(record.get("dt_s", 1e-11)),
        n_samples=int(record.get("n_samples", 2048)),
        amplitude=float(record.get("amplitude", 1.0)),
        noise_rms=float(record.get("noise_rms", 0.0)),
        source=record.get("source", "dipole"),
        coupling=float(record.get("coupling", 0.5)),
        seed=seed,
    ), spacing, x0


def cmd_synth(args):
    record = read_json(args.scenario)
    out = Path(args.out)
    written = []
    try:
        if "bars" in record:
            bscan, spacing, x0 = _bscan_from_record(record, args.seed)
            for pol, data in (("par", bscan.par), ("perp", bscan.perp)):
                path = out / f"bscan_{pol}.csv"
                write_bscan(path, data, bscan.dt, bscan.t0, spacing, pol, x0)
                written.append(path.name)
        else:
            scenario = SynthScenario.from_record(record)
            scan_par, scan_perp, bg_par, bg_perp = generate_scan(scenario, seed=args.seed)
            for name, trace in (("par", scan_par), ("perp", scan_perp),
                                ("bg_par", bg_par), ("bg_perp", bg_perp)):
                path = out / f"{name}.txt"
                write_trace(path, trace)
                written.append(path.name)
    except (KeyError, TypeError) as exc:
        raise UsageError(f"{args.scenario}: malformed scenario: {exc}") from exc
    manifest = _base_report("synth", [args.scenario], {"seed": args.seed})
    manifest["files"] = written
    write_json(out / "manifest.json", manifest)
    return EXIT_OK


# permittivity


def cmd_permittivity(args):
    cal = permittivity_from_plate(args.delay, args.depth)
    record = {
        "relative_permittivity": cal.relative_permittivity,
        "unphysical": cal.unphysical,
        "delay_s": args.delay,
        "depth_m": args.depth,
    }
    _emit_json(record, args.out)
    return EXIT_OK


# bscan-extract


def _load_bscan(perp_path, par_path):
    perp, meta_perp = read_bscan(perp_path)
    par, meta_par = read_bscan(par_path)
    if perp.shape != par.shape:
        raise UsageError("perpendicular and parallel B-scans differ in shape")
    for key in ("dt_s", "trace_spacing_m"):
        if not np.isclose(float(meta_perp[key]), float(meta_par[key]), rtol=1e-12):
            raise UsageError(f"B-scan sidecars disagree on {key}")
    spacing = float(meta_par["trace_spacing_m"])
    x0 = float(meta_par.get("x0_m", 0.0))
    bscan = BScan(par=par, perp=perp, positions=x0 + spacing * np.arange(par.shape[1]),
                  dt=float(meta_par["dt_s"]), t0=float(meta_par.get("t0_s", 0.0)))
    return bscan


def cmd_bscan_extract(args):
    bscan = _load_bscan(args.perp, args.par)
    try:
        columns = [int(c) for c in args.columns.split(",") if c.strip()]
    except ValueError as exc:
        raise UsageError(f"--columns: {exc}") from exc
    pairs = extract_bscan_pairs(bscan, args.background_column, columns)
    out = Path(args.out)
    entries = []
    for col, (perp, par) in zip(columns, pairs):
        names = {}
        for pol, trace in (("perp", perp), ("par", par)):
            path = out / f"{pol}_{col:04d}.txt"
            named = Trace(trace.samples, trace.dt, trace.t0, polarization=pol,
                          meta={"column": col, "position_m": float(bscan.positions[col]),
                                "background_subtracted": "true"})
            write_trace(path, named)
            names[pol] = path.name
        entries.append({"column": col, "position_m": float(bscan.positions[col]), **names})
    manifest = _base_report("bscan-extract", [args.perp, args.par],
                            {"background_column": args.background_column, "columns": columns})
    manifest["pairs"] = entries
    write_json(out / "manifest.json", manifest)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="rebar-gauge",
        description="Estimate buried bar diameters from dual-polarized GPR power ratios.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="estimate a diameter from a perp/par trace pair")
    p.add_argument("perp", help="perpendicular-polarization trace file")
    p.add_argument("par", help="parallel-polarization trace file")
    p.add_argument("--bg-perp", help="background trace for the perpendicular channel")
    p.add_argument("--bg-par", help="background trace for the parallel channel")
    er = p.add_mutually_exclusive_group(required=True)
    er.add_argument("--er", type=float, help="relative permittivity of the medium")
    er.add_argument("--plate", metavar="DT:D", help="plate echo delay (s) and plate depth (m)")
    er.add_argument("--calib-bar", metavar="D_MM:RATIO",
                    help="known bar diameter (mm) and its measured power ratio")
    p.add_argument("--band", metavar="LO:HI", help="frequency band in Hz")
    p.add_argument("--grid", metavar="LO:HI:STEP", help="diameter grid in mm")
    p.add_argument("--fc", type=float, help="centre frequency in Hz for gating and validity")
    p.add_argument("--depth", type=float, help="bar cover depth in m, for geometry warnings")
    p.add_argument("--out", help="report path (default: stdout)")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("curve", help="export a ratio-versus-diameter curve as CSV")
    p.add_argument("--trace", help="parallel-polarization trace file")
    p.add_argument("--spectrum", help="spectrum CSV (freq_hz,re,im)")
    p.add_argument("--er", type=float, required=True, help="relative permittivity")
    p.add_argument("--band", metavar="LO:HI", help="frequency band in Hz")
    p.add_argument("--grid", metavar="LO:HI:STEP", help="diameter grid in mm")
    p.add_argument("--fc", type=float, help="centre frequency in Hz")
    p.add_argument("--st", type=float, help="peak sample index (spectrum input only)")
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("synth", help="generate synthetic traces or B-scans from a scenario")
    p.add_argument("scenario", help="scenario JSON file")
    p.add_argument("--seed", type=int, default=0, help="noise seed")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("permittivity", help="permittivity from a metal-plate echo delay")
    p.add_argument("delay", type=float, help="two-way delay in s")
    p.add_argument("depth", type=float, help="plate depth in m")
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=cmd_permittivity)

    p = sub.add_parser("bscan-extract", help="background-subtracted trace pairs from B-scans")
    p.add_argument("perp", help="perpendicular B-scan CSV (sidecar .json alongside)")
    p.add_argument("par", help="parallel B-scan CSV (sidecar .json alongside)")
    p.add_argument("--background-column", type=int, required=True,
                   help="column index of the background trace")
    p.add_argument("--columns", required=True, help="comma-separated column indices of bars")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_bscan_extract)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OutOfRangeError, AmbiguityError) as exc:
        print(f"rebar-gauge: {exc}", file=sys.stderr)
        return EXIT_RANGE
    except (RebarGaugeError, OSError, ValueError) as exc:
        print(f"rebar-gauge: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
