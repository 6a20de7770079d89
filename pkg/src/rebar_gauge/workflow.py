"""
End-to-end diameter estimation from a perpendicular/parallel trace pair.

Steps: optional background subtraction, a time gate around the parallel echo,
the measured peak power ratio, a curve from the gated parallel spectrum, and
inversion of that curve.
"""

from dataclasses import dataclass, field

import numpy as np

from .curve import DEFAULT_START_MM, DEFAULT_STEP_MM, build_curve, default_diameters
from .estimator import estimate_diameter
from .errors import DomainError, GeometryMismatchError
from .sigproc import (
    auto_band,
    band_limit,
    forward_spectrum,
    gate_taper,
    gate_width,
    peak_frequency,
    peak_info,
    subtract_background,
    time_gate,
    wideband_power_ratio,
)


@dataclass(frozen=True)
class PreparedPair:
    perp: object
    par: object
    s_t: float
    gate_fc: float
    warnings: tuple = ()


@dataclass(frozen=True)
class Analysis:
    ratio: float
    s_t: float
    band: tuple
    fc: float
    curve: object
    estimate: object
    spectrum: object
    warnings: tuple = field(default_factory=tuple)


def prepare_pair(perp, par, background_perp=None, background_par=None, fc=None, gate=True,
                 band=None):
    """
    Background-subtract, gate around the parallel envelope peak, and
    optionally band-limit both traces.
    """
    notes = []
    done = all(str(t.meta.get("background_subtracted", "")).lower() == "true" for t in (perp, par))
    if background_par is None and background_perp is None and not done:
        notes.append("no background trace supplied; using raw traces")
    if background_perp is not None:
        perp = subtract_background(perp, background_perp)
    if background_par is not None:
        par = subtract_background(par, background_par)
    if not perp.same_grid(par):
        raise GeometryMismatchError("perpendicular and parallel traces differ in sampling")
    gate_fc = peak_frequency(par) if fc is None else float(fc)
    if gate:
        centre = peak_info(par, refine=False).index
        width = gate_width(gate_fc)
        taper = gate_taper(gate_fc)
        par = time_gate(par, centre, width, taper)
        perp = time_gate(perp, centre, width, taper)
    if band is not None:
        par = band_limit(par, band)
        perp = band_limit(perp, band)
    s_t = peak_info(par).refined_index
    return PreparedPair(perp=perp, par=par, s_t=s_t, gate_fc=gate_fc, warnings=tuple(notes))


def grid_from(spec):
    """``(lo, hi, step)`` in mm to an inclusive grid."""
    lo, hi, step = (float(v) for v in spec)
    if not (0.0 < lo <= hi and step > 0.0):
        raise DomainError(f"invalid diameter grid {lo}:{hi}:{step}")
    count = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(count)


def analyze(perp, par, medium, background_perp=None, background_par=None, band=None, fc=None,
            diameters_mm=None, gate=True):
    """
    Estimate the bar diameter from one trace pair.

    An explicit ``band`` is applied to the traces before the measured ratio is
    taken, so that measurement and curve see the same spectrum. ``band``
    defaults to the contiguous region above ``1e-4`` of the spectral
    peak. The curve centre frequency is ``fc`` when given, otherwise the band
    midpoint for an explicit band and the spectral peak for the automatic one.
    Estimation errors propagate; see :func:`~rebar_gauge.estimator.estimate_diameter`.
    """
    prep = prepare_pair(perp, par, background_perp, background_par, fc=fc, gate=gate, band=band)
    ratio = wideband_power_ratio(prep.perp, prep.par)
    if band is None:
        band = auto_band(forward_spectrum(prep.par))
        curve_fc = prep.gate_fc
    else:
        curve_fc = 0.5 * (band[0] + band[1]) if fc is None else float(fc)
    spectrum = forward_spectrum(prep.par, band)
    if diameters_mm is None:
        diameters_mm = default_diameters(curve_fc, medium, DEFAULT_START_MM, DEFAULT_STEP_MM)
    curve = build_curve(spectrum, prep.s_t, medium, diameters_mm, fc=curve_fc)
    estimate = estimate_diameter(ratio, curve)
    notes = list(prep.warnings)
    if not estimate.in_validity_range:
        notes.append(
            f"estimate {estimate.diameter_mm:.3f} mm is beyond the monotone range "
            f"({curve.validity_diameter_mm:.3f} mm)"
        )
    return Analysis(
        ratio=ratio,
        s_t=prep.s_t,
        band=spectrum.band,
        fc=curve_fc,
        curve=curve,
        estimate=estimate,
        spectrum=spectrum,
        warnings=tuple(notes),
    )


def extract_bscan_pairs(bscan, background_column, columns):
    """
    Background-subtracted ``(perp, par)`` traces at the marked ``columns``.

    The trace at ``background_column`` of each polarization is removed from
    every column of that polarization.
    """
    n_cols = bscan.par.shape[1]
    for c in (background_column, *columns):
        if not 0 <= c < n_cols:
            raise DomainError(f"column {c} outside the B-scan (0..{n_cols - 1})")
    pairs = []
    for c in columns:
        perp = subtract_background(bscan.column(c, "perp"), bscan.column(background_column, "perp"))
        par = subtract_background(bscan.column(c, "par"), bscan.column(background_column, "par"))
        pairs.append((perp, par))
    return pairs
