"""
Inversion of ratio-versus-diameter curves, and permittivity calibration.
"""

from dataclasses import dataclass
import functools
import math

import numpy as np

from . import SPEED_OF_LIGHT
from .curve import build_curve
from .errors import AmbiguityError, DomainError, OutOfRangeError
from .scattering import BarModel, MediumModel, power_ratio_single_freq, wavenumber, width_ratio

_BISECTION_STEPS = 200
_CALIBRATION_RANGE = (1.0, 20.0)


@dataclass(frozen=True)
class EstimateResult:
    diameter_mm: float
    ratio_used: float
    in_validity_range: bool
    curve_slope_at_estimate: float


@dataclass(frozen=True)
class PlateCalibration:
    relative_permittivity: float
    unphysical: bool


@dataclass(frozen=True)
class SensitivityRow:
    relative_permittivity: float
    diameter_mm: float
    percent_error: float


def _bracketing_segments(ratios, ratio):
    lo, hi = ratios[:-1], ratios[1:]
    return np.flatnonzero((np.minimum(lo, hi) <= ratio) & (ratio <= np.maximum(lo, hi)))


def _segment_search(ratios, ratio):
    """Bisection for ``i`` with ``ratios[i] <= ratio <= ratios[i+1]`` on a rising stretch."""
    lo, hi = 0, ratios.size - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ratios[mid] <= ratio:
            lo = mid
        else:
            hi = mid
    return lo


def estimate_diameter(ratio, curve):
    """
    Diameter whose curve ratio equals ``ratio``.

    Raises
    ------
    OutOfRangeError
        ``ratio`` outside ``[min, max]`` of the curve.
    AmbiguityError
        More than one curve segment brackets ``ratio``, or the one that does
        is not rising.
    """
    if not (math.isfinite(ratio) and ratio > 0.0):
        raise DomainError(f"ratio must be positive, got {ratio!r}")
    d = curve.diameters_mm
    r = curve.ratios
    if ratio < r.min() or ratio > r.max():
        raise OutOfRangeError(
            f"ratio {ratio:.6g} outside curve range [{r.min():.6g}, {r.max():.6g}]"
        )
    if d.size == 1:
        return EstimateResult(float(d[0]), float(ratio), _inside(d[0], curve), 0.0)

    segments = _bracketing_segments(r, ratio)
    # a ratio sitting exactly on a shared grid point brackets two adjacent segments
    if segments.size == 2 and segments[1] == segments[0] + 1 and r[segments[1]] == ratio:
        segments = segments[:1]
    if segments.size != 1:
        raise AmbiguityError(f"ratio {ratio:.6g} is reached on {segments.size} curve segments")
    i = int(segments[0])
    if not r[i + 1] > r[i]:
        raise AmbiguityError("curve is not increasing where it brackets the ratio")

    rising = np.ones(r.size, dtype=bool)
    rising[1:] = np.diff(r) > 0.0
    start = i
    while start > 0 and rising[start]:
        start -= 1
    stop = i + 1
    while stop + 1 < r.size and rising[stop + 1]:
        stop += 1
    j = start + _segment_search(r[start : stop + 1], ratio)

    slope = (r[j + 1] - r[j]) / (d[j + 1] - d[j])
    if r[j] == ratio:
        diameter = d[j]
    elif r[j + 1] == ratio:
        diameter = d[j + 1]
    else:
        diameter = d[j] + (ratio - r[j]) / slope
    return EstimateResult(
        diameter_mm=float(diameter),
        ratio_used=float(ratio),
        in_validity_range=_inside(diameter, curve),
        curve_slope_at_estimate=float(slope),
    )


def _inside(diameter_mm, curve):
    return bool(diameter_mm < curve.validity_diameter_mm)


def permittivity_from_plate(delay, depth):
    """``eps_r = (c * delay / (2 * depth)) ** 2`` from a metal-plate echo delay."""
    if not (math.isfinite(delay) and delay > 0.0):
        raise DomainError("plate delay must be positive")
    if not (math.isfinite(depth) and depth > 0.0):
        raise DomainError("plate depth must be positive")
    er = (SPEED_OF_LIGHT * delay / (2.0 * depth)) ** 2
    return PlateCalibration(relative_permittivity=er, unphysical=er < 1.0)


def sensitivity_sweep(ratio, spectrum_par, s_t, er_true, perturbations, diameters_mm=None, fc=None):
    """
    Re-estimate the diameter with ``eps_r = er_true * (1 + p)`` for each ``p``.

    Percent errors are signed and taken against the estimate at ``er_true``.
    """
    reference = _estimate_with(ratio, spectrum_par, s_t, er_true, diameters_mm, fc)
    rows = []
    for p in perturbations:
        er = er_true * (1.0 + float(p))
        if er < 1.0:
            raise DomainError(f"perturbed permittivity {er:.4g} is below 1")
        est = reference if p == 0 else _estimate_with(ratio, spectrum_par, s_t, er, diameters_mm, fc)
        err = 100.0 * (est.diameter_mm - reference.diameter_mm) / reference.diameter_mm
        rows.append(SensitivityRow(er, est.diameter_mm, err))
    return rows


def _estimate_with(ratio, spectrum_par, s_t, er, diameters_mm, fc):
    curve = build_curve(spectrum_par, s_t, MediumModel(er), diameters_mm, fc=fc)
    return estimate_diameter(ratio, curve)


def _first_peak_size(limit=12.0, step=0.01):
    """Size parameter of the first local maximum of the single-frequency ratio."""
    x = np.arange(step, limit, step)
    r = width_ratio(x)
    falls = np.flatnonzero(np.diff(r) <= 0.0)
    return float(x[falls[0]]) if falls.size else float(x[-1])


@functools.cache
def single_freq_monotone_limit():
    """Upper end (in ``beta * a``) of the rising low-frequency branch."""
    return _first_peak_size()


def estimate_diameter_single_freq(ratio, f_nominal, medium):
    """
    Invert the single-frequency ratio at ``f_nominal`` over the rising branch.

    This is the narrowband baseline: the whole pulse is treated as if it
    carried only its nominal frequency.
    """
    if not (math.isfinite(ratio) and ratio > 0.0):
        raise DomainError(f"ratio must be positive, got {ratio!r}")
    beta = wavenumber(f_nominal, medium)
    x_lo, x_hi = 1e-8, single_freq_monotone_limit()
    r_lo, r_hi = width_ratio(x_lo), width_ratio(x_hi)
    if ratio < r_lo or ratio > r_hi:
        raise OutOfRangeError(
            f"ratio {ratio:.6g} outside the single-frequency range [{r_lo:.3g}, {r_hi:.6g}]"
        )
    lo, hi = x_lo, x_hi
    for _ in range(_BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if width_ratio(mid) < ratio:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    radius = x / beta
    h = 1e-6 * x
    slope_x = (width_ratio(x + h) - width_ratio(x - h)) / (2.0 * h)
    return EstimateResult(
        diameter_mm=2e3 * radius,
        ratio_used=float(ratio),
        in_validity_range=True,
        curve_slope_at_estimate=float(slope_x * beta / 2e3),
    )


def single_freq_ratio(diameter_mm, f, medium):
    return power_ratio_single_freq(BarModel.from_diameter_mm(diameter_mm), medium, f)


def calibrate_permittivity(d_known_mm, ratio, spectrum_par, s_t, fc=None,
                           er_range=_CALIBRATION_RANGE, tol=1e-6):
    """
    Permittivity whose curve maps ``ratio`` to the known bar diameter.

    Relies on the curve ratio at a fixed diameter rising with ``eps_r``, which
    makes the estimated diameter fall as ``eps_r`` rises.
    """
    lo, hi = (float(v) for v in er_range)

    def model_ratio(er):
        c = build_curve(spectrum_par, s_t, MediumModel(er), [d_known_mm], fc=fc)
        return float(c.ratios[0])

    f_lo, f_hi = model_ratio(lo) - ratio, model_ratio(hi) - ratio
    if f_lo > 0.0 or f_hi < 0.0:
        raise OutOfRangeError(
            f"no permittivity in [{lo:g}, {hi:g}] maps ratio {ratio:.6g} to {d_known_mm:g} mm"
        )
    while hi - lo > tol * lo:
        mid = 0.5 * (lo + hi)
        if model_ratio(mid) < ratio:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
