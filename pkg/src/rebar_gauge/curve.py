"""
Theoretical wideband power ratio as a function of bar diameter.

For a parallel-polarization spectrum ``X_k`` and the time sample ``s`` of the
envelope maximum, the perpendicular spectrum is ``X_k * sqrt(sigma_perp/sigma_par)``
bin by bin, so the ratio of envelope peaks is::

    R(d) = (|sum_k X_k w_k(d) e^{j 2 pi s k / N}| / |sum_k X_k e^{j 2 pi s k / N}|) ** 2

with ``w_k(d) = sqrt(sigma_perp / sigma_par)`` at ``f_k``. ``k`` counts the
retained bins from zero; the common phase of the band offset drops out of both
magnitudes. ``N`` is the DFT length of the source trace, or the retained bin
count for spectra measured directly in the frequency domain.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import DegenerateSignalError, DomainError, GeometryMismatchError
from .scattering import wavenumber, width_ratio
from .sigproc import refine_peak

DEFAULT_STEP_MM = 0.1
DEFAULT_START_MM = 1.0
_SIGNIFICANT_BIN = 1e-9


@dataclass(frozen=True)
class TheoreticalCurve:
    diameters_mm: np.ndarray
    ratios: np.ndarray
    medium: object
    band: tuple
    s_t: float | None
    fc: float

    def __post_init__(self):
        d = np.array(self.diameters_mm, dtype=float)
        r = np.array(self.ratios, dtype=float)
        if d.shape != r.shape or d.ndim != 1 or d.size == 0:
            raise DomainError("diameters and ratios must be equal-length 1-D arrays")
        if d.size > 1 and np.any(np.diff(d) <= 0.0):
            raise DomainError("diameters must be strictly increasing")
        if np.any(~np.isfinite(r)) or np.any(r <= 0.0):
            raise DomainError("curve ratios must be finite and positive")
        d.setflags(write=False)
        r.setflags(write=False)
        object.__setattr__(self, "diameters_mm", d)
        object.__setattr__(self, "ratios", r)

    def __len__(self):
        return self.diameters_mm.size

    @property
    def points(self):
        return list(zip(self.diameters_mm.tolist(), self.ratios.tolist()))

    @property
    def validity_diameter_mm(self):
        return 2.0 * validity_radius(self.fc, self.medium)

    def monotone_within_validity(self):
        inside = self.diameters_mm < self.validity_diameter_mm
        r = self.ratios[inside]
        return bool(r.size < 2 or np.all(np.diff(r) > 0.0))

    def to_csv(self):
        lines = ["diameter_mm,ratio"]
        lines += [f"{d:.6f},{r:.17g}" for d, r in self.points]
        return "\n".join(lines) + "\n"


def validity_radius(fc, medium):
    """Largest radius (mm) with a monotone curve: ``30 / (fc[GHz] * sqrt(eps_r))``."""
    if not fc > 0.0:
        raise DomainError("fc must be positive")
    return 30.0 / (fc * 1e-9 * medium.refractive_index)


def default_diameters(fc, medium, start_mm=DEFAULT_START_MM, step_mm=DEFAULT_STEP_MM):
    """Grid from ``start_mm`` up to (not including) the validity diameter."""
    top = 2.0 * validity_radius(fc, medium)
    count = int(math.floor((top - start_mm) / step_mm - 1e-9)) + 1
    if count < 1:
        raise DomainError(f"validity diameter {top:.3g} mm is below the grid start")
    return start_mm + step_mm * np.arange(count)


def _check_spectrum(spectrum):
    mag = np.abs(spectrum.bins)
    peak = float(mag.max())
    if peak == 0.0:
        raise DegenerateSignalError("parallel spectrum is identically zero")
    if len(spectrum) > 1 and np.count_nonzero(mag > _SIGNIFICANT_BIN * peak) < 2:
        raise DegenerateSignalError("parallel spectrum has fewer than two significant bins")


def band_peak_index(spectrum):
    """Time sample (fractional) of the maximum of ``|sum_k X_k e^{j 2 pi s k / N}|``."""
    _check_spectrum(spectrum)
    n = spectrum.dft_length
    s = np.arange(n)
    amps = np.abs(np.exp(2j * np.pi * np.outer(s, np.arange(len(spectrum))) / n) @ spectrum.bins)
    s0 = int(np.argmax(amps))
    best, _ = refine_peak(spectrum.bins, n, float(s0))
    return best


def build_curve(spectrum_par, s_t, medium, diameters_mm=None, fc=None):
    """
    Theoretical ratio-versus-diameter curve for one parallel spectrum.

    Parameters
    ----------
    spectrum_par : Spectrum
        Band-limited spectrum of the bar echo in parallel polarization.
    s_t : float
        Time sample of the envelope maximum on the source trace grid
        (fractional values are fine).
    medium : MediumModel
    diameters_mm : array_like, optional
        Strictly increasing grid; defaults to :func:`default_diameters`.
    fc : float, optional
        Centre frequency for the validity bound; defaults to the band midpoint.
    """
    _check_spectrum(spectrum_par)
    lo, hi = spectrum_par.band
    if fc is None:
        fc = 0.5 * (lo + hi)
    if diameters_mm is None:
        diameters_mm = default_diameters(fc, medium)
    d = np.atleast_1d(np.asarray(diameters_mm, dtype=float))
    if np.any(~np.isfinite(d)) or np.any(d <= 0.0):
        raise DomainError("diameters must be positive")

    x_k = spectrum_par.bins
    n = spectrum_par.dft_length
    phase = np.exp(2j * np.pi * float(s_t) * np.arange(len(spectrum_par)) / n)
    xp = x_k * phase
    denominator = abs(np.sum(xp))
    if denominator <= 1e-12 * np.sum(np.abs(x_k)):
        raise DegenerateSignalError("parallel spectrum sums to zero at the peak sample")

    freqs = spectrum_par.frequencies
    positive = freqs > 0.0
    weights = np.zeros((d.size, freqs.size))
    if np.any(positive):
        beta = wavenumber(freqs[positive], medium)
        size = np.outer(d * 0.5e-3, beta)
        weights[:, positive] = np.sqrt(width_ratio(size.ravel())).reshape(size.shape)
    # per-row reduction keeps each diameter independent of the rest of the grid
    numerator = np.abs(np.sum(weights * xp, axis=1))
    ratios = (numerator / denominator) ** 2
    return TheoreticalCurve(
        diameters_mm=d,
        ratios=ratios,
        medium=medium,
        band=(float(lo), float(hi)),
        s_t=float(s_t),
        fc=float(fc),
    )


def averaged_curve(curves):
    """Pointwise mean of curves sharing grid, medium and band."""
    curves = list(curves)
    if not curves:
        raise DomainError("need at least one curve")
    first = curves[0]
    for other in curves[1:]:
        if other.diameters_mm.shape != first.diameters_mm.shape or not np.allclose(
            other.diameters_mm, first.diameters_mm, rtol=1e-12, atol=0.0
        ):
            raise GeometryMismatchError("curves use different diameter grids")
        if other.medium != first.medium:
            raise GeometryMismatchError("curves use different media")
        if not np.allclose(other.band, first.band, rtol=1e-12, atol=0.0):
            raise GeometryMismatchError("curves use different bands")
    if len(curves) == 1:
        return first
    s_values = {c.s_t for c in curves}
    return TheoreticalCurve(
        diameters_mm=first.diameters_mm,
        ratios=np.mean([c.ratios for c in curves], axis=0),
        medium=first.medium,
        band=first.band,
        s_t=s_values.pop() if len(s_values) == 1 else None,
        fc=float(np.mean([c.fc for c in curves])),
    )
