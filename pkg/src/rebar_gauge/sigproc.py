"""
A-scan processing: source pulses, spectra, analytic-signal envelope, peaks.

Time-domain traces are plain uniformly sampled real series. Spectra keep only
non-negative frequencies (``numpy.fft.rfft`` convention) restricted to a band,
and remember the DFT length of the trace they came from so that time indices of
that trace can be mapped onto frequency-domain phases.
"""

from dataclasses import dataclass, field, replace
import math

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import BandError, DegenerateSignalError, DomainError, GeometryMismatchError

MIN_TRACE_SAMPLES = 8
DEFAULT_NOISE_FLOOR = 1e-12
GATE_CYCLES = 3.0
GATE_TAPER_CYCLES = 0.5

# max |s (2 s^2 - 3) exp(-s^2)|, reached at s^2 = (3 - sqrt(6)) / 2
_S_EXT = math.sqrt((3.0 - math.sqrt(6.0)) / 2.0)
_DIPOLE_PEAK = abs(_S_EXT * (2.0 * _S_EXT**2 - 3.0) * math.exp(-(_S_EXT**2)))


@dataclass(frozen=True)
class Trace:
    """Uniformly sampled A-scan. Sample ``i`` sits at time ``t0 + i * dt``."""

    samples: np.ndarray
    dt: float
    t0: float = 0.0
    polarization: str | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        data = np.array(self.samples, dtype=float)
        if data.ndim != 1:
            raise DomainError("trace samples must be one-dimensional")
        if data.size < MIN_TRACE_SAMPLES:
            raise DomainError(f"trace needs at least {MIN_TRACE_SAMPLES} samples")
        if not np.all(np.isfinite(data)):
            raise DomainError("trace contains NaN or infinite samples")
        if not (math.isfinite(self.dt) and self.dt > 0.0):
            raise DomainError(f"dt must be positive, got {self.dt!r}")
        if not math.isfinite(self.t0):
            raise DomainError("t0 must be finite")
        data.setflags(write=False)
        object.__setattr__(self, "samples", data)

    def __len__(self):
        return self.samples.size

    @property
    def times(self):
        return self.t0 + self.dt * np.arange(self.samples.size)

    def with_samples(self, samples):
        return replace(self, samples=samples)

    def same_grid(self, other):
        return (
            len(self) == len(other)
            and math.isclose(self.dt, other.dt, rel_tol=1e-12)
            and math.isclose(self.t0, other.t0, rel_tol=1e-12, abs_tol=1e-12 * self.dt)
        )


@dataclass(frozen=True)
class Spectrum:
    """
    Complex spectrum samples at ``f_start + k * df`` for ``k = 0..N-1``.

    ``n_time`` is the DFT length of the originating trace. When it is ``None``
    (spectra measured directly in the frequency domain) the band itself is
    taken as the DFT, so ``N = len(bins)``.
    """

    bins: np.ndarray
    f_start: float
    df: float
    n_time: int | None = None

    def __post_init__(self):
        data = np.array(self.bins, dtype=complex).ravel()
        if data.size < 1:
            raise BandError("spectrum must hold at least one bin")
        if not np.all(np.isfinite(data)):
            raise DomainError("spectrum contains non-finite bins")
        if not (math.isfinite(self.df) and self.df > 0.0):
            raise DomainError("df must be positive")
        if not (math.isfinite(self.f_start) and self.f_start >= 0.0):
            raise DomainError("f_start must be non-negative")
        data.setflags(write=False)
        object.__setattr__(self, "bins", data)

    def __len__(self):
        return self.bins.size

    @property
    def frequencies(self):
        return self.f_start + self.df * np.arange(self.bins.size)

    @property
    def band(self):
        return (self.f_start, self.f_start + self.df * (self.bins.size - 1))

    @property
    def dft_length(self):
        return self.bins.size if self.n_time is None else int(self.n_time)

    def scaled(self, factor):
        return replace(self, bins=self.bins * factor)


@dataclass(frozen=True)
class PeakInfo:
    """
    Envelope maximum of a trace.

    ``index``/``amplitude`` are the sampled maximum (earliest on ties);
    ``refined_index``/``refined_amplitude`` locate the maximum of the
    band-limited envelope between samples.
    """

    index: int
    amplitude: float
    refined_index: float
    refined_amplitude: float
    time: float


def ricker(fc, dt, n, t_peak, t0=0.0):
    """Unit-peak Ricker (Mexican hat) pulse centred on ``t_peak``."""
    _check_pulse(fc, dt, n)
    tau = t0 + dt * np.arange(int(n)) - t_peak
    u = (np.pi * fc * tau) ** 2
    return Trace((1.0 - 2.0 * u) * np.exp(-u), dt=dt, t0=t0)


def dipole_pulse(fc, dt, n, t_peak, t0=0.0):
    """
    Time derivative of a Ricker pulse, scaled to unit peak magnitude.

    This is the far field radiated by a short dipole driven with a Ricker
    current, and the shape a point receiver sees. Its envelope peaks at
    ``t_peak``.
    """
    _check_pulse(fc, dt, n)
    s = np.pi * fc * (t0 + dt * np.arange(int(n)) - t_peak)
    return Trace(s * (2.0 * s * s - 3.0) * np.exp(-s * s) / _DIPOLE_PEAK, dt=dt, t0=t0)


def _check_pulse(fc, dt, n):
    if not (fc > 0.0 and dt > 0.0):
        raise DomainError("fc and dt must be positive")
    if dt >= 1.0 / (10.0 * fc):
        raise DomainError(f"dt={dt:g} s undersamples a {fc:g} Hz pulse (need dt < 1/(10 fc))")
    if int(n) < MIN_TRACE_SAMPLES:
        raise DomainError(f"need at least {MIN_TRACE_SAMPLES} samples")


def nyquist(trace):
    return 0.5 / trace.dt


def forward_spectrum(trace, band=None):
    """
    One-sided DFT of ``trace`` restricted to ``band = (f_lo, f_hi)`` in Hz.

    ``band=None`` keeps every bin from DC to Nyquist, which
    :func:`inverse_spectrum` can transform back.
    """
    n = len(trace)
    full = np.fft.rfft(trace.samples)
    df = 1.0 / (n * trace.dt)
    if band is None:
        return Spectrum(full, f_start=0.0, df=df, n_time=n)
    lo, hi = (float(v) for v in band)
    nyq = nyquist(trace)
    if not (0.0 <= lo <= hi):
        raise BandError(f"invalid band [{lo:g}, {hi:g}] Hz")
    if hi > nyq * (1.0 + 1e-12):
        raise BandError(f"band edge {hi:g} Hz exceeds Nyquist {nyq:g} Hz")
    k_lo = int(math.ceil(lo / df - 1e-9))
    k_hi = min(int(math.floor(hi / df + 1e-9)), full.size - 1)
    if k_hi < k_lo:
        raise BandError(f"no frequency bins inside [{lo:g}, {hi:g}] Hz")
    return Spectrum(full[k_lo : k_hi + 1], f_start=k_lo * df, df=df, n_time=n)


def inverse_spectrum(spectrum, dt, t0=0.0):
    """Rebuild the trace from a full-band spectrum made by :func:`forward_spectrum`."""
    n = spectrum.dft_length
    if spectrum.f_start != 0.0 or len(spectrum) != n // 2 + 1:
        raise BandError("inverse transform needs the unrestricted DC..Nyquist spectrum")
    return Trace(np.fft.irfft(spectrum.bins, n), dt=dt, t0=t0)


def spectral_energy(spectrum):
    """Two-sided ``sum |X_k|^2 / N`` of a full-band spectrum (Parseval partner)."""
    n = spectrum.dft_length
    power = np.abs(spectrum.bins) ** 2
    weight = np.full(power.size, 2.0)
    weight[0] = 1.0
    if n % 2 == 0:
        weight[-1] = 1.0
    return float(np.sum(weight * power) / n)


def _analytic_coefficients(samples):
    n = samples.size
    spec = np.fft.fft(samples)
    h = np.zeros(n)
    h[0] = 1.0
    if n % 2 == 0:
        h[n // 2] = 1.0
        h[1 : n // 2] = 2.0
    else:
        h[1 : (n + 1) // 2] = 2.0
    return spec * h


def analytic_signal(trace):
    """Analytic signal ``x + i H[x]`` of the trace samples."""
    return np.fft.ifft(_analytic_coefficients(trace.samples))


def envelope(trace):
    """Instantaneous amplitude ``|x + i H[x]|`` as a trace on the same grid."""
    return trace.with_samples(np.abs(analytic_signal(trace)))


def subtract_background(scan, background):
    if not scan.same_grid(background):
        raise GeometryMismatchError("scan and background are sampled on different grids")
    return scan.with_samples(scan.samples - background.samples)


def time_gate(trace, center_index, width, taper=0.0):
    """
    Keep samples within ``width / 2`` seconds of ``center_index``.

    With ``taper > 0`` the window falls to zero over a further ``taper``
    seconds on each side along a raised cosine instead of stepping.
    """
    offset = np.abs(np.arange(len(trace)) - center_index) * trace.dt
    edge = offset - 0.5 * width
    if taper > 0.0:
        ramp = 0.5 * (1.0 + np.cos(np.pi * np.clip(edge / taper, 0.0, 1.0)))
        weight = np.where(edge <= 0.0, 1.0, ramp)
    else:
        weight = (edge <= 0.0).astype(float)
    return trace.with_samples(trace.samples * weight)


def band_limit(trace, band):
    """Zero every DFT bin outside ``band`` and transform back."""
    spec = forward_spectrum(trace)
    lo, hi = (float(v) for v in band)
    if hi > nyquist(trace) * (1.0 + 1e-12) or not 0.0 <= lo <= hi:
        raise BandError(f"invalid band [{lo:g}, {hi:g}] Hz")
    f = spec.frequencies
    keep = (f >= lo - 1e-9 * spec.df) & (f <= hi + 1e-9 * spec.df)
    return trace.with_samples(np.fft.irfft(np.where(keep, spec.bins, 0.0), len(trace)))


def peak_frequency(trace):
    """Frequency of the largest one-sided spectral magnitude."""
    spec = forward_spectrum(trace)
    return float(spec.frequencies[int(np.argmax(np.abs(spec.bins)))])


def gate_width(fc):
    return GATE_CYCLES / fc


def gate_taper(fc):
    return GATE_TAPER_CYCLES / fc


def refine_peak(coefficients, n, s0, start=0):
    """
    Maximise ``|sum_k c_k exp(2j*pi*(start+k)*s/n)|`` for ``s`` within one sample of ``s0``.

    Returns ``(s, magnitude)``; ``magnitude`` carries no ``1/n`` factor.
    """
    c = np.asarray(coefficients, dtype=complex)
    k = start + np.arange(c.size)

    def magnitude(s):
        return abs(np.sum(c * np.exp(2j * np.pi * k * s / n)))

    lo, hi = s0 - 1.0, s0 + 1.0
    res = minimize_scalar(lambda s: -magnitude(s), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-7})
    best_s, best = float(res.x), magnitude(res.x)
    at_sample = magnitude(s0)
    if at_sample >= best:
        return float(s0), at_sample
    return best_s, best


def peak_info(trace, refine=True):
    """Envelope maximum; ties go to the earliest sample."""
    coeffs = _analytic_coefficients(trace.samples)
    env = np.abs(np.fft.ifft(coeffs))
    idx = int(np.argmax(env))
    amp = float(env[idx])
    r_idx, r_amp = float(idx), amp
    if refine and amp > 0.0:
        n = len(trace)
        half = coeffs[: n // 2 + 1]
        s, mag = refine_peak(half, n, float(idx))
        r_idx, r_amp = s, max(mag / n, amp)
    return PeakInfo(
        index=idx,
        amplitude=amp,
        refined_index=r_idx,
        refined_amplitude=r_amp,
        time=trace.t0 + idx * trace.dt,
    )


def wideband_power_ratio(trace_perp, trace_par, noise_floor=DEFAULT_NOISE_FLOOR, refine=True):
    """
    ``(A_perp_max / A_par_max) ** 2`` from each trace's own envelope peak.

    The parallel peak must exceed ``noise_floor`` times the larger full-scale
    amplitude of the two traces.
    """
    if not trace_perp.same_grid(trace_par):
        raise GeometryMismatchError("perpendicular and parallel traces differ in sampling")
    full_scale = max(np.max(np.abs(trace_perp.samples)), np.max(np.abs(trace_par.samples)))
    par = peak_info(trace_par, refine=refine)
    if par.amplitude <= noise_floor * full_scale or par.amplitude == 0.0:
        raise DegenerateSignalError("parallel-polarization peak is below the noise floor")
    perp = peak_info(trace_perp, refine=refine)
    if refine:
        return (perp.refined_amplitude / par.refined_amplitude) ** 2
    return (perp.amplitude / par.amplitude) ** 2


def auto_band(spectrum, floor=1e-4):
    """
    Contiguous band around the magnitude peak where ``|X| >= floor * max|X|``.

    DC is never included.
    """
    mag = np.abs(spectrum.bins)
    if not np.any(mag > 0.0):
        raise DegenerateSignalError("spectrum is identically zero")
    peak = int(np.argmax(mag))
    above = mag >= floor * mag[peak]
    lo = peak
    while lo > 0 and above[lo - 1]:
        lo -= 1
    hi = peak
    while hi < mag.size - 1 and above[hi + 1]:
        hi += 1
    freqs = spectrum.frequencies
    if freqs[lo] == 0.0:
        lo += 1
        if lo > hi:
            raise DegenerateSignalError("spectrum has energy only at DC")
    return float(freqs[lo]), float(freqs[hi])
