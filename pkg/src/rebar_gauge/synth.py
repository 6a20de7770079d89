"""
Synthetic dual-polarized A-scans and B-scans above a buried bar.

The parallel echo is the source pulse delayed by the two-way travel time and
scaled by ``1 / range**2``. The perpendicular echo is made in the frequency
domain by weighting every bin of the parallel echo with
``sqrt(sigma_perp / sigma_par)`` at that frequency. There is no near-field
physics, antenna pattern or loss, so ratios do not depend on depth.
"""

from dataclasses import dataclass, field, replace
import math

import numpy as np

from . import SPEED_OF_LIGHT
from .errors import DomainError, WindowOverflowError
from .scattering import BarModel, MediumModel, wavenumber, width_ratio
from .sigproc import Trace, dipole_pulse, ricker

SOURCES = {"dipole": dipole_pulse, "ricker": ricker}
# beyond this many periods from its centre the pulse is below 1e-8 of its peak
_SUPPORT_PERIODS = 1.5


@dataclass(frozen=True)
class SynthScenario:
    """
    One bar under a monostatic dual-polarized antenna.

    ``source`` is ``"dipole"`` (time derivative of a Ricker pulse, the field
    radiated by a short dipole fed with a Ricker current) or ``"ricker"``.
    ``t_peak`` is the time of the source pulse centre and defaults to
    ``1.5 / fc``. ``coupling`` scales the direct antenna-to-antenna pulse in the
    background trace.
    """

    bar: BarModel
    medium: MediumModel
    depth: float
    fc: float = 1e9
    dt: float = 1e-11
    n_samples: int = 2048
    amplitude: float = 1.0
    noise_rms: float = 0.0
    source: str = "dipole"
    t_peak: float | None = None
    t0: float = 0.0
    coupling: float = 0.5

    def __post_init__(self):
        if not (math.isfinite(self.depth) and self.depth > 0.0):
            raise DomainError("depth must be positive")
        if not self.noise_rms >= 0.0:
            raise DomainError("noise_rms must be non-negative")
        if self.source not in SOURCES:
            raise DomainError(f"unknown source {self.source!r}; choose from {sorted(SOURCES)}")
        if self.t_peak is None:
            object.__setattr__(self, "t_peak", 1.5 / self.fc)

    @property
    def delay(self):
        """Two-way travel time to the bar top, seconds."""
        return travel_time(self.depth, self.medium)

    def pulse(self, t_centre):
        return SOURCES[self.source](self.fc, self.dt, self.n_samples, t_centre, self.t0)

    def to_record(self):
        return {
            "diameter_mm": self.bar.diameter_mm,
            "relative_permittivity": self.medium.relative_permittivity,
            "depth_m": self.depth,
            "fc_hz": self.fc,
            "dt_s": self.dt,
            "n_samples": self.n_samples,
            "amplitude": self.amplitude,
            "noise_rms": self.noise_rms,
            "source": self.source,
            "t_peak_s": self.t_peak,
            "t0_s": self.t0,
            "coupling": self.coupling,
        }

    @classmethod
    def from_record(cls, record):
        rec = dict(record)
        kwargs = dict(
            bar=BarModel.from_diameter_mm(float(rec.pop("diameter_mm"))),
            medium=MediumModel(float(rec.pop("relative_permittivity", 1.0))),
            depth=float(rec.pop("depth_m")),
        )
        names = {
            "fc_hz": "fc", "dt_s": "dt", "n_samples": "n_samples", "amplitude": "amplitude",
            "noise_rms": "noise_rms", "source": "source", "t_peak_s": "t_peak", "t0_s": "t0",
            "coupling": "coupling",
        }
        for key, value in rec.items():
            if key not in names:
                raise DomainError(f"unknown scenario field {key!r}")
            kwargs[names[key]] = value
        if "n_samples" in kwargs:
            kwargs["n_samples"] = int(kwargs["n_samples"])
        return cls(**kwargs)


@dataclass(frozen=True)
class BScan:
    """Columns are traces at ``positions``; rows are time samples."""

    par: np.ndarray
    perp: np.ndarray
    positions: np.ndarray
    dt: float
    t0: float = 0.0
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def spacing(self):
        return float(self.positions[1] - self.positions[0]) if self.positions.size > 1 else 0.0

    def column(self, index, polarization):
        data = self.par if polarization == "par" else self.perp
        return Trace(data[:, index], dt=self.dt, t0=self.t0, polarization=polarization)


def travel_time(distance, medium):
    return 2.0 * distance * medium.refractive_index / SPEED_OF_LIGHT


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _check_window(scenario, t_centre):
    half = _SUPPORT_PERIODS / scenario.fc
    t_end = scenario.t0 + (scenario.n_samples - 1) * scenario.dt
    if t_centre - half < scenario.t0 or t_centre + half > t_end:
        raise WindowOverflowError(
            f"echo centred at {t_centre:.4g} s does not fit in [{scenario.t0:.4g}, {t_end:.4g}] s"
        )


def perpendicular_weights(freqs, bar, medium):
    """``sqrt(sigma_perp / sigma_par)`` per frequency; zero at DC."""
    w = np.zeros(freqs.size)
    pos = freqs > 0.0
    if np.any(pos):
        w[pos] = np.sqrt(width_ratio(wavenumber(freqs[pos], medium) * bar.radius))
    return w


def _perpendicular_from(par, bar, medium, dt):
    n = par.size
    spec = np.fft.rfft(par)
    weights = perpendicular_weights(np.fft.rfftfreq(n, dt), bar, medium)
    return np.fft.irfft(spec * weights, n)


def echo_pair(scenario, distance=None):
    """Noise-free ``(par, perp)`` sample arrays of the bar echo at slant ``distance``."""
    r = scenario.depth if distance is None else float(distance)
    t_centre = scenario.t_peak + travel_time(r, scenario.medium)
    _check_window(scenario, t_centre)
    par = scenario.pulse(t_centre).samples * (scenario.amplitude / r**2)
    perp = _perpendicular_from(par, scenario.bar, scenario.medium, scenario.dt)
    return par, perp


def _wrap(samples, scenario, polarization, seed=None):
    meta = {} if seed is None else {"seed": seed}
    return Trace(samples, dt=scenario.dt, t0=scenario.t0, polarization=polarization, meta=meta)


def generate_pair(scenario, seed=None):
    """
    Background-free echoes of the bar in both polarizations.

    Returns ``(trace_par, trace_perp)``. White Gaussian noise of standard
    deviation ``noise_rms`` is added independently to each trace.
    """
    par, perp = echo_pair(scenario)
    if scenario.noise_rms > 0.0:
        rng = _rng(seed)
        par = par + rng.normal(0.0, scenario.noise_rms, par.size)
        perp = perp + rng.normal(0.0, scenario.noise_rms, perp.size)
    return _wrap(par, scenario, "par", seed), _wrap(perp, scenario, "perp", seed)


def generate_background(scenario, seed=None, polarization=None):
    """Direct-coupling pulse at ``t_peak``, plus noise, with no bar echo."""
    _check_window(scenario, scenario.t_peak)
    samples = scenario.coupling * scenario.amplitude * scenario.pulse(scenario.t_peak).samples
    if scenario.noise_rms > 0.0:
        samples = samples + _rng(seed).normal(0.0, scenario.noise_rms, samples.size)
    return _wrap(samples, scenario, polarization, seed)


def generate_scan(scenario, seed=None):
    """
    Raw scans (echo plus direct coupling) and one background per polarization.

    Returns ``(scan_par, scan_perp, background_par, background_perp)``.
    """
    rng = _rng(seed)
    quiet = replace(scenario, noise_rms=0.0)
    par, perp = echo_pair(quiet)
    coupling = generate_background(quiet).samples
    traces = [par + coupling, perp + coupling, coupling.copy(), coupling.copy()]
    if scenario.noise_rms > 0.0:
        traces = [t + rng.normal(0.0, scenario.noise_rms, t.size) for t in traces]
    tags = ("par", "perp", "par", "perp")
    return tuple(_wrap(t, scenario, tag, seed) for t, tag in zip(traces, tags))


@dataclass(frozen=True)
class BuriedBar:
    bar: BarModel
    position: float
    depth: float


def generate_bscan(bars, medium, positions, fc=1e9, dt=1e-11, n_samples=2048,
                   amplitude=1.0, noise_rms=0.0, source="dipole", coupling=0.5, seed=None):
    """
    Dual-polarized B-scan over parallel bars lying across the scan line.

    Every bar contributes an echo at its slant range from each antenna
    position, so the usual hyperbolas appear; the direct-coupling pulse is
    present in every column.
    """
    positions = np.asarray(positions, dtype=float)
    if positions.ndim != 1 or positions.size < 1:
        raise DomainError("positions must be a non-empty 1-D sequence")
    par = np.zeros((n_samples, positions.size))
    perp = np.zeros_like(par)
    base = None
    for item in bars:
        scenario = SynthScenario(
            bar=item.bar, medium=medium, depth=item.depth, fc=fc, dt=dt,
            n_samples=n_samples, amplitude=amplitude, source=source, coupling=coupling,
        )
        if base is None:
            base = generate_background(scenario).samples
        for col, x in enumerate(positions):
            a, b = echo_pair(scenario, math.hypot(x - item.position, item.depth))
            par[:, col] += a
            perp[:, col] += b
    if base is not None:
        par += base[:, None]
        perp += base[:, None]
    if noise_rms > 0.0:
        rng = _rng(seed)
        par = par + rng.normal(0.0, noise_rms, par.shape)
        perp = perp + rng.normal(0.0, noise_rms, perp.shape)
    meta = {"source": source, "fc_hz": fc}
    if seed is not None:
        meta["seed"] = seed
    return BScan(par=par, perp=perp, positions=positions, dt=dt, meta=meta)
