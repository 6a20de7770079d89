"""
Backscattering widths of an infinite perfectly conducting circular cylinder.

The widths for the two linear polarizations are modal series in the size
parameter ``x = beta * a``::

    sigma_perp = (4/beta) |sum_n (-1)^(n+1) zeta_n J_n'(x) / H_n^(1)'(x)|^2
    sigma_par  = (4/beta) |sum_n (-1)^(n+1) zeta_n J_n(x)  / H_n^(1)(x)|^2

with ``zeta_0 = 1`` and ``zeta_n = 2`` otherwise. Their ratio depends on ``x``
alone, which is what the power-ratio curves are built from.
"""

from dataclasses import dataclass
import math

import numpy as np

from . import SPEED_OF_LIGHT
from .errors import ConvergenceError, DomainError
from .specfun import cylinder_jy, max_order

TRUNCATION_MARGIN = 15
TRUNCATION_RTOL = 1e-12
_LOOKAHEAD = 10


@dataclass(frozen=True)
class BarModel:
    """Perfectly conducting bar of circular cross-section; ``radius`` in meters."""

    radius: float

    def __post_init__(self):
        if not math.isfinite(self.radius) or self.radius <= 0.0:
            raise DomainError(f"bar radius must be positive, got {self.radius!r}")

    @classmethod
    def from_diameter_mm(cls, diameter_mm):
        return cls(radius=float(diameter_mm) * 0.5e-3)

    @property
    def diameter_mm(self):
        return self.radius * 2e3


@dataclass(frozen=True)
class MediumModel:
    """Lossless homogeneous half-space."""

    relative_permittivity: float = 1.0

    def __post_init__(self):
        er = self.relative_permittivity
        if not math.isfinite(er) or er < 1.0:
            raise DomainError(f"relative permittivity must be >= 1, got {er!r}")

    @property
    def refractive_index(self):
        return math.sqrt(self.relative_permittivity)

    @property
    def velocity(self):
        """Wave speed in the medium, m/s."""
        return SPEED_OF_LIGHT / self.refractive_index


@dataclass(frozen=True)
class ScatteringWidthPair:
    sigma_perp: float
    sigma_par: float
    frequency: float

    @property
    def ratio(self):
        return self.sigma_perp / self.sigma_par


def wavenumber(f, medium):
    """Wavenumber ``2*pi*f*sqrt(eps_r)/c`` in rad/m; ``f`` may be an array."""
    freq = np.asarray(f, dtype=float)
    if not np.all(np.isfinite(freq)) or np.any(freq <= 0.0):
        raise DomainError("frequency must be positive")
    beta = 2.0 * np.pi * freq * medium.refractive_index / SPEED_OF_LIGHT
    return float(beta) if beta.ndim == 0 else beta


def _over_first_kind_hankel(jv, yv):
    """``jv / (jv + i*yv)``, robust to overflowed ``yv`` and underflowed ``jv``."""
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        j_big = np.abs(jv) >= np.abs(yv)
        p = yv / np.where(j_big, jv, 1.0)
        q = jv / np.where(j_big, 1.0, yv)
        out = np.where(j_big, 1.0 / (1.0 + 1j * p), q / (q + 1j))
    return out


def _mode_terms(nmax, x):
    """Per-order terms of both series, shape ``(nmax + 1,) + x.shape``."""
    j, y = cylinder_jy(nmax + 1, x)
    jp = np.empty_like(j[: nmax + 1])
    yp = np.empty_like(jp)
    jp[0], yp[0] = -j[1], -y[1]
    jp[1:] = 0.5 * (j[: nmax] - j[2 : nmax + 2])
    with np.errstate(over="ignore", invalid="ignore"):
        yp[1:] = 0.5 * (y[: nmax] - y[2 : nmax + 2])
    yp = np.where(np.isnan(yp), -np.inf, yp)

    n = np.arange(nmax + 1).reshape((-1,) + (1,) * np.ndim(x))
    weight = np.where(n == 0, 1.0, 2.0) * np.where(n % 2 == 0, -1.0, 1.0)
    par = weight * _over_first_kind_hankel(j[: nmax + 1], y[: nmax + 1])
    perp = weight * _over_first_kind_hankel(jp, yp)
    return perp, par


def series_sums(x, n_terms=None):
    """
    Modal sums for the perpendicular and parallel widths.

    Parameters
    ----------
    x : array_like
        Size parameter ``beta * a`` (> 0).
    n_terms : int, optional
        Sum orders ``0..n_terms`` exactly, bypassing the truncation rule.

    Returns
    -------
    (s_perp, s_par) : complex ndarrays shaped like ``x``

    Notes
    -----
    Without ``n_terms`` the series run to at least ``ceil(x) + 15`` and then on
    until the newest term is below ``1e-12`` of the partial sum in both series,
    capped at :func:`~rebar_gauge.specfun.max_order`.
    """
    arg = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arg)) or np.any(arg <= 0.0):
        raise DomainError("size parameter must be positive")
    if n_terms is not None:
        perp, par = _mode_terms(int(n_terms), arg)
        return perp.sum(axis=0), par.sum(axis=0)

    cap = max_order()
    start = np.ceil(arg).astype(int) + TRUNCATION_MARGIN
    if np.any(start > cap):
        raise ConvergenceError(
            f"size parameter {float(arg.max()):.3g} needs more than {cap} orders"
        )
    nmax = min(cap, int(start.max()) + _LOOKAHEAD)
    perp, par = _mode_terms(nmax, arg)
    cum_perp = np.cumsum(perp, axis=0)
    cum_par = np.cumsum(par, axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        settled = (np.abs(perp) <= TRUNCATION_RTOL * np.abs(cum_perp)) & (
            np.abs(par) <= TRUNCATION_RTOL * np.abs(cum_par)
        )
    orders = np.arange(nmax + 1).reshape((-1,) + (1,) * arg.ndim)
    settled &= orders >= start
    if not np.all(settled.any(axis=0)):
        raise ConvergenceError(f"scattering series not converged within {nmax} orders")
    stop = np.argmax(settled, axis=0)
    index = stop[np.newaxis]
    s_perp = np.take_along_axis(cum_perp, index, axis=0)[0]
    s_par = np.take_along_axis(cum_par, index, axis=0)[0]
    if not (np.all(np.isfinite(s_perp)) and np.all(np.isfinite(s_par))):
        raise ConvergenceError("non-finite scattering series")
    return s_perp, s_par


def _power(z):
    # re^2 + im^2 rather than abs()**2: numpy's vectorised hypot can differ from
    # the scalar path in the last bit
    return z.real * z.real + z.imag * z.imag


def width_ratio(x):
    """``sigma_perp / sigma_par`` as a function of the size parameter alone."""
    s_perp, s_par = series_sums(x)
    ratio = _power(s_perp) / _power(s_par)
    return float(ratio) if np.ndim(ratio) == 0 else ratio


def scattering_widths(bar, medium, f):
    """Scattering widths (meters) of ``bar`` in ``medium`` at frequency ``f`` Hz."""
    beta = wavenumber(f, medium)
    s_perp, s_par = series_sums(beta * bar.radius)
    return ScatteringWidthPair(
        sigma_perp=float(4.0 / beta * _power(s_perp)),
        sigma_par=float(4.0 / beta * _power(s_par)),
        frequency=float(f),
    )


def power_ratio_single_freq(bar, medium, f):
    """Received power ratio ``P_perp / P_par`` at one frequency."""
    return scattering_widths(bar, medium, f).ratio
