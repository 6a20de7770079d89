"""
Cylindrical Bessel and Hankel functions of integer order and positive real argument.

All routines are vectorised over the argument and return every order from 0 up to
the requested one in a single pass, which is what the scattering series needs.

Evaluation scheme
-----------------
* ``x < 8``: ascending power series for every J_n, and for Y_0, Y_1.
* ``x >= 8``: Miller downward recurrence for J, normalised with
  ``J_0 + 2*sum(J_2k) = 1``; Y_0 and Y_1 from the Neumann expansions over the
  same J values.
* Y_n for n >= 2 by upward recurrence, which is stable for the second kind.
"""

import math
import os

import numpy as np

from .errors import DomainError

DEFAULT_MAX_ORDER = 64
MAX_ORDER_ENV = "REBAR_GAUGE_MAX_ORDER"

_SERIES_LIMIT = 8.0
_EULER_GAMMA = 0.57721566490153286061
_EPS = np.finfo(float).eps
_RESCALE = 1e250
_MILLER_FLOOR = DEFAULT_MAX_ORDER + 1


def max_order():
    """Order cap, taken from ``REBAR_GAUGE_MAX_ORDER`` when set."""
    raw = os.environ.get(MAX_ORDER_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_MAX_ORDER
    try:
        value = int(raw)
    except ValueError as exc:
        raise DomainError(f"{MAX_ORDER_ENV} must be an integer, got {raw!r}") from exc
    if value < 1:
        raise DomainError(f"{MAX_ORDER_ENV} must be >= 1, got {value}")
    return value


def _as_argument(x):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("argument must be finite")
    if np.any(arr <= 0.0):
        raise DomainError("argument must be strictly positive")
    return arr


def _check_order(n):
    if isinstance(n, bool) or int(n) != n:
        raise DomainError(f"order must be an integer, got {n!r}")
    n = int(n)
    cap = max_order()
    if n < 0 or n > cap:
        raise DomainError(f"order {n} outside [0, {cap}]")
    return n


def _j_series(nmax, x):
    out = np.empty((nmax + 1, x.size))
    half = 0.5 * x
    q = -half * half
    lead = np.ones_like(x)
    for n in range(nmax + 1):
        if n:
            lead = lead * half / n
        term = np.ones_like(x)
        total = np.ones_like(x)
        scale = np.ones_like(x)
        done = np.zeros(x.shape, dtype=bool)
        for k in range(1, 200):
            term = term * q / (k * (n + k))
            total = np.where(done, total, total + term)
            scale = np.maximum(scale, np.abs(total))
            done |= np.abs(term) <= _EPS * 0.1 * scale
            if np.all(done):
                break
        out[n] = lead * total
    return out


def _y01_series(x, j0, j1):
    half = 0.5 * x
    q = half * half
    log_half = np.log(half)

    # Y_0: sum_{k>=1} (-1)^(k+1) H_k q^k / (k!)^2
    term = np.ones_like(x)
    harmonic = 0.0
    acc0 = np.zeros_like(x)
    scale = np.ones_like(x)
    done = np.zeros(x.shape, dtype=bool)
    for k in range(1, 200):
        term = term * q / (k * k)
        harmonic += 1.0 / k
        acc0 = np.where(done, acc0, acc0 + (-1.0) ** (k + 1) * harmonic * term)
        scale = np.maximum(scale, np.abs(acc0))
        done |= harmonic * term <= _EPS * 0.1 * scale
        if np.all(done):
            break
    y0 = (2.0 / np.pi) * ((log_half + _EULER_GAMMA) * j0 + acc0)

    # Y_1: sum_{k>=0} (psi(k+1) + psi(k+2)) (-q)^k / (k! (k+1)!)
    term = np.ones_like(x)
    h_k, h_k1 = 0.0, 1.0
    acc1 = (h_k + h_k1 - 2.0 * _EULER_GAMMA) * term
    scale = np.maximum(np.ones_like(x), np.abs(acc1))
    done = np.zeros(x.shape, dtype=bool)
    for k in range(1, 200):
        term = term * (-q) / (k * (k + 1))
        h_k = h_k1
        h_k1 = h_k + 1.0 / (k + 1)
        contrib = (h_k + h_k1 - 2.0 * _EULER_GAMMA) * term
        acc1 = np.where(done, acc1, acc1 + contrib)
        scale = np.maximum(scale, np.abs(acc1))
        done |= np.abs(contrib) <= _EPS * 0.1 * scale
        if np.all(done):
            break
    y1 = -2.0 / (np.pi * x) + (2.0 / np.pi) * log_half * j1 - (half / np.pi) * acc1
    return y0, y1


def _miller_start(nmax, x):
    """
    Even starting order per argument. The floor keeps J values independent of
    ``nmax`` for every order the scattering series can ask for.
    """
    top = np.maximum(max(nmax, _MILLER_FLOOR), np.ceil(x)).astype(int)
    m = top + 40 + (2.0 * np.sqrt(x)).astype(int)
    return m + (m % 2)


def _j_miller(nmax, x):
    starts = _miller_start(nmax, x)
    m = int(starts.max())
    f = np.zeros((m + 2, x.size))
    f[starts, np.arange(x.size)] = 1.0
    for k in range(m, 0, -1):
        # columns whose start lies below k are still zero and stay zero
        f[k - 1] = np.where(k > starts, f[k - 1], (2.0 * k / x) * f[k] - f[k + 1])
        big = np.abs(f[k - 1]) > _RESCALE
        if np.any(big):
            f[k - 1 :, big] /= _RESCALE
    norm = f[0] + 2.0 * _ordered_sum(f[2 : m + 1 : 2])
    return f[: m + 1] / norm


def _ordered_sum(rows):
    """Sum over the first axis from the last row down, so trailing zero rows change nothing."""
    total = np.zeros(rows.shape[1:])
    for row in rows[::-1]:
        total = total + row
    return total


def _y01_neumann(x, j):
    log_term = np.log(0.5 * x) + _EULER_GAMMA
    m = j.shape[0] - 1
    ks = np.arange(1, (m - 1) // 2 + 1)
    signs = (-1.0) ** ks
    even = j[2 * ks]
    s0 = _ordered_sum((signs / ks)[:, None] * even)
    y0 = (2.0 / np.pi) * log_term * j[0] - (4.0 / np.pi) * s0
    diff = j[2 * ks - 1] - j[2 * ks + 1]
    s1 = _ordered_sum((signs / ks)[:, None] * diff)
    y1 = -(2.0 / np.pi) * j[0] / x + (2.0 / np.pi) * log_term * j[1] + (2.0 / np.pi) * s1
    return y0, y1


def cylinder_jy(nmax, x):
    """
    Bessel functions of both kinds for all orders ``0..nmax``.

    Parameters
    ----------
    nmax : int
        Highest order returned. Not bounded by :func:`max_order`; callers that
        expose an order to users enforce the cap themselves.
    x : array_like
        Strictly positive, finite arguments.

    Returns
    -------
    (J, Y) : tuple of ndarray
        Each of shape ``(nmax + 1,) + np.shape(x)``.
    """
    nmax = int(nmax)
    if nmax < 0:
        raise DomainError("nmax must be non-negative")
    arg = _as_argument(x)
    shape = arg.shape
    flat = arg.ravel()
    top = max(nmax, 1)
    jv = np.empty((top + 1, flat.size))
    yv = np.empty((top + 1, flat.size))

    small = flat < _SERIES_LIMIT
    if np.any(small):
        xs = flat[small]
        js = _j_series(top, xs)
        y0, y1 = _y01_series(xs, js[0], js[1])
        jv[:, small] = js
        yv[0, small], yv[1, small] = y0, y1
    large = ~small
    if np.any(large):
        xl = flat[large]
        jl = _j_miller(top, xl)
        y0, y1 = _y01_neumann(xl, jl)
        jv[:, large] = jl[: top + 1]
        yv[0, large], yv[1, large] = y0, y1

    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(1, top):
            yv[n + 1] = (2.0 * n / flat) * yv[n] - yv[n - 1]

    jv = jv[: nmax + 1].reshape((nmax + 1,) + shape)
    yv = yv[: nmax + 1].reshape((nmax + 1,) + shape)
    return jv, yv


def _finish(value, x):
    if np.ndim(x) == 0:
        return complex(value) if np.iscomplexobj(value) else float(value)
    return value


def bessel_j(n, x):
    """Bessel function of the first kind, J_n(x)."""
    n = _check_order(n)
    j, _ = cylinder_jy(n, x)
    return _finish(j[n], x)


def bessel_y(n, x):
    """Bessel function of the second kind, Y_n(x)."""
    n = _check_order(n)
    _, y = cylinder_jy(n, x)
    return _finish(y[n], x)


def hankel1(n, x):
    """Hankel function of the first kind, J_n(x) + i Y_n(x)."""
    n = _check_order(n)
    j, y = cylinder_jy(n, x)
    return _finish(j[n] + 1j * y[n], x)


def _derivative(f, n):
    if n == 0:
        return -f[1]
    return 0.5 * (f[n - 1] - f[n + 1])


def bessel_j_prime(n, x):
    """dJ_n/dx via ``(J_{n-1} - J_{n+1}) / 2`` and ``J_0' = -J_1``."""
    n = _check_order(n)
    j, _ = cylinder_jy(n + 1, x)
    return _finish(_derivative(j, n), x)


def bessel_y_prime(n, x):
    """dY_n/dx by the same recurrence as :func:`bessel_j_prime`."""
    n = _check_order(n)
    _, y = cylinder_jy(n + 1, x)
    return _finish(_derivative(y, n), x)


def hankel1_prime(n, x):
    """Derivative of the Hankel function of the first kind."""
    n = _check_order(n)
    j, y = cylinder_jy(n + 1, x)
    h = j + 1j * y
    return _finish(_derivative(h, n), x)
