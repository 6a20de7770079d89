"""
Basis changes of monostatic 2x2 scattering matrices.

Element layout per basis (rows index the receive polarization)::

    linear    [[HH, HV], [VH, VV]]
    circular  [[LL, RL], [LR, RR]]
    bar       [[par, par_perp], [perp_par, perp]]

An ``exp(+j omega t)`` time dependence is assumed throughout.
"""

from dataclasses import dataclass
import json
import math

import numpy as np

from .errors import BasisError, DomainError, TraceFormatError

LINEAR = "linear"
CIRCULAR = "circular"
BAR = "bar"
BASES = (LINEAR, CIRCULAR, BAR)

_A = np.array([[1.0, 1.0], [-1j, 1j]])
_B = np.array([[1.0, -1j], [1.0, 1j]])
_A_INV = np.linalg.inv(_A)
_B_INV = np.linalg.inv(_B)
# the product A M B comes out ordered [[VV, HV], [VH, HH]]
_SWAP = np.array([[0.0, 1.0], [1.0, 0.0]])


@dataclass(frozen=True)
class ScatteringMatrix2x2:
    elements: np.ndarray
    basis: str

    def __post_init__(self):
        m = np.array(self.elements, dtype=complex)
        if m.shape != (2, 2):
            raise DomainError("scattering matrix must be 2x2")
        if not np.all(np.isfinite(m)):
            raise DomainError("scattering matrix entries must be finite")
        if self.basis not in BASES:
            raise BasisError(f"unknown basis {self.basis!r}; expected one of {BASES}")
        m.setflags(write=False)
        object.__setattr__(self, "elements", m)

    def is_reciprocal(self, tol=1e-9):
        """Off-diagonal symmetry check, relative to the largest entry."""
        m = self.elements
        scale = max(float(np.max(np.abs(m))), np.finfo(float).tiny)
        return bool(abs(m[0, 1] - m[1, 0]) <= tol * scale)

    def frobenius_norm(self):
        return float(np.linalg.norm(self.elements))

    @property
    def par(self):
        self._require(BAR)
        return complex(self.elements[0, 0])

    @property
    def perp(self):
        self._require(BAR)
        return complex(self.elements[1, 1])

    def power_ratio(self):
        """``|S_perp|^2 / |S_par|^2`` of a bar-aligned matrix."""
        if self.par == 0:
            raise DomainError("parallel element is zero")
        return abs(self.perp) ** 2 / abs(self.par) ** 2

    def _require(self, basis):
        if self.basis != basis:
            raise BasisError(f"expected a {basis} basis matrix, got {self.basis}")

    def to_record(self):
        return {
            "basis": self.basis,
            "elements": [[[z.real, z.imag] for z in row] for row in self.elements.tolist()],
        }

    @classmethod
    def from_record(cls, record):
        try:
            rows = record["elements"]
            data = [[complex(float(re), float(im)) for re, im in row] for row in rows]
            return cls(np.array(data), record["basis"])
        except (KeyError, TypeError, ValueError) as exc:
            raise TraceFormatError(f"malformed scattering matrix record: {exc}") from exc

    def to_json(self):
        return json.dumps(self.to_record())

    @classmethod
    def from_json(cls, text):
        try:
            record = json.loads(text)
        except json.JSONDecodeError as exc:
            raise TraceFormatError(f"invalid JSON: {exc}") from exc
        return cls.from_record(record)


@dataclass(frozen=True)
class OrientationAngle:
    """Bar orientation in radians, folded into ``[0, pi)``."""

    theta: float

    def __post_init__(self):
        if not math.isfinite(self.theta):
            raise DomainError("orientation angle must be finite")
        t = math.fmod(self.theta, math.pi)
        if t < 0.0:
            t += math.pi
        if t >= math.pi:
            t = 0.0
        object.__setattr__(self, "theta", t)


def circular_to_linear(m):
    m._require(CIRCULAR)
    out = 0.5 * _A @ m.elements @ _B
    return ScatteringMatrix2x2(_SWAP @ out @ _SWAP, LINEAR)


def linear_to_circular(m):
    m._require(LINEAR)
    raw = _SWAP @ m.elements @ _SWAP
    return ScatteringMatrix2x2(2.0 * _A_INV @ raw @ _B_INV, CIRCULAR)


def rotation(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [-s, c]])


def rotate_linear(m, theta):
    """``R M R^T`` without changing the basis tag."""
    r = rotation(float(theta))
    return r @ m.elements @ r.T


def rotate_to_bar_frame(m, angle):
    """Express a linear-basis matrix in bar-aligned polarizations."""
    m._require(LINEAR)
    theta = angle.theta if isinstance(angle, OrientationAngle) else OrientationAngle(angle).theta
    return ScatteringMatrix2x2(rotate_linear(m, theta), BAR)


def bar_matrix(s_par, s_perp, theta):
    """Linear-basis matrix of a bar with diagonal response ``(s_par, s_perp)`` at angle ``theta``."""
    r = rotation(float(theta))
    diag = np.diag([complex(s_par), complex(s_perp)])
    return ScatteringMatrix2x2(r.T @ diag @ r, LINEAR)
