"""Advisory scan-geometry checks: cover depth and neighbour separation."""

from dataclasses import dataclass
import math

from . import SPEED_OF_LIGHT
from .errors import DomainError


@dataclass(frozen=True)
class DepthGuidance:
    half_wavelength: float
    full_wavelength: float


@dataclass(frozen=True)
class ScanGeometry:
    """Lengths in meters. Neighbour depths and lateral gap are optional."""

    depth: float
    antenna_separation: float = 0.0
    neighbor_depths: tuple = ()
    lateral_gap: float | None = None

    def __post_init__(self):
        values = [self.depth, self.antenna_separation, *self.neighbor_depths]
        if self.lateral_gap is not None:
            values.append(self.lateral_gap)
        if any(not math.isfinite(v) or v < 0.0 for v in values):
            raise DomainError("scan geometry lengths must be finite and non-negative")

    def warnings(self, fc, medium):
        """Human-readable advisories for this geometry at ``fc``."""
        out = []
        guide = min_depth_guidance(fc, medium)
        if self.depth < guide.half_wavelength:
            out.append(
                f"bar depth {self.depth:.4g} m is below half a wavelength "
                f"({guide.half_wavelength:.4g} m); near-field bias likely"
            )
        elif self.depth < guide.full_wavelength:
            out.append(
                f"bar depth {self.depth:.4g} m is below one wavelength "
                f"({guide.full_wavelength:.4g} m)"
            )
        for p in self.neighbor_depths:
            ok, margin = depth_separation_ok(self.depth, p, fc, medium)
            if not ok and self.lateral_gap is None:
                out.append(f"neighbour at depth {p:.4g} m is {-margin:.4g} m too close in depth")
            if self.lateral_gap is not None and math.isclose(p, self.depth, abs_tol=1e-12):
                need = min_lateral_gap(self.depth, fc, medium)
                if self.lateral_gap < need:
                    out.append(
                        f"lateral gap {self.lateral_gap:.4g} m is below the {need:.4g} m needed "
                        "to separate same-depth neighbours"
                    )
        return out


def _resolution(fc, medium):
    if not fc > 0.0:
        raise DomainError("fc must be positive")
    return SPEED_OF_LIGHT / (2.0 * fc * medium.refractive_index)


def min_depth_guidance(fc, medium):
    """Half and full wavelength ``c / (fc sqrt(eps_r))`` in the medium."""
    lam = 2.0 * _resolution(fc, medium)
    return DepthGuidance(half_wavelength=0.5 * lam, full_wavelength=lam)


def depth_separation_ok(p1, p2, fc, medium):
    """
    Whether two bars are resolvable in depth.

    Returns ``(ok, margin)`` where ``margin = |p2 - p1| - c / (2 fc sqrt(eps_r))``
    in meters; ``ok`` holds when the margin is non-negative.
    """
    margin = abs(p2 - p1) - _resolution(fc, medium)
    return margin >= 0.0, margin


def min_lateral_gap(p1, fc, medium):
    """Smallest horizontal offset ``g`` with ``sqrt(g**2 + p1**2) - p1 >= c / (2 fc sqrt(eps_r))``."""
    if not (math.isfinite(p1) and p1 >= 0.0):
        raise DomainError("depth must be non-negative")
    r = _resolution(fc, medium)
    return math.sqrt(r * (r + 2.0 * p1))
