"""Geometry of an ideal two-dimensional cylindrical cloak.

A particle enters at ``x = -L`` with impact parameter ``y1`` travelling
along +x at speed ``v``. Inside the shell ``a <= r <= R`` its path is the
image of the straight chord under the linear radial map
``r -> a + r (R - a) / R``. The dwell time is fixed by phase matching with
free flight, so every traversal takes ``2L/v`` in total.
"""

from dataclasses import dataclass
import math

import numpy as np


class OutOfApertureError(ValueError):
    pass


class SeparatrixError(ValueError):
    pass


class HiddenRegionError(ValueError):
    pass


@dataclass(frozen=True)
class CloakGeometry:
    R: float
    L: float
    v: float = 1.0
    a: float = None
    center: tuple = (0.0, 0.0)

    def __post_init__(self):
        if self.a is None:
            object.__setattr__(self, "a", self.R / 2)
        if not 0 < self.a < self.R <= self.L:
            raise ValueError(f"need 0 < a < R <= L, got a={self.a}, R={self.R}, L={self.L}")
        if not self.v > 0:
            raise ValueError(f"speed must be positive, got {self.v}")
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))

    @classmethod
    def from_wave(cls, R, L, k=1.0, omega=1.0, a=None, center=(0.0, 0.0)):
        """Build from wavenumber and angular frequency, with v = omega / k."""
        if not k > 0:
            raise ValueError("k must be positive")
        return cls(R=R, L=L, v=omega / k, a=a, center=center)


@dataclass(frozen=True)
class Trajectory:
    y1: float
    points: np.ndarray
    dwell_time: float


def _offset(geom, y1):
    off = y1 - geom.center[1]
    if abs(off) > geom.L:
        raise OutOfApertureError(f"|y1 - center_y| = {abs(off)} exceeds half-span L = {geom.L}")
    return off


def dwell_time(geom, y1):
    """Time spent inside the shell: ``2 sqrt(R^2 - y1^2) / v``, zero if the path misses it."""
    off = _offset(geom, y1)
    if abs(off) >= geom.R:
        return 0.0
    return 2 * math.sqrt(geom.R**2 - off**2) / geom.v


def total_traversal_time(geom, y1):
    chord = geom.v * dwell_time(geom, y1)
    return (2 * geom.L - chord) / geom.v + dwell_time(geom, y1)


def _radial_scale(geom, r):
    return (geom.a + r * (geom.R - geom.a) / geom.R) / r


def radial_map(geom, p):
    """Push a point of the virtual disk ``|p| <= R`` out into the shell."""
    cx, cy = geom.center
    dx, dy = float(p[0]) - cx, float(p[1]) - cy
    r = math.hypot(dx, dy)
    if r > geom.R * (1 + 1e-12):
        raise ValueError(f"point at radius {r} lies outside the cloak disk R = {geom.R}")
    if r == 0:
        raise SeparatrixError("the cloak centre maps to the whole inner circle")
    s = _radial_scale(geom, r)
    return np.array([cx + s * dx, cy + s * dy])


def inverse_radial_map(geom, p):
    cx, cy = geom.center
    dx, dy = float(p[0]) - cx, float(p[1]) - cy
    rp = math.hypot(dx, dy)
    if not geom.a < rp <= geom.R * (1 + 1e-12):
        raise ValueError(f"radius {rp} is not in the shell ({geom.a}, {geom.R}]")
    r = (rp - geom.a) * geom.R / (geom.R - geom.a)
    return np.array([cx + dx * r / rp, cy + dy * r / rp])


def trajectory(geom, y1, samples_inside=50):
    """Polyline of a traversal in the lab frame.

    The polyline always has ``samples_inside + 2`` points: the start and end
    at ``x = -/+ L`` and ``samples_inside`` points across ``|x| <= chord/2``
    (mapped through the shell when the path crosses it, straight otherwise).
    """
    if samples_inside < 2:
        raise ValueError("samples_inside must be at least 2")
    off = _offset(geom, y1)
    if off == 0:
        raise SeparatrixError("y1 through the cloak centre is a separatrix; the path splits around the hidden disk")
    cx, cy = geom.center
    half = math.sqrt(geom.R**2 - off**2) if abs(off) < geom.R else geom.R
    xs = np.linspace(-half, half, samples_inside)
    inside = np.empty((samples_inside, 2))
    if abs(off) < geom.R:
        for j, x in enumerate(xs):
            inside[j] = radial_map(geom, (cx + x, y1))
        # entry and exit sit on r = R where the map is the identity
        inside[0] = (cx - half, y1)
        inside[-1] = (cx + half, y1)
    else:
        inside[:, 0] = cx + xs
        inside[:, 1] = y1
    points = np.vstack([[cx - geom.L, y1], inside, [cx + geom.L, y1]])
    return Trajectory(float(y1), points, dwell_time(geom, y1))


def current_direction(geom, p):
    """Unit tangent of the streamline through ``p``.

    Free space gives +x. In the shell the direction is the pushforward of +x
    by the Jacobian of :func:`radial_map` at the preimage of ``p``.
    """
    cx, cy = geom.center
    dx, dy = float(p[0]) - cx, float(p[1]) - cy
    rp = math.hypot(dx, dy)
    if rp <= geom.a:
        raise HiddenRegionError(f"point at radius {rp} is inside the hidden region a = {geom.a}")
    if rp >= geom.R:
        return np.array([1.0, 0.0])
    q = inverse_radial_map(geom, p) - np.array([cx, cy])
    r = math.hypot(*q)
    rhat = q / r
    ds = (geom.R - geom.a) / geom.R
    scale = _radial_scale(geom, r)
    # J = ds rr^T + (s/r)(1 - rr^T), applied to x-hat
    d = scale * np.array([1.0, 0.0]) + (ds - scale) * rhat[0] * rhat
    return d / np.linalg.norm(d)
