"""Parameter-space geometry: sampled curves, loops, spherical charts, solid angles."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ChartSingularityError

CLOSURE_TOL = 1e-12
AXIS_RTOL = 1e-12


@dataclass(frozen=True)
class ParameterPath:
    """Ordered samples of a parameter-space curve.

    points has shape (m, n) with m >= 2; times is strictly increasing with
    the same length.  A closed path repeats its first point as the last one.
    """

    points: np.ndarray
    times: np.ndarray
    closed: bool = False

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        ts = np.asarray(self.times, dtype=float)
        if pts.ndim != 2 or pts.shape[0] < 2:
            raise ValueError(f"a path needs at least 2 points, got shape {pts.shape}")
        if ts.shape != (pts.shape[0],):
            raise ValueError("times must match the number of points")
        if not (np.isfinite(pts).all() and np.isfinite(ts).all()):
            raise ValueError("path entries must be finite")
        if not np.all(np.diff(ts) > 0.0):
            raise ValueError("times must be strictly increasing")
        if self.closed:
            gap = float(np.linalg.norm(pts[0] - pts[-1]))
            if gap > CLOSURE_TOL:
                raise ValueError(f"closed path endpoints differ by {gap:.3e}")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "times", ts)

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    @property
    def n_params(self) -> int:
        return self.points.shape[1]

    def reversed(self) -> "ParameterPath":
        ts = self.times[-1] - self.times[::-1]
        return ParameterPath(self.points[::-1].copy(), ts, closed=self.closed)


@dataclass(frozen=True)
class SphericalPoint:
    """Spherical coordinates (radius, theta, phi) with theta in the open interval (0, pi)."""

    radius: float
    theta: float
    phi: float

    def __post_init__(self):
        if not self.radius > 0.0:
            raise ChartSingularityError(f"radius must be positive, got {self.radius}")
        if not 0.0 < self.theta < math.pi:
            raise ChartSingularityError(
                f"theta={self.theta} lies outside the open chart interval (0, pi)"
            )


def circle_loop(radius: float, theta: float, n: int) -> ParameterPath:
    """Closed constant-latitude circle: n+1 points at phi_i = 2*pi*i/n, t_i = i/n."""
    if n < 3:
        raise ValueError(f"a circle loop needs n >= 3 points, got n={n}")
    SphericalPoint(radius, theta, 0.0)  # validates radius and theta
    phis = 2.0 * math.pi * np.arange(n + 1) / n
    pts = np.stack(
        [
            radius * math.sin(theta) * np.cos(phis),
            radius * math.sin(theta) * np.sin(phis),
            radius * math.cos(theta) * np.ones_like(phis),
        ],
        axis=1,
    )
    pts[-1] = pts[0]
    return ParameterPath(pts, np.arange(n + 1) / n, closed=True)


def to_spherical(lam) -> SphericalPoint:
    """Cartesian 3-vector to spherical coordinates; rejects the polar axis."""
    lam = np.asarray(lam, dtype=float)
    if lam.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {lam.shape}")
    r = float(np.linalg.norm(lam))
    rho = math.hypot(lam[0], lam[1])
    if r == 0.0 or rho <= AXIS_RTOL * r:
        raise ChartSingularityError(f"point {lam.tolist()} lies on the chart axis")
    return SphericalPoint(r, math.atan2(rho, lam[2]), math.atan2(lam[1], lam[0]))


def from_spherical(p: SphericalPoint) -> np.ndarray:
    return np.array(
        [
            p.radius * math.sin(p.theta) * math.cos(p.phi),
            p.radius * math.sin(p.theta) * math.sin(p.phi),
            p.radius * math.cos(p.theta),
        ]
    )


class SphericalChart:
    """Chart u = (radius, theta, phi) over R^3 minus the polar axis."""

    dim = 3

    def embed(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        return from_spherical(SphericalPoint(u[0], u[1], u[2]))


class CartesianChart:
    """Identity chart on parameter space."""

    def __init__(self, dim: int):
        self.dim = int(dim)

    def embed(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if u.shape != (self.dim,):
            raise ValueError(f"expected a {self.dim}-vector, got shape {u.shape}")
        return u


def _triangle_excess(p: np.ndarray, q: np.ndarray) -> float:
    # Signed solid angle of the spherical triangle (north pole, p, q).
    triple = p[0] * q[1] - p[1] * q[0]
    denom = 1.0 + p[2] + q[2] + float(np.dot(p, q))
    return 2.0 * math.atan2(triple, denom)


def solid_angle(loop: ParameterPath) -> float:
    """Signed solid angle subtended at the origin by a closed 3-d loop.

    The radial projection onto the unit sphere is triangulated from the
    north pole; the sum of signed triangle excesses is reported in
    [-2*pi, 2*pi], reducing mod 4*pi when multiple windings push it out.
    """
    if not loop.closed:
        raise ValueError("solid_angle needs a closed loop")
    if loop.n_params != 3:
        raise ValueError("solid_angle is defined for 3-d parameter loops")
    pts = loop.points
    radii = np.linalg.norm(pts, axis=1)
    if np.any(radii == 0.0):
        raise ChartSingularityError("loop passes through the origin")
    rho = np.hypot(pts[:, 0], pts[:, 1])
    if np.any(rho <= AXIS_RTOL * radii):
        raise ChartSingularityError("loop touches the chart axis")
    seglen = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    if np.any(seglen == 0.0):
        raise ValueError("loop contains zero-length segments")
    unit = pts / radii[:, None]
    total = 0.0
    for i in range(unit.shape[0] - 1):
        total += _triangle_excess(unit[i], unit[i + 1])
    if abs(total) <= 2.0 * math.pi + 1e-9:  # slack keeps +/-2pi out of the wrap
        return total
    return math.remainder(total, 4.0 * math.pi)


def refine(path: ParameterPath, factor: int) -> ParameterPath:
    """Insert factor-1 evenly spaced points on every segment (linear in both
    coordinates and time); original points are preserved exactly."""
    factor = int(factor)
    if factor < 2:
        raise ValueError(f"refinement factor must be >= 2, got {factor}")
    m = path.n_points
    new_pts = [path.points[0]]
    new_ts = [path.times[0]]
    for i in range(m - 1):
        a, b = path.points[i], path.points[i + 1]
        ta, tb = path.times[i], path.times[i + 1]
        for j in range(1, factor):
            s = j / factor
            new_pts.append((1.0 - s) * a + s * b)
            new_ts.append((1.0 - s) * ta + s * tb)
        new_pts.append(b)
        new_ts.append(tb)
    return ParameterPath(np.array(new_pts), np.array(new_ts), closed=path.closed)
