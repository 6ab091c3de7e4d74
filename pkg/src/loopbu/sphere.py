"""Points, geodesic arcs, and circles on the unit sphere S^n in R^{n+1}.

Everything here works with plain float ndarrays and closed-form
trigonometry.  Points are validated to unit length within ``UNIT_TOL``;
pairs closer than ``ANTIPODAL_TOL`` to antipodal are rejected wherever a
unique geodesic or circle is required.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AntipodalPair, DegenerateCircle, DegenerateInput

UNIT_TOL = 1e-9
ANTIPODAL_TOL = 1e-6


def as_point(v) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1 or arr.size < 2:
        raise DegenerateInput(
            f"expected an ambient vector of dimension >= 2, got shape {arr.shape}"
        )
    return arr


def as_sphere_point(v, tol: float = UNIT_TOL) -> np.ndarray:
    """Return ``v`` as a float vector after checking it has unit norm."""
    arr = as_point(v)
    nrm = float(np.linalg.norm(arr))
    if abs(nrm - 1.0) > tol:
        raise DegenerateInput(f"not a unit vector: norm = {nrm:.17g}")
    return arr


def as_equatorial_point(v, tol: float = UNIT_TOL) -> np.ndarray:
    """A unit vector whose last coordinate vanishes (a point of S^{n-1})."""
    arr = as_sphere_point(v, tol)
    if abs(float(arr[-1])) > tol:
        raise DegenerateInput(
            f"not an equatorial point: last coordinate = {float(arr[-1]):.17g}"
        )
    return arr


def south_pole(n: int) -> np.ndarray:
    """The base point -e_{n+1} of S^n."""
    if n < 1:
        raise DegenerateInput(f"sphere dimension must be >= 1, got {n}")
    p = np.zeros(n + 1)
    p[-1] = -1.0
    return p


def equator_base(n: int) -> np.ndarray:
    """The secondary base point e_1 on the equator of S^n."""
    if n < 1:
        raise DegenerateInput(f"sphere dimension must be >= 1, got {n}")
    p = np.zeros(n + 1)
    p[0] = 1.0
    return p


def normalize(v) -> np.ndarray:
    arr = as_point(v)
    nrm = float(np.linalg.norm(arr))
    if nrm < 1e-12:
        raise DegenerateInput("cannot normalize a (near) zero vector")
    return arr / nrm


def angle_between(p, q) -> float:
    """Geodesic distance between two unit vectors, in [0, pi]."""
    p = as_sphere_point(p)
    q = as_sphere_point(q)
    if p.shape != q.shape:
        raise DegenerateInput(f"dimension mismatch: {p.shape} vs {q.shape}")
    return float(np.arccos(np.clip(p @ q, -1.0, 1.0)))


def slerp(p, q, t):
    """Interpolate along the unique short geodesic from p to q.

    ``t`` may be a scalar or an array; t = 0 and t = 1 return exact
    copies of the endpoints.  Raises AntipodalPair when the geodesic is
    not unique (angle within ANTIPODAL_TOL of pi).
    """
    p = as_sphere_point(p)
    q = as_sphere_point(q)
    theta = angle_between(p, q)
    if theta > np.pi - ANTIPODAL_TOL:
        raise AntipodalPair(f"endpoints are antipodal within tolerance: angle = {theta:.17g}")
    t_arr = np.asarray(t, dtype=float)
    if theta < 1e-12:
        out = np.multiply.outer(np.ones_like(t_arr), p)
    else:
        s = np.sin(theta)
        out = (
            np.multiply.outer(np.sin((1.0 - t_arr) * theta) / s, p)
            + np.multiply.outer(np.sin(t_arr * theta) / s, q)
        )
    # exact endpoints, so closed-loop bookkeeping never drifts
    out[t_arr == 0.0] = p
    out[t_arr == 1.0] = q
    return out if t_arr.ndim else out.reshape(p.shape)


@dataclass(frozen=True)
class GeodesicArc:
    """A great-circle arc: start point, unit tangent, angular length.

    ``point_at(u)`` walks the arc with u in [0, 1]; u = 0 is the start
    and u = 1 lies ``angular_length`` radians along the circle.
    """

    start: np.ndarray
    direction: np.ndarray
    angular_length: float

    def __post_init__(self):
        start = as_sphere_point(self.start)
        direction = as_sphere_point(self.direction)
        if start.shape != direction.shape:
            raise DegenerateInput(
                f"start/direction dimension mismatch: {start.shape} vs {direction.shape}"
            )
        dot = float(start @ direction)
        if abs(dot) > UNIT_TOL:
            raise DegenerateInput(
                f"direction must be tangent at start: <start, direction> = {dot:.17g}"
            )
        length = float(self.angular_length)
        if not 0.0 < length <= np.pi:
            raise DegenerateInput(f"angular length must be in (0, pi], got {length:.17g}")
        start = start.copy()
        direction = direction.copy()
        start.setflags(write=False)
        direction.setflags(write=False)
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "direction", direction)
        object.__setattr__(self, "angular_length", length)

    @property
    def end(self) -> np.ndarray:
        return self.point_at(1.0)

    def point_at(self, u):
        ang = np.asarray(u, dtype=float) * self.angular_length
        return np.multiply.outer(np.cos(ang), self.start) + np.multiply.outer(
            np.sin(ang), self.direction
        )


def meridian_arc(x) -> GeodesicArc:
    """Quarter meridian from the south pole toward the equatorial point x."""
    x = as_equatorial_point(x)
    return GeodesicArc(south_pole(x.size - 1), x, np.pi / 2)


def circle_alpha(x, t):
    """Vertical great circle through the south pole in the plane of x.

    Parametrized as sin(2 pi t) x - cos(2 pi t) e_{n+1}; starts and ends
    at the south pole, passes through x at t = 1/4.  ``t`` may be scalar
    or an array.
    """
    x = as_equatorial_point(x)
    e = np.zeros_like(x)
    e[-1] = 1.0
    ang = 2.0 * np.pi * np.asarray(t, dtype=float)
    return np.multiply.outer(np.sin(ang), x) - np.multiply.outer(np.cos(ang), e)


def circle_beta(x, s1, t):
    """Circle through s1 and x lying in a vertical plane.

    The circle has center m = (s1 + x)/2, horizontal radius vector u
    pointing from s1 to x, and vertical component along e_{n+1}.  It
    starts at s1 (t = 0), reaches x at t = 1/2, and returns.  The two
    radii rho = |x - s1|/2 and rho' = sqrt(1 - |m|^2) coincide for unit
    x, s1; both are kept as written for clarity.
    """
    x = as_equatorial_point(x)
    s1 = as_equatorial_point(s1)
    if x.shape != s1.shape:
        raise DegenerateInput(f"dimension mismatch: {x.shape} vs {s1.shape}")
    if angle_between(x, s1) <= ANTIPODAL_TOL:
        raise DegenerateCircle("x coincides with s1; the circle through them collapses")
    mid = 0.5 * (s1 + x)
    chord = float(np.linalg.norm(x - s1))
    u = (x - s1) / chord
    rho = 0.5 * chord
    rho_v = float(np.sqrt(max(0.0, 1.0 - float(mid @ mid))))
    e = np.zeros_like(x)
    e[-1] = 1.0
    phase = np.pi + 2.0 * np.pi * np.asarray(t, dtype=float)
    return (
        mid
        + np.multiply.outer(rho * np.cos(phase), u)
        + np.multiply.outer(rho_v * np.sin(phase), e)
    )


def rotation_to_base(s1) -> np.ndarray:
    """Rotation matrix carrying s1 to the south pole.

    Acts as a plane rotation in span{s0, b} (b the component of s1
    orthogonal to s0) and as the identity on the complement, so it is
    special orthogonal in every ambient dimension.
    """
    s1 = as_sphere_point(s1)
    n = s1.size - 1
    a = south_pole(n)
    ca = float(s1 @ a)
    perp = s1 - ca * a
    pn = float(np.linalg.norm(perp))
    if pn <= ANTIPODAL_TOL:
        raise DegenerateInput("s1 must not be the south pole or its antipode")
    b = perp / pn
    theta = float(np.arctan2(float(s1 @ b), ca))
    eye = np.eye(s1.size)
    return (
        eye
        + (np.cos(theta) - 1.0) * (np.outer(a, a) + np.outer(b, b))
        - np.sin(theta) * (np.outer(b, a) - np.outer(a, b))
    )
