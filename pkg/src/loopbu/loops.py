"""Sampled based loops, the reversal involution, and push-off deformations.

A loop is stored as m + 1 samples at the uniform grid t_i = i/m with
samples[0] = samples[m] = base.  The grid size m is required to be a
multiple of 16 so that every breakpoint used by the push-off deformation
(eighths) and by the reduced linear system (quarters and halves) lands
exactly on a grid node.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import (
    AntipodalPair,
    BaseMismatch,
    DegenerateInput,
    InvalidLoopData,
)
from .sphere import ANTIPODAL_TOL, UNIT_TOL, GeodesicArc, meridian_arc

TF_TOL = 1e-8
MIN_GRID = 16

_MANIFOLDS = ("sphere", "euclidean")


def as_grid_size(m) -> int:
    """Validate a loop grid size: at least 16 and divisible by 16.

    Divisibility by 16 puts every breakpoint of the push-off deformation
    (eighths of the parameter interval at full deformation) and the
    quarter/half splits of the reduced linear system exactly on grid
    nodes.
    """
    m = int(m)
    if m < MIN_GRID or m % MIN_GRID != 0:
        raise DegenerateInput(f"grid size m must be a positive multiple of {MIN_GRID}, got {m}")
    return m


def _slerp_rows(p, q, w):
    # row-wise geodesic interpolation between paired samples; w in (0, 1)
    dots = np.clip(np.einsum("ij,ij->i", p, q), -1.0, 1.0)
    theta = np.arccos(dots)
    if np.any(theta > np.pi - ANTIPODAL_TOL):
        raise AntipodalPair("adjacent samples are antipodal; interpolation is ambiguous")
    sin_t = np.sin(theta)
    tiny = sin_t < 1e-9
    safe = np.where(tiny, 1.0, sin_t)
    out = (np.sin((1.0 - w) * theta) / safe)[:, None] * p
    out += (np.sin(w * theta) / safe)[:, None] * q
    if np.any(tiny):
        # nearly coincident endpoints: the chord is exact to machine precision
        lin = p + w[:, None] * (q - p)
        out[tiny] = lin[tiny]
    return out


@dataclass(frozen=True)
class Loop:
    """A closed path sampled on the uniform grid t_i = i/m.

    ``samples`` has shape (m + 1, ambient) with first and last rows equal
    to ``base`` within 1e-9.  On the sphere manifold every sample must be
    a unit vector; evaluation between nodes follows the short geodesic of
    each segment.  Instances are immutable and their arrays read-only.
    """

    samples: np.ndarray
    base: np.ndarray
    manifold: str = "sphere"

    def __post_init__(self):
        if self.manifold not in _MANIFOLDS:
            raise DegenerateInput(f"unknown manifold {self.manifold!r}")
        samples = np.asarray(self.samples, dtype=float)
        base = np.asarray(self.base, dtype=float)
        if samples.ndim != 2:
            raise DegenerateInput(f"samples must be 2-dimensional, got shape {samples.shape}")
        rows, dim = samples.shape
        m = as_grid_size(rows - 1)
        if base.shape != (dim,):
            raise DegenerateInput(
                f"base shape {base.shape} does not match ambient dimension {dim}"
            )
        min_dim = 2 if self.manifold == "sphere" else 1
        if dim < min_dim:
            raise DegenerateInput(
                f"ambient dimension must be >= {min_dim} on the {self.manifold} manifold, got {dim}"
            )
        for label, row in (("samples[0]", samples[0]), ("samples[m]", samples[-1])):
            gap = float(np.linalg.norm(row - base))
            if gap > UNIT_TOL:
                raise DegenerateInput(f"{label} differs from base by {gap:.3e}")
        if self.manifold == "sphere":
            norms = np.linalg.norm(samples, axis=1)
            worst = float(np.max(np.abs(norms - 1.0)))
            if worst > UNIT_TOL:
                raise DegenerateInput(f"sphere samples off the unit sphere by {worst:.3e}")
        samples = samples.copy()
        base = base.copy()
        samples.setflags(write=False)
        base.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "base", base)

    @property
    def m(self) -> int:
        return self.samples.shape[0] - 1

    @property
    def ambient_dim(self) -> int:
        return self.samples.shape[1]

    @property
    def n(self) -> int:
        """Dimension of the manifold the loop lives on."""
        d = self.ambient_dim
        return d - 1 if self.manifold == "sphere" else d

    def eval(self, t):
        """Evaluate at parameter t in [0, 1] (scalar or array).

        Values at grid nodes are returned exactly; between nodes the
        sphere manifold interpolates along the short geodesic of the
        segment and the euclidean manifold linearly.
        """
        t_arr = np.asarray(t, dtype=float)
        scalar = t_arr.ndim == 0
        tv = np.atleast_1d(t_arr).copy()
        if np.any(tv < -1e-12) or np.any(tv > 1.0 + 1e-12):
            raise DegenerateInput("loop parameter t must lie in [0, 1]")
        x = np.clip(tv, 0.0, 1.0) * self.m
        nearest = np.rint(x)
        snap = np.abs(x - nearest) <= 1e-9
        out = np.empty((tv.size, self.ambient_dim))
        interior = ~snap
        if np.any(interior):
            idx = np.minimum(x[interior].astype(int), self.m - 1)
            w = x[interior] - idx
            p = self.samples[idx]
            q = self.samples[idx + 1]
            if self.manifold == "sphere":
                out[interior] = _slerp_rows(p, q, w)
            else:
                out[interior] = p + w[:, None] * (q - p)
        if np.any(snap):
            out[snap] = self.samples[nearest[snap].astype(int)]
        return out[0] if scalar else out

    def star(self) -> "Loop":
        """The reversed loop t -> alpha(1 - t); an involution on the grid."""
        return Loop(self.samples[::-1], self.base, self.manifold)

    def tf_distance(self) -> float:
        """Max distance between the loop and its reversal over the grid.

        Zero exactly on to-and-fro loops (second half retraces the first);
        an embedded great circle through the base gives 2.
        """
        return float(np.max(np.linalg.norm(self.samples - self.samples[::-1], axis=1)))

    def is_tf(self, tol: float = TF_TOL) -> bool:
        return self.tf_distance() <= tol


@dataclass(frozen=True)
class PushoffArcs:
    """The pair of spur arcs traversed by the push-off deformation.

    Both arcs leave the same point (the loop's base) with equal angular
    length; their directions must be separated so the two spurs are
    genuinely distinct.
    """

    mu: GeodesicArc
    nu: GeodesicArc

    def __post_init__(self):
        if not isinstance(self.mu, GeodesicArc) or not isinstance(self.nu, GeodesicArc):
            raise DegenerateInput("push-off arcs must be GeodesicArc instances")
        gap = float(np.linalg.norm(self.mu.start - self.nu.start))
        if gap > UNIT_TOL:
            raise DegenerateInput(f"arcs must share their start point (gap {gap:.3e})")
        if abs(self.mu.angular_length - self.nu.angular_length) > 1e-12:
            raise DegenerateInput("arcs must have equal angular length")
        cosang = np.clip(float(self.mu.direction @ self.nu.direction), -1.0, 1.0)
        if float(np.arccos(cosang)) <= ANTIPODAL_TOL:
            raise DegenerateInput("arc directions coincide; spurs would overlap")

    def swapped(self) -> "PushoffArcs":
        return PushoffArcs(self.nu, self.mu)


def default_pushoff_arcs(n: int) -> PushoffArcs:
    """Opposite quarter meridians at the south pole, toward +-e_1."""
    e1 = np.zeros(n + 1)
    e1[0] = 1.0
    return PushoffArcs(meridian_arc(e1), meridian_arc(-e1))


def pushoff_homotopy(loop: Loop, s: float, arcs: PushoffArcs) -> Loop:
    """Deform a based loop by growing spur arcs at its base point.

    At stage s the result traverses the mu arc out to parameter s and
    back (on t in [0, s/8] and [s/8, s/4]), runs the original loop
    squeezed into [s/4, 1 - s/4], then traverses the nu arc out and back
    (on [1 - s/4, 1 - s/8] and [1 - s/8, 1]).  Arc parameters stay in
    [0, s] throughout.  s = 0 returns the input samples unchanged; the
    base point is fixed for every s.
    """
    if loop.manifold != "sphere":
        raise DegenerateInput("push-off is defined for sphere loops only")
    s = float(s)
    if not 0.0 <= s <= 1.0:
        raise DegenerateInput(f"deformation stage s must lie in [0, 1], got {s:.17g}")
    if float(np.linalg.norm(loop.base - arcs.mu.start)) > UNIT_TOL:
        raise BaseMismatch("loop base and arc start disagree")
    m = loop.m
    t = np.arange(m + 1) / m
    mid = (t >= s / 4.0) & (t <= 1.0 - s / 4.0)
    out_mu = ~mid & (t <= s / 8.0)
    back_mu = ~mid & (t < 0.5) & (t > s / 8.0)
    out_nu = ~mid & (t >= 0.5) & (t < 1.0 - s / 8.0)
    back_nu = ~mid & (t >= 1.0 - s / 8.0)
    samples = np.empty_like(loop.samples)
    if np.any(mid):
        u = np.clip((t[mid] - s / 4.0) * (2.0 / (2.0 - s)), 0.0, 1.0)
        samples[mid] = loop.eval(u)
    if np.any(out_mu):
        samples[out_mu] = arcs.mu.point_at(8.0 * t[out_mu])
    if np.any(back_mu):
        samples[back_mu] = arcs.mu.point_at(2.0 * s - 8.0 * t[back_mu])
    if np.any(out_nu):
        samples[out_nu] = arcs.nu.point_at(8.0 * (t[out_nu] + s / 4.0 - 1.0))
    if np.any(back_nu):
        samples[back_nu] = arcs.nu.point_at(8.0 * (1.0 - t[back_nu]))
    return Loop(samples, loop.base, "sphere")


def pushoff(loop: Loop, arcs: PushoffArcs) -> Loop:
    """The fully deformed loop (stage s = 1 of the push-off)."""
    return pushoff_homotopy(loop, 1.0, arcs)


def loop_to_dict(loop: Loop) -> dict:
    return {
        "manifold": loop.manifold,
        "n": loop.n,
        "m": loop.m,
        "base": [float(v) for v in loop.base],
        "samples": [[float(v) for v in row] for row in loop.samples],
    }


def _require_field(obj: dict, name: str):
    if name not in obj:
        raise InvalidLoopData(f"missing field {name!r}")
    return obj[name]


def loop_from_dict(obj) -> Loop:
    """Build a Loop from parsed JSON, naming the offending field on error."""
    if not isinstance(obj, dict):
        raise InvalidLoopData("top-level value must be an object")
    manifold = _require_field(obj, "manifold")
    if manifold not in _MANIFOLDS:
        raise InvalidLoopData(f"manifold: expected one of {_MANIFOLDS}, got {manifold!r}")
    n = _require_field(obj, "n")
    m = _require_field(obj, "m")
    if not isinstance(n, int) or isinstance(n, bool):
        raise InvalidLoopData(f"n: expected an integer, got {n!r}")
    if not isinstance(m, int) or isinstance(m, bool):
        raise InvalidLoopData(f"m: expected an integer, got {m!r}")
    try:
        base = np.asarray(_require_field(obj, "base"), dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidLoopData(f"base: not a numeric vector ({exc})") from exc
    try:
        samples = np.asarray(_require_field(obj, "samples"), dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidLoopData(f"samples: not a numeric matrix ({exc})") from exc
    if samples.ndim != 2:
        raise InvalidLoopData(f"samples: expected a list of rows, got shape {samples.shape}")
    ambient = n + 1 if manifold == "sphere" else n
    if samples.shape[1] != ambient:
        raise InvalidLoopData(
            f"samples: row dimension {samples.shape[1]} does not match n = {n} "
            f"on the {manifold} manifold (expected {ambient})"
        )
    if samples.shape[0] != m + 1:
        raise InvalidLoopData(f"samples: expected m + 1 = {m + 1} rows, got {samples.shape[0]}")
    if base.shape != (ambient,):
        raise InvalidLoopData(f"base: expected {ambient} coordinates, got shape {base.shape}")
    try:
        return Loop(samples, base, manifold)
    except DegenerateInput as exc:
        raise InvalidLoopData(f"loop data failed validation: {exc}") from exc


def load_loop(path) -> Loop:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidLoopData(
                f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
            ) from exc
    try:
        return loop_from_dict(obj)
    except InvalidLoopData as exc:
        raise InvalidLoopData(f"{path}: {exc}") from exc


def save_loop(loop: Loop, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(loop_to_dict(loop), fh, indent=2)
        fh.write("\n")
