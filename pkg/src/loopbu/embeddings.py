"""Sphere-to-loop-space embeddings.

Three families of loops indexed by an equatorial point x:

* ``embed_alpha``   -- the vertical great circle through the south pole
  and x, oriented so x is passed before -x;
* ``embed_beta``    -- the vertical circle through the equatorial base
  point s1 and x, south half first, optionally rotated back to s0;
* ``embed_gamma``   -- push-off of a to-and-fro loop along the meridian
  arcs toward x and -x.

``h_lambda`` interpolates between the first two by sliding the base
point along the s0-s1 meridian.  ``tf_sphere_embed`` realizes a round
d-sphere inside the to-and-fro loops: each unit coefficient vector c
drives an angular profile along a fixed meridian, traversed out and
back.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateCircle, DegenerateInput, GridMismatch
from .loops import TF_TOL, Loop, PushoffArcs, as_grid_size, pushoff
from .sphere import (
    as_equatorial_point,
    circle_beta,
    equator_base,
    meridian_arc,
    rotation_to_base,
    slerp,
    south_pole,
)


def _loop_trig(m: int):
    """Tables sin(2 pi t_i), cos(2 pi t_i) with exact reflection symmetry.

    The second half is copied from the first so that sin(2 pi t_{m-i})
    equals -sin(2 pi t_i) and cos(2 pi t_{m-i}) equals cos(2 pi t_i)
    bit for bit; the half-way and endpoint sines are exact zeros.  This
    makes reversal identities of the circle embeddings sample-exact
    instead of merely close.
    """
    half = m // 2
    ang = 2.0 * np.pi * (np.arange(half + 1) / m)
    s = np.sin(ang)
    c = np.cos(ang)
    s[0] = 0.0
    s[half] = 0.0
    c[half] = -1.0
    sin_t = np.concatenate([s, -s[half - 1 :: -1]])
    cos_t = np.concatenate([c, c[half - 1 :: -1]])
    return sin_t, cos_t


def embed_alpha(x, m: int) -> Loop:
    """Great-circle loop through s0 and x, with x passed before -x.

    Samples sin(2 pi t) x - cos(2 pi t) e_{n+1} on the uniform grid; the
    trig tables are reflection-symmetrized so that
    embed_alpha(-x) == star(embed_alpha(x)) holds sample-exactly.
    """
    x = as_equatorial_point(x)
    m = as_grid_size(m)
    sin_t, cos_t = _loop_trig(m)
    samples = np.multiply.outer(sin_t, x)
    samples[:, -1] -= cos_t
    return Loop(samples, south_pole(x.size - 1), "sphere")


def embed_beta(x, m: int, rotate: bool = False) -> Loop:
    """Vertical-circle loop through s1 = e_1 and x, south half first.

    With ``rotate`` the samples are post-composed with the rotation
    carrying s1 to s0, so the result is based at the south pole.
    """
    x = as_equatorial_point(x)
    m = as_grid_size(m)
    n = x.size - 1
    s1 = equator_base(n)
    t = np.arange(m + 1) / m
    samples = circle_beta(x, s1, t)
    if not rotate:
        return Loop(samples, s1, "sphere")
    rot = rotation_to_base(s1)
    return Loop(samples @ rot.T, south_pole(n), "sphere")


def _vertical_circle(a, x, t):
    # Circle on the sphere through a and x, lying in the plane spanned by
    # the vertical axis and the horizontal direction from a to x, at
    # constant angular speed starting from a.
    e = np.zeros_like(x)
    e[-1] = 1.0
    horiz = x - a
    horiz[-1] = 0.0
    hn = float(np.linalg.norm(horiz))
    if hn <= 1e-12:
        raise DegenerateCircle("x sits directly above or below the base point")
    u = horiz / hn
    center = a - float(a @ u) * u - float(a @ e) * e
    r = float(np.sqrt(max(0.0, 1.0 - float(center @ center))))
    if r <= 1e-12:
        raise DegenerateCircle("circle radius collapsed")
    phase = np.arctan2(float(a @ e), float(a @ u)) + 2.0 * np.pi * np.asarray(t, dtype=float)
    return (
        center
        + np.multiply.outer(r * np.cos(phase), u)
        + np.multiply.outer(r * np.sin(phase), e)
    )


def h_lambda(x, lam: float, m: int) -> Loop:
    """Loop of the base-sliding homotopy at stage lam in [0, 1].

    The base point s_lam moves along the meridian from s0 (lam = 0) to
    s1 (lam = 1); the loop is the vertical circle through s_lam and x.
    lam = 1 reproduces embed_beta(x, m) without rotation sample-exactly;
    lam = 0 traces the same circle as embed_alpha(x, m).
    """
    x = as_equatorial_point(x)
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise DegenerateInput(f"homotopy stage must lie in [0, 1], got {lam:.17g}")
    m = as_grid_size(m)
    n = x.size - 1
    t = np.arange(m + 1) / m
    if lam == 1.0:
        base = equator_base(n)
        samples = circle_beta(x, base, t)
    else:
        base = slerp(south_pole(n), equator_base(n), lam)
        samples = _vertical_circle(base, x, t)
    return Loop(samples, base, "sphere")


@dataclass(frozen=True)
class TfSphereParams:
    """Shape of a round d-sphere sitting inside the to-and-fro loops.

    ``basis`` holds d + 1 scalar profile functions on [0, 1], each
    vanishing at 0 and linearly independent on the grid; ``amplitude``
    scales the meridian angle so every loop stays strictly away from the
    antipode of the base point.
    """

    d: int
    amplitude: float
    basis: tuple

    _CHECK_GRID = 1024

    def __post_init__(self):
        if self.d < 0:
            raise DegenerateInput(f"family dimension d must be >= 0, got {self.d}")
        basis = tuple(self.basis)
        if len(basis) != self.d + 1:
            raise DegenerateInput(
                f"need d + 1 = {self.d + 1} basis functions, got {len(basis)}"
            )
        if not all(callable(phi) for phi in basis):
            raise DegenerateInput("basis entries must be callables on [0, 1]")
        if not self.amplitude > 0.0:
            raise DegenerateInput("amplitude must be positive")
        u = np.arange(self._CHECK_GRID + 1) / self._CHECK_GRID
        values = np.vstack([np.asarray(phi(u), dtype=float) for phi in basis])
        at_zero = float(np.max(np.abs(values[:, 0])))
        if at_zero > 1e-12:
            raise DegenerateInput(f"basis functions must vanish at 0 (max |phi(0)| = {at_zero:.3e})")
        # worst-case meridian angle over unit coefficient vectors is the
        # pointwise 2-norm of the basis column (Cauchy-Schwarz)
        reach = self.amplitude * float(np.max(np.linalg.norm(values, axis=0)))
        if reach > np.pi - 0.1 + 1e-9:
            raise DegenerateInput(
                f"amplitude reaches {reach:.6f} rad; must stay <= pi - 0.1"
            )
        gram = values @ values.T / (self._CHECK_GRID + 1)
        svals = np.linalg.svd(gram, compute_uv=False)
        rank = int(np.sum(svals > 1e-10 * svals[0])) if svals[0] > 0.0 else 0
        if rank != self.d + 1:
            raise DegenerateInput(
                f"basis functions are linearly dependent on the grid (rank {rank})"
            )
        object.__setattr__(self, "amplitude", float(self.amplitude))
        object.__setattr__(self, "basis", basis)


def default_tf_params(d: int) -> TfSphereParams:
    """Sine profiles sin((i+1) pi u) with amplitude (pi - 0.1)/sqrt(d+1)."""
    basis = tuple((lambda u, k=i + 1: np.sin(k * np.pi * np.asarray(u))) for i in range(d + 1))
    return TfSphereParams(d, (np.pi - 0.1) / np.sqrt(d + 1), basis)


def tf_sphere_embed(c, params: TfSphereParams, m: int, n: int = 2) -> Loop:
    """The to-and-fro loop indexed by a unit coefficient vector c.

    The first half runs along the meridian great circle in the
    (e_1, e_{n+1})-plane at signed angle amplitude * sum c_i phi_i(2t)
    from the south pole; the second half is the exact mirror copy, so
    the reversal fixes the loop bit for bit.
    """
    c = np.asarray(c, dtype=float)
    if c.shape != (params.d + 1,):
        raise DegenerateInput(
            f"coefficient vector must have length d + 1 = {params.d + 1}, got shape {c.shape}"
        )
    nrm = float(np.linalg.norm(c))
    if abs(nrm - 1.0) > 1e-9:
        raise DegenerateInput(f"coefficient vector must be unit length, got norm {nrm:.17g}")
    if n < 1:
        raise DegenerateInput(f"sphere dimension must be >= 1, got {n}")
    m = as_grid_size(m)
    half = m // 2
    u = np.arange(half + 1) / half
    theta = np.zeros(half + 1)
    for ci, phi in zip(c, params.basis):
        theta += ci * np.asarray(phi(u), dtype=float)
    theta *= params.amplitude
    samples = np.zeros((m + 1, n + 1))
    samples[: half + 1, 0] = np.sin(theta)
    samples[: half + 1, -1] = -np.cos(theta)
    samples[half + 1 :] = samples[half - 1 :: -1]
    return Loop(samples, south_pole(n), "sphere")


def embed_gamma(omega: Loop, x) -> Loop:
    """Push a to-and-fro loop off itself along the meridians toward x.

    The spur arcs are the meridian from s0 to x and the meridian to -x,
    so swapping x for -x swaps the arcs; together with omega = omega*
    this makes the embedding equivariant for the reversal involution.
    """
    if omega.manifold != "sphere":
        raise DegenerateInput("to-and-fro input must be a sphere loop")
    if not omega.is_tf(TF_TOL):
        raise DegenerateInput(
            f"input loop is not to-and-fro within {TF_TOL:g} (tf distance {omega.tf_distance():.3e})"
        )
    x = as_equatorial_point(x)
    if x.size != omega.ambient_dim:
        raise GridMismatch(
            f"direction point lives in R^{x.size} but the loop lives in R^{omega.ambient_dim}"
        )
    arcs = PushoffArcs(meridian_arc(x), meridian_arc(-x))
    return pushoff(omega, arcs)
