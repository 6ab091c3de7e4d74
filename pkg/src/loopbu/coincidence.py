"""Coincidence finding as odd-map zero finding on a sphere.

Composing a functional vector f with an equivariant embedding e gives
g(x) = f(e(x)) - f(e(-x)), an odd map on the equatorial sphere: a zero
of g exhibits a loop with f(alpha) = f(alpha*) that is not to-and-fro.
With k functionals on S^{n-1}, a zero is guaranteed whenever k <= n-1;
k >= n runs are admitted only in best-effort mode and may fail.

The solver is three-stage: evaluate g on a deterministic hemisphere
grid (oddness makes the other half redundant), then refine by bisection
along a great circle for k = 1 or by damped Gauss-Newton with a central
finite-difference Jacobian for k >= 2.  Every certificate stores the
loop itself plus residual and tf-distance recomputed from it, so a
certificate can be revalidated independently of the search that
produced it.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .embeddings import TfSphereParams, embed_alpha, embed_gamma, tf_sphere_embed
from .errors import (
    DegenerateInput,
    GridMismatch,
    InvalidLoopData,
    NoConvergence,
    RegimeError,
)
from .functionals import FunctionalSpec, coincidence_gap, eval_f
from .loops import TF_TOL, Loop, as_grid_size, loop_from_dict, loop_to_dict
from .sphere import as_equatorial_point

_METHODS = ("grid_only", "bisection", "gauss_newton")


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for solve_bu; the defaults suit n <= 4 at m = 256."""

    tol: float = 1e-8
    iters: int = 100
    grid_points: int = 4096
    fd_step: float = 1e-5
    best_effort: bool = False

    def __post_init__(self):
        if not self.tol > 0.0:
            raise DegenerateInput("solver tolerance must be positive")
        if self.iters < 1:
            raise DegenerateInput("iteration budget must be at least 1")
        if self.grid_points < 2:
            raise DegenerateInput("grid must have at least 2 points")
        if not 0.0 < self.fd_step < 1e-1:
            raise DegenerateInput("finite-difference step must lie in (0, 0.1)")


@dataclass(frozen=True)
class OddMapProblem:
    """A functional vector paired with an equivariant embedding.

    ``embedding`` is "alpha" (great circles through the south pole) or
    "gamma" (push-off of the to-and-fro loop ``omega`` along meridians).
    ``n`` is the sphere dimension of the loops; the odd map lives on its
    equator S^{n-1}.
    """

    spec: FunctionalSpec
    n: int
    m: int
    embedding: str = "alpha"
    omega: Loop | None = None

    def __post_init__(self):
        if self.embedding not in ("alpha", "gamma"):
            raise DegenerateInput(f"unknown embedding {self.embedding!r}")
        if self.n < 2:
            raise DegenerateInput(f"sphere dimension must be >= 2 for solving, got {self.n}")
        as_grid_size(self.m)
        if self.spec.m != self.m:
            raise GridMismatch(f"functional grid m = {self.spec.m} vs problem grid m = {self.m}")
        dim = self.spec.dim
        if dim is not None and dim != self.n + 1:
            raise GridMismatch(
                f"functional paths live in R^{dim} but loops on S^{self.n} live in R^{self.n + 1}"
            )
        if self.embedding == "gamma":
            if self.omega is None:
                raise DegenerateInput("gamma embedding needs a to-and-fro loop omega")
            if self.omega.manifold != "sphere" or self.omega.n != self.n:
                raise GridMismatch(f"omega must live on S^{self.n}")
            if self.omega.m != self.m:
                raise GridMismatch(f"omega grid m = {self.omega.m} vs problem grid m = {self.m}")
            if not self.omega.is_tf(TF_TOL):
                raise DegenerateInput(
                    f"omega is not to-and-fro within {TF_TOL:g} "
                    f"(tf distance {self.omega.tf_distance():.3e})"
                )

    @property
    def k(self) -> int:
        return self.spec.k

    def embed(self, x) -> Loop:
        if self.embedding == "alpha":
            return embed_alpha(x, self.m)
        return embed_gamma(self.omega, x)


def odd_map_g(problem: OddMapProblem, x) -> np.ndarray:
    """g(x) = f(e(x)) - f(e(-x)); odd by construction.

    The two embeddings are evaluated with the antipodal inputs, so
    g(-x) is the same pair of numbers subtracted the other way around
    and g(x) + g(-x) vanishes exactly, not merely to tolerance.
    """
    x = as_equatorial_point(x)
    return eval_f(problem.spec, problem.embed(x)) - eval_f(problem.spec, problem.embed(-x))


def hemisphere_grid(dim: int, count: int) -> np.ndarray:
    """Deterministic grid on the representative hemisphere of S^dim.

    The representative of an antipodal pair is the one whose last
    nonzero coordinate is positive.  dim = 1 uses uniform half-circle
    angles, dim = 2 a Fibonacci spiral on the open upper hemisphere,
    higher dimensions a tensor grid in spherical angles (point count
    rounded to the nearest per-axis resolution).
    """
    if dim < 1:
        raise DegenerateInput(f"sphere dimension must be >= 1, got {dim}")
    if count < 2:
        raise DegenerateInput("grid needs at least 2 points")
    if dim == 1:
        theta = np.pi * np.arange(count) / count
        return np.column_stack([np.cos(theta), np.sin(theta)])
    if dim == 2:
        j = np.arange(count)
        z = (j + 0.5) / count
        r = np.sqrt(1.0 - z * z)
        golden = np.pi * (3.0 - np.sqrt(5.0))
        phi = golden * j
        return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    res = max(2, round(count ** (1.0 / dim)))
    polar = [np.pi * (np.arange(res) + 0.5) / res] * (dim - 1)
    azimuth = np.pi * np.arange(res) / res
    grids = np.meshgrid(*polar, azimuth, indexing="ij")
    angles = np.stack([g.ravel() for g in grids], axis=1)
    points = np.empty((angles.shape[0], dim + 1))
    sin_prod = np.ones(angles.shape[0])
    for i in range(dim):
        points[:, i] = sin_prod * np.cos(angles[:, i])
        sin_prod = sin_prod * np.sin(angles[:, i])
    points[:, dim] = sin_prod
    return points


def sphere_grid(dim: int, count: int, seed: int = 0) -> np.ndarray:
    """Deterministic grid covering all of S^dim (used for family sweeps).

    Dimensions 0 through 2 have closed-form grids and ignore the seed;
    higher dimensions draw a reproducible Gaussian sample.
    """
    if dim < 0:
        raise DegenerateInput(f"sphere dimension must be >= 0, got {dim}")
    if dim == 0:
        return np.array([[1.0], [-1.0]])
    if count < 2:
        raise DegenerateInput("grid needs at least 2 points")
    if dim == 1:
        theta = 2.0 * np.pi * np.arange(count) / count
        return np.column_stack([np.cos(theta), np.sin(theta)])
    if dim == 2:
        j = np.arange(count)
        z = 1.0 - (2.0 * j + 1.0) / count
        r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        golden = np.pi * (3.0 - np.sqrt(5.0))
        phi = golden * j
        return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    rng = np.random.default_rng(20240 + 101 * dim + count + seed)
    points = rng.standard_normal((count, dim + 1))
    return points / np.linalg.norm(points, axis=1, keepdims=True)


@dataclass(frozen=True)
class CoincidenceCertificate:
    """A found coincidence: the loop, where it came from, how good it is.

    ``residual`` is the norm of f(loop) - f(star(loop)) and ``tf_dist``
    the loop's distance from the to-and-fro set, both stored as
    recomputable quantities; ``validate`` recomputes them against a
    spec and rejects certificates that drifted from their loop.
    """

    x: np.ndarray
    loop: Loop
    residual: float
    tf_dist: float
    iterations: int
    method: str

    def __post_init__(self):
        x = as_equatorial_point(self.x)
        if self.method not in _METHODS:
            raise DegenerateInput(f"unknown method tag {self.method!r}")
        if self.residual < 0.0:
            raise DegenerateInput("residual cannot be negative")
        if self.iterations < 0:
            raise DegenerateInput("iteration count cannot be negative")
        if not self.tf_dist > 1e-6:
            raise DegenerateInput(
                f"certificate loop is within 1e-6 of the to-and-fro set "
                f"(tf distance {self.tf_dist:.3e}); it witnesses nothing"
            )
        x = x.copy()
        x.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "residual", float(self.residual))
        object.__setattr__(self, "tf_dist", float(self.tf_dist))
        object.__setattr__(self, "iterations", int(self.iterations))

    def validate(self, spec: FunctionalSpec) -> None:
        """Recompute residual and tf-distance from the stored loop."""
        residual = float(np.linalg.norm(coincidence_gap(spec, self.loop)))
        tf_dist = self.loop.tf_distance()
        if abs(residual - self.residual) > 1e-12:
            raise DegenerateInput(
                f"stored residual {self.residual:.17g} vs recomputed {residual:.17g}"
            )
        if abs(tf_dist - self.tf_dist) > 1e-12:
            raise DegenerateInput(
                f"stored tf distance {self.tf_dist:.17g} vs recomputed {tf_dist:.17g}"
            )

    def to_dict(self) -> dict:
        return {
            "x": [float(v) for v in self.x],
            "residual": float(self.residual),
            "tf_distance": float(self.tf_dist),
            "method": self.method,
            "iterations": int(self.iterations),
            "loop": loop_to_dict(self.loop),
        }


def certificate_from_dict(obj) -> CoincidenceCertificate:
    if not isinstance(obj, dict):
        raise InvalidLoopData("certificate: top-level value must be an object")
    for field in ("x", "residual", "tf_distance", "method", "iterations", "loop"):
        if field not in obj:
            raise InvalidLoopData(f"certificate: missing field {field!r}")
    try:
        x = np.asarray(obj["x"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidLoopData(f"certificate: x: not numeric ({exc})") from exc
    loop = loop_from_dict(obj["loop"])
    try:
        return CoincidenceCertificate(
            x,
            loop,
            float(obj["residual"]),
            float(obj["tf_distance"]),
            int(obj["iterations"]),
            str(obj["method"]),
        )
    except (DegenerateInput, TypeError, ValueError) as exc:
        raise InvalidLoopData(f"certificate: {exc}") from exc


def save_certificate(cert: CoincidenceCertificate, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(cert.to_dict(), fh, indent=2)
        fh.write("\n")


def load_certificate(path) -> CoincidenceCertificate:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidLoopData(
                f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
            ) from exc
    try:
        return certificate_from_dict(obj)
    except InvalidLoopData as exc:
        raise InvalidLoopData(f"{path}: {exc}") from exc


def _lift(x_intrinsic) -> np.ndarray:
    return np.concatenate([np.asarray(x_intrinsic, dtype=float), [0.0]])


def _unit(v) -> np.ndarray:
    return v / np.linalg.norm(v)


def _make_certificate(problem, x_intrinsic, method, iterations) -> CoincidenceCertificate:
    x = _lift(x_intrinsic)
    loop = problem.embed(x)
    residual = float(np.linalg.norm(coincidence_gap(problem.spec, loop)))
    return CoincidenceCertificate(x, loop, residual, loop.tf_distance(), iterations, method)


def _bisect_interval(g_of, a, b, ga, tol, max_steps=200):
    # ga is g at a; the sign change between a and b is assumed
    steps = 0
    for _ in range(max_steps):
        steps += 1
        mid = 0.5 * (a + b)
        gm = g_of(mid)
        if abs(gm) <= tol:
            return mid, steps, True
        if (gm > 0.0) == (ga > 0.0):
            a, ga = mid, gm
        else:
            b = mid
        if b - a < 1e-15:
            return mid, steps, abs(gm) <= tol
    return 0.5 * (a + b), steps, False


def _solve_bisection(problem, grid, gvals, config):
    """k = 1 refinement: find a sign change, then bisect the angle."""
    target = 0.5 * config.tol
    if problem.n == 2:
        # the grid is already an ordered half circle; close it with the
        # exact odd image of the first point
        gs = np.append(gvals[:, 0], -gvals[0, 0])
        theta = np.pi * np.arange(len(gs)) / (len(gs) - 1)

        def g_of(angle):
            return float(odd_map_g(problem, _lift([np.cos(angle), np.sin(angle)]))[0])

        flips = np.nonzero(np.sign(gs[:-1]) != np.sign(gs[1:]))[0]
        if flips.size == 0:
            return None, 0, False
        j = int(flips[0])
        angle, steps, ok = _bisect_interval(g_of, theta[j], theta[j + 1], float(gs[j]), target)
        return np.array([np.cos(angle), np.sin(angle)]), steps, ok
    # higher-dimensional equator: walk the half great circle from the best
    # grid point toward an orthogonal partner; g at angle pi is exactly -g(0)
    best = int(np.argmin(np.abs(gvals[:, 0])))
    x0 = grid[best]
    partner_axis = int(np.argmin(np.abs(x0)))
    e = np.zeros_like(x0)
    e[partner_axis] = 1.0
    y = _unit(e - float(e @ x0) * x0)

    def g_of(angle):
        return float(odd_map_g(problem, _lift(np.cos(angle) * x0 + np.sin(angle) * y))[0])

    coarse = 64
    angles = np.pi * np.arange(coarse + 1) / coarse
    gs = np.empty(coarse + 1)
    gs[0] = float(gvals[best, 0])
    gs[-1] = -gs[0]
    for j in range(1, coarse):
        gs[j] = g_of(angles[j])
    flips = np.nonzero(np.sign(gs[:-1]) != np.sign(gs[1:]))[0]
    if flips.size == 0:
        return None, coarse, False
    j = int(flips[0])
    angle, steps, ok = _bisect_interval(g_of, angles[j], angles[j + 1], float(gs[j]), target)
    return _unit(np.cos(angle) * x0 + np.sin(angle) * y), coarse + steps, ok


def _solve_gauss_newton(problem, x0, g0, config):
    """k >= 2 refinement: damped Gauss-Newton in intrinsic coordinates."""
    n = x0.size
    x = x0.copy()
    g = g0.copy()
    gn = float(np.linalg.norm(g))
    h = config.fd_step
    for it in range(1, config.iters + 1):
        if gn <= config.tol:
            return x, it - 1, True
        jac = np.empty((problem.k, n))
        for i in range(n):
            step = np.zeros(n)
            step[i] = h
            gp = odd_map_g(problem, _lift(_unit(x + step)))
            gm = odd_map_g(problem, _lift(_unit(x - step)))
            jac[:, i] = (gp - gm) / (2.0 * h)
        delta, *_ = np.linalg.lstsq(jac, -g, rcond=None)
        lam = 1.0
        accepted = False
        while lam >= 1.0 / 1024.0:
            xn = _unit(x + lam * delta)
            g_new = odd_map_g(problem, _lift(xn))
            gn_new = float(np.linalg.norm(g_new))
            if gn_new < gn:
                x, g, gn = xn, g_new, gn_new
                accepted = True
                break
            lam *= 0.5
        if not accepted:
            return x, it, gn <= config.tol
    return x, config.iters, gn <= config.tol


def solve_bu(problem: OddMapProblem, config: SolverConfig | None = None) -> CoincidenceCertificate:
    """Find a zero of the odd map and certify the coincident pair.

    Guaranteed regime is k <= n-1; larger k requires best-effort mode
    and raises NoConvergence (carrying the best grid candidate) when no
    zero is found.  Deterministic: same problem and config give the
    same certificate.
    """
    if config is None:
        config = SolverConfig()
    if problem.k > problem.n - 1 and not config.best_effort:
        raise RegimeError(
            f"k = {problem.k} functionals on the equator S^{problem.n - 1} is outside "
            "the guaranteed regime k <= n-1; enable best-effort mode to search anyway"
        )
    grid = hemisphere_grid(problem.n - 1, config.grid_points)
    gvals = np.array([odd_map_g(problem, _lift(p)) for p in grid])
    norms = np.linalg.norm(gvals, axis=1)
    best = int(np.argmin(norms))
    if norms[best] <= config.tol:
        return _make_certificate(problem, grid[best], "grid_only", 0)
    if problem.k == 1:
        x, iters, ok = _solve_bisection(problem, grid, gvals, config)
        if ok:
            return _make_certificate(problem, x, "bisection", iters)
        fallback = _make_certificate(problem, grid[best], "grid_only", iters)
        raise NoConvergence(
            f"bisection failed to certify (best residual {fallback.residual:.3e})",
            certificate=fallback,
        )
    x, iters, ok = _solve_gauss_newton(problem, grid[best].copy(), gvals[best], config)
    if ok:
        return _make_certificate(problem, x, "gauss_newton", iters)
    fallback = _make_certificate(problem, grid[best], "grid_only", iters)
    raise NoConvergence(
        f"Gauss-Newton stalled above tolerance (best residual {fallback.residual:.3e})",
        certificate=fallback,
    )


def _thread_count(threads) -> int:
    if threads is None:
        raw = os.environ.get("LOOPBU_THREADS", "1")
        try:
            threads = int(raw)
        except ValueError as exc:
            raise DegenerateInput(f"LOOPBU_THREADS must be an integer, got {raw!r}") from exc
    threads = int(threads)
    if threads == 0:
        return os.cpu_count() or 1
    if threads < 0:
        raise DegenerateInput(f"thread count must be >= 0, got {threads}")
    return threads


def family_demo(
    d: int,
    spec: FunctionalSpec,
    params: TfSphereParams,
    config: SolverConfig | None = None,
    *,
    n: int | None = None,
    fibers: int | None = None,
    threads: int | None = None,
    seed: int = 0,
) -> list:
    """Solve one coincidence problem per to-and-fro loop of a d-sphere.

    Sweeps a deterministic grid of coefficient vectors c on S^d, builds
    omega_c, and solves the gamma-embedding problem for each; a fiber
    whose solve raises NoConvergence contributes the carried best-grid
    certificate instead of aborting the sweep.  Certificates are
    returned in fiber order regardless of the thread count (set
    ``threads`` explicitly, or via LOOPBU_THREADS with 0 meaning one
    worker per CPU).
    """
    if config is None:
        config = SolverConfig()
    if n is None:
        dim = spec.dim
        if dim is None:
            raise DegenerateInput(
                "sphere dimension n is not determined by the functionals; pass n explicitly"
            )
        n = dim - 1
    if fibers is None:
        fibers = 2 if d == 0 else (64 if d == 1 else 256)
    grid = sphere_grid(d, fibers, seed)
    m = spec.m

    def solve_fiber(c):
        omega = tf_sphere_embed(c, params, m, n)
        prob = OddMapProblem(spec, n, m, "gamma", omega)
        try:
            return solve_bu(prob, config)
        except NoConvergence as exc:
            if exc.certificate is None:
                raise
            return exc.certificate

    workers = _thread_count(threads)
    if workers <= 1:
        return [solve_fiber(c) for c in grid]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(solve_fiber, grid))


def family_report(certs, tol: float) -> dict:
    """Summary block for a family sweep: fiber count, certified count, worst residual."""
    residuals = [cert.residual for cert in certs]
    return {
        "fibers": len(certs),
        "certified": int(sum(r <= tol for r in residuals)),
        "max_residual": max(residuals) if residuals else 0.0,
    }
