"""Integral functionals on loops and the reduced homogeneous system.

A FunctionalSpec bundles k scalar functionals, each either the squared
L2 distance to a fixed sampled path or a weighted coordinate integral.
The coincidence gap of a loop is f(alpha) - f(alpha*), computed by
composite trapezoid quadrature on the loop grid.

For squared-distance functionals the gap condition reduces to a
homogeneous linear system: writing h_j(t) = beta_j(1-t) - beta_j(t)
+ beta_j(1/2+t) - beta_j(1/2-t), a profile x supported on [0, 1/4]
yields a coincident pair exactly when the quarter-range integrals of
<x(t), h_j(t)> all vanish.  ``build_reduced_system`` assembles that
system over a finite sine basis, ``null_space`` extracts its kernel,
and ``build_alpha_x`` reconstructs the three-piece loop of a kernel
vector.  Because the grid size is a multiple of 16, every shifted
argument (1-t, 1/2+t, 1/2-t) lands on a grid node and is read off by
index arithmetic rather than interpolation.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .errors import DegenerateInput, GridMismatch, InsufficientBasis, InvalidLoopData
from .loops import Loop, as_grid_size

_trapz = getattr(np, "trapezoid", None) or np.trapz


def quadrature(values, dx: float | None = None) -> float:
    """Composite trapezoid rule over uniformly spaced samples.

    With ``dx`` omitted the samples are taken to span [0, 1].  Exact for
    affine integrands; error O(dx^2) for smooth ones.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or values.size < 2:
        raise DegenerateInput("quadrature needs a 1-d array of at least two samples")
    if dx is None:
        dx = 1.0 / (values.size - 1)
    return float(_trapz(values, dx=dx))


@dataclass(frozen=True)
class SquaredDistanceToPath:
    """f(alpha) = integral of ||alpha(t) - beta(t)||^2 dt."""

    beta: np.ndarray

    def __post_init__(self):
        beta = np.asarray(self.beta, dtype=float)
        if beta.ndim == 1:
            beta = beta[:, None]
        if beta.ndim != 2:
            raise DegenerateInput(f"reference path must be 2-d, got shape {beta.shape}")
        as_grid_size(beta.shape[0] - 1)
        if not np.all(np.isfinite(beta)):
            raise DegenerateInput("reference path contains non-finite values")
        beta = beta.copy()
        beta.setflags(write=False)
        object.__setattr__(self, "beta", beta)

    @property
    def m(self) -> int:
        return self.beta.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.beta.shape[1]

    def value(self, loop: Loop) -> float:
        if loop.ambient_dim != self.dim:
            raise GridMismatch(
                f"loop ambient dimension {loop.ambient_dim} vs path dimension {self.dim}"
            )
        return quadrature(np.sum((loop.samples - self.beta) ** 2, axis=1))


@dataclass(frozen=True)
class WeightedCoordinate:
    """f(alpha) = integral of w(t) * alpha(t)[axis] dt."""

    axis: int
    weight: np.ndarray

    def __post_init__(self):
        if self.axis < 0:
            raise DegenerateInput(f"axis must be nonnegative, got {self.axis}")
        weight = np.asarray(self.weight, dtype=float)
        if weight.ndim != 1:
            raise DegenerateInput(f"weight samples must be 1-d, got shape {weight.shape}")
        as_grid_size(weight.size - 1)
        if not np.all(np.isfinite(weight)):
            raise DegenerateInput("weight contains non-finite values")
        weight = weight.copy()
        weight.setflags(write=False)
        object.__setattr__(self, "weight", weight)

    @property
    def m(self) -> int:
        return self.weight.size - 1

    @property
    def dim(self):
        return None

    def value(self, loop: Loop) -> float:
        if self.axis >= loop.ambient_dim:
            raise GridMismatch(
                f"axis {self.axis} out of range for ambient dimension {loop.ambient_dim}"
            )
        return quadrature(self.weight * loop.samples[:, self.axis])


@dataclass(frozen=True)
class FunctionalSpec:
    """A k-vector of integral functionals sharing one grid."""

    components: tuple

    def __post_init__(self):
        components = tuple(self.components)
        if not components:
            raise DegenerateInput("a functional spec needs at least one component")
        for comp in components:
            if not isinstance(comp, (SquaredDistanceToPath, WeightedCoordinate)):
                raise DegenerateInput(f"unsupported component type {type(comp).__name__}")
        grids = {comp.m for comp in components}
        if len(grids) != 1:
            raise GridMismatch(f"components disagree on grid size: {sorted(grids)}")
        dims = {comp.dim for comp in components if comp.dim is not None}
        if len(dims) > 1:
            raise GridMismatch(f"components disagree on ambient dimension: {sorted(dims)}")
        object.__setattr__(self, "components", components)

    @property
    def k(self) -> int:
        return len(self.components)

    @property
    def m(self) -> int:
        return self.components[0].m

    @property
    def dim(self):
        """Ambient dimension pinned by the reference paths, if any."""
        for comp in self.components:
            if comp.dim is not None:
                return comp.dim
        return None


def eval_f(spec: FunctionalSpec, loop: Loop) -> np.ndarray:
    """Evaluate all k functionals on a loop."""
    if loop.m != spec.m:
        raise GridMismatch(f"loop grid m = {loop.m} vs functional grid m = {spec.m}")
    return np.array([comp.value(loop) for comp in spec.components])


def coincidence_gap(spec: FunctionalSpec, loop: Loop) -> np.ndarray:
    """f(alpha) - f(alpha*): zero exactly on coincident pairs.

    For squared-distance components this equals
    2 * integral of <alpha(t), beta_j(1-t) - beta_j(t)> dt,
    the reduction that drives the linear-system construction.
    """
    return eval_f(spec, loop) - eval_f(spec, loop.star())


def default_reduced_basis(size: int) -> tuple:
    """Profiles sin(4 pi a t), a = 1..size: they vanish at t = 0 and t = 1/4."""
    if size < 1:
        raise DegenerateInput(f"basis size must be >= 1, got {size}")
    return tuple((lambda t, a=a: np.sin(4.0 * np.pi * a * np.asarray(t))) for a in range(1, size + 1))


@dataclass(frozen=True)
class ReducedSystem:
    """The k x (N*n) matrix of quarter-range pairings.

    Column (a, i) holds the trapezoid integral over [0, 1/4] of
    phi_a(t) * h_{j,i}(t), laid out as a * path_dim + i.
    """

    matrix: np.ndarray
    basis: tuple
    basis_size: int
    path_dim: int
    m: int

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[1] != self.basis_size * self.path_dim:
            raise DegenerateInput(
                f"matrix shape {matrix.shape} does not match N*n = "
                f"{self.basis_size * self.path_dim}"
            )
        matrix = matrix.copy()
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "basis", tuple(self.basis))

    @property
    def k(self) -> int:
        return self.matrix.shape[0]


def build_reduced_system(betas, basis_size: int, basis=None) -> ReducedSystem:
    """Assemble the homogeneous system for the given reference paths.

    ``betas`` is a sequence of sampled paths, each of shape (m+1, n) on
    the same grid (1-d input is treated as n = 1).  Warns with
    InsufficientBasis when N*n <= k, because then a nontrivial kernel
    is no longer forced by dimension count.
    """
    paths = []
    for j, beta in enumerate(betas):
        arr = np.asarray(beta, dtype=float)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2:
            raise DegenerateInput(f"path {j} must be 1-d or 2-d, got shape {arr.shape}")
        paths.append(arr)
    if not paths:
        raise DegenerateInput("need at least one reference path")
    shape = paths[0].shape
    for j, arr in enumerate(paths):
        if arr.shape != shape:
            raise GridMismatch(f"path {j} has shape {arr.shape}, expected {shape}")
    m = as_grid_size(shape[0] - 1)
    path_dim = shape[1]
    k = len(paths)
    if basis is None:
        basis = default_reduced_basis(basis_size)
    else:
        basis = tuple(basis)
        if len(basis) != basis_size:
            raise DegenerateInput(f"expected {basis_size} basis functions, got {len(basis)}")
    if basis_size * path_dim <= k:
        warnings.warn(
            InsufficientBasis(
                f"N*n = {basis_size * path_dim} unknowns for k = {k} equations: "
                "a nontrivial kernel is not guaranteed"
            )
        )
    quarter = m // 4
    idx = np.arange(quarter + 1)
    tq = idx / m
    phi_vals = []
    for a, phi in enumerate(basis):
        vals = np.asarray(phi(tq), dtype=float)
        if abs(float(vals[0])) > 1e-12:
            raise DegenerateInput(f"basis function {a} does not vanish at t = 0")
        phi_vals.append(vals)
    matrix = np.empty((k, basis_size * path_dim))
    for j, beta in enumerate(paths):
        h = beta[m - idx] - beta[idx] + beta[m // 2 + idx] - beta[m // 2 - idx]
        for a in range(basis_size):
            weighted = phi_vals[a][:, None] * h
            for i in range(path_dim):
                matrix[j, a * path_dim + i] = quadrature(weighted[:, i], dx=1.0 / m)
    return ReducedSystem(matrix, basis, basis_size, path_dim, m)


def null_space(system, tol: float = 1e-10) -> np.ndarray:
    """Orthonormal kernel basis via singular-value thresholding.

    Accepts a ReducedSystem or a raw matrix; rows of the result span
    the null space.  Singular values below tol times the largest are
    treated as zero, so the kernel dimension is always at least
    columns - rows.
    """
    if tol <= 0.0:
        raise DegenerateInput("tolerance must be positive")
    matrix = system.matrix if isinstance(system, ReducedSystem) else np.asarray(system, dtype=float)
    _, svals, vt = np.linalg.svd(matrix)
    if svals.size and svals[0] > 0.0:
        rank = int(np.sum(svals > tol * svals[0]))
    else:
        rank = 0
    return vt[rank:].copy()


def build_alpha_x(coeffs, system: ReducedSystem, m: int) -> Loop:
    """Reconstruct the three-piece loop of a coefficient vector.

    The profile x(t) = sum_a phi_a(t) c_a runs on [0, 1/4], returns as
    x(1/2 - t) on [1/4, 1/2], and the loop sits at the origin for the
    remaining half.  Nonzero coefficients give a loop that differs from
    its reversal, while kernel coefficients zero out the coincidence gap.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    expected = system.basis_size * system.path_dim
    if coeffs.shape != (expected,):
        raise DegenerateInput(f"expected {expected} coefficients, got shape {coeffs.shape}")
    m = as_grid_size(m)
    quarter = m // 4
    tq = np.arange(quarter + 1) / m
    weights = coeffs.reshape(system.basis_size, system.path_dim)
    x_vals = np.zeros((quarter + 1, system.path_dim))
    for a, phi in enumerate(system.basis):
        x_vals += np.multiply.outer(np.asarray(phi(tq), dtype=float), weights[a])
    samples = np.zeros((m + 1, system.path_dim))
    samples[: quarter + 1] = x_vals
    samples[quarter : 2 * quarter + 1] = x_vals[::-1]
    return Loop(samples, np.zeros(system.path_dim), "euclidean")


def read_beta_path(path) -> np.ndarray:
    """Load a sampled reference path from JSON {"n", "m", "samples"}."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidLoopData(
                f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
            ) from exc
    if not isinstance(obj, dict):
        raise InvalidLoopData(f"{path}: top-level value must be an object")
    for field in ("n", "m", "samples"):
        if field not in obj:
            raise InvalidLoopData(f"{path}: missing field {field!r}")
    n, m = obj["n"], obj["m"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise InvalidLoopData(f"{path}: n: expected a positive integer, got {n!r}")
    if not isinstance(m, int) or isinstance(m, bool):
        raise InvalidLoopData(f"{path}: m: expected an integer, got {m!r}")
    try:
        samples = np.asarray(obj["samples"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidLoopData(f"{path}: samples: not a numeric matrix ({exc})") from exc
    if samples.ndim != 2 or samples.shape != (m + 1, n):
        raise InvalidLoopData(
            f"{path}: samples: expected shape ({m + 1}, {n}), got {samples.shape}"
        )
    if not np.all(np.isfinite(samples)):
        raise InvalidLoopData(f"{path}: samples: contains non-finite values")
    return samples


def write_beta_path(samples, path) -> None:
    samples = np.asarray(samples, dtype=float)
    if samples.ndim == 1:
        samples = samples[:, None]
    obj = {
        "n": int(samples.shape[1]),
        "m": int(samples.shape[0] - 1),
        "samples": [[float(v) for v in row] for row in samples],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def _component_from_block(block, idx: int, root: Path):
    label = f"component[{idx}]"
    if not isinstance(block, dict):
        raise InvalidLoopData(f"{label}: expected a table")
    kind = block.get("kind")
    if kind == "sqdist":
        if ("beta" in block) == ("beta_path" in block):
            raise InvalidLoopData(f"{label}: give exactly one of 'beta' or 'beta_path'")
        if "beta" in block:
            try:
                beta = np.asarray(block["beta"], dtype=float)
            except (TypeError, ValueError) as exc:
                raise InvalidLoopData(f"{label}.beta: not numeric ({exc})") from exc
        else:
            beta = read_beta_path(root / block["beta_path"])
        try:
            return SquaredDistanceToPath(beta)
        except DegenerateInput as exc:
            raise InvalidLoopData(f"{label}: {exc}") from exc
    if kind == "wcoord":
        axis = block.get("axis")
        if not isinstance(axis, int) or isinstance(axis, bool):
            raise InvalidLoopData(f"{label}.axis: expected an integer, got {axis!r}")
        if ("weight" in block) == ("weight_path" in block):
            raise InvalidLoopData(f"{label}: give exactly one of 'weight' or 'weight_path'")
        if "weight" in block:
            try:
                weight = np.asarray(block["weight"], dtype=float)
            except (TypeError, ValueError) as exc:
                raise InvalidLoopData(f"{label}.weight: not numeric ({exc})") from exc
        else:
            weight = read_beta_path(root / block["weight_path"])[:, 0]
        try:
            return WeightedCoordinate(axis, weight)
        except DegenerateInput as exc:
            raise InvalidLoopData(f"{label}: {exc}") from exc
    raise InvalidLoopData(f"{label}.kind: expected 'sqdist' or 'wcoord', got {kind!r}")


def load_functional_spec(path) -> FunctionalSpec:
    """Read a FunctionalSpec from TOML.

    The file holds [[component]] blocks with kind = "sqdist" (fields
    beta or beta_path) or kind = "wcoord" (fields axis plus weight or
    weight_path); file references are resolved relative to the TOML
    file's directory.
    """
    p = Path(path)
    with open(p, "rb") as fh:
        try:
            data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise InvalidLoopData(f"{path}: invalid TOML: {exc}") from exc
    blocks = data.get("component")
    if not isinstance(blocks, list) or not blocks:
        raise InvalidLoopData(f"{path}: expected at least one [[component]] block")
    components = [
        _component_from_block(block, idx, p.parent) for idx, block in enumerate(blocks)
    ]
    try:
        return FunctionalSpec(tuple(components))
    except (DegenerateInput, GridMismatch) as exc:
        raise InvalidLoopData(f"{path}: {exc}") from exc
