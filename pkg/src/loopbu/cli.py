"""Command-line surface: construct, transform, solve, verify, export.

Exit codes: 0 on success (and on every certified result), 2 on invalid
input or an out-of-regime problem, 3 when a computation ran but did not
certify (solver fallback, an uncertified fiber, a residual above the
bound, or a failed verify predicate).
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass

import numpy as np

from .coincidence import (
    OddMapProblem,
    SolverConfig,
    family_demo,
    family_report,
    save_certificate,
    solve_bu,
)
from .embeddings import (
    TfSphereParams,
    default_tf_params,
    embed_alpha,
    embed_beta,
    embed_gamma,
    h_lambda,
)
from .errors import DegenerateInput, GridMismatch, LoopspaceError, NoConvergence
from .functionals import (
    FunctionalSpec,
    SquaredDistanceToPath,
    build_alpha_x,
    build_reduced_system,
    coincidence_gap,
    load_functional_spec,
    null_space,
    read_beta_path,
)
from .loops import (
    GeodesicArc,
    Loop,
    PushoffArcs,
    as_grid_size,
    default_pushoff_arcs,
    load_loop,
    loop_to_dict,
    pushoff_homotopy,
    save_loop,
)


@dataclass(frozen=True)
class RunConfig:
    """Shared run parameters resolved from command-line flags."""

    m: int = 256
    tf_tol: float = 1e-8
    solver_tol: float = 1e-8
    kernel_tol: float = 1e-10
    seed: int = 0

    def __post_init__(self):
        as_grid_size(self.m)
        for name in ("tf_tol", "solver_tol", "kernel_tol"):
            if not getattr(self, name) > 0.0:
                raise DegenerateInput(f"{name} must be positive")


def _parse_vector(text: str) -> np.ndarray:
    tokens = [tok for tok in re.split(r"[,\s]+", text.strip()) if tok]
    if not tokens:
        raise DegenerateInput(f"empty coordinate vector {text!r}")
    try:
        return np.array([float(tok) for tok in tokens])
    except ValueError as exc:
        raise DegenerateInput(f"bad coordinate vector {text!r}: {exc}") from exc


def _write_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def cmd_pushoff(args) -> int:
    loop = load_loop(args.infile)
    if args.mu is not None or args.nu is not None:
        if args.mu is None or args.nu is None:
            raise DegenerateInput("give both --mu and --nu or neither")
        length = float(args.arc_length)
        arcs = PushoffArcs(
            GeodesicArc(loop.base, _parse_vector(args.mu), length),
            GeodesicArc(loop.base, _parse_vector(args.nu), length),
        )
    else:
        arcs = default_pushoff_arcs(loop.n)
    before = loop.tf_distance()
    out = pushoff_homotopy(loop, args.s, arcs)
    save_loop(out, args.out)
    print(f"tf_distance before: {before:.17g}")
    print(f"tf_distance after:  {out.tf_distance():.17g}")
    return 0


def cmd_embed(args) -> int:
    cfg = RunConfig(m=256 if args.m is None else args.m)
    x = _parse_vector(args.x)
    if args.kind == "alpha":
        loop = embed_alpha(x, cfg.m)
    elif args.kind == "beta":
        loop = embed_beta(x, cfg.m, rotate=args.rotate)
    elif args.kind == "hlambda":
        loop = h_lambda(x, args.lam, cfg.m)
    else:
        if args.omega is None:
            raise DegenerateInput("--kind gamma needs --omega")
        omega = load_loop(args.omega)
        if args.m is not None and args.m != omega.m:
            raise GridMismatch(
                f"--m {args.m} conflicts with the omega grid m = {omega.m}"
            )
        loop = embed_gamma(omega, x)
    save_loop(loop, args.out)
    print(f"wrote {args.kind} loop: m = {loop.m}, tf_distance = {loop.tf_distance():.17g}")
    return 0


def _resolve_problem(args) -> tuple:
    spec = load_functional_spec(args.spec)
    n = args.n
    if n is None:
        if spec.dim is None:
            raise DegenerateInput(
                "the functionals do not pin the sphere dimension; pass --n"
            )
        n = spec.dim - 1
    omega = None
    if args.embedding == "gamma":
        if args.omega is None:
            raise DegenerateInput("--embedding gamma needs --omega")
        omega = load_loop(args.omega)
    problem = OddMapProblem(spec, n, spec.m, args.embedding, omega)
    return spec, problem


def cmd_solve(args) -> int:
    cfg = RunConfig(m=256, solver_tol=args.tol)
    spec, problem = _resolve_problem(args)
    config = SolverConfig(
        tol=cfg.solver_tol, grid_points=args.grid, best_effort=args.best_effort
    )
    code = 0
    try:
        cert = solve_bu(problem, config)
    except NoConvergence as exc:
        if exc.certificate is None:
            raise
        cert = exc.certificate
        code = 3
        print(f"warning: {exc}", file=sys.stderr)
    save_certificate(cert, args.out)
    print(f"method: {cert.method}")
    print(f"iterations: {cert.iterations}")
    print(f"residual: {cert.residual:.17g}")
    print(f"tf_distance: {cert.tf_dist:.17g}")
    return code


def cmd_family(args) -> int:
    cfg = RunConfig(m=256, solver_tol=args.tol, seed=args.seed)
    spec = load_functional_spec(args.spec)
    n = args.n
    if n is None:
        if spec.dim is None:
            raise DegenerateInput("the functionals do not pin the sphere dimension; pass --n")
        n = spec.dim - 1
    if args.amplitude is None:
        params = default_tf_params(args.d)
    else:
        params = TfSphereParams(args.d, args.amplitude, default_tf_params(args.d).basis)
    config = SolverConfig(tol=cfg.solver_tol, grid_points=args.grid)
    certs = family_demo(
        args.d, spec, params, config,
        n=n, fibers=args.fibers, threads=args.threads, seed=cfg.seed,
    )
    summary = family_report(certs, config.tol)
    _write_json({"certificates": [c.to_dict() for c in certs], "summary": summary}, args.out)
    print(
        f"fibers: {summary['fibers']}  certified: {summary['certified']}  "
        f"max_residual: {summary['max_residual']:.17g}"
    )
    return 0 if summary["certified"] == summary["fibers"] else 3


def cmd_linear_family(args) -> int:
    cfg = RunConfig(m=256, kernel_tol=args.kernel_tol)
    betas = [read_beta_path(p) for p in args.beta]
    system = build_reduced_system(betas, args.basis_size)
    kernel = null_space(system, cfg.kernel_tol)
    spec = FunctionalSpec(tuple(SquaredDistanceToPath(b) for b in betas))
    loops = [build_alpha_x(c, system, system.m) for c in kernel]
    residuals = [float(np.linalg.norm(coincidence_gap(spec, loop))) for loop in loops]
    scale = max(1.0, max(float(np.max(np.abs(b))) for b in betas))
    bound = 5.0 / system.m**2 * scale
    _write_json(
        {
            "kernel_dim": int(kernel.shape[0]),
            "basis": [[float(v) for v in row] for row in kernel],
            "loops": [loop_to_dict(loop) for loop in loops],
            "residuals": residuals,
        },
        args.out,
    )
    worst = max(residuals) if residuals else 0.0
    print(f"kernel_dim: {kernel.shape[0]}")
    print(f"max_residual: {worst:.17g} (bound {bound:.17g})")
    return 0 if worst <= bound else 3


def cmd_verify(args) -> int:
    cfg = RunConfig(tf_tol=args.tol)
    loop = load_loop(args.loop)
    spec = load_functional_spec(args.spec)
    gap = float(np.linalg.norm(coincidence_gap(spec, loop)))
    tf = loop.tf_distance()
    print(f"gap: {gap:.17g}")
    print(f"tf_distance: {tf:.17g}")
    ok = gap <= cfg.tf_tol and tf > cfg.tf_tol
    print("coincidence: yes" if ok else "coincidence: no")
    return 0 if ok else 3


def cmd_export_plot(args) -> int:
    loop = load_loop(args.infile)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("t," + ",".join(f"x{i + 1}" for i in range(loop.ambient_dim)) + "\n")
        for i, row in enumerate(loop.samples):
            t = i / loop.m
            fh.write(f"{t!r}," + ",".join(repr(float(v)) for v in row) + "\n")
    print(f"wrote {loop.m + 1} rows")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="loopbu",
        description="Loops on spheres: push-offs, equivariant embeddings, coincidence solving.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pushoff", help="deform a loop off the to-and-fro set")
    p.add_argument("--in", dest="infile", required=True, help="input Loop JSON")
    p.add_argument("--s", type=float, default=1.0, help="deformation stage in [0, 1]")
    p.add_argument("--out", required=True, help="output Loop JSON")
    p.add_argument("--mu", help="spur direction at the base (tangent vector)")
    p.add_argument("--nu", help="second spur direction")
    p.add_argument("--arc-length", type=float, default=np.pi / 2, help="spur arc length in radians")
    p.set_defaults(func=cmd_pushoff)

    p = sub.add_parser("embed", help="build an embedding loop")
    p.add_argument("--kind", choices=["alpha", "beta", "gamma", "hlambda"], required=True)
    p.add_argument("--x", required=True, help="equatorial point, comma separated")
    p.add_argument("--m", type=int, help="grid size, multiple of 16 (default 256)")
    p.add_argument("--rotate", action="store_true", help="beta only: rotate the base to s0")
    p.add_argument("--lambda", dest="lam", type=float, default=0.0, help="hlambda stage")
    p.add_argument("--omega", help="gamma only: to-and-fro Loop JSON")
    p.add_argument("--out", required=True, help="output Loop JSON")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("solve", help="find a coincident pair for a functional spec")
    p.add_argument("--spec", required=True, help="FunctionalSpec TOML")
    p.add_argument("--n", type=int, help="sphere dimension (default: from the spec paths)")
    p.add_argument("--embedding", choices=["alpha", "gamma"], default="alpha")
    p.add_argument("--omega", help="gamma only: to-and-fro Loop JSON")
    p.add_argument("--tol", type=float, default=1e-8, help="residual tolerance on g")
    p.add_argument("--grid", type=int, default=4096, help="hemisphere grid size")
    p.add_argument("--best-effort", action="store_true", help="allow k > n-1 searches")
    p.add_argument("--out", required=True, help="output certificate JSON")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("family", help="sweep a d-sphere of to-and-fro loops")
    p.add_argument("--spec", required=True, help="FunctionalSpec TOML")
    p.add_argument("--d", type=int, required=True, help="family sphere dimension")
    p.add_argument("--n", type=int, help="loop sphere dimension (default: from the spec paths)")
    p.add_argument("--fibers", type=int, help="grid size on S^d (default 64 for d=1, 256 for d=2)")
    p.add_argument("--amplitude", type=float, help="override the meridian amplitude")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--grid", type=int, default=4096, help="hemisphere grid per fiber")
    p.add_argument("--threads", type=int, help="worker threads (default LOOPBU_THREADS or 1)")
    p.add_argument("--seed", type=int, default=0, help="seed for d >= 3 fiber grids")
    p.add_argument("--out", required=True, help="output report JSON")
    p.set_defaults(func=cmd_family)

    p = sub.add_parser("linear-family", help="kernel family of the reduced linear system")
    p.add_argument("--beta", action="append", required=True, help="reference path JSON (repeatable)")
    p.add_argument("--basis-size", type=int, required=True, help="number of profile functions N")
    p.add_argument("--kernel-tol", type=float, default=1e-10, help="relative singular-value cutoff")
    p.add_argument("--out", required=True, help="output family JSON")
    p.set_defaults(func=cmd_linear_family)

    p = sub.add_parser("verify", help="check a loop against a functional spec")
    p.add_argument("--loop", required=True, help="Loop JSON")
    p.add_argument("--spec", required=True, help="FunctionalSpec TOML")
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("export-plot", help="dump loop samples as CSV")
    p.add_argument("--in", dest="infile", required=True, help="input Loop JSON")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_export_plot)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except LoopspaceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
