"""Command-line front end.

Subcommands: ``identities`` (consistency suites on random fields),
``check`` (material definiteness screening), ``convert`` (curvature
representation change on field files), ``energy`` (functional
evaluation for a given state) and ``minimize`` (direct energy
minimization).  Machine-readable lines use 17 significant digits;
human-readable tables use 6.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .config import build_material, build_minimize_config, build_problem, load_config
from .curvature import REPRESENTATIONS, SECOND_ORDER, convert_array
from .fields import Mat3Field, RotationField, Ten3Field, VectorField, read_field, write_field
from .functional import energy_breakdown
from .identities import run_identities
from .materials import check_definiteness
from .minimize import Status, minimize

__all__ = ["main"]

_EXIT_BY_STATUS = {
    Status.CONVERGED: 0,
    Status.MAX_ITERATIONS: 2,
    Status.LINE_SEARCH_FAILURE: 3,
}


def _thread_cap(n: int | None):
    if n is None:
        return
    # caps worker pools where supported; results are identical either way
    # because all reductions run in a fixed order
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(var, str(n))
    try:
        import threadpoolctl

        threadpoolctl.threadpool_limits(limits=n)
    except ImportError:
        pass


def cmd_identities(args) -> int:
    results = run_identities(seed=args.seed, n_samples=args.samples, grid_n=args.grid_n)
    width = max(len(r.name) for r in results)
    print(f"identity suite: seed={args.seed} samples={args.samples} grid_n={args.grid_n}")
    failed = []
    for r in results:
        status = "ok" if r.ok else "FAIL"
        print(f"{r.name:<{width}}  max_error = {r.error:12.6e}  tol = {r.tol:8.1e}  {status}")
    for r in results:
        print(f"identity.{r.name.replace(' ', '_')} = {r.error:.17g}")
        if not r.ok:
            failed.append(r.name)
    if failed:
        print(f"FAILED identities: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


def cmd_check(args) -> int:
    cfg = load_config(args.config)
    mat = build_material(cfg)
    report = check_definiteness(mat.moduli, mat.curvature, mat.chiral)
    print(report.to_text())
    print(report.to_machine())
    return 0 if report.definite else 1


def cmd_convert(args) -> int:
    if args.rep_from not in REPRESENTATIONS or args.rep_to not in REPRESENTATIONS:
        print(f"representations must be one of {', '.join(REPRESENTATIONS)}", file=sys.stderr)
        return 1
    field = read_field(args.input)
    if isinstance(field, (VectorField, RotationField)):
        print("convert expects a mat3 or ten3 curvature field", file=sys.stderr)
        return 1
    want_second = args.rep_from in SECOND_ORDER
    if want_second != isinstance(field, Mat3Field):
        print(
            f"file payload does not match representation {args.rep_from!r}",
            file=sys.stderr,
        )
        return 1
    out = convert_array(field.data, args.rep_from, args.rep_to)
    grid = field.grid
    if args.rep_to in SECOND_ORDER:
        write_field(args.output, Mat3Field(grid, out))
    else:
        write_field(args.output, Ten3Field(grid, out))
    print(f"converted {args.rep_from} -> {args.rep_to}: {args.input} -> {args.output}")
    return 0


def cmd_energy(args) -> int:
    cfg = load_config(args.config)
    prob = build_problem(cfg)
    phi = read_field(args.phi)
    rot = read_field(args.rotation)
    if not isinstance(phi, VectorField) or not isinstance(rot, RotationField):
        print("energy expects a vector deformation file and a rotation file", file=sys.stderr)
        return 1
    parts = energy_breakdown(phi, rot, prob)
    for key in ("I", "W_mp", "W_curv", "W_chiral", "Pi", "Pi_f", "Pi_N", "Pi_M", "Pi_Mc"):
        print(f"{key} = {parts[key]:.17g}")
    return 0


def cmd_minimize(args) -> int:
    cfg = load_config(args.config)
    prob = build_problem(cfg)
    mcfg = build_minimize_config(cfg, relaxed_override=True if args.relaxed else None)
    if args.seed is not None:
        import dataclasses

        mcfg = dataclasses.replace(mcfg, random_seed=args.seed)
    result = minimize(prob, mcfg)
    outdir = args.out
    os.makedirs(outdir, exist_ok=True)
    write_field(os.path.join(outdir, "phi.field"), result.phi)
    write_field(os.path.join(outdir, "rotation.field"), result.rot)
    trace_path = os.path.join(outdir, "trace.csv")
    with open(trace_path, "w") as fh:
        fh.write("iter,energy,grad_norm,step\n")
        for i, (e, g, s) in enumerate(
            zip(result.energy_trace, result.grad_trace, result.step_trace)
        ):
            fh.write(f"{i},{e:.17g},{g:.17g},{s:.17g}\n")
    print(f"status = {result.status.value}")
    print(f"iterations = {result.iterations}")
    print(f"energy = {result.energy_trace[-1]:.17g}")
    print(f"grad_norm = {result.grad_trace[-1]:.17g}")
    print(f"max_so3_defect = {result.max_so3_defect:.17g}")
    print(f"wrote {outdir}/phi.field, rotation.field, trace.csv")
    return _EXIT_BY_STATUS[result.status]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cosserat",
        description="Nonlinear Cosserat elasticity toolkit: identities, screening, "
        "curvature conversion, energy evaluation and direct minimization.",
    )
    parser.add_argument("--threads", type=int, default=None, help="cap worker threads")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("identities", help="run the identity suites")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--grid-n", dest="grid_n", type=int, default=9)
    p.set_defaults(fn=cmd_identities)

    p = sub.add_parser("check", help="screen material parameters for definiteness")
    p.add_argument("--config", required=True)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("convert", help="convert a curvature field between representations")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--from", dest="rep_from", required=True, choices=REPRESENTATIONS)
    p.add_argument("--to", dest="rep_to", required=True, choices=REPRESENTATIONS)
    p.set_defaults(fn=cmd_convert)

    p = sub.add_parser("energy", help="evaluate the energy functional for a state")
    p.add_argument("--config", required=True)
    p.add_argument("phi")
    p.add_argument("rotation")
    p.set_defaults(fn=cmd_energy)

    p = sub.add_parser("minimize", help="minimize the energy functional")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default="out")
    p.add_argument("--relaxed", action="store_true", help="leave rotations unconstrained")
    p.add_argument("--seed", type=int, default=None, help="override minimize.seed")
    p.set_defaults(fn=cmd_minimize)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    _thread_cap(args.threads)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
