"""Command-line entry point: verify / spectrum / resolvent / green / oracle.

Every command writes one CSV (stdout by default, or --output FILE) and
prints a one-line summary to stderr.  Exit codes: 0 success, 2 config or
validation failure, 3 numeric failure (no root bracketed, degenerate
oracle, tolerance breach, non-finite output).  The default seed comes
from --seed, then the config, then the KREINX_SEED environment variable.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from .config import build_problem, parse_config
from .csvio import emit_csv
from .errors import (
    BranchCut,
    CsvWriteError,
    InvariantError,
    KreinxError,
    NonpositiveArgument,
    NonpositiveRadius,
    SchemaError,
    SpectrumHit,
)
from .greens import LaplacianGrid1DEvaluator, LaplacianKernel
from .krein import ExtensionProblem, krein_apply
from .matrixmodel import direct_eigs, random_model, random_theta
from .spectral import scan_spectrum
from .verify import run_verification

_VALIDATION_ERRORS = (
    SchemaError,
    InvariantError,
    BranchCut,
    NonpositiveRadius,
    NonpositiveArgument,
    SpectrumHit,
)


def _parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise InvariantError([f"cannot parse complex number from {text!r}"])


def _resolve_seed(args, cfg=None) -> int:
    if getattr(args, "seed", None) is not None:
        return int(args.seed)
    if cfg is not None and cfg.seed is not None:
        return int(cfg.seed)
    env = os.environ.get("KREINX_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise InvariantError([f"KREINX_SEED={env!r} is not an integer"])
    return 0


def _write(rows, schema, args) -> None:
    if args.output == "-":
        emit_csv(rows, schema, sys.stdout)
    else:
        emit_csv(rows, schema, args.output)


def _summary(text: str) -> None:
    print(text, file=sys.stderr)


def _load_config(args):
    return parse_config(Path(args.config).read_text(encoding="utf-8"))


def cmd_verify(args) -> int:
    seed = _resolve_seed(args)
    report = run_verification(
        seed,
        models=args.models,
        tol_matrix=args.tol_matrix,
        tol_quad=args.tol_quad,
    )
    _write(report.rows(), ["check", "residual", "tolerance", "pass"], args)
    failed = sum(1 for c in report.checks if not c.passed)
    _summary(
        f"verify: {len(report.checks)} checks, {failed} failed, seed={seed}, "
        f"{report.model_summary}"
    )
    return 0 if report.passed else 3


def cmd_spectrum(args) -> int:
    cfg = _load_config(args)
    if args.a is not None or args.b is not None or args.grid is not None:
        if cfg.scan is None and (args.a is None or args.b is None):
            raise InvariantError(["--a and --b are both required without a scan window"])
        cfg = cfg.with_scan(a=args.a, b=args.b, grid=args.grid)
    if cfg.scan is None:
        raise InvariantError(["spectrum needs a scan window (config 'scan' or --a/--b)"])
    built = build_problem(cfg)
    report = scan_spectrum(built.problem, (cfg.scan.a, cfg.scan.b), cfg.scan.grid)
    n = built.problem.theta.n
    schema = (
        ["root_index", "z0", "energy", "multiplicity", "residual"]
        + [f"Q_re_{j + 1}" for j in range(n)]
        + [f"Q_im_{j + 1}" for j in range(n)]
    )
    rows = []
    for i, root in enumerate(report.roots):
        rows.append(
            [i, root.z0, root.energy, root.multiplicity, root.residual]
            + [float(c.real) for c in root.charge]
            + [float(c.imag) for c in root.charge]
        )
    _write(rows, schema, args)
    _summary(
        f"spectrum: {len(report.roots)} roots in [{cfg.scan.a:g}, {cfg.scan.b:g}], "
        f"{len(report.diagnostics.warnings)} warnings"
    )
    return 0 if report.roots else 3


def cmd_resolvent(args) -> int:
    cfg = _load_config(args)
    z = _parse_complex(args.z) if args.z is not None else cfg.z
    if z is None:
        raise InvariantError(["resolvent needs z (config 'z' or --z)"])
    if cfg.f is None:
        raise InvariantError(["resolvent needs an input vector 'f' in the config"])
    f = np.array(cfg.f, dtype=complex)
    built = build_problem(cfg)

    if built.backend == "matrix":
        if f.size != built.model.n:
            raise InvariantError(
                [f"f has length {f.size}, the base matrix is {built.model.n}x{built.model.n}"]
            )
        result = krein_apply(built.problem, z, f)
        rows = [
            [i, float(f[i].real), float(f[i].imag), float(r.real), float(r.imag)]
            for i, r in enumerate(result)
        ]
        _write(rows, ["index", "f_re", "f_im", "rf_re", "rf_im"], args)
        _summary(f"resolvent: matrix backend, n={built.model.n}, z={z}")
        return 0

    if built.backend == "laplacian1d":
        if cfg.grid1d is None:
            raise InvariantError(["laplacian1d resolvent needs 'grid1d' in the config"])
        if cfg.grid1d.n < 2 or not cfg.grid1d.lo < cfg.grid1d.hi:
            raise InvariantError(["grid1d needs lo < hi and n >= 2"])
        xs = np.linspace(cfg.grid1d.lo, cfg.grid1d.hi, cfg.grid1d.n)
        if f.size != xs.size:
            raise InvariantError(
                [f"f has length {f.size}, grid1d has {xs.size} nodes"]
            )
        evaluator = LaplacianGrid1DEvaluator(built.ps, xs)
        problem = ExtensionProblem(
            evaluator, built.problem.theta, cfg.tol_linear, cfg.tol_root
        )
        result = krein_apply(problem, z, f)
        rows = [
            [float(xs[i]), float(f[i].real), float(f[i].imag), float(r.real), float(r.imag)]
            for i, r in enumerate(result)
        ]
        _write(rows, ["x", "f_re", "f_im", "rf_re", "rf_im"], args)
        _summary(f"resolvent: laplacian1d backend, {xs.size} nodes, z={z}")
        return 0

    raise InvariantError(
        [f"resolvent supports the matrix and laplacian1d backends, not {built.backend!r}"]
    )


def cmd_green(args) -> int:
    z = _parse_complex(args.z)
    kernel = LaplacianKernel(args.dim)
    radii = [float(r) for r in args.radii.split(",") if r.strip()]
    if not radii:
        raise InvariantError(["--radii must list at least one radius"])
    renorm = kernel.renormalized_diagonal(z)
    rows = []
    for r in radii:
        gzv = kernel.gz(r, z)
        rows.append(
            [r, kernel.g0(r), float(gzv.real), float(gzv.imag),
             float(renorm.real), float(renorm.imag)]
        )
    _write(rows, ["r", "g0", "gz_re", "gz_im", "renorm_re", "renorm_im"], args)
    _summary(f"green: dim={args.dim}, z={z}, {len(rows)} radii")
    return 0


def cmd_oracle(args) -> int:
    seed = _resolve_seed(args)
    if not 1 <= args.ncharges <= args.n:
        raise InvariantError(["need 1 <= ncharges <= n"])
    rng = np.random.default_rng(seed)
    model = random_model(rng, args.n, args.ncharges)
    theta = random_theta(rng, args.ncharges)
    eigs = direct_eigs(model, theta)
    rows = [[i, float(v)] for i, v in enumerate(eigs)]
    _write(rows, ["index", "eigenvalue"], args)

    from .krein import gamma_theta
    from .matrixmodel import MatrixEvaluator

    problem = ExtensionProblem(MatrixEvaluator(model), theta)
    defect = 0.0
    checked = 0
    for v in eigs:
        if model.spectrum_distance(v) > 1e-6 * (1.0 + float(np.max(np.abs(model.eigs)))):
            pencil = gamma_theta(problem, float(v))
            defect = max(defect, float(np.min(np.abs(np.linalg.eigvalsh(
                (pencil + pencil.conj().T) / 2.0
            )))))
            checked += 1
    _summary(
        f"oracle: seed={seed}, n={args.n}, N={args.ncharges}, "
        f"trace bound c={model.trace_bound_constant:.6g}, "
        f"max pencil defect over {checked} eigenvalues={defect:.3e}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kreinx",
        description="Rank-N singular perturbations: spectra, resolvents, kernels, verification",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run the identity verification suite")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--models", type=int, default=20)
    p.add_argument("--tol-matrix", type=float, default=1e-11, dest="tol_matrix")
    p.add_argument("--tol-quad", type=float, default=1e-6, dest="tol_quad")
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("spectrum", help="locate resolvent poles on a real interval")
    p.add_argument("--config", required=True)
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--b", type=float, default=None)
    p.add_argument("--grid", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("resolvent", help="apply the perturbed resolvent to a vector")
    p.add_argument("--config", required=True)
    p.add_argument("--z", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_resolvent)

    p = sub.add_parser("green", help="tabulate the free kernels to CSV")
    p.add_argument("--dim", type=int, choices=(1, 2, 3), required=True)
    p.add_argument("--z", required=True)
    p.add_argument("--radii", default="0.1,0.2,0.5,1,2,5,10")
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_green)

    p = sub.add_parser("oracle", help="seeded random model: direct spectrum table")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--ncharges", type=int, default=2)
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _VALIDATION_ERRORS as exc:
        _summary(f"error: {exc}")
        return 2
    except CsvWriteError as exc:
        _summary(f"output error: {exc}")
        return 3
    except KreinxError as exc:
        _summary(f"numeric failure: {exc}")
        return 3
    except FileNotFoundError as exc:
        _summary(f"error: {exc}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
