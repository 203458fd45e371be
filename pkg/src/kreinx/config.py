"""JSON-shaped problem configuration: parsing, validation, round-trip.

Complex scalars are written as ``[re, im]`` pairs (plain numbers are
accepted on input for real values).  Parsing is two-phase: structural
problems (unknown keys, wrong shapes) raise SchemaError and semantic
problems (non-hermitian coupling, coincident points, a scan window
touching the essential spectrum) raise InvariantError; each error
carries every violation found, not just the first.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Optional

from .errors import InvariantError, KreinxError, SchemaError
from .greens import LaplacianPointEvaluator, PointSet
from .krein import ExtensionProblem, ThetaMatrix
from .matrixmodel import MatrixEvaluator, MatrixModel
from .multiplier import Multiplier1D, MultiplierAnchoredEvaluator

BACKENDS = ("matrix", "laplacian1d", "laplacian2d", "laplacian3d", "multiplier1d")
_TOP_KEYS = {
    "backend", "matrix", "points", "symbol", "theta", "scan",
    "tolerances", "seed", "z", "f", "grid1d",
}


@dataclass(frozen=True)
class ScanWindow:
    a: float
    b: float
    grid: int = 512


@dataclass(frozen=True)
class Grid1D:
    lo: float
    hi: float
    n: int


@dataclass(frozen=True)
class ProblemConfig:
    backend: str
    theta: tuple
    matrix_a: Optional[tuple] = None
    matrix_tau: Optional[tuple] = None
    points: Optional[tuple] = None
    symbol_poly: Optional[tuple] = None
    symbol_cos: tuple = ()
    symbol_anchor: Optional[float] = None
    scan: Optional[ScanWindow] = None
    tol_linear: float = 1e-12
    tol_root: float = 1e-10
    seed: Optional[int] = None
    z: Optional[complex] = None
    f: Optional[tuple] = None
    grid1d: Optional[Grid1D] = None

    def with_scan(self, a=None, b=None, grid=None) -> "ProblemConfig":
        base = self.scan or ScanWindow(a=0.0, b=0.0)
        new = ScanWindow(
            a=base.a if a is None else float(a),
            b=base.b if b is None else float(b),
            grid=base.grid if grid is None else int(grid),
        )
        return replace(self, scan=new)


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _complex_entry(v, path, errs) -> complex:
    if _is_number(v):
        return complex(float(v))
    if (
        isinstance(v, list)
        and len(v) == 2
        and all(_is_number(c) for c in v)
    ):
        return complex(float(v[0]), float(v[1]))
    errs.append(f"{path}: expected a number or [re, im] pair, got {v!r}")
    return 0j


def _float_entry(v, path, errs) -> float:
    if _is_number(v):
        return float(v)
    errs.append(f"{path}: expected a number, got {v!r}")
    return 0.0


def _int_entry(v, path, errs) -> int:
    if isinstance(v, int) and not isinstance(v, bool):
        return v
    errs.append(f"{path}: expected an integer, got {v!r}")
    return 0


def _complex_matrix(v, path, errs) -> tuple:
    if not (isinstance(v, list) and v and all(isinstance(r, list) for r in v)):
        errs.append(f"{path}: expected a nested list of rows, got {v!r}")
        return ()
    widths = {len(r) for r in v}
    if len(widths) != 1:
        errs.append(f"{path}: rows have unequal lengths {sorted(widths)}")
        return ()
    return tuple(
        tuple(_complex_entry(c, f"{path}[{i}][{j}]", errs) for j, c in enumerate(row))
        for i, row in enumerate(v)
    )


def _point_rows(v, dim, path, errs) -> tuple:
    if not isinstance(v, list) or not v:
        errs.append(f"{path}: expected a nonempty list of points")
        return ()
    rows = []
    for i, item in enumerate(v):
        if _is_number(item):
            if dim != 1:
                errs.append(f"{path}[{i}]: flat coordinates only valid in dim 1")
                return ()
            rows.append((float(item),))
        elif isinstance(item, list) and len(item) == dim and all(
            _is_number(c) for c in item
        ):
            rows.append(tuple(float(c) for c in item))
        else:
            errs.append(f"{path}[{i}]: expected {dim} coordinates, got {item!r}")
    return tuple(rows)


def parse_config(text: str) -> ProblemConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError([f"not valid JSON: {exc}"])
    if not isinstance(raw, dict):
        raise SchemaError(["top level must be a JSON object"])

    errs = []
    for key in raw:
        if key not in _TOP_KEYS:
            errs.append(f"unknown key {key!r}")

    backend = raw.get("backend")
    if backend not in BACKENDS:
        errs.append(f"backend must be one of {BACKENDS}, got {backend!r}")
        backend = "matrix"

    if "theta" not in raw:
        errs.append("missing required key 'theta'")
    theta = _complex_matrix(raw.get("theta", [[0.0]]), "theta", errs)

    matrix_a = matrix_tau = None
    if backend == "matrix":
        block = raw.get("matrix")
        if not isinstance(block, dict):
            errs.append("backend 'matrix' requires a 'matrix' object with 'a' and 'tau'")
        else:
            for key in block:
                if key not in ("a", "tau"):
                    errs.append(f"matrix.{key}: unknown key")
            matrix_a = _complex_matrix(block.get("a", [[1.0]]), "matrix.a", errs)
            matrix_tau = _complex_matrix(block.get("tau", [[1.0]]), "matrix.tau", errs)
    elif "matrix" in raw:
        errs.append(f"'matrix' payload is invalid for backend {backend!r}")

    dim_of = {"laplacian1d": 1, "laplacian2d": 2, "laplacian3d": 3, "multiplier1d": 1}
    points = None
    if backend in dim_of:
        if "points" not in raw:
            errs.append(f"backend {backend!r} requires 'points'")
        else:
            points = _point_rows(raw["points"], dim_of[backend], "points", errs)
    elif "points" in raw:
        errs.append(f"'points' is invalid for backend {backend!r}")

    symbol_poly = None
    symbol_cos = ()
    symbol_anchor = None
    if backend == "multiplier1d":
        block = raw.get("symbol")
        if not isinstance(block, dict):
            errs.append("backend 'multiplier1d' requires a 'symbol' object")
        else:
            for key in block:
                if key not in ("poly", "cos", "anchor"):
                    errs.append(f"symbol.{key}: unknown key")
            poly = block.get("poly")
            if isinstance(poly, list) and poly and all(_is_number(c) for c in poly):
                symbol_poly = tuple(float(c) for c in poly)
            else:
                errs.append("symbol.poly: expected a list of numbers")
            cos = block.get("cos", [])
            if isinstance(cos, list) and all(
                isinstance(t, list) and len(t) == 2 and all(_is_number(c) for c in t)
                for t in cos
            ):
                symbol_cos = tuple((float(k), float(c)) for k, c in cos)
            else:
                errs.append("symbol.cos: expected a list of [frequency, coefficient] pairs")
            if "anchor" not in block:
                errs.append("symbol.anchor: required (the reference point of the anchored difference)")
            else:
                symbol_anchor = _float_entry(block["anchor"], "symbol.anchor", errs)
    elif "symbol" in raw:
        errs.append(f"'symbol' is invalid for backend {backend!r}")

    scan = None
    if "scan" in raw:
        block = raw["scan"]
        if not isinstance(block, dict):
            errs.append("scan: expected an object with 'a', 'b', optional 'grid'")
        else:
            for key in block:
                if key not in ("a", "b", "grid"):
                    errs.append(f"scan.{key}: unknown key")
            scan = ScanWindow(
                a=_float_entry(block.get("a", 0.0), "scan.a", errs),
                b=_float_entry(block.get("b", 0.0), "scan.b", errs),
                grid=_int_entry(block.get("grid", 512), "scan.grid", errs),
            )

    tol_linear, tol_root = 1e-12, 1e-10
    if "tolerances" in raw:
        block = raw["tolerances"]
        if not isinstance(block, dict):
            errs.append("tolerances: expected an object")
        else:
            for key in block:
                if key not in ("tol_linear", "tol_root"):
                    errs.append(f"tolerances.{key}: unknown key")
            if "tol_linear" in block:
                tol_linear = _float_entry(block["tol_linear"], "tolerances.tol_linear", errs)
            if "tol_root" in block:
                tol_root = _float_entry(block["tol_root"], "tolerances.tol_root", errs)

    seed = None
    if "seed" in raw:
        seed = _int_entry(raw["seed"], "seed", errs)

    z = None
    if "z" in raw:
        z = _complex_entry(raw["z"], "z", errs)

    f = None
    if "f" in raw:
        if isinstance(raw["f"], list) and raw["f"]:
            f = tuple(
                _complex_entry(v, f"f[{i}]", errs) for i, v in enumerate(raw["f"])
            )
        else:
            errs.append("f: expected a nonempty list")

    grid1d = None
    if "grid1d" in raw:
        block = raw["grid1d"]
        if not isinstance(block, dict) or set(block) - {"lo", "hi", "n"}:
            errs.append("grid1d: expected an object with 'lo', 'hi', 'n'")
        else:
            grid1d = Grid1D(
                lo=_float_entry(block.get("lo", 0.0), "grid1d.lo", errs),
                hi=_float_entry(block.get("hi", 0.0), "grid1d.hi", errs),
                n=_int_entry(block.get("n", 0), "grid1d.n", errs),
            )

    if errs:
        raise SchemaError(errs)

    cfg = ProblemConfig(
        backend=backend,
        theta=theta,
        matrix_a=matrix_a,
        matrix_tau=matrix_tau,
        points=points,
        symbol_poly=symbol_poly,
        symbol_cos=symbol_cos,
        symbol_anchor=symbol_anchor,
        scan=scan,
        tol_linear=tol_linear,
        tol_root=tol_root,
        seed=seed,
        z=z,
        f=f,
        grid1d=grid1d,
    )
    _check_invariants(cfg)
    return cfg


def _check_invariants(cfg: ProblemConfig) -> None:
    viols = []

    n = len(cfg.theta)
    if any(len(row) != n for row in cfg.theta):
        viols.append("theta must be square")
    else:
        for j in range(n):
            for k in range(n):
                if cfg.theta[j][k] != cfg.theta[k][j].conjugate():
                    viols.append("theta is not hermitian (exact equality required)")
                    break
            else:
                continue
            break

    if cfg.points is not None:
        seen = set()
        for p in cfg.points:
            if p in seen:
                viols.append(f"coincident points: {p!r} appears twice")
                break
            seen.add(p)
        if len(cfg.points) != n and not any("square" in v for v in viols):
            viols.append(
                f"theta is {n}x{n} but there are {len(cfg.points)} points"
            )

    if cfg.matrix_a is not None:
        rows = len(cfg.matrix_tau)
        if rows != n:
            viols.append(f"theta is {n}x{n} but tau has {rows} rows")
        try:
            MatrixModel(cfg.matrix_a, cfg.matrix_tau)
        except InvariantError as exc:
            viols.extend(exc.violations)

    if cfg.symbol_poly is not None:
        try:
            Multiplier1D(poly=cfg.symbol_poly, cos_terms=cfg.symbol_cos)
        except InvariantError as exc:
            viols.extend(exc.violations)

    if cfg.scan is not None:
        if not cfg.scan.a < cfg.scan.b:
            viols.append(f"scan window needs a < b, got ({cfg.scan.a}, {cfg.scan.b})")
        if cfg.scan.grid < 3:
            viols.append("scan.grid must be at least 3")
        if cfg.backend.startswith("laplacian") and cfg.scan.a <= 0.0:
            viols.append(
                "laplacian scan window must satisfy a > 0 "
                "(the interval would touch the essential spectrum (-inf, 0])"
            )

    if not (cfg.tol_linear > 0.0 and cfg.tol_root > 0.0):
        viols.append("tolerances must be positive")

    if viols:
        raise InvariantError(viols)


def serialize_config(cfg: ProblemConfig) -> str:
    """Canonical JSON text; parse_config(serialize_config(c)) == c."""

    def pair(c: complex):
        return [c.real, c.imag]

    out: dict = {
        "backend": cfg.backend,
        "theta": [[pair(c) for c in row] for row in cfg.theta],
    }
    if cfg.matrix_a is not None:
        out["matrix"] = {
            "a": [[pair(c) for c in row] for row in cfg.matrix_a],
            "tau": [[pair(c) for c in row] for row in cfg.matrix_tau],
        }
    if cfg.points is not None:
        out["points"] = [list(p) for p in cfg.points]
    if cfg.symbol_poly is not None:
        out["symbol"] = {
            "poly": list(cfg.symbol_poly),
            "cos": [list(t) for t in cfg.symbol_cos],
            "anchor": cfg.symbol_anchor,
        }
    if cfg.scan is not None:
        out["scan"] = {"a": cfg.scan.a, "b": cfg.scan.b, "grid": cfg.scan.grid}
    out["tolerances"] = {"tol_linear": cfg.tol_linear, "tol_root": cfg.tol_root}
    if cfg.seed is not None:
        out["seed"] = cfg.seed
    if cfg.z is not None:
        out["z"] = pair(cfg.z)
    if cfg.f is not None:
        out["f"] = [pair(c) for c in cfg.f]
    if cfg.grid1d is not None:
        out["grid1d"] = {"lo": cfg.grid1d.lo, "hi": cfg.grid1d.hi, "n": cfg.grid1d.n}
    return json.dumps(out, sort_keys=True, indent=2) + "\n"


@dataclass(frozen=True)
class BuiltProblem:
    problem: ExtensionProblem
    backend: str
    model: Optional[MatrixModel] = None
    ps: Optional[PointSet] = None
    symbol: Optional[Multiplier1D] = None
    anchor: Optional[float] = None


def build_problem(cfg: ProblemConfig) -> BuiltProblem:
    """Construct the evaluator + coupling pair described by the config."""
    theta = ThetaMatrix(cfg.theta)
    if cfg.backend == "matrix":
        model = MatrixModel(cfg.matrix_a, cfg.matrix_tau)
        problem = ExtensionProblem(
            MatrixEvaluator(model), theta, cfg.tol_linear, cfg.tol_root
        )
        return BuiltProblem(problem=problem, backend=cfg.backend, model=model)
    if cfg.backend.startswith("laplacian"):
        dim = int(cfg.backend[-2])
        ps = PointSet(dim, [list(p) for p in cfg.points])
        problem = ExtensionProblem(
            LaplacianPointEvaluator(ps), theta, cfg.tol_linear, cfg.tol_root
        )
        return BuiltProblem(problem=problem, backend=cfg.backend, ps=ps)
    ps = PointSet(1, [p[0] for p in cfg.points])
    symbol = Multiplier1D(poly=cfg.symbol_poly, cos_terms=cfg.symbol_cos)
    anchor = cfg.symbol_anchor
    try:
        evaluator = MultiplierAnchoredEvaluator(symbol, ps, anchor)
    except KreinxError as exc:
        raise InvariantError([f"symbol.anchor: {exc}"])
    problem = ExtensionProblem(evaluator, theta, cfg.tol_linear, cfg.tol_root)
    return BuiltProblem(
        problem=problem, backend=cfg.backend, ps=ps, symbol=symbol, anchor=anchor
    )
