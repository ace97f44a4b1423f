"""Command-line front end.

Exit status: 0 on success, 2 for invalid input (one-line diagnostic on
stderr), 3 when a computation fails or ends before the requested range.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import audit
from .errors import AdmissibilityError, DegenerateTangentError, DomainError
from .geometry import WarpedProduct
from .io import (
    ConfigError, RunConfig, load_config, profile_rows, read_csv, resolve_warp,
    write_csv, write_obj,
)
from .profile import (
    ProfileState, integrate_geodesic, integrate_profile,
)
from .surface import cylinder_curvatures, generate_mesh, umbilicity_residual

__all__ = ["main", "run_cli", "build_parser"]

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3
COMMANDS = ("generate", "verify", "mesh", "geodesic", "sweep", "cylinder")


class NumericalFailure(RuntimeError):
    pass


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _pair(text: str) -> tuple[float, float]:
    vals = _floats(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError(f"expected two numbers, got {text!r}")
    return vals[0], vals[1]


def _branch(text: str) -> int:
    if text in ("+", "+1", "1"):
        return 1
    if text in ("-", "-1"):
        return -1
    raise argparse.ArgumentTypeError("branch must be +1 or -1")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("run configuration")
    g.add_argument("--config", help="JSON file with RunConfig fields; flags override it")
    g.add_argument("--kappa", type=int, choices=(-1, 0, 1))
    g.add_argument("--warp", help="catalog name[:p1,p2,...] or an expression in t")
    g.add_argument("--warp-domain", type=_pair, metavar="LO,HI")
    g.add_argument("--class", dest="iso_class",
                   choices=("rotational", "euclidean-translation", "parabolic-translation",
                            "hyperbolic-translation"))
    g.add_argument("--c0", type=float)
    g.add_argument("--s0", type=float)
    g.add_argument("--rho0", type=float)
    g.add_argument("--t0", type=float)
    g.add_argument("--branch", type=_branch, help="sign of rho_s at s0: +1 or -1")
    g.add_argument("--s-end", type=float)
    g.add_argument("--tol", type=float, help="integration tolerance (default 1e-10)")
    g.add_argument("--max-flips", type=int)
    g.add_argument("--fd-step", type=float, help="finite-difference step (default 1e-4)")
    g.add_argument("--umbilic-tol", type=float)
    g.add_argument("--numeric-points", type=int)
    g.add_argument("--omega-min", type=float)
    g.add_argument("--omega-max", type=float)
    g.add_argument("--omega-steps", type=int, help="default 128")
    g.add_argument("--format", choices=("csv", "obj"))
    g.add_argument("--out")
    g.add_argument("--allow-partial", action="store_const", const=True,
                   help="accept integrations that stop before --s-end")

    parser = _Parser(prog="umbilic", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("generate", parents=[common], help="integrate a profile curve")
    v = sub.add_parser("verify", parents=[common], help="check a stored profile")
    v.add_argument("--input")
    v.add_argument("--discrepancies", action="store_const", const=True,
                   help="print the numbered discrepancy reports")
    sub.add_parser("mesh", parents=[common], help="sweep a profile into a surface mesh")
    geo = sub.add_parser("geodesic", parents=[common], help="integrate an ambient geodesic")
    geo.add_argument("--p0", type=_floats, metavar="X,Y,T")
    geo.add_argument("--v0", type=_floats, metavar="A1,A2,A3",
                     help="initial direction in the orthonormal frame (normalized)")
    sw = sub.add_parser("sweep", parents=[common], help="run generate over several c0")
    sw.add_argument("--c0-values", type=_floats, metavar="C1,C2,...")
    sw.add_argument("--workers", type=int)
    cyl = sub.add_parser("cylinder", parents=[common], help="vertical cylinder curvatures")
    cyl.add_argument("--kappa-g2", type=float)
    cyl.add_argument("--t", type=float)
    return parser


def _config_from_args(argv) -> RunConfig:
    args = vars(build_parser().parse_args(argv))
    base = load_config(args.pop("config")) if args.get("config") else RunConfig()
    cfg = base.merged(args)
    for name in ("tol", "fd_step", "s_end"):
        value = getattr(cfg, name)
        if value is not None and not (math.isfinite(value) and (value > 0 or name == "s_end")):
            raise ConfigError(f"--{name.replace('_', '-')} must be a positive finite number")
    if cfg.omega_steps < 2:
        raise ConfigError("--omega-steps must be at least 2")
    return cfg


def _integrate(cfg: RunConfig):
    spec = cfg.spec()
    cfg.require("s_end")
    if not cfg.s_end > spec.s0:
        raise ConfigError("--s-end must exceed --s0")
    try:
        curve = integrate_profile(spec, cfg.s_end, cfg.tol, cfg.max_flips)
    except AdmissibilityError as exc:
        raise ConfigError(f"initial state not admissible: {exc}") from exc
    if curve.termination != "reached-end" and not cfg.allow_partial:
        raise NumericalFailure(f"integration stopped early: {curve.termination} "
                               f"at s={curve.samples[-1].s:.6g}")
    return spec, curve


def _manifest_path(out: str) -> Path:
    return Path(out + ".json")


def _write_manifest(cfg: RunConfig, out: str) -> None:
    data = {k: v for k, v in cfg.to_dict().items()
            if k not in ("command", "out", "input", "format") and v is not None}
    data["class"] = data.pop("iso_class")
    _manifest_path(out).write_text(json.dumps(data, indent=2) + "\n")


def cmd_generate(cfg: RunConfig, mesh_default: bool = False) -> dict:
    spec, curve = _integrate(cfg)
    fmt = cfg.format or ("obj" if mesh_default else "csv")
    if fmt == "obj":
        mesh = generate_mesh(spec, curve, (cfg.omega_min, cfg.omega_max), cfg.omega_steps)
        if cfg.out:
            write_obj(cfg.out, mesh, spec.iso.value)
        summary = {"vertices": int(np.prod(mesh.shape)), "faces": len(mesh.faces()),
                   "welded": mesh.welded}
    else:
        rows = profile_rows(spec, curve.samples)
        if cfg.out:
            write_csv(cfg.out, rows)
            _write_manifest(cfg, cfg.out)
        summary = {"samples": len(rows),
                   "max_residual_unit_speed": float(np.abs(rows[:, 8]).max()),
                   "max_residual_umbilic": float(rows[:, 9].max())}
    return {"termination": curve.termination, "s_last": curve.samples[-1].s,
            "turning_points": curve.flips, **summary}


def cmd_verify(cfg: RunConfig) -> tuple[dict, bool]:
    report: dict = {}
    ok = True
    if cfg.discrepancies:
        reports = audit.run_audit()
        report["discrepancies"] = [r.line() for r in reports]
    if cfg.input:
        manifest = _manifest_path(cfg.input)
        if manifest.exists() and cfg.warp is None:
            overrides = {k: v for k, v in cfg.to_dict().items()
                         if v is not None and v != getattr(RunConfig(), k)}
            cfg = load_config(manifest).merged(overrides)
        spec = cfg.spec()
        rows = read_csv(cfg.input)
        if len(rows) == 0:
            raise ConfigError(f"{cfg.input}: no samples")
        states = [ProfileState(*row[:5]) for row in rows]
        recomputed = profile_rows(spec, states)
        first_integral = max(abs(p.t_s - spec.geometry.h(p.rho, spec.c0)) for p in states)
        unit = float(np.abs(recomputed[:, 8]).max())
        analytic = float(recomputed[:, 9].max())
        numeric = None
        if cfg.numeric_points > 0 and len(rows) > 1:
            curve = integrate_profile(spec, float(rows[-1, 0]), cfg.tol, cfg.max_flips)
            numeric = umbilicity_residual(spec, curve, cfg.fd_step, cfg.numeric_points).numeric
        stored_match = bool(np.array_equal(recomputed, rows))
        unit_gate = 100.0 * cfg.tol
        ok = bool(unit <= unit_gate and analytic <= cfg.umbilic_tol and first_integral <= unit_gate)
        report.update({
            "samples": len(rows), "max_residual_unit_speed": unit,
            "max_residual_first_integral": first_integral,
            "umbilicity_analytic": analytic, "umbilicity_numeric": numeric,
            "stored_columns_reproduced": stored_match, "passed": ok,
        })
    elif not cfg.discrepancies:
        raise ConfigError("verify needs --input or --discrepancies")
    return report, ok


def cmd_geodesic(cfg: RunConfig) -> dict:
    cfg.require("kappa", "warp", "p0", "v0", "s_end")
    if len(cfg.p0) != 3 or len(cfg.v0) != 3:
        raise ConfigError("--p0 and --v0 need three components")
    v0 = np.asarray(cfg.v0, float)
    norm = np.linalg.norm(v0)
    if not norm > 0:
        raise ConfigError("--v0 must be nonzero")
    space = WarpedProduct(int(cfg.kappa), resolve_warp(cfg))
    try:
        space.scale(cfg.p0)
    except DomainError as exc:
        raise ConfigError(f"--p0: {exc}") from exc
    geo = integrate_geodesic(space, cfg.p0, v0 / norm, cfg.s_end, cfg.tol)
    if geo.termination != "reached-end" and not cfg.allow_partial:
        raise NumericalFailure(f"geodesic stopped early: {geo.termination} at s={geo.s[-1]:.6g}")
    conserved = geo.conserved()
    cols = ("s", "x", "y", "t", "a1", "a2", "a3", "nu", "conserved")
    rows = np.column_stack([geo.s, geo.points, geo.velocity, geo.nu, conserved])
    if cfg.out:
        write_csv(cfg.out, rows, cols)
    return {"termination": geo.termination, "samples": len(rows),
            "conserved_drift": float(np.abs(conserved - conserved[0]).max()),
            "max_speed_residual": float(np.abs(geo.speed_residuals()).max())}


def _sweep_one(data: dict, c0: float) -> dict:
    cfg = RunConfig(**data).merged({"c0": c0, "out": None, "allow_partial": True})
    try:
        out = cmd_generate(cfg)
    except ConfigError as exc:
        return {"c0": c0, "termination": "invalid", "error": str(exc)}
    except NumericalFailure as exc:
        return {"c0": c0, "termination": "failed", "error": str(exc)}
    return {"c0": c0, **out}


def cmd_sweep(cfg: RunConfig) -> dict:
    cfg.require("c0_values")
    base = cfg.merged({"c0": cfg.c0_values[0]})
    base.spec()  # validate everything except c0 up front
    data = base.to_dict()
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        runs = list(pool.map(_sweep_one, [data] * len(cfg.c0_values), cfg.c0_values))
    report = {"runs": runs}
    if cfg.out:
        Path(cfg.out).write_text(json.dumps(report, indent=2) + "\n")
    return report


def cmd_cylinder(cfg: RunConfig) -> dict:
    cfg.require("warp", "kappa_g2", "t")
    warp = resolve_warp(cfg)
    try:
        sample = cylinder_curvatures(cfg.kappa_g2, warp, cfg.t)
    except DomainError as exc:
        raise ConfigError(f"--t: {exc}") from exc
    return {k: getattr(sample, k) for k in ("kappa1", "kappa2", "H", "Ke", "Ki", "nu", "varrho")}


def run_cli(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        cfg = _config_from_args(list(sys.argv[1:] if argv is None else argv))
        ok = True
        if cfg.command == "generate":
            report = cmd_generate(cfg)
        elif cfg.command == "mesh":
            report = cmd_generate(cfg, mesh_default=True)
        elif cfg.command == "verify":
            report, ok = cmd_verify(cfg)
        elif cfg.command == "geodesic":
            report = cmd_geodesic(cfg)
        elif cfg.command == "sweep":
            report = cmd_sweep(cfg)
        else:
            report = cmd_cylinder(cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INVALID
    except (NumericalFailure, DegenerateTangentError) as exc:
        print(f"numerical failure: {exc}", file=stderr)
        return EXIT_NUMERIC
    except DomainError as exc:
        print(f"numerical failure: {exc}", file=stderr)
        return EXIT_NUMERIC
    if "discrepancies" in report:
        for line in report.pop("discrepancies"):
            print(line, file=stdout)
    if report:
        print(json.dumps(report, default=float), file=stdout)
    return EXIT_OK if ok else EXIT_NUMERIC


def main() -> None:
    sys.exit(run_cli())
