"""Run configuration and file formats.

CSV files have a fixed header and 17 significant digits per value, so a
written profile can be re-read bit for bit.  OBJ meshes store ``v x y t``
chart coordinates and quad faces.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import warps
from .profile import InvariantSurfaceSpec, second_derivatives, unit_speed_residual
from .surface import SurfaceMesh, invariant_surface_curvatures

__all__ = [
    "CSV_COLUMNS", "RunConfig", "ConfigError", "load_config", "resolve_warp",
    "profile_rows", "write_csv", "read_csv", "write_obj", "read_obj",
]

CSV_COLUMNS = ("s", "rho", "t", "rho_s", "t_s", "kappa1", "kappa2", "nu",
               "residual_unit_speed", "residual_umbilic")


class ConfigError(ValueError):
    """Invalid configuration or flag value (exit status 2)."""


@dataclass
class RunConfig:
    """All settings of one CLI run; JSON config keys use these names, with
    ``class`` accepted for ``iso_class``."""

    command: str | None = None
    kappa: int | None = None
    warp: str | None = None
    warp_domain: tuple[float, float] | None = None
    iso_class: str = "rotational"
    c0: float | None = None
    s0: float = 0.0
    rho0: float | None = None
    t0: float | None = None
    branch: int = 1
    s_end: float | None = None
    tol: float = 1e-10
    max_flips: int = 32
    fd_step: float = 1e-4
    umbilic_tol: float = 1e-6
    numeric_points: int = 8
    omega_min: float = 0.0
    omega_max: float = 2.0 * math.pi
    omega_steps: int = 128
    format: str | None = None
    out: str | None = None
    input: str | None = None
    allow_partial: bool = False
    discrepancies: bool = False
    c0_values: list[float] | None = None
    workers: int | None = None
    p0: list[float] | None = None
    v0: list[float] | None = None
    kappa_g2: float | None = None
    t: float | None = None

    @classmethod
    def field_names(cls) -> set[str]:
        return {f.name for f in fields(cls)}

    def merged(self, overrides: dict) -> "RunConfig":
        data = self.to_dict()
        data.update({k: v for k, v in overrides.items() if v is not None})
        return RunConfig(**data)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def require(self, *names: str) -> None:
        for name in names:
            if getattr(self, name) is None:
                raise ConfigError(f"--{name.replace('_', '-')} is required")

    def spec(self) -> InvariantSurfaceSpec:
        self.require("kappa", "warp", "c0", "rho0", "t0")
        if not self.c0 > 0:
            raise ConfigError("c0 must be positive")
        try:
            return InvariantSurfaceSpec(self.iso_class, int(self.kappa), resolve_warp(self),
                                        float(self.c0), float(self.rho0), float(self.t0),
                                        float(self.s0), int(self.branch))
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


def load_config(path) -> RunConfig:
    """Read a JSON config; unknown keys are an error."""
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    if "class" in data:
        data["iso_class"] = data.pop("class")
    unknown = sorted(set(data) - RunConfig.field_names())
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    if data.get("warp_domain") is not None:
        data["warp_domain"] = tuple(data["warp_domain"])
    return RunConfig(**data)


def resolve_warp(cfg: RunConfig) -> warps.WarpingFunction:
    """Catalog reference (``name`` or ``name:p1,p2``) or expression text."""
    if cfg.warp is None:
        raise ConfigError("--warp is required")
    try:
        warp = warps.warp_from_name(cfg.warp)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"--warp: {exc}") from exc
    if warp is None:
        lo, hi = cfg.warp_domain or (-math.inf, math.inf)
        try:
            warp = warps.WarpingFunction.from_expr(cfg.warp, lo, hi)
        except ValueError as exc:
            raise ConfigError(f"--warp: {exc}") from exc
    elif cfg.warp_domain is not None:
        lo, hi = cfg.warp_domain
        warp = warps.WarpingFunction(warp.name, lo, hi, warp.triple, warp.text)
    return warp


def profile_rows(spec: InvariantSurfaceSpec, samples) -> np.ndarray:
    """CSV rows for profile states (any objects with s, rho, t, rho_s, t_s)."""
    rows = []
    for p in samples:
        rho_ss, t_ss = second_derivatives(spec, p.rho, p.t, p.rho_s)
        k1, k2 = invariant_surface_curvatures(spec, p.rho, p.t, p.rho_s, p.t_s, rho_ss, t_ss)
        a = math.exp(spec.warp.f(p.t)) * spec.geometry.A(p.rho) * p.rho_s
        nu = a / math.hypot(a, p.t_s)
        rows.append((p.s, p.rho, p.t, p.rho_s, p.t_s, k1, k2, nu,
                     unit_speed_residual(spec, p.rho, p.t, p.rho_s, p.t_s), abs(k1 - k2)))
    return np.array(rows, dtype=float).reshape(-1, len(CSV_COLUMNS))


def write_csv(path, rows, columns=CSV_COLUMNS) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([format(float(x), ".17g") for x in row])


def read_csv(path, columns=CSV_COLUMNS) -> np.ndarray:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ConfigError(f"{path}: empty file") from None
        if tuple(header) != tuple(columns):
            raise ConfigError(f"{path}: expected columns {','.join(columns)}")
        try:
            rows = [[float(x) for x in row] for row in reader if row]
        except ValueError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    return np.array(rows, dtype=float).reshape(-1, len(columns))


def write_obj(path, mesh: SurfaceMesh, name: str = "surface") -> None:
    pts = mesh.points.reshape(-1, 3)
    with open(path, "w", newline="") as fh:
        fh.write(f"o {name}\n")
        for x, y, t in pts:
            fh.write(f"v {x:.17g} {y:.17g} {t:.17g}\n")
        for face in mesh.faces():
            fh.write("f " + " ".join(str(i + 1) for i in face) + "\n")


def read_obj(path):
    """Vertices ``(n, 3)`` and zero-based faces from an OBJ written by :func:`write_obj`."""
    verts, faces = [], []
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "v":
                verts.append([float(x) for x in parts[1:4]])
            elif parts[0] == "f":
                faces.append(tuple(int(x.split("/")[0]) - 1 for x in parts[1:]))
    return np.array(verts), faces
