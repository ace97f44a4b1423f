"""Numbered discrepancy reports.

Each report evaluates a formula in its literal form next to the form this
package implements, and records the residual of each against an independent
check.  Nothing here is used by the rest of the package; it exists so the
differences stay reproducible instead of being silently corrected.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import warps
from .geometry import WarpedProduct
from .profile import InvariantSurfaceSpec, integrate_geodesic, integrate_profile
from .surface import (
    frame_grid, compatibility_residuals, invariant_surface_curvatures, mesh_immersion,
    numeric_shape_operator, translational_curvatures_literal, umbilical_gradient_literal,
)

__all__ = ["DiscrepancyReport", "run_audit", "format_reports", "REPORTS"]


@dataclass(frozen=True)
class DiscrepancyReport:
    number: int
    title: str
    check: str
    literal: float
    implemented: float
    note: str

    @property
    def discrepant(self) -> bool:
        return abs(self.literal - self.implemented) > 1e-8

    def line(self) -> str:
        return (f"[{self.number}] {self.title}: {self.check}; literal={self.literal:.12g}, "
                f"implemented={self.implemented:.12g}. {self.note}")


def _k0_profile(s: float, literal: bool):
    """``(rho, rho_s, t, t_s)`` of the kappa=0 closed form."""
    if literal:
        rho, rho_s = 1.0 / math.cos(s), math.sin(s) / math.cos(s) ** 2
    else:
        rho, rho_s = 1.0 / math.cosh(s), -math.tanh(s) / math.cosh(s)
    return rho, rho_s, 2.0 * math.atan(math.exp(s)), 1.0 / math.cosh(s)


def report_k0_profile(s: float = 1.0) -> DiscrepancyReport:
    warp = warps.log_csc()

    def residual(literal):
        rho, rho_s, t, t_s = _k0_profile(s, literal)
        return math.exp(2 * warp.f(t)) * rho_s ** 2 + t_s ** 2 - 1.0

    return DiscrepancyReport(
        1, "kappa=0 rotational closed form",
        f"unit-speed residual at s={s:g} (warp ln(1/sin t), c0=1)",
        residual(True), residual(False),
        "Literal rho=1/cos(s); implemented rho=sech(s), which also satisfies t_s = rho.")


def report_k1_warp(s: float = -1.0) -> DiscrepancyReport:
    t = 2.0 * math.atan(math.exp(s))
    speed = 1.0 / math.cosh(s)  # rho_s = t_s

    def residual(warp):
        return math.exp(2 * warp.f(t)) * speed ** 2 + speed ** 2 - 1.0

    return DiscrepancyReport(
        2, "kappa=1 rotational closed form",
        f"unit-speed residual of rho=t=2 atan(e^s) at s={s:g}",
        residual(warps.log_cos_over_sqrt_sin()), residual(warps.log_cot()),
        "Literal warp ln(cos t/sqrt(sin t)) gives cos^2(t) sin(t) + sin^2(t) - 1; "
        "ln(cot t) gives 0 (valid for s < 0).")


def report_two_exponential_warp(c0: float = 1.0, c: float = 1.0, kappa: int = 1,
                                t: float = 0.0) -> DiscrepancyReport:
    literal = warps.log_F1(c0, c, kappa, lo=-math.inf, hi=math.inf)
    corrected = warps.log_F_corrected(c0, c / (4 * c0), kappa, lo=-math.inf, hi=math.inf)
    space_l = WarpedProduct(kappa, literal)
    space_c = WarpedProduct(kappa, corrected)
    f2 = warps.log_F2(c0, c, kappa, lo=-math.inf, hi=math.inf)
    note = (f"Equals kappa/(2 F^2). Constants with A B = -kappa/(4 c0) give 0. "
            f"The second family is affine in t; its residual is "
            f"{WarpedProduct(kappa, f2).constant_umbilic_residual(t):.12g}.")
    return DiscrepancyReport(
        3, "constant-umbilicity warps",
        f"f'' + kappa e^(-2f) for f = ln|F1| with c0={c0:g}, c={c:g}, kappa={kappa}, t={t:g}",
        space_l.constant_umbilic_residual(t), space_c.constant_umbilic_residual(t), note)


def report_connection_table(t: float = 0.7) -> DiscrepancyReport:
    space = WarpedProduct(0, warps.linear(1.0, 0.0))
    p = (0.2, -0.1, t)

    def defect(literal):
        # metric compatibility along xi: <nabla_xi E1, E1> must vanish since |E1| = 1
        return float(space.connection(p, literal=literal)[2, 0, 0])

    return DiscrepancyReport(
        4, "connection table", "<nabla_xi E1, E1> (must be 0)", defect(True), defect(False),
        "Literal nabla_xi E1 = f' E1, nabla_xi E2 = f' E2 is neither torsion free nor "
        "metric; implemented nabla_xi E1 = nabla_xi E2 = 0.")


def report_curvature_mixed(t: float = 0.3) -> DiscrepancyReport:
    space = WarpedProduct(0, warps.linear(1.0, 0.0))
    p = (0.1, 0.2, t)
    V, X = np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0])
    oracle = space.curvature_by_commutator(p, V, X, X)
    lit = space.curvature(p, V, X, X, literal=True)
    imp = space.curvature(p, V, X, X)
    return DiscrepancyReport(
        5, "mixed curvature term", "xi-component of R(xi, E1) E1 minus commutator oracle",
        float(lit[2] - oracle[2]), float(imp[2] - oracle[2]),
        "Literal coefficient f'' - f'^2; implemented f'' + f'^2 (kappa=0, f=t).")


def _k0_grid(h: float = 1e-3):
    spec = InvariantSurfaceSpec("rotational", 0, warps.log_csc(), 1.0, 1.0, math.pi / 2, 0.0, -1)
    curve = integrate_profile(spec, 1.5)
    return frame_grid(spec.space, mesh_immersion(spec, curve), 1.0, 0.4, h)


def report_umbilical_gradient() -> DiscrepancyReport:
    grid = _k0_grid()
    return DiscrepancyReport(
        6, "umbilical gradient identity",
        "max |grad rho -/+ nu (f'' + kappa e^(-2f)) T| on the kappa=0 closed-form surface",
        umbilical_gradient_literal(grid),
        compatibility_residuals(grid).residuals["umbilical_gradient"],
        "With S = -nabla N the identity reads grad rho = -nu (f'' + kappa e^(-2f)) T.")


def report_translational_curvature() -> DiscrepancyReport:
    spec = InvariantSurfaceSpec("parabolic-translation", -1, warps.linear(0.5, 0.0), 2.0, 1.0, 1.0)
    curve = integrate_profile(spec, 1.0)
    i = len(curve.samples) // 2
    jet = curve.jets()[i]
    sample = numeric_shape_operator(spec.space, mesh_immersion(spec, curve), curve.s[i], 1.3)
    eig = sample.principal_curvatures()

    def gap(k1, k2):
        # distance of {k1, k2} to the numeric eigenvalues up to one global sign
        want = np.sort([k1, k2])
        return float(min(np.abs(want - eig).max(), np.abs(np.sort(-want) - eig).max()))

    return DiscrepancyReport(
        7, "translation-invariant curvatures",
        "distance of (kappa1, kappa2) to numeric shape-operator eigenvalues, parabolic class",
        gap(*translational_curvatures_literal(spec, *jet)),
        gap(*invariant_surface_curvatures(spec, *jet)),
        "Literal kappa1 carries e^(2f) t_s rho_s^3 where e^(2f) f' rho_s^3 belongs, and "
        "its sign relative to kappa2 differs between classes.")


def report_geodesic_angle(nu0: float = 0.5, s_end: float = 2.0) -> DiscrepancyReport:
    space = WarpedProduct(0, warps.linear(1.0, 0.0))
    v0 = np.array([math.sqrt(1 - nu0 * nu0), 0.0, nu0])
    geo = integrate_geodesic(space, (0.0, 0.0, 0.0), v0, s_end)
    f = np.array([space.warp.f(t) for t in geo.points[:, 2]])
    C = math.atanh(nu0) - f[0]
    tanh_form = np.tanh(f + C)
    conserved = geo.conserved()
    return DiscrepancyReport(
        8, "geodesic angle function",
        f"max deviation from the integrated nu over s in [0, {s_end:g}] (kappa=0, f=t)",
        float(np.abs(tanh_form - geo.nu).max()), float(np.abs(conserved - conserved[0]).max()),
        "Literal nu = tanh(f + C); implemented check is conservation of (1 - nu^2) e^(2f).")


REPORTS = (
    report_k0_profile, report_k1_warp, report_two_exponential_warp, report_connection_table,
    report_curvature_mixed, report_umbilical_gradient, report_translational_curvature,
    report_geodesic_angle,
)


def run_audit() -> list[DiscrepancyReport]:
    return [make() for make in REPORTS]


def format_reports(reports) -> str:
    return "\n".join(r.line() for r in reports)
