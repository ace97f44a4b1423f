"""Profile curves of invariant totally umbilical surfaces, and ambient geodesics.

A profile lives in a vertical plane with coordinates ``(rho, t)`` in which
the ambient metric reads ``e^{2f(t)} (A(rho)^2 drho^2 + B(rho)^2 dw^2) + dt^2``;
the one-parameter isometry group moves ``w``.  For each class:

==========================  =========  ==============  =====================
class                       A(rho)     B(rho)          first integral t_s
==========================  =========  ==============  =====================
rotational, kappa=-1        1          sinh rho        c0 sinh rho
rotational, kappa=0         1          rho             c0 rho
rotational, kappa=1         1          sin rho         c0 sin rho
euclidean translation       1          1               c0
parabolic translation       1/rho      1/rho           1/(c0 rho)
hyperbolic translation      1/sin rho  1/sin rho       c0/sin rho
==========================  =========  ==============  =====================

Arclength means ``e^{2f} A^2 rho_s^2 + t_s^2 = 1``.  The first-order system
``t_s = h(rho)``, ``rho_s = +-e^{-f} sqrt(1 - h^2)/A`` is singular where
``|h| = 1``; integration therefore carries ``rho_s`` as a state and uses the
derivative of the arclength constraint,

    rho_ss = -h h' e^{-2f} / A^2 - f' t_s rho_s - (A'/A) rho_s^2,

which passes through turning points smoothly and conserves the constraint.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

import numpy as np

from .errors import AdmissibilityError, DomainError
from .geometry import AmbientPoint, WarpedProduct, check_kappa
from .ode import Event, FixedStepTrajectory, integrate_adaptive
from .warps import WarpingFunction

__all__ = [
    "IsometryClass", "InvariantSurfaceSpec", "ProfileState", "IntegrationResult",
    "ExplicitProfile", "GeodesicResult", "first_integral_target", "profile_rhs",
    "second_derivatives", "integrate_profile", "closed_form_profile",
    "integrate_geodesic", "pregeodesic_residual", "slice_profile", "vertical_profile",
    "unit_speed_residual", "AXIS_EPS", "MAX_FLIPS",
]

AXIS_EPS = 1e-9
MAX_FLIPS = 32
_PROJECT_MARGIN = 1e-3


class IsometryClass(str, Enum):
    ROTATIONAL = "rotational"
    EUCLIDEAN = "euclidean-translation"
    PARABOLIC = "parabolic-translation"
    HYPERBOLIC = "hyperbolic-translation"

    @property
    def admissible_kappa(self) -> tuple[int, ...]:
        return {
            IsometryClass.ROTATIONAL: (-1, 0, 1),
            IsometryClass.EUCLIDEAN: (0,),
            IsometryClass.PARABOLIC: (-1,),
            IsometryClass.HYPERBOLIC: (-1,),
        }[self]

    @property
    def chart(self) -> str:
        return "halfplane" if self in (IsometryClass.PARABOLIC, IsometryClass.HYPERBOLIC) else "disk"


class ProfileState(NamedTuple):
    s: float
    rho: float
    t: float
    rho_s: float
    t_s: float


class _ClassGeometry:
    """Per-class coefficient functions of the profile plane."""

    def __init__(self, iso: IsometryClass, kappa: int):
        self.iso = iso
        self.kappa = kappa
        if iso is IsometryClass.ROTATIONAL:
            self.rho_bounds = (0.0, math.pi if kappa == 1 else math.inf)
        elif iso is IsometryClass.EUCLIDEAN:
            self.rho_bounds = (-math.inf, math.inf)
        elif iso is IsometryClass.PARABOLIC:
            self.rho_bounds = (0.0, math.inf)
        else:
            self.rho_bounds = (0.0, math.pi)

    def check_rho(self, rho: float) -> None:
        lo, hi = self.rho_bounds
        if not (lo < rho < hi):
            raise DomainError(f"rho={rho!r} outside the {self.iso.value} chart ({lo}, {hi})")

    def A(self, rho):
        if self.iso is IsometryClass.PARABOLIC:
            return 1.0 / rho
        if self.iso is IsometryClass.HYPERBOLIC:
            return 1.0 / math.sin(rho)
        return 1.0

    def dlogA(self, rho):
        if self.iso is IsometryClass.PARABOLIC:
            return -1.0 / rho
        if self.iso is IsometryClass.HYPERBOLIC:
            return -math.cos(rho) / math.sin(rho)
        return 0.0

    def orbit_coefficient(self, rho):
        """``B'/(A B)``: the orbit term of the second principal curvature."""
        iso, k = self.iso, self.kappa
        if iso is IsometryClass.ROTATIONAL:
            if k == -1:
                return math.cosh(rho) / math.sinh(rho)
            if k == 0:
                return 1.0 / rho
            return math.cos(rho) / math.sin(rho)
        if iso is IsometryClass.EUCLIDEAN:
            return 0.0
        if iso is IsometryClass.PARABOLIC:
            return -1.0
        return -math.cos(rho)

    def h(self, rho, c0):
        iso, k = self.iso, self.kappa
        if iso is IsometryClass.ROTATIONAL:
            return c0 * (math.sinh(rho) if k == -1 else rho if k == 0 else math.sin(rho))
        if iso is IsometryClass.EUCLIDEAN:
            return c0
        if iso is IsometryClass.PARABOLIC:
            return 1.0 / (c0 * rho)
        return c0 / math.sin(rho)

    def dh(self, rho, c0):
        iso, k = self.iso, self.kappa
        if iso is IsometryClass.ROTATIONAL:
            return c0 * (math.cosh(rho) if k == -1 else 1.0 if k == 0 else math.cos(rho))
        if iso is IsometryClass.EUCLIDEAN:
            return 0.0
        if iso is IsometryClass.PARABOLIC:
            return -1.0 / (c0 * rho * rho)
        s = math.sin(rho)
        return -c0 * math.cos(rho) / (s * s)

    # -- embedding into chart coordinates ----------------------------------
    def _radial(self, rho):
        """Chart radius of a point at distance ``rho`` from the axis, and its derivative."""
        if self.kappa == -1:
            return math.tanh(rho / 2), 0.5 / math.cosh(rho / 2) ** 2
        if self.kappa == 1:
            return math.tan(rho / 2), 0.5 / math.cos(rho / 2) ** 2
        return rho, 1.0

    def embed(self, rho, t, w):
        iso = self.iso
        if iso is IsometryClass.ROTATIONAL:
            r, _ = self._radial(rho)
            return np.array([r * math.cos(w), r * math.sin(w), t])
        if iso is IsometryClass.EUCLIDEAN:
            return np.array([rho, w, t])
        if iso is IsometryClass.PARABOLIC:
            return np.array([w, rho, t])
        return np.array([w * math.cos(rho), w * math.sin(rho), t])

    def embed_jacobian(self, rho, w):
        """Coordinate derivatives ``d/drho`` and ``d/dw`` of the embedding (no t part)."""
        iso = self.iso
        if iso is IsometryClass.ROTATIONAL:
            r, dr = self._radial(rho)
            c, s = math.cos(w), math.sin(w)
            return np.array([dr * c, dr * s, 0.0]), np.array([-r * s, r * c, 0.0])
        if iso is IsometryClass.EUCLIDEAN:
            return np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0])
        if iso is IsometryClass.PARABOLIC:
            return np.array([0.0, 1.0, 0.0]), np.array([1.0, 0.0, 0.0])
        c, s = math.cos(rho), math.sin(rho)
        return np.array([-w * s, w * c, 0.0]), np.array([c, s, 0.0])

    def radial_frame(self, rho, w):
        """Unit horizontal frame vector along ``d/drho`` at orbit parameter ``w``."""
        iso = self.iso
        if iso is IsometryClass.ROTATIONAL:
            return np.array([math.cos(w), math.sin(w), 0.0])
        if iso is IsometryClass.EUCLIDEAN:
            return np.array([1.0, 0.0, 0.0])
        if iso is IsometryClass.PARABOLIC:
            return np.array([0.0, 1.0, 0.0])
        return np.array([-math.sin(rho), math.cos(rho), 0.0])


@dataclass(frozen=True)
class InvariantSurfaceSpec:
    """Isometry class, ambient data, first-integral constant and initial point.

    ``branch`` is the sign of ``rho_s`` at ``s0``; it is irrelevant when the
    initial point is a turning point (``|t_s| = 1``), where the dynamics pick
    the direction.
    """

    iso: IsometryClass
    kappa: int
    warp: WarpingFunction
    c0: float
    rho0: float
    t0: float
    s0: float = 0.0
    branch: int = 1

    def __post_init__(self):
        object.__setattr__(self, "iso", IsometryClass(self.iso))
        check_kappa(self.kappa)
        if self.kappa not in self.iso.admissible_kappa:
            raise ValueError(f"{self.iso.value} requires kappa in {self.iso.admissible_kappa}")
        if not (self.c0 > 0 and math.isfinite(self.c0)):
            raise ValueError("c0 must be positive")
        if self.branch not in (1, -1):
            raise ValueError("branch must be +1 or -1")
        if not self.warp.contains(self.t0):
            raise DomainError(f"t0={self.t0!r} outside warp domain ({self.warp.lo}, {self.warp.hi})")
        self.geometry.check_rho(self.rho0)

    @property
    def geometry(self) -> _ClassGeometry:
        return _ClassGeometry(self.iso, self.kappa)

    @property
    def space(self) -> WarpedProduct:
        return WarpedProduct(self.kappa, self.warp, self.iso.chart)


def first_integral_target(spec: InvariantSurfaceSpec, rho: float) -> float:
    """Prescribed ``t_s`` at ``rho``.  Not clipped: callers check ``|t_s| <= 1``."""
    geo = spec.geometry
    geo.check_rho(rho)
    return geo.h(rho, spec.c0)


def profile_rhs(spec: InvariantSurfaceSpec, state, branch: int | None = None):
    """``(rho_s, t_s)`` of the first-order system on the given sign branch."""
    geo = spec.geometry
    ts = first_integral_target(spec, state.rho)
    if abs(ts) > 1.0:
        raise AdmissibilityError(f"|t_s| = {abs(ts)!r} > 1 at rho={state.rho!r}")
    f = spec.warp.f(state.t)
    sign = spec.branch if branch is None else branch
    rho_s = sign * math.exp(-f) * math.sqrt(1.0 - ts * ts) / geo.A(state.rho)
    return rho_s, ts


def second_derivatives(spec: InvariantSurfaceSpec, rho: float, t: float, rho_s: float):
    """``(rho_ss, t_ss)`` along a first-integral solution."""
    geo = spec.geometry
    f, fp, _ = spec.warp.eval(t)
    ts = geo.h(rho, spec.c0)
    dh = geo.dh(rho, spec.c0)
    A = geo.A(rho)
    rho_ss = -ts * dh * math.exp(-2.0 * f) / (A * A) - fp * ts * rho_s - geo.dlogA(rho) * rho_s * rho_s
    return rho_ss, dh * rho_s


def _regular_rhs(spec: InvariantSurfaceSpec):
    geo = spec.geometry
    warp = spec.warp
    c0 = spec.c0

    def rhs(s, y):
        rho, t, rho_s = y
        f, fp, _ = warp.eval(t)
        ts = geo.h(rho, c0)
        A = geo.A(rho)
        rho_ss = (-ts * geo.dh(rho, c0) * math.exp(-2.0 * f) / (A * A)
                  - fp * ts * rho_s - geo.dlogA(rho) * rho_s * rho_s)
        return np.array([rho_s, ts, rho_ss])

    return rhs


def unit_speed_residual(spec: InvariantSurfaceSpec, rho, t, rho_s, t_s) -> float:
    A = spec.geometry.A(rho)
    return math.exp(2.0 * spec.warp.f(t)) * A * A * rho_s * rho_s + t_s * t_s - 1.0


@dataclass
class IntegrationResult:
    """Samples of a first-integral solution plus how the run ended.

    ``termination`` is one of ``reached-end``, ``axis``, ``chart-boundary``,
    ``warp-boundary``, ``turning-point-limit``, ``step-underflow``.
    """

    spec: InvariantSurfaceSpec
    samples: list
    termination: str
    turning_points: list = field(default_factory=list)
    dense_step: float = 2e-3
    _dense: FixedStepTrajectory | None = field(default=None, repr=False)

    @property
    def s(self) -> np.ndarray:
        return np.array([p.s for p in self.samples])

    @property
    def flips(self) -> int:
        """Branch switches performed; a run stopped by the flip limit records
        the stopping turning point without switching there."""
        n = len(self.turning_points)
        return n - 1 if self.termination == "turning-point-limit" else n

    def unit_speed_residuals(self) -> np.ndarray:
        return np.array([unit_speed_residual(self.spec, p.rho, p.t, p.rho_s, p.t_s)
                         for p in self.samples])

    def first_integral_residuals(self) -> np.ndarray:
        geo = self.spec.geometry
        return np.array([p.t_s - geo.h(p.rho, self.spec.c0) for p in self.samples])

    def jets(self) -> np.ndarray:
        """``(n, 6)`` array of ``(rho, t, rho_s, t_s, rho_ss, t_ss)`` at the samples."""
        out = []
        for p in self.samples:
            rho_ss, t_ss = second_derivatives(self.spec, p.rho, p.t, p.rho_s)
            out.append((p.rho, p.t, p.rho_s, p.t_s, rho_ss, t_ss))
        return np.array(out)

    def evaluate(self, s: float):
        """Dense ``(rho, t, rho_s, t_s, rho_ss, t_ss)`` at any ``s`` near the run."""
        if self._dense is None:
            first = self.samples[0]
            self._dense = FixedStepTrajectory(_regular_rhs(self.spec), first.s,
                                              [first.rho, first.t, first.rho_s], self.dense_step)
        rho, t, rho_s = self._dense.evaluate(s)
        t_s = self.spec.geometry.h(rho, self.spec.c0)
        rho_ss, t_ss = second_derivatives(self.spec, rho, t, rho_s)
        return rho, t, rho_s, t_s, rho_ss, t_ss


@dataclass
class ExplicitProfile:
    """A profile given by a function ``s -> (rho, t, rho_s, t_s, rho_ss, t_ss)``.

    Covers curves that are not first-integral solutions (slices, vertical
    cylinders) and closed forms.
    """

    func: object
    s_values: np.ndarray
    termination: str = "reached-end"

    def evaluate(self, s: float):
        return tuple(float(v) for v in self.func(s))

    def jets(self) -> np.ndarray:
        return np.array([self.evaluate(s) for s in self.s_values])

    @property
    def samples(self) -> list:
        out = []
        for s in self.s_values:
            rho, t, rho_s, t_s, _, _ = self.evaluate(s)
            out.append(ProfileState(float(s), rho, t, rho_s, t_s))
        return out

    @property
    def s(self) -> np.ndarray:
        return np.asarray(self.s_values, float)


def slice_profile(warp: WarpingFunction, t0: float, s_values, rho0: float = 0.0) -> ExplicitProfile:
    """Horizontal profile ``t = t0`` at unit speed (``A = 1`` classes)."""
    speed = math.exp(-warp.f(t0))

    def func(s):
        return rho0 + speed * s, t0, speed, 0.0, 0.0, 0.0

    return ExplicitProfile(func, np.asarray(s_values, float))


def vertical_profile(rho0: float, t0: float, s_values) -> ExplicitProfile:
    """Vertical profile ``rho = rho0``; its orbit is a vertical cylinder."""
    def func(s):
        return rho0, t0 + s, 0.0, 1.0, 0.0, 0.0

    return ExplicitProfile(func, np.asarray(s_values, float))


def integrate_profile(spec: InvariantSurfaceSpec, s_end: float, tol: float = 1e-10,
                      max_flips: int = MAX_FLIPS) -> IntegrationResult:
    """Adaptive Dormand-Prince integration of the first-integral system.

    Turning points (``rho_s`` changing sign, i.e. ``|t_s| -> 1``) are located
    by bisection to 1e-12 in ``s`` and recorded as branch flips; the run stops
    after ``max_flips`` of them, at the axis or a chart boundary, when the
    warp domain is left, or when the step size underflows.
    """
    geo = spec.geometry
    warp = spec.warp
    ts0 = geo.h(spec.rho0, spec.c0)
    if abs(ts0) > 1.0:
        raise AdmissibilityError(f"initial |t_s| = {abs(ts0)!r} > 1")
    rho_s0, _ = profile_rhs(spec, ProfileState(spec.s0, spec.rho0, spec.t0, 0.0, ts0))
    rhs = _regular_rhs(spec)

    events = [Event("turning", lambda s, y: y[2], terminal=False, limit=max_flips,
                    limit_status="turning-point-limit")]
    lo, hi = geo.rho_bounds
    if spec.iso is IsometryClass.ROTATIONAL:
        events.append(Event("axis", lambda s, y: y[0] - AXIS_EPS))
    elif math.isfinite(lo):
        events.append(Event("chart-boundary", lambda s, y: y[0] - lo - AXIS_EPS))
    if math.isfinite(hi):
        events.append(Event("chart-boundary", lambda s, y: hi - AXIS_EPS - y[0]))
    if math.isfinite(warp.lo):
        events.append(Event("warp-boundary", lambda s, y: y[1] - warp.lo - AXIS_EPS))
    if math.isfinite(warp.hi):
        events.append(Event("warp-boundary", lambda s, y: warp.hi - AXIS_EPS - y[1]))

    def project(s, y):
        rho, t, rho_s = y
        ts = geo.h(rho, spec.c0)
        gap = 1.0 - ts * ts
        if gap < _PROJECT_MARGIN or rho_s == 0.0:
            return y
        mag = math.exp(-warp.f(t)) * math.sqrt(gap) / abs(geo.A(rho))
        return np.array([rho, t, math.copysign(mag, rho_s)])

    def classify(s, y, exc):
        rho, t, _ = y
        if min(t - warp.lo, warp.hi - t) < 1e-6:
            return "warp-boundary"
        if min(rho - lo, hi - rho) < 1e-6:
            return "axis" if spec.iso is IsometryClass.ROTATIONAL and rho - lo < 1e-6 else "chart-boundary"
        return "step-underflow"

    run = integrate_adaptive(rhs, spec.s0, [spec.rho0, spec.t0, rho_s0], s_end, tol,
                             events=events, project=project, classify_failure=classify)
    samples = [ProfileState(float(s), float(y[0]), float(y[1]), float(y[2]),
                            geo.h(float(y[0]), spec.c0)) for s, y in zip(run.s, run.y)]
    turning = [samples[i].s for name, i in run.events if name == "turning"]
    return IntegrationResult(spec, samples, run.status, turning)


def closed_form_profile(example_id: str, s: float, gamma: float | None = None,
                        warp: WarpingFunction | None = None, t0: float = 0.0):
    """Known exact profiles, returned as ``(rho, t)``.

    ``k0-rot``: kappa=0, ``f = ln(1/sin t)``, ``c0 = 1``: ``(sech s, 2 atan e^s)``.
    ``k1-rot``: kappa=1, ``c0 = 1``: ``(2 atan e^s, 2 atan e^s)``.
    ``plane``: euclidean translation with ``t = t0 + s sin(gamma)`` and
    ``x(s) = int_0^s cos(gamma) e^{-f(t(u))} du`` (needs ``gamma`` and ``warp``).
    """
    if not math.isfinite(s):
        raise DomainError("s must be finite")
    if example_id == "k0-rot":
        return 1.0 / math.cosh(s), 2.0 * math.atan(math.exp(s))
    if example_id == "k1-rot":
        v = 2.0 * math.atan(math.exp(s))
        return v, v
    if example_id == "plane":
        if gamma is None or warp is None:
            raise ValueError("plane profile needs gamma and warp")
        from scipy.integrate import quad

        sg, cg = math.sin(gamma), math.cos(gamma)
        t = t0 + sg * s
        if not (warp.contains(t) and warp.contains(t0)):
            raise DomainError(f"plane profile leaves the warp domain at s={s!r}")
        x, _ = quad(lambda u: cg * math.exp(-warp.f(t0 + sg * u)), 0.0, s,
                    epsabs=1e-13, epsrel=1e-13, limit=200)
        return x, t
    raise ValueError(f"unknown example {example_id!r}")


# --------------------------------------------------------------------------
# Geodesics
# --------------------------------------------------------------------------

@dataclass
class GeodesicResult:
    space: WarpedProduct
    s: np.ndarray
    points: np.ndarray    # (n, 3) chart coordinates
    velocity: np.ndarray  # (n, 3) frame components
    termination: str
    _dense: FixedStepTrajectory | None = field(default=None, repr=False)

    @property
    def nu(self) -> np.ndarray:
        return self.velocity[:, 2]

    def conserved(self) -> np.ndarray:
        """``(1 - nu^2) e^{2 f(t)}`` per sample."""
        f = np.array([self.space.warp.f(t) for t in self.points[:, 2]])
        return (1.0 - self.nu ** 2) * np.exp(2.0 * f)

    def speed_residuals(self) -> np.ndarray:
        return np.einsum("ij,ij->i", self.velocity, self.velocity) - 1.0

    def evaluate(self, s: float) -> np.ndarray:
        """Dense state ``(x, y, t, a1, a2, a3)``."""
        if self._dense is None:
            y0 = np.concatenate([self.points[0], self.velocity[0]])
            self._dense = FixedStepTrajectory(_geodesic_rhs(self.space), self.s[0], y0, 1e-3)
        return self._dense.evaluate(s)


def _geodesic_rhs(space: WarpedProduct):
    def rhs(s, y):
        p, a = y[:3], y[3:]
        C = space.connection(p)
        mu = space.scale(p)
        dp = np.array([a[0] / mu, a[1] / mu, a[2]])
        da = -np.einsum("i,j,ijm->m", a, a, C)
        return np.concatenate([dp, da])
    return rhs


def integrate_geodesic(space: WarpedProduct, p0, v0, s_end: float, tol: float = 1e-10,
                       s0: float = 0.0) -> GeodesicResult:
    """Geodesic from ``p0`` with unit initial velocity ``v0`` (frame components).

    The system is ``p' = v`` and ``a' = -sum_ij a_i a_j nabla_{E_i} E_j``.
    """
    v0 = np.asarray(v0, float)
    if abs(v0.dot(v0) - 1.0) > 1e-10:
        raise ValueError("initial velocity must be unit length in the ambient metric")
    p0 = AmbientPoint(*map(float, p0))
    space.scale(p0)  # validates chart and warp domain

    def classify(s, y, exc):
        t = y[2]
        warp = space.warp
        if min(t - warp.lo, warp.hi - t) < 1e-6:
            return "warp-boundary"
        return "chart-boundary"

    run = integrate_adaptive(_geodesic_rhs(space), s0, np.concatenate([p0, v0]), s_end, tol,
                             classify_failure=classify)
    ys = np.array(run.y)
    return GeodesicResult(space, np.array(run.s), ys[:, :3], ys[:, 3:], run.status)


def pregeodesic_residual(result: GeodesicResult, s: float, h: float = 1e-4) -> float:
    """Component of ``nabla_{c'} c'`` orthogonal to ``c'`` (unit normal of the
    fiber metric) for the horizontal projection ``c`` of the geodesic,
    using central differences of step ``h``."""
    ym, y0, yp = (result.evaluate(s + d)[:2] for d in (-h, 0.0, h))
    c1 = (yp - ym) / (2 * h)
    c2 = (yp - 2 * y0 + ym) / (h * h)
    speed = math.hypot(*c1)
    if speed < 1e-12:
        return 0.0
    lam, lam_x, lam_y = result.space.conformal(y0[0], y0[1])
    grad = np.array([lam_x, lam_y]) / lam
    acc = c2 + 2.0 * c1.dot(grad) * c1 - c1.dot(c1) * grad
    normal = np.array([-c1[1], c1[0]]) / speed
    return abs(lam * acc.dot(normal))
