"""Curvatures of invariant surfaces and cylinders, meshes, and finite-difference
checks of umbilicity and the structure equations of surfaces in ``M(kappa)_f x I``.

Frame-component conventions follow :mod:`umbilic.geometry`.  The shape
operator is ``S X = -nabla_X N``.  For a surface with angle function
``nu = <N, xi>`` and ``T = xi - nu N``, the residuals checked by
:func:`compatibility_residuals` are

* ``|T|^2 + nu^2 - 1``;
* ``nabla_X T - nu S X - f' (X - <X,T> T)``;
* ``<S X, T> + d nu(X) + f' nu <X, T>``;
* ``K - det S + (f'^2 - kappa e^{-2f}) + (f'' + kappa e^{-2f}) |T|^2`` with
  ``K`` the intrinsic curvature of the induced metric;
* Codazzi: ``(nabla_X S) Y - (nabla_Y S) X + nu F (<X,T> Y - <Y,T> X)``;
* umbilical gradient: ``grad rho + nu F T`` where ``rho = tr(S)/2``;

with ``F = f'' + kappa e^{-2f}``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTangentError, DomainError
from .geometry import WarpedProduct
from .profile import InvariantSurfaceSpec, IsometryClass
from .warps import WarpingFunction

__all__ = [
    "CurvatureSample", "SurfaceMesh", "SurfaceFrameSample", "FrameGrid",
    "UmbilicityReport", "CompatibilityReport", "CurvatureLineReport",
    "invariant_surface_curvatures", "translational_curvatures_literal",
    "cylinder_curvatures", "curvature_sample", "generate_mesh", "mesh_immersion",
    "numeric_shape_operator", "umbilicity_residual", "frame_grid",
    "compatibility_residuals", "curvature_line_check", "umbilical_gradient_literal",
    "UMBILIC_RTOL",
]

UMBILIC_RTOL = 1e-6


@dataclass(frozen=True)
class CurvatureSample:
    kappa1: float
    kappa2: float
    H: float
    Ke: float
    Ki: float
    nu: float
    varrho: float | None  # None when the point is not umbilical

    @classmethod
    def build(cls, kappa1, kappa2, Ki, nu) -> "CurvatureSample":
        umbilic = abs(kappa1 - kappa2) <= UMBILIC_RTOL * max(1.0, abs(kappa1))
        return cls(kappa1, kappa2, 0.5 * (kappa1 + kappa2), kappa1 * kappa2, Ki, nu,
                   kappa1 if umbilic else None)


def _ambient_terms(space: WarpedProduct, t: float):
    """``(f', F, horizontal sectional curvature)`` at height ``t``."""
    f, fp, fpp = space.warp.eval(t)
    e = math.exp(-2.0 * f)
    return fp, fpp + space.kappa * e, space.kappa * e - fp * fp


def invariant_surface_curvatures(spec: InvariantSurfaceSpec, rho, t, rho_s, t_s, rho_ss, t_ss):
    """Principal curvatures ``(kappa1, kappa2)`` of the orbit surface of a profile.

    ``kappa1`` is the curvature of the profile, ``kappa2`` the normal
    curvature along the orbits; the normal makes ``(alpha', N)`` positively
    oriented in the ``(d/drho, xi)`` plane.  The profile need not be unit speed.
    """
    geo = spec.geometry
    geo.check_rho(rho)
    f, fp, _ = spec.warp.eval(t)
    ef = math.exp(f)
    A = geo.A(rho)
    a = ef * A * rho_s
    v = math.sqrt(a * a + t_s * t_s)
    if v == 0.0:
        raise DomainError("profile velocity vanishes")
    k1 = ef * A * (t_ss * rho_s - t_s * rho_ss - geo.dlogA(rho) * t_s * rho_s ** 2
                   - 2.0 * fp * t_s * t_s * rho_s - fp * a * a * rho_s) / v ** 3
    k2 = (geo.orbit_coefficient(rho) * t_s / ef - fp * a) / v
    return k1, k2


def translational_curvatures_literal(spec: InvariantSurfaceSpec, rho, t, rho_s, t_s, rho_ss, t_ss):
    """The translational curvature formulas in their printed form (audit only).

    Uses ``lambda_i = A``, ``h_i = -A'/A``, ``m_i = -B'/(A B)`` and keeps the
    ``e^{2f} t_s rho_s^3`` term and the sign relation ``kappa1^0 = -kappa1^{1,2}``
    exactly as printed.
    """
    geo = spec.geometry
    if spec.iso is IsometryClass.ROTATIONAL:
        raise ValueError("literal formulas cover translation classes only")
    f, fp, _ = spec.warp.eval(t)
    ef = math.exp(f)
    lam = geo.A(rho)
    h = -geo.dlogA(rho)
    m = -geo.orbit_coefficient(rho)
    v = math.sqrt(t_s * t_s + ef * ef * rho_s * rho_s * lam * lam)
    k1 = ef * lam * (2 * fp * t_s * t_s * rho_s + ef * ef * t_s * rho_s ** 3 * lam * lam
                     + t_s * rho_ss - t_ss * rho_s - t_s * rho_s * rho_s * h) / v ** 3
    if spec.iso is IsometryClass.EUCLIDEAN:
        k1 = -k1
    k2 = (t_s * m / ef + ef * fp * rho_s * lam) / v
    return k1, k2


def _normal_and_nu(spec, rho, t, rho_s, t_s, w):
    geo = spec.geometry
    a = math.exp(spec.warp.f(t)) * geo.A(rho) * rho_s
    v = math.hypot(a, t_s)
    e_rho = geo.radial_frame(rho, w)
    N = (-t_s * e_rho + np.array([0.0, 0.0, a])) / v
    return N, a / v


def curvature_sample(spec: InvariantSurfaceSpec, jet) -> CurvatureSample:
    """Curvatures plus intrinsic curvature (from the Gauss equation) at a profile jet."""
    rho, t, rho_s, t_s, rho_ss, t_ss = jet
    k1, k2 = invariant_surface_curvatures(spec, rho, t, rho_s, t_s, rho_ss, t_ss)
    _, nu = _normal_and_nu(spec, rho, t, rho_s, t_s, 0.0)
    _, F, sec = _ambient_terms(spec.space, t)
    Ki = k1 * k2 + sec - F * (1.0 - nu * nu)
    return CurvatureSample.build(k1, k2, Ki, nu)


def cylinder_curvatures(kappa_g2: float, warp: WarpingFunction, t: float) -> CurvatureSample:
    """Vertical cylinder over a curve of geodesic curvature ``kappa_g2`` in ``M(kappa)``."""
    f, fp, fpp = warp.eval(t)
    k1 = -math.exp(-f) * kappa_g2 + 0.0  # no negative zero
    return CurvatureSample(k1, 0.0, 0.5 * k1, 0.0, -fp * fp - fpp, 0.0,
                           None if abs(k1) > UMBILIC_RTOL else 0.0)


# --------------------------------------------------------------------------
# Meshes
# --------------------------------------------------------------------------

@dataclass
class SurfaceMesh:
    """``(s, w)`` grid of an invariant surface with per-vertex data.

    ``points`` and ``normals`` have shape ``(n_s, n_w, 3)``; normals are in
    frame components.  ``welded`` marks a full rotational turn whose last
    ``w`` column connects back to the first.
    """

    spec: InvariantSurfaceSpec
    s: np.ndarray
    omega: np.ndarray
    points: np.ndarray
    normals: np.ndarray
    curvatures: list  # one CurvatureSample per s row (the orbit acts by isometries)
    welded: bool = False

    @property
    def shape(self) -> tuple[int, int]:
        return self.points.shape[:2]

    def curvature_at(self, i: int, j: int) -> CurvatureSample:
        if not 0 <= j < len(self.omega):
            raise IndexError(j)
        return self.curvatures[i]

    def faces(self) -> list[tuple[int, int, int, int]]:
        """Quad faces as zero-based vertex indices into ``points.reshape(-1, 3)``."""
        n, m = self.shape
        cols = m if self.welded else m - 1
        out = []
        for i in range(n - 1):
            for j in range(cols):
                jn = (j + 1) % m
                out.append((i * m + j, (i + 1) * m + j, (i + 1) * m + jn, i * m + jn))
        return out


def generate_mesh(spec: InvariantSurfaceSpec, curve, omega_range=(0.0, 2.0 * math.pi),
                  omega_steps: int = 128) -> SurfaceMesh:
    """Sweep a profile by the isometry group.

    For rotational surfaces a range of length ``2 pi`` is sampled without its
    endpoint and the seam is welded.
    """
    if omega_steps < 2:
        raise ValueError("omega_steps must be at least 2")
    w0, w1 = map(float, omega_range)
    if not w1 > w0:
        raise ValueError("omega range must be increasing")
    if spec.iso is IsometryClass.HYPERBOLIC and w0 <= 0.0:
        raise ValueError("hyperbolic translation orbits need w > 0")
    full = spec.iso is IsometryClass.ROTATIONAL and abs((w1 - w0) - 2.0 * math.pi) < 1e-12
    omega = np.linspace(w0, w1, omega_steps, endpoint=not full)
    s_vals = np.asarray(curve.s, float)
    if len(s_vals) == 0:
        raise ValueError("curve has no samples")
    if np.any(np.diff(s_vals) <= 0):
        raise ValueError("curve samples must be strictly increasing in s")
    jets = curve.jets()
    geo = spec.geometry
    n, m = len(s_vals), len(omega)
    points = np.empty((n, m, 3))
    normals = np.empty((n, m, 3))
    for i, (rho, t, rho_s, t_s, _, _) in enumerate(jets):
        for j, w in enumerate(omega):
            points[i, j] = geo.embed(rho, t, w)
            normals[i, j] = _normal_and_nu(spec, rho, t, rho_s, t_s, w)[0]
    curv = [curvature_sample(spec, jet) for jet in jets]
    return SurfaceMesh(spec, s_vals, omega, points, normals, curv, full)


def mesh_immersion(spec: InvariantSurfaceSpec, curve):
    """Sampler ``(s, w) -> chart point`` built on the curve's dense evaluation."""
    geo = spec.geometry

    def immersion(s, w):
        rho, t = curve.evaluate(s)[:2]
        return geo.embed(rho, t, w)

    return immersion


# --------------------------------------------------------------------------
# Finite-difference shape operator
# --------------------------------------------------------------------------

@dataclass
class SurfaceFrameSample:
    """Local data at one parameter point; vectors in frame components.

    ``S[:, b]`` holds the tangent-basis components of ``S(d_b)``.
    """

    point: np.ndarray
    tangents: np.ndarray  # (3, 2) columns d_s, d_w
    normal: np.ndarray
    g: np.ndarray
    S: np.ndarray
    T: np.ndarray         # tangent-basis components
    nu: float

    @property
    def T_ambient(self) -> np.ndarray:
        return self.tangents @ self.T

    def principal_curvatures(self) -> np.ndarray:
        return np.sort(np.linalg.eigvals(self.S).real)

    def orthonormal_shape(self) -> np.ndarray:
        """``S`` in an orthonormal tangent basis (symmetric up to discretization)."""
        q, r = np.linalg.qr(self.tangents)
        return r @ self.S @ np.linalg.inv(r)

    def umbilic_gap(self) -> float:
        """``|kappa1 - kappa2|`` as twice the 2-norm of the trace-free part."""
        S = self.orthonormal_shape()
        dev = S - 0.5 * np.trace(S) * np.eye(2)
        return 2.0 * float(np.linalg.norm(dev, 2))


def _tangents(space, immersion, s, w, h):
    p = np.asarray(immersion(s, w), float)
    ds = (np.asarray(immersion(s + h, w)) - np.asarray(immersion(s - h, w))) / (2 * h)
    dw = (np.asarray(immersion(s, w + h)) - np.asarray(immersion(s, w - h))) / (2 * h)
    return p, np.column_stack([space.to_frame(p, ds), space.to_frame(p, dw)])


def _unit_normal(tangents):
    n = np.cross(tangents[:, 0], tangents[:, 1])
    norm = np.linalg.norm(n)
    if not norm > 1e-12 * float(np.sum(tangents * tangents)):
        raise DegenerateTangentError("tangent vectors are (nearly) parallel")
    return n / norm


def numeric_shape_operator(space: WarpedProduct, immersion, s: float, w: float,
                           h: float = 1e-3, orientation=None) -> SurfaceFrameSample:
    """Shape operator from central differences of the immersion only.

    The normal is the normalized frame cross product of the difference
    tangents, flipped to agree with ``orientation`` (frame vector) when given.
    ``nabla_X N`` uses differences of the normal's frame components plus the
    ambient connection.
    """
    p, tang = _tangents(space, immersion, s, w, h)
    N = _unit_normal(tang)
    sign = 1.0
    if orientation is not None and N.dot(orientation) < 0:
        sign = -1.0
    N = sign * N

    def normal_at(ss, ww):
        _, tg = _tangents(space, immersion, ss, ww, h)
        return sign * _unit_normal(tg)

    dN = np.column_stack([
        (normal_at(s + h, w) - normal_at(s - h, w)) / (2 * h),
        (normal_at(s, w + h) - normal_at(s, w - h)) / (2 * h),
    ])
    C = space.connection(p)
    nabla = dN + np.einsum("ib,k,ikm->mb", tang, N, C)
    S, *_ = np.linalg.lstsq(tang, -nabla, rcond=None)
    g = tang.T @ tang
    if np.linalg.det(g) <= 1e-14 * np.trace(g) ** 2:
        raise DegenerateTangentError("induced metric is nearly singular")
    nu = float(N[2])
    xi = np.array([0.0, 0.0, 1.0])
    T, *_ = np.linalg.lstsq(tang, xi - nu * N, rcond=None)
    return SurfaceFrameSample(p, tang, N, g, S, T, nu)


# --------------------------------------------------------------------------
# Umbilicity
# --------------------------------------------------------------------------

@dataclass
class UmbilicityReport:
    analytic: float          # max |kappa1 - kappa2| from the curvature formulas
    numeric: float | None    # max eigenvalue gap of the difference shape operator
    analytic_samples: int
    numeric_samples: int


def umbilicity_residual(spec: InvariantSurfaceSpec, curve, h: float = 1e-3,
                        numeric_points: int = 8, omega: float = 0.3,
                        immersion=None) -> UmbilicityReport:
    """Both umbilicity tracks over a profile.

    The numeric track samples ``numeric_points`` interior values of ``s``
    (pass 0 to skip it).  ``immersion`` overrides the default sampler.
    """
    jets = curve.jets()
    gaps = [abs(k1 - k2) for k1, k2 in
            (invariant_surface_curvatures(spec, *jet) for jet in jets)]
    analytic = max(gaps) if gaps else 0.0
    numeric = None
    count = 0
    s_vals = np.asarray(curve.s, float)
    if numeric_points > 0 and len(s_vals) > 1:
        lo, hi = s_vals[0] + 3 * h, s_vals[-1] - 3 * h
        if hi > lo:
            imm = immersion or mesh_immersion(spec, curve)
            w = omega if spec.iso is not IsometryClass.HYPERBOLIC else 1.0 + omega
            values = [numeric_shape_operator(spec.space, imm, s, w, h).umbilic_gap()
                      for s in np.linspace(lo, hi, numeric_points)]
            numeric, count = max(values), len(values)
    return UmbilicityReport(analytic, numeric, len(gaps), count)


# --------------------------------------------------------------------------
# Structure equations on a grid
# --------------------------------------------------------------------------

@dataclass
class FrameGrid:
    space: WarpedProduct
    s: np.ndarray
    omega: np.ndarray
    h: float
    samples: list  # samples[i][j]

    def field(self, getter) -> np.ndarray:
        return np.array([[getter(x) for x in row] for row in self.samples])


def frame_grid(space: WarpedProduct, immersion, s0: float, w0: float, h: float = 1e-3,
               n: int = 5, orientation=None) -> FrameGrid:
    """``n x n`` grid of frame samples with spacing ``h`` centred at ``(s0, w0)``.

    ``orientation(s, w)`` may return a frame vector used to fix the sign of
    the normal at each sample.
    """
    if n < 3:
        raise ValueError("grid needs at least 3x3 samples")
    offsets = h * (np.arange(n) - (n - 1) / 2)
    s_vals, w_vals = s0 + offsets, w0 + offsets
    rows = []
    for s in s_vals:
        row = []
        for w in w_vals:
            hint = orientation(s, w) if orientation else None
            row.append(numeric_shape_operator(space, immersion, s, w, h, hint))
        rows.append(row)
    if orientation is None:
        ref = rows[0][0].normal
        for row in rows:
            for x in row:
                if x.normal.dot(ref) < 0:
                    raise ValueError("normal orientation flips across the grid")
    return FrameGrid(space, s_vals, w_vals, h, rows)


@dataclass
class CompatibilityReport:
    residuals: dict
    h: float
    shape: tuple

    def max(self) -> float:
        return max(self.residuals.values())


def _grad(a, h, axis):
    return np.gradient(a, h, axis=axis, edge_order=2)


def _christoffel(g, h):
    """``Gamma[a, b, c]`` of the induced metric on the grid, shape ``(n, m, 2, 2, 2)``."""
    dg = np.stack([_grad(g, h, 0), _grad(g, h, 1)], axis=-1)  # d_c g_ab -> [..., a, b, c]
    ginv = np.linalg.inv(g)
    # Gamma^a_bc = 1/2 g^ad (d_b g_dc + d_c g_db - d_d g_bc)
    low = 0.5 * (np.einsum("...dcb->...dbc", dg) + dg - np.einsum("...bcd->...dbc", dg))
    return np.einsum("...ad,...dbc->...abc", ginv, low)


def _second(a, h, axis):
    """Second derivative along one axis: central inside, one-sided order 2 at the ends."""
    a = np.moveaxis(a, axis, 0)
    if a.shape[0] < 4:
        raise ValueError("grid needs at least 4 samples per axis for second derivatives")
    out = np.empty_like(a)
    out[1:-1] = a[2:] - 2.0 * a[1:-1] + a[:-2]
    out[0] = 2.0 * a[0] - 5.0 * a[1] + 4.0 * a[2] - a[3]
    out[-1] = 2.0 * a[-1] - 5.0 * a[-2] + 4.0 * a[-3] - a[-4]
    return np.moveaxis(out / (h * h), 0, axis)


def _gauss_curvature(g, h):
    """Intrinsic curvature of the induced metric (Brioschi formula)."""
    E, F, G = g[..., 0, 0], g[..., 0, 1], g[..., 1, 1]
    Eu, Ev = _grad(E, h, 0), _grad(E, h, 1)
    Fu, Fv = _grad(F, h, 0), _grad(F, h, 1)
    Gu, Gv = _grad(G, h, 0), _grad(G, h, 1)
    Evv, Guu = _second(E, h, 1), _second(G, h, 0)
    Fuv = _grad(Fu, h, 1)
    m1 = np.stack([
        np.stack([-0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev], -1),
        np.stack([Fv - 0.5 * Gu, E, F], -1),
        np.stack([0.5 * Gv, F, G], -1),
    ], -2)
    zero = np.zeros_like(E)
    m2 = np.stack([
        np.stack([zero, 0.5 * Ev, 0.5 * Gu], -1),
        np.stack([0.5 * Ev, E, F], -1),
        np.stack([0.5 * Gu, F, G], -1),
    ], -2)
    return (np.linalg.det(m1) - np.linalg.det(m2)) / (E * G - F * F) ** 2


def compatibility_residuals(grid: FrameGrid) -> CompatibilityReport:
    """Max residual of each structure equation over the grid (see module docstring)."""
    space, h = grid.space, grid.h
    n, m = len(grid.s), len(grid.omega)
    tang = grid.field(lambda x: x.tangents)          # (n, m, 3, 2)
    g = grid.field(lambda x: x.g)
    S = grid.field(lambda x: x.S)
    Tc = grid.field(lambda x: x.T)
    nu = grid.field(lambda x: x.nu)
    N = grid.field(lambda x: x.normal)
    Tamb = np.einsum("...ib,...b->...i", tang, Tc)
    pts = grid.field(lambda x: x.point)
    fp = np.empty((n, m))
    F = np.empty((n, m))
    sec = np.empty((n, m))
    for i in range(n):
        for j in range(m):
            fp[i, j], F[i, j], sec[i, j] = _ambient_terms(space, pts[i, j, 2])

    T2 = np.einsum("...a,...ab,...b->...", Tc, g, Tc)
    unit = np.abs(T2 + nu ** 2 - 1.0)

    dT = [_grad(Tamb, h, 0), _grad(Tamb, h, 1)]
    dnu = [_grad(nu, h, 0), _grad(nu, h, 1)]
    SX_amb = np.einsum("...ia,...ab->...ib", tang, S)  # column b: S(d_b) in frame components
    r_tt = np.zeros((n, m))
    r_nu = np.zeros((n, m))
    conn = np.array([[space.connection(pts[i, j]) for j in range(m)] for i in range(n)])
    for b in range(2):
        X = tang[..., :, b]
        amb = dT[b] + np.einsum("...i,...k,...ikm->...m", X, Tamb, conn)
        tan_part = amb - np.einsum("...k,...k->...", amb, N)[..., None] * N
        gXT = np.einsum("...i,...i->...", X, Tamb)
        res = tan_part - nu[..., None] * SX_amb[..., :, b] - fp[..., None] * (X - gXT[..., None] * Tamb)
        r_tt = np.maximum(r_tt, np.linalg.norm(res, axis=-1))
        gSXT = np.einsum("...i,...i->...", SX_amb[..., :, b], Tamb)
        r_nu = np.maximum(r_nu, np.abs(gSXT + dnu[b] + fp * nu * gXT))

    K = _gauss_curvature(g, h)
    gauss = np.abs(K - (np.linalg.det(S) + sec - F * T2))

    G = _christoffel(g, h)
    dS1 = _grad(S[..., :, 1], h, 0)   # d_s of S(d_w)
    dS0 = _grad(S[..., :, 0], h, 1)   # d_w of S(d_s)
    lhs = (dS1 - dS0 + np.einsum("...ac,...c->...a", G[..., :, 0, :], S[..., :, 1])
           - np.einsum("...ac,...c->...a", G[..., :, 1, :], S[..., :, 0]))
    gXT = np.einsum("...ab,...b->...a", g, Tc)  # <d_a, T>
    rhs = -(nu * F)[..., None] * (gXT[..., 0, None] * np.array([0.0, 1.0])
                                  - gXT[..., 1, None] * np.array([1.0, 0.0]))
    diff = lhs - rhs
    codazzi = np.sqrt(np.einsum("...a,...ab,...b->...", diff, g, diff))

    varrho = 0.5 * np.trace(S, axis1=-2, axis2=-1)
    drho = np.stack([_grad(varrho, h, 0), _grad(varrho, h, 1)], axis=-1)
    grad = np.einsum("...ab,...b->...a", np.linalg.inv(g), drho)
    wdiff = grad + (nu * F)[..., None] * Tc
    wl = np.sqrt(np.einsum("...a,...ab,...b->...", wdiff, g, wdiff))

    residuals = {
        "unit_angle": float(unit.max()),
        "tangent_derivative": float(r_tt.max()),
        "angle_derivative": float(r_nu.max()),
        "gauss": float(gauss.max()),
        "codazzi": float(codazzi.max()),
        "umbilical_gradient": float(wl.max()),
    }
    return CompatibilityReport(residuals, h, (n, m))


def umbilical_gradient_literal(grid: FrameGrid) -> float:
    """Max of ``|grad rho - nu F T|`` (opposite sign convention, audit only)."""
    g = grid.field(lambda x: x.g)
    S = grid.field(lambda x: x.S)
    Tc = grid.field(lambda x: x.T)
    nu = grid.field(lambda x: x.nu)
    pts = grid.field(lambda x: x.point)
    F = np.vectorize(lambda t: _ambient_terms(grid.space, t)[1])(pts[..., 2])
    varrho = 0.5 * np.trace(S, axis1=-2, axis2=-1)
    drho = np.stack([_grad(varrho, grid.h, 0), _grad(varrho, grid.h, 1)], axis=-1)
    grad = np.einsum("...ab,...b->...a", np.linalg.inv(g), drho)
    wdiff = grad - (nu * F)[..., None] * Tc
    return float(np.sqrt(np.einsum("...a,...ab,...b->...", wdiff, g, wdiff)).max())


# --------------------------------------------------------------------------
# Curvature lines
# --------------------------------------------------------------------------

@dataclass
class CurvatureLineReport:
    max_angle: float
    checked: int
    skipped: int
    reason: str = ""


def curvature_line_check(samples, t_tol: float = 1e-8) -> CurvatureLineReport:
    """Angle between ``S T`` and ``T`` (induced metric) over frame samples.

    Samples with ``|T| < t_tol`` are skipped; where ``S T`` vanishes the
    direction is trivially principal and the angle is 0.
    """
    if isinstance(samples, FrameGrid):
        samples = [x for row in samples.samples for x in row]
    worst, checked, skipped = 0.0, 0, 0
    for x in samples:
        Tn = math.sqrt(max(float(x.T @ x.g @ x.T), 0.0))
        if Tn < t_tol:
            skipped += 1
            continue
        ST = x.S @ x.T
        STn = math.sqrt(max(float(ST @ x.g @ ST), 0.0))
        checked += 1
        if STn < 1e-12:
            continue
        cos = float(ST @ x.g @ x.T) / (STn * Tn)
        cross = math.sqrt(max(0.0, 1.0 - cos * cos))
        worst = max(worst, math.atan2(cross, abs(cos)))
    reason = "|T| below threshold" if skipped and not checked else ""
    return CurvatureLineReport(worst, checked, skipped, reason)
