"""Ambient geometry of the warped product ``M(kappa)_f x I``.

Coordinates are ``(x, y, t)``.  The fiber carries the conformal metric
``lambda^2 (dx^2 + dy^2)`` and the full metric is
``e^{2f(t)} lambda^2 (dx^2 + dy^2) + dt^2``.  Charts:

* ``"disk"``: ``lambda = 2 / (1 + kappa (x^2 + y^2))`` (Euclidean plane for
  kappa=0, stereographic sphere for kappa=1, Poincare disk for kappa=-1);
* ``"halfplane"``: ``lambda = 1 / y`` for kappa=-1, used by the
  translation-invariant families.

Vectors written in the orthonormal frame ``E1 = dx/(lambda e^f)``,
``E2 = dy/(lambda e^f)``, ``E3 = xi = dt`` are plain length-3 arrays.
Curvature follows the sign convention
``R(A,B)C = nabla_B nabla_A C - nabla_A nabla_B C + nabla_[A,B] C``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, SingularChartError
from .warps import WarpingFunction

__all__ = [
    "AmbientPoint", "WarpedProduct", "check_kappa", "conformal_factor",
    "metric_dot", "connection_apply", "curvature_op",
    "conformal_geodesic_curvature", "constant_umbilic_residual", "CHART_EPS",
]

# 1 + kappa r^2 below this is treated as the chart's singular boundary.
CHART_EPS = 1e-12


class AmbientPoint(NamedTuple):
    x: float
    y: float
    t: float


def check_kappa(kappa) -> int:
    if kappa not in (-1, 0, 1):
        raise ValueError(f"kappa must be -1, 0 or 1, got {kappa!r}")
    return int(kappa)


def _conformal(kappa: int, x: float, y: float, chart: str):
    """Return ``(lambda, lambda_x, lambda_y)``."""
    if chart == "halfplane":
        if kappa != -1:
            raise ValueError("the half-plane chart is only defined for kappa=-1")
        if y <= 0.0:
            raise DomainError(f"half-plane chart requires y > 0, got y={y!r}")
        lam = 1.0 / y
        return lam, 0.0, -lam * lam
    if chart != "disk":
        raise ValueError(f"unknown chart {chart!r}")
    if kappa == 0:
        return 1.0, 0.0, 0.0
    r2 = x * x + y * y
    if kappa == -1 and r2 >= 1.0:
        raise DomainError(f"Poincare disk chart requires x^2+y^2 < 1, got {r2!r}")
    denom = 1.0 + kappa * r2
    if denom < CHART_EPS:
        raise SingularChartError(f"conformal factor singular at (x, y)=({x!r}, {y!r})")
    lam = 2.0 / denom
    # d(lambda)/dx = -kappa x lambda^2
    return lam, -kappa * x * lam * lam, -kappa * y * lam * lam


def conformal_factor(kappa, x: float, y: float, chart: str = "disk") -> float:
    """Conformal factor ``lambda`` of the fiber metric at ``(x, y)``."""
    return _conformal(check_kappa(kappa), x, y, chart)[0]


@dataclass(frozen=True)
class WarpedProduct:
    """``M(kappa)_f x I`` in a fixed chart; all methods are pure."""

    kappa: int
    warp: WarpingFunction
    chart: str = "disk"

    def __post_init__(self):
        check_kappa(self.kappa)
        if self.chart == "halfplane" and self.kappa != -1:
            raise ValueError("the half-plane chart is only defined for kappa=-1")

    # -- metric ----------------------------------------------------------
    def conformal(self, x: float, y: float):
        return _conformal(self.kappa, x, y, self.chart)

    def scale(self, p) -> float:
        """``lambda e^f``: coordinate length of the unit horizontal frame vectors."""
        lam = self.conformal(p[0], p[1])[0]
        return lam * math.exp(self.warp.f(p[2]))

    def metric(self, p) -> np.ndarray:
        mu = self.scale(p)
        return np.diag([mu * mu, mu * mu, 1.0])

    def dot(self, p, v, w) -> float:
        mu = self.scale(p)
        return mu * mu * (v[0] * w[0] + v[1] * w[1]) + v[2] * w[2]

    def to_frame(self, p, v) -> np.ndarray:
        """Coordinate vector -> frame components."""
        mu = self.scale(p)
        return np.array([mu * v[0], mu * v[1], v[2]], dtype=float)

    def from_frame(self, p, a) -> np.ndarray:
        """Frame components -> coordinate vector."""
        mu = self.scale(p)
        return np.array([a[0] / mu, a[1] / mu, a[2]], dtype=float)

    # -- connection ------------------------------------------------------
    def connection(self, p, literal: bool = False) -> np.ndarray:
        """Array ``C`` with ``C[i, j]`` the frame components of ``nabla_{E_i} E_j``.

        ``literal=True`` reproduces a table with ``nabla_xi E_1 = f' E_1`` and
        ``nabla_xi E_2 = f' E_2``; that table is not torsion free and is kept
        only for the discrepancy audit.
        """
        lam, lam_x, lam_y = self.conformal(p[0], p[1])
        f, fp, _ = self.warp.eval(p[2])
        ef = math.exp(f)
        a = lam_x / (lam * lam * ef)
        b = lam_y / (lam * lam * ef)
        C = np.zeros((3, 3, 3))
        C[0, 0] = (0.0, -b, -fp)
        C[0, 1] = (b, 0.0, 0.0)
        C[0, 2] = (fp, 0.0, 0.0)
        C[1, 0] = (0.0, a, 0.0)
        C[1, 1] = (-a, 0.0, -fp)
        C[1, 2] = (0.0, fp, 0.0)
        if literal:
            C[2, 0] = (fp, 0.0, 0.0)
            C[2, 1] = (0.0, fp, 0.0)
        return C

    def connection_apply(self, p, i: int, j: int) -> np.ndarray:
        """Frame components of ``nabla_{E_i} E_j`` (1-based indices)."""
        if i not in (1, 2, 3) or j not in (1, 2, 3):
            raise ValueError("frame indices must be 1, 2 or 3")
        return self.connection(p)[i - 1, j - 1].copy()

    def covariant_frame(self, p, X, field_value, field_derivative) -> np.ndarray:
        """``nabla_X W`` in frame components.

        ``field_value`` are the frame components of ``W`` at ``p`` and
        ``field_derivative`` their directional derivative along ``X``.
        """
        C = self.connection(p)
        return np.asarray(field_derivative, float) + np.einsum("i,k,ikm->m", X, field_value, C)

    # -- curvature -------------------------------------------------------
    def curvature(self, p, A, B, C, literal: bool = False) -> np.ndarray:
        """``R(A, B) C`` from the closed forms, expanded over the
        horizontal/vertical split of each argument.

        ``literal=True`` uses ``xi(f') - xi(f) f'`` instead of ``f'' + f'^2``
        in ``R(V, X) Y`` (audit only).
        """
        f, fp, fpp = self.warp.eval(p[2])
        A, B, C = (np.asarray(v, float) for v in (A, B, C))
        Xh, Yh, Zh = A.copy(), B.copy(), C.copy()
        Xh[2] = Yh[2] = Zh[2] = 0.0
        a3, b3, c3 = A[2], B[2], C[2]
        k_hhh = fp * fp - self.kappa * math.exp(-2.0 * f)
        k_mixed = fpp + fp * fp
        k_vhh = (fpp - fp * fp) if literal else k_mixed
        out = k_hhh * (Yh.dot(Zh) * Xh - Xh.dot(Zh) * Yh)
        out += k_mixed * c3 * (b3 * Xh - a3 * Yh)
        out[2] += k_vhh * (a3 * Yh.dot(Zh) - b3 * Xh.dot(Zh))
        return out

    def curvature_by_commutator(self, p, A, B, C, h: float = 1e-4) -> np.ndarray:
        """``R(A, B) C`` for constant-coefficient frame fields, from the
        connection table and central differences (independent of the closed
        forms in :meth:`curvature`)."""
        A, B, C = (np.asarray(v, float) for v in (A, B, C))
        p = np.asarray(p, float)

        def nabla_field(Xc, Yc, q):
            return np.einsum("i,j,ijm->m", Xc, Yc, self.connection(q))

        def second(first, second_dir):
            # nabla_{second_dir} (nabla_first C)
            d = self.from_frame(p, second_dir)
            w_plus = nabla_field(first, C, p + h * d)
            w_minus = nabla_field(first, C, p - h * d)
            dw = (w_plus - w_minus) / (2 * h)
            return self.covariant_frame(p, second_dir, nabla_field(first, C, p), dw)

        conn = self.connection(p)
        bracket = np.einsum("i,j,ijm->m", A, B, conn) - np.einsum("i,j,ijm->m", B, A, conn)
        return second(A, B) - second(B, A) + nabla_field(bracket, C, p)

    def constant_umbilic_residual(self, t: float) -> float:
        return constant_umbilic_residual(self.warp, self.kappa, t)


def metric_dot(kappa, warp: WarpingFunction, p, v, w, chart: str = "disk") -> float:
    return WarpedProduct(check_kappa(kappa), warp, chart).dot(p, v, w)


def connection_apply(kappa, warp: WarpingFunction, p, i: int, j: int,
                     chart: str = "disk") -> np.ndarray:
    return WarpedProduct(check_kappa(kappa), warp, chart).connection_apply(p, i, j)


def curvature_op(kappa, warp: WarpingFunction, p, A, B, C, chart: str = "disk") -> np.ndarray:
    return WarpedProduct(check_kappa(kappa), warp, chart).curvature(p, A, B, C)


def conformal_geodesic_curvature(kappa_sigma: float, dphi_dn: float, phi: float) -> float:
    """Geodesic curvature of a curve after the conformal change ``e^{2 phi} sigma``.

    ``dphi_dn`` is the derivative of ``phi`` along the inner unit normal
    (unit for the original metric ``sigma``).
    """
    return math.exp(-phi) * (kappa_sigma - dphi_dn)


def constant_umbilic_residual(warp: WarpingFunction, kappa, t: float) -> float:
    """``f''(t) + kappa e^{-2 f(t)}``; zero exactly for warps whose umbilical
    surfaces have constant umbilical function."""
    f, _, fpp = warp.eval(t)
    return fpp + check_kappa(kappa) * math.exp(-2.0 * f)
