import math

import numpy as np
import pytest

from umbilic import warps
from umbilic.errors import AdmissibilityError, DomainError
from umbilic.geometry import WarpedProduct
from umbilic.profile import (
    InvariantSurfaceSpec, IsometryClass, ProfileState, closed_form_profile,
    first_integral_target, integrate_geodesic, integrate_profile, pregeodesic_residual,
    profile_rhs, unit_speed_residual,
)

TOL = 1e-10


def spec(iso="rotational", kappa=0, warp=None, c0=1.0, rho0=1.0, t0=math.pi / 2, s0=0.0, branch=1):
    return InvariantSurfaceSpec(iso, kappa, warp or warps.log_csc(), c0, rho0, t0, s0, branch)


class TestSpecValidation:
    @pytest.mark.parametrize("c0", [0.0, -1.0, math.nan])
    def test_c0_positive(self, c0):
        with pytest.raises(ValueError, match="c0 must be positive"):
            spec(c0=c0)

    @pytest.mark.parametrize("iso, kappa", [
        ("euclidean-translation", 1), ("parabolic-translation", 0), ("hyperbolic-translation", 1),
    ])
    def test_class_kappa_pairing(self, iso, kappa):
        with pytest.raises(ValueError):
            spec(iso, kappa, rho0=1.0)

    def test_t0_in_warp_domain(self):
        with pytest.raises(DomainError):
            spec(t0=4.0)

    @pytest.mark.parametrize("iso, kappa, rho0", [
        ("rotational", 0, 0.0), ("rotational", 1, math.pi), ("hyperbolic-translation", -1, 3.2),
        ("parabolic-translation", -1, -0.1),
    ])
    def test_rho0_in_chart(self, iso, kappa, rho0):
        with pytest.raises(DomainError):
            spec(iso, kappa, rho0=rho0)

    def test_class_from_string(self):
        assert spec().iso is IsometryClass.ROTATIONAL
        assert spec("parabolic-translation", -1).space.chart == "halfplane"


class TestFirstIntegral:
    def test_rotational_flat(self):
        assert first_integral_target(spec(c0=2.0), 0.5) == 1.0

    def test_rotational_hyperbolic_near_axis(self):
        assert first_integral_target(spec(kappa=-1, c0=3.0), 1e-12) == pytest.approx(0.0, abs=1e-11)

    def test_hyperbolic_translation(self):
        s = spec("hyperbolic-translation", -1, c0=0.3)
        assert first_integral_target(s, math.pi / 2) == pytest.approx(0.3)

    def test_chart_violation(self):
        with pytest.raises(DomainError):
            first_integral_target(spec(), -0.5)


class TestProfileRhs:
    def test_closed_form_start(self):
        rho_s, t_s = profile_rhs(spec(branch=-1), ProfileState(0.0, 1.0, math.pi / 2, 0.0, 0.0))
        assert (rho_s, t_s) == (pytest.approx(0.0, abs=1e-15), 1.0)

    @pytest.mark.parametrize("warp, t", [(warps.linear(0.8, 0.1), 0.5), (warps.log_csc(), 1.0)])
    def test_horizontal_tangent(self, warp, t):
        # t_s -> 0 at the axis; the constraint then forces rho_s = e^{-f}
        s = spec(warp=warp, t0=t, c0=1.0)
        for branch in (1, -1):
            rho_s, t_s = profile_rhs(s, ProfileState(0.0, 1e-13, t, 0.0, 0.0), branch)
            assert rho_s == pytest.approx(branch * math.exp(-warp.f(t)), rel=1e-12)

    def test_admissibility(self):
        with pytest.raises(AdmissibilityError):
            profile_rhs(spec(c0=1.0), ProfileState(0.0, 2.0, 1.0, 0.0, 0.0))

    def test_unit_speed(self):
        s = spec("parabolic-translation", -1, warps.linear(0.5, 0.0), c0=2.0, rho0=1.0, t0=1.0)
        state = ProfileState(0.0, 1.3, 0.4, 0.0, 0.0)
        rho_s, t_s = profile_rhs(s, state)
        assert abs(unit_speed_residual(s, 1.3, 0.4, rho_s, t_s)) < 1e-15


class TestClosedForms:
    def test_k0_start(self):
        assert closed_form_profile("k0-rot", 0.0) == (1.0, pytest.approx(math.pi / 2))

    def test_k1_start(self):
        assert closed_form_profile("k1-rot", 0.0) == (pytest.approx(math.pi / 2),) * 2

    def test_k0_at_one(self):
        rho, t = closed_form_profile("k0-rot", 1.0)
        assert rho == pytest.approx(0.6480543, abs=1e-7)
        assert t == pytest.approx(2.4365658, abs=1e-7)  # 2 atan(e)

    @pytest.mark.parametrize("s", [-1.0, 0.0, 0.7, 2.0])
    def test_k0_substitution(self, s):
        # exact derivatives: rho_s = -sech tanh, t_s = sech
        warp = warps.log_csc()
        rho, t = closed_form_profile("k0-rot", s)
        rho_s, t_s = -math.tanh(s) / math.cosh(s), 1 / math.cosh(s)
        assert abs(math.exp(2 * warp.f(t)) * rho_s ** 2 + t_s ** 2 - 1) < 1e-12
        assert abs(t_s - rho) < 1e-12

    def test_out_of_range(self):
        with pytest.raises(DomainError):
            closed_form_profile("k0-rot", math.inf)
        with pytest.raises(DomainError):
            closed_form_profile("plane", 10.0, gamma=1.0, warp=warps.log_csc(), t0=1.0)
        with pytest.raises(ValueError):
            closed_form_profile("unknown", 0.0)


def check_invariants(result, tol=TOL):
    s = result.s
    assert np.all(np.diff(s) > 0)
    assert np.abs(result.unit_speed_residuals()).max() <= 10 * tol


class TestIntegrateProfile:
    def test_k0_closed_form(self):
        r = integrate_profile(spec(branch=-1), 1.5, tol=TOL)
        check_invariants(r)
        assert r.termination == "reached-end"
        for p in r.samples:
            rho, t = closed_form_profile("k0-rot", p.s)
            assert abs(p.rho - rho) < 1e-6 and abs(p.t - t) < 1e-6

    def test_k1_closed_form(self):
        s0 = -2.0
        start = closed_form_profile("k1-rot", s0)[0]
        s = spec(kappa=1, warp=warps.log_cot(), c0=1.0, rho0=start, t0=start, s0=s0)
        r = integrate_profile(s, -0.2)
        check_invariants(r)
        for p in r.samples:
            assert p.rho == pytest.approx(closed_form_profile("k1-rot", p.s)[0], abs=1e-6)
            assert p.t == pytest.approx(p.rho, abs=1e-6)

    @pytest.mark.parametrize("gamma", [0.3, 1.0, -0.6])
    def test_straight_plane_profile(self, gamma):
        s = spec("euclidean-translation", 0, warps.constant(0.0), c0=math.sin(abs(gamma)),
                 rho0=0.2, t0=0.1, branch=1 if math.cos(gamma) > 0 else -1)
        r = integrate_profile(s, 2.0)
        for p in r.samples:
            assert p.t == pytest.approx(0.1 + p.s * math.sin(abs(gamma)), abs=1e-12)

    def test_warped_plane_profile(self):
        warp, gamma = warps.linear(0.5, 0.0), 0.4
        s = spec("euclidean-translation", 0, warp, c0=math.sin(gamma), rho0=0.0, t0=0.2)
        r = integrate_profile(s, 2.0)
        assert np.abs(r.jets()[:, 5]).max() == 0.0  # t_ss = 0
        for p in r.samples[:: max(1, len(r.samples) // 10)]:
            x, t = closed_form_profile("plane", p.s, gamma=gamma, warp=warp, t0=0.2)
            assert p.rho == pytest.approx(x, abs=1e-8)
            assert p.t == pytest.approx(t, abs=1e-12)

    def test_round_sphere(self):
        # f = 0, kappa = 0, c0 = 1/2: a sphere of radius 2 centred on the axis
        s = spec(warp=warps.constant(0.0), c0=0.5, rho0=0.5, t0=0.0)
        r = integrate_profile(s, 20.0)
        check_invariants(r)
        tc = math.sqrt(4 - 0.25)
        dev = [abs(p.rho ** 2 + (p.t - tc) ** 2 - 4.0) for p in r.samples]
        assert max(dev) < 1e-8
        assert r.termination == "axis"
        assert r.flips == 1
        assert r.turning_points[0] == pytest.approx(2 * (math.pi / 2 - math.asin(0.25)), abs=1e-9)

    def test_axis_stop(self):
        s = spec(warp=warps.constant(0.0), c0=0.5, rho0=0.5, t0=0.0, branch=-1)
        r = integrate_profile(s, 5.0)
        assert r.termination == "axis"
        assert r.samples[-1].rho < 1e-8

    def test_warp_boundary_stop(self):
        s = spec("euclidean-translation", 0, warps.log_csc(), c0=0.5, rho0=0.3, t0=1.0)
        r = integrate_profile(s, 10.0)
        assert r.termination == "warp-boundary"
        assert r.s[-1] == pytest.approx(2 * (math.pi - 1.0), abs=1e-6)
        check_invariants(r)

    def test_turning_point_limit(self):
        s = spec("hyperbolic-translation", -1, warps.constant(0.0), c0=0.5, rho0=1.2, t0=0.0)
        r = integrate_profile(s, 40.0, max_flips=3)
        assert r.termination == "turning-point-limit"
        assert r.flips == 3
        assert len(r.turning_points) == 4  # the fourth is where the run stopped
        check_invariants(r)
        full = integrate_profile(s, 40.0)
        assert full.termination == "reached-end" and full.flips > 3

    def test_turning_points_have_unit_t_s(self):
        s = spec("hyperbolic-translation", -1, warps.constant(0.0), c0=0.5, rho0=1.2, t0=0.0)
        r = integrate_profile(s, 15.0)
        assert r.flips >= 2
        for s_turn in r.turning_points:
            _, _, rho_s, t_s, _, _ = r.evaluate(s_turn)
            assert abs(rho_s) < 1e-6

    def test_first_integral_adherence(self):
        """t(s) from the dense solution differentiates to h(rho(s))."""
        s = spec(kappa=-1, warp=warps.linear(0.5, 0.0), c0=1.0, rho0=0.3, t0=1.0)
        r = integrate_profile(s, 3.0)
        h = 1e-4
        for x in np.linspace(0.2, 2.8, 9):
            dt = (r.evaluate(x + h)[1] - r.evaluate(x - h)[1]) / (2 * h)
            assert dt == pytest.approx(first_integral_target(s, r.evaluate(x)[0]), abs=1e-7)

    def test_inadmissible_start(self):
        with pytest.raises(AdmissibilityError):
            integrate_profile(spec("euclidean-translation", 0, c0=2.0, rho0=0.3, t0=1.0), 1.0)


class TestGeodesics:
    def test_vertical(self):
        space = WarpedProduct(0, warps.linear(1.0, 0.0))
        g = integrate_geodesic(space, (0.1, 0.2, 0.0), (0.0, 0.0, 1.0), 2.0)
        assert np.all(g.nu == 1.0)
        assert np.all(g.points[:, :2] == [0.1, 0.2])
        assert g.points[-1, 2] == pytest.approx(2.0)

    def test_flat_straight_line(self):
        space = WarpedProduct(0, warps.constant(0.0))
        v0 = np.array([0.6, 0.0, 0.8])
        g = integrate_geodesic(space, (0.0, 0.0, 0.0), v0, 3.0)
        assert np.abs(g.points - np.outer(g.s, v0)).max() < 1e-12

    def test_conservation_and_speed(self):
        space = WarpedProduct(-1, warps.log_csc())
        v0 = np.array([0.48, 0.6, 0.64])
        g = integrate_geodesic(space, (0.1, 0.0, 1.2), v0, 1.5)
        q = g.conserved()
        assert np.abs(q - q[0]).max() <= 10 * TOL
        assert np.abs(g.speed_residuals()).max() <= 10 * TOL
        for s in (0.3, 0.8, 1.2):
            assert pregeodesic_residual(g, s) < 1e-5

    def test_non_unit_velocity(self):
        with pytest.raises(ValueError):
            integrate_geodesic(WarpedProduct(0, warps.constant()), (0, 0, 0), (1.0, 1.0, 0.0), 1.0)

    def test_warp_boundary(self):
        space = WarpedProduct(0, warps.log_csc())
        g = integrate_geodesic(space, (0.0, 0.0, 3.0), (0.0, 0.0, 1.0), 2.0)
        assert g.termination == "warp-boundary"
