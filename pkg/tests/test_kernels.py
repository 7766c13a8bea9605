import math

import numpy as np
import pytest

from necklace.crown import build_crown, u_star_profile
from necklace.errors import DomainError
from necklace.geometry import Point3, SectorConfig
from necklace.kernels import (
    KernelReport,
    PlacedBubble,
    gamma_bb,
    gamma_direct,
    h0,
    h0e,
    h0e_bb,
    kernel_grad,
    kernel_hess,
    place_bubble,
    q_a,
    q_a_expansion,
    t_a,
)

CFG = SectorConfig(K=32)


def _b_point(b_abs, alpha_b):
    return Point3(b_abs * math.cos(alpha_b), b_abs * math.sin(alpha_b), 0.0)


def _bubble(b_abs=0.97, alpha_b=0.01, eps=1e-4, w_abs=1.0, alpha_w=0.02):
    return PlacedBubble(
        eps=eps, a=0.0, q_hat=1.0, w_abs=w_abs, alpha_w=alpha_w,
        b_abs=b_abs, alpha_b=alpha_b, beta_hat=alpha_w,
    )


class TestPlacedBubble:
    def test_validation(self):
        with pytest.raises(DomainError):
            _bubble(eps=0.0)
        with pytest.raises(DomainError):
            _bubble(b_abs=1.0)
        with pytest.raises(DomainError):
            _bubble(b_abs=0.0)
        with pytest.raises(DomainError):
            PlacedBubble(eps=1e-4, a=0.0, q_hat=1.0, w_abs=1.0, alpha_w=0.1,
                         b_abs=0.9, alpha_b=0.0, beta_hat=0.2)
        with pytest.raises(DomainError):
            PlacedBubble(eps=1e-4, a=0.0, q_hat=1.0, w_abs=1.0, alpha_w=0.0,
                         b_abs=0.9, alpha_b=0.0, beta_hat=0.0,
                         W=np.array([[0.0, 1.0, 0.0],
                                     [0.0, 0.0, 0.0],
                                     [0.0, 0.0, 0.0]]))

    def test_derived_quantities(self):
        A = _bubble(b_abs=0.8, alpha_b=0.05)
        assert A.d == pytest.approx((1 - 0.64) / 1.6)
        bp = A.b_point.as_array()
        assert np.hypot(bp[0], bp[1]) == pytest.approx(0.8)
        assert math.atan2(bp[1], bp[0]) == pytest.approx(0.05)
        assert np.linalg.norm(A.w_vec) == pytest.approx(A.w_abs)

    def test_place_bubble_scalars(self):
        crown = build_crown(16)
        prof = u_star_profile(crown)
        xi = Point3(0.6038943129964425, 0.0, 0.0)
        A = place_bubble(1e-5, 0.0, 0.97, 0.0, 0.0, prof, xi)
        assert abs(A.q_hat) < 1e-8
        assert A.w_abs > 0.0
        assert np.allclose(A.W, A.W.T)
        # shifting along the gradient direction changes q_hat linearly
        B = place_bubble(1e-5, 1e-4, 0.97, 0.0, 0.0, prof, xi)
        assert B.q_hat == pytest.approx(1e-4 * A.w_abs, rel=1e-3)


class TestGamma:
    def test_symmetric_in_arguments(self):
        z = Point3(0.7, 0.05, 0.1)
        p = Point3(0.8, -0.03, -0.2)
        assert gamma_direct(z, p, CFG) == pytest.approx(
            gamma_direct(p, z, CFG), rel=1e-12
        )

    def test_coincident_image_rejected(self):
        z = Point3(0.9, 0.0, 0.0)
        # p equal to the first non-identity image of z
        from necklace.kernels import _tail_images

        mat, _ = _tail_images(CFG)[0]
        p = Point3.from_array(mat @ z.as_array())
        with pytest.raises(DomainError):
            gamma_direct(z, p, CFG)

    def test_diagonal_report(self):
        rep = gamma_bb(_b_point(0.96, 0.04 * CFG.theta0), CFG)
        assert isinstance(rep, KernelReport)
        assert rep.abs_err_dc < 1e-11
        assert rep.abs_err_ca < abs(rep.closed_form) * 0.01

    def test_diagonal_exact_at_zero_angle(self):
        rep = gamma_bb(_b_point(0.93, 0.0), CFG)
        assert rep.closed_form == pytest.approx(rep.asymptotic, rel=1e-13)

    def test_even_in_alpha_b(self):
        a = 0.2 * CFG.theta0
        plus = gamma_bb(_b_point(0.95, a), CFG).closed_form
        minus = gamma_bb(_b_point(0.95, -a), CFG).closed_form
        assert plus == pytest.approx(minus, rel=1e-12)

    def test_preconditions(self):
        with pytest.raises(DomainError):
            gamma_bb(_b_point(0.4, 0.0), CFG)
        with pytest.raises(DomainError):
            gamma_bb(_b_point(0.9, 0.51 * CFG.theta0), CFG)
        with pytest.raises(DomainError):
            gamma_bb(Point3(0.9, 0.0, 0.1), CFG)


class TestH0:
    def test_value(self):
        z = Point3(0.3, 0.1, -0.2)
        p = Point3(-0.4, 0.2, 0.5)
        zv, pv = z.as_array(), p.as_array()
        rad = 1 - 2 * zv @ pv + (zv @ zv) * (pv @ pv)
        assert h0(z, p) == pytest.approx(rad**-0.5)

    def test_rejects_boundary_diagonal(self):
        q = Point3(1.0, 0.0, 0.0)
        with pytest.raises(DomainError):
            h0(q, q)

    def test_extension_alternates(self):
        z = Point3(0.85, 0.02, 0.0)
        p = Point3(0.8, -0.01, 0.05)
        val = h0e(z, p, CFG)
        assert np.isfinite(val)
        # the extension of a first-slot-even function picks up h0 itself
        # as the identity-image term
        assert abs(val) < 2.0 * CFG.K * h0(z, p)

    def test_diagonal_report(self):
        rep = h0e_bb(_b_point(0.97, 0.1 * CFG.theta0), CFG)
        assert rep.abs_err_dc < 1e-11
        assert rep.abs_err_ca < abs(rep.closed_form) * 0.05

    def test_diagonal_exact_at_zero_angle(self):
        rep = h0e_bb(_b_point(0.97, 0.0), CFG)
        assert rep.closed_form == pytest.approx(rep.asymptotic, rel=1e-13)

    def test_preconditions(self):
        with pytest.raises(DomainError):
            h0e_bb(_b_point(1.5, 0.0), CFG)
        with pytest.raises(DomainError):
            h0e_bb(_b_point(0.9, 1.1 * CFG.theta0), CFG)


class TestDerivatives:
    @pytest.mark.parametrize("kind", ["gamma", "h0e"])
    @pytest.mark.parametrize("slot", ["z", "p"])
    def test_grad_direct_vs_closed(self, kind, slot):
        A = _bubble(b_abs=0.965, alpha_b=0.1 * CFG.theta0, alpha_w=0.07)
        rep = kernel_grad(kind, slot, A, CFG)
        assert rep.abs_err_dc < 1e-4

    @pytest.mark.parametrize("kind", ["gamma", "h0e"])
    def test_hess_direct_vs_closed(self, kind):
        A = _bubble(b_abs=0.965, alpha_b=0.1 * CFG.theta0, alpha_w=0.07)
        rep = kernel_hess(kind, A, CFG)
        assert rep.abs_err_dc < 1e-3

    def test_bad_slot(self):
        with pytest.raises(DomainError):
            kernel_grad("gamma", "q", _bubble(), CFG)

    def test_bad_kind(self):
        with pytest.raises(DomainError):
            kernel_grad("newton", "z", _bubble(), CFG)

    def test_grad_scales_linearly_in_w(self):
        A1 = _bubble(w_abs=1.0)
        A2 = _bubble(w_abs=2.5)
        r1 = kernel_grad("gamma", "p", A1, CFG)
        r2 = kernel_grad("gamma", "p", A2, CFG)
        assert r2.closed_form == pytest.approx(2.5 * r1.closed_form, rel=1e-12)

    def test_hess_scales_quadratically_in_w(self):
        A1 = _bubble(w_abs=1.0)
        A2 = _bubble(w_abs=2.0)
        r1 = kernel_hess("h0e", A1, CFG)
        r2 = kernel_hess("h0e", A2, CFG)
        assert r2.closed_form == pytest.approx(4.0 * r1.closed_form, rel=1e-12)


class TestPlacedBubbleField:
    def test_singular_at_placement(self):
        A = _bubble()
        with pytest.raises(DomainError):
            q_a(A.b_point, A)

    def test_expansion_matches_profile_pathway(self):
        crown = build_crown(16)
        prof = u_star_profile(crown)
        xi = Point3(0.6038943129964425, 0.0, 0.0)
        A = place_bubble(1e-6, 1e-7, 0.97, 0.01, 0.02, prof, xi)
        z = Point3(0.3, 0.25, 0.1)
        full = q_a(z, A)
        approx = q_a_expansion(z, A)
        scale = math.sqrt(A.eps) * A.eps**2
        assert abs(full - approx) < 100.0 * scale

    def test_image_sum_report(self):
        crown = build_crown(16)
        prof = u_star_profile(crown)
        xi = Point3(0.6038943129964425, 0.0, 0.0)
        A = place_bubble(1e-6, 0.0, 0.97, 0.0, 0.0, prof, xi)
        rep = t_a(A.b_point, A, CFG)
        assert np.isfinite(rep.direct)
        # closed kernel expansion reproduces the direct image sum through
        # the retained orders
        assert rep.abs_err_dc < 100.0 * A.eps**2.5
        assert rep.abs_err_ca < abs(rep.closed_form)
