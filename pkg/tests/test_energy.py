import math

import numpy as np
import pytest

from necklace.crown import talenti_profile
from necklace.energy import (
    ReducedConfig,
    ReducedPoint,
    _box,
    a_gamma,
    c0,
    c2,
    c_star,
    default_model,
    eps_star,
    in_box,
    j_reduced,
    minimize_psi,
    psi_full,
    psi_leading,
    u6_integral,
)
from necklace.errors import DomainError
from necklace.geometry import Point3
from necklace.special import ZETA3, ZETA5


def _cfg(K=64):
    return ReducedConfig(K=K, lam=1.0, gnorm=1.0, cstar=0.25, delta=0.1)


def _mid_point(cfg):
    lo, hi = _box(cfg)["d"]
    d = 0.5 * (lo + hi)
    e_lo, e_hi = _box(cfg)["eps"]
    eps = min(max(eps_star(cfg, d), e_lo), e_hi)
    return ReducedPoint(eps=eps, a=0.0, d=d, alpha_b=0.0, alpha_w=0.0)


class TestConfigs:
    @pytest.mark.parametrize("kwargs", [
        {"K": 63}, {"K": 2}, {"lam": 0.0}, {"gnorm": -1.0},
        {"cstar": 0.0}, {"delta": 0.0}, {"delta": 1.0},
    ])
    def test_rejects(self, kwargs):
        base = dict(K=64, lam=1.0, gnorm=1.0, cstar=0.25, delta=0.1)
        base.update(kwargs)
        with pytest.raises(DomainError):
            ReducedConfig(**base)

    def test_b_abs_derived(self):
        A = ReducedPoint(eps=1e-6, a=0.0, d=0.07, alpha_b=0.0, alpha_w=0.0)
        assert A.b_abs == pytest.approx(math.sqrt(1.0 + 0.07**2) - 0.07)

    def test_in_box(self):
        cfg = _cfg()
        assert in_box(_mid_point(cfg), cfg)
        box = _box(cfg)
        outside = ReducedPoint(eps=2.0 * box["eps"][1], a=0.0,
                               d=0.5 * sum(box["d"]), alpha_b=0.0, alpha_w=0.0)
        assert not in_box(outside, cfg)


class TestLeadingForms:
    def test_c0_log4_ratio(self):
        K = 256
        ratio = c0(K, math.log(K) / K) * math.pi / (K * math.log(4.0))
        assert abs(ratio - 1.0) <= 0.15

    def test_c2_ratio(self):
        K = 256
        d = (math.log(K) - 0.5 * math.log(math.log(K))) / K
        ratio = c2(K, d) * 2.0 * math.pi**3 / (3.0 * ZETA3 * K**3)
        # the 3d and (Kd)^{-1/2} e^{-Kd} corrections contribute ~0.14 at K=256
        assert abs(ratio - 1.0) <= 0.2

    def test_a_gamma_ratios(self):
        K = 256
        A = a_gamma(K)
        assert A[0, 1] == A[1, 0]
        r11 = A[0, 0] * 2.0 * math.pi**3 / (5.0 * ZETA3 * K**3)
        r22 = A[1, 1] * 8.0 * math.pi**5 / (93.0 * ZETA5 * K**5)
        assert abs(r11 - 1.0) <= 0.05
        assert abs(r22 - 1.0) <= 0.05

    @pytest.mark.parametrize("K", [128, 256])
    def test_a_gamma_positive_definite(self, K):
        A = a_gamma(K)
        lo = float(np.min(np.linalg.eigvalsh(A)))
        floor = 0.5 * min(5.0 * ZETA3 / (2.0 * math.pi**3),
                          93.0 * ZETA5 / (8.0 * math.pi**5)) * K**3
        assert lo >= floor


class TestPsi:
    def test_surviving_terms_at_centered_point(self):
        cfg = _cfg()
        A = _mid_point(cfg)
        pred = (A.eps**3 * cfg.gnorm**2 * c2(cfg.K, A.d) / (8.0 * A.b_abs**3)
                - cfg.lam * A.eps**2 * cfg.cstar)
        assert psi_leading(A, cfg) == pytest.approx(pred, rel=1e-12)
        assert psi_full(A, cfg) == pytest.approx(pred, rel=1e-10)

    def test_even_in_angles(self):
        cfg = _cfg()
        mid = _mid_point(cfg)
        box = _box(cfg)
        for fn in (psi_leading, psi_full):
            plus = fn(ReducedPoint(eps=mid.eps, a=0.0, d=mid.d,
                                   alpha_b=0.3 * box["alpha_b"][1],
                                   alpha_w=0.3 * box["alpha_w"][1]), cfg)
            minus = fn(ReducedPoint(eps=mid.eps, a=0.0, d=mid.d,
                                    alpha_b=-0.3 * box["alpha_b"][1],
                                    alpha_w=-0.3 * box["alpha_w"][1]), cfg)
            assert plus == pytest.approx(minus, rel=1e-10)

    def test_a_term_quadratic(self):
        cfg = _cfg()
        mid = _mid_point(cfg)
        base = psi_leading(mid, cfg)
        diffs = []
        amps = [1e-8, 2e-8, 4e-8]
        for a in amps:
            A = ReducedPoint(eps=mid.eps, a=a, d=mid.d, alpha_b=0.0, alpha_w=0.0)
            diffs.append(psi_leading(A, cfg) - base)
        slope = np.polyfit(np.log(amps), np.log(diffs), 1)[0]
        assert slope == pytest.approx(2.0, abs=0.1)

    def test_eps_criticality(self):
        cfg = _cfg()
        mid = _mid_point(cfg)
        es = eps_star(cfg, mid.d)
        h = 1e-6 * es

        def at(e):
            return psi_leading(
                ReducedPoint(eps=e, a=0.0, d=mid.d, alpha_b=0.0, alpha_w=0.0),
                cfg,
            )

        deriv = (at(es + h) - at(es - h)) / (2.0 * h)
        scale = abs(at(es)) / es
        assert abs(deriv) <= 1e-8 * scale

    def test_full_rejects_bad_mode(self):
        with pytest.raises(DomainError):
            minimize_psi(_cfg(), mode="exact")
        with pytest.raises(DomainError):
            minimize_psi(_cfg(), grid_points=5)


class TestMinimization:
    def test_deterministic(self):
        cfg = _cfg()
        a1, d1 = minimize_psi(cfg, mode="leading")
        a2, d2 = minimize_psi(cfg, mode="leading")
        assert a1 == a2
        assert d1["value"] == d2["value"]

    def test_j_reduced_affine_in_psi(self):
        cfg = _cfg()
        A = _mid_point(cfg)
        q6 = 3.0**1.5 * math.pi**2 / 4.0
        assert j_reduced(A, cfg, q6) == pytest.approx(
            q6 / 3.0 + 2.0 * math.pi * psi_leading(A, cfg), rel=1e-14
        )


class TestCStar:
    def test_precondition(self):
        with pytest.raises(DomainError):
            c_star(talenti_profile(), Point3(0.0, 0.0, 0.0))

    def test_bad_scale(self):
        profile, xi, _gnorm, _cstar = default_model(16)
        with pytest.raises(DomainError):
            c_star(profile, xi, scale=0.0)

    def test_value_and_tail(self):
        profile, xi, gnorm, cstar = default_model(16)
        assert cstar > 0.0
        assert gnorm > 0.0
        total, parts = c_star(profile, xi, detail=True)
        assert total == pytest.approx(cstar, rel=1e-12)
        assert parts["tail_fraction"] <= 1e-8

    def test_halving_steps(self):
        profile, xi, _gnorm, cstar = default_model(16)
        refined = c_star(profile, xi, scale=2.0)
        assert abs(refined - cstar) / refined <= 1e-6


class TestU6:
    def test_talenti_closed_form(self):
        val = u6_integral(talenti_profile())
        assert val == pytest.approx(3.0**1.5 * math.pi**2 / 4.0, rel=1e-6)
