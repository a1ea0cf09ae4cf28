import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thzris import channel as ch
from thzris.config import SPEED_OF_LIGHT


def _mp_pl_direct(cfg, r):
    mp.mp.dps = 40
    lam = mp.mpf(SPEED_OF_LIGHT) / mp.mpf(cfg.freq)
    d2 = mp.mpf(r) ** 2 + (mp.mpf(cfg.h_a) - mp.mpf(cfg.h_u)) ** 2
    return mp.mpf(cfg.g_u) * cfg.g_a * (lam / (4 * mp.pi)) ** 2 * mp.e ** (-mp.mpf(cfg.k_abs) * mp.sqrt(d2)) / d2


def _mp_pl_ris(cfg, z):
    mp.mp.dps = 40
    ha = mp.mpf(cfg.h_a) - cfg.h_u
    hr = mp.mpf(cfg.h_r) - cfg.h_u
    dh = ha - hr
    a2 = mp.mpf(z) ** 2 + dh ** 2
    b2 = mp.mpf(cfg.v0) ** 2 + hr ** 2
    area = (mp.mpf(cfg.l_x) * cfg.l_y) ** 2
    spread = cfg.g_ris * mp.mpf(cfg.g_u) * cfg.g_a * area / ((4 * mp.pi) ** 2 * a2 * b2)
    absorb = mp.e ** (-mp.mpf(cfg.k_abs) * mp.sqrt(a2)) * mp.e ** (-mp.mpf(cfg.k_abs) * mp.sqrt(b2))
    return spread * absorb * dh ** 2 / a2


def test_los_examples(cfg):
    assert ch.p_los_direct(cfg, 0.0) == 1.0
    assert ch.p_los_direct(cfg, 5.0) == pytest.approx(math.exp(-0.2772 * 5), rel=1e-12)
    assert ch.p_los_direct(cfg, 5.0) == pytest.approx(0.2501, abs=5e-5)
    assert ch.p_los_ris_ue(cfg) == pytest.approx(0.5341, abs=5e-5)
    assert ch.p_los_direct(cfg.with_changes(lambda_b=0.0), 7.0) == 1.0
    assert ch.p_los_ris_ue(cfg.with_changes(lambda_b=0.0)) == 1.0
    assert ch.p_los_ris_ue(cfg.with_changes(v0=500.0)) < 1e-90


def test_ap_ris_los(cfg, low_cfg):
    assert ch.p_los_ap_ris(cfg, 3.0) == 1.0
    assert np.all(ch.p_los_ap_ris(cfg, np.array([0.0, 4.0])) == 1.0)
    assert ch.p_los_ap_ris(low_cfg, 0.0) == 1.0
    assert ch.p_los_ap_ris(low_cfg, 3.0) == pytest.approx(0.5322, abs=5e-5)


def test_pathloss_direct_oracle(cfg):
    for r in (0.0, 1.0, 4.5, 11.0):
        assert ch.pathloss_direct(cfg, r) == pytest.approx(float(_mp_pl_direct(cfg, r)), rel=1e-13)
    # 1.363e-3 when c is rounded to 3e8; 1.3607e-3 with the exact c
    assert ch.pathloss_direct(cfg, 0.0) == pytest.approx(1.363e-3, rel=2e-3)


def test_pathloss_direct_spreading_only(cfg):
    plain = cfg.with_changes(k_abs=0.0, g_a=1.0, g_u=1.0)
    lam = SPEED_OF_LIGHT / cfg.freq
    for r in (0.0, 2.0):
        assert ch.pathloss_direct(plain, r) == pytest.approx((lam / (4 * math.pi)) ** 2 / (r * r + 4.0), rel=1e-14)


def test_pathloss_ris_oracle(cfg):
    value = ch.pathloss_ris(cfg, 0.0)
    assert value == pytest.approx(float(_mp_pl_ris(cfg, 0)), rel=1e-13)
    # regression fixture (arbitrary-precision value above)
    assert value == pytest.approx(1.61612e-10, rel=1e-5)
    for z in (0.5, 3.0, 12.0):
        assert ch.pathloss_ris(cfg, z) == pytest.approx(float(_mp_pl_ris(cfg, z)), rel=1e-13)


def test_ris_gain_is_linear(cfg):
    active = cfg.with_changes(g_ris=1e3)
    for z in (0.0, 1.0, 7.5):
        assert ch.pathloss_ris(active, z) == pytest.approx(1e3 * ch.pathloss_ris(cfg, z), rel=1e-14)


def test_incidence_factor(cfg):
    assert ch.incidence_factor(cfg, 0.0) == 1.0
    f = ch.incidence_factor(cfg, np.linspace(0, 20, 50))
    assert np.all((f > 0) & (f <= 1)) and np.all(np.diff(f) < 0)


def test_log_domain_agreement(cfg):
    z = np.linspace(0, 20, 41)
    r = np.linspace(0, 11, 23)
    np.testing.assert_allclose(np.exp(ch.log_pathloss_ris(cfg, z)), ch.pathloss_ris(cfg, z), rtol=1e-12)
    np.testing.assert_allclose(np.exp(ch.log_pathloss_direct(cfg, r)), ch.pathloss_direct(cfg, r), rtol=1e-12)
    for z0 in (0.0, 1.4, 6.0):
        assert math.exp(ch.log_kappa_ris(cfg, z0)) == pytest.approx(ch.kappa_ris(cfg, z0), rel=1e-12)
        for r0 in (0.0, 2.0):
            assert math.exp(ch.log_kappa_composite(cfg, r0, z0)) == pytest.approx(
                ch.kappa_composite(cfg, r0, z0), rel=1e-12
            )


def test_kappa_values(cfg):
    p = ch.dist_params(cfg, 1.0, 1.0)
    assert p.kappa_d == 0.005
    # (pi/2) / (2 * 10 * 4 (1 - pi^2/16)), evaluated directly
    assert p.kappa_i == pytest.approx((math.pi / 2) / (2 * 10 * 4 * (1 - math.pi ** 2 / 16)), rel=1e-15)
    assert p.kappa_i == pytest.approx(0.051246, rel=1e-5)
    assert p.mu_b == math.pi / 2 and p.sigma_b_sq == pytest.approx(4 * (1 - math.pi ** 2 / 16))
    pl_r = ch.pathloss_ris(cfg, 1.0)
    assert p.kappa_r == pytest.approx(1 / (2 * 1e26 * (1e-3 * pl_r * 10) ** 2), rel=1e-12)
    pl_d = ch.pathloss_direct(cfg, 1.0)
    assert p.kappa_c == pytest.approx(1 / (math.sqrt(2) * (1e13 * pl_r + pl_d) * 10) ** 2, rel=1e-12)


def test_kappa_scaling(cfg):
    # the rate goes with the inverse square of the pathloss and of P_A
    k = ch.kappa_ris(cfg, 2.0)
    assert ch.kappa_ris(cfg.with_changes(g_ris=4.0), 2.0) == pytest.approx(k / 16, rel=1e-12)
    assert ch.kappa_ris(cfg.with_changes(p_a=3e-3), 2.0) == pytest.approx(k / 9, rel=1e-12)


def test_kappas_increase_with_distance(cfg):
    z = np.linspace(0, 15, 60)
    assert np.all(np.diff(ch.kappa_ris(cfg, z)) > 0)
    assert np.all(np.diff(ch.kappa_composite(cfg, 1.0, z)) > 0)


def test_mgf_q(cfg):
    ki = ch.kappa_interference(cfg)
    assert ch.mgf_q(ki, 0.0) == 1.0
    assert ch.mgf_q(ki, 1.0) == pytest.approx(3 ** -0.5 * math.exp(-ki / 3), rel=1e-14)
    assert ch.mgf_q(0.05143, 1.0) == pytest.approx(0.5675, abs=1e-4)
    assert ch.mgf_q(ki, 1e30) < 1e-14
    with pytest.raises(ValueError):
        ch.mgf_q(ki, -1.0)


def test_mgf_q_matches_sampling(cfg):
    # Q is the Laplace transform of (sqrt(kappa_i) + N(0,1))^2
    ki = ch.kappa_interference(cfg)
    rng = np.random.default_rng(4)
    zeta = (math.sqrt(ki) + rng.standard_normal(400_000)) ** 2
    for x in (0.1, 1.0, 5.0):
        samples = np.exp(-x * zeta)
        se = samples.std() / math.sqrt(samples.size)
        assert abs(samples.mean() - ch.mgf_q(ki, x)) < 4 * se


def test_mgf_q_decreasing_and_log_convex(cfg):
    # d2/dx2 log Q = 2/(1+2x)^2 + 4 kappa_i/(1+2x)^3 > 0, so log Q is convex
    ki = ch.kappa_interference(cfg)
    x = np.linspace(0, 50, 2001)
    lq = ch.log_mgf_q(ki, x)
    assert np.all(np.diff(lq) < 0)
    assert np.all(np.diff(lq, 2) >= -1e-12)
    h = x[1] - x[0]
    exact = 2 / (1 + 2 * x[1:-1]) ** 2 + 4 * ki / (1 + 2 * x[1:-1]) ** 3
    np.testing.assert_allclose(np.diff(lq, 2) / h ** 2, exact, rtol=1e-2)


def test_geometry(cfg):
    g = ch.LinkGeometry.from_polar(3.0, math.pi / 3, cfg.v0)
    assert g.z == pytest.approx(math.sqrt(9 + 2 - 2 * 3 * math.sqrt(2) * 0.5))
    with pytest.raises(ValueError):
        ch.LinkGeometry.from_polar(1.0, 4.0, cfg.v0)
    assert ch.ap_ris_distance(cfg.v0, 0.0, cfg.v0) == 0.0


@settings(max_examples=60, deadline=None)
@given(
    lb=st.floats(0.0, 6.0), rb=st.floats(0.01, 1.0),
    d1=st.floats(0.0, 30.0), d2=st.floats(0.0, 30.0),
)
def test_los_properties(cfg, lb, rb, d1, d2):
    c = cfg.with_changes(lambda_b=lb, r_b=rb)
    lo, hi = sorted((d1, d2))
    for f in (ch.p_los_direct,):
        assert 0.0 < f(c, hi) <= f(c, lo) <= 1.0
    assert 0.0 <= ch.p_los_ris_ue(c) <= 1.0
    more = cfg.with_changes(lambda_b=lb + 0.5, r_b=rb)
    assert ch.p_los_direct(more, hi) <= ch.p_los_direct(c, hi)


@settings(max_examples=60, deadline=None)
@given(d1=st.floats(0.0, 40.0), d2=st.floats(0.0, 40.0))
def test_pathloss_monotone(cfg, d1, d2):
    lo, hi = sorted((d1, d2))
    if hi - lo < 1e-9:
        return
    assert 0.0 < ch.pathloss_direct(cfg, hi) < ch.pathloss_direct(cfg, lo)
    assert 0.0 < ch.pathloss_ris(cfg, hi) < ch.pathloss_ris(cfg, lo)
