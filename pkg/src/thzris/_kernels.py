"""Hot loops: interference Laplace exponents and Monte-Carlo chunk tallies.

Every kernel has two implementations with the same contract: a scalar-loop
version compiled by numba and a vectorised numpy version.  ``_backend``
decides which one the public ``*_kernel`` names point at.

Random numbers come from a stateless counter-based generator: uniform
number ``c`` of realisation ``i`` under seed ``s`` is a SplitMix64 hash of
``(s, i, c)``.  Both implementations therefore see identical draws, and a
realisation's draws do not depend on how realisations are split across
chunks or workers.
"""

from __future__ import annotations

import math

import numpy as np

from ._backend import USE_NUMBA, njit
from .channel import _ap_ris_distance, _kappa_c, _kappa_r, _one_minus_q, _pl_direct, _pl_ris
from .quadrature import GAUSS_WEIGHTS, KRONROD_WEIGHTS, NODES, integrate_1d, integrate_2d

# ---------------------------------------------------------------------------
# counter-based uniforms

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
MIX1 = np.uint64(0xBF58476D1CE4E5B9)
MIX2 = np.uint64(0x94D049BB133111EB)
SH30 = np.uint64(30)
SH27 = np.uint64(27)
SH31 = np.uint64(31)
SH11 = np.uint64(11)
ONE = np.uint64(1)
INV53 = 1.0 / 9007199254740992.0

# separates the interference-oracle streams from the network streams
ORACLE_DOMAIN = np.uint64(0x5DEECE66D1F2A3B7)

# per-realisation counter layout
C_COUNT = 0
C_UE_ANGLE = 1
C_RIS_UE_LOS = 2
C_SIGNAL = 3
C_AP_BASE = 8
AP_STRIDE = 8
A_RADIUS, A_ANGLE, A_LOS_D, A_LOS_AR, A_GAMMA, A_NORM1, A_NORM2 = range(7)


@njit(cache=True)
def _mix64(z):
    z = (z ^ (z >> SH30)) * MIX1
    z = (z ^ (z >> SH27)) * MIX2
    return z ^ (z >> SH31)


@njit(cache=True)
def _stream_key(seed, index):
    return _mix64(_mix64(seed) + (index + ONE) * GOLDEN)


@njit(cache=True)
def _uniform(key, counter):
    x = _mix64(key + (counter + ONE) * GOLDEN)
    return (np.float64(x >> SH11) + 0.5) * INV53


def stream_keys(seed, indices):
    """Vectorised ``_stream_key`` (numpy path and Python-side helpers)."""
    idx = np.atleast_1d(np.asarray(indices, dtype=np.uint64))
    with np.errstate(over="ignore"):
        base = _mix64(np.asarray([seed], dtype=np.uint64))
        return _mix64(base + (idx + ONE) * GOLDEN)


def uniforms(keys, counters):
    keys = np.asarray(keys, dtype=np.uint64)
    counters = np.broadcast_to(np.asarray(counters, dtype=np.uint64), keys.shape)
    with np.errstate(over="ignore"):
        x = _mix64(keys + (counters + ONE) * GOLDEN)
    return ((x >> SH11).astype(np.float64) + 0.5) * INV53


def poisson_table(mean):
    """Inverse-CDF table for Poisson(mean): (cdf over [k_lo, k_hi], k_lo)."""
    from scipy.stats import poisson

    if mean <= 0:
        return np.array([1.0]), 0
    spread = 12.0 * math.sqrt(mean) + 20.0
    k_lo = max(0, int(math.floor(mean - spread)))
    k_hi = int(math.ceil(mean + spread))
    ks = np.arange(k_lo, k_hi + 1)
    cdf = poisson.cdf(ks, mean)
    cdf[-1] = 1.0
    return np.ascontiguousarray(cdf), k_lo


# ---------------------------------------------------------------------------
# parameter vector shared by the MC kernels

P_RADIUS, P_OFFSET, P_V0, P_BETA_D, P_BETA_R, P_BETA_AR, P_LOW = range(7)
P_CONST_D, P_CONST_R, P_KABS, P_HA, P_DH, P_HR = range(7, 13)
P_PA, P_KAPPA_D, P_KAPPA_I, P_NEL, P_SUMF2, P_TAU = range(13, 19)
N_PARAMS = 19


def mc_params(cfg):
    from .channel import LinkConstants, kappa_direct, kappa_interference

    c = LinkConstants.from_config(cfg)
    p = np.empty(N_PARAMS)
    p[P_RADIUS] = cfg.radius
    p[P_OFFSET] = cfg.ue_offset
    p[P_V0] = cfg.v0
    p[P_BETA_D] = cfg.beta_d
    p[P_BETA_R] = cfg.beta_r
    p[P_BETA_AR] = cfg.beta_ar
    p[P_LOW] = 1.0 if cfg.ap_ris_blockable else 0.0
    p[P_CONST_D] = c.const_d
    p[P_CONST_R] = c.const_r
    p[P_KABS] = c.k_abs
    p[P_HA] = c.h_a
    p[P_DH] = c.dh
    p[P_HR] = c.h_r
    p[P_PA] = cfg.p_a
    p[P_KAPPA_D] = kappa_direct(cfg)
    p[P_KAPPA_I] = kappa_interference(cfg)
    p[P_NEL] = cfg.n_elements
    p[P_SUMF2] = cfg.sum_f2
    p[P_TAU] = cfg.tau
    return p


SCENARIO_NONE, SCENARIO_DIRECT, SCENARIO_RIS, SCENARIO_COMPOSITE = 0, 1, 2, 3

# ---------------------------------------------------------------------------
# adaptive Gauss-Kronrod (numba)
#
# These take the integrand as a first-class function, which numba cannot
# cache to disk, so they are compiled on first use in each process.

_FAIL = 0
_OK = 1


@njit
def _gk15(f, args, a, b):
    half = 0.5 * (b - a)
    centre = 0.5 * (a + b)
    k = 0.0
    g = 0.0
    for i in range(15):
        fx = f(centre + half * NODES[i], args)
        k += KRONROD_WEIGHTS[i] * fx
        g += GAUSS_WEIGHTS[i] * fx
    return half * k, abs(half * (k - g))


@njit
def _adapt(f, args, a, b, tol, max_evals, breakpoint):
    """Global adaptive bisection; returns (value, error, evaluations, ok)."""
    if a == b:
        return 0.0, 0.0, 0, _OK
    cap = max_evals // 15 + 2
    lo = np.empty(cap)
    hi = np.empty(cap)
    val = np.empty(cap)
    err = np.empty(cap)
    n = 0
    if a < breakpoint < b:
        lo[0], hi[0] = a, breakpoint
        lo[1], hi[1] = breakpoint, b
        n = 2
    else:
        lo[0], hi[0] = a, b
        n = 1
    evals = 0
    total_err = 0.0
    for j in range(n):
        val[j], err[j] = _gk15(f, args, lo[j], hi[j])
        evals += 15
        total_err += err[j]
    ok = _OK
    min_width = 1e-13 * (b - a)
    while total_err > tol:
        if evals + 30 > max_evals or n + 1 > cap:
            ok = _FAIL
            break
        worst = 0
        for j in range(1, n):
            if err[j] > err[worst]:
                worst = j
        a0 = lo[worst]
        b0 = hi[worst]
        mid = 0.5 * (a0 + b0)
        if b0 - a0 < min_width or not (a0 < mid < b0):
            ok = _FAIL
            break
        v1, e1 = _gk15(f, args, a0, mid)
        v2, e2 = _gk15(f, args, mid, b0)
        evals += 30
        total_err += e1 + e2 - err[worst]
        hi[worst] = mid
        val[worst] = v1
        err[worst] = e1
        lo[n] = mid
        hi[n] = b0
        val[n] = v2
        err[n] = e2
        n += 1
    # positional order for a reproducible sum
    order = np.argsort(lo[:n])
    value = 0.0
    error = 0.0
    for j in order:
        value += val[j]
        error += err[j]
    if error > tol:
        ok = _FAIL
    return value, error, evals, ok


# ---------------------------------------------------------------------------
# Laplace-transform exponents


@njit
def _lt_direct_integrand(r, args):
    s_p, kappa_d, beta_d, const_d, k_abs, h_a = args
    g = s_p * _pl_direct(r, const_d, k_abs, h_a)
    return g / (kappa_d + g) * np.exp(-beta_d * r) * r


@njit
def _lt_direct_numba(s_p, r0, r_max, kappa_d, beta_d, const_d, k_abs, h_a, tol, max_evals):
    args = (s_p, kappa_d, beta_d, const_d, k_abs, h_a)
    return _adapt(_lt_direct_integrand, args, r0, r_max, tol, max_evals, np.nan)


@njit
def _lt_ris_inner(r, args):
    s_p, kappa_i, beta_ar, v, phi, const_r, k_abs, dh, h_r = args
    z = _ap_ris_distance(r, phi, v)
    x = s_p * _pl_ris(z, v, const_r, k_abs, dh, h_r)
    return _one_minus_q(x, kappa_i) * np.exp(-beta_ar * z) * r


@njit
def _lt_ris_outer(phi, args):
    s_p, kappa_i, beta_ar, v, const_r, k_abs, dh, h_r, r0, r_max, tol, max_evals, stats = args
    inner = (s_p, kappa_i, beta_ar, v, phi, const_r, k_abs, dh, h_r)
    value, error, evals, ok = _adapt(
        _lt_ris_inner, inner, r0, r_max, tol, max_evals, v * np.cos(phi)
    )
    stats[0] += evals
    if error > stats[1]:
        stats[1] = error
    if ok == _FAIL:
        stats[2] = 0.0
    return value


@njit
def _lt_ris_numba(s_p, r0, r_max, kappa_i, beta_ar, v, const_r, k_abs, dh, h_r, tol, max_evals):
    stats = np.zeros(3)
    stats[2] = 1.0
    width = np.pi
    inner_tol = 0.5 * tol / width
    args = (s_p, kappa_i, beta_ar, v, const_r, k_abs, dh, h_r, r0, r_max, inner_tol, max_evals, stats)
    value, error, evals, ok = _adapt(_lt_ris_outer, args, 0.0, np.pi, 0.5 * tol, max_evals, np.nan)
    error = error + width * stats[1]
    if stats[2] == 0.0 or error > tol:
        ok = _FAIL
    return value, error, int(stats[0]), ok


def _lt_direct_numpy(s_p, r0, r_max, kappa_d, beta_d, const_d, k_abs, h_a, tol, max_evals):
    def integrand(r):
        g = s_p * _pl_direct(r, const_d, k_abs, h_a)
        return g / (kappa_d + g) * np.exp(-beta_d * r) * r

    res = integrate_1d(integrand, r0, r_max, tol, max_evals=max_evals, raise_on_failure=False)
    return res.value, res.error_estimate, res.evaluations, _OK if res.converged else _FAIL


def _lt_ris_numpy(s_p, r0, r_max, kappa_i, beta_ar, v, const_r, k_abs, dh, h_r, tol, max_evals):
    def integrand(phi, r):
        z = _ap_ris_distance(r, phi, v)
        x = s_p * _pl_ris(z, v, const_r, k_abs, dh, h_r)
        return _one_minus_q(x, kappa_i) * np.exp(-beta_ar * z) * r

    res = integrate_2d(
        integrand, (0.0, math.pi, r0, r_max), tol, max_evals=max_evals,
        inner_breakpoints=lambda phi: (v * math.cos(phi),), raise_on_failure=False,
    )
    return res.value, res.error_estimate, res.evaluations, _OK if res.converged else _FAIL


# ---------------------------------------------------------------------------
# Monte-Carlo: full network realisations (distribution mode)


@njit(cache=True)
def _exp_draw(u, rate):
    return -np.log(u) / rate


@njit(cache=True)
def _normal_draw(u1, u2):
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


@njit(nogil=True, cache=True)
def _mc_chunk_numba(seed, start, count, cdf, k_lo, p):
    codes = np.zeros(count, dtype=np.int8)
    covered = np.zeros(count, dtype=np.int8)
    k_max = k_lo + cdf.shape[0]
    rx = np.empty(k_max)
    zx = np.empty(k_max)
    radius = p[P_RADIUS]
    d_off = p[P_OFFSET]
    v0 = p[P_V0]
    low = p[P_LOW] > 0.5
    seed_u = np.uint64(seed)
    for t in range(count):
        key = _stream_key(seed_u, np.uint64(start + t))
        k = k_lo + np.searchsorted(cdf, _uniform(key, np.uint64(C_COUNT)), side="right")
        if k > k_max - 1:
            k = k_max - 1
        if k == 0:
            continue
        psi = 2.0 * np.pi * _uniform(key, np.uint64(C_UE_ANGLE))
        ue_x = d_off * np.cos(psi)
        ue_y = d_off * np.sin(psi)
        # the RIS is fixed in the room at (v0, 0); the UE moves
        v = np.sqrt((v0 - ue_x) ** 2 + ue_y ** 2)
        nearest = 0
        for j in range(k):
            base = C_AP_BASE + AP_STRIDE * j
            rho = radius * np.sqrt(_uniform(key, np.uint64(base + A_RADIUS)))
            theta = 2.0 * np.pi * _uniform(key, np.uint64(base + A_ANGLE))
            ax = rho * np.cos(theta)
            ay = rho * np.sin(theta)
            rx[j] = np.sqrt((ax - ue_x) ** 2 + (ay - ue_y) ** 2)
            zx[j] = np.sqrt((ax - v0) ** 2 + ay ** 2)
            if rx[j] < rx[nearest]:
                nearest = j
        r0 = rx[nearest]
        z0 = zx[nearest]
        base0 = C_AP_BASE + AP_STRIDE * nearest
        direct_ok = _uniform(key, np.uint64(base0 + A_LOS_D)) < np.exp(-p[P_BETA_D] * r0)
        ris_ue = _uniform(key, np.uint64(C_RIS_UE_LOS)) < np.exp(-p[P_BETA_R] * v)
        ris_ok = ris_ue
        if low and ris_ue:
            ris_ok = _uniform(key, np.uint64(base0 + A_LOS_AR)) < np.exp(-p[P_BETA_AR] * z0)
        if direct_ok and ris_ok:
            code = SCENARIO_COMPOSITE
        elif direct_ok:
            code = SCENARIO_DIRECT
        elif ris_ok:
            code = SCENARIO_RIS
        else:
            code = SCENARIO_NONE
        codes[t] = code
        if code == SCENARIO_NONE:
            continue

        u_sig = _uniform(key, np.uint64(C_SIGNAL))
        pl_r0 = _pl_ris(z0, v, p[P_CONST_R], p[P_KABS], p[P_DH], p[P_HR])
        pl_d0 = _pl_direct(r0, p[P_CONST_D], p[P_KABS], p[P_HA])
        if code == SCENARIO_DIRECT:
            signal = p[P_PA] * pl_d0 * _exp_draw(u_sig, p[P_KAPPA_D])
        elif code == SCENARIO_RIS:
            signal = _exp_draw(u_sig, _kappa_r(pl_r0, p[P_NEL], p[P_PA], p[P_SUMF2]))
        else:
            signal = _exp_draw(u_sig, _kappa_c(pl_r0, pl_d0, p[P_NEL], p[P_SUMF2]))

        i_d = 0.0
        i_r = 0.0
        sqrt_ki = np.sqrt(p[P_KAPPA_I])
        for j in range(k):
            if j == nearest:
                continue
            base = C_AP_BASE + AP_STRIDE * j
            if _uniform(key, np.uint64(base + A_LOS_D)) < np.exp(-p[P_BETA_D] * rx[j]):
                gamma = _exp_draw(_uniform(key, np.uint64(base + A_GAMMA)), p[P_KAPPA_D])
                i_d += _pl_direct(rx[j], p[P_CONST_D], p[P_KABS], p[P_HA]) * gamma
            if ris_ue:
                if low and not (_uniform(key, np.uint64(base + A_LOS_AR)) < np.exp(-p[P_BETA_AR] * zx[j])):
                    continue
                nrm = _normal_draw(
                    _uniform(key, np.uint64(base + A_NORM1)), _uniform(key, np.uint64(base + A_NORM2))
                )
                zeta = (sqrt_ki + nrm) ** 2
                i_r += _pl_ris(zx[j], v, p[P_CONST_R], p[P_KABS], p[P_DH], p[P_HR]) * zeta
        interference = p[P_PA] * (i_d + i_r)
        if signal > p[P_TAU] * interference:
            covered[t] = 1
    return codes, covered


def draw_networks_numpy(seed, start, count, cdf, k_lo, p):
    """Flat per-AP arrays for realisations ``start .. start+count-1``.

    Returns a dict; ``seg`` holds each realisation's first AP index in the
    flat arrays and ``k`` its AP count.
    """
    idx = np.arange(start, start + count, dtype=np.uint64)
    keys = stream_keys(seed, idx)
    k_max = k_lo + cdf.shape[0]
    k = k_lo + np.searchsorted(cdf, uniforms(keys, C_COUNT), side="right")
    k = np.minimum(k, k_max - 1).astype(np.int64)
    psi = 2.0 * np.pi * uniforms(keys, C_UE_ANGLE)
    ue_x = p[P_OFFSET] * np.cos(psi)
    ue_y = p[P_OFFSET] * np.sin(psi)
    v = np.sqrt((p[P_V0] - ue_x) ** 2 + ue_y ** 2)

    seg = np.zeros(count, dtype=np.int64)
    np.cumsum(k[:-1], out=seg[1:])
    owner = np.repeat(np.arange(count), k)
    j = np.arange(owner.size) - seg[owner]
    ap_keys = keys[owner]
    base = (C_AP_BASE + AP_STRIDE * j).astype(np.uint64)

    rho = p[P_RADIUS] * np.sqrt(uniforms(ap_keys, base + A_RADIUS))
    theta = 2.0 * np.pi * uniforms(ap_keys, base + A_ANGLE)
    ax = rho * np.cos(theta)
    ay = rho * np.sin(theta)
    r = np.sqrt((ax - ue_x[owner]) ** 2 + (ay - ue_y[owner]) ** 2)
    z = np.sqrt((ax - p[P_V0]) ** 2 + ay ** 2)
    return {
        "keys": keys, "k": k, "seg": seg, "owner": owner, "j": j, "base": base,
        "ue_x": ue_x, "ue_y": ue_y, "v": v, "ax": ax, "ay": ay, "r": r, "z": z,
    }


def nearest_index(net):
    """Flat index of each realisation's nearest AP (-1 when it has none)."""
    count = net["k"].shape[0]
    out = np.full(count, -1, dtype=np.int64)
    has = net["k"] > 0
    if not np.any(has):
        return out
    owner = net["owner"]
    order = np.lexsort((np.arange(owner.size), net["r"], owner))
    first = np.ones(order.size, dtype=bool)
    first[1:] = owner[order[1:]] != owner[order[:-1]]
    out[owner[order[first]]] = order[first]
    return out


def _mc_chunk_numpy(seed, start, count, cdf, k_lo, p):
    net = draw_networks_numpy(seed, start, count, cdf, k_lo, p)
    codes = np.zeros(count, dtype=np.int8)
    covered = np.zeros(count, dtype=np.int8)
    near = nearest_index(net)
    has = near >= 0
    if not np.any(has):
        return codes, covered
    keys = net["keys"]
    low = p[P_LOW] > 0.5
    r0 = np.where(has, net["r"][np.maximum(near, 0)], 0.0)
    z0 = np.where(has, net["z"][np.maximum(near, 0)], 0.0)
    base0 = net["base"][np.maximum(near, 0)]
    v = net["v"]

    direct_ok = has & (uniforms(keys, base0 + A_LOS_D) < np.exp(-p[P_BETA_D] * r0))
    ris_ue = uniforms(keys, C_RIS_UE_LOS) < np.exp(-p[P_BETA_R] * v)
    ris_ok = has & ris_ue
    if low:
        ris_ok &= uniforms(keys, base0 + A_LOS_AR) < np.exp(-p[P_BETA_AR] * z0)
    codes[direct_ok & ris_ok] = SCENARIO_COMPOSITE
    codes[direct_ok & ~ris_ok] = SCENARIO_DIRECT
    codes[~direct_ok & ris_ok] = SCENARIO_RIS

    u_sig = uniforms(keys, C_SIGNAL)
    pl_r0 = _pl_ris(z0, v, p[P_CONST_R], p[P_KABS], p[P_DH], p[P_HR])
    pl_d0 = _pl_direct(r0, p[P_CONST_D], p[P_KABS], p[P_HA])
    with np.errstate(divide="ignore", over="ignore"):
        signal = np.select(
            [codes == SCENARIO_DIRECT, codes == SCENARIO_RIS, codes == SCENARIO_COMPOSITE],
            [
                p[P_PA] * pl_d0 * _exp_draw(u_sig, p[P_KAPPA_D]),
                _exp_draw(u_sig, _kappa_r(pl_r0, p[P_NEL], p[P_PA], p[P_SUMF2])),
                _exp_draw(u_sig, _kappa_c(pl_r0, pl_d0, p[P_NEL], p[P_SUMF2])),
            ],
            default=0.0,
        )

    owner = net["owner"]
    ap_keys = keys[owner]
    base = net["base"]
    r = net["r"]
    z = net["z"]
    interferer = np.ones(owner.size, dtype=bool)
    interferer[near[has]] = False
    los_d = interferer & (uniforms(ap_keys, base + A_LOS_D) < np.exp(-p[P_BETA_D] * r))
    contrib = np.zeros(owner.size)
    gamma = _exp_draw(uniforms(ap_keys, base + A_GAMMA), p[P_KAPPA_D])
    contrib[los_d] = (_pl_direct(r, p[P_CONST_D], p[P_KABS], p[P_HA]) * gamma)[los_d]
    via_ris = interferer & ris_ue[owner]
    if low:
        via_ris &= uniforms(ap_keys, base + A_LOS_AR) < np.exp(-p[P_BETA_AR] * z)
    nrm = _normal_draw(uniforms(ap_keys, base + A_NORM1), uniforms(ap_keys, base + A_NORM2))
    zeta = (math.sqrt(p[P_KAPPA_I]) + nrm) ** 2
    contrib_r = _pl_ris(z, v[owner], p[P_CONST_R], p[P_KABS], p[P_DH], p[P_HR]) * zeta
    contrib[via_ris] += contrib_r[via_ris]

    interference = np.zeros(count)
    nz = np.flatnonzero(net["k"] > 0)
    interference[nz] = np.add.reduceat(contrib, net["seg"][nz])
    interference *= p[P_PA]
    covered[(codes != SCENARIO_NONE) & (signal > p[P_TAU] * interference)] = 1
    return codes, covered


# ---------------------------------------------------------------------------
# Monte-Carlo: interferers outside a fixed serving distance (LT oracle)


@njit(nogil=True, cache=True)
def _interference_chunk_numba(seed, start, count, cdf, k_lo, p, r0):
    i_d = np.zeros(count)
    i_r = np.zeros(count)
    k_max = k_lo + cdf.shape[0]
    radius = p[P_RADIUS]
    v0 = p[P_V0]
    low = p[P_LOW] > 0.5
    sqrt_ki = np.sqrt(p[P_KAPPA_I])
    span = radius * radius - r0 * r0
    seed_u = np.uint64(seed) ^ ORACLE_DOMAIN
    for t in range(count):
        key = _stream_key(seed_u, np.uint64(start + t))
        k = k_lo + np.searchsorted(cdf, _uniform(key, np.uint64(C_COUNT)), side="right")
        if k > k_max - 1:
            k = k_max - 1
        acc_d = 0.0
        acc_r = 0.0
        for j in range(k):
            base = C_AP_BASE + AP_STRIDE * j
            r = np.sqrt(r0 * r0 + span * _uniform(key, np.uint64(base + A_RADIUS)))
            theta = 2.0 * np.pi * _uniform(key, np.uint64(base + A_ANGLE))
            z = _ap_ris_distance(r, theta, v0)
            if _uniform(key, np.uint64(base + A_LOS_D)) < np.exp(-p[P_BETA_D] * r):
                gamma = _exp_draw(_uniform(key, np.uint64(base + A_GAMMA)), p[P_KAPPA_D])
                acc_d += _pl_direct(r, p[P_CONST_D], p[P_KABS], p[P_HA]) * gamma
            if low and not (_uniform(key, np.uint64(base + A_LOS_AR)) < np.exp(-p[P_BETA_AR] * z)):
                continue
            nrm = _normal_draw(
                _uniform(key, np.uint64(base + A_NORM1)), _uniform(key, np.uint64(base + A_NORM2))
            )
            acc_r += _pl_ris(z, v0, p[P_CONST_R], p[P_KABS], p[P_DH], p[P_HR]) * (sqrt_ki + nrm) ** 2
        i_d[t] = p[P_PA] * acc_d
        i_r[t] = p[P_PA] * acc_r
    return i_d, i_r


def _interference_chunk_numpy(seed, start, count, cdf, k_lo, p, r0):
    idx = np.arange(start, start + count, dtype=np.uint64)
    keys = stream_keys(np.uint64(seed) ^ ORACLE_DOMAIN, idx)
    k_max = k_lo + cdf.shape[0]
    k = k_lo + np.searchsorted(cdf, uniforms(keys, C_COUNT), side="right")
    k = np.minimum(k, k_max - 1).astype(np.int64)
    seg = np.zeros(count, dtype=np.int64)
    np.cumsum(k[:-1], out=seg[1:])
    owner = np.repeat(np.arange(count), k)
    j = np.arange(owner.size) - seg[owner]
    ap_keys = keys[owner]
    base = (C_AP_BASE + AP_STRIDE * j).astype(np.uint64)
    span = p[P_RADIUS] ** 2 - r0 * r0
    r = np.sqrt(r0 * r0 + span * uniforms(ap_keys, base + A_RADIUS))
    theta = 2.0 * np.pi * uniforms(ap_keys, base + A_ANGLE)
    z = _ap_ris_distance(r, theta, p[P_V0])
    los_d = uniforms(ap_keys, base + A_LOS_D) < np.exp(-p[P_BETA_D] * r)
    gamma = _exp_draw(uniforms(ap_keys, base + A_GAMMA), p[P_KAPPA_D])
    contrib_d = np.where(los_d, _pl_direct(r, p[P_CONST_D], p[P_KABS], p[P_HA]) * gamma, 0.0)
    nrm = _normal_draw(uniforms(ap_keys, base + A_NORM1), uniforms(ap_keys, base + A_NORM2))
    contrib_r = _pl_ris(z, p[P_V0], p[P_CONST_R], p[P_KABS], p[P_DH], p[P_HR]) * (
        math.sqrt(p[P_KAPPA_I]) + nrm
    ) ** 2
    if p[P_LOW] > 0.5:
        contrib_r = np.where(uniforms(ap_keys, base + A_LOS_AR) < np.exp(-p[P_BETA_AR] * z), contrib_r, 0.0)
    i_d = np.zeros(count)
    i_r = np.zeros(count)
    nz = np.flatnonzero(k > 0)
    if nz.size:
        i_d[nz] = np.add.reduceat(contrib_d, seg[nz])
        i_r[nz] = np.add.reduceat(contrib_r, seg[nz])
    return p[P_PA] * i_d, p[P_PA] * i_r


# ---------------------------------------------------------------------------
# dispatch

if USE_NUMBA:
    lt_direct_kernel = _lt_direct_numba
    lt_ris_kernel = _lt_ris_numba
    mc_chunk_kernel = _mc_chunk_numba
    interference_chunk_kernel = _interference_chunk_numba
else:
    lt_direct_kernel = _lt_direct_numpy
    lt_ris_kernel = _lt_ris_numpy
    mc_chunk_kernel = _mc_chunk_numpy
    interference_chunk_kernel = _interference_chunk_numpy
