"""Per-link formulas: LoS probabilities, THz pathlosses, fading-law parameters.

The leading-underscore functions are elementwise kernels written against
plain floats/arrays so the numba kernels can call them directly; the public
functions take a :class:`NetworkConfig` and accept scalars or arrays.

Conventions worth knowing:

* every distance argument is a 2D (horizontal) distance; heights enter
  through ``cfg.h_*_rel``;
* ``g_ris`` (extra active-RIS gain) multiplies the cascaded pathloss
  ``PL_R``, so it scales both the RIS signal and the RIS interference;
* the exponential-law parameters ``kappa_*`` are rates (1 / mean) and are
  implemented exactly as stated for the model, including the squared
  dependence of ``kappa_r`` and ``kappa_c`` on the pathloss.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._backend import njit
from .config import SPEED_OF_LIGHT, NetworkConfig
from .quadrature import log_sum_exp

MU_B = math.pi / 2.0
SIGMA_B_SQ = 4.0 * (1.0 - math.pi ** 2 / 16.0)


# ---------------------------------------------------------------------------
# elementwise kernels


@njit(cache=True)
def _pl_direct(r, const_d, k_abs, h_a):
    d2 = r * r + h_a * h_a
    return const_d * np.exp(-k_abs * np.sqrt(d2)) / d2


@njit(cache=True)
def _pl_ris(z, v, const_r, k_abs, dh, h_r):
    # (z^2 + dh^2) appears squared: once from spreading, once from F(theta)
    a2 = z * z + dh * dh
    b2 = v * v + h_r * h_r
    return const_r * dh * dh * np.exp(-k_abs * (np.sqrt(a2) + np.sqrt(b2))) / (a2 * a2 * b2)


@njit(cache=True)
def _ap_ris_distance(r, phi, v):
    z2 = r * r + v * v - 2.0 * r * v * np.cos(phi)
    return np.sqrt(np.maximum(z2, 0.0))


@njit(cache=True)
def _one_minus_q(x, kappa_i):
    # 1 - Q(x) without cancellation for small x
    log_q = -0.5 * np.log1p(2.0 * x) - kappa_i * x / (1.0 + 2.0 * x)
    return -np.expm1(log_q)


@njit(cache=True)
def _kappa_r(pl_r, n_el, p_a, sum_f2):
    amp = n_el * p_a * pl_r * sum_f2
    return 0.5 / (amp * amp)


@njit(cache=True)
def _kappa_c(pl_r, pl_d, n_el, sum_f2):
    amp = (n_el * pl_r + pl_d) * sum_f2
    return 0.5 / (amp * amp)


# ---------------------------------------------------------------------------
# constants pulled out of a config


@dataclass(frozen=True)
class LinkConstants:
    """The handful of floats every pathloss kernel needs."""

    const_d: float
    const_r: float
    k_abs: float
    h_a: float
    dh: float
    h_r: float
    v0: float

    @classmethod
    def from_config(cls, cfg: NetworkConfig) -> "LinkConstants":
        gain = cfg.g_u * cfg.g_a
        const_d = gain * (SPEED_OF_LIGHT / (4.0 * math.pi * cfg.freq)) ** 2
        const_r = cfg.g_ris * gain * (cfg.l_x * cfg.l_y) ** 2 / (4.0 * math.pi) ** 2
        return cls(
            const_d=const_d,
            const_r=const_r,
            k_abs=cfg.k_abs,
            h_a=cfg.h_a_rel,
            dh=cfg.h_a_rel - cfg.h_r_rel,
            h_r=cfg.h_r_rel,
            v0=cfg.v0,
        )


def _num(x):
    """Floats stay floats, everything else becomes a float array."""
    if np.ndim(x) == 0:
        return float(x)
    return np.asarray(x, dtype=float)


# ---------------------------------------------------------------------------
# geometry


@dataclass(frozen=True)
class LinkGeometry:
    """Serving or interfering AP seen from the UE: AP-UE distance ``r``,
    AP-RIS distance ``z`` and the angle ``phi`` between the UE->AP and
    UE->RIS directions."""

    r: float
    z: float
    phi: float

    @classmethod
    def from_polar(cls, r: float, phi: float, v0: float) -> "LinkGeometry":
        if r < 0:
            raise ValueError(f"r must be >= 0, got {r}")
        if not 0.0 <= phi <= math.pi:
            raise ValueError(f"phi must lie in [0, pi], got {phi}")
        return cls(r=float(r), z=float(_ap_ris_distance(float(r), float(phi), float(v0))), phi=float(phi))


def ap_ris_distance(r, phi, v0):
    """Cosine rule: 2D AP-RIS distance from the UE-centred polar position."""
    return _ap_ris_distance(_num(r), _num(phi), float(v0))


# ---------------------------------------------------------------------------
# blockage


def p_los_direct(cfg: NetworkConfig, r):
    return np.exp(-cfg.beta_d * _num(r))


def p_los_ris_ue(cfg: NetworkConfig, v0=None):
    v = cfg.v0 if v0 is None else _num(v0)
    return np.exp(-cfg.beta_r * v)


def p_los_ap_ris(cfg: NetworkConfig, z):
    """AP-RIS LoS probability; identically 1 when the RIS is above the blockages."""
    z = _num(z)
    if cfg.beta_ar == 0.0:
        return np.ones_like(z) if isinstance(z, np.ndarray) else 1.0
    return np.exp(-cfg.beta_ar * z)


# ---------------------------------------------------------------------------
# pathloss


def pathloss_direct(cfg: NetworkConfig, r):
    c = LinkConstants.from_config(cfg)
    return _pl_direct(_num(r), c.const_d, c.k_abs, c.h_a)


def log_pathloss_direct(cfg: NetworkConfig, r):
    c = LinkConstants.from_config(cfg)
    r = _num(r)
    d2 = r * r + c.h_a ** 2
    return math.log(c.const_d) - c.k_abs * np.sqrt(d2) - np.log(d2)


def incidence_factor(cfg: NetworkConfig, z):
    """F(theta) = cos^2 of the incidence angle at the RIS, as a function of z."""
    dh = cfg.h_a_rel - cfg.h_r_rel
    z = _num(z)
    return dh * dh / (z * z + dh * dh)


def pathloss_ris(cfg: NetworkConfig, z, v0=None):
    """Cascaded AP-RIS-UE pathloss including F(theta) and the active gain."""
    c = LinkConstants.from_config(cfg)
    v = c.v0 if v0 is None else float(v0)
    return _pl_ris(_num(z), v, c.const_r, c.k_abs, c.dh, c.h_r)


def log_pathloss_ris(cfg: NetworkConfig, z, v0=None):
    c = LinkConstants.from_config(cfg)
    v = c.v0 if v0 is None else float(v0)
    z = _num(z)
    a2 = z * z + c.dh ** 2
    b2 = v * v + c.h_r ** 2
    return (
        math.log(c.const_r) + 2.0 * math.log(c.dh)
        - c.k_abs * (np.sqrt(a2) + math.sqrt(b2))
        - 2.0 * np.log(a2) - math.log(b2)
    )


# ---------------------------------------------------------------------------
# fading laws


@dataclass(frozen=True)
class SignalDistParams:
    kappa_d: float
    kappa_r: float
    kappa_c: float
    kappa_i: float
    mu_b: float = MU_B
    sigma_b_sq: float = SIGMA_B_SQ


def kappa_direct(cfg: NetworkConfig) -> float:
    return 1.0 / (2.0 * cfg.sum_f2 ** 2)


def kappa_interference(cfg: NetworkConfig) -> float:
    return MU_B / (2.0 * cfg.sum_f * SIGMA_B_SQ)


def kappa_ris(cfg: NetworkConfig, z0, v0=None):
    return _kappa_r(pathloss_ris(cfg, z0, v0), cfg.n_elements, cfg.p_a, cfg.sum_f2)


def kappa_composite(cfg: NetworkConfig, r0, z0, v0=None):
    return _kappa_c(pathloss_ris(cfg, z0, v0), pathloss_direct(cfg, r0), cfg.n_elements, cfg.sum_f2)


def log_kappa_ris(cfg: NetworkConfig, z0, v0=None):
    log_amp = (
        math.log(cfg.n_elements) + math.log(cfg.p_a)
        + log_pathloss_ris(cfg, z0, v0) + math.log(cfg.sum_f2)
    )
    return -math.log(2.0) - 2.0 * log_amp


def log_kappa_composite(cfg: NetworkConfig, r0: float, z0: float, v0=None) -> float:
    log_sum = log_sum_exp([
        math.log(cfg.n_elements) + float(log_pathloss_ris(cfg, z0, v0)),
        float(log_pathloss_direct(cfg, r0)),
    ])
    return -math.log(2.0) - 2.0 * (log_sum + math.log(cfg.sum_f2))


def dist_params(cfg: NetworkConfig, r0: float, z0: float) -> SignalDistParams:
    if r0 < 0 or z0 < 0:
        raise ValueError("distances must be non-negative")
    return SignalDistParams(
        kappa_d=kappa_direct(cfg),
        kappa_r=float(kappa_ris(cfg, z0)),
        kappa_c=float(kappa_composite(cfg, r0, z0)),
        kappa_i=kappa_interference(cfg),
    )


def mgf_q(kappa_i: float, x):
    """Laplace transform of the non-central chi-squared(1) through-RIS fading."""
    x = _num(x)
    if np.any(np.asarray(x) < 0):
        raise ValueError("mgf_q needs x >= 0")
    return np.exp(-0.5 * np.log1p(2.0 * x) - kappa_i * x / (1.0 + 2.0 * x))


def log_mgf_q(kappa_i: float, x):
    x = _num(x)
    return -0.5 * np.log1p(2.0 * x) - kappa_i * x / (1.0 + 2.0 * x)
