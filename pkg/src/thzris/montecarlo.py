"""Monte-Carlo engine: samples the network model end to end.

Two fidelity modes:

``distribution``
    Signal powers are drawn from the exponential laws with the model's
    rates (kappa_D, kappa_R, kappa_C).  Interferer fading is Exp(kappa_D)
    on direct links and non-central chi-squared(1) with non-centrality
    kappa_I through the RIS.  Works for any N; compiled with numba.
``full_channel``
    Raw complex Gaussian channels h, g, H are drawn, the RIS applies the
    phase-aligning configuration, and S and I are computed from the
    received-signal expressions.  Limited to N <= 1e4 and N_A <= 64.

Geometry and blockage come from the counter-based streams in
:mod:`thzris._kernels`, so realisation ``i`` under seed ``s`` is the same
network whatever the chunking or worker count.  Full-channel fading uses a
Philox generator keyed on ``(seed, i)``.

The UE sits at ``ue_offset`` from the disk centre in a uniformly random
direction.  The RIS is fixed in the room at ``(v0, 0)``, so moving the UE
changes the RIS-UE distance as well as the AP geometry; the effective
RIS-UE distance drives both the RIS-UE blockage and the cascaded pathloss.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import _kernels as K
from .channel import (
    ap_ris_distance,
    kappa_composite,
    kappa_direct,
    kappa_ris,
    pathloss_direct,
    pathloss_ris,
)
from .config import NetworkConfig

CHUNK = 8192
MAX_FULL_N = 10_000
MAX_FULL_NA = 64

SCENARIOS = ("none", "direct", "ris", "composite")


class ModeUnavailable(RuntimeError):
    """The requested sampling mode cannot run for this configuration."""


@dataclass(frozen=True)
class McEstimate:
    value: float
    stderr: float
    n: int
    seed: int

    @classmethod
    def from_count(cls, hits: int, n: int, seed: int) -> "McEstimate":
        p = hits / n
        return cls(p, math.sqrt(p * (1.0 - p) / n), n, seed)

    def as_dict(self) -> dict:
        return {"value": self.value, "stderr": self.stderr, "n": self.n, "seed": self.seed}


@dataclass(frozen=True)
class McAssociation:
    direct: McEstimate
    ris: McEstimate
    composite: McEstimate
    none: McEstimate

    def as_dict(self) -> dict:
        return {k: getattr(self, k).as_dict() for k in ("direct", "ris", "composite", "none")}


@dataclass(frozen=True)
class McResult:
    coverage: McEstimate
    association: McAssociation
    mode: str

    def as_dict(self) -> dict:
        return {"mode": self.mode, "coverage": self.coverage.as_dict(), "association": self.association.as_dict()}


@dataclass(frozen=True)
class Realization:
    """One network draw.  Arrays are per AP, in draw order."""

    seed: int
    index: int
    ue_position: tuple[float, float]
    ris_position: tuple[float, float]
    ris_ue_distance: float
    ap_positions: np.ndarray
    r: np.ndarray
    z: np.ndarray
    los_direct: np.ndarray
    los_ap_ris: np.ndarray
    ris_ue_los: bool
    serving: int
    direct_fading: np.ndarray
    ris_fading: np.ndarray
    signal_uniform: float

    @property
    def n_aps(self) -> int:
        return int(self.r.shape[0])


def _check_n(n):
    if int(n) != n or n < 1:
        raise ValueError(f"realization count must be a positive integer, got {n}")
    return int(n)


def sample_realization(cfg: NetworkConfig, seed: int, index: int = 0) -> Realization:
    """Draw realisation ``index`` of the stream ``seed``.

    The draw is exactly the one the Monte-Carlo kernels use for the same
    ``(seed, index)``.
    """
    p = K.mc_params(cfg)
    cdf, k_lo = K.poisson_table(cfg.mean_ap_count)
    net = K.draw_networks_numpy(np.uint64(seed), index, 1, cdf, k_lo, p)
    key = net["keys"]
    base = net["base"]
    ap_keys = np.repeat(key, base.shape[0])
    r, z = net["r"], net["z"]
    k = r.shape[0]
    serving = int(np.argmin(r)) if k else -1

    los_d = K.uniforms(ap_keys, base + K.A_LOS_D) < np.exp(-cfg.beta_d * r)
    if cfg.ap_ris_blockable:
        los_ar = K.uniforms(ap_keys, base + K.A_LOS_AR) < np.exp(-cfg.beta_ar * z)
    else:
        los_ar = np.ones(k, dtype=bool)
    v = float(net["v"][0])
    ris_ue = bool(K.uniforms(key, K.C_RIS_UE_LOS)[0] < math.exp(-cfg.beta_r * v))
    gamma = -np.log(K.uniforms(ap_keys, base + K.A_GAMMA)) / kappa_direct(cfg)
    nrm = K._normal_draw(K.uniforms(ap_keys, base + K.A_NORM1), K.uniforms(ap_keys, base + K.A_NORM2))
    zeta = (math.sqrt(p[K.P_KAPPA_I]) + nrm) ** 2
    return Realization(
        seed=int(seed),
        index=int(index),
        ue_position=(float(net["ue_x"][0]), float(net["ue_y"][0])),
        ris_position=(cfg.v0, 0.0),
        ris_ue_distance=v,
        ap_positions=np.column_stack([net["ax"], net["ay"]]),
        r=r,
        z=z,
        los_direct=los_d,
        los_ap_ris=los_ar,
        ris_ue_los=ris_ue,
        serving=serving,
        direct_fading=gamma,
        ris_fading=zeta,
        signal_uniform=float(K.uniforms(key, K.C_SIGNAL)[0]),
    )


def classify(cfg: NetworkConfig, real: Realization) -> str:
    """Association scenario of the nearest AP: direct, ris, composite or none."""
    if real.serving < 0:
        return "none"
    j = real.serving
    direct = bool(real.los_direct[j])
    ris = real.ris_ue_los and bool(real.los_ap_ris[j])
    if direct and ris:
        return "composite"
    if direct:
        return "direct"
    if ris:
        return "ris"
    return "none"


def _interferer_mask(real: Realization) -> np.ndarray:
    mask = np.ones(real.n_aps, dtype=bool)
    if real.serving >= 0:
        mask[real.serving] = False
    return mask


def sir_sample(cfg: NetworkConfig, real: Realization, mode: str = "distribution") -> float:
    """SIR of one realisation (linear).

    Returns ``inf`` when a served UE sees no interference and ``0.0`` when
    no link to the nearest AP survives.
    """
    scenario = classify(cfg, real)
    if mode == "full_channel":
        return _full_channel_sir(cfg, real, scenario)
    if mode != "distribution":
        raise ValueError(f"unknown mode {mode!r}")
    if scenario == "none":
        return 0.0
    j = real.serving
    v = real.ris_ue_distance
    r0, z0 = float(real.r[j]), float(real.z[j])
    e = -math.log(real.signal_uniform)
    if scenario == "direct":
        signal = cfg.p_a * float(pathloss_direct(cfg, r0)) * e / kappa_direct(cfg)
    elif scenario == "ris":
        signal = e / float(kappa_ris(cfg, z0, v))
    else:
        signal = e / float(kappa_composite(cfg, r0, z0, v))
    inter = _interferer_mask(real)
    d = inter & real.los_direct
    i_d = float(np.sum(pathloss_direct(cfg, real.r[d]) * real.direct_fading[d])) if d.any() else 0.0
    i_r = 0.0
    if real.ris_ue_los:
        via = inter & real.los_ap_ris
        if via.any():
            i_r = float(np.sum(pathloss_ris(cfg, real.z[via], v) * real.ris_fading[via]))
    interference = cfg.p_a * (i_d + i_r)
    if interference == 0.0:
        return math.inf
    return signal / interference


# ---------------------------------------------------------------------------
# full-channel mode


def _require_full(cfg: NetworkConfig):
    if cfg.n_elements > MAX_FULL_N or cfg.n_antennas > MAX_FULL_NA:
        raise ModeUnavailable(
            f"full_channel mode needs N <= {MAX_FULL_N} and N_A <= {MAX_FULL_NA} "
            f"(got N={cfg.n_elements:g}, N_A={cfg.n_antennas})"
        )
    if cfg.n_elements != int(cfg.n_elements):
        raise ModeUnavailable("full_channel mode needs an integer element count")


def _philox(seed: int, stream: int) -> np.random.Generator:
    key = np.array([int(seed) % 2 ** 64, int(stream) % 2 ** 64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _cn(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard circularly-symmetric complex Gaussian entries."""
    a = rng.standard_normal(tuple(shape) + (2,))
    return (a[..., 0] + 1j * a[..., 1]) * math.sqrt(0.5)


def _full_channel_sir(cfg: NetworkConfig, real: Realization, scenario: str) -> float:
    _require_full(cfg)
    if scenario == "none":
        return 0.0
    n_el = int(cfg.n_elements)
    f = np.asarray(cfg.precoder_mags, dtype=float)
    rng = _philox(real.seed, real.index)
    g = _cn(rng, (n_el,))
    h0 = _cn(rng, (cfg.n_antennas,))
    big_h0 = _cn(rng, (n_el, cfg.n_antennas))
    # phase-aligning RIS: g^T diag(conj(g)/|g|) = |g|^T
    g_abs = np.abs(g)

    j = real.serving
    v = real.ris_ue_distance
    pl_d = float(pathloss_direct(cfg, float(real.r[j])))
    pl_r = float(pathloss_ris(cfg, float(real.z[j]), v))
    direct_amp = h0 @ f
    ris_amp = g_abs @ (big_h0 @ f)
    if scenario == "direct":
        signal = cfg.p_a * pl_d * abs(direct_amp) ** 2
    elif scenario == "ris":
        signal = cfg.p_a * pl_r * abs(ris_amp) ** 2
    else:
        signal = cfg.p_a * abs(math.sqrt(pl_d) * direct_amp + math.sqrt(pl_r) * ris_amp) ** 2

    inter = np.flatnonzero(_interferer_mask(real))
    h = _cn(rng, (inter.size, cfg.n_antennas))
    d = real.los_direct[inter]
    i_d = float(np.sum(pathloss_direct(cfg, real.r[inter][d]) * np.abs(h[d] @ f) ** 2)) if d.any() else 0.0
    i_r = 0.0
    if real.ris_ue_los:
        via = inter[real.los_ap_ris[inter]]
        block = max(1, 2_000_000 // (n_el * cfg.n_antennas))
        for start in range(0, via.size, block):
            idx = via[start:start + block]
            big_h = _cn(rng, (idx.size, n_el, cfg.n_antennas))
            amp = (big_h @ f) @ g_abs
            i_r += float(np.sum(pathloss_ris(cfg, real.z[idx], v) * np.abs(amp) ** 2))
    interference = cfg.p_a * (i_d + i_r)
    if interference == 0.0:
        return math.inf
    return signal / interference


def signal_power_samples(
    cfg: NetworkConfig, link: str, r0: float, phi0: float, n: int, seed: int = 0
) -> np.ndarray:
    """Full-channel draws of the serving signal power at a fixed geometry.

    ``link`` is ``"direct"``, ``"ris"`` or ``"composite"``.
    """
    _require_full(cfg)
    n = _check_n(n)
    n_el = int(cfg.n_elements)
    f = np.asarray(cfg.precoder_mags, dtype=float)
    z0 = float(ap_ris_distance(r0, phi0, cfg.v0))
    pl_d = float(pathloss_direct(cfg, r0))
    pl_r = float(pathloss_ris(cfg, z0))
    rng = _philox(seed, 2 ** 63 + 1)
    block = max(1, 2_000_000 // (n_el * cfg.n_antennas))
    out = np.empty(n)
    for start in range(0, n, block):
        b = min(block, n - start)
        g_abs = np.abs(_cn(rng, (b, n_el)))
        h0 = _cn(rng, (b, cfg.n_antennas))
        big_h0 = _cn(rng, (b, n_el, cfg.n_antennas))
        direct_amp = h0 @ f
        ris_amp = np.einsum("bn,bn->b", g_abs, big_h0 @ f)
        if link == "direct":
            s = pl_d * np.abs(direct_amp) ** 2
        elif link == "ris":
            s = pl_r * np.abs(ris_amp) ** 2
        elif link == "composite":
            s = np.abs(math.sqrt(pl_d) * direct_amp + math.sqrt(pl_r) * ris_amp) ** 2
        else:
            raise ValueError(f"unknown link {link!r}")
        out[start:start + b] = cfg.p_a * s
    return out


@dataclass(frozen=True)
class ExponentialFit:
    rate: float
    ks_statistic: float
    p_value: float


def fit_exponential(samples: np.ndarray) -> ExponentialFit:
    """Maximum-likelihood exponential fit and a two-sided KS test against it."""
    samples = np.asarray(samples, dtype=float)
    mean = float(np.mean(samples))
    res = stats.kstest(samples, "expon", args=(0.0, mean))
    return ExponentialFit(rate=1.0 / mean, ks_statistic=float(res.statistic), p_value=float(res.pvalue))


# ---------------------------------------------------------------------------
# estimators


def _chunks(n: int):
    return [(start, min(CHUNK, n - start)) for start in range(0, n, CHUNK)]


def _map(fn, items, workers: int):
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def estimate(
    cfg: NetworkConfig, n: int, mode: str = "distribution", seed: int = 0, workers: int = 1
) -> McResult:
    """Empirical coverage P(SIR > tau) and scenario frequencies.

    Realisations are tallied with integer counts, so the result depends on
    ``(cfg, n, mode, seed)`` only.
    """
    n = _check_n(n)
    seed = int(seed)
    if mode == "distribution":
        p = K.mc_params(cfg)
        cdf, k_lo = K.poisson_table(cfg.mean_ap_count)

        def run(chunk):
            start, count = chunk
            codes, covered = K.mc_chunk_kernel(np.uint64(seed), start, count, cdf, k_lo, p)
            return np.bincount(codes, minlength=4).astype(np.int64), int(np.sum(covered, dtype=np.int64))

    elif mode == "full_channel":
        _require_full(cfg)

        def run(chunk):
            start, count = chunk
            counts = np.zeros(4, dtype=np.int64)
            hits = 0
            for i in range(start, start + count):
                real = sample_realization(cfg, seed, i)
                scenario = classify(cfg, real)
                counts[SCENARIOS.index(scenario)] += 1
                if scenario != "none" and _full_channel_sir(cfg, real, scenario) > cfg.tau:
                    hits += 1
            return counts, hits

    else:
        raise ValueError(f"unknown mode {mode!r}")

    results = _map(run, _chunks(n), workers)
    counts = np.sum([c for c, _ in results], axis=0)
    hits = sum(h for _, h in results)
    assoc = McAssociation(*(McEstimate.from_count(int(counts[SCENARIOS.index(s)]), n, seed)
                            for s in ("direct", "ris", "composite", "none")))
    return McResult(McEstimate.from_count(hits, n, seed), assoc, mode)


def interference_samples(
    cfg: NetworkConfig, r0: float, n: int, seed: int = 0, workers: int = 1, thinned: bool = True
) -> tuple[np.ndarray, np.ndarray]:
    """(I_D, I_R) over ``n`` draws of the interferer PPP on ``r0 < r < R_t``.

    The UE is at the centre and the RIS-UE link is taken as clear, so I_R is
    the interference a RIS-served UE would see.  With ``thinned`` false the
    AP-RIS links are never blocked.
    """
    n = _check_n(n)
    if not 0.0 <= r0 <= cfg.radius:
        raise ValueError("r0 must lie in [0, R_t]")
    p = K.mc_params(cfg)
    if not thinned:
        p[K.P_LOW] = 0.0
    cdf, k_lo = K.poisson_table(cfg.lambda_a * math.pi * (cfg.radius ** 2 - r0 * r0))

    def run(chunk):
        start, count = chunk
        return K.interference_chunk_kernel(np.uint64(seed), start, count, cdf, k_lo, p, float(r0))

    parts = _map(run, _chunks(n), workers)
    return np.concatenate([a for a, _ in parts]), np.concatenate([b for _, b in parts])


@dataclass(frozen=True)
class LaplaceOracle:
    s: np.ndarray
    direct_mean: np.ndarray
    direct_stderr: np.ndarray
    ris_mean: np.ndarray
    ris_stderr: np.ndarray


def _mean_se(values: np.ndarray):
    return float(np.mean(values)), float(np.std(values, ddof=1) / math.sqrt(values.size))


def laplace_oracle(
    cfg: NetworkConfig, s_values, r0: float, n: int, seed: int = 0, workers: int = 1,
    thinned: bool = False, s_ris=None,
) -> LaplaceOracle:
    """Sample means of exp(-s I_D) and exp(-s I_R) with standard errors.

    ``s_ris`` gives a separate grid for the RIS transform (defaults to
    ``s_values``).
    """
    s_d = np.atleast_1d(np.asarray(s_values, dtype=float))
    s_r = s_d if s_ris is None else np.atleast_1d(np.asarray(s_ris, dtype=float))
    i_d, i_r = interference_samples(cfg, r0, n, seed, workers, thinned)
    dm, dse = zip(*(_mean_se(np.exp(-s * i_d)) for s in s_d))
    rm, rse = zip(*(_mean_se(np.exp(-s * i_r)) for s in s_r))
    return LaplaceOracle(s_d, np.array(dm), np.array(dse), np.array(rm), np.array(rse))


def conditional_oracle(
    cfg: NetworkConfig, r0: float, phi0: float, n: int, seed: int = 0, workers: int = 1
) -> tuple[McEstimate, McEstimate, McEstimate]:
    """Coverage given the serving AP at ``(r0, phi0)``, one estimate per scenario.

    Signals follow the distribution-mode laws; interferers are the PPP on the
    annulus beyond ``r0``.  The RIS scenario sees I_D + I_R, the direct
    scenario I_D alone.
    """
    i_d, i_r = interference_samples(cfg, r0, n, seed, workers, thinned=True)
    keys = K.stream_keys(np.uint64(seed) ^ K.ORACLE_DOMAIN, np.arange(n))
    e = -np.log(K.uniforms(keys, K.C_SIGNAL))
    z0 = float(ap_ris_distance(r0, phi0, cfg.v0))
    s_d = cfg.p_a * float(pathloss_direct(cfg, r0)) * e / kappa_direct(cfg)
    s_r = e / float(kappa_ris(cfg, z0))
    s_c = e / float(kappa_composite(cfg, r0, z0))
    tau = cfg.tau
    total = i_d + i_r
    return (
        McEstimate.from_count(int(np.sum(s_d > tau * i_d)), n, seed),
        McEstimate.from_count(int(np.sum(s_r > tau * total)), n, seed),
        McEstimate.from_count(int(np.sum(s_c > tau * total)), n, seed),
    )
