"""Analytical engine: association probabilities, interference Laplace
transforms, conditional and total coverage probabilities.

The reference UE sits at the disk centre.  The serving AP is the nearest
one, at 2D distance ``r0`` and azimuth ``phi0`` measured from the UE->RIS
axis; interferers form a PPP on the annulus ``r0 < r < R_t``.

Two placements of the RIS are handled:

* HIGH-RIS (``h_r > h_b``): AP-RIS links are never blocked.
* LOW-RIS (``h_r <= h_b``): AP-RIS links are thinned with
  ``exp(-beta_ar * z)``, which splits the direct-only scenario in two
  (serving AP-RIS link blocked while the RIS-UE link is clear, and RIS-UE
  link blocked).  In the first case the RIS still relays interference, so
  its conditional coverage carries the RIS interference transform.

All Laplace-transform exponents are computed with absolute tolerance
``LT_TOL``; the outer coverage integrals with ``COVERAGE_TOL`` shared over
the scenario contributions.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from .channel import (
    LinkConstants,
    ap_ris_distance,
    kappa_composite,
    kappa_direct,
    kappa_interference,
    kappa_ris,
    p_los_ap_ris,
    p_los_direct,
    p_los_ris_ue,
    pathloss_direct,
)
from .config import NetworkConfig
from .quadrature import NonConvergence, QuadratureNonConvergence, integrate_1d, integrate_2d

LT_TOL = 1e-6
COVERAGE_TOL = 1e-4
MAX_EVALS = 1_000_000
ASSOCIATION_TOL = 1e-10


class ScenarioMismatch(ValueError):
    """An operation was called for the wrong RIS placement."""


__all__ = [
    "AssociationBreakdown", "ConditionalCoverage", "CoverageResult", "LaplaceEvaluator",
    "ScenarioMismatch", "QuadratureNonConvergence", "association", "association_low_ris",
    "association_mass", "conditional_coverage", "coverage", "coverage_low_ris", "total_coverage",
    "lt_interference_direct", "lt_interference_ris", "lt_interference_ris_low",
    "lt_interference_composite",
]


# ---------------------------------------------------------------------------
# association


@dataclass(frozen=True)
class AssociationBreakdown:
    """Scenario probabilities.  ``direct`` is split into the part where the
    serving AP-RIS link is blocked but the RIS-UE link is clear
    (``direct_ris_relays``, LOW-RIS only) and the part where the RIS-UE link
    is blocked (``direct_ris_silent``)."""

    direct: float
    ris: float
    composite: float
    none: float
    direct_ris_relays: float = 0.0
    direct_ris_silent: float = 0.0

    def as_dict(self) -> dict:
        return {
            "direct": self.direct, "ris": self.ris, "composite": self.composite, "none": self.none,
            "direct_ris_relays": self.direct_ris_relays, "direct_ris_silent": self.direct_ris_silent,
        }


def _require_high(cfg: NetworkConfig, what: str):
    if cfg.ap_ris_blockable:
        raise ScenarioMismatch(f"{what} assumes unblockable AP-RIS links; use the LOW-RIS variant")


def _require_low(cfg: NetworkConfig, what: str):
    if not cfg.low_ris:
        raise ScenarioMismatch(f"{what} needs a LOW-RIS config (h_r <= h_b), got h_r={cfg.h_r} > h_b={cfg.h_b}")


def _association_terms(cfg, r0, z0):
    """(ris_relays, ris_silent, ris, composite) as arrays; none is the rest."""
    p_d = p_los_direct(cfg, r0)
    p_r = p_los_ris_ue(cfg)
    p_ar = p_los_ap_ris(cfg, z0)
    relays = p_d * p_r * (1.0 - p_ar)
    silent = p_d * (1.0 - p_r)
    ris = (1.0 - p_d) * p_r * p_ar
    comp = p_d * p_r * p_ar
    return relays, silent, ris, comp


def _breakdown(relays, silent, ris, comp) -> AssociationBreakdown:
    relays, silent, ris, comp = (float(x) for x in (relays, silent, ris, comp))
    direct = relays + silent
    none = max(0.0, 1.0 - (direct + ris + comp))
    return AssociationBreakdown(direct, ris, comp, none, relays, silent)


def association(cfg: NetworkConfig, r0: float) -> AssociationBreakdown:
    """Scenario probabilities for a serving AP at distance ``r0`` (HIGH-RIS)."""
    _require_high(cfg, "association")
    if r0 < 0:
        raise ValueError("r0 must be >= 0")
    p_d = float(p_los_direct(cfg, r0))
    p_r = float(p_los_ris_ue(cfg))
    return AssociationBreakdown(
        direct=p_d * (1.0 - p_r),
        ris=(1.0 - p_d) * p_r,
        composite=p_d * p_r,
        none=(1.0 - p_d) * (1.0 - p_r),
        direct_ris_relays=0.0,
        direct_ris_silent=p_d * (1.0 - p_r),
    )


def association_low_ris(cfg: NetworkConfig, r0: float, z0: float) -> AssociationBreakdown:
    """LOW-RIS scenario probabilities; the serving AP-RIS distance matters too."""
    _require_low(cfg, "association_low_ris")
    if r0 < 0 or z0 < 0:
        raise ValueError("distances must be >= 0")
    p_d = float(p_los_direct(cfg, r0))
    p_r = float(p_los_ris_ue(cfg))
    p_ar = float(p_los_ap_ris(cfg, z0))
    relays = p_d * p_r * (1.0 - p_ar)
    silent = p_d * (1.0 - p_r)
    ris = (1.0 - p_d) * p_r * p_ar
    comp = p_d * p_r * p_ar
    none = (1.0 - p_d) * (1.0 - p_r * p_ar)
    return AssociationBreakdown(relays + silent, ris, comp, none, relays, silent)


def nearest_pdf(cfg: NetworkConfig, r0):
    """Nearest-AP distance density of the infinite PPP (not truncated to R_t)."""
    lam = cfg.lambda_a
    r0 = np.asarray(r0, dtype=float)
    return 2.0 * math.pi * lam * r0 * np.exp(-lam * math.pi * r0 * r0)


def association_mass(cfg: NetworkConfig) -> AssociationBreakdown:
    """Scenario probabilities averaged over the serving AP position.

    The nearest-AP mass beyond R_t (no AP in the disk) lands in ``none``.
    """
    if not cfg.ap_ris_blockable:
        def terms(r0):
            relays, silent, ris, comp = _association_terms(cfg, r0, np.zeros_like(r0))
            return nearest_pdf(cfg, r0), silent, ris, comp

        out = []
        for k in (1, 2, 3):
            res = integrate_1d(lambda r, k=k: terms(r)[0] * terms(r)[k], 0.0, cfg.radius, ASSOCIATION_TOL)
            out.append(res.value)
        return _breakdown(0.0, *out)

    def term2d(k):
        def f(phi0, r0):
            z0 = ap_ris_distance(r0, phi0, cfg.v0)
            return nearest_pdf(cfg, r0) * _association_terms(cfg, r0, z0)[k] / math.pi
        return integrate_2d(f, (0.0, math.pi, 0.0, cfg.radius), ASSOCIATION_TOL).value

    silent = integrate_1d(
        lambda r: nearest_pdf(cfg, r) * _association_terms(cfg, r, np.zeros_like(r))[1],
        0.0, cfg.radius, ASSOCIATION_TOL,
    ).value
    return _breakdown(term2d(0), silent, term2d(2), term2d(3))


# ---------------------------------------------------------------------------
# Laplace transforms of the interference


def _sig12(x: float) -> float:
    """Round to 12 significant digits (memo key)."""
    if x == 0.0 or not math.isfinite(x):
        return x
    return float(f"{x:.11e}")


class LaplaceEvaluator:
    """Evaluates L_ID, L_IR (optionally AP-RIS thinned) and their product.

    Results are memoised on ``(kind, s, r0)`` rounded to 12 significant
    digits.  The memo is guarded by a lock so one evaluator can be shared
    between threads.  ``evaluations`` and ``max_exponent_error`` accumulate
    over every uncached call.
    """

    def __init__(self, cfg: NetworkConfig, tol: float = LT_TOL, max_evals: int = MAX_EVALS):
        self.cfg = cfg
        self.tol = tol
        self.max_evals = max_evals
        self._c = LinkConstants.from_config(cfg)
        self._kappa_d = kappa_direct(cfg)
        self._kappa_i = kappa_interference(cfg)
        self._memo: dict = {}
        self._lock = threading.Lock()
        self.evaluations = 0
        self.max_exponent_error = 0.0

    def _check(self, s, r0):
        if not s >= 0:
            raise ValueError(f"s must be >= 0, got {s}")
        if not 0.0 <= r0 <= self.cfg.radius:
            raise ValueError(f"r0 must lie in [0, R_t], got {r0}")

    def _cached(self, key, compute):
        with self._lock:
            hit = self._memo.get(key)
        if hit is not None:
            return hit
        value, error, evals, ok = compute()
        with self._lock:
            self.evaluations += int(evals)
            self.max_exponent_error = max(self.max_exponent_error, float(error))
        if not ok:
            raise NonConvergence(
                f"Laplace exponent {key[0]} at s={key[1]:g}, r0={key[2]:g} did not converge "
                f"(error {error:.3g} after {evals} evaluations)"
            )
        with self._lock:
            self._memo[key] = value
        return value

    def direct_exponent(self, s: float, r0: float) -> float:
        self._check(s, r0)
        cfg, c = self.cfg, self._c
        if s == 0.0 or r0 >= cfg.radius:
            return 0.0
        scale = 2.0 * math.pi * cfg.lambda_a

        def compute():
            value, error, evals, ok = _kernels.lt_direct_kernel(
                float(s * cfg.p_a), float(r0), float(cfg.radius), self._kappa_d, cfg.beta_d,
                c.const_d, c.k_abs, c.h_a, self.tol / scale, self.max_evals,
            )
            return scale * value, scale * error, evals, ok

        return self._cached(("D", _sig12(s), _sig12(r0)), compute)

    def ris_exponent(self, s: float, r0: float, thinned: bool) -> float:
        self._check(s, r0)
        cfg, c = self.cfg, self._c
        if s == 0.0 or r0 >= cfg.radius:
            return 0.0
        beta_ar = cfg.beta_ar if thinned else 0.0
        # PGFL over the annulus: lambda_a * int_0^{2 pi} = 2 lambda_a * int_0^pi
        scale = 2.0 * cfg.lambda_a

        def compute():
            value, error, evals, ok = _kernels.lt_ris_kernel(
                float(s * cfg.p_a), float(r0), float(cfg.radius), self._kappa_i, beta_ar, c.v0,
                c.const_r, c.k_abs, c.dh, c.h_r, self.tol / scale, self.max_evals,
            )
            return scale * value, scale * error, evals, ok

        kind = "R'" if thinned and beta_ar > 0.0 else "R"
        return self._cached((kind, _sig12(s), _sig12(r0)), compute)

    def direct(self, s: float, r0: float) -> float:
        return math.exp(-self.direct_exponent(s, r0))

    def ris(self, s: float, r0: float, thinned: bool = True) -> float:
        """L_IR, or L_I'R when ``thinned`` and the config is LOW-RIS."""
        return math.exp(-self.ris_exponent(s, r0, thinned))

    def composite(self, s: float, r0: float, thinned: bool = True) -> float:
        return math.exp(-(self.direct_exponent(s, r0) + self.ris_exponent(s, r0, thinned)))


def lt_interference_direct(cfg: NetworkConfig, s: float, r0: float) -> float:
    """E[exp(-s I_D)]: interference over direct links from APs beyond ``r0``."""
    return LaplaceEvaluator(cfg).direct(s, r0)


def lt_interference_ris(cfg: NetworkConfig, s: float, r0: float) -> float:
    """E[exp(-s I_R)] with every AP-RIS link clear (no thinning)."""
    return LaplaceEvaluator(cfg).ris(s, r0, thinned=False)


def lt_interference_ris_low(cfg: NetworkConfig, s: float, r0: float) -> float:
    """E[exp(-s I'_R)]: RIS interference with blockable AP-RIS links."""
    _require_low(cfg, "lt_interference_ris_low")
    return LaplaceEvaluator(cfg).ris(s, r0, thinned=True)


def lt_interference_composite(cfg: NetworkConfig, s: float, r0: float) -> float:
    """E[exp(-s (I_D + I_R))] under the independence of the two sums."""
    return LaplaceEvaluator(cfg).composite(s, r0, thinned=True)


# ---------------------------------------------------------------------------
# conditional coverage


class ConditionalCoverage(NamedTuple):
    direct: float
    ris: float
    composite: float


def _arguments(cfg, r0, z0):
    """LT arguments tau * kappa / signal scale for the three scenarios."""
    s_d = cfg.tau * kappa_direct(cfg) / (cfg.p_a * float(pathloss_direct(cfg, r0)))
    s_r = cfg.tau * float(kappa_ris(cfg, z0))
    s_c = cfg.tau * float(kappa_composite(cfg, r0, z0))
    return s_d, s_r, s_c


def conditional_coverage(
    cfg: NetworkConfig, r0: float, phi0: float, evaluator: LaplaceEvaluator | None = None
) -> ConditionalCoverage:
    """Coverage given the serving AP at ``(r0, phi0)`` and each scenario.

    In LOW-RIS configs the RIS interference is AP-RIS thinned.
    """
    if not 0.0 <= phi0 <= math.pi:
        raise ValueError("phi0 must lie in [0, pi]")
    ev = evaluator or LaplaceEvaluator(cfg)
    z0 = float(ap_ris_distance(r0, phi0, cfg.v0))
    s_d, s_r, s_c = _arguments(cfg, r0, z0)
    return ConditionalCoverage(
        direct=ev.direct(s_d, r0),
        ris=ev.composite(s_r, r0),
        composite=ev.composite(s_c, r0),
    )


# ---------------------------------------------------------------------------
# total coverage


@dataclass(frozen=True)
class CoverageResult:
    total: float
    contrib_direct: float
    contrib_ris: float
    contrib_composite: float
    quad_error_estimate: float
    evaluations: int

    def as_dict(self) -> dict:
        return {
            "total": self.total, "contrib_direct": self.contrib_direct, "contrib_ris": self.contrib_ris,
            "contrib_composite": self.contrib_composite, "quad_error_estimate": self.quad_error_estimate,
            "evaluations": self.evaluations,
        }


def _coverage_impl(cfg: NetworkConfig, tol: float, low: bool) -> CoverageResult:
    ev = LaplaceEvaluator(cfg)
    radius = cfg.radius
    tau = cfg.tau
    k_d = kappa_direct(cfg)
    p_r = float(p_los_ris_ue(cfg))
    relays_on = low and cfg.ap_ris_blockable
    n_terms = 4 if relays_on else 3
    part_tol = tol / n_terms
    quad_evals = 0
    errors = []

    # direct-only with a silent RIS: independent of phi0
    def f_silent(r0s):
        out = np.empty(r0s.shape)
        for i, r0 in enumerate(r0s):
            p_d = math.exp(-cfg.beta_d * r0)
            a = p_d * (1.0 - p_r)
            if a == 0.0:
                out[i] = 0.0
                continue
            s_d = tau * k_d / (cfg.p_a * float(pathloss_direct(cfg, r0)))
            out[i] = float(nearest_pdf(cfg, r0)) * a * ev.direct(s_d, r0)
        return out

    res = integrate_1d(f_silent, 0.0, radius, part_tol, max_evals=MAX_EVALS)
    silent = res.value
    errors.append(res.error_estimate)
    quad_evals += res.evaluations

    def make_2d(kind):
        def f(phi0, r0s):
            out = np.empty(r0s.shape)
            for i, r0 in enumerate(r0s):
                p_d = math.exp(-cfg.beta_d * r0)
                z0 = float(ap_ris_distance(r0, phi0, cfg.v0))
                p_ar = math.exp(-cfg.beta_ar * z0) if relays_on else 1.0
                if kind == "ris":
                    a = (1.0 - p_d) * p_r * p_ar
                elif kind == "composite":
                    a = p_d * p_r * p_ar
                else:
                    a = p_d * p_r * (1.0 - p_ar)
                if a == 0.0:
                    out[i] = 0.0
                    continue
                if kind == "ris":
                    s = tau * float(kappa_ris(cfg, z0))
                elif kind == "composite":
                    s = tau * float(kappa_composite(cfg, r0, z0))
                else:
                    s = tau * k_d / (cfg.p_a * float(pathloss_direct(cfg, r0)))
                out[i] = float(nearest_pdf(cfg, r0)) * a * ev.composite(s, r0) / math.pi
            return out
        return f

    parts = {}
    kinds = ["ris", "composite"] + (["relays"] if relays_on else [])
    for kind in kinds:
        res = integrate_2d(
            make_2d(kind), (0.0, math.pi, 0.0, radius), part_tol, max_evals=MAX_EVALS,
        )
        parts[kind] = res.value
        errors.append(res.error_estimate)
        quad_evals += res.evaluations

    direct = silent + parts.get("relays", 0.0)
    ris = parts["ris"]
    comp = parts["composite"]
    total = direct + ris + comp
    # each LT is off by at most exp(error) - 1 relative; coverage terms are
    # bounded by their association mass (<= 1 in total)
    lt_err = 2.0 * math.expm1(ev.max_exponent_error)
    return CoverageResult(
        total=total,
        contrib_direct=direct,
        contrib_ris=ris,
        contrib_composite=comp,
        quad_error_estimate=math.fsum(errors) + lt_err,
        evaluations=quad_evals + ev.evaluations,
    )


def coverage(cfg: NetworkConfig, tol: float = COVERAGE_TOL) -> CoverageResult:
    """Total coverage probability with unblockable AP-RIS links.

    Also accepts the boundary placement ``h_r == h_b`` (no AP-RIS thinning).
    """
    _require_high(cfg, "coverage")
    return _coverage_impl(cfg, tol, low=False)


def coverage_low_ris(cfg: NetworkConfig, tol: float = COVERAGE_TOL) -> CoverageResult:
    """Total coverage probability with blockable AP-RIS links (h_r <= h_b)."""
    _require_low(cfg, "coverage_low_ris")
    return _coverage_impl(cfg, tol, low=True)


def total_coverage(cfg: NetworkConfig, tol: float = COVERAGE_TOL) -> CoverageResult:
    """Dispatch on the RIS placement."""
    if cfg.low_ris:
        return coverage_low_ris(cfg, tol)
    return coverage(cfg, tol)

