"""Acceptance criteria, each at its stated tolerance.

Every criterion prints one ``[PASS]``/``[FAIL]`` line and also appears in
the "acceptance criteria" section of the pytest summary.
"""

import filecmp
import math

import numpy as np
import pytest
from scipy.optimize import brentq

from conftest import ACCEPTANCE_LINES
from thzris import cli
from thzris.analysis import (
    LaplaceEvaluator,
    association,
    association_low_ris,
    association_mass,
    coverage,
    coverage_low_ris,
    lt_interference_composite,
    lt_interference_direct,
    lt_interference_ris,
    total_coverage,
)
from thzris.channel import kappa_composite, kappa_ris
from thzris.montecarlo import estimate, fit_exponential, laplace_oracle, signal_power_samples
from thzris.quadrature import integrate_1d

SEED = 1
N_MC = 100_000
WORKERS = 8


def report(label, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


# 1 ---------------------------------------------------------------------------


def _c1_configs(cfg):
    return [
        ("defaults", cfg),
        ("lambda_b=0.5", cfg.with_changes(lambda_b=0.5)),
        ("lambda_b=4", cfg.with_changes(lambda_b=4.0)),
        ("lambda_a=0.1", cfg.with_changes(lambda_a=0.1)),
        ("lambda_a=0.1,lambda_b=4", cfg.with_changes(lambda_a=0.1, lambda_b=4.0)),
        ("tau=0.1", cfg.with_changes(tau=0.1)),
        ("tau=0.1,lambda_b=0.5", cfg.with_changes(tau=0.1, lambda_b=0.5)),
        ("lambda_a=0.1,tau=0.1", cfg.with_changes(lambda_a=0.1, tau=0.1)),
        ("low-ris h_r=1.2", cfg.with_changes(h_r=1.2)),
    ]


def test_c1_cross_engine_agreement(cfg):
    worst, where = 0.0, ""
    for name, c in _c1_configs(cfg):
        a = total_coverage(c).total
        m = estimate(c, N_MC, seed=SEED, workers=WORKERS).coverage.value
        if abs(a - m) >= worst:
            worst, where = abs(a - m), name
    report("C1 cross-engine agreement", worst <= 0.015,
           f"max |analytic - mc| = {worst:.4f} at {where} over 9 configs (limit 0.015)")


# 2 ---------------------------------------------------------------------------


def test_c2_association_oracle(cfg):
    configs = [cfg, cfg.with_changes(lambda_b=4.0), cfg.with_changes(h_r=1.2),
               cfg.with_changes(h_r=1.2, lambda_b=0.5)]
    worst = 0.0
    for c in configs:
        mass = association_mass(c)
        res = estimate(c, N_MC, seed=SEED, workers=WORKERS).association
        for name in ("direct", "ris", "composite", "none"):
            est = getattr(res, name)
            worst = max(worst, abs(est.value - getattr(mass, name)) / est.stderr)
    report("C2 association oracle", worst <= 3.0,
           f"max deviation {worst:.2f} standard errors over 4 configs x 4 scenarios (limit 3)")


# 3 ---------------------------------------------------------------------------


def test_c3_quoted_no_association(cfg):
    columns, rows = cli.figure_preset("fig2", cfg, seed=SEED, realizations=N_MC, workers=WORKERS)
    row = next(r for r in rows if r[0] == 4.0)
    value = row[columns.index("assoc_none")]
    report("C3 no-association at lambda_b=4", abs(value - 0.15) <= 0.03,
           f"{value:.4f} (target 0.15 +- 0.03)")


# 4 ---------------------------------------------------------------------------

TARGETS = (0.9, 0.7, 0.5, 0.3, 0.15)


def _s_for(lt, target):
    # LT is decreasing in s; solve on a log scale
    lo, hi = -60.0, 60.0
    return 10 ** brentq(lambda x: lt(10 ** x) - target, lo, hi, xtol=1e-10)


def test_c4_laplace_oracle(cfg):
    ev = LaplaceEvaluator(cfg)
    worst = 0.0
    for r0 in (1.0, 2.0):
        s_d = [_s_for(lambda s: ev.direct(s, r0), t) for t in TARGETS]
        s_r = [_s_for(lambda s: ev.ris(s, r0, thinned=False), t) for t in TARGETS]
        oracle = laplace_oracle(cfg, s_d, r0, N_MC, seed=SEED, workers=WORKERS, s_ris=s_r)
        for s, m, se in zip(s_d, oracle.direct_mean, oracle.direct_stderr):
            worst = max(worst, abs(lt_interference_direct(cfg, s, r0) - m) / se)
        for s, m, se in zip(s_r, oracle.ris_mean, oracle.ris_stderr):
            worst = max(worst, abs(lt_interference_ris(cfg, s, r0) - m) / se)
    report("C4 Laplace-transform oracle", worst <= 2.0,
           f"max deviation {worst:.2f} standard errors over 2 transforms x 5 s x 2 r0 (limit 2)")


# 5 ---------------------------------------------------------------------------


def _non_increasing(results):
    return all(b.total <= a.total + a.quad_error_estimate + b.quad_error_estimate
               for a, b in zip(results, results[1:]))


def test_c5a_threshold_trend(cfg):
    res = [coverage(cfg.with_changes(tau=10 ** (db / 10))) for db in np.arange(-10, 11, 2)]
    report("C5a coverage non-increasing in tau", _non_increasing(res),
           f"{res[0].total:.4f} at -10 dB to {res[-1].total:.4f} at 10 dB, 11 points")


def test_c5b_ris_distance_trend(cfg):
    res = [coverage(cfg.with_changes(v0=float(v))) for v in np.arange(1.0, 8.5, 1.0)]
    report("C5b coverage non-increasing in v0", _non_increasing(res),
           f"{res[0].total:.4f} at 1 m to {res[-1].total:.4f} at 8 m, 8 points")


def test_c5c_optimal_density(cfg):
    grid = np.logspace(-2, 1, 10)
    vals = [coverage(cfg.with_changes(lambda_a=float(la))).total for la in grid]
    k = int(np.argmax(vals))
    report("C5c interior maximum over lambda_a", 0 < k < len(grid) - 1,
           f"maximum {vals[k]:.4f} at lambda_a={grid[k]:.4g} (index {k} of 0..{len(grid) - 1})")


def test_c5d_element_saturation(cfg):
    grid = 10 ** np.arange(12.0, 14.01, 0.5)
    vals = [coverage(cfg.with_changes(n_elements=float(n))).total for n in grid]
    rel = abs(vals[-1] - vals[-2]) / vals[-2]
    report("C5d saturation in N", rel < 1e-3,
           f"relative change {rel:.2e} between N=10^13.5 and 10^14 (limit 1e-3)")


def test_c5e_offset_trend(cfg):
    vals = {f: estimate(cfg.with_changes(ue_offset=f * cfg.radius), N_MC, seed=SEED, workers=WORKERS).coverage.value
            for f in (0.0, 0.1, 0.95)}
    near = abs(vals[0.1] - vals[0.0])
    drop = vals[0.0] - vals[0.95]
    report("C5e ue_offset flat centre, edge drop", near <= 0.02 and drop >= 0.1,
           f"|cp(0.1 R_t) - cp(0)| = {near:.4f} (limit 0.02), cp(0) - cp(0.95 R_t) = {drop:.4f} (need >= 0.1)")


def test_c5f_low_below_high(cfg):
    grid = np.linspace(0.5, 4.0, 8)
    low_h = 0.75 * cfg.h_b
    ok = True
    gap = math.inf
    for lb in grid:
        hi = coverage(cfg.with_changes(lambda_b=float(lb))).total
        lo = coverage_low_ris(cfg.with_changes(lambda_b=float(lb), h_r=low_h)).total
        ok &= lo < hi
        gap = min(gap, hi - lo)
    report("C5f low RIS below high RIS", ok, f"smallest gap {gap:.4f} over 8 lambda_b points")


# 6 ---------------------------------------------------------------------------


def test_c6_reductions(cfg):
    bcfg = cfg.with_changes(h_r=cfg.h_b)
    assoc_gap = 0.0
    for r0 in (0.3, 1.0, 3.0, 8.0):
        hi, lo = association(bcfg, r0), association_low_ris(bcfg, r0, 2.0)
        for name in ("direct", "ris", "composite", "none"):
            assoc_gap = max(assoc_gap, abs(getattr(hi, name) - getattr(lo, name)))
    hi, lo = coverage(bcfg), coverage_low_ris(bcfg)
    cov_gap = abs(hi.total - lo.total)
    cov_lim = 1e-6 + hi.quad_error_estimate + lo.quad_error_estimate
    prod_gap = 0.0
    for r0 in (1.0, 2.0):
        s = cfg.tau * float(kappa_composite(cfg, r0, 1.5))
        prod = lt_interference_direct(cfg, s, r0) * lt_interference_ris(cfg, s, r0)
        prod_gap = max(prod_gap, abs(lt_interference_composite(cfg, s, r0) / prod - 1.0))
    ok = assoc_gap <= 1e-6 and cov_gap <= cov_lim and prod_gap <= 1e-10
    report("C6 reduction identities", ok,
           f"association gap {assoc_gap:.1e} (limit 1e-6), coverage gap {cov_gap:.1e} (limit {cov_lim:.1e}), "
           f"product identity rel {prod_gap:.1e} (limit 1e-10)")


# 7 ---------------------------------------------------------------------------


def test_c7_distribution_shape(cfg):
    c = cfg.with_changes(n_elements=64)
    r0, phi0 = 1.0, math.pi / 2
    z0 = float(np.hypot(r0 * math.cos(phi0) - c.v0, r0 * math.sin(phi0)))
    fits = {link: fit_exponential(signal_power_samples(c, link, r0, phi0, 20_000, seed=SEED))
            for link in ("ris", "composite")}
    ok = all(f.p_value > 0.01 for f in fits.values())
    report("C7 exponential signal-power laws", ok,
           f"S_R p={fits['ris'].p_value:.3f} rate={fits['ris'].rate:.4g} (kappa_R={float(kappa_ris(c, z0)):.4g}); "
           f"S_C p={fits['composite'].p_value:.3f} rate={fits['composite'].rate:.4g} "
           f"(kappa_C={float(kappa_composite(c, r0, z0)):.4g}); alpha 0.01")


# 8 ---------------------------------------------------------------------------


def test_c8_determinism(tmp_path):
    runs = [
        ["coverage", "--mode", "both", "--realizations", "50000"],
        ["sweep", "--param", "lambda_b", "--from", "0", "--to", "4", "--steps", "3", "--realizations", "20000"],
        ["figure", "--preset", "fig6", "--realizations", "20000"],
    ]
    same = []
    for i, argv in enumerate(runs):
        paths = []
        for w in (1, 8):
            path = tmp_path / f"run{i}_w{w}.out"
            assert cli.main(argv + ["--seed", "7", "--workers", str(w), "--output", str(path)]) == 0
            paths.append(path)
        same.append(filecmp.cmp(*paths, shallow=False))
    report("C8 byte-identical output across worker counts", all(same),
           f"coverage JSON, sweep CSV, figure CSV identical for 1 and 8 workers: {same}")
