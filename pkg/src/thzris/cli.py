"""Command-line interface.

    thzris coverage [--config FILE] [--mode analytic|mc|both] [--seed S] [--realizations N]
    thzris sweep    [--config FILE] --param NAME --from A --to B --steps K [--log] [--engines ...]
    thzris figure   --preset fig2|...|fig7

``coverage`` prints one JSON document; ``sweep`` and ``figure`` print CSV
whose leading ``#`` lines record the tool version, seed and resolved config.
Floats in CSV are written with 17 significant digits.

Exit codes: 0 ok, 2 bad config or arguments, 3 quadrature did not converge,
4 sampling mode unavailable.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from . import analysis, montecarlo
from .config import _DB_FIELDS, _FLOAT_FIELDS, ConfigError, NetworkConfig, default_paper_config, load_config, validate
from .quadrature import NonConvergence

EXIT_CONFIG = 2
EXIT_QUADRATURE = 3
EXIT_MODE = 4

DEFAULT_REALIZATIONS = 100_000

SWEEP_COLUMNS = (
    "param", "value",
    "cp_total_analytic", "cp_direct", "cp_ris", "cp_composite", "quad_error",
    "cp_mc", "cp_mc_stderr",
    "assoc_direct", "assoc_ris", "assoc_composite", "assoc_none",
    "error",
)

PRESETS = ("fig2", "fig3", "fig4", "fig5", "fig6", "fig7")


# ---------------------------------------------------------------------------
# single point


def run_point(
    cfg: NetworkConfig, mode: str = "both", seed: int = 0,
    realizations: int = DEFAULT_REALIZATIONS, workers: int = 1, mc_mode: str = "distribution",
) -> dict:
    """Result record for one config: analytic and/or Monte-Carlo."""
    record = {
        "tool": "thzris",
        "version": __version__,
        "scenario": cfg.scenario,
        "seed": int(seed),
        "config": cfg.to_dict(),
    }
    if mode in ("analytic", "both"):
        record["analytic"] = {
            "coverage": analysis.total_coverage(cfg).as_dict(),
            "association": analysis.association_mass(cfg).as_dict(),
        }
    if mode in ("mc", "both"):
        res = montecarlo.estimate(cfg, realizations, mc_mode, seed, workers)
        record["mc"] = {"realizations": int(realizations), **res.as_dict()}
    if mode == "both":
        record["abs_difference"] = abs(record["analytic"]["coverage"]["total"] - record["mc"]["coverage"]["value"])
    return record


# ---------------------------------------------------------------------------
# sweeps


def sweep_grid(start: float, stop: float, steps: int, log: bool) -> np.ndarray:
    if steps < 2:
        raise ConfigError("--steps must be >= 2")
    if not start < stop:
        raise ConfigError("--from must be below --to")
    if log:
        if start <= 0:
            raise ConfigError("a log grid needs --from > 0")
        return np.logspace(math.log10(start), math.log10(stop), steps)
    return np.linspace(start, stop, steps)


def _check_param(name: str):
    base = name[:-3] if name.endswith("_db") else name
    if name.endswith("_db") and base not in _DB_FIELDS:
        raise ConfigError(f"{name}: only {sorted(_DB_FIELDS)} accept a dB value")
    if base not in _FLOAT_FIELDS and base != "n_antennas":
        raise ConfigError(f"unknown sweep parameter {name!r}")


def _apply(cfg: NetworkConfig, name: str, value: float) -> NetworkConfig:
    if name == "n_antennas":
        value = int(round(value))
        return cfg.with_changes(n_antennas=value, precoder_mags=[1.0] * value)
    return cfg.with_changes(**{name: float(value)})


def _sweep_row(cfg, name, value, engines, seed, realizations):
    row = {c: None for c in SWEEP_COLUMNS}
    row["param"] = name
    row["value"] = float(value)
    try:
        point = _apply(cfg, name, value)
        if engines in ("analytic", "both"):
            cov = analysis.total_coverage(point)
            row.update(cp_total_analytic=cov.total, cp_direct=cov.contrib_direct, cp_ris=cov.contrib_ris,
                       cp_composite=cov.contrib_composite, quad_error=cov.quad_error_estimate)
            assoc = analysis.association_mass(point)
            row.update(assoc_direct=assoc.direct, assoc_ris=assoc.ris,
                       assoc_composite=assoc.composite, assoc_none=assoc.none)
        if engines in ("mc", "both"):
            res = montecarlo.estimate(point, realizations, "distribution", seed, 1)
            row.update(cp_mc=res.coverage.value, cp_mc_stderr=res.coverage.stderr)
            if engines == "mc":
                a = res.association
                row.update(assoc_direct=a.direct.value, assoc_ris=a.ris.value,
                           assoc_composite=a.composite.value, assoc_none=a.none.value)
    except (ConfigError, NonConvergence, montecarlo.ModeUnavailable, analysis.ScenarioMismatch) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def run_sweep(
    cfg: NetworkConfig, param: str, grid: Iterable[float], engines: str = "both",
    seed: int = 0, realizations: int = DEFAULT_REALIZATIONS, workers: int = 1,
) -> list[dict]:
    """One row per grid point, in grid order; failures land in ``error``."""
    _check_param(param)
    grid = list(grid)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        return list(pool.map(lambda v: _sweep_row(cfg, param, v, engines, seed, realizations), grid))


# ---------------------------------------------------------------------------
# figure presets
#
# Grids are our own choice; each preset varies the quantity on the figure's
# x axis around the default parameter set.


def _mc(cfg, seed, realizations):
    return montecarlo.estimate(cfg, realizations, "distribution", seed, 1)


def _preset_fig2(base, seed, n, pool):
    columns = ("lambda_b", "assoc_direct", "assoc_ris", "assoc_composite", "assoc_none",
               "mc_direct", "mc_ris", "mc_composite", "mc_none")

    def row(lb):
        cfg = base.with_changes(lambda_b=lb)
        a = analysis.association_mass(cfg)
        m = _mc(cfg, seed, n).association
        return (lb, a.direct, a.ris, a.composite, a.none,
                m.direct.value, m.ris.value, m.composite.value, m.none.value)

    return columns, list(pool.map(row, np.linspace(0.0, 4.0, 9)))


def _preset_fig3(base, seed, n, pool):
    columns = ("lambda_b", "cp_total_analytic", "cp_mc", "cp_direct", "cp_ris", "cp_composite")

    def row(lb):
        cfg = base.with_changes(lambda_b=lb)
        cov = analysis.total_coverage(cfg)
        return (lb, cov.total, _mc(cfg, seed, n).coverage.value,
                cov.contrib_direct, cov.contrib_ris, cov.contrib_composite)

    return columns, list(pool.map(row, np.linspace(0.0, 4.0, 9)))


def _preset_fig4(base, seed, n, pool):
    columns = ("h_r", "v0", "cp_total_analytic", "cp_mc")
    points = [(h, v) for h in (1.8, 2.25, 2.7) for v in np.linspace(1.0, 8.0, 8)]

    def row(point):
        h, v = point
        cfg = base.with_changes(h_r=h, v0=v)
        return (h, v, analysis.total_coverage(cfg).total, _mc(cfg, seed, n).coverage.value)

    return columns, list(pool.map(row, points))


def _preset_fig5(base, seed, n, pool):
    columns = ("tau_db", "lambda_a", "cp_total_analytic", "cp_mc")
    points = [(t, la) for t in (0.0, 2.0, 5.0) for la in np.logspace(-2.0, 1.0, 10)]

    def row(point):
        t, la = point
        cfg = base.with_changes(tau_db=t, lambda_a=la)
        return (t, la, analysis.total_coverage(cfg).total, _mc(cfg, seed, n).coverage.value)

    return columns, list(pool.map(row, points))


def _preset_fig6(base, seed, n, pool):
    columns = ("ue_offset", "cp_mc", "cp_mc_stderr")

    def row(frac):
        cfg = base.with_changes(ue_offset=frac * base.radius)
        est = _mc(cfg, seed, n).coverage
        return (cfg.ue_offset, est.value, est.stderr)

    return columns, list(pool.map(row, np.linspace(0.0, 0.95, 11)))


def _preset_fig7(base, seed, n, pool):
    columns = ("lambda_b", "h_r", "cp_total_analytic", "cp_mc", "cp_total_high_ris")
    h_low = 0.75 * base.h_b

    def row(lb):
        low = base.with_changes(lambda_b=lb, h_r=h_low)
        high = base.with_changes(lambda_b=lb)
        return (lb, h_low, analysis.total_coverage(low).total, _mc(low, seed, n).coverage.value,
                analysis.total_coverage(high).total)

    return columns, list(pool.map(row, np.linspace(0.5, 4.0, 8)))


_PRESETS = {
    "fig2": _preset_fig2, "fig3": _preset_fig3, "fig4": _preset_fig4,
    "fig5": _preset_fig5, "fig6": _preset_fig6, "fig7": _preset_fig7,
}


def figure_preset(
    name: str, base: NetworkConfig | None = None, seed: int = 0,
    realizations: int = DEFAULT_REALIZATIONS, workers: int = 1,
) -> tuple[tuple[str, ...], list[tuple]]:
    """(columns, rows) for a named figure reproduction."""
    if name not in _PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    base = base or default_paper_config()
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        return _PRESETS[name](base, seed, realizations, pool)


# ---------------------------------------------------------------------------
# output


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return "%.17g" % float(value)
    return str(value)


def write_csv(out, columns: Sequence[str], rows: Iterable, meta: dict, cfg: NetworkConfig):
    out.write(f"# thzris {__version__}\n")
    for key, value in meta.items():
        out.write(f"# {key}: {value}\n")
    out.write("# config: " + json.dumps(cfg.to_dict(), sort_keys=True) + "\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        values = [row[c] for c in columns] if isinstance(row, dict) else list(row)
        writer.writerow([_fmt(v) for v in values])


# ---------------------------------------------------------------------------
# argument parsing


def _parse_set(items: Sequence[str] | None) -> dict:
    changes = {}
    for item in items or ():
        if "=" not in item:
            raise ConfigError(f"--set expects NAME=VALUE, got {item!r}")
        key, raw = item.split("=", 1)
        try:
            changes[key.strip()] = json.loads(raw)
        except json.JSONDecodeError:
            raise ConfigError(f"--set {key}: cannot parse value {raw!r}") from None
    return changes


def _load(args) -> NetworkConfig:
    cfg = load_config(args.config) if args.config else default_paper_config()
    changes = _parse_set(getattr(args, "set", None))
    if changes:
        raw = cfg.to_dict()
        for key in changes:
            base = key[:-3] if key.endswith("_db") else key
            raw.pop(base, None)
        raw.update(changes)
        cfg = validate(raw)
    return cfg


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="thzris", description="RIS-assisted indoor THz coverage")
    parser.add_argument("--version", action="version", version=f"thzris {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file (missing keys take the default parameter set)")
        p.add_argument("--set", action="append", metavar="NAME=VALUE",
                       help="override one config field; NAME may carry a _db suffix")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--realizations", type=int, default=DEFAULT_REALIZATIONS)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--output", help="write to this file instead of stdout")

    p = sub.add_parser("coverage", help="evaluate one configuration (JSON)")
    common(p)
    p.add_argument("--mode", choices=("analytic", "mc", "both"), default="both")
    p.add_argument("--mc-mode", choices=("distribution", "full_channel"), default="distribution")

    p = sub.add_parser("sweep", help="sweep one parameter (CSV)")
    common(p)
    p.add_argument("--param", required=True)
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--log", action="store_true", help="log-spaced grid")
    p.add_argument("--engines", choices=("analytic", "mc", "both"), default="both")

    p = sub.add_parser("figure", help="run a figure preset (CSV)")
    common(p)
    p.add_argument("--preset", choices=PRESETS, required=True)
    return parser


def _emit(args, write):
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            write(fh)
    else:
        write(sys.stdout)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.realizations < 1 or args.workers < 1:
            raise ConfigError("--realizations and --workers must be >= 1")
        cfg = _load(args)
        if args.command == "coverage":
            record = run_point(cfg, args.mode, args.seed, args.realizations, args.workers, args.mc_mode)
            _emit(args, lambda fh: fh.write(json.dumps(record, indent=2) + "\n"))
        elif args.command == "sweep":
            grid = sweep_grid(args.start, args.stop, args.steps, args.log)
            rows = run_sweep(cfg, args.param, grid, args.engines, args.seed, args.realizations, args.workers)
            meta = {"command": "sweep", "param": args.param, "grid": "log" if args.log else "linear",
                    "engines": args.engines, "seed": args.seed, "realizations": args.realizations}
            _emit(args, lambda fh: write_csv(fh, SWEEP_COLUMNS, rows, meta, cfg))
        else:
            columns, rows = figure_preset(args.preset, cfg, args.seed, args.realizations, args.workers)
            meta = {"command": "figure", "preset": args.preset, "seed": args.seed,
                    "realizations": args.realizations}
            _emit(args, lambda fh: write_csv(fh, columns, rows, meta, cfg))
    except (ConfigError, analysis.ScenarioMismatch) as exc:
        print(f"thzris: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NonConvergence as exc:
        print(f"thzris: quadrature did not converge: {exc}", file=sys.stderr)
        return EXIT_QUADRATURE
    except montecarlo.ModeUnavailable as exc:
        print(f"thzris: mode unavailable: {exc}", file=sys.stderr)
        return EXIT_MODE
    return 0


if __name__ == "__main__":
    sys.exit(main())
