"""Adaptive Gauss-Kronrod integration and log-domain helpers.

The 1D integrator is a global adaptive scheme in the QUADPACK QAG mould: a
15-point Kronrod rule with its embedded 7-point Gauss rule on every interval,
repeatedly bisecting the interval with the largest local error until the
summed error estimate meets the tolerance.  ``|K15 - G7|`` is used as the
local error, which is pessimistic for smooth integrands.

Integrands are called with a 1D numpy array of 15 nodes per interval and
must return an array of the same shape.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import logsumexp

# QUADPACK qk15 abscissae (descending, last is the centre) and weights
XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# full symmetric 15-node layout on [-1, 1]
NODES = np.concatenate([-XGK[:-1], XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([WGK[:-1], WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[1:7:2] = WG[:3]
GAUSS_WEIGHTS[7] = WG[3]
GAUSS_WEIGHTS[9:15:2] = WG[2::-1]

DEFAULT_MAX_EVALS = 1_000_000


class NonConvergence(ArithmeticError):
    """Raised when the evaluation budget runs out before the tolerance is met."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


# the analysis layer reports this under its own name
QuadratureNonConvergence = NonConvergence


@dataclass(frozen=True)
class QuadResult:
    value: float
    error_estimate: float
    evaluations: int
    converged: bool


def gk15(f: Callable[[np.ndarray], np.ndarray], a: float, b: float) -> tuple[float, float]:
    """Kronrod estimate and ``|K - G|`` on a single interval."""
    half = 0.5 * (b - a)
    centre = 0.5 * (a + b)
    fx = np.asarray(f(centre + half * NODES), dtype=float)
    if fx.shape != NODES.shape:
        fx = np.broadcast_to(fx, NODES.shape)
    kronrod = half * float(np.dot(KRONROD_WEIGHTS, fx))
    gauss = half * float(np.dot(GAUSS_WEIGHTS, fx))
    return kronrod, abs(kronrod - gauss)


def integrate_1d(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tol_abs: float = 1e-10,
    *,
    tol_rel: float = 0.0,
    max_evals: int = DEFAULT_MAX_EVALS,
    breakpoints: Sequence[float] = (),
    raise_on_failure: bool = True,
) -> QuadResult:
    """Integrate ``f`` over ``[a, b]`` to an absolute tolerance.

    ``breakpoints`` inside ``(a, b)`` seed the initial partition, which helps
    when the integrand has a known kink.  On budget exhaustion a
    :class:`NonConvergence` is raised, or an unconverged result returned when
    ``raise_on_failure`` is false.
    """
    if b < a:
        raise ValueError(f"integrate_1d needs a <= b, got [{a}, {b}]")
    if a == b:
        return QuadResult(0.0, 0.0, 0, True)

    edges = [a] + sorted(p for p in breakpoints if a < p < b) + [b]
    heap: list[tuple[float, int, float, float, float]] = []
    done: list[tuple[float, float, float]] = []
    evals = 0
    err_total = 0.0
    order = 0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, err = gk15(f, lo, hi)
        evals += 15
        err_total += err
        heapq.heappush(heap, (-err, order, lo, hi, val))
        order += 1

    converged = True
    min_width = 1e-13 * (b - a)
    while heap:
        target = tol_abs
        if tol_rel > 0.0:
            value = math.fsum(item[4] for item in heap) + math.fsum(d[2] for d in done)
            target = max(tol_abs, tol_rel * abs(value))
        if err_total <= target:
            break
        if evals + 30 > max_evals:
            converged = False
            break
        neg_err, _, lo, hi, val = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if hi - lo < min_width or not (lo < mid < hi):
            # too narrow to split: keep its estimate, give up on convergence
            done.append((lo, -neg_err, val))
            converged = False
            if math.fsum(d[1] for d in done) > target:
                break
            continue
        err_total += neg_err
        for lo2, hi2 in ((lo, mid), (mid, hi)):
            val2, err2 = gk15(f, lo2, hi2)
            evals += 15
            err_total += err2
            heapq.heappush(heap, (-err2, order, lo2, hi2, val2))
            order += 1

    pieces = sorted([(item[2], item[4], -item[0]) for item in heap] + [(d[0], d[2], d[1]) for d in done])
    value = math.fsum(p[1] for p in pieces)
    error = math.fsum(p[2] for p in pieces)
    if converged and error > max(tol_abs, tol_rel * abs(value)):
        converged = False
    result = QuadResult(value, error, evals, converged)
    if not converged and raise_on_failure:
        raise NonConvergence(
            f"integral over [{a}, {b}] did not reach tol {tol_abs:g} "
            f"(error estimate {error:.3g} after {evals} evaluations)",
            result,
        )
    return result


def integrate_2d(
    f: Callable[[float, np.ndarray], np.ndarray],
    rect: tuple[float, float, float, float],
    tol_abs: float = 1e-8,
    *,
    max_evals: int = DEFAULT_MAX_EVALS,
    inner_breakpoints: Callable[[float], Sequence[float]] | None = None,
    raise_on_failure: bool = True,
) -> QuadResult:
    """Nested adaptive integration of ``f(x, y)`` over ``[x0, x1] x [y0, y1]``.

    ``f`` receives a scalar ``x`` and an array of ``y`` nodes.  Half the
    tolerance goes to the outer integral, half to the accumulated inner error.
    """
    x0, x1, y0, y1 = rect
    if x1 < x0 or y1 < y0:
        raise ValueError(f"degenerate rectangle {rect}")
    if x0 == x1 or y0 == y1:
        return QuadResult(0.0, 0.0, 0, True)

    width = x1 - x0
    inner_tol = 0.5 * tol_abs / width
    stats = {"evals": 0, "max_err": 0.0, "ok": True}

    def outer(xs):
        out = np.empty(xs.shape)
        for k, x in enumerate(xs):
            bps = inner_breakpoints(x) if inner_breakpoints is not None else ()
            res = integrate_1d(
                lambda y: f(x, y), y0, y1, inner_tol,
                max_evals=max_evals, breakpoints=bps, raise_on_failure=False,
            )
            stats["evals"] += res.evaluations
            stats["max_err"] = max(stats["max_err"], res.error_estimate)
            stats["ok"] = stats["ok"] and res.converged
            out[k] = res.value
        if stats["evals"] > max_evals:
            stats["ok"] = False
        return out

    res = integrate_1d(outer, x0, x1, 0.5 * tol_abs, max_evals=max_evals, raise_on_failure=False)
    error = res.error_estimate + width * stats["max_err"]
    converged = res.converged and stats["ok"] and error <= tol_abs
    result = QuadResult(res.value, error, stats["evals"], converged)
    if not converged and raise_on_failure:
        raise NonConvergence(
            f"2D integral over {rect} did not reach tol {tol_abs:g} (error estimate {error:.3g})",
            result,
        )
    return result


def log_sum_exp(log_terms) -> float:
    """``log(sum(exp(log_terms)))`` without overflow or underflow."""
    terms = np.asarray(log_terms, dtype=float)
    if terms.size == 1:
        return float(terms.reshape(-1)[0])
    return float(logsumexp(terms))


def log_product(log_factors) -> float:
    """Log of a product given the logs of its factors."""
    return math.fsum(np.asarray(log_factors, dtype=float).reshape(-1).tolist())
