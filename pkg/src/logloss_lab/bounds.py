"""Regret upper bounds as functions of an entropy curve.

Two bounds are compared: the single-scale bound 4*n*gamma + c*H(gamma)
with c = (2 - log 2)/(log 3 - log 2), and the earlier truncation-based
bound with free parameters (gamma, delta, alpha) combining a 4*n*alpha/delta
term, entropy integrals, and a 3*n*delta*log(1/delta) truncation penalty.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ESTIMATION_CONSTANT
from .cover import EntropyCurve

__all__ = [
    "BoundParams",
    "RateReport",
    "golden_section",
    "self_concordance_bound",
    "truncation_bound",
    "rate_exponents",
    "fit_rate_exponent",
]

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_INV_PHI_SQ = (3.0 - math.sqrt(5.0)) / 2.0


@dataclass
class BoundParams:
    gamma: float
    delta: float
    alpha: float

    def __post_init__(self):
        if not (self.gamma >= self.alpha > 0):
            raise ValueError("need gamma >= alpha > 0")
        if not 0 < self.delta <= 0.5:
            raise ValueError("delta must lie in (0, 1/2]")


@dataclass
class RateReport:
    p: float
    new_exponent: float
    old_exponent: float
    ratio_exponent: float
    new_params: str
    old_params: str


def golden_section(f, lo: float, hi: float, tol: float = 1e-8) -> float:
    """Argmin of a unimodal f on [lo, hi]."""
    dist = hi - lo
    if dist <= tol:
        return (lo + hi) / 2.0
    c = lo + _INV_PHI_SQ * dist
    d = lo + _INV_PHI * dist
    yc, yd = f(c), f(d)
    n_iter = int(math.ceil(math.log(tol / dist) / math.log(_INV_PHI)))
    for _ in range(n_iter):
        if yc < yd:
            hi, d, yd = d, c, yc
            dist *= _INV_PHI
            c = lo + _INV_PHI_SQ * dist
            yc = f(c)
        else:
            lo, c, yc = c, d, yd
            dist *= _INV_PHI
            d = lo + _INV_PHI * dist
            yd = f(d)
    return (lo + hi) / 2.0


def self_concordance_bound(H: EntropyCurve, n: int):
    """Infimum over gamma of 4*n*gamma + c*H(gamma); returns (value,
    gamma_star).  The bracket extends below 1/n^2 while the lower endpoint
    keeps winning, so flat curves drive the value to zero."""
    if n < 1:
        raise ValueError("n must be >= 1")
    c = ESTIMATION_CONSTANT

    def obj_log(lg):
        g = math.exp(lg)
        return 4.0 * n * g + c * H.value(g)

    lo, hi = math.log(1.0 / n**2), 0.0
    while True:
        lg_star = golden_section(obj_log, lo, hi, tol=1e-10)
        interior = lg_star > lo + 1e-6
        if interior or lo < math.log(1e-30):
            break
        hi = lo
        lo -= math.log(100.0)
    best, best_lg = obj_log(lg_star), lg_star
    for cand in (lo, hi):
        val = obj_log(cand)
        if val < best:
            best, best_lg = val, cand
    return best, math.exp(best_lg)


def _truncation_objective(H: EntropyCurve, n: int):
    def obj(gamma, delta, alpha):
        if not (gamma >= alpha > 0) or not (0 < delta <= 0.5):
            return math.inf
        try:
            i_sqrt = H.integral_sqrt(alpha, gamma)
            i_full = H.integral(alpha, gamma)
        except (OverflowError, ValueError):
            return math.inf
        if not (math.isfinite(i_sqrt) and math.isfinite(i_full)):
            return math.inf
        return (
            4.0 * n * alpha / delta
            + 30.0 * math.sqrt(2.0 * n / delta) * i_sqrt
            + (8.0 / delta) * i_full
            + H.value(gamma)
            + 3.0 * n * delta * math.log(1.0 / delta)
        )

    return obj


def _warm_starts(H: EntropyCurve, n: int, rng):
    starts = []
    if H.kind == "power" and H.C > 0:
        p = H.p
        alpha = n ** (-1.0 / p)
        if p <= 1:
            starts.append((n ** (-1.0 / (p + 1)), n ** (-1.0 / (p + 1)), alpha))
        elif p <= 2:
            starts.append(
                (
                    n ** (-(2 * p + 1) / (2 * p * (2 + p))),
                    n ** (-1.0 / (2 * p)),
                    alpha,
                )
            )
        else:
            starts.append((1.0, n ** (-1.0 / (2 * p)), alpha))
    starts.append((n ** (-0.5), n ** (-0.5), 1.0 / n))
    for _ in range(3):
        lg, ld, la = rng.uniform(math.log(1.0 / n), 0.0, size=3)
        starts.append(
            (math.exp(lg), 0.5 * math.exp(ld), min(math.exp(la), math.exp(lg)))
        )
    out = []
    for g, d, a in starts:
        out.append((min(g, 1.0), min(max(d, 1e-12), 0.5), min(a, g)))
    return out


def truncation_bound(H: EntropyCurve, n: int, seed: int = 0):
    """Numerically minimize the truncation-based bound over (gamma, delta,
    alpha) by log-space coordinate descent from analytic warm starts plus
    random restarts.  Returns (value, BoundParams)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    obj = _truncation_objective(H, n)
    rng = np.random.default_rng(seed)
    lo = math.log(1e-12)
    best_val, best_params = math.inf, None
    for g0, d0, a0 in _warm_starts(H, n, rng):
        lg, ld, la = math.log(g0), math.log(d0), math.log(a0)
        val = obj(g0, d0, a0)
        argmin = (lg, ld, la)
        for _ in range(12):
            lg = golden_section(
                lambda x: obj(math.exp(x), math.exp(ld), math.exp(la)),
                max(la, lo),
                0.0,
                tol=1e-9,
            )
            ld = golden_section(
                lambda x: obj(math.exp(lg), math.exp(x), math.exp(la)),
                lo,
                math.log(0.5),
                tol=1e-9,
            )
            la = golden_section(
                lambda x: obj(math.exp(lg), math.exp(ld), math.exp(x)),
                lo,
                lg,
                tol=1e-9,
            )
            new_val = obj(math.exp(lg), math.exp(ld), math.exp(la))
            if new_val >= val - 1e-12 * max(1.0, abs(val)):
                if new_val < val:
                    val, argmin = new_val, (lg, ld, la)
                break
            val, argmin = new_val, (lg, ld, la)
        if val < best_val:
            best_val = val
            best_params = BoundParams(
                gamma=math.exp(argmin[0]),
                delta=math.exp(argmin[1]),
                alpha=math.exp(argmin[2]),
            )
    return best_val, best_params


def rate_exponents(p: float) -> RateReport:
    """Polynomial-in-n exponents of both bounds for entropy gamma^-p."""
    if p <= 0:
        raise ValueError("p must be positive")
    new = p / (p + 1.0)
    if p <= 1.0:
        old = p / (p + 1.0)
        ratio = 0.0
        old_params = (
            f"gamma = delta = n^(-1/{p + 1:g}), alpha = n^(-1/{p:g})"
        )
    else:
        old = (2.0 * p - 1.0) / (2.0 * p)
        ratio = (p - 1.0) / (2.0 * p * (p + 1.0))
        if p < 2.0:
            old_params = (
                f"gamma = n^(-{2 * p + 1:g}/{2 * p * (2 + p):g}), "
                f"delta = n^(-1/{2 * p:g}), alpha = n^(-1/{p:g})"
            )
        else:
            old_params = (
                f"gamma = 1, delta = n^(-1/{2 * p:g}), alpha = n^(-1/{p:g})"
            )
    return RateReport(
        p=p,
        new_exponent=new,
        old_exponent=old,
        ratio_exponent=ratio,
        new_params=f"gamma = n^(-1/{p + 1:g})",
        old_params=old_params,
    )


def fit_rate_exponent(bound: str, C: float, p: float, n_grid) -> float:
    """Least-squares slope of log(bound value) against log(n)."""
    n_grid = [int(n) for n in n_grid]
    if len(n_grid) < 6:
        raise ValueError("need at least 6 grid points")
    if len(set(n_grid)) != len(n_grid):
        raise ValueError("degenerate grid")
    H = EntropyCurve.power(C, p)
    vals = []
    for n in n_grid:
        if bound == "self_concordance":
            v, _ = self_concordance_bound(H, n)
        elif bound == "truncation":
            v, _ = truncation_bound(H, n)
        else:
            raise ValueError(f"unknown bound: {bound!r}")
        vals.append(v)
    return float(np.polyfit(np.log(n_grid), np.log(vals), 1)[0])
