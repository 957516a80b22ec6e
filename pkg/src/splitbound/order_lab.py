"""Empirical convergence-order and leading-coefficient estimation.

Local errors are sampled on a halving grid t_k = t0 * 2^-k; a least-squares
line through (log2 t_k, log2 ||E||) estimates the local order + 1, and
Richardson extrapolation of E(t)/t^q recovers the leading coefficient
matrix (q = 2 for the first-order products, 3 for the rest):

    LT      ->  [A,B]/2
    LT_REV  -> -[A,B]/2
    PLT     ->  [A-B,[A,B]]/12
    STRANG  -> -[A+2B,[A,B]]/24   (reversed: +[B+2A,[A,B]]/24)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .error_forms import error_direct
from .matcore import commutator, opnorm2
from .splittings import Method, OperatorPair

#: errors below this are treated as rounding noise, not signal
NOISE_FLOOR = 1e-13

_RICHARDSON_DEPTH = 4

#: expected log-log slope of the local error (local order + 1)
EXPECTED_SLOPE = {
    Method.LT: 2.0,
    Method.LT_REV: 2.0,
    Method.PLT: 3.0,
    Method.STRANG: 3.0,
    Method.STRANG_REV: 3.0,
}


class NoiseFloorError(ValueError):
    """An error sample sits below the double-precision noise floor."""


class ExtrapolationError(RuntimeError):
    """The Richardson table's corrections grow instead of shrinking."""


@dataclass(frozen=True)
class OrderFit:
    slope: float
    intercept: float
    residual: float          # max |log2-data - fit line|
    k_range: tuple[int, int]


def fit_local_order(pair: OperatorPair, method, t0: float,
                    k_min: int, k_max: int) -> OrderFit:
    """Least-squares slope of log2 ||E(t0 * 2^-k)|| against log2 t."""
    if k_max - k_min < 3:
        raise ValueError("need k_max - k_min >= 3 (at least 4 points)")
    m = Method(method)
    ks = np.arange(k_min, k_max + 1)
    ts = t0 * 2.0 ** (-ks)
    errs = np.array([opnorm2(error_direct(pair, m, t)) for t in ts])
    if np.any(errs < NOISE_FLOOR):
        raise NoiseFloorError(
            f"error norm below {NOISE_FLOOR:g} on the grid; increase t0 "
            "(the fit would measure rounding noise)")
    lx = np.log2(ts)
    ly = np.log2(errs)
    slope, intercept = np.polyfit(lx, ly, 1)
    residual = float(np.max(np.abs(ly - (slope * lx + intercept))))
    return OrderFit(slope=float(slope), intercept=float(intercept),
                    residual=residual, k_range=(k_min, k_max))


def leading_exponent(method) -> int:
    """Power q with E(t) = L t^q + O(t^(q+1))."""
    m = Method(method)
    if m in (Method.LT, Method.LT_REV):
        return 2
    if m in (Method.PLT, Method.STRANG, Method.STRANG_REV):
        return 3
    raise ValueError(f"no leading exponent for method {m.value}")


def leading_term_coefficient(pair: OperatorPair, method) -> np.ndarray:
    """The exact leading coefficient L built from cached commutators."""
    m = Method(method)
    c = pair.comm
    if m is Method.LT:
        return 0.5 * c
    if m is Method.LT_REV:
        return -0.5 * c
    if m is Method.PLT:
        return commutator(pair.a - pair.b, c) / 12.0
    if m is Method.STRANG:
        return -commutator(pair.a + 2.0 * pair.b, c) / 24.0
    if m is Method.STRANG_REV:
        return commutator(pair.b + 2.0 * pair.a, c) / 24.0
    raise ValueError(f"no leading term for method {m.value}")


def extract_leading(pair: OperatorPair, method, t0: float) -> np.ndarray:
    """Richardson-extrapolated limit of E(t)/t^q over t = t0 * 2^-k, k = 0..4.

    Assumes an expansion in integer powers of t past the leading term.
    Raises ExtrapolationError if the table's diagonal corrections grow by
    more than 10x while still being far from converged.
    """
    if t0 > 0.5:
        raise ValueError("t0 must be <= 0.5 for the extraction grid")
    if t0 <= 0:
        raise ValueError("t0 must be > 0")
    m = Method(method)
    q = leading_exponent(m)
    table = []
    for k in range(_RICHARDSON_DEPTH + 1):
        t = t0 * 2.0 ** (-k)
        table.append(error_direct(pair, m, t) / t ** q)
    diag_steps = []
    for j in range(1, _RICHARDSON_DEPTH + 1):
        factor = 2.0 ** j - 1.0
        for i in range(_RICHARDSON_DEPTH, j - 1, -1):
            table[i] = table[i] + (table[i] - table[i - 1]) / factor
        diag_steps.append(opnorm2(table[j] - table[j - 1]))
    if diag_steps[-1] > 1e-8 and diag_steps[-1] > 10.0 * diag_steps[-2]:
        raise ExtrapolationError(
            f"divergent extrapolation table: corrections {diag_steps}")
    return table[_RICHARDSON_DEPTH]
