"""Logarithmic-norm error bounds for the three splittings.

Every bound depends on the log-norms only through
omega = mu[A] + mu[B] - mu[A+B] and multiplies commutator norms
c1 = ||[A,B]||, c2 = ||[A,[A,B]]||, c3 = ||[B,[A,B]]||:

  LT      e^{t mu[A+B]} (1-(1-x)e^x)/omega^2 * c1
  PLT     e^{t mu[A+B]} (1+x/2)[(1+x/2)e^{-x}-(1-x/2)]/omega^3 * (c2+c3)
            + 3/omega^4 [(1+x+x^2/3)e^{-x}-(1-x^2/6)] * c1^2
  STRANG  1/4 e^{t mu[A+B]} [(1-x+x^2/2)e^x-1]/omega^3 * (c2+2 c3)

with x = omega t.  The bracket numerators vanish to O(x^2)-O(x^4), so naive
floating evaluation loses up to nine digits near x = 0.  Two independent
evaluation paths handle this:

* closed_form (|x| >= 1e-2): the brackets rearranged exactly through the
  exponential kernels phi_k(u) = sum_j u^j / (j+k)!, which removes every
  catastrophic subtraction;
* series_fallback (|x| < 1e-2): a 12-term truncated Taylor expansion of each
  bracket in x, whose x = 0 value is exactly the omega -> 0 limit
  (t^2 c1 / 2,  t^3 (c2+c3)/12 + t^4 c1^2 / 8,  t^3 (c2+2c3)/24).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .error_forms import error_direct
from .matcore import opnorm2
from .splittings import Method, OperatorPair

#: |omega * t| below this uses the series path.
SERIES_THRESHOLD = 1e-2

_SERIES_TERMS = 12
_PHI_SERIES_CUTOFF = 2.5
_PHI_SERIES_TERMS = 27

# bracket Taylor coefficients in x (leading term first)
_LT_COEF = [(j + 1) / math.factorial(j + 2) for j in range(_SERIES_TERMS)]
_PLT1_COEF = [(-1) ** m * (m + 1) / (2 * math.factorial(m + 3))
              for m in range(_SERIES_TERMS)]
_PLT2_COEF = [(-1) ** m * (m + 1) * (m + 3) / (3 * math.factorial(m + 4))
              for m in range(_SERIES_TERMS)]
_STRANG_COEF = [(m + 1) * (m + 2) / (2 * math.factorial(m + 3))
                for m in range(_SERIES_TERMS)]


@dataclass(frozen=True)
class BoundInputs:
    """Scalar ingredients of one bound evaluation (2-norms throughout)."""

    t: float
    mu_sum: float
    omega: float
    c1: float
    c2: float
    c3: float

    def __post_init__(self):
        for name in ("c1", "c2", "c3"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if not (math.isfinite(self.omega) and math.isfinite(self.mu_sum)):
            raise ValueError("omega and mu_sum must be finite")

    @classmethod
    def from_pair(cls, pair: OperatorPair, t: float) -> "BoundInputs":
        return cls(t=t, mu_sum=pair.mu_sum, omega=pair.omega,
                   c1=opnorm2(pair.comm), c2=opnorm2(pair.comm_a),
                   c3=opnorm2(pair.comm_b))


@dataclass(frozen=True)
class BoundValue:
    value: float
    evaluation_path: str  # "closed_form" | "series_fallback"


def _phi(k: int, u: float) -> float:
    """phi_k(u) = (e^u - sum_{j<k} u^j/j!) / u^k, accurately for all u."""
    if abs(u) < _PHI_SERIES_CUTOFF:
        acc = 0.0
        for j in range(_PHI_SERIES_TERMS - 1, -1, -1):
            acc = acc * u + 1.0 / math.factorial(j + k)
        return acc
    head = 0.0
    for j in range(k - 1, -1, -1):
        head = head * u + 1.0 / math.factorial(j)
    return (math.exp(u) - head) / u ** k


def _poly(coefs, x: float) -> float:
    acc = 0.0
    for c in reversed(coefs):
        acc = acc * x + c
    return acc


def _select_path(x: float, path: str | None) -> bool:
    """True for the series branch.  path forces a branch (seam testing)."""
    if path is None:
        return abs(x) < SERIES_THRESHOLD
    if path == "series_fallback":
        return True
    if path == "closed_form":
        if x == 0.0:
            raise ValueError("closed form is singular at omega = 0")
        return False
    raise ValueError(f"unknown evaluation path: {path!r}")


def _check_inputs(inputs: BoundInputs) -> float:
    if inputs.t < 0:
        raise ValueError("t must be >= 0")
    return inputs.omega * inputs.t


def bound_lt(inputs: BoundInputs, path: str | None = None) -> BoundValue:
    """First-order splitting bound; omega -> 0 limit is t^2 c1 / 2."""
    x = _check_inputs(inputs)
    pre = math.exp(inputs.t * inputs.mu_sum) * inputs.t ** 2 * inputs.c1
    if _select_path(x, path):
        return BoundValue(pre * _poly(_LT_COEF, x), "series_fallback")
    bracket = 1.0 - (1.0 - x) * _phi(2, x)
    return BoundValue(pre * bracket, "closed_form")


def bound_plt(inputs: BoundInputs, path: str | None = None) -> BoundValue:
    """Palindromic bound; omega -> 0 limit is t^3(c2+c3)/12 + t^4 c1^2/8."""
    x = _check_inputs(inputs)
    t = inputs.t
    pre1 = math.exp(t * inputs.mu_sum) * (1.0 + 0.5 * x) * t ** 3 \
        * (inputs.c2 + inputs.c3)
    pre2 = 3.0 * t ** 4 * inputs.c1 ** 2
    if _select_path(x, path):
        value = pre1 * _poly(_PLT1_COEF, x) + pre2 * _poly(_PLT2_COEF, x)
        return BoundValue(value, "series_fallback")
    u = -x
    bracket1 = 0.25 - (1.0 - 0.5 * u) * _phi(3, u)
    bracket2 = _phi(4, u) * (1.0 - u + u * u / 3.0) + u / 18.0
    return BoundValue(pre1 * bracket1 + pre2 * bracket2, "closed_form")


def bound_strang(inputs: BoundInputs, path: str | None = None) -> BoundValue:
    """Symmetric-splitting bound; omega -> 0 limit is t^3 (c2 + 2 c3)/24."""
    x = _check_inputs(inputs)
    pre = 0.25 * math.exp(inputs.t * inputs.mu_sum) * inputs.t ** 3 \
        * (inputs.c2 + 2.0 * inputs.c3)
    if _select_path(x, path):
        return BoundValue(pre * _poly(_STRANG_COEF, x), "series_fallback")
    bracket = _phi(3, x) * (1.0 - x + 0.5 * x * x) + 0.25 * x
    return BoundValue(pre * bracket, "closed_form")


_BOUND_OF_METHOD = {
    Method.LT: bound_lt,
    Method.PLT: bound_plt,
    Method.STRANG: bound_strang,
}


@dataclass(frozen=True)
class BoundReport:
    measured: float
    bound: float
    satisfied: bool
    slack_ratio: float
    evaluation_path: str


#: absolute allowance for the rounding floor of the measured error itself
#: (the propagator difference carries ~1e-15 of expm/product noise, so a
#: commuting pair measures ~1e-16 against an exactly-zero bound)
MEASUREMENT_FLOOR = 1e-13


def check_bound(pair: OperatorPair, method, t: float) -> BoundReport:
    """Measured ||E_m(t)|| against the matching bound from the pair cache.

    satisfied means measured <= bound * (1 + 1e-10) + MEASUREMENT_FLOOR;
    slack_ratio is measured/bound (0 when both vanish, inf when only the
    bound does).
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    m = Method(method)
    if m not in _BOUND_OF_METHOD:
        raise ValueError(f"no bound for method {m.value}; use LT, PLT or STRANG")
    measured = opnorm2(error_direct(pair, m, t))
    bv = _BOUND_OF_METHOD[m](BoundInputs.from_pair(pair, t))
    satisfied = measured <= bv.value * (1.0 + 1e-10) + MEASUREMENT_FLOOR
    if bv.value > 0:
        slack = measured / bv.value
    else:
        slack = 0.0 if measured == 0.0 else math.inf
    return BoundReport(measured=measured, bound=bv.value, satisfied=satisfied,
                       slack_ratio=slack, evaluation_path=bv.evaluation_path)
