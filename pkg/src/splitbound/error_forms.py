"""Exact splitting errors and their nested-integral representations.

For each splitting method the error E(t) = Y(t) - exp(t(A+B)) admits an
exact representation as one or two nested integrals whose integrands are
built from matrix exponentials sandwiching the commutators [A,B], [A,[A,B]]
and [B,[A,B]].  This module evaluates those representations with iterated
Gauss-Legendre quadrature and exposes the defect kernels used to derive
them.  Representation identities:

  LT_INTEGRAL      E_LT  = int_0^t e^{(t-u)S} [ int_0^u e^{(u-x)A} C e^{xA} dx ] e^{uB} du
  LT_SPLIT         E_LT  = leading - correction, with a single O(t^2) integral
                   weighted by u and a double O(t^3) integral carrying [A,[A,B]]
  PLT_INTEGRAL     E_PLT = (swap-defect single integral)/2 - (double integral)/2
  PLT_SPLIT        E_PLT = cubic_a + cubic_b + quartic: two O(t^3) integrals
                   weighted by (t^2 - x^2)/4 and -1/2, plus an O(t^4) tail
  STRANG_INTEGRAL  E_S   = -1/4 double integral with half-flow conjugations
  STRANG_COMPOSED  E_S from two half-step first-order errors (exact algebra)

with S = A + B, C = [A, B].  The quartic tail of PLT_SPLIT has two candidate
exponent readings; the nested reading e^{(x-y)A} is selected by calibration
against the direct error (the outer-variable reading e^{(t-y)A} fails by
~5e-2 on the calibration corpus) and is also what re-deriving the swap
defect's integral form yields.
"""

from __future__ import annotations

import enum

import numpy as np

from .matcore import expm, opnorm2
from .quadrature import DEFAULT_NODES, integrate1
from .splittings import Method, OperatorPair, propagator


class CalibrationError(RuntimeError):
    """No candidate reading of the PLT quartic tail matches the direct error."""


class ErrorForm(str, enum.Enum):
    """Closed enumeration of error evaluators (direct + representations)."""

    DIRECT = "direct"
    LT_INTEGRAL = "lt_integral"
    LT_SPLIT = "lt_split"
    PLT_INTEGRAL = "plt_integral"
    PLT_SPLIT = "plt_split"
    STRANG_INTEGRAL = "strang_integral"
    STRANG_COMPOSED = "strang_composed"


#: Which method's error each representation reproduces.
FORM_METHOD = {
    ErrorForm.LT_INTEGRAL: Method.LT,
    ErrorForm.LT_SPLIT: Method.LT,
    ErrorForm.PLT_INTEGRAL: Method.PLT,
    ErrorForm.PLT_SPLIT: Method.PLT,
    ErrorForm.STRANG_INTEGRAL: Method.STRANG,
    ErrorForm.STRANG_COMPOSED: Method.STRANG,
}


def error_direct(pair: OperatorPair, method, t: float) -> np.ndarray:
    """Y_m(t) - exp(t(A+B)).  Rejects EXACT (identically zero by definition)."""
    m = Method(method)
    if m is Method.EXACT:
        raise ValueError("error of the exact propagator is identically zero; "
                         "pass a splitting method")
    return propagator(pair, m, t) - expm(t * pair.ab_sum)


def _check_t(t: float) -> None:
    if t < 0:
        raise ValueError("t must be >= 0")


# ---------------------------------------------------------------------------
# defect kernels


def conjugation(pair: OperatorPair, q, xi: float) -> np.ndarray:
    """exp(-xi A) q exp(xi A): q dragged along the backward flow of A."""
    q = _as_square(pair, q)
    return expm(-xi * pair.a) @ q @ expm(xi * pair.a)


def swap_defect(pair: OperatorPair, q, tau: float) -> np.ndarray:
    """exp(tau A) q exp(tau B) - exp(tau B) q exp(tau A)."""
    q = _as_square(pair, q)
    ea, eb = expm(tau * pair.a), expm(tau * pair.b)
    return ea @ q @ eb - eb @ q @ ea


def half_conjugation_defect(pair: OperatorPair, q, xi: float) -> np.ndarray:
    """exp(-xi A/2) q exp(xi A/2) - exp(xi B) q exp(-xi B)."""
    q = _as_square(pair, q)
    eha = expm(-0.5 * xi * pair.a)
    ehb = expm(xi * pair.b)
    return eha @ q @ expm(0.5 * xi * pair.a) - ehb @ q @ expm(-xi * pair.b)


def _as_square(pair: OperatorPair, q) -> np.ndarray:
    q = np.asarray(q, dtype=np.complex128)
    if q.shape != pair.a.shape:
        raise ValueError(f"dimension mismatch: {q.shape} vs {pair.a.shape}")
    return q


# ---------------------------------------------------------------------------
# Lie-Trotter


def lt_error_integral(pair: OperatorPair, t: float,
                      nodes: int = DEFAULT_NODES) -> np.ndarray:
    """Double-integral representation of the first-order splitting error."""
    _check_t(t)
    a, b, s, c = pair.a, pair.b, pair.ab_sum, pair.comm

    def outer(tau):
        inner = integrate1(lambda xi: expm((tau - xi) * a) @ c @ expm(xi * a),
                           tau, nodes)
        return expm((t - tau) * s) @ inner @ expm(tau * b)

    return integrate1(outer, t, nodes)


def lt_error_split(pair: OperatorPair, t: float,
                   nodes: int = DEFAULT_NODES) -> tuple[np.ndarray, np.ndarray]:
    """(leading, correction) with E_LT = leading - correction.

    leading is the single integral weighted by tau (O(t^2)); correction is
    the double integral carrying [A,[A,B]] (O(t^3)).
    """
    _check_t(t)
    a, b, s = pair.a, pair.b, pair.ab_sum
    c, ca = pair.comm, pair.comm_a

    leading = integrate1(
        lambda tau: tau * (expm((t - tau) * s) @ expm(tau * a) @ c @ expm(tau * b)),
        t, nodes)

    def corr_outer(tau):
        inner = integrate1(
            lambda eta: (tau - eta) * (expm((tau - eta) * a) @ ca @ expm(eta * a)),
            tau, nodes)
        return expm((t - tau) * s) @ inner @ expm(tau * b)

    correction = integrate1(corr_outer, t, nodes)
    return leading, correction


# ---------------------------------------------------------------------------
# palindromic Lie-Trotter


def plt_error_integral(pair: OperatorPair, t: float,
                       nodes: int = DEFAULT_NODES) -> np.ndarray:
    """Two-integral representation of the palindromic splitting error."""
    _check_t(t)
    s = pair.ab_sum

    single = integrate1(
        lambda tau: tau * (expm((t - tau) * s) @ swap_defect(pair, pair.comm, tau)),
        t, nodes)
    double = _plt_second_integral(pair, t, nodes)
    return 0.5 * single - 0.5 * double


def _plt_second_integral(pair: OperatorPair, t: float, nodes: int) -> np.ndarray:
    """The shared double integral of both palindromic representations."""
    a, b, s = pair.a, pair.b, pair.ab_sum
    ca, cb = pair.comm_a, pair.comm_b

    def outer(tau):
        etb, eta_ = expm(tau * b), expm(tau * a)

        def inner(xi):
            left = expm((tau - xi) * a) @ ca @ expm(xi * a) @ etb
            right = expm((tau - xi) * b) @ cb @ expm(xi * b) @ eta_
            return (tau - xi) * (left - right)

        return expm((t - tau) * s) @ integrate1(inner, tau, nodes)

    return integrate1(outer, t, nodes)


#: Candidate exponent readings for the quartic tail (see module docstring).
TAIL_READINGS = ("nested", "outer")

_tail_reading: str | None = None


def _plt_quartic_tail(pair: OperatorPair, t: float, nodes: int,
                      reading: str) -> np.ndarray:
    a, b, s, c = pair.a, pair.b, pair.ab_sum, pair.comm

    def outer(xi):
        if reading == "nested":
            part_a = integrate1(
                lambda eta: expm((xi - eta) * a) @ c @ expm(eta * a), xi, nodes)
        elif reading == "outer":
            part_a = integrate1(
                lambda eta: expm((t - eta) * a) @ c @ expm(eta * a), xi, nodes)
        else:
            raise ValueError(f"unknown tail reading: {reading!r}")
        part_b = integrate1(
            lambda eta: expm((xi - eta) * b) @ c @ expm(eta * b), xi, nodes)
        body = part_a @ c @ expm(xi * b) + part_b @ c @ expm(xi * a)
        return (t * t - xi * xi) * (expm((t - xi) * s) @ body)

    return 0.25 * integrate1(outer, t, nodes)


def _calibration_pairs() -> list[OperatorPair]:
    from .problems import ProblemSpec, generate

    specs = (
        ProblemSpec(kind="nilpotent_2x2", scale=1.0),
        ProblemSpec(kind="random_general", dim=3, seed=11, scale=1.0),
        ProblemSpec(kind="random_general", dim=4, seed=12, scale=1.5),
        ProblemSpec(kind="random_hermitian", dim=3, seed=13, scale=1.0),
        ProblemSpec(kind="random_skew", dim=4, seed=14, scale=1.0),
    )
    return [generate(sp) for sp in specs]


def resolve_tail_reading() -> str:
    """Pick the quartic-tail reading that reproduces the direct error.

    Runs once per process over a fixed 5-pair corpus at t = 0.3; a reading
    qualifies when the full three-part sum matches error_direct(PLT) to
    1e-8 on every pair.  Raises CalibrationError when no reading qualifies.
    """
    global _tail_reading
    if _tail_reading is not None:
        return _tail_reading
    pairs = _calibration_pairs()
    t = 0.3
    worst = {}
    for reading in TAIL_READINGS:
        devs = []
        for p in pairs:
            parts = _plt_split_parts(p, t, DEFAULT_NODES, reading)
            approx = parts[0] + parts[1] + parts[2]
            devs.append(opnorm2(approx - error_direct(p, Method.PLT, t)))
        worst[reading] = max(devs)
    viable = [r for r in TAIL_READINGS if worst[r] < 1e-8]
    if not viable:
        raise CalibrationError(
            f"no quartic-tail reading reproduces the direct error: {worst}")
    _tail_reading = min(viable, key=lambda r: worst[r])
    return _tail_reading


def _plt_split_parts(pair: OperatorPair, t: float, nodes: int,
                     reading: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    a, b, s = pair.a, pair.b, pair.ab_sum
    ca, cb = pair.comm_a, pair.comm_b

    def cubic_a_outer(xi):
        body = expm(xi * b) @ ca @ expm(xi * a) - expm(xi * a) @ cb @ expm(xi * b)
        return (t * t - xi * xi) * (expm((t - xi) * s) @ body)

    cubic_a = 0.25 * integrate1(cubic_a_outer, t, nodes)
    cubic_b = -0.5 * _plt_second_integral(pair, t, nodes)
    quartic = _plt_quartic_tail(pair, t, nodes, reading)
    return cubic_a, cubic_b, quartic


def plt_error_split(pair: OperatorPair, t: float, nodes: int = DEFAULT_NODES
                    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(cubic_a, cubic_b, quartic): signed parts summing to E_PLT.

    cubic_a and cubic_b are O(t^3), quartic is O(t^4).  The quartic tail
    uses the calibrated exponent reading (see resolve_tail_reading).
    """
    _check_t(t)
    return _plt_split_parts(pair, t, nodes, resolve_tail_reading())


# ---------------------------------------------------------------------------
# Strang


def strang_error_integral(pair: OperatorPair, t: float,
                          nodes: int = DEFAULT_NODES) -> np.ndarray:
    """Double-integral representation of the symmetric splitting error."""
    _check_t(t)
    a, b, s = pair.a, pair.b, pair.ab_sum
    ca, cb = pair.comm_a, pair.comm_b

    def outer(tau):
        def inner(eta):
            left = expm(-0.5 * eta * a) @ ca @ expm(0.5 * eta * a)
            right = expm(eta * b) @ cb @ expm(-eta * b)
            return (tau - eta) * (left + 2.0 * right)

        half = expm(0.5 * tau * a)
        mid = integrate1(inner, tau, nodes)
        return expm((t - tau) * s) @ half @ mid @ expm(tau * b) @ half

    return -0.25 * integrate1(outer, t, nodes)


def strang_error_composed(pair: OperatorPair, t: float) -> np.ndarray:
    """E_S assembled from the two half-step first-order errors (exact).

    E_S(t) = E_LT(A,B;t/2) e^{(t/2)S} + e^{(t/2)S} E_LT(B,A;t/2)
             + E_LT(A,B;t/2) E_LT(B,A;t/2).
    """
    _check_t(t)
    h = 0.5 * t
    e_fwd = error_direct(pair, Method.LT, h)
    e_rev = error_direct(pair, Method.LT_REV, h)
    half_exact = expm(h * pair.ab_sum)
    return e_fwd @ half_exact + half_exact @ e_rev + e_fwd @ e_rev


# ---------------------------------------------------------------------------
# dispatch


def evaluate_form(form, pair: OperatorPair, t: float,
                  nodes: int = DEFAULT_NODES, method=None) -> np.ndarray:
    """Evaluate any ErrorForm as a single matrix (multi-part forms summed).

    method is only consulted for the DIRECT form; every representation knows
    the method whose error it reproduces (FORM_METHOD).
    """
    form = ErrorForm(form)
    if form is ErrorForm.DIRECT:
        if method is None:
            raise ValueError("the direct form needs an explicit method")
        return error_direct(pair, method, t)
    if form is ErrorForm.LT_INTEGRAL:
        return lt_error_integral(pair, t, nodes)
    if form is ErrorForm.LT_SPLIT:
        leading, correction = lt_error_split(pair, t, nodes)
        return leading - correction
    if form is ErrorForm.PLT_INTEGRAL:
        return plt_error_integral(pair, t, nodes)
    if form is ErrorForm.PLT_SPLIT:
        parts = plt_error_split(pair, t, nodes)
        return parts[0] + parts[1] + parts[2]
    if form is ErrorForm.STRANG_INTEGRAL:
        return strang_error_integral(pair, t, nodes)
    if form is ErrorForm.STRANG_COMPOSED:
        return strang_error_composed(pair, t)
    raise ValueError(f"unknown form: {form!r}")
