"""Gauss-Legendre quadrature for matrix-valued nested integrals.

Handles single, double and triple iterated integrals over the simplex-like
domains 0 <= eta <= xi <= tau <= t, with each inner interval affinely mapped
to [0, outer variable].  Nodes and weights come from Newton iteration on the
Legendre recurrence (no tables) and are cached per node count.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np

from .matcore import opnorm2

DEFAULT_NODES = 24
MAX_NODES = 192

_NODE_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}
_CACHE_LOCK = threading.Lock()


class NonFiniteIntegrandError(ValueError):
    """Raised when the integrand returns a NaN/Inf value; names the node."""


class QuadratureConvergenceError(RuntimeError):
    """refine_until hit the node cap without meeting the tolerance.

    Carries the last two results so the caller can inspect the stall.
    """

    def __init__(self, last_value, previous_value, delta, nodes_per_level):
        super().__init__(
            f"quadrature not converged: delta={delta:.3e} at "
            f"{nodes_per_level} nodes per level (cap {MAX_NODES})"
        )
        self.last_value = last_value
        self.previous_value = previous_value
        self.delta = delta
        self.nodes_per_level = nodes_per_level


def _newton_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights of the n-point Gauss-Legendre rule on [-1, 1]."""
    k = np.arange(n)
    x = np.cos(np.pi * (4.0 * k + 3.0) / (4.0 * n + 2.0))
    dp = np.ones_like(x)
    for _ in range(100):
        p_prev = np.ones_like(x)
        p = x.copy()
        for m in range(2, n + 1):
            p_prev, p = p, ((2.0 * m - 1.0) * x * p - (m - 1.0) * p_prev) / m
        if n == 1:
            p_prev, p = np.ones_like(x), x.copy()
        dp = n * (x * p - p_prev) / (x * x - 1.0)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) < 1e-15:
            # one polishing pass already happened; recompute dp at the root
            p_prev = np.ones_like(x)
            p = x.copy()
            for m in range(2, n + 1):
                p_prev, p = p, ((2.0 * m - 1.0) * x * p - (m - 1.0) * p_prev) / m
            if n == 1:
                p_prev, p = np.ones_like(x), x.copy()
            dp = n * (x * p - p_prev) / (x * x - 1.0)
            break
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    order = np.argsort(x)
    return x[order], w[order]


def legendre_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Cached n-point Gauss-Legendre nodes/weights on [-1, 1]."""
    if n < 1:
        raise ValueError("node count must be >= 1")
    got = _NODE_CACHE.get(n)
    if got is not None:
        return got
    with _CACHE_LOCK:
        got = _NODE_CACHE.get(n)
        if got is None:
            x, w = _newton_legendre(n)
            x.setflags(write=False)
            w.setflags(write=False)
            got = (x, w)
            _NODE_CACHE[n] = got
    return got


def _mapped(n: int, upper: float) -> tuple[np.ndarray, np.ndarray]:
    """Rule mapped from [-1, 1] to [0, upper]."""
    x, w = legendre_rule(n)
    return upper * (x + 1.0) / 2.0, w * (upper / 2.0)


def _checked(value, where: str):
    v = np.asarray(value)
    if not np.all(np.isfinite(v)):
        raise NonFiniteIntegrandError(f"non-finite integrand value at {where}")
    return v


def integrate1(f, t: float, n: int = DEFAULT_NODES):
    """Gauss-Legendre approximation of the integral of f over [0, t]."""
    if t < 0:
        raise ValueError("t must be >= 0")
    if t == 0.0:
        return 0.0 * np.asarray(f(0.0))
    xs, ws = _mapped(n, t)
    total = None
    for tau, w in zip(xs, ws):
        v = _checked(f(tau), f"tau={tau!r}")
        total = w * v if total is None else total + w * v
    return total


def integrate2(f, t: float, n: int = DEFAULT_NODES):
    """Iterated rule for f(tau, xi) over 0 <= xi <= tau <= t."""
    if t < 0:
        raise ValueError("t must be >= 0")
    if t == 0.0:
        return 0.0 * np.asarray(f(0.0, 0.0))
    xs, ws = _mapped(n, t)
    total = None
    for tau, w1 in zip(xs, ws):
        ys, vs = _mapped(n, tau)
        for xi, w2 in zip(ys, vs):
            v = _checked(f(tau, xi), f"tau={tau!r}, xi={xi!r}")
            contrib = (w1 * w2) * v
            total = contrib if total is None else total + contrib
    return total


def integrate3(f, t: float, n: int = DEFAULT_NODES):
    """Iterated rule for f(tau, xi, eta) over 0 <= eta <= xi <= tau <= t."""
    if t < 0:
        raise ValueError("t must be >= 0")
    if t == 0.0:
        return 0.0 * np.asarray(f(0.0, 0.0, 0.0))
    xs, ws = _mapped(n, t)
    total = None
    for tau, w1 in zip(xs, ws):
        ys, vs = _mapped(n, tau)
        for xi, w2 in zip(ys, vs):
            zs, us = _mapped(n, xi)
            for eta, w3 in zip(zs, us):
                v = _checked(f(tau, xi, eta), f"tau={tau!r}, xi={xi!r}, eta={eta!r}")
                contrib = (w1 * w2 * w3) * v
                total = contrib if total is None else total + contrib
    return total


@dataclass(frozen=True)
class QuadratureRule:
    """An iterated Gauss-Legendre rule: n nodes per level, 1-3 levels."""

    nodes_per_level: int = DEFAULT_NODES
    levels: int = 1

    def __post_init__(self):
        if self.nodes_per_level < 1:
            raise ValueError("nodes_per_level must be >= 1")
        if self.levels not in (1, 2, 3):
            raise ValueError("levels must be 1, 2 or 3")

    def apply(self, f, t: float):
        integ = {1: integrate1, 2: integrate2, 3: integrate3}[self.levels]
        return integ(f, t, self.nodes_per_level)


@dataclass(frozen=True)
class RefineResult:
    """Converged refine_until output plus the achieved doubling delta."""

    value: np.ndarray
    delta: float
    nodes_per_level: int


def refine_until(f, t: float, tol: float, levels: int = 1,
                 start: int = DEFAULT_NODES) -> RefineResult:
    """Double nodes per level until two successive results agree below tol.

    Agreement is in the operator 2-norm.  Raises
    :class:`QuadratureConvergenceError` (carrying the last two results) if
    the node cap MAX_NODES is reached without agreement.
    """
    if tol <= 0:
        raise ValueError("tol must be > 0")
    integ = {1: integrate1, 2: integrate2, 3: integrate3}[levels]
    cur = integ(f, t, start)
    n = start
    prev = None
    delta = np.inf
    while 2 * n <= MAX_NODES:
        n2 = 2 * n
        nxt = integ(f, t, n2)
        delta = float(opnorm2(np.atleast_2d(nxt - cur)))
        if delta < tol:
            return RefineResult(value=nxt, delta=delta, nodes_per_level=n2)
        prev, cur, n = cur, nxt, n2
    raise QuadratureConvergenceError(cur, prev, delta, n)
