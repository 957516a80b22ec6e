"""Splitting propagators for an operator pair and their compositions.

A :class:`Method` selects one of the product approximations of exp(t(A+B)):
the first-order product exp(tA)exp(tB), its reverse, their average
(palindromic), the symmetric three-factor product, its reverse, or the exact
exponential.  :class:`OperatorPair` eagerly caches the commutators and
logarithmic norms every downstream module needs.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .matcore import as_cmat, commutator, expm, lognorm, opnorm2


class Method(str, enum.Enum):
    """Closed enumeration of propagator constructions."""

    LT = "LT"                  # exp(tA) exp(tB)
    LT_REV = "LT_REV"          # exp(tB) exp(tA)
    PLT = "PLT"                # mean of LT and LT_REV
    STRANG = "STRANG"          # exp(tA/2) exp(tB) exp(tA/2)
    STRANG_REV = "STRANG_REV"  # exp(tB/2) exp(tA) exp(tB/2)
    EXACT = "EXACT"            # exp(t(A+B))


#: Methods with a nonzero splitting error (everything but EXACT).
SPLITTING_METHODS = (Method.LT, Method.LT_REV, Method.PLT,
                     Method.STRANG, Method.STRANG_REV)


def _frozen(m: np.ndarray) -> np.ndarray:
    m = m.copy()
    m.setflags(write=False)
    return m


@dataclass(frozen=True)
class OperatorPair:
    """The pair (A, B) with eagerly cached derived quantities.

    comm, comm_a, comm_b are [A,B], [A,[A,B]], [B,[A,B]]; mu_a, mu_b, mu_sum
    are the logarithmic 2-norms of A, B and A+B.  Arrays are read-only.
    """

    a: np.ndarray
    b: np.ndarray
    ab_sum: np.ndarray
    comm: np.ndarray
    comm_a: np.ndarray
    comm_b: np.ndarray
    mu_a: float
    mu_b: float
    mu_sum: float

    @classmethod
    def from_matrices(cls, a, b) -> "OperatorPair":
        a, b = as_cmat(a), as_cmat(b)
        if a.shape != b.shape:
            raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
        comm = commutator(a, b)
        return cls(
            a=_frozen(a),
            b=_frozen(b),
            ab_sum=_frozen(a + b),
            comm=_frozen(comm),
            comm_a=_frozen(commutator(a, comm)),
            comm_b=_frozen(commutator(b, comm)),
            mu_a=lognorm(a),
            mu_b=lognorm(b),
            mu_sum=lognorm(a + b),
        )

    @property
    def dim(self) -> int:
        return self.a.shape[0]

    @property
    def omega(self) -> float:
        return self.mu_a + self.mu_b - self.mu_sum

    def swapped(self) -> "OperatorPair":
        """The pair with the roles of A and B exchanged."""
        return OperatorPair.from_matrices(self.b, self.a)


def make_pair(a, b) -> OperatorPair:
    return OperatorPair.from_matrices(a, b)


def propagator(pair: OperatorPair, method, t: float) -> np.ndarray:
    """One-step propagator of the given method at step size t.

    Negative t is accepted (needed by symmetry_defect); the bound evaluators
    in :mod:`splitbound.bounds` are the ones that insist on t >= 0.
    """
    if not math.isfinite(t):
        raise ValueError("t must be finite")
    m = Method(method)
    a, b = pair.a, pair.b
    if m is Method.EXACT:
        return expm(t * pair.ab_sum)
    if m is Method.LT:
        return expm(t * a) @ expm(t * b)
    if m is Method.LT_REV:
        return expm(t * b) @ expm(t * a)
    if m is Method.PLT:
        return 0.5 * (expm(t * a) @ expm(t * b) + expm(t * b) @ expm(t * a))
    if m is Method.STRANG:
        half = expm(0.5 * t * a)
        return half @ expm(t * b) @ half
    if m is Method.STRANG_REV:
        half = expm(0.5 * t * b)
        return half @ expm(t * a) @ half
    raise ValueError(f"unknown method tag: {method!r}")


def step_n(pair: OperatorPair, method, t: float, n: int) -> np.ndarray:
    """n steps of size t/n, composed by repeated multiplication."""
    if n < 1:
        raise ValueError("step count n must be >= 1")
    one = propagator(pair, method, t / n)
    out = one
    for _ in range(n - 1):
        out = out @ one
    return out


def symmetry_defect(pair: OperatorPair, method, t: float) -> float:
    """|| Y(t) Y(-t) - I ||_2; zero iff the method is time-symmetric."""
    if t <= 0:
        raise ValueError("t must be > 0")
    y = propagator(pair, method, t) @ propagator(pair, method, -t)
    return opnorm2(y - np.eye(pair.dim, dtype=np.complex128))


def exact_propagator(pair: OperatorPair, t: float) -> np.ndarray:
    return propagator(pair, Method.EXACT, t)
