"""Deterministic generators for the test-problem corpus.

Randomness comes from SplitMix64 so any implementation, in any language, can
reproduce the corpus bit for bit.  The state advance and output mix are

    state  = (state + 0x9E3779B97F4A7C15) mod 2^64
    z      = state
    z      = ((z XOR (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2^64
    z      = ((z XOR (z >> 27)) * 0x94D049BB133111EB) mod 2^64
    output = z XOR (z >> 31)

and uniform doubles in [0, 1) are (output >> 11) * 2^-53.  Matrix entries are
drawn row-major, real part before imaginary part, each uniform in [-1, 1);
matrix A is drawn completely before matrix B.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matcore import opnorm2
from .splittings import OperatorPair

_MASK64 = (1 << 64) - 1

KINDS = ("random_general", "random_hermitian", "random_skew",
         "commuting_diag", "nilpotent_2x2", "schrodinger_1d")

POTENTIALS = ("harmonic", "well", "cosine")


class SplitMix64:
    """The SplitMix64 PRNG (recurrence in the module docstring)."""

    def __init__(self, seed: int):
        if not 0 <= seed <= _MASK64:
            raise ValueError("seed must fit in 64 unsigned bits")
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def next_float(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * 2.0 ** -53

    def next_symmetric(self) -> float:
        """Uniform double in [-1, 1)."""
        return 2.0 * self.next_float() - 1.0

    def next_matrix(self, dim: int) -> np.ndarray:
        m = np.empty((dim, dim), dtype=np.complex128)
        for i in range(dim):
            for j in range(dim):
                re = self.next_symmetric()
                im = self.next_symmetric()
                m[i, j] = re + 1j * im
        return m


@dataclass(frozen=True)
class ProblemSpec:
    """Declarative description of one corpus problem."""

    kind: str
    dim: int = 0
    seed: int = 0
    scale: float = 1.0
    potential: str | None = None
    grid_points: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown problem kind: {self.kind!r}")
        if self.scale <= 0:
            raise ValueError("scale must be > 0")
        if not 0 <= self.seed <= _MASK64:
            raise ValueError("seed must fit in 64 unsigned bits")
        if self.kind == "schrodinger_1d":
            if self.grid_points is None or self.grid_points < 8:
                raise ValueError("schrodinger_1d needs grid_points >= 8")
            if self.potential not in POTENTIALS:
                raise ValueError(f"unknown potential: {self.potential!r}")
            if self.dim not in (0, self.grid_points):
                raise ValueError("schrodinger_1d dim must equal grid_points")
            object.__setattr__(self, "dim", self.grid_points)
        elif self.kind == "nilpotent_2x2":
            if self.dim not in (0, 2):
                raise ValueError("nilpotent_2x2 is 2x2 only")
            object.__setattr__(self, "dim", 2)
        else:
            if self.dim < 2:
                raise ValueError("dim must be >= 2")

    @property
    def problem_id(self) -> str:
        if self.kind == "schrodinger_1d":
            return f"schrodinger_1d_{self.potential}_N{self.grid_points}_sc{self.scale:g}"
        if self.kind == "nilpotent_2x2":
            return f"nilpotent_2x2_sc{self.scale:g}"
        return f"{self.kind}_d{self.dim}_seed{self.seed}_sc{self.scale:g}"


def _rescaled(m: np.ndarray, scale: float) -> np.ndarray:
    nrm = opnorm2(m)
    if nrm == 0.0:
        raise ValueError("degenerate zero draw; choose another seed")
    return m * (scale / nrm)


def _potential_values(name: str, x: np.ndarray) -> np.ndarray:
    if name == "harmonic":
        return (2.0 * x - 1.0) ** 2
    if name == "well":
        return np.where((x >= 0.25) & (x <= 0.75), -1.0, 0.0)
    if name == "cosine":
        return np.cos(2.0 * np.pi * x)
    raise ValueError(f"unknown potential: {name!r}")


def generate(spec: ProblemSpec) -> OperatorPair:
    """Build the OperatorPair for a spec; bit-identical for identical specs."""
    kind = spec.kind
    if kind == "nilpotent_2x2":
        a = spec.scale * np.array([[0.0, 1.0], [0.0, 0.0]], dtype=np.complex128)
        b = spec.scale * np.array([[0.0, 0.0], [1.0, 0.0]], dtype=np.complex128)
        return OperatorPair.from_matrices(a, b)

    if kind == "schrodinger_1d":
        n = spec.grid_points
        h = 1.0 / (n + 1)
        lap = (np.diag(-2.0 * np.ones(n)) + np.diag(np.ones(n - 1), 1)
               + np.diag(np.ones(n - 1), -1)) / h ** 2
        a = _rescaled(1j * lap, spec.scale)
        x = (np.arange(n) + 1) * h
        b = -1j * np.diag(_potential_values(spec.potential, x))
        return OperatorPair.from_matrices(a, b)

    rng = SplitMix64(spec.seed)
    if kind == "random_general":
        a = rng.next_matrix(spec.dim)
        b = rng.next_matrix(spec.dim)
    elif kind == "random_hermitian":
        g = rng.next_matrix(spec.dim)
        a = (g + g.conj().T) / 2.0
        g = rng.next_matrix(spec.dim)
        b = (g + g.conj().T) / 2.0
    elif kind == "random_skew":
        g = rng.next_matrix(spec.dim)
        a = (g - g.conj().T) / 2.0
        g = rng.next_matrix(spec.dim)
        b = (g - g.conj().T) / 2.0
    elif kind == "commuting_diag":
        # real diagonals: commutation stays *exact* even under FMA-based
        # complex matmul (complex FMA products are not operand-symmetric)
        a = np.diag([rng.next_symmetric() for _ in range(spec.dim)]).astype(
            np.complex128)
        b = np.diag([rng.next_symmetric() for _ in range(spec.dim)]).astype(
            np.complex128)
    else:  # unreachable; __post_init__ validates kind
        raise ValueError(f"unknown problem kind: {kind!r}")
    return OperatorPair.from_matrices(_rescaled(a, spec.scale),
                                      _rescaled(b, spec.scale))


#: The 7-problem default corpus: five seeded 4x4 pairs (two general, one
#: Hermitian, two skew-Hermitian), the nilpotent pair, and a 32-point
#: discretized free-particle/potential pair with a stiff A (norm 10).
DEFAULT_CORPUS: tuple[ProblemSpec, ...] = (
    ProblemSpec(kind="random_general", dim=4, seed=101, scale=1.5),
    ProblemSpec(kind="random_general", dim=4, seed=202, scale=2.0),
    ProblemSpec(kind="random_hermitian", dim=4, seed=303, scale=1.0),
    ProblemSpec(kind="random_skew", dim=4, seed=404, scale=2.0),
    ProblemSpec(kind="random_skew", dim=4, seed=505, scale=1.0),
    ProblemSpec(kind="nilpotent_2x2", scale=1.0),
    ProblemSpec(kind="schrodinger_1d", grid_points=32, potential="harmonic",
                scale=10.0),
)
