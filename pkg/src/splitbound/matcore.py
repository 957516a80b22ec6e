"""Dense complex matrix algebra: arithmetic, commutators, exponential, norms.

All operations act on square complex128 arrays validated by :func:`as_cmat`
and are pure; nothing here mutates its inputs.  The matrix exponential, the
operator 2-norm and the logarithmic norm are backed by the kernels in
:mod:`splitbound._kernels`.
"""

from __future__ import annotations

import numpy as np

from ._kernels import expm_kernel, jacobi_eigvalsh_kernel, opnorm_power_kernel


def as_cmat(x) -> np.ndarray:
    """Validate x as a square, finite complex matrix (C-contiguous complex128)."""
    m = np.ascontiguousarray(x, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite (no NaN/Inf)")
    return m


def _check_same_dim(x: np.ndarray, y: np.ndarray) -> None:
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")


def add(x, y) -> np.ndarray:
    x, y = as_cmat(x), as_cmat(y)
    _check_same_dim(x, y)
    return x + y


def mul(x, y) -> np.ndarray:
    x, y = as_cmat(x), as_cmat(y)
    _check_same_dim(x, y)
    return x @ y


def scale(c, x) -> np.ndarray:
    return complex(c) * as_cmat(x)


def adjoint(x) -> np.ndarray:
    return as_cmat(x).conj().T.copy()


def commutator(x, y) -> np.ndarray:
    """x @ y - y @ x."""
    x, y = as_cmat(x), as_cmat(y)
    _check_same_dim(x, y)
    return x @ y - y @ x


def hermitian_part(x) -> np.ndarray:
    x = as_cmat(x)
    return (x + x.conj().T) / 2.0


def expm(x) -> np.ndarray:
    """Matrix exponential by scaling-and-squaring with a Taylor core."""
    return expm_kernel(as_cmat(x))


def opnorm2(x) -> float:
    """Operator 2-norm (largest singular value).

    Power iteration on the Gram matrix with a deterministic start vector;
    on non-convergence within 10000 iterations, falls back to the cyclic
    Jacobi eigensolver.
    """
    x = as_cmat(x)
    sigma, converged = opnorm_power_kernel(x)
    if not converged:
        gram = np.ascontiguousarray(x.conj().T @ x)
        evals = jacobi_eigvalsh_kernel(gram)
        sigma = float(np.sqrt(max(evals[-1], 0.0)))
    return float(sigma)


def lognorm(x) -> float:
    """Logarithmic 2-norm: largest eigenvalue of the Hermitian part.

    May be negative; the least mu with ||exp(t*x)|| <= exp(t*mu) for t >= 0.
    """
    h = np.ascontiguousarray(hermitian_part(x))
    evals = jacobi_eigvalsh_kernel(h)
    return float(evals[-1])
