"""Hot numeric kernels: matrix exponential, Hermitian eigenvalues, 2-norm.

Single-source kernels written in the numpy subset numba can compile: array
expressions carry the arithmetic (so the un-jitted functions run at real
numpy speed) and the only Python-level loops are the sweep structures numba
fuses away.  The undecorated ``_*_impl`` functions are the pure-numpy
fallback path; the ``*_kernel`` names are the dispatched entry points used
by :mod:`splitbound.matcore`.  ``benchmarks/bench_kernels.py`` compares the
two paths.
"""

from __future__ import annotations

import numpy as np

from .backend import jit_kernel

#: Taylor order of the exponential core; at scaled 1-norm <= 0.5 the series
#: remainder past order 20 is below 1e-26, far under double rounding.
_EXPM_ORDER = 20

_POWER_MAX_ITER = 10_000
_POWER_RTOL = 1e-14

_JACOBI_MAX_SWEEPS = 60
_JACOBI_OFF_RTOL = 1e-14


def _expm_impl(a):
    """exp(a) by scaling-and-squaring around an order-20 Taylor core.

    The matrix is scaled by 2**-s until its 1-norm is <= 0.5, the core is
    evaluated by Horner's rule, and the result squared s times.
    """
    n = a.shape[0]
    nrm = np.abs(a).sum(axis=0).max()
    spow = 0
    if nrm > 0.5:
        spow = int(np.ceil(np.log2(nrm / 0.5)))
    x = a / (2.0 ** spow)
    eye = np.eye(n).astype(np.complex128)
    res = eye.copy()
    for k in range(_EXPM_ORDER, 0, -1):
        res = eye + (x @ res) / k
    for _ in range(spow):
        res = res @ res
    return res


def _jacobi_eigvalsh_impl(h):
    """Eigenvalues of a Hermitian matrix by cyclic Jacobi rotations.

    Sweeps annihilate every off-diagonal entry in turn with a complex plane
    rotation until the off-diagonal Frobenius mass falls below 1e-14 of the
    matrix Frobenius norm.  Returns the eigenvalues sorted ascending.
    """
    n = h.shape[0]
    m = h.copy()
    for _ in range(_JACOBI_MAX_SWEEPS):
        frob2 = (np.abs(m) ** 2).sum()
        off2 = frob2 - (np.abs(np.diag(m)) ** 2).sum()
        scale = np.sqrt(frob2)
        if scale == 0.0 or off2 <= (_JACOBI_OFF_RTOL * scale) ** 2:
            break
        skip = 1e-17 * scale
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = m[p, q]
                ab = abs(b)
                if ab <= skip:
                    continue
                phase = b / ab
                tau = (m[q, q].real - m[p, p].real) / (2.0 * ab)
                if tau >= 0.0:
                    tan = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    tan = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + tan * tan)
                s = tan * c
                # unitary plane transform V: M <- V^H M V with
                # V[(p,q),(p,q)] = [[c, s], [-conj(phase) s, conj(phase) c]]
                colp = m[:, p].copy()
                colq = m[:, q].copy()
                m[:, p] = c * colp - np.conj(phase) * s * colq
                m[:, q] = s * colp + np.conj(phase) * c * colq
                rowp = m[p, :].copy()
                rowq = m[q, :].copy()
                m[p, :] = c * rowp - phase * s * rowq
                m[q, :] = s * rowp + phase * c * rowq
    return np.sort(np.real(np.diag(m)))


def _opnorm_power_impl(x):
    """Largest singular value of x by power iteration on the Gram matrix.

    Deterministic all-ones start vector; stops when the Rayleigh quotient
    changes by less than 1e-14 relatively.  Returns (sigma, converged);
    the caller falls back to the Jacobi eigensolver when converged is False.
    """
    n = x.shape[0]
    g = np.ascontiguousarray(np.conj(x).T) @ x
    v = np.ones(n, np.complex128) / np.sqrt(n)
    lam = 0.0
    lam_prev = -1.0
    converged = False
    for it in range(_POWER_MAX_ITER):
        w = g @ v
        ray = np.vdot(v, w).real
        wn = np.sqrt(np.vdot(w, w).real)
        if wn == 0.0:
            return 0.0, True
        v = w / wn
        lam = ray
        if it > 0 and abs(lam - lam_prev) <= _POWER_RTOL * max(abs(lam), 1e-300):
            converged = True
            break
        lam_prev = lam
    return np.sqrt(max(lam, 0.0)), converged


expm_kernel = jit_kernel(_expm_impl)
jacobi_eigvalsh_kernel = jit_kernel(_jacobi_eigvalsh_impl)
opnorm_power_kernel = jit_kernel(_opnorm_power_impl)
