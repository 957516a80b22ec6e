import numpy as np
import pytest
import scipy.linalg

from splitbound import matcore
from splitbound.matcore import (add, adjoint, as_cmat, commutator, expm,
                                lognorm, mul, opnorm2, scale)

NILP_A = np.array([[0, 1], [0, 0]], dtype=complex)
NILP_B = np.array([[0, 0], [1, 0]], dtype=complex)


def random_cmat(seed, n, norm=None):
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    if norm is not None:
        m *= norm / np.linalg.norm(m, 2)
    return m


# ---------------------------------------------------------------------------
# arithmetic


def test_add_zero_is_identity():
    x = random_cmat(1, 4)
    assert np.array_equal(add(np.zeros((4, 4)), x), x)


def test_mul_identity():
    x = random_cmat(2, 5)
    assert np.allclose(mul(np.eye(5), x), x, rtol=0, atol=0)


def test_scale_linearity():
    x = random_cmat(3, 3)
    assert np.allclose(scale(2j, x), 2j * x, rtol=0, atol=0)


def test_adjoint_of_hermitian_is_itself():
    g = random_cmat(4, 4)
    h = (g + g.conj().T) / 2
    assert np.allclose(adjoint(h), h, rtol=0, atol=1e-16)


def test_adjoint_involution():
    x = random_cmat(5, 6)
    assert np.array_equal(adjoint(adjoint(x)), x)


@pytest.mark.parametrize("op", [add, mul, commutator])
def test_dimension_mismatch_rejected(op):
    with pytest.raises(ValueError, match="mismatch"):
        op(np.eye(2), np.eye(3))


def test_nonsquare_rejected():
    with pytest.raises(ValueError, match="square"):
        as_cmat(np.ones((2, 3)))


@pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf, 1j * np.nan])
def test_nonfinite_rejected(bad):
    m = np.eye(2, dtype=complex)
    m[0, 1] = bad
    with pytest.raises(ValueError, match="finite"):
        as_cmat(m)


# ---------------------------------------------------------------------------
# commutator


def test_commutator_with_itself_is_zero():
    x = random_cmat(6, 4)
    assert np.array_equal(commutator(x, x), np.zeros((4, 4)))


def test_commutator_nilpotent_pair():
    c = commutator(NILP_A, NILP_B)
    assert np.array_equal(c, np.diag([1.0 + 0j, -1.0 + 0j]))
    cc = commutator(NILP_A, c)
    assert np.array_equal(cc, -2.0 * NILP_A)


def test_commutator_antisymmetric_and_bilinear():
    for seed in range(5):
        x = random_cmat(10 + seed, 4)
        y = random_cmat(20 + seed, 4)
        z = random_cmat(30 + seed, 4)
        assert np.allclose(commutator(x, y), -commutator(y, x),
                           rtol=0, atol=0)
        lhs = commutator(2.0 * x + 3j * y, z)
        rhs = 2.0 * commutator(x, z) + 3j * commutator(y, z)
        assert np.allclose(lhs, rhs, rtol=0, atol=1e-13)


# ---------------------------------------------------------------------------
# expm


def test_expm_zero_is_identity():
    assert np.allclose(expm(np.zeros((3, 3))), np.eye(3), rtol=0, atol=1e-16)


def test_expm_diagonal():
    d = np.diag([0.3 + 1.1j, -2.0 - 0.4j, 5.0 + 0j])
    want = np.diag(np.exp(np.diag(d)))
    got = expm(d)
    assert np.linalg.norm(got - want, 2) <= 1e-12 * np.linalg.norm(want, 2)


@pytest.mark.parametrize("t", [0.1, 1.0, -2.5])
def test_expm_nilpotent_terminating_series(t):
    got = expm(t * NILP_A)
    want = np.array([[1.0, t], [0.0, 1.0]])
    assert np.abs(got - want).max() <= 1e-14 * max(1.0, abs(t))


@pytest.mark.parametrize("t", [0.1, 1.0, 4.0, 18.0])
def test_expm_hyperbolic_oracle(t):
    # exp(t [[0,1],[1,0]]) = [[cosh t, sinh t], [sinh t, cosh t]]
    m = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    want = np.array([[np.cosh(t), np.sinh(t)], [np.sinh(t), np.cosh(t)]])
    got = expm(t * m)
    rel = np.linalg.norm(got - want, 2) / np.linalg.norm(want, 2)
    assert rel <= 1e-12


def test_expm_diagonalizable_oracle():
    # X = V D V^-1 with well-conditioned V; norms up to the contract's 20
    for seed, target_norm in ((0, 0.5), (1, 3.0), (2, 12.0), (3, 20.0)):
        rng = np.random.default_rng(seed)
        v = np.eye(5) + 0.1 * (rng.standard_normal((5, 5))
                               + 1j * rng.standard_normal((5, 5)))
        d = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        x = v @ np.diag(d) @ np.linalg.inv(v)
        x *= target_norm / np.linalg.norm(x, 2)
        # oracle: eigen-decomposition of the scaled matrix
        w, vv = np.linalg.eig(x)
        want = vv @ np.diag(np.exp(w)) @ np.linalg.inv(vv)
        got = expm(x)
        rel = np.linalg.norm(got - want, 2) / np.linalg.norm(want, 2)
        assert rel <= 1e-12, (seed, target_norm, rel)


def test_expm_scipy_cross_check():
    for seed in range(4):
        x = random_cmat(100 + seed, 6, norm=2.0 + 4.0 * seed)
        want = scipy.linalg.expm(x)
        rel = np.linalg.norm(expm(x) - want, 2) / np.linalg.norm(want, 2)
        assert rel <= 1e-12


def test_expm_times_expm_of_negative_is_identity():
    for seed in range(4):
        x = random_cmat(200 + seed, 4, norm=1.0 + seed)
        resid = expm(x) @ expm(-x) - np.eye(4)
        assert np.linalg.norm(resid, 2) <= 1e-11


def test_expm_commuting_product_rule():
    # diagonal pair commutes exactly by construction
    da = np.diag([0.2 + 1j, -0.5, 0.9 - 0.3j])
    db = np.diag([1.1, 0.4j, -0.2 + 0.8j])
    lhs = expm(da) @ expm(db)
    assert np.linalg.norm(lhs - expm(da + db), 2) <= 1e-11
    # polynomials in one matrix commute too
    m = random_cmat(7, 4, norm=1.0)
    x, y = 0.7 * m + 0.1 * (m @ m), -0.3 * m
    assert np.linalg.norm(commutator(x, y), 2) <= 1e-14
    lhs = expm(x) @ expm(y)
    assert np.linalg.norm(lhs - expm(x + y), 2) <= 1e-11


def test_expm_growth_bounded_by_lognorm():
    # ||exp(tX)|| <= exp(t mu[X]) with 1e-10 slack
    for seed in range(4):
        x = random_cmat(300 + seed, 4, norm=1.5)
        mu = lognorm(x)
        for t in np.linspace(0.0, 2.0, 9):
            assert opnorm2(expm(t * x)) <= np.exp(t * mu) * (1 + 1e-10)


# ---------------------------------------------------------------------------
# norms


def test_opnorm2_identity():
    assert opnorm2(np.eye(5)) == pytest.approx(1.0, abs=1e-14)


def test_opnorm2_diagonal():
    assert opnorm2(np.diag([3.0, -4.0])) == pytest.approx(4.0, abs=1e-12)


def test_opnorm2_svd_oracle():
    for seed in range(6):
        x = random_cmat(400 + seed, 4 + seed)
        want = np.linalg.svd(x, compute_uv=False)[0]
        assert abs(opnorm2(x) - want) <= 1e-10 * want


def test_opnorm2_zero_matrix():
    assert opnorm2(np.zeros((3, 3))) == 0.0


def test_lognorm_negative_identity():
    assert lognorm(-np.eye(4)) == pytest.approx(-1.0, abs=1e-12)


def test_lognorm_skew_hermitian_is_zero():
    g = random_cmat(8, 5)
    s = (g - g.conj().T) / 2
    assert abs(lognorm(s)) <= 1e-12


def test_lognorm_hermitian_oracle():
    for seed in range(5):
        g = random_cmat(500 + seed, 4)
        h = (g + g.conj().T) / 2
        want = np.linalg.eigvalsh(h).max()
        tol = 1e-10 * max(1.0, np.linalg.norm(h, 2))
        assert abs(lognorm(h) - want) <= tol


def test_lognorm_general_matches_hermitian_part_oracle():
    for seed in range(5):
        x = random_cmat(600 + seed, 6)
        want = np.linalg.eigvalsh((x + x.conj().T) / 2).max()
        tol = 1e-10 * max(1.0, np.linalg.norm(x, 2))
        assert abs(lognorm(x) - want) <= tol
