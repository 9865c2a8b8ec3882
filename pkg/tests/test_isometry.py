import numpy as np
import pytest

from trigmoment import MomentSequence, build_isometry, defect_numbers, embed, factor_gram, build_toeplitz, is_determinate, moments_from_measure
from trigmoment.isometry import gram_schmidt
from trigmoment.testkit import GeneratorSpec, complex_gaussian, random_atomic_measure

from conftest import pipeline, random_instance, scalar_moments


def test_lebesgue_isometry(lebesgue):
    ir = lebesgue
    assert (ir.r, ir.tau) == (2, 1)
    assert defect_numbers(ir) == (1, 1)
    assert not is_determinate(ir)
    x0, x1 = embed(ir.ps, [1], 0), embed(ir.ps, [1], 1)
    assert abs(np.vdot(x0, x1)) < 1e-15
    assert np.allclose(ir.A_mat @ x0, x1, atol=1e-15)
    assert np.allclose(ir.A_mat @ x1, 0, atol=1e-15)


def test_point_mass_isometry(point_mass):
    t0, ir = point_mass
    assert (ir.r, ir.tau) == (1, 1)
    assert defect_numbers(ir) == (0, 0)
    assert is_determinate(ir)
    assert ir.A_mat[0, 0] == pytest.approx(np.exp(1j * t0), abs=1e-14)


def test_generic_full_rank():
    mu = random_atomic_measure(GeneratorSpec(2, 3, 10, seed=21))
    ir = pipeline(moments_from_measure(mu, 3))
    assert (ir.r, ir.tau) == (8, 6)
    assert defect_numbers(ir) == (2, 2)
    assert not is_determinate(ir)


def test_exactly_d_plus_one_times_p_atoms_indeterminate():
    mu = random_atomic_measure(GeneratorSpec(2, 2, 6, seed=4))
    ir = pipeline(moments_from_measure(mu, 2))
    assert ir.r == 6 and not is_determinate(ir)


def test_zero_moments():
    ir = pipeline(MomentSequence(np.zeros((3, 2, 2))))
    assert ir.r == 0 and defect_numbers(ir) == (0, 0)


def test_d_zero_rejected():
    with pytest.raises(ValueError):
        build_isometry(factor_gram(build_toeplitz(scalar_moments(1.0))))


@pytest.mark.parametrize("seed", range(20))
def test_invariants(seed):
    _, ms = random_instance(seed)
    tf = build_toeplitz(ms)
    ir = build_isometry(factor_gram(tf))
    Tn = np.linalg.norm(tf.T, 2)
    r, tau = ir.r, ir.tau
    assert np.linalg.norm(ir.X.conj().T @ ir.X - ir.Y.conj().T @ ir.Y, 2) <= 1e-10 * Tn
    assert np.abs(np.linalg.norm(ir.A_mat @ ir.Q_D, axis=0) - 1).max(initial=0) <= 1e-10
    m, m2 = defect_numbers(ir)
    assert m == m2 == r - tau
    for basis in ([ir.Q_D, ir.Q_ND], [ir.Q_R, ir.Q_NR]):
        W = np.hstack(basis)
        assert W.shape == (r, r)
        assert np.linalg.norm(W.conj().T @ W - np.eye(r), 2) <= 1e-12
    # A is zero on the complement of its domain
    assert np.linalg.norm(ir.A_mat @ ir.Q_ND) <= 1e-10


@pytest.mark.parametrize("seed", range(10))
def test_shift_identities(seed):
    rng = np.random.default_rng(seed)
    _, ms = random_instance(seed)
    ir = pipeline(ms)
    scale = np.linalg.norm(ms.moments[0], 2)
    for _ in range(5):
        h = complex_gaussian(rng, ms.p)
        x = embed(ir.ps, h, 0)
        for j in range(ms.d):
            assert np.linalg.norm(ir.A_mat @ embed(ir.ps, h, j) - embed(ir.ps, h, j + 1)) <= 1e-9 * scale
        for j in range(ms.d + 1):
            assert np.linalg.norm(np.linalg.matrix_power(ir.A_mat, j) @ x - embed(ir.ps, h, j)) <= 1e-8 * scale


def test_gram_schmidt_drops_dependent_columns():
    rng = np.random.default_rng(0)
    v = complex_gaussian(rng, 4, 2)
    Q = gram_schmidt(np.column_stack([v[:, 0], 2 * v[:, 0], v[:, 1]]), 1e-10)
    assert Q.shape == (4, 2)
    assert np.allclose(Q.conj().T @ Q, np.eye(2), atol=1e-14)
    R = gram_schmidt(complex_gaussian(rng, 4, 3), 1e-10, against=Q)
    assert R.shape == (4, 2) and np.abs(Q.conj().T @ R).max() < 1e-14
