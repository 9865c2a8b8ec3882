import numpy as np
import pytest

from trigmoment import BlockOperator, block_inverse, resolvent_contraction, schur_complement
from trigmoment.errors import ContractionRegimeError, SingularBlockError
from trigmoment.schur_linalg import is_invertible

from conftest import well_conditioned


def test_schur_zero_coupling():
    rng = np.random.default_rng(0)
    M = well_conditioned(rng, 5)
    bo = BlockOperator.split(M, 3)
    for B, C in [(np.zeros_like(bo.B), bo.C), (bo.B, np.zeros_like(bo.C))]:
        assert np.array_equal(schur_complement(BlockOperator(bo.A, B, C, bo.D)), bo.D)


def test_schur_scalar_coupling():
    c = 0.3
    E = np.eye(2)
    H = schur_complement(BlockOperator(E, c * E, c * E, E))
    assert np.allclose(H, (1 - c * c) * E, atol=1e-15)


def test_schur_against_explicit_inverse():
    rng = np.random.default_rng(1)
    bo = BlockOperator.split(well_conditioned(rng, 6), 4)
    oracle = bo.D - bo.C @ np.linalg.inv(bo.A) @ bo.B
    assert np.linalg.norm(schur_complement(bo) - oracle, 2) <= 1e-12 * np.linalg.norm(oracle, 2)


@pytest.mark.parametrize("n1, n2", [(1, 1), (2, 3), (0, 3), (3, 0)])
def test_identity_inverse(n1, n2):
    inv = block_inverse(BlockOperator.split(np.eye(n1 + n2), n1))
    assert np.allclose(inv.dense(), np.eye(n1 + n2), atol=0)


def test_hand_example():
    bo = BlockOperator(np.array([[2.0]]), np.array([[1.0]]), np.array([[1.0]]), np.array([[1.0]]))
    assert schur_complement(bo)[0, 0] == pytest.approx(0.5, abs=1e-15)
    assert np.allclose(block_inverse(bo).dense(), [[1, -1], [-1, 2]], atol=1e-15)


@pytest.mark.parametrize("n1, n2", [(4, 2), (5, 3), (8, 8)])
def test_against_dense_inverse(n1, n2):
    rng = np.random.default_rng(n1 * 10 + n2)
    for _ in range(100):
        M = well_conditioned(rng, n1 + n2)
        inv = block_inverse(BlockOperator.split(M, n1)).dense()
        oracle = np.linalg.inv(M)
        assert np.linalg.norm(inv - oracle, 2) <= 1e-11 * np.linalg.norm(oracle, 2)
        n = n1 + n2
        assert np.linalg.norm(inv @ M - np.eye(n), 2) <= 1e-10 * np.linalg.cond(M)
        assert np.linalg.norm(M @ inv - np.eye(n), 2) <= 1e-10 * np.linalg.cond(M)


def test_triangular_factorization_identity():
    rng = np.random.default_rng(2)
    bo = BlockOperator.split(well_conditioned(rng, 8), 5)
    n1, n2 = bo.dims
    H = schur_complement(bo)
    left = np.block([[bo.A, bo.B], [np.zeros((n2, n1)), H]])
    L = np.block([[np.eye(n1), np.zeros((n1, n2))], [-bo.C @ np.linalg.inv(bo.A), np.eye(n2)]])
    assert np.linalg.norm(left - L @ bo.dense(), 2) <= 1e-12 * np.linalg.norm(bo.dense(), 2)


def test_singular_corner():
    M = np.array([[0.0, 1.0], [1.0, 0.0]])
    with pytest.raises(SingularBlockError) as exc:
        block_inverse(BlockOperator.split(M, 1))
    assert exc.value.which == "A"


def test_singular_schur_complement():
    # rank-deficient M with an invertible corner
    u = np.array([[1.0], [2.0], [0.5]])
    M = u @ u.T + np.diag([1.0, 0.0, 0.0])
    M[1:, 1:] = M[1:, :1] @ np.linalg.inv(M[:1, :1]) @ M[:1, 1:]
    with pytest.raises(SingularBlockError) as exc:
        block_inverse(BlockOperator.split(M, 1))
    assert exc.value.which == "schur"


@pytest.mark.parametrize("n1, n2", [(4, 2), (5, 3), (8, 8)])
def test_assertion_two_consistency(n1, n2):
    rng = np.random.default_rng(99 + n1)
    for _ in range(100):
        G = rng.standard_normal((n1 + n2,) * 2) + 1j * rng.standard_normal((n1 + n2,) * 2)
        bo = BlockOperator.split(G, n1)
        if np.linalg.svd(G, compute_uv=False)[-1] < 1e-8 or not is_invertible(bo.A):
            continue
        assert is_invertible(schur_complement(bo), 1e-14)
        inv = block_inverse(bo, tol=1e-14).dense()
        oracle = np.linalg.inv(G)
        assert np.linalg.norm(inv - oracle, 2) <= 1e-8 * np.linalg.cond(G) * np.linalg.norm(oracle, 2)


def test_block_shape_validation():
    with pytest.raises(ValueError):
        BlockOperator(np.eye(2), np.zeros((2, 1)), np.zeros((2, 1)), np.eye(1))


def test_resolvent_examples():
    rng = np.random.default_rng(0)
    K = rng.standard_normal((3, 3))
    K /= np.linalg.norm(K, 2)
    assert np.array_equal(resolvent_contraction(K, 0.0), np.eye(3))
    assert np.allclose(resolvent_contraction(np.zeros((3, 3)), 0.9j), np.eye(3), atol=0)
    assert resolvent_contraction(np.array([[1.0]]), 0.5)[0, 0] == pytest.approx(2.0, abs=1e-15)
    z = 0.7 * np.exp(0.3j)
    X = resolvent_contraction(K, z)
    assert np.linalg.norm((np.eye(3) - z * K) @ X - np.eye(3), 2) <= 1e-11


def test_resolvent_refuses_outside_regime():
    with pytest.raises(ContractionRegimeError):
        resolvent_contraction(np.array([[1.0]]), 1.0)
    with pytest.raises(ContractionRegimeError):
        resolvent_contraction(2 * np.eye(2), 0.6)
