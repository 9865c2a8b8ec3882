import numpy as np
import pytest

from trigmoment import build_isometry, build_toeplitz, factor_gram, moments_from_measure, MomentSequence
from trigmoment.testkit import GeneratorSpec, random_atomic_measure


def pipeline(ms):
    return build_isometry(factor_gram(build_toeplitz(ms)))


def scalar_moments(*values):
    return MomentSequence(np.array(values, dtype=complex).reshape(-1, 1, 1))


def random_instance(seed):
    """Seeded problem with p <= 3, d <= 4, up to 10 atoms of mixed rank."""
    rng = np.random.default_rng(seed)
    p = 1 + seed % 3
    d = 1 + (seed // 3) % 4
    n = int(rng.integers(1, 11))
    ranks = [int(rng.integers(1, p + 1)) for _ in range(n)]
    mu = random_atomic_measure(GeneratorSpec(p, d, n, ranks, 0.05, seed))
    return mu, moments_from_measure(mu, d)


@pytest.fixture
def lebesgue():
    """p=1, d=1, S=(1,0)."""
    return pipeline(scalar_moments(1, 0))


@pytest.fixture
def point_mass():
    t0 = 1.0
    return t0, pipeline(scalar_moments(*np.exp(1j * t0 * np.arange(4))))


def well_conditioned(rng, n):
    """Complex n x n matrix 2E + G/sqrt(n); its leading corners are well conditioned too."""
    G = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2 * n)
    return 2.0 * np.eye(n) + G
