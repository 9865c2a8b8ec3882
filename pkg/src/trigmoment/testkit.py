"""Seeded generators and brute-force oracles for the test-suite.

Nothing here touches the parameterization code: transforms are direct
finite sums over atoms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .moments import TWO_PI, AtomicMeasure


@dataclass(frozen=True)
class GeneratorSpec:
    p: int
    d: int
    n_atoms: int
    rank: int | Sequence[int] | None = None
    min_separation: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if self.n_atoms < 1:
            raise ValueError("need at least one atom")
        if self.min_separation <= 0 or self.n_atoms * self.min_separation >= TWO_PI:
            raise ValueError("separation must be positive and fit n_atoms on the circle")

    def ranks(self) -> list[int]:
        if self.rank is None:
            return [self.p] * self.n_atoms
        if isinstance(self.rank, int):
            return [self.rank] * self.n_atoms
        ranks = list(self.rank)
        if len(ranks) != self.n_atoms:
            raise ValueError("rank profile length must equal n_atoms")
        return ranks


def separated_angles(rng: np.random.Generator, n: int, sep: float) -> np.ndarray:
    """n angles in [0, 2pi) with circular gaps >= sep."""
    slack = TWO_PI - n * sep
    gaps = sep + slack * rng.dirichlet(np.ones(n))
    angles = rng.uniform(0, TWO_PI) + np.concatenate([[0.0], np.cumsum(gaps[:-1])])
    return np.sort(np.mod(angles, TWO_PI))


def complex_gaussian(rng: np.random.Generator, *shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def random_atomic_measure(spec: GeneratorSpec) -> AtomicMeasure:
    rng = np.random.default_rng(spec.seed)
    angles = separated_angles(rng, spec.n_atoms, spec.min_separation)
    weights = []
    for k in spec.ranks():
        G = complex_gaussian(rng, spec.p, k)
        weights.append(G @ G.conj().T)
    return AtomicMeasure.from_pairs(spec.p, zip(angles, weights))


def random_unitary(m: int, rng: np.random.Generator) -> np.ndarray:
    Q, R = np.linalg.qr(complex_gaussian(rng, m, m))
    phases = np.diag(R) / np.abs(np.diag(R))
    return Q * phases


def random_contraction(m: int, seed, boundary: bool = False) -> np.ndarray:
    """Unitary (``boundary``) or G / (||G|| (1 + u)) with Gaussian G, u ~ U[0, 1]."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if m == 0:
        return np.zeros((0, 0), complex)
    if boundary:
        return random_unitary(m, rng)
    G = complex_gaussian(rng, m, m)
    return G / (np.linalg.norm(G, 2) * (1.0 + rng.uniform()))


def brute_force_transform(mu: AtomicMeasure, zeta: complex) -> np.ndarray:
    """sum_m (1 + zeta e^{i t_m}) / (1 - zeta e^{i t_m}) W_m."""
    out = np.zeros((mu.p, mu.p), complex)
    for t, W in zip(mu.angles, mu.weights):
        u = zeta * np.exp(1j * t)
        out += (1 + u) / (1 - u) * W
    return out


def brute_force_form(S, h: np.ndarray, g: np.ndarray) -> complex:
    """sum_{j,k} (S_{j-k} h_j, g_k) by an explicit double loop over slots."""
    S = np.asarray(S)
    d, p = S.shape[0] - 1, S.shape[1]
    h = np.asarray(h).reshape(d + 1, p)
    g = np.asarray(g).reshape(d + 1, p)
    total = 0.0 + 0.0j
    for j in range(d + 1):
        for k in range(d + 1):
            n = j - k
            Snk = S[n] if n >= 0 else S[-n].conj().T
            total += np.vdot(g[k], Snk @ h[j])
    return complex(total)
