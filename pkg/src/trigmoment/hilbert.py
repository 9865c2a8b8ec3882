"""Coordinates for the quotient Hilbert space of the Toeplitz form.

The space is realised as C^r through a rank-revealing factor T = V^* V.
The class of ``h`` placed in slot ``j`` is the column combination
``V[:, j*p:(j+1)*p] @ h``, so inner products of embedded vectors reproduce
the moments: <embed(h, j), embed(g, k)> = g^* S_{j-k} h.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ComputationError, NotSolvableError
from .moments import MomentSequence, ToeplitzForm, build_toeplitz, check_solvable

DEFAULT_RANK_TOL = 1e-10


@dataclass(frozen=True)
class ProblemSpace:
    ms: MomentSequence
    V: np.ndarray
    rank_tol: float
    T: np.ndarray

    @property
    def r(self) -> int:
        return self.V.shape[0]

    @property
    def p(self) -> int:
        return self.ms.p

    @property
    def d(self) -> int:
        return self.ms.d

    def block(self, j: int) -> np.ndarray:
        """r x p matrix whose columns are embed(f_k, j)."""
        if not 0 <= j <= self.d:
            raise IndexError(f"slot {j} outside 0..{self.d}")
        return self.V[:, j * self.p:(j + 1) * self.p]


def factor_gram(tf: ToeplitzForm, rank_tol: float = DEFAULT_RANK_TOL) -> ProblemSpace:
    """Factor T = V^* V keeping eigenvalues above ``rank_tol * lambda_max``.

    ``tf`` must carry its moment sequence (as built by ``build_toeplitz``).
    Raises :class:`NotSolvableError` if T fails the PSD test of ``tf``.
    """
    if tf.ms is None:
        raise ValueError("ToeplitzForm has no attached MomentSequence")
    solvable, lambda_min = check_solvable(tf)
    if not solvable:
        raise NotSolvableError(lambda_min, tf.tol)
    try:
        lam, U = scipy.linalg.eigh(tf.T)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise ComputationError(f"eigensolver failed: {exc}") from exc
    lam = np.clip(lam, 0.0, None)
    lam_max = lam[-1] if lam.size else 0.0
    keep = lam > rank_tol * lam_max
    # descending order so the leading coordinates carry the most mass
    idx = np.flatnonzero(keep)[::-1]
    V = np.sqrt(lam[idx])[:, None] * U[:, idx].conj().T
    return ProblemSpace(ms=tf.ms, V=V, rank_tol=rank_tol, T=tf.T)


def problem_space(ms: MomentSequence, rank_tol: float = DEFAULT_RANK_TOL,
                  psd_tol: float | None = None) -> ProblemSpace:
    return factor_gram(build_toeplitz(ms, psd_tol), rank_tol)


def embed(ps: ProblemSpace, h, j: int) -> np.ndarray:
    h = np.asarray(h, dtype=complex).reshape(ps.p)
    return ps.block(j) @ h


def embedding_operator(ps: ProblemSpace) -> np.ndarray:
    """The r x p matrix of h -> embed(h, 0)."""
    return ps.block(0).copy()
