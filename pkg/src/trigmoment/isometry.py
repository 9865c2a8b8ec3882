"""The shift isometry x_{h,j} -> x_{h,j+1} and its defect subspaces.

The domain D(A) is spanned by the slots 0..d-1, the range R(A) by slots
1..d. Both complements get orthonormal bases by Gram-Schmidt applied to
x_{f_k,d} - P_D x_{f_k,d} and x_{f_k,0} - P_R x_{f_k,0}, in the order
(slot outer, basis index inner).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import RankInconsistencyError, WellDefinednessError
from .hilbert import ProblemSpace


def gram_schmidt(vectors: np.ndarray, rank_tol: float, against: np.ndarray | None = None) -> np.ndarray:
    """Orthonormalize the columns of ``vectors`` in order.

    Modified Gram-Schmidt with one reorthogonalization pass; a column whose
    residual norm is <= ``rank_tol`` times its initial norm is dropped. The
    result is also orthogonal to the (orthonormal) columns of ``against``.
    """
    vectors = np.asarray(vectors, dtype=complex)
    r = vectors.shape[0]
    fixed = np.zeros((r, 0), complex) if against is None else np.asarray(against, dtype=complex)
    basis: list[np.ndarray] = [fixed[:, i] for i in range(fixed.shape[1])]
    n_fixed = len(basis)
    for col in vectors.T:
        norm0 = np.linalg.norm(col)
        if norm0 == 0.0:
            continue
        w = col.copy()
        for _ in range(2):
            for q in basis:
                w -= q * np.vdot(q, w)
        norm = np.linalg.norm(w)
        if norm <= rank_tol * norm0:
            continue
        basis.append(w / norm)
    new = basis[n_fixed:]
    if not new:
        return np.zeros((r, 0), complex)
    return np.column_stack(new)


@dataclass(frozen=True)
class IsometryRep:
    ps: ProblemSpace
    X: np.ndarray
    Y: np.ndarray
    Q_D: np.ndarray
    Q_R: np.ndarray
    Q_ND: np.ndarray
    Q_NR: np.ndarray
    A_mat: np.ndarray
    gram_defect: float

    @property
    def r(self) -> int:
        return self.ps.r

    @property
    def tau(self) -> int:
        return self.Q_D.shape[1]

    @property
    def p(self) -> int:
        return self.ps.p

    @property
    def d(self) -> int:
        return self.ps.d

    @property
    def I(self) -> np.ndarray:
        return self.ps.block(0)

    @property
    def S0(self) -> np.ndarray:
        return self.ps.ms.moments[0]


def build_isometry(ps: ProblemSpace, rank_tol: float | None = None) -> IsometryRep:
    if rank_tol is None:
        rank_tol = ps.rank_tol
    d, p, r = ps.d, ps.p, ps.r
    if d < 1:
        raise ValueError("the isometry needs d >= 1")
    X = ps.V[:, : d * p]
    Y = ps.V[:, p:]
    scale = max(1.0, float(np.linalg.norm(ps.T, 2)))

    gram_defect = float(np.linalg.norm(X.conj().T @ X - Y.conj().T @ Y, 2)) if r else 0.0
    if gram_defect > max(2.0 * rank_tol, 1e-10) * scale:
        raise WellDefinednessError(f"||X^*X - Y^*Y|| = {gram_defect:.3g} exceeds tolerance")

    Q_D = gram_schmidt(X, rank_tol)
    tau = Q_D.shape[1]
    C = Q_D.conj().T @ X
    AQ = Y @ np.linalg.pinv(C) if tau else np.zeros((r, 0), complex)
    residual = float(np.linalg.norm(AQ @ C - Y)) if r else 0.0
    if residual > 1e-6 * np.sqrt(scale):
        raise RankInconsistencyError(f"range of Y not covered by A on D(A) (residual {residual:.3g})")
    A_mat = AQ @ Q_D.conj().T

    Q_R = gram_schmidt(AQ, rank_tol)
    if Q_R.shape[1] != tau:
        raise RankInconsistencyError(f"dim R(A) = {Q_R.shape[1]} but dim D(A) = {tau}")

    last = ps.block(d)
    Q_ND = gram_schmidt(last - Q_D @ (Q_D.conj().T @ last), rank_tol, against=Q_D)
    first = ps.block(0)
    Q_NR = gram_schmidt(first - Q_R @ (Q_R.conj().T @ first), rank_tol, against=Q_R)
    m, m_prime = Q_ND.shape[1], Q_NR.shape[1]
    if tau + m != r or tau + m_prime != r:
        raise RankInconsistencyError(
            f"bases do not fill H: r={r}, tau={tau}, defects=({m}, {m_prime})"
        )
    return IsometryRep(ps=ps, X=X, Y=Y, Q_D=Q_D, Q_R=Q_R, Q_ND=Q_ND, Q_NR=Q_NR,
                       A_mat=A_mat, gram_defect=gram_defect)


def defect_numbers(ir: IsometryRep) -> tuple[int, int]:
    return ir.Q_ND.shape[1], ir.Q_NR.shape[1]


def is_determinate(ir: IsometryRep) -> bool:
    m, m_prime = defect_numbers(ir)
    return m == 0 or m_prime == 0
