"""Block inversion through the Schur complement of the leading corner.

For M = [[A, B], [C, D]] with A invertible, M is invertible iff the Schur
complement H = D - C A^{-1} B is, and then

    M^{-1} = [[A^{-1} + A^{-1} B H^{-1} C A^{-1},  -A^{-1} B H^{-1}],
              [-H^{-1} C A^{-1},                    H^{-1}         ]].

All inverses are applied through LU factorizations and solves.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ContractionRegimeError, SingularBlockError

DEFAULT_INV_TOL = 1e-10


@dataclass(frozen=True)
class BlockOperator:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        n1, n2 = self.A.shape[0], self.D.shape[0]
        shapes = {"A": (n1, n1), "B": (n1, n2), "C": (n2, n1), "D": (n2, n2)}
        for name, shape in shapes.items():
            if getattr(self, name).shape != shape:
                raise ValueError(f"block {name} has shape {getattr(self, name).shape}, expected {shape}")

    @property
    def dims(self) -> tuple[int, int]:
        return self.A.shape[0], self.D.shape[0]

    @classmethod
    def split(cls, M: np.ndarray, n1: int) -> "BlockOperator":
        M = np.asarray(M)
        return cls(M[:n1, :n1], M[:n1, n1:], M[n1:, :n1], M[n1:, n1:])

    def dense(self) -> np.ndarray:
        return np.block([[self.A, self.B], [self.C, self.D]])


def is_invertible(M: np.ndarray, tol: float = DEFAULT_INV_TOL) -> bool:
    """smallest singular value >= tol * largest singular value."""
    if M.size == 0:
        return True
    s = np.linalg.svd(M, compute_uv=False)
    return bool(s[-1] > 0.0 and s[-1] >= tol * s[0])


def _lu(M: np.ndarray, which: str, tol: float):
    if not is_invertible(M, tol):
        raise SingularBlockError(which, f"block {which} is numerically singular")
    return scipy.linalg.lu_factor(M, check_finite=False)


def _lu_solve(lu, rhs: np.ndarray) -> np.ndarray:
    if rhs.size == 0:
        return np.zeros(rhs.shape, dtype=np.result_type(lu[0], rhs))
    return scipy.linalg.lu_solve(lu, rhs, check_finite=False)


def schur_complement(bo: BlockOperator, tol: float = DEFAULT_INV_TOL) -> np.ndarray:
    """D - C A^{-1} B; raises ``SingularBlockError("A", ...)`` for singular A."""
    n1, _ = bo.dims
    if n1 == 0:
        return bo.D.copy()
    lu = _lu(bo.A, "A", tol)
    return bo.D - bo.C @ _lu_solve(lu, bo.B)


def block_inverse(bo: BlockOperator, tol: float = DEFAULT_INV_TOL) -> BlockOperator:
    """Inverse of M in the same block decomposition.

    Raises ``SingularBlockError`` with ``which="A"`` for a singular corner,
    and ``which="schur"`` for a singular Schur complement, which given an
    invertible corner is the same as M being singular.
    """
    n1, n2 = bo.dims
    dtype = np.result_type(bo.A, bo.B, bo.C, bo.D, float)
    if n1:
        lu_a = _lu(bo.A, "A", tol)
        AinvB = _lu_solve(lu_a, bo.B)
        # C A^{-1} via the transposed system A^T X^T = C^T
        CAinv = scipy.linalg.lu_solve(lu_a, bo.C.T, trans=1, check_finite=False).T if n2 else np.zeros((0, n1), dtype)
        Ainv = _lu_solve(lu_a, np.eye(n1, dtype=dtype))
    else:
        AinvB = np.zeros((0, n2), dtype)
        CAinv = np.zeros((n2, 0), dtype)
        Ainv = np.zeros((0, 0), dtype)
    H = bo.D - bo.C @ AinvB
    if n2:
        lu_h = _lu(H, "schur", tol)
        Hinv = _lu_solve(lu_h, np.eye(n2, dtype=dtype))
        HinvCAinv = _lu_solve(lu_h, CAinv)
    else:
        Hinv = np.zeros((0, 0), dtype)
        HinvCAinv = np.zeros((0, n1), dtype)
    return BlockOperator(
        A=Ainv + AinvB @ HinvCAinv,
        B=-AinvB @ Hinv,
        C=-HinvCAinv,
        D=Hinv,
    )


def resolvent_contraction(K: np.ndarray, zeta: complex) -> np.ndarray:
    """(E - zeta K)^{-1} for ``|zeta| * ||K||_2 < 1``."""
    K = np.asarray(K)
    n = K.shape[0]
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    if abs(zeta) * np.linalg.norm(K, 2) >= 1.0:
        raise ContractionRegimeError(f"|zeta| * ||K|| >= 1 (zeta={zeta})")
    E = np.eye(n, dtype=complex)
    return scipy.linalg.solve(E - zeta * K, E, check_finite=False)
