"""Nevanlinna-type parameterization of all solutions.

Every solution F corresponds to one Schur-class function Phi mapping
H (-) D(A) into H (-) R(A), through its Herglotz transform

    M(zeta) = int (1 + zeta e^{it}) / (1 - zeta e^{it}) dF(t)
            = cA(zeta) + cB(zeta) Phi(zeta) (E + cC(zeta) Phi(zeta))^{-1} cD(zeta).

The coefficients are obtained from the resolvent of the compression of A
to its domain. Two independent routes to the same M are provided: the
generalized resolvent 2 I^* (E - zeta (A + Phi))^{-1} I - S_0, and the
block inversion of E - zeta (A + Phi) over D(A) (+) H (-) D(A).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ComputationError, ParameterError
from .isometry import IsometryRep
from .schur_linalg import BlockOperator, block_inverse, resolvent_contraction

CONTRACTION_SLACK = 1e-12
CHECK_RADIUS = 1.0 - 1e-6
CHECK_POINTS = 256


class SchurParameter:
    """Matrix polynomial Phi(zeta) = sum_k zeta^k Phi_k with contractive values.

    Matrices act from coordinates in ``Q_ND`` (columns) to coordinates in
    ``Q_NR`` (rows). A single coefficient makes the parameter constant.
    """

    def __init__(self, coefficients, check: bool = True):
        coeffs = np.array(coefficients, dtype=complex)
        if coeffs.ndim == 2:
            coeffs = coeffs[None]
        if coeffs.ndim != 3 or coeffs.shape[0] < 1:
            raise ParameterError(f"coefficients must have shape (K, m', m), got {coeffs.shape}")
        # trailing zero coefficients do not change the function
        while coeffs.shape[0] > 1 and not np.any(coeffs[-1]):
            coeffs = coeffs[:-1]
        coeffs.setflags(write=False)
        self.coefficients = coeffs
        if check and not self.is_contraction():
            raise ParameterError("parameter is not contractive on the sampled circle")

    @classmethod
    def zero(cls, m: int) -> "SchurParameter":
        return cls(np.zeros((1, m, m)))

    @classmethod
    def constant(cls, phi) -> "SchurParameter":
        phi = np.atleast_2d(np.asarray(phi, dtype=complex))
        return cls(phi[None])

    @property
    def kind(self) -> str:
        return "constant" if self.coefficients.shape[0] == 1 else "matrix-polynomial"

    @property
    def shape(self) -> tuple[int, int]:
        return self.coefficients.shape[1], self.coefficients.shape[2]

    def __call__(self, zeta) -> np.ndarray:
        """Phi(zeta); an array of zetas gives a stack of matrices."""
        zeta = np.asarray(zeta, dtype=complex)
        powers = zeta[..., None] ** np.arange(self.coefficients.shape[0])
        return np.tensordot(powers, self.coefficients, axes=([-1], [0]))

    def is_contraction(self, slack: float = CONTRACTION_SLACK) -> bool:
        if 0 in self.shape:
            return True
        if self.kind == "constant":
            return bool(np.linalg.norm(self.coefficients[0], 2) <= 1.0 + slack)
        z = CHECK_RADIUS * np.exp(2j * np.pi * np.arange(CHECK_POINTS) / CHECK_POINTS)
        norms = np.linalg.norm(self(z), ord=2, axis=(1, 2))
        return bool(norms.max() <= 1.0 + slack)

    def is_unitary_constant(self, tol: float = 1e-10) -> bool:
        if self.kind != "constant":
            return False
        U = self.coefficients[0]
        n = U.shape[0]
        if n == 0 or U.shape[1] == 0:
            return U.shape[0] == U.shape[1]
        return U.shape[0] == U.shape[1] and bool(np.linalg.norm(U.conj().T @ U - np.eye(n), 2) <= tol)

    def check_for(self, ir: IsometryRep) -> None:
        expected = (ir.Q_NR.shape[1], ir.Q_ND.shape[1])
        if self.shape != expected:
            raise ParameterError(f"parameter has shape {self.shape}, defect spaces need {expected}")

    def __repr__(self) -> str:
        return f"SchurParameter(kind={self.kind!r}, shape={self.shape}, degree={self.coefficients.shape[0] - 1})"


@dataclass(frozen=True)
class NevanlinnaCoefficients:
    """Coefficients at one point.

    ``cal_*`` are the p x p, p x m', m x m', m x p matrices entering the
    linear-fractional formula; ``bold_*`` are the r x r operators on H they
    are built from (in the coordinates of the Gram factor).
    """

    zeta: complex
    cal_A: np.ndarray
    cal_B: np.ndarray
    cal_C: np.ndarray
    cal_D: np.ndarray
    bold_A: np.ndarray
    bold_B: np.ndarray
    bold_C: np.ndarray
    bold_D: np.ndarray


@dataclass(frozen=True)
class HerglotzSample:
    zeta: complex
    M: np.ndarray

    @property
    def real_part(self) -> np.ndarray:
        return 0.5 * (self.M + self.M.conj().T)

    def min_real_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.real_part)[0]) if self.M.size else 0.0


def _check_disk(zeta) -> None:
    if np.any(np.abs(zeta) >= 1.0):
        raise ValueError("evaluation points must lie in the open unit disk")


@dataclass(frozen=True)
class _Reduced:
    """Constant matrices the coefficients are assembled from."""

    I_D: np.ndarray     # Q_D^* I               (tau x p)
    K_D: np.ndarray     # Q_D^* A Q_D           (tau x tau)
    B_D: np.ndarray     # Q_D^* Q_NR            (tau x m')
    L: np.ndarray       # Q_ND^* A Q_D          (m x tau)
    N_R: np.ndarray     # Q_ND^* Q_NR           (m x m')


def _reduced(ir: IsometryRep) -> _Reduced:
    QDh = ir.Q_D.conj().T
    AQ = ir.A_mat @ ir.Q_D
    return _Reduced(
        I_D=QDh @ ir.I,
        K_D=QDh @ AQ,
        B_D=QDh @ ir.Q_NR,
        L=ir.Q_ND.conj().T @ AQ,
        N_R=ir.Q_ND.conj().T @ ir.Q_NR,
    )


def coefficients_at(ir: IsometryRep, zeta: complex) -> NevanlinnaCoefficients:
    _check_disk(zeta)
    zeta = complex(zeta)
    red = _reduced(ir)
    try:
        Ginv = resolvent_contraction(red.K_D, zeta)
    except Exception as exc:  # the compression is a contraction, so this is internal
        raise ComputationError(f"compressed resolvent failed at zeta={zeta}: {exc}") from exc
    Q_D, Q_ND, Q_NR, I = ir.Q_D, ir.Q_ND, ir.Q_NR, ir.I
    bold_A = Q_D @ Ginv @ Q_D.conj().T
    bold_B = -zeta * bold_A
    P_perp = Q_ND @ Q_ND.conj().T
    bold_D = -zeta * P_perp @ ir.A_mat @ bold_A
    bold_C = -zeta * P_perp + zeta * bold_D @ (Q_D @ Q_D.conj().T)
    cal_A = 2.0 * I.conj().T @ bold_A @ I - ir.S0
    cal_B = 2.0 * I.conj().T @ bold_B @ Q_NR
    cal_C = Q_ND.conj().T @ bold_C @ Q_NR
    cal_D = Q_ND.conj().T @ bold_D @ I
    return NevanlinnaCoefficients(zeta, cal_A, cal_B, cal_C, cal_D, bold_A, bold_B, bold_C, bold_D)


def _coefficients_batch(ir: IsometryRep, zetas: np.ndarray, red: _Reduced):
    """cal_A..cal_D for a 1-d array of points, stacked along axis 0."""
    n = zetas.shape[0]
    tau, p = red.I_D.shape
    z = zetas[:, None, None]
    if tau:
        G = np.eye(tau) - z * red.K_D
        rhs = np.broadcast_to(np.concatenate([red.I_D, red.B_D], axis=1), (n, tau, p + red.B_D.shape[1]))
        sol = np.linalg.solve(G, rhs)
    else:
        sol = np.zeros((n, 0, p + red.B_D.shape[1]), complex)
    GI, GB = sol[:, :, :p], sol[:, :, p:]
    IDh = red.I_D.conj().T
    cal_A = 2.0 * IDh @ GI - ir.S0
    cal_B = -2.0 * z * (IDh @ GB)
    cal_C = -z * red.N_R - z ** 2 * (red.L @ GB)
    cal_D = -z * (red.L @ GI)
    return cal_A, cal_B, cal_C, cal_D


def herglotz_values(ir: IsometryRep, phi: SchurParameter, zetas, threads: int = 1) -> np.ndarray:
    """M(zeta) for an array of points via the linear-fractional formula; shape (n, p, p).

    With ``threads > 1`` the points are split into contiguous chunks; every
    point is computed independently, so the result does not depend on it.
    """
    zetas = np.atleast_1d(np.asarray(zetas, dtype=complex)).reshape(-1)
    _check_disk(zetas)
    phi.check_for(ir)
    red = _reduced(ir)
    if threads > 1 and len(zetas) > threads:
        chunks = np.array_split(zetas, threads)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda z: _herglotz_chunk(ir, phi, z, red), chunks))
        return np.concatenate(parts, axis=0)
    return _herglotz_chunk(ir, phi, zetas, red)


def _herglotz_chunk(ir: IsometryRep, phi: SchurParameter, zetas: np.ndarray, red: _Reduced) -> np.ndarray:
    cal_A, cal_B, cal_C, cal_D = _coefficients_batch(ir, zetas, red)
    m = ir.Q_ND.shape[1]
    if m == 0:
        return cal_A
    Phi = phi(zetas)
    if Phi.ndim == 2:
        Phi = np.broadcast_to(Phi, (len(zetas),) + Phi.shape)
    inner = np.eye(m) + cal_C @ Phi
    cond = np.linalg.cond(inner)
    if np.any(~np.isfinite(cond)) or np.any(cond > 1e12):
        raise ComputationError("E + cC(zeta) Phi(zeta) is numerically singular")
    return cal_A + cal_B @ Phi @ np.linalg.solve(inner, cal_D)


def evaluate_M(ir: IsometryRep, phi: SchurParameter, zeta: complex) -> HerglotzSample:
    return HerglotzSample(complex(zeta), herglotz_values(ir, phi, [zeta])[0])


def extension_matrix(ir: IsometryRep, phi_value: np.ndarray) -> np.ndarray:
    """A (+) Phi as an r x r matrix: A on D(A), Phi from H (-) D(A) to H (-) R(A)."""
    return ir.A_mat + ir.Q_NR @ phi_value @ ir.Q_ND.conj().T


def evaluate_M_resolvent(ir: IsometryRep, phi: SchurParameter, zeta: complex) -> HerglotzSample:
    """M(zeta) = 2 I^* (E - zeta (A (+) Phi(zeta)))^{-1} I - S_0."""
    _check_disk(zeta)
    phi.check_for(ir)
    K = extension_matrix(ir, phi(zeta))
    R = resolvent_contraction(K, zeta) if ir.r else np.zeros((0, 0), complex)
    M = 2.0 * ir.I.conj().T @ R @ ir.I - ir.S0
    return HerglotzSample(complex(zeta), M)


def evaluate_M_block(ir: IsometryRep, phi: SchurParameter, zeta: complex) -> HerglotzSample:
    """M(zeta) from the (1,1) block of the inverse of E - zeta (A (+) Phi) over D(A) (+) its complement."""
    _check_disk(zeta)
    phi.check_for(ir)
    Q = np.concatenate([ir.Q_D, ir.Q_ND], axis=1)
    K = extension_matrix(ir, phi(zeta))
    M_op = np.eye(ir.r) - zeta * (Q.conj().T @ K @ Q)
    inv = block_inverse(BlockOperator.split(M_op, ir.tau))
    I_D = ir.Q_D.conj().T @ ir.I
    M = 2.0 * I_D.conj().T @ inv.A @ I_D - ir.S0
    return HerglotzSample(complex(zeta), M)


def default_samples(d: int) -> int:
    n = max(256, 8 * (d + 1))
    return 1 << (n - 1).bit_length()


def taylor_moments(ir: IsometryRep, phi: SchurParameter, n_max: int,
                   radius: float = 0.5, n_samples: int | None = None) -> np.ndarray:
    """Moments read off the Taylor series M(zeta) = S_0 + 2 sum_{n>=1} S_n zeta^n.

    The coefficients are extracted by an FFT of samples on ``|zeta| = radius``.
    Returns an array of shape (n_max + 1, p, p).
    """
    if not 0.0 < radius < 1.0:
        raise ValueError("radius must lie in (0, 1)")
    if n_samples is None:
        n_samples = max(default_samples(ir.d), 1 << (4 * n_max - 1).bit_length() if n_max else 4)
    if n_samples < 4 * n_max or n_samples & (n_samples - 1):
        raise ValueError("n_samples must be a power of two and at least 4 * n_max")
    k = np.arange(n_samples)
    zetas = radius * np.exp(2j * np.pi * k / n_samples)
    values = herglotz_values(ir, phi, zetas)
    c = np.fft.fft(values, axis=0)[: n_max + 1] / n_samples
    c /= (radius ** np.arange(n_max + 1))[:, None, None]
    c[1:] *= 0.5
    return c
