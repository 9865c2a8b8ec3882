"""Moment sequences, block Toeplitz forms and atomic measures.

A moment sequence S_0..S_d of complex p x p matrices is solvable iff the
block Toeplitz matrix T with block (k, j) equal to S_{j-k} (negative
indices via S_{-k} = S_k^*) is positive semidefinite.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg

from .errors import (
    BlockShapeError,
    ComputationError,
    DimensionMismatchError,
    InvalidMomentsError,
    MalformedJSONError,
    MissingFieldError,
    MomentFileError,
)

DEFAULT_PSD_TOL = 1e-10
TWO_PI = 2.0 * np.pi


def _spectral_norm(M: np.ndarray) -> float:
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def relative_tol(M: np.ndarray, rel: float = DEFAULT_PSD_TOL) -> float:
    """``rel * max(1, ||M||_2)``."""
    return rel * max(1.0, _spectral_norm(M))


def _hermitian_psd_check(W: np.ndarray, tol: float, what: str) -> np.ndarray:
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise InvalidMomentsError(f"{what} must be square, got shape {W.shape}")
    skew = _spectral_norm(W - W.conj().T)
    if skew > tol:
        raise InvalidMomentsError(f"{what} is not Hermitian (||W - W^*|| = {skew:.3g})")
    W = 0.5 * (W + W.conj().T)
    lam = np.linalg.eigvalsh(W)
    if lam.size and lam[0] < -tol:
        raise InvalidMomentsError(f"{what} is not PSD (lambda_min = {lam[0]:.3g})")
    return W


@dataclass(frozen=True)
class MomentSequence:
    """Prescribed moments S_0..S_d, stored as an array of shape (d+1, p, p).

    S_0 must be Hermitian PSD within ``1e-10 * max(1, ||S_0||)``; it is
    stored exactly Hermitian. Negative-index moments come from :meth:`S`.
    """

    moments: np.ndarray

    def __post_init__(self):
        S = np.array(self.moments, dtype=complex)
        if S.ndim != 3 or S.shape[1] != S.shape[2] or S.shape[0] < 1 or S.shape[1] < 1:
            raise InvalidMomentsError(f"moments must have shape (d+1, p, p), got {S.shape}")
        if not np.all(np.isfinite(S)):
            raise InvalidMomentsError("moments contain non-finite entries")
        S[0] = _hermitian_psd_check(S[0], relative_tol(S[0]), "S_0")
        S.setflags(write=False)
        object.__setattr__(self, "moments", S)

    @property
    def p(self) -> int:
        return self.moments.shape[1]

    @property
    def d(self) -> int:
        return self.moments.shape[0] - 1

    def S(self, n: int) -> np.ndarray:
        if abs(n) > self.d:
            raise IndexError(f"moment index {n} outside [-{self.d}, {self.d}]")
        if n >= 0:
            return self.moments[n]
        return self.moments[-n].conj().T


@dataclass(frozen=True)
class ToeplitzForm:
    """Hermitian block Toeplitz matrix T; the form Phi(h, g) equals g^* T h."""

    T: np.ndarray
    tol: float
    p: int = 1
    ms: MomentSequence | None = field(default=None, compare=False, repr=False)

    def form(self, h: np.ndarray, g: np.ndarray) -> complex:
        return complex(np.vdot(g, self.T @ h))

    @property
    def d(self) -> int:
        return self.T.shape[0] // self.p - 1


def toeplitz_from_blocks(S: np.ndarray) -> np.ndarray:
    """Assemble T from raw blocks without validating S_0."""
    S = np.asarray(S, dtype=complex)
    n_blocks, p = S.shape[0], S.shape[1]
    T = np.empty((n_blocks * p, n_blocks * p), dtype=complex)
    for k in range(n_blocks):
        for j in range(n_blocks):
            n = j - k
            T[k * p:(k + 1) * p, j * p:(j + 1) * p] = S[n] if n >= 0 else S[-n].conj().T
    return T


def build_toeplitz(ms: MomentSequence, tol: float | None = None,
                   rel_tol: float = DEFAULT_PSD_TOL) -> ToeplitzForm:
    """Block Toeplitz form of ``ms``; ``tol`` defaults to ``rel_tol * max(1, ||T||_2)``."""
    T = toeplitz_from_blocks(ms.moments)
    if tol is None:
        tol = relative_tol(T, rel_tol)
    return ToeplitzForm(T=T, tol=tol, p=ms.p, ms=ms)


def check_solvable(tf: ToeplitzForm) -> tuple[bool, float]:
    """Return ``(lambda_min >= -tol, lambda_min)`` for the Toeplitz form."""
    try:
        lam = scipy.linalg.eigvalsh(tf.T)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise ComputationError(f"eigensolver failed: {exc}") from exc
    lambda_min = float(lam[0])
    return lambda_min >= -tf.tol, lambda_min


@dataclass(frozen=True)
class AtomicMeasure:
    """Finitely many atoms (t_m, W_m) with t_m in [0, 2pi) strictly ascending.

    ``angles`` has shape (n,) and ``weights`` shape (n, p, p).
    """

    p: int
    angles: np.ndarray
    weights: np.ndarray
    tol: float = field(default=1e-10, compare=False)

    def __post_init__(self):
        t = np.array(self.angles, dtype=float).reshape(-1)
        W = np.array(self.weights, dtype=complex).reshape(len(t), self.p, self.p)
        if t.size and (t[0] < 0.0 or t[-1] >= TWO_PI):
            raise InvalidMomentsError("atom angles must lie in [0, 2pi)")
        if np.any(np.diff(t) <= 0.0):
            raise InvalidMomentsError("atom angles must be distinct and ascending")
        for m in range(len(t)):
            W[m] = _hermitian_psd_check(W[m], self.tol * max(1.0, _spectral_norm(W[m])), f"W_{m}")
        t.setflags(write=False)
        W.setflags(write=False)
        object.__setattr__(self, "angles", t)
        object.__setattr__(self, "weights", W)

    @classmethod
    def from_pairs(cls, p: int, atoms, tol: float = 1e-10) -> "AtomicMeasure":
        """Build from ``(t, W)`` pairs in any order; angles are reduced mod 2pi."""
        pairs = []
        for t, W in atoms:
            t = float(np.mod(t, TWO_PI))
            if t >= TWO_PI:
                t = 0.0
            pairs.append((t, np.asarray(W, dtype=complex).reshape(p, p)))
        pairs.sort(key=lambda a: a[0])
        angles = np.array([a[0] for a in pairs], dtype=float)
        weights = np.array([a[1] for a in pairs], dtype=complex).reshape(len(pairs), p, p)
        return cls(p=p, angles=angles, weights=weights, tol=tol)

    def __len__(self) -> int:
        return len(self.angles)

    @property
    def total_mass(self) -> np.ndarray:
        return self.weights.sum(axis=0) if len(self) else np.zeros((self.p, self.p), complex)

    def distribution(self, theta) -> np.ndarray:
        """F(theta) = sum of W_m over t_m < theta (left-continuous, F(0) = 0)."""
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        out = np.zeros((len(theta), self.p, self.p), dtype=complex)
        if len(self):
            cum = np.concatenate([np.zeros((1, self.p, self.p)), np.cumsum(self.weights, axis=0)])
            idx = np.searchsorted(self.angles, theta, side="left")
            out = cum[idx]
        return out


def moments_from_measure(mu: AtomicMeasure, d: int) -> MomentSequence:
    """S_n = sum_m exp(i n t_m) W_m for n = 0..d."""
    n = np.arange(d + 1)
    phases = np.exp(1j * np.outer(n, mu.angles))
    S = np.einsum("nm,mij->nij", phases, mu.weights) if len(mu) else np.zeros((d + 1, mu.p, mu.p), complex)
    return MomentSequence(S)


# -- JSON I/O -----------------------------------------------------------------

def _encode_matrix(M: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def decode_matrix(obj, p: int | None, what: str) -> np.ndarray:
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise BlockShapeError(f"{what}: expected a non-empty list of rows")
    n = len(obj)
    if any(len(r) != n for r in obj):
        raise BlockShapeError(f"{what}: block is not square")
    if p is not None and n != p:
        raise DimensionMismatchError(f"{what}: expected {p}x{p} block, got {n}x{n}")
    M = np.empty((n, n), dtype=complex)
    for i, row in enumerate(obj):
        for j, z in enumerate(row):
            if (not isinstance(z, list) or len(z) != 2
                    or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in z)):
                raise BlockShapeError(f"{what}[{i}][{j}]: expected an [re, im] pair")
            M[i, j] = complex(z[0], z[1])
    return M


def read_json(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise MomentFileError(f"cannot read {path}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedJSONError(f"{path}: {exc}") from exc
    if not isinstance(obj, dict):
        raise MalformedJSONError(f"{path}: top level must be an object")
    return obj


def _require(obj: dict, key: str, kind, path):
    if key not in obj:
        raise MissingFieldError(f"{path}: missing field '{key}'")
    val = obj[key]
    if kind is int and (not isinstance(val, int) or isinstance(val, bool)):
        raise MalformedJSONError(f"{path}: field '{key}' must be an integer")
    if kind is list and not isinstance(val, list):
        raise MalformedJSONError(f"{path}: field '{key}' must be a list")
    return val


def moments_to_json(ms: MomentSequence) -> dict:
    return {"p": ms.p, "d": ms.d, "moments": [_encode_matrix(S) for S in ms.moments]}


def blocks_from_json(obj: dict, source="<json>") -> np.ndarray:
    """Decode the moment blocks of a moment file without validating S_0."""
    p = _require(obj, "p", int, source)
    d = _require(obj, "d", int, source)
    raw = _require(obj, "moments", list, source)
    if p < 1 or d < 0:
        raise DimensionMismatchError(f"{source}: need p >= 1 and d >= 0")
    if len(raw) != d + 1:
        raise DimensionMismatchError(f"{source}: expected {d + 1} moments, got {len(raw)}")
    return np.array([decode_matrix(M, p, f"moments[{n}]") for n, M in enumerate(raw)])


def moments_from_json(obj: dict, source="<json>") -> MomentSequence:
    return MomentSequence(blocks_from_json(obj, source))


def load_moments(path) -> MomentSequence:
    return moments_from_json(read_json(path), path)


def save_moments(ms: MomentSequence, path) -> None:
    Path(path).write_text(json.dumps(moments_to_json(ms)) + "\n")


def measure_to_json(mu: AtomicMeasure) -> dict:
    return {
        "p": mu.p,
        "atoms": [{"t": float(t), "W": _encode_matrix(W)} for t, W in zip(mu.angles, mu.weights)],
    }


def measure_from_json(obj: dict, source="<json>") -> AtomicMeasure:
    p = _require(obj, "p", int, source)
    raw = _require(obj, "atoms", list, source)
    if p < 1:
        raise DimensionMismatchError(f"{source}: need p >= 1")
    atoms = []
    for m, a in enumerate(raw):
        if not isinstance(a, dict):
            raise MalformedJSONError(f"{source}: atoms[{m}] must be an object")
        t = a.get("t")
        if t is None:
            raise MissingFieldError(f"{source}: atoms[{m}] missing field 't'")
        if "W" not in a:
            raise MissingFieldError(f"{source}: atoms[{m}] missing field 'W'")
        atoms.append((float(t), decode_matrix(a["W"], p, f"atoms[{m}].W")))
    return AtomicMeasure.from_pairs(p, atoms)


def load_measure(path) -> AtomicMeasure:
    return measure_from_json(read_json(path), path)


def save_measure(mu: AtomicMeasure, path) -> None:
    Path(path).write_text(json.dumps(measure_to_json(mu)) + "\n")
