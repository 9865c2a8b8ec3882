"""Solution measures: atomic solutions from unitary extensions, and
distribution functions recovered from the Herglotz transform."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg

from .errors import ComputationError, NonPSDIncrementError, ParameterError
from .isometry import IsometryRep
from .moments import TWO_PI, AtomicMeasure, MomentSequence
from .nevanlinna import SchurParameter, extension_matrix, herglotz_values

CLUSTER_TOL = 1e-8
ATOM_DROP_TOL = 1e-12


def _as_parameter(phi) -> SchurParameter:
    if isinstance(phi, SchurParameter):
        return phi
    return SchurParameter.constant(phi)


def canonical_solution(ir: IsometryRep, phi_u, cluster_tol: float = CLUSTER_TOL) -> AtomicMeasure:
    """Atomic solution I^* E_t I for the unitary extension A (+) phi_u.

    ``phi_u`` is a constant unitary m x m matrix (or a constant
    :class:`SchurParameter`). Eigenvalues closer than ``cluster_tol`` share
    one spectral projection.
    """
    phi = _as_parameter(phi_u)
    phi.check_for(ir)
    if not phi.is_unitary_constant():
        raise ParameterError("canonical solutions need a constant unitary parameter")
    p = ir.p
    if ir.r == 0:
        return AtomicMeasure.from_pairs(p, [])
    U = extension_matrix(ir, phi.coefficients[0])
    defect = np.linalg.norm(U.conj().T @ U - np.eye(ir.r), 2)
    if defect > 1e-8:
        raise ComputationError(f"assembled extension is not unitary (||U^*U - E|| = {defect:.3g})")
    T, Z = scipy.linalg.schur(U, output="complex")
    lam = np.diag(T)
    order = np.argsort(np.mod(np.angle(lam), TWO_PI))
    lam, Z = lam[order], Z[:, order]

    clusters: list[list[int]] = [[0]]
    for i in range(1, len(lam)):
        if abs(lam[i] - lam[clusters[-1][-1]]) <= cluster_tol:
            clusters[-1].append(i)
        else:
            clusters.append([i])
    if len(clusters) > 1 and abs(lam[clusters[-1][-1]] - lam[clusters[0][0]]) <= cluster_tol:
        clusters[0] = clusters.pop() + clusters[0]

    drop = ATOM_DROP_TOL * max(1.0, float(np.linalg.norm(ir.S0, 2)))
    atoms = []
    for idx in clusters:
        G = Z[:, idx].conj().T @ ir.I
        W = G.conj().T @ G
        if np.linalg.norm(W, 2) <= drop:
            continue
        atoms.append((float(np.angle(lam[idx].mean())), W))
    return AtomicMeasure.from_pairs(p, atoms)


def verify_solution(mu: AtomicMeasure, ms: MomentSequence) -> list[float]:
    """Spectral-norm residuals ||sum_m e^{i n t_m} W_m - S_n|| for n = 0..d."""
    if mu.p != ms.p:
        raise ValueError(f"measure has p={mu.p}, moments have p={ms.p}")
    out = []
    for n in range(ms.d + 1):
        S = np.einsum("m,mij->ij", np.exp(1j * n * mu.angles), mu.weights) if len(mu) else 0.0
        out.append(float(np.linalg.norm(S - ms.moments[n], 2)))
    return out


@dataclass(frozen=True)
class DistributionSamples:
    grid: np.ndarray
    values: np.ndarray
    radius: float

    def increments(self) -> np.ndarray:
        return np.diff(self.values, axis=0)

    def write_csv(self, target) -> None:
        """Write ``theta,F[0][0].re,F[0][0].im,...`` rows to a path or text stream."""
        if isinstance(target, (str, Path)):
            with Path(target).open("w", newline="") as fh:
                self.write_csv(fh)
            return
        p = self.values.shape[1]
        header = ["theta"] + [f"F[{i}][{j}].{part}" for i in range(p) for j in range(p) for part in ("re", "im")]
        w = csv.writer(target, lineterminator="\n")
        w.writerow(header)
        for theta, F in zip(self.grid, self.values):
            row = [f"{theta:.17g}"]
            for z in F.reshape(-1):
                row += [f"{z.real:.17g}", f"{z.imag:.17g}"]
            w.writerow(row)


def _make_grid(grid) -> np.ndarray:
    if np.isscalar(grid):
        n = int(grid)
        if n < 1:
            raise ValueError("grid needs at least one interval")
        g = np.linspace(0.0, TWO_PI, n + 1)
    else:
        g = np.asarray(grid, dtype=float)
        if g.ndim != 1 or len(g) < 2 or g[0] != 0.0 or not np.isclose(g[-1], TWO_PI, rtol=0, atol=1e-12):
            raise ValueError("grid must ascend from 0 to 2*pi")
        g = g.copy()
        g[-1] = TWO_PI
    steps = np.diff(g)
    if np.any(steps <= 0):
        raise ValueError("grid must be strictly ascending")
    if steps.max() >= np.pi / 16:
        raise ValueError("grid resolution must be finer than pi/16")
    return g


def poisson_kernel(radius: float, theta) -> np.ndarray:
    """(1 - r^2) / |1 - r e^{i theta}|^2."""
    return (1.0 - radius ** 2) / (1.0 - 2.0 * radius * np.cos(theta) + radius ** 2)


def _hermitian_part(M: np.ndarray) -> np.ndarray:
    return 0.5 * (M + np.conj(np.swapaxes(M, -1, -2)))


def _atom_at_origin(ir: IsometryRep, phi: SchurParameter, radius: float, atom_tol: float) -> np.ndarray:
    """Estimate the weight of an atom sitting exactly at t = 0.

    g(s) = s/(2-s) Re M(1-s) tends to the atom as s -> 0; the limit is
    extrapolated quadratically from s = (1-r), (1-r)/2, (1-r)/4.
    """
    s = (1.0 - radius) / np.array([1.0, 2.0, 4.0])
    g = (s / (2.0 - s))[:, None, None] * _hermitian_part(herglotz_values(ir, phi, 1.0 - s))
    weights = np.array([np.prod([-s[j] / (s[i] - s[j]) for j in range(3) if j != i]) for i in range(3)])
    w0 = np.tensordot(weights, g, axes=1)
    w0 = _hermitian_part(w0)
    lam, Q = np.linalg.eigh(w0)
    w0 = (Q * np.clip(lam, 0.0, None)) @ Q.conj().T
    if np.linalg.norm(w0, 2) <= atom_tol * max(1.0, float(np.linalg.norm(ir.S0, 2))):
        return np.zeros_like(w0)
    return w0


def recover_distribution(ir: IsometryRep, phi: SchurParameter, grid=512, radius: float = 0.99,
                         psd_tol: float = 1e-6, origin_atom: bool = True,
                         threads: int = 1) -> DistributionSamples:
    """Sample F on ``grid`` from the Poisson integral of Re M(r e^{-i theta}).

    Increments are integrated by composite Simpson on each grid interval,
    with sub-panels no wider than (1 - r)/10. The Poisson integral splits an
    atom at t = 0 between both ends of [0, 2pi]; with ``origin_atom`` that
    atom is estimated, its smoothed kernel removed from the integrand and
    its weight added as an exact jump at 0+. F(2pi) = S_0 holds either way.
    """
    if not 0.0 < radius < 1.0:
        raise ValueError("radius must lie in (0, 1)")
    phi = _as_parameter(phi)
    phi.check_for(ir)
    g = _make_grid(grid)
    p = ir.p
    max_step = (1.0 - radius) / 10.0
    panels = np.maximum(2, 2 * np.ceil(np.diff(g) / (2.0 * max_step)).astype(int))

    nodes = [np.zeros(1)]
    for a, b, k in zip(g[:-1], g[1:], panels):
        nodes.append(np.linspace(a, b, k + 1)[1:])
    theta = np.concatenate(nodes)
    f = _hermitian_part(herglotz_values(ir, phi, radius * np.exp(-1j * theta), threads=threads))

    w0 = _atom_at_origin(ir, phi, radius, 1e-6) if origin_atom else np.zeros((p, p), complex)
    if np.any(w0):
        f = f - poisson_kernel(radius, theta)[:, None, None] * w0

    values = np.zeros((len(g), p, p), dtype=complex)
    start = 0
    for i, k in enumerate(panels):
        seg = f[start:start + k + 1]
        h = (g[i + 1] - g[i]) / k
        inc = (h / 3.0) * (seg[0] + seg[-1] + 4.0 * seg[1:-1:2].sum(axis=0) + 2.0 * seg[2:-1:2].sum(axis=0))
        values[i + 1] = values[i] + inc / TWO_PI
        start += k
    values[1:] += w0
    values = _hermitian_part(values)

    tol = psd_tol * max(1.0, float(np.linalg.norm(ir.S0, 2)))
    incs = np.diff(values, axis=0)
    lam_min = np.linalg.eigvalsh(incs)[:, 0]
    bad = np.flatnonzero(lam_min < -tol)
    if bad.size:
        i = int(bad[0])
        raise NonPSDIncrementError((float(g[i]), float(g[i + 1])), float(lam_min[i]))
    return DistributionSamples(grid=g, values=values, radius=radius)
