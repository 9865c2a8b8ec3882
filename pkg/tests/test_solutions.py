import io

import numpy as np
import pytest

from trigmoment import (
    AtomicMeasure,
    SchurParameter,
    canonical_solution,
    evaluate_M,
    moments_from_measure,
    recover_distribution,
    verify_solution,
)
from trigmoment.errors import NonPSDIncrementError, ParameterError
from trigmoment.testkit import brute_force_transform, random_contraction, random_unitary

from conftest import pipeline, random_instance


def atoms_of(mu):
    return [(float(t), complex(W[0, 0])) for t, W in zip(mu.angles, mu.weights)]


@pytest.mark.parametrize("phi, expected", [
    (1.0, [(0.0, 0.5), (np.pi, 0.5)]),
    (-1.0, [(np.pi / 2, 0.5), (3 * np.pi / 2, 0.5)]),
])
def test_lebesgue_canonical(lebesgue, phi, expected):
    got = atoms_of(canonical_solution(lebesgue, phi))
    assert len(got) == 2
    for (t, w), (t_e, w_e) in zip(got, expected):
        assert abs(t - t_e) <= 1e-9 and abs(w - w_e) <= 1e-9


def test_point_mass_canonical(point_mass):
    t0, ir = point_mass
    mu = canonical_solution(ir, SchurParameter.zero(0))
    assert len(mu) == 1
    assert abs(mu.angles[0] - t0) <= 1e-9 and abs(mu.weights[0, 0, 0] - 1) <= 1e-9


def test_canonical_needs_unitary(lebesgue):
    with pytest.raises(ParameterError):
        canonical_solution(lebesgue, 0.5)
    with pytest.raises(ParameterError):
        canonical_solution(lebesgue, SchurParameter([[[0.5]], [[0.5]]]))


@pytest.mark.parametrize("seed", range(50))
def test_canonical_residuals_and_transform(seed):
    rng = np.random.default_rng(500 + seed)
    _, ms = random_instance(seed)
    ir = pipeline(ms)
    U = random_unitary(ir.Q_ND.shape[1], rng)
    mu = canonical_solution(ir, U)
    assert max(verify_solution(mu, ms)) <= 1e-8
    phi = SchurParameter.constant(U)
    z = 0.95 * np.sqrt(rng.uniform(size=20)) * np.exp(2j * np.pi * rng.uniform(size=20))
    for w in z:
        assert np.linalg.norm(evaluate_M(ir, phi, w).M - brute_force_transform(mu, w), 2) <= 1e-8


def test_verify_round_trip_and_perturbation():
    mu, ms = random_instance(31)
    assert max(verify_solution(mu, ms)) <= 1e-12
    eps = 1e-3
    P = np.zeros((ms.p, ms.p)); P[0, 0] = eps
    W = mu.weights.copy(); W[0] += P
    res = verify_solution(AtomicMeasure(mu.p, mu.angles, W), ms)
    assert res[0] == pytest.approx(eps, rel=1e-9)


def test_verify_dimension_mismatch(lebesgue):
    with pytest.raises(ValueError):
        verify_solution(AtomicMeasure.from_pairs(2, []), lebesgue.ps.ms)


def test_distinct_unitaries_distinct_distributions():
    rng = np.random.default_rng(7)
    _, ms = random_instance(13)
    ir = pipeline(ms)
    m = ir.Q_ND.shape[1]
    assert m > 0
    U1 = random_unitary(m, rng)
    U2 = random_unitary(m, rng)
    assert np.linalg.norm(U1 - U2, 2) >= 0.1
    grid = np.linspace(0, 2 * np.pi, 513)
    F1 = canonical_solution(ir, U1).distribution(grid)
    F2 = canonical_solution(ir, U2).distribution(grid)
    assert np.abs(F1 - F2).max() >= 1e-6


def test_recover_lebesgue(lebesgue):
    ds = recover_distribution(lebesgue, SchurParameter.zero(1), grid=512, radius=0.99)
    assert ds.grid[0] == 0 and ds.grid[-1] == 2 * np.pi and len(ds.grid) == 513
    assert np.abs(ds.values[:, 0, 0] - ds.grid / (2 * np.pi)).max() <= 1e-3
    assert ds.values[0, 0, 0] == 0


def test_recover_two_atoms(lebesgue):
    ds = recover_distribution(lebesgue, SchurParameter.constant(1.0), grid=512, radius=0.995)
    theta = ds.grid
    step = AtomicMeasure.from_pairs(1, [(0.0, [[0.5]]), (np.pi, [[0.5]])]).distribution(theta)
    far = np.minimum(np.minimum(theta, np.abs(theta - np.pi)), 2 * np.pi - theta) > 0.2
    assert np.abs(ds.values[far] - step[far]).max() <= 0.02


@pytest.mark.parametrize("seed", [0, 4, 9, 23])
def test_recover_total_mass_and_monotone(seed):
    rng = np.random.default_rng(seed)
    _, ms = random_instance(seed)
    ir = pipeline(ms)
    m = ir.Q_ND.shape[1]
    S0 = ms.moments[0]
    for phi in (SchurParameter.zero(m), SchurParameter.constant(random_contraction(m, rng)),
                SchurParameter.constant(random_contraction(m, rng, boundary=True))):
        ds = recover_distribution(ir, phi, grid=256, radius=0.98)
        assert np.linalg.norm(ds.values[-1] - S0, 2) <= 1e-6 * max(1, np.linalg.norm(S0, 2))
        assert np.linalg.eigvalsh(ds.increments())[:, 0].min() >= -1e-6 * max(1, np.linalg.norm(S0, 2))
        assert np.array_equal(ds.values, np.conj(np.swapaxes(ds.values, 1, 2)))


def test_recover_origin_atom_flag(lebesgue):
    phi = SchurParameter.constant(1.0)
    ds = recover_distribution(lebesgue, phi, grid=512, radius=0.99, origin_atom=False)
    assert abs(ds.values[-1, 0, 0] - 1) <= 1e-6


def test_recover_grid_validation(lebesgue):
    phi = SchurParameter.zero(1)
    with pytest.raises(ValueError):
        recover_distribution(lebesgue, phi, grid=16)
    with pytest.raises(ValueError):
        recover_distribution(lebesgue, phi, grid=np.linspace(0.1, 2 * np.pi, 100))
    with pytest.raises(ValueError):
        recover_distribution(lebesgue, phi, radius=1.0)
    ds = recover_distribution(lebesgue, phi, grid=np.linspace(0, 2 * np.pi, 40))
    assert len(ds.grid) == 40


def test_non_psd_increment_reports_interval(lebesgue):
    # a negative tolerance demands strictly positive increments of size >= 1
    with pytest.raises(NonPSDIncrementError) as exc:
        recover_distribution(lebesgue, SchurParameter.zero(1), grid=64, psd_tol=-1.0)
    a, b = exc.value.interval
    assert a == 0.0 and b > a


def test_csv_output(lebesgue):
    ds = recover_distribution(lebesgue, SchurParameter.zero(1), grid=64)
    buf = io.StringIO()
    ds.write_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "theta,F[0][0].re,F[0][0].im"
    assert len(lines) == 66
    row = [float(x) for x in lines[-1].split(",")]
    assert row[0] == 2 * np.pi and abs(row[1] - 1) < 1e-6
