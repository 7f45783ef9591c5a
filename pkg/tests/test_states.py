import numpy as np
import pytest

import oracles
from conftest import random_complex
from mlqsl import states
from mlqsl.errors import DimMismatch, NonHermitian, NotDensityMatrix
from mlqsl.sampling import random_density_matrix, random_hamiltonian, random_pure_vector, random_unitary
from mlqsl.states import DensityMatrix, Hamiltonian


def test_density_matrix_invariants(rng):
    for dim in range(1, 7):
        rho = random_density_matrix(dim, rng)
        assert abs(np.trace(rho.matrix) - 1) < 1e-10
        assert 1 / dim - 1e-10 <= rho.purity <= 1 + 1e-10
        assert rho.purity == pytest.approx(np.sum(rho.eigenvalues**2), abs=1e-10)
        assert np.all(np.diff(rho.eigenvalues) <= 0)


def test_density_matrix_rank(rng):
    rho = random_density_matrix(5, rng, rank=3)
    assert rho.rank == 3
    assert DensityMatrix.maximally_mixed(4).rank == 4


def test_density_matrix_rejects_bad_trace():
    with pytest.raises(NotDensityMatrix):
        DensityMatrix(np.eye(2))


def test_density_matrix_rejects_negative():
    with pytest.raises(NotDensityMatrix):
        DensityMatrix(np.diag([1.5, -0.5]))


def test_density_matrix_resymmetrizes_small_drift():
    m = np.array([[0.5, 0.1 + 1e-11], [0.1, 0.5]], dtype=complex)
    rho = DensityMatrix(m)
    assert rho.matrix[0, 1] == rho.matrix[1, 0].conjugate()
    with pytest.raises(NonHermitian):
        DensityMatrix(np.array([[0.5, 0.1 + 1e-6], [0.1, 0.5]]))


def test_hamiltonian_levels_grouped(rng):
    u = random_unitary(5, rng)
    H = Hamiltonian.from_levels([-1.0, 0.5, 2.0], [2, 1, 2], basis=u)
    assert [lv.multiplicity for lv in H.levels] == [2, 1, 2]
    np.testing.assert_allclose(H.energies, [-1.0, 0.5, 2.0], atol=1e-12)
    total = sum(lv.projector for lv in H.levels)
    assert np.linalg.norm(total - np.eye(5)) < 1e-9
    for k, a in enumerate(H.levels):
        for l, b in enumerate(H.levels):
            expected = a.projector if k == l else 0
            assert np.linalg.norm(a.projector @ b.projector - expected) < 1e-9


def test_unitary_matches_matrix_exponential(rng):
    H = random_hamiltonian(5, rng)
    for t in (0.0, 0.3, 2.7, -1.1):
        np.testing.assert_allclose(H.unitary(t), oracles.expm_via_scipy(H.matrix, t), atol=1e-10)


def test_evolve_zero_time(rng):
    rho = random_density_matrix(4, rng)
    H = random_hamiltonian(4, rng)
    np.testing.assert_allclose(states.evolve(rho, H, 0.0).matrix, rho.matrix, atol=1e-14)


def test_evolve_stationary_eigenprojector(rng):
    H = random_hamiltonian(4, rng)
    rho = DensityMatrix(H.levels[2].projector)
    for t in (0.5, 3.0, 17.0):
        np.testing.assert_allclose(states.evolve(rho, H, t).matrix, rho.matrix, atol=1e-12)


def test_evolve_qubit_rotation(rng):
    omega = 1.3
    H = Hamiltonian(np.diag([0.0, omega]))
    rho = random_density_matrix(2, rng)
    for t in (0.1, 1.0, 4.2):
        got = states.evolve(rho, H, t).matrix
        want = oracles.qubit_rotation(rho.matrix, omega, t)
        assert np.linalg.norm(got - want) < 1e-10


def test_evolve_preserves_spectrum(rng):
    for _ in range(20):
        dim = int(rng.integers(2, 7))
        rho = random_density_matrix(dim, rng)
        H = random_hamiltonian(dim, rng)
        out = states.evolve(rho, H, rng.uniform(0, 10))
        np.testing.assert_allclose(out.eigenvalues, rho.eigenvalues, atol=1e-9)
        assert out.purity == pytest.approx(rho.purity, abs=1e-10)


def test_evolve_dim_mismatch(rng):
    with pytest.raises(DimMismatch):
        states.evolve(random_density_matrix(3, rng), random_hamiltonian(4, rng), 1.0)


def test_fidelity_self_and_orthogonal(rng):
    rho = random_density_matrix(4, rng)
    assert states.fidelity(rho, rho) == pytest.approx(1.0, abs=1e-10)
    a = DensityMatrix.from_vector([1, 0, 0])
    b = DensityMatrix.from_vector([0, 1, 0])
    assert states.fidelity(a, b) == pytest.approx(0.0, abs=1e-12)


def test_fidelity_pure_states_overlap(rng):
    for _ in range(500):
        dim = int(rng.integers(2, 7))
        u, v = random_pure_vector(dim, rng), random_pure_vector(dim, rng)
        f = states.fidelity(DensityMatrix.from_vector(u), DensityMatrix.from_vector(v))
        assert abs(f - abs(np.vdot(u, v)) ** 2) <= 1e-10


def test_fidelity_symmetric_and_unitarily_invariant(rng):
    for _ in range(50):
        dim = int(rng.integers(2, 7))
        a = random_density_matrix(dim, rng)
        b = random_density_matrix(dim, rng, rank=int(rng.integers(1, dim + 1)))
        f = states.fidelity(a, b)
        assert -1e-10 <= f <= 1 + 1e-10
        assert abs(f - states.fidelity(b, a)) <= 1e-10
        u = random_unitary(dim, rng)
        fu = states.fidelity(DensityMatrix(u @ a.matrix @ u.conj().T), DensityMatrix(u @ b.matrix @ u.conj().T))
        assert abs(f - fu) <= 1e-9


def test_orbit_fidelity_matches_general(rng):
    for _ in range(30):
        dim = int(rng.integers(2, 7))
        rho = random_density_matrix(dim, rng)
        H = random_hamiltonian(dim, rng)
        t = rng.uniform(0, 5)
        assert states.orbit_fidelity(rho, H, t) == pytest.approx(
            states.fidelity(rho, states.evolve(rho, H, t)), abs=1e-10
        )


def test_purify_pure_state(rng):
    psi = random_pure_vector(3, rng)
    w = states.purify(DensityMatrix.from_vector(psi))
    expected = np.kron(psi, [1, 0, 0])
    phase = np.vdot(expected, w.vector)
    assert abs(abs(phase) - 1) < 1e-12
    np.testing.assert_allclose(w.vector, phase * expected, atol=1e-12)


def test_purify_maximally_mixed_qubit():
    w = states.purify(DensityMatrix.maximally_mixed(2))
    want = (np.kron([1, 0], [1, 0]) + np.kron([0, 1], [0, 1])) / np.sqrt(2)
    np.testing.assert_allclose(w.vector, want, atol=1e-12)
    np.testing.assert_allclose(oracles.partial_trace_second(w.vector, 2), np.eye(2) / 2, atol=1e-12)


def test_purify_partial_trace_oracle(rng):
    rho = random_density_matrix(4, rng, rank=3)
    w = states.purify(rho)
    assert abs(np.linalg.norm(w.vector) - 1) < 1e-12
    assert np.linalg.norm(oracles.partial_trace_second(w.vector, 4) - rho.matrix) < 1e-10
    assert np.linalg.norm(w.reduced() - rho.matrix) < 1e-10


def test_purified_overlap_trivial_cases(rng):
    rho = random_density_matrix(3, rng)
    H = random_hamiltonian(3, rng)
    assert states.purified_overlap(states.purify(rho), H, 0.0) == pytest.approx(1.0, abs=1e-12)
    stat = DensityMatrix(H.levels[0].projector)
    for t in (0.4, 2.0, 9.0):
        assert states.purified_overlap(states.purify(stat), H, t) == pytest.approx(1.0, abs=1e-12)


def test_purified_overlap_explicit_tensor_oracle(rng):
    for _ in range(30):
        dim = int(rng.integers(2, 6))
        rho = random_density_matrix(dim, rng)
        H = random_hamiltonian(dim, rng)
        t = rng.uniform(0, 6)
        w = states.purify(rho)
        want = oracles.explicit_purified_overlap(w.vector, oracles.expm_via_scipy(H.matrix, t))
        assert abs(states.purified_overlap(w, H, t) - want) <= 1e-10


def test_uhlmann_inequality_direction(rng):
    for _ in range(100):
        dim = int(rng.integers(2, 5))
        r1, r2 = random_density_matrix(dim, rng), random_density_matrix(dim, rng)
        w1, w2 = states.purify(r1), states.purify(r2)
        u = random_unitary(dim, rng)
        overlap = abs(np.vdot(w1.vector, np.kron(np.eye(dim), u) @ w2.vector)) ** 2
        assert overlap <= states.fidelity(r1, r2) + 1e-9


def test_purified_overlap_bounded_by_fidelity(rng):
    for _ in range(100):
        dim = int(rng.integers(2, 6))
        rho = random_density_matrix(dim, rng)
        H = random_hamiltonian(dim, rng)
        t = rng.uniform(0, 10)
        assert states.purified_overlap(states.purify(rho), H, t) <= states.fidelity(rho, states.evolve(rho, H, t)) + 1e-9


def test_expected_energy(rng):
    H = random_hamiltonian(4, rng)
    for lv in H.levels:
        rho = DensityMatrix(lv.projector / lv.multiplicity)
        assert states.expected_energy(rho, H) == pytest.approx(lv.energy, abs=1e-10)
    mixed = DensityMatrix.maximally_mixed(4)
    assert states.expected_energy(mixed, H) == pytest.approx(np.mean(H.eigenvalues), abs=1e-10)


def test_populated_levels(rng):
    H = random_hamiltonian(4, rng)
    assert states.populated_levels(DensityMatrix(H.levels[0].projector), H) == [0]
    assert states.populated_levels(DensityMatrix.maximally_mixed(4), H) == [0, 1, 2, 3]


def test_populated_levels_threshold():
    H = Hamiltonian(np.diag([0.0, 1.0, 2.0]))
    rho = DensityMatrix(np.diag([0.5, 0.5 - 1e-11, 1e-11]))
    assert states.populated_levels(rho, H) == [0, 1]
    assert states.populated_levels(rho, H, tol=1e-12) == [0, 1, 2]
