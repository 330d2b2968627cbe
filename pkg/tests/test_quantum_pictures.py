"""Tests for unitary schedules, picture equivalence, the measurement chain and Schmidt analysis."""

import numpy as np
import pytest

from gruebleen_lab.quantum_pictures import (
    CHAIN_DIM,
    PAULI_X,
    PAULI_Z,
    Decomposition,
    Observable,
    StateVector,
    Unitary,
    UnitarySchedule,
    align_global_phase,
    apparatus_observer_interaction,
    bell_alternate_decomposition,
    bell_states,
    build_unitary_schema,
    chain_index,
    correlation_operator,
    evolve,
    heisenberg,
    interaction_observable,
    interaction_state,
    is_hermitian,
    is_unitary,
    measurement_chain,
    oscillator_chain_hamiltonian,
    oscillator_observables,
    phase_distance,
    picture_observable,
    picture_pair,
    product_similarity,
    qubit_chain_hamiltonian,
    random_observable,
    random_state,
    random_unitary,
    schmidt_coefficients,
    schmidt_rank,
    spin_apparatus_interaction,
    state_transporter,
    verify_picture_equivalence,
)
from gruebleen_lab.schema_core import Instance, SizeGuardError, check_property_S
from gruebleen_lab.similarity_engine import (
    Classification,
    PropositionKind,
    builtin_propositions,
    check_invariance,
)

CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


def test_matrix_checks():
    """Test the unitarity and Hermiticity predicates."""
    assert is_unitary(PAULI_X)
    assert not is_unitary(2 * np.eye(2))
    assert not is_unitary(np.ones((2, 3)))
    assert is_hermitian(PAULI_Z)
    assert not is_hermitian(np.array([[0, 1], [0, 0]]))


def test_value_types_validate():
    """Test validation of state and observable values."""
    with pytest.raises(ValueError):
        StateVector(np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        Observable(np.array([[0, 1], [0, 0]]))
    assert Observable(PAULI_Z).expectation(StateVector(np.array([0, 1]))) == pytest.approx(-1.0)


def test_schedule_cumulative():
    """Test cumulative products of a schedule."""
    rng = np.random.default_rng(0)
    schedule = UnitarySchedule.random(3, 4, rng)
    assert len(schedule) == 4
    assert np.allclose(schedule.cumulative(0), np.eye(3))
    assert np.allclose(schedule.cumulative(2), schedule.steps[1] @ schedule.steps[0])
    with pytest.raises(ValueError):
        schedule.cumulative(5)
    with pytest.raises(ValueError):
        UnitarySchedule((2 * np.eye(2),))
    with pytest.raises(ValueError):
        UnitarySchedule(())


def test_schedule_accepts_unitary_values():
    """Steps may be given as Unitary values; non-unitary matrices are refused up front."""
    rng = np.random.default_rng(2)
    steps = tuple(Unitary(random_unitary(3, rng)) for _ in range(3))
    schedule = UnitarySchedule(steps)
    assert schedule.dim == 3
    assert np.allclose(schedule.cumulative(3), steps[2].matrix @ steps[1].matrix @ steps[0].matrix)
    with pytest.raises(ValueError):
        Unitary(np.array([[1.0, 1.0], [0.0, 1.0]]))
    assert Unitary(state_transporter(np.eye(3)[0], np.eye(3)[2])).dim == 3


def test_evolution_preserves_norm():
    """Test that evolution keeps states normalized."""
    rng = np.random.default_rng(1)
    schedule = UnitarySchedule.from_hamiltonian(random_observable(4, rng), 0.1, 10)
    for psi in evolve(random_state(4, rng), schedule):
        assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-12)


def test_heisenberg_matches_schroedinger():
    """Test that both pictures give the same expectations."""
    rng = np.random.default_rng(2)
    schedule = UnitarySchedule.random(4, 3, rng)
    psi0 = random_state(4, rng)
    A = random_observable(4, rng)
    trajectory = evolve(psi0, schedule)
    for k in range(4):
        schroedinger = np.vdot(trajectory[k], A @ trajectory[k])
        heis = np.vdot(psi0, heisenberg(A, schedule, k) @ psi0)
        assert abs(schroedinger - heis) < 1e-12


def test_interaction_picture_expectations():
    """Test interaction-picture expectations against the Schroedinger picture."""
    rng = np.random.default_rng(3)
    H0 = random_observable(3, rng)
    A = random_observable(3, rng)
    psi_t = random_state(3, rng)
    psi_I = interaction_state(psi_t, H0, 0.7)
    A_I = interaction_observable(A, H0, 0.7)
    assert abs(np.vdot(psi_I, A_I @ psi_I) - np.vdot(psi_t, A @ psi_t)) < 1e-12


def test_picture_equivalence_qubits_and_oscillators():
    """Test that the qubit chain mimics the oscillator chain."""
    Q, Q_prime = picture_pair(20)
    rng = np.random.default_rng(4)
    for _ in range(5):
        psi0 = random_state(8, rng)
        assert verify_picture_equivalence(psi0, Q, Q_prime, oscillator_observables()) < 1e-10


def test_picture_observable_is_hermitian():
    """Test that transformed observables stay Hermitian."""
    Q, Q_prime = picture_pair(5)
    for B in oscillator_observables():
        assert is_hermitian(picture_observable(B, Q, Q_prime, 5))


def test_picture_equivalence_grid_mismatch():
    """Test that schedules on different grids are refused."""
    Q, _ = picture_pair(5)
    _, Q_prime = picture_pair(6)
    with pytest.raises(ValueError):
        verify_picture_equivalence(np.eye(8)[0], Q, Q_prime, oscillator_observables())


def test_chain_hamiltonians():
    """Test the chain Hamiltonians."""
    assert is_hermitian(qubit_chain_hamiltonian())
    assert is_hermitian(oscillator_chain_hamiltonian())
    assert all(is_hermitian(B) for B in oscillator_observables())
    with pytest.raises(ValueError):
        oscillator_chain_hamiltonian(2, (1.0, 2.0, 3.0))


def test_global_phase():
    """Test global phase alignment and phase distance."""
    rng = np.random.default_rng(5)
    psi = random_state(5, rng)
    assert phase_distance(psi, np.exp(1.3j) * psi) < 1e-12
    aligned = align_global_phase(psi)
    pivot = aligned[np.argmax(np.abs(aligned))]
    assert abs(pivot.imag) < 1e-15
    assert pivot.real > 0


def test_chain_layout():
    """Test the spin, apparatus and observer index layout."""
    assert CHAIN_DIM == 18
    assert chain_index(0, 0, 0) == 0
    assert chain_index(1, 2, 2) == 17
    for U in (spin_apparatus_interaction(), apparatus_observer_interaction()):
        assert is_unitary(U)
        assert np.allclose(U @ U, np.eye(CHAIN_DIM))
    C = correlation_operator()
    assert np.allclose(C @ C, C)


def test_measurement_chain_equal_superposition():
    """Test the measurement chain on an equal superposition."""
    r = 1 / np.sqrt(2)
    report = measurement_chain(r, r)
    assert report.correlation_stages == pytest.approx((0.0, 0.0, 1.0))
    assert report.correlation_before == pytest.approx(0.0)
    assert report.correlation_after == pytest.approx(1.0)
    assert report.deviation < 1e-12
    assert report.nonzero_branches() == 2
    assert report.branch_amplitudes["up,+,up"] == pytest.approx(r)


def test_measurement_chain_definite_spin():
    """Test the measurement chain on a definite spin."""
    report = measurement_chain(0, 1j)
    assert report.correlation_after == pytest.approx(1.0)
    assert report.nonzero_branches() == 1
    assert report.final_state[chain_index(1, 2, 2)] == pytest.approx(1j)


def test_measurement_chain_rejects_unnormalized():
    """Test that unnormalized amplitudes are refused."""
    with pytest.raises(ValueError):
        measurement_chain(1, 1)


def test_state_transporter_random_pairs():
    """Test that the transporter carries psi onto phi."""
    rng = np.random.default_rng(6)
    for _ in range(20):
        psi, phi = random_state(4, rng), random_state(4, rng)
        W = state_transporter(psi, phi)
        assert is_unitary(W)
        assert np.linalg.norm(W @ psi - phi) < 1e-10


def test_state_transporter_degenerate_cases():
    """Test the transporter for equal and phase-related states."""
    psi = random_state(3, np.random.default_rng(7))
    assert np.allclose(state_transporter(psi, psi), np.eye(3))
    W = state_transporter(psi, -psi)
    assert is_unitary(W)
    assert np.allclose(W @ psi, -psi)
    with pytest.raises(ValueError):
        state_transporter(psi, np.eye(4)[0])


def test_schmidt_ranks():
    """Test Schmidt ranks of product and entangled states."""
    standard = Decomposition.standard((2, 2))
    product = np.kron([1, 0], [1 / np.sqrt(2), 1 / np.sqrt(2)])
    assert schmidt_rank(product, standard) == 1
    for psi in bell_states().values():
        assert schmidt_rank(psi, standard) == 2
        assert np.allclose(schmidt_coefficients(psi, standard), [1 / np.sqrt(2)] * 2)
    with pytest.raises(ValueError):
        schmidt_rank(product, standard, cut=2)


def test_decomposition_validation():
    """Test decomposition argument checks."""
    with pytest.raises(ValueError):
        Decomposition((2, 2), np.eye(3))
    with pytest.raises(ValueError):
        Decomposition((2, 2), 2 * np.eye(4))
    with pytest.raises(ValueError):
        Decomposition((0, 2))


def test_product_similarity_preserves_schmidt_spectrum():
    """Test that local unitaries keep the Schmidt coefficients."""
    rng = np.random.default_rng(8)
    standard = Decomposition.standard((2, 3))
    V = product_similarity([random_unitary(2, rng), random_unitary(3, rng)], standard)
    assert is_unitary(V)
    psi = random_state(6, rng)
    assert np.allclose(schmidt_coefficients(V @ psi, standard), schmidt_coefficients(psi, standard))
    with pytest.raises(ValueError):
        product_similarity([np.eye(2)], standard)


def test_bell_states_are_products_in_the_alternate_split():
    """Test that Bell states factor in the alternate split."""
    report = bell_alternate_decomposition()
    for values in report.original.values():
        assert values == pytest.approx((1 / np.sqrt(2), 1 / np.sqrt(2)))
    assert report.max_alternate_second_value < 1e-12
    assert is_unitary(report.decomposition.basis)
    assert "alternate_cut" in report.to_dict()


def test_entanglement_invariant_only_under_product_similarities():
    """Test entanglement under local unitaries and under CNOT."""
    rng = np.random.default_rng(9)
    schema = build_unitary_schema(4, seed=9)
    P = builtin_propositions(PropositionKind.ENTANGLED_CUT, {"decomposition": Decomposition.standard((2, 2))})
    plus_zero = np.array([1, 0, 1, 0], dtype=complex) / np.sqrt(2)
    states = [plus_zero, bell_states()["phi+"], random_state(4, rng)]
    instances = [Instance(psi, (np.eye(4, dtype=complex),)) for psi in states]

    local = [
        product_similarity([random_unitary(2, rng), random_unitary(2, rng)], Decomposition.standard((2, 2)))
        for _ in range(3)
    ]
    report = check_invariance(P, local, instances, schema)
    assert report.classification is Classification.INVARIANT_NONTRIVIAL
    assert report.sampled

    flipped = check_invariance(P, [CNOT], instances, schema)
    assert flipped.classification is Classification.NOT_INVARIANT
    assert flipped.witness["before"] is False


def test_unitary_schema():
    """Test the unitary schema and its guards."""
    schema = build_unitary_schema(3, n_steps=2, probes=4, seed=1)
    rng = np.random.default_rng(10)
    verdict = check_property_S(random_unitary(3, rng), schema)
    assert verdict
    assert verdict.sampled
    assert not check_property_S(2 * np.eye(3), schema)
    assert len(schema.probe_maps()) == 4
    with pytest.raises(SizeGuardError):
        build_unitary_schema(64)
    with pytest.raises(ValueError):
        build_unitary_schema(0)
