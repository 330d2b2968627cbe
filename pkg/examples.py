"""
Example usage demonstrations for gruebleen-lab.
This file shows how to use the modules programmatically.
"""

# Example 1: Schemata, instances and Property S
def example_schema_core():
    """Run an instance on the half-deck and test the half swap X."""
    from gruebleen_lab.perm_worlds import DeckKind, build_deck_schema, half_swap
    from gruebleen_lab.schema_core import Instance, check_property_S, check_property_S_ext, run_instance

    half = build_deck_schema(4, DeckKind.HALF)
    swap_top = next(D for D in half.maps if D.name == "halves(1,0|2,3)")

    # Evolve the sorted deck one step
    start = half.index_of((0, 1, 2, 3))
    trajectory = run_instance(Instance(start, (swap_top,)), half)
    print(f"After one step: {half.label(trajectory.states[-1])}")

    # X is a similarity, but switching it on midway is not
    X = half_swap(4)
    print(f"Property S for X: {check_property_S(X, half).reason}")
    verdict = check_property_S_ext((half.identity(), X), half)
    print(f"Property S_ext for (1, X): {verdict.holds} ({verdict.witness})")


# Example 2: Classifying a proposition
def example_similarity_engine():
    """Classify 'marked cards in the same half' under the half-deck similarities."""
    from gruebleen_lab.perm_worlds import DeckKind, build_deck_schema, half_deck_candidates, marked_same_half
    from gruebleen_lab.schema_core import candidate_similarity_group
    from gruebleen_lab.similarity_engine import check_invariance, state_instances

    half = build_deck_schema(4, DeckKind.HALF)
    group = candidate_similarity_group(half, half_deck_candidates(4, half))
    report = check_invariance(marked_same_half({0, 1}, 4), group.maps, state_instances(half), half)
    print(f"{report.proposition}: {report.classification.value}")


# Example 3: Grue-bleen spectacles
def example_gruebleen():
    """Carry one full-deck history onto another."""
    import numpy as np

    from gruebleen_lab.perm_worlds import DeckKind, build_deck_schema
    from gruebleen_lab.similarity_engine import construct_gruebleen, random_instances, transform_instance

    deck = build_deck_schema(4, DeckKind.FULL, n_steps=3)
    rng = np.random.default_rng(0)
    A, B = random_instances(deck, 2, rng)
    spectacles = construct_gruebleen(A, B, deck)
    print(f"Spectacles: {[V.name for V in spectacles.maps]}")
    print(f"A seen through them is B: {transform_instance(spectacles, A, deck) == B}")


# Example 4: The triviality theorem
def example_theorem():
    """Count the invariant state propositions of a transitive schema."""
    from gruebleen_lab.perm_worlds import build_symmetric_schema
    from gruebleen_lab.similarity_engine import verify_triviality_theorem

    result = verify_triviality_theorem(build_symmetric_schema(4, n_steps=2), instance_pairs=10)
    print(f"Invariant propositions: {result.invariant_propositions}")
    print(f"Theorem holds: {result.holds}")


# Example 5: The binary shift
def example_shift_space():
    """Check the structural maps and the constant-sequence criterion."""
    from gruebleen_lab.shift_space import certify_exclusion, shift_similarity_group

    group = shift_similarity_group(4)
    print(f"sigma, beta, rho generate {len(group)} similarities at p=4")

    swap = list(range(16))
    swap[0], swap[1] = 1, 0
    print(f"Swapping 0000 and 0001: {certify_exclusion(swap, 4).to_dict()}")


# Example 6: Quantum pictures and the measurement chain
def example_quantum_pictures():
    """Make a qubit chain mimic an oscillator chain, then run a measurement."""
    import numpy as np

    from gruebleen_lab.quantum_pictures import (
        measurement_chain,
        oscillator_observables,
        picture_pair,
        random_state,
        verify_picture_equivalence,
    )

    Q, Q_prime = picture_pair(99)
    psi0 = random_state(8, np.random.default_rng(0))
    deviation = verify_picture_equivalence(psi0, Q, Q_prime, oscillator_observables())
    print(f"Largest expectation gap between Q and Q': {deviation:.2e}")

    report = measurement_chain(1 / np.sqrt(2), 1 / np.sqrt(2))
    print(f"<C> by stage: {report.correlation_stages}")


# Example 7: Hamiltonian maps
def example_hamiltonian_flows():
    """Compose two flows and steer a point."""
    from gruebleen_lab.hamiltonian_flows import PhasePoint, catalog, compose_hamiltonians, integrate

    z0 = PhasePoint([0.0], [0.0])
    H = compose_hamiltonians(catalog("FREE"), catalog("KICK"), 1.0)
    print(f"FREE then KICK: {integrate(H, z0, 1.0).to_dict()}")

    target = PhasePoint([2.0], [-1.0])
    steer = catalog("STEER", z0=z0, z1=target, tau=1.0)
    print(f"Steered to: {integrate(steer, z0, 1.0).to_dict()}")


# Example 8: Configuration and reports
def example_config():
    """Load a config and run one suite into a report."""
    from gruebleen_lab.__main__ import LabRunner
    from gruebleen_lab.config_loader import Config

    # Load configuration
    config = Config("config.yaml.example")
    print(f"Seed: {config.seed}")
    print(f"Tolerance: {config.tolerance}")

    runner = LabRunner(config.run_config(seed=7))
    report = runner.demo("measurement")
    print(report.summary())


if __name__ == "__main__":
    print("gruebleen-lab - Example Usage")
    print("=" * 50)
    print("\nThese examples demonstrate how to use the modules programmatically.")
    print("They are not meant to be run directly, but rather as reference code.")
    print("\nSee the individual example functions in this file for usage patterns.")
    print("\nFor normal operation, use: gruebleen-lab demo <name>")
