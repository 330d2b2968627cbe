"""
Verification suites behind ``demo`` and ``verify``.

Each suite takes a RunConfig and returns CheckEntry values; suites are pure and
seeded, so the same config always produces the same entries.
"""

import logging
from typing import Callable, Dict, List

import numpy as np

from . import hamiltonian_flows as hf
from . import quantum_pictures as qp
from .config_loader import RunConfig
from .perm_worlds import (
    ColorKind,
    DeckKind,
    build_color_schema,
    build_deck_schema,
    build_symmetric_schema,
    grue_bleen_spectacles,
    half_deck_candidates,
    half_swap,
    marked_same_half,
)
from .report import CheckEntry, Status
from .schema_core import (
    Instance,
    candidate_similarity_group,
    check_property_S,
    check_property_S_ext,
    is_dynamical_symmetry,
    is_transitive,
    random_bijections,
)
from .shift_space import (
    ShiftKind,
    build_shift_schema,
    certify_exclusion,
    shift_similarity_group,
    structural_map,
)
from .similarity_engine import (
    Classification,
    PropositionKind,
    builtin_propositions,
    check_invariance,
    construct_gruebleen,
    diagram_deviation,
    random_instances,
    state_instances,
    transform_instance,
    verify_triviality_theorem,
)

logger = logging.getLogger(__name__)

Suite = Callable[[RunConfig], List[CheckEntry]]

HALF_DECK_CARDS = 4


def decks_suite(config: RunConfig) -> List[CheckEntry]:
    """Full and half decks: transitivity, the half swap X, and the marked-cards proposition."""
    n = HALF_DECK_CARDS
    entries = []
    full = build_deck_schema(n, DeckKind.FULL, max_cards=config.deck_cards)
    half = build_deck_schema(n, DeckKind.HALF, max_cards=config.deck_cards)
    entries.append(CheckEntry.expect("full deck acts transitively", is_transitive(full), True))
    entries.append(CheckEntry.expect("half deck does not act transitively", is_transitive(half), False))

    X = half_swap(n)
    verdict = check_property_S(X, half)
    entries.append(CheckEntry.expect("X satisfies Property S on the half deck", verdict.holds, True))
    entries.append(CheckEntry.expect("X is not a half-deck shuffle", half.contains(X), False))
    commuting = sum(is_dynamical_symmetry(X, D, half) for D in half.maps)
    entries.append(
        CheckEntry.expect(
            "X commutes only with the shuffles that treat both halves alike",
            commuting,
            2,
            note="similarity without being a symmetry of every shuffle",
        )
    )
    identity = half.identity()
    drifting = check_property_S_ext((identity, X), half)
    entries.append(
        CheckEntry.expect(
            "(1, X) fails Property S_ext",
            drifting.holds,
            False,
            witness=drifting.witness,
        )
    )
    entries.append(
        CheckEntry.expect("(X, X) satisfies Property S_ext", check_property_S_ext((X, X), half).holds, True)
    )

    group = candidate_similarity_group(half, half_deck_candidates(n, half))
    entries.append(CheckEntry.expect("candidate-restricted group order", len(group), 8))
    entries.append(CheckEntry.expect("candidate-restricted set is a group", group.closed, True))
    report = check_invariance(marked_same_half({0, 1}, n), group.maps, state_instances(half), half)
    entries.append(
        CheckEntry.expect(
            "marked cards in the same half",
            report.classification.value,
            Classification.INVARIANT_NONTRIVIAL.value,
            note="candidate-restricted similarity set",
        )
    )
    return entries


def shift_suite(config: RunConfig) -> List[CheckEntry]:
    """sigma, beta, rho on the periodic full shift and the constant-sequence exclusion."""
    entries = []
    rng = np.random.default_rng(config.seed)
    for p in (2, 3, 4):
        schema = build_shift_schema(p, max_period=config.max_period)
        for kind in ShiftKind:
            V = structural_map(kind, p)
            entries.append(
                CheckEntry.expect(f"{V.name} satisfies Property S (p={p})", check_property_S(V, schema).holds, True)
            )
        entries.append(CheckEntry.expect(f"shift schema is not transitive (p={p})", is_transitive(schema), False))

        excluded = 0
        consistent = 0
        for V in random_bijections(schema, config.random_candidates, rng):
            certificate = certify_exclusion(V, p)
            if certificate.excluded:
                excluded += 1
                consistent += not check_property_S(V, schema).holds
        entries.append(
            CheckEntry.expect(
                f"every excluded candidate also fails Property S (p={p})",
                consistent,
                excluded,
                note=f"{excluded} of {config.random_candidates} random bijections excluded",
            )
        )

    schema = build_shift_schema(4)
    group = shift_similarity_group(4)
    report = check_invariance(
        builtin_propositions(PropositionKind.IS_CONSTANT), group.maps, state_instances(schema), schema
    )
    entries.append(
        CheckEntry.expect(
            "sequence is constant",
            report.classification.value,
            Classification.INVARIANT_NONTRIVIAL.value,
        )
    )
    swap = list(range(16))
    swap[0], swap[1] = 1, 0
    certificate = certify_exclusion(swap, 4)
    entries.append(
        CheckEntry.expect(
            "0000 <-> 0001 is excluded by the shift criterion",
            certificate.shift,
            1,
            witness=certificate.to_dict(),
        )
    )
    return entries


def quantum_pictures_suite(config: RunConfig) -> List[CheckEntry]:
    """Picture equivalence, Heisenberg and interaction pictures, Bell re-decomposition."""
    entries = []
    rng = np.random.default_rng(config.seed)
    tolerance = config.tolerance

    U_sched, V_sched = qp.picture_pair(config.grid_points - 1)
    psi0 = qp.random_state(8, rng)
    observables = qp.oscillator_observables(3)
    deviation = qp.verify_picture_equivalence(psi0, U_sched, V_sched, observables)
    entries.append(CheckEntry.at_most("Q reproduces Q' through B~", deviation, tolerance))

    B = observables[0]
    B_tilde = qp.picture_observable(B, U_sched, V_sched, len(U_sched))
    spectrum_gap = float(np.max(np.abs(np.linalg.eigvalsh(B_tilde) - np.linalg.eigvalsh(B))))
    entries.append(CheckEntry.at_most("B~ keeps the spectrum of B", spectrum_gap, tolerance))

    unitarity = max(
        float(np.max(np.abs(U.conj().T @ U - np.eye(8))))
        for sched in (U_sched, V_sched)
        for U in (sched.cumulative(k) for k in range(len(sched) + 1))
    )
    entries.append(CheckEntry.at_most("cumulative operators stay unitary", unitarity, config.unitarity))

    worst = 0.0
    for _ in range(50):
        dim = int(rng.integers(2, 9))
        sched = qp.UnitarySchedule.random(dim, 3, rng)
        psi = qp.random_state(dim, rng)
        A = qp.random_observable(dim, rng)
        for k, x in enumerate(qp.evolve(psi, sched)):
            schrodinger = np.vdot(x, A @ x)
            heisenberg = np.vdot(psi, qp.heisenberg(A, sched, k) @ psi)
            worst = max(worst, float(abs(schrodinger - heisenberg)))
    entries.append(CheckEntry.at_most("Heisenberg and Schrodinger expectations agree", worst, 1e-12))

    H0 = qp.qubit_chain_hamiltonian()
    t = 0.7
    psi_t = qp.UnitarySchedule.from_hamiltonian(H0, t, 1).cumulative(1) @ psi0
    A = qp.random_observable(8, rng)
    gap = abs(
        np.vdot(psi_t, A @ psi_t)
        - np.vdot(qp.interaction_state(psi_t, H0, t), qp.interaction_observable(A, H0, t) @ qp.interaction_state(psi_t, H0, t))
    )
    entries.append(CheckEntry.at_most("interaction picture expectations agree", float(gap), tolerance))

    bell = qp.bell_alternate_decomposition()
    entries.append(
        CheckEntry.at_most("Bell states are products across A|B", bell.max_alternate_second_value, 1e-12)
    )
    original_gap = max(
        abs(s - 1 / np.sqrt(2)) for values in bell.original.values() for s in values
    )
    entries.append(CheckEntry.at_most("Bell states are maximally entangled across 1|2", float(original_gap), 1e-12))

    standard = qp.Decomposition.standard((2, 2))
    entangled = builtin_propositions(PropositionKind.ENTANGLED_CUT, {"decomposition": standard})
    schema = qp.build_unitary_schema(
        4, n_steps=1, seed=config.seed, tolerance=tolerance, max_dimension=config.max_dimension
    )
    local = [
        qp.product_similarity([qp.random_unitary(2, rng), qp.random_unitary(2, rng)], standard)
        for _ in range(10)
    ]
    bells = [qp.bell_states()["phi+"], np.array([1, 0, 0, 0], dtype=complex)]
    instances = [schema_instance(schema, psi) for psi in bells]
    report = check_invariance(entangled, local, instances, schema)
    entries.append(
        CheckEntry.expect(
            "entanglement across 1|2 under local unitaries",
            report.classification.value,
            Classification.INVARIANT_NONTRIVIAL.value,
            note="sampled evidence",
        )
    )
    return entries


def schema_instance(schema, psi):
    return Instance(psi, (schema.identity(),) * schema.n_steps)


def measurement_suite(config: RunConfig) -> List[CheckEntry]:
    """Spin, apparatus and observer become correlated: <C> goes from 0 to 1."""
    entries = []
    rng = np.random.default_rng(config.seed)
    report = qp.measurement_chain(1 / np.sqrt(2), 1 / np.sqrt(2))
    entries.append(CheckEntry.at_most("<C> before the interactions", abs(report.correlation_before), config.state_norm))
    entries.append(CheckEntry.at_most("<C> after the interactions", abs(report.correlation_after - 1), config.state_norm))
    worst_before = worst_after = worst_state = worst_weights = 0.0
    for _ in range(20):
        amplitudes = qp.random_state(2, rng)
        run = qp.measurement_chain(amplitudes[0], amplitudes[1])
        worst_before = max(worst_before, abs(run.correlation_before))
        worst_after = max(worst_after, abs(run.correlation_after - 1))
        worst_state = max(worst_state, run.deviation)
        weights = sorted(abs(v) ** 2 for v in run.branch_amplitudes.values())
        expected = sorted(abs(a) ** 2 for a in amplitudes)
        worst_weights = max(worst_weights, max(abs(w - e) for w, e in zip(weights, expected)))
    entries.append(CheckEntry.at_most("<C> = 0 initially for random amplitudes", worst_before, config.state_norm))
    entries.append(CheckEntry.at_most("<C> = 1 finally for random amplitudes", worst_after, config.state_norm))
    entries.append(CheckEntry.at_most("final state matches the two-branch form", worst_state, config.state_norm))
    entries.append(CheckEntry.at_most("branch weights are |alpha|^2 and |beta|^2", worst_weights, config.state_norm))
    return entries


def hamiltonian_suite(config: RunConfig) -> List[CheckEntry]:
    """Composition, reversal, steering and accuracy of Hamiltonian flows."""
    entries = []
    steps = config.steps
    rng = np.random.default_rng(config.seed)
    z0 = hf.PhasePoint([0.3], [-0.2])

    free, kick = hf.catalog("FREE"), hf.catalog("KICK")
    sequential = hf.integrate(kick, hf.integrate(free, z0, 1.0, steps), 1.0, steps)
    composed = hf.integrate(hf.compose_hamiltonians(free, kick, 1.0), z0, 1.0, steps)
    entries.append(CheckEntry.at_most("composed flow of FREE then KICK", composed.distance(sequential), 1e-6))

    harmonic = hf.catalog("HARMONIC")
    driven = hf.catalog("DRIVEN")
    sequential = hf.integrate(driven, hf.integrate(harmonic, z0, 1.0, steps), 1.0, steps)
    composed = hf.integrate(hf.compose_hamiltonians(harmonic, driven, 1.0), z0, 1.0, steps)
    entries.append(CheckEntry.at_most("composed flow of HARMONIC then DRIVEN", composed.distance(sequential), 1e-6))

    worst = 0.0
    for H in (harmonic, driven):
        there = hf.integrate(H, z0, 1.0, steps)
        back = hf.integrate(hf.reverse_hamiltonian(H, 1.0), there, 1.0, steps)
        worst = max(worst, back.distance(z0))
    entries.append(CheckEntry.at_most("reversal round trip", worst, 1e-6))

    start = hf.PhasePoint(rng.normal(size=3), rng.normal(size=3))
    target = hf.PhasePoint(rng.normal(size=3), rng.normal(size=3))
    steer = hf.steering_hamiltonian(start, target, 1.0)
    entries.append(
        CheckEntry.at_most("steering reaches its target", hf.integrate(steer, start, 1.0, steps).distance(target), 1e-6)
    )

    period = hf.integrate(harmonic, z0, 2 * np.pi, steps)
    entries.append(CheckEntry.at_most("oscillator returns after one period", period.distance(z0), 1e-8))

    coarse = hf.integrate(harmonic, z0, 2 * np.pi, 100).distance(z0)
    fine = hf.integrate(harmonic, z0, 2 * np.pi, 200).distance(z0)
    ratio = coarse / fine
    entries.append(
        CheckEntry(
            "halving the step shrinks the error about 16x",
            Status.PASS if 8 <= ratio <= 32 else Status.FAIL,
            float(ratio),
            [8, 32],
        )
    )

    det = hf.flow_jacobian_determinant(harmonic, z0, 1.0)
    entries.append(CheckEntry.at_most("flow of a quadratic H preserves phase volume", abs(det - 1), 1e-4))
    preconditions = all(e.passed for e in entries)
    entries.append(
        CheckEntry(
            "Hamiltonian maps leave only trivial statements",
            Status.PASS if preconditions else Status.FAIL,
            note="follows from reversibility, composition and steering; the theorem itself is checked on finite schemata",
        )
    )
    return entries


def gruebleen_suite(config: RunConfig) -> List[CheckEntry]:
    """Any instance can be carried onto any other with time-dependent spectacles."""
    entries = []
    rng = np.random.default_rng(config.seed)
    pairs = config.instance_pairs

    deck = build_deck_schema(4, DeckKind.FULL, n_steps=3, max_cards=config.deck_cards)
    commuting = 0
    extended = 0
    for _ in range(pairs):
        A, B = random_instances(deck, 2, rng)
        V = construct_gruebleen(A, B, deck)
        commuting += transform_instance(V, A, deck) == B and diagram_deviation(V, A, B, deck) == 0.0
        extended += V.verdict(deck).holds
    entries.append(CheckEntry.expect("full deck: diagram commutes exactly", commuting, pairs))
    entries.append(CheckEntry.expect("full deck: spectacles satisfy Property S_ext", extended, pairs))

    unitary = qp.build_unitary_schema(
        4, n_steps=4, seed=config.seed, tolerance=config.tolerance, max_dimension=config.max_dimension
    )
    worst = 0.0
    extended = 0
    for _ in range(pairs):
        A, B = random_instances(unitary, 2, rng)
        V = construct_gruebleen(A, B, unitary)
        worst = max(worst, diagram_deviation(V, A, B, unitary))
        extended += V.verdict(unitary).holds
    entries.append(CheckEntry.at_most("unitary dim 4: diagram commutes", worst, config.tolerance))
    entries.append(
        CheckEntry.expect(
            "unitary dim 4: spectacles satisfy Property S_ext",
            extended,
            pairs,
            note="sampled evidence over probe unitaries",
        )
    )

    for kind, expected in ((ColorKind.FIXED, False), (ColorKind.RECOLORABLE, True)):
        colors = build_color_schema(kind, n_steps=4)
        verdict = grue_bleen_spectacles(2, 4).verdict(colors)
        entries.append(
            CheckEntry.expect(f"grue/bleen spectacles in the {kind.value.lower()} colour world", verdict.holds, expected)
        )
    return entries


def theorem_suite(config: RunConfig) -> List[CheckEntry]:
    """Only the two trivial state propositions survive the maximal group of a transitive schema."""
    entries = []
    sizes = [config.size] if config.size is not None else list(range(2, config.theorem_states + 1))
    for size in sizes:
        schema = build_symmetric_schema(size, n_steps=2, max_states=config.max_states_exhaustive)
        result = verify_triviality_theorem(
            schema,
            max_states=config.max_states_exhaustive,
            max_subset_states=config.max_subset_states,
            instance_pairs=config.instance_pairs,
            seed=config.seed,
        )
        entries.append(
            CheckEntry.expect(
                f"invariant state propositions on {size} states",
                result.invariant_propositions,
                2,
                witness=result.to_dict(),
            )
        )
    if config.size is None:
        half = build_deck_schema(HALF_DECK_CARDS, DeckKind.HALF, max_cards=config.deck_cards_orbit)
        group = candidate_similarity_group(half, half_deck_candidates(HALF_DECK_CARDS, half))
        result = verify_triviality_theorem(
            half, group=group, max_subset_states=config.max_subset_states, seed=config.seed
        )
        entries.append(
            CheckEntry.expect(
                "half deck: preconditions fail and a nontrivial proposition survives",
                (result.preconditions_met, result.invariant_propositions > 2),
                (False, True),
                witness={"orbits": result.orbit_count, "example": result.nontrivial_example},
            )
        )
    return entries


SUITES: Dict[str, Suite] = {
    "decks": decks_suite,
    "shift": shift_suite,
    "quantum-pictures": quantum_pictures_suite,
    "measurement": measurement_suite,
    "hamiltonian": hamiltonian_suite,
    "gruebleen": gruebleen_suite,
    "theorem": theorem_suite,
}

DEMOS = ("decks", "shift", "quantum-pictures", "measurement", "hamiltonian", "gruebleen")
