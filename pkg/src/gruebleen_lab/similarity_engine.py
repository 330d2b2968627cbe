"""
Spectacles and what they do to instances and propositions.

An ExtendedSimilarity (V_0, ..., V_N) re-describes an instance (x_0, D) as
(V_0 x_0, V_{k+1} D_{k+1,k} V_k^-1).  This module transforms instances,
classifies propositions by how they behave under a set of spectacles, builds
the time-dependent grue-bleen spectacles that carry one instance onto another,
and checks the triviality theorem on finite schemata.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .quantum_pictures import Decomposition, schmidt_rank
from .schema_core import (
    DEFAULT_MAX_STATES,
    Instance,
    SchemaError,
    SimilarityGroup,
    SizeGuardError,
    TheorySchema,
    check_property_S_ext,
    is_transitive,
    maximal_similarity_group,
    orbits,
    run_instance,
    Verdict,
    _jsonable,
)

logger = logging.getLogger(__name__)


class SimilarityError(ValueError):
    """Raised when spectacles carry an instance outside K, or a construction's preconditions fail."""


class PropositionError(RuntimeError):
    """Raised when a proposition's predicate fails on some input."""


class Arity(Enum):
    STATE = "STATE"
    INSTANCE = "INSTANCE"


class Classification(Enum):
    INVARIANT_TRIVIAL_TRUE = "INVARIANT_TRIVIAL_TRUE"
    INVARIANT_TRIVIAL_NOT_TRUE = "INVARIANT_TRIVIAL_NOT_TRUE"
    INVARIANT_NONTRIVIAL = "INVARIANT_NONTRIVIAL"
    NOT_INVARIANT = "NOT_INVARIANT"

    @property
    def invariant(self) -> bool:
        return self is not Classification.NOT_INVARIANT


class PropositionKind(Enum):
    FIXED_POINT = "FIXED_POINT"
    MARKED_SAME_HALF = "MARKED_SAME_HALF"
    IS_CONSTANT = "IS_CONSTANT"
    STATE_EQUALS = "STATE_EQUALS"
    ENTANGLED_CUT = "ENTANGLED_CUT"


@dataclass(frozen=True)
class ExtendedSimilarity:
    """Time-dependent spectacles (V_0, ..., V_N)."""

    maps: Tuple[Any, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(self.maps))
        if not self.maps:
            raise SimilarityError("Spectacles need at least one map")

    def __len__(self) -> int:
        return len(self.maps)

    def __getitem__(self, k: int) -> Any:
        return self.maps[k]

    @classmethod
    def time_independent(cls, V: Any, n_steps: int, name: str = "") -> "ExtendedSimilarity":
        return cls((V,) * (n_steps + 1), name or "time-independent")

    @classmethod
    def identity(cls, schema: Any) -> "ExtendedSimilarity":
        return cls.time_independent(schema.identity(), schema.n_steps, "identity")

    def followed_by(self, other: "ExtendedSimilarity", schema: Any) -> "ExtendedSimilarity":
        """Pointwise composition (W_k V_k): look through self, then through other."""
        if len(other) != len(self):
            raise SimilarityError(
                f"Cannot compose spectacles of lengths {len(self)} and {len(other)}"
            )
        return ExtendedSimilarity(
            tuple(schema.compose(W, V) for W, V in zip(other.maps, self.maps)),
            f"{other.name}*{self.name}",
        )

    def verdict(self, schema: Any) -> Verdict:
        return check_property_S_ext(self.maps, schema)

    def validate(self, schema: Any):
        verdict = self.verdict(schema)
        if not verdict:
            raise SimilarityError(f"Spectacles '{self.name}' fail Property S_ext: {verdict.reason}")

    def to_dict(self, schema: Any = None) -> Dict[str, Any]:
        if isinstance(schema, TheorySchema):
            return {"name": self.name, "maps": [list(V.perm) for V in self.maps]}
        return {"name": self.name, "maps": [_jsonable(V) for V in self.maps]}


@dataclass(frozen=True)
class Proposition:
    """
    A named predicate over states or instances.

    Predicates take ``(x, schema)`` for STATE arity and ``(instance, schema)`` for
    INSTANCE arity.  Any truthy result is "true"; everything else is "not true".
    """

    name: str
    arity: Arity
    predicate: Callable[[Any, Any], Any] = field(compare=False)

    def evaluate(self, instance: Instance, schema: Any) -> bool:
        subject = instance.x0 if self.arity is Arity.STATE else instance
        try:
            return bool(self.predicate(subject, schema))
        except Exception as e:
            raise PropositionError(f"Proposition '{self.name}' failed: {e}") from e

    def holds_at(self, x: Any, schema: Any) -> bool:
        if self.arity is not Arity.STATE:
            raise PropositionError(f"Proposition '{self.name}' is not a state proposition")
        return self.evaluate(Instance(x, (schema.identity(),) * schema.n_steps), schema)


@dataclass(frozen=True)
class InvarianceReport:
    proposition: str
    classification: Classification
    witness: Optional[Dict[str, Any]] = None
    sampled: bool = False
    seed: Optional[int] = None
    evaluations: int = 0

    @property
    def invariant(self) -> bool:
        return self.classification.invariant

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "proposition": self.proposition,
            "classification": self.classification.value,
            "sampled": self.sampled,
        }
        if self.witness is not None:
            data["witness"] = self.witness
        if self.seed is not None:
            data["seed"] = self.seed
        return data


def transform_instance(spectacles: ExtendedSimilarity, instance: Instance, schema: Any) -> Instance:
    """
    View an instance through spectacles.

    Returns:
        (V_0 x_0, (V_1 D_{1,0} V_0^-1, ..., V_N D_{N,N-1} V_{N-1}^-1))

    Raises:
        SimilarityError: If lengths disagree or a transformed map leaves K
    """
    if len(spectacles) != len(instance.maps) + 1:
        raise SimilarityError(
            f"Spectacles of length {len(spectacles)} do not fit an instance with "
            f"{len(instance.maps)} maps"
        )
    V = spectacles.maps
    x0 = schema.apply(V[0], instance.x0)
    maps = []
    for k, D in enumerate(instance.maps):
        image = schema.compose(schema.compose(V[k + 1], D), schema.invert(V[k]))
        if not schema.contains(image):
            raise SimilarityError(
                f"Transformed map on interval {k}->{k + 1} is not kinematically possible"
            )
        maps.append(image)
    return Instance(x0, tuple(maps))


def _as_spectacles(element: Any, schema: Any) -> ExtendedSimilarity:
    if isinstance(element, ExtendedSimilarity):
        return element
    return ExtendedSimilarity.time_independent(element, schema.n_steps, schema.describe_map(element))


def check_invariance(P: Proposition, group: Iterable[Any], instances: Sequence[Instance],
                     schema: Any, seed: Optional[int] = None,
                     sampled: Optional[bool] = None) -> InvarianceReport:
    """
    Classify a proposition under a set of similarities.

    Group elements may be single maps (used as time-independent spectacles) or
    ExtendedSimilarity values.  The first truth-value flip found is returned as
    the witness.

    Raises:
        SimilarityError: If the instance set is empty or spectacles leave K
        PropositionError: If the predicate fails on any input
    """
    if not instances:
        raise SimilarityError("check_invariance needs a nonempty instance set")
    spectacles = [_as_spectacles(g, schema) for g in group]
    if sampled is None:
        sampled = not schema.exhaustive
    values = []
    evaluations = 0
    for instance in instances:
        value = P.evaluate(instance, schema)
        values.append(value)
        evaluations += 1
        for V in spectacles:
            image = transform_instance(V, instance, schema)
            flipped = P.evaluate(image, schema)
            evaluations += 1
            if flipped != value:
                logger.debug(f"Proposition '{P.name}' flips under '{V.name}'")
                return InvarianceReport(
                    P.name,
                    Classification.NOT_INVARIANT,
                    {
                        "instance": instance.to_dict(schema),
                        "similarity": V.to_dict(schema),
                        "before": value,
                        "after": flipped,
                    },
                    sampled,
                    seed,
                    evaluations,
                )
    if all(values):
        classification = Classification.INVARIANT_TRIVIAL_TRUE
    elif not any(values):
        classification = Classification.INVARIANT_TRIVIAL_NOT_TRUE
    else:
        classification = Classification.INVARIANT_NONTRIVIAL
    return InvarianceReport(P.name, classification, None, sampled, seed, evaluations)


def construct_gruebleen(instanceA: Instance, instanceB: Instance, schema: Any) -> ExtendedSimilarity:
    """
    Build spectacles that carry instance A onto instance B.

    V_0 is the first kinematic map found sending x_0 to y_0, after which
    V_k = E_{k,k-1} V_{k-1} D_{k,k-1}^-1.

    Raises:
        SimilarityError: If the schema is not reversible, not transitive, or no
            V_0 exists
    """
    if not schema.reversible:
        raise SimilarityError("Grue-bleen spectacles need a reversible schema")
    if isinstance(schema, TheorySchema) and not is_transitive(schema):
        raise SimilarityError(f"K does not act transitively on the states of '{schema.name}'")
    if len(instanceA.maps) != len(instanceB.maps):
        raise SimilarityError("Instances must have the same number of steps")
    instanceA.validate(schema)
    instanceB.validate(schema)
    V0 = schema.transport(instanceA.x0, instanceB.x0)
    if V0 is None:
        raise SimilarityError("No kinematic map carries the first initial state onto the second")
    seq = [V0]
    for D, E in zip(instanceA.maps, instanceB.maps):
        seq.append(schema.compose(schema.compose(E, seq[-1]), schema.invert(D)))
    return ExtendedSimilarity(tuple(seq), "grue-bleen")


def diagram_deviation(spectacles: ExtendedSimilarity, instanceA: Instance,
                      instanceB: Instance, schema: Any) -> float:
    """Largest distance between V_k x_k and y_k over the time grid."""
    xs = run_instance(instanceA, schema).states
    ys = run_instance(instanceB, schema).states
    if len(xs) != len(spectacles) or len(ys) != len(spectacles):
        raise SimilarityError("Spectacles and instances cover different time grids")
    return max(
        schema.state_distance(schema.apply(V, x), y) for V, x, y in zip(spectacles.maps, xs, ys)
    )


def transformed_composition_holds(spectacles: ExtendedSimilarity, instance: Instance,
                                  schema: Any) -> bool:
    """Check D~_{k,j} = D~_{k,l} D~_{l,j} for the maps V_k D_{k,j} V_j^-1."""
    trajectory = run_instance(instance, schema)
    last = len(instance.maps)
    V = spectacles.maps
    seen: Dict[Tuple[int, int], Any] = {}

    def tilde(k: int, j: int) -> Any:
        if (k, j) not in seen:
            seen[k, j] = schema.compose(
                schema.compose(V[k], trajectory.derived_map(k, j)), schema.invert(V[j])
            )
        return seen[k, j]

    for k in range(last + 1):
        for j in range(last + 1):
            for l in range(last + 1):
                if not schema.same_map(tilde(k, j), schema.compose(tilde(k, l), tilde(l, j))):
                    return False
    return True


def state_instances(schema: TheorySchema) -> List[Instance]:
    """One instance per state, with identity evolution, for feeding state propositions in."""
    identity = schema.identity()
    return [Instance(x, (identity,) * schema.n_steps) for x in schema.all_states()]


def random_instances(schema: Any, count: int, rng: np.random.Generator) -> List[Instance]:
    return [
        Instance(
            schema.sample_state(rng),
            tuple(schema.sample_map(rng) for _ in range(schema.n_steps)),
        )
        for _ in range(count)
    ]


@dataclass(frozen=True)
class TheoremReport:
    """Outcome of checking the triviality theorem on one finite schema."""

    schema: str
    states: int
    reversible: bool
    transitive: bool
    group_source: str
    group_order: int
    orbit_count: int
    invariant_propositions: int
    subsets_enumerated: bool
    nontrivial_example: Optional[List[Any]]
    instance_pairs: int
    pairs_transformed: int
    seed: Optional[int]

    @property
    def preconditions_met(self) -> bool:
        return self.reversible and self.transitive

    @property
    def conclusion_trivial(self) -> bool:
        return self.invariant_propositions == 2

    @property
    def holds(self) -> bool:
        """
        The theorem is borne out: when its preconditions hold only the two
        trivial propositions survive and every sampled pair was transformable.
        """
        if not self.preconditions_met:
            return True
        return self.conclusion_trivial and self.pairs_transformed == self.instance_pairs

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "schema": self.schema,
            "states": self.states,
            "reversible": self.reversible,
            "transitive": self.transitive,
            "preconditions_met": self.preconditions_met,
            "group_source": self.group_source,
            "group_order": self.group_order,
            "orbit_count": self.orbit_count,
            "invariant_propositions": self.invariant_propositions,
            "subsets_enumerated": self.subsets_enumerated,
            "instance_pairs": self.instance_pairs,
            "pairs_transformed": self.pairs_transformed,
            "holds": self.holds,
            "sampled": self.instance_pairs > 0,
        }
        if self.nontrivial_example is not None:
            data["nontrivial_example"] = self.nontrivial_example
        if self.seed is not None:
            data["seed"] = self.seed
        return data


def _count_invariant_subsets(maps: Sequence[Any], n: int) -> Tuple[int, Optional[int]]:
    """Enumerate all 2^n subsets as bitmasks; return the invariant count and a nontrivial one."""
    full = (1 << n) - 1
    count = 0
    example = None
    for mask in range(1 << n):
        invariant = True
        for V in maps:
            image = 0
            for i in range(n):
                if mask >> i & 1:
                    image |= 1 << V.perm[i]
            if image != mask:
                invariant = False
                break
        if invariant:
            count += 1
            if example is None and mask not in (0, full):
                example = mask
    return count, example


def verify_triviality_theorem(schema: TheorySchema, group: Optional[Iterable[Any]] = None,
                              max_states: int = DEFAULT_MAX_STATES,
                              max_subset_states: int = 12, instance_pairs: int = 50,
                              seed: int = 0,
                              require_preconditions: bool = False) -> TheoremReport:
    """
    Check the triviality theorem on a finite schema.

    Every state proposition is a subset of S; it is invariant under a group
    exactly when it is a union of orbits.  Subsets are enumerated outright when
    |S| <= ``max_subset_states`` and the count is cross-checked against the
    orbit decomposition.  When the schema is reversible and transitive, random
    instance pairs are carried onto each other with grue-bleen spectacles.

    Args:
        schema: The schema to examine
        group: Similarities to use; the maximal group is searched when omitted
        max_states: Guard for the maximal-group search
        max_subset_states: Guard for subset enumeration
        instance_pairs: Number of seeded instance pairs for the instance-level check
        seed: Seed for the instance sampler
        require_preconditions: Raise instead of reporting when the schema is not
            reversible and transitive

    Raises:
        SimilarityError: If ``require_preconditions`` is set and the preconditions fail
        SizeGuardError: If no group is given and |S| exceeds ``max_states``
    """
    if not isinstance(schema, TheorySchema):
        raise SchemaError("The triviality theorem is checked on finite schemata only")
    transitive = is_transitive(schema)
    if require_preconditions and not (schema.reversible and transitive):
        raise SimilarityError(
            f"Theorem preconditions unmet for '{schema.name}': "
            f"reversible={schema.reversible}, transitive={transitive}"
        )
    if group is None:
        found = maximal_similarity_group(schema, max_states)
        maps, source = list(found.maps), found.source
    elif isinstance(group, SimilarityGroup):
        maps, source = list(group.maps), group.source
    else:
        maps, source = [schema.coerce_map(V) for V in group], "supplied"
    n = len(schema.states)
    orbit_list = orbits(maps, schema)
    expected = 2 ** len(orbit_list)
    enumerated = n <= max_subset_states
    example_states = None
    if enumerated:
        count, mask = _count_invariant_subsets(maps, n)
        if count != expected:
            raise RuntimeError(
                f"Subset enumeration found {count} invariant propositions but the orbits predict {expected}"
            )
        if mask is not None:
            example_states = [i for i in range(n) if mask >> i & 1]
    else:
        logger.warning(
            f"|S|={n} exceeds the subset guard {max_subset_states}; counting invariant "
            f"propositions from the {len(orbit_list)} orbits instead"
        )
        count = expected
        if len(orbit_list) > 1:
            example_states = list(orbit_list[0])
    nontrivial_example = None
    if example_states is not None:
        nontrivial_example = [_jsonable(schema.label(i)) for i in example_states]

    pairs_done = 0
    pairs_requested = 0
    if schema.reversible and transitive and instance_pairs > 0:
        pairs_requested = instance_pairs
        rng = np.random.default_rng(seed)
        for _ in range(instance_pairs):
            A, B = random_instances(schema, 2, rng)
            spectacles = construct_gruebleen(A, B, schema)
            if (
                transform_instance(spectacles, A, schema) == B
                and diagram_deviation(spectacles, A, B, schema) == 0.0
                and spectacles.verdict(schema)
            ):
                pairs_done += 1
    report = TheoremReport(
        schema=schema.name,
        states=n,
        reversible=schema.reversible,
        transitive=transitive,
        group_source=source,
        group_order=len(maps),
        orbit_count=len(orbit_list),
        invariant_propositions=count,
        subsets_enumerated=enumerated,
        nontrivial_example=nontrivial_example,
        instance_pairs=pairs_requested,
        pairs_transformed=pairs_done,
        seed=seed if pairs_requested else None,
    )
    logger.info(
        f"Theorem check on '{schema.name}': {count} invariant state propositions, "
        f"preconditions_met={report.preconditions_met}"
    )
    return report


def builtin_propositions(kind: Any, params: Optional[Dict[str, Any]] = None) -> Proposition:
    """
    Build one of the stock propositions.

    Kinds and their params:
        FIXED_POINT: none; true when every step leaves the state where it is
        MARKED_SAME_HALF: ``marks`` (card labels) and ``n`` (deck size)
        IS_CONSTANT: none; state labels are words or tuples
        STATE_EQUALS: ``state`` (a label, or a vector for metric schemata)
        ENTANGLED_CUT: ``decomposition`` and optional ``cut`` and ``tolerance``

    Raises:
        SchemaError: If the kind is unknown or the params do not fit it
    """
    params = dict(params or {})
    try:
        kind = PropositionKind(kind.value if isinstance(kind, Enum) else str(kind).upper())
    except ValueError:
        raise SchemaError(f"Unknown proposition kind: {kind!r}") from None

    if kind is PropositionKind.FIXED_POINT:
        def fixed_point(instance, schema):
            states = run_instance(instance, schema).states
            return all(schema.same_state(a, b) for a, b in zip(states, states[1:]))

        return Proposition("fixed point of dynamics", Arity.INSTANCE, fixed_point)

    if kind is PropositionKind.MARKED_SAME_HALF:
        n = params.get("n")
        marks = params.get("marks")
        if not isinstance(n, int) or n < 2 or n % 2:
            raise SchemaError(f"MARKED_SAME_HALF needs an even deck size n, got {n!r}")
        if not marks:
            raise SchemaError("MARKED_SAME_HALF needs a nonempty set of marked cards")
        marks = frozenset(marks)
        if len(marks) > n or not marks <= set(range(n)):
            raise SchemaError(f"Unknown card label in marks {sorted(marks)} for n={n}")
        half = n // 2

        def same_half(x, schema):
            arrangement = schema.label(x)
            top = {card for card in arrangement[:half]}
            return marks <= top or not (marks & top)

        return Proposition(f"cards {sorted(marks)} in the same half", Arity.STATE, same_half)

    if kind is PropositionKind.IS_CONSTANT:
        def constant(x, schema):
            word = schema.label(x)
            return len(set(word)) <= 1

        return Proposition("sequence is constant", Arity.STATE, constant)

    if kind is PropositionKind.STATE_EQUALS:
        if "state" not in params:
            raise SchemaError("STATE_EQUALS needs a 'state' param")
        target = params["state"]

        def equals(x, schema):
            if isinstance(schema, TheorySchema):
                return x == schema.index_of(target)
            return schema.same_state(x, target)

        return Proposition(f"state equals {_jsonable(target)!r}", Arity.STATE, equals)

    decomposition = params.get("decomposition")
    if not isinstance(decomposition, Decomposition):
        raise SchemaError("ENTANGLED_CUT needs a 'decomposition' param")
    cut = params.get("cut", 1)
    if not 1 <= cut < len(decomposition.dims):
        raise SchemaError(f"Cut {cut} does not split {len(decomposition.dims)} factors")
    tolerance = params.get("tolerance", 1e-10)

    def entangled(psi, schema):
        return schmidt_rank(psi, decomposition, cut, tolerance) > 1

    return Proposition(f"entangled across cut {cut}", Arity.STATE, entangled)
