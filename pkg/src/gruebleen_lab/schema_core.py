"""
Theory schemata: state sets, kinematic maps, instances and trajectories,
plus the similarity checks (Property S / Property S_ext) and the exhaustive
maximal-group search that the rest of the lab builds on.

Two flavours of schema share one duck-typed interface:

* ``TheorySchema`` - a finite state set with an explicit kinematic set given as
  assignment tables.  Every check on it is exhaustive and exact.
* ``MetricSchema`` - states live in a normed carrier (e.g. unit vectors) and the
  kinematic set is a membership predicate with a declared probe set.  Checks are
  sampled over the probes and say so in their verdicts.
"""

import itertools
import json
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Callable, ClassVar, Dict, Iterable, List, Optional, Sequence, Tuple

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-10
DEFAULT_MAX_STATES = 8

Perm = Tuple[int, ...]


class SchemaError(ValueError):
    """Raised for invalid schemata, maps, instances or schema files."""


class SizeGuardError(SchemaError):
    """Raised when an exhaustive search would exceed its size guard."""


# Array-form helpers.  compose_tables(a, b)[i] == a[b[i]], i.e. "a after b".
def compose_tables(a: Sequence[int], b: Sequence[int]) -> Perm:
    return tuple(a[i] for i in b)


def invert_table(a: Sequence[int]) -> Perm:
    inverse = [0] * len(a)
    for i, image in enumerate(a):
        inverse[image] = i
    return tuple(inverse)


def identity_table(n: int) -> Perm:
    return tuple(range(n))


@dataclass(frozen=True)
class FiniteStateSpace:
    """An ordered list of distinct, hashable state identifiers."""

    elements: Tuple[Any, ...]
    _index: Dict[Any, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        elements = tuple(_freeze(e) for e in self.elements)
        if not elements:
            raise SchemaError("State space must contain at least one state")
        index = {}
        for i, element in enumerate(elements):
            if element in index:
                raise SchemaError(f"Duplicate state identifier: {element!r}")
            index[element] = i
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "_index", index)

    def __len__(self) -> int:
        return len(self.elements)

    def __getitem__(self, i: int) -> Any:
        return self.elements[i]

    def __contains__(self, label: Any) -> bool:
        return _freeze(label) in self._index

    def index_of(self, label: Any) -> int:
        try:
            return self._index[_freeze(label)]
        except KeyError:
            raise SchemaError(f"Unknown state: {label!r}") from None


@dataclass(frozen=True)
class KinematicMap:
    """
    A total function on a finite state set, stored as an assignment table.

    ``perm[i]`` is the index of the image of state ``i``.  Equality and hashing
    only look at the table; the name is a label for reports.
    """

    name: str = field(compare=False)
    perm: Perm
    inverse: Optional[Perm] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        perm = tuple(int(i) for i in self.perm)
        n = len(perm)
        for i, image in enumerate(perm):
            if not 0 <= image < n:
                raise SchemaError(
                    f"Map '{self.name}' sends state {i} to invalid index {image} (n={n})"
                )
        object.__setattr__(self, "perm", perm)
        if self.inverse is not None:
            inverse = tuple(int(i) for i in self.inverse)
            identity = identity_table(n)
            if (
                len(inverse) != n
                or any(not 0 <= i < n for i in inverse)
                or compose_tables(perm, inverse) != identity
                or compose_tables(inverse, perm) != identity
            ):
                raise SchemaError(f"Declared inverse of map '{self.name}' is not an inverse")
            object.__setattr__(self, "inverse", inverse)

    def __call__(self, x: int) -> int:
        return self.perm[x]

    def __len__(self) -> int:
        return len(self.perm)

    def injectivity_witness(self) -> Optional[Tuple[int, int]]:
        """Return two states with the same image, or None if the map is injective."""
        seen: Dict[int, int] = {}
        for i, image in enumerate(self.perm):
            if image in seen:
                return seen[image], i
            seen[image] = i
        return None

    @property
    def is_bijection(self) -> bool:
        return self.injectivity_witness() is None

    def inverted(self) -> "KinematicMap":
        if self.inverse is not None:
            return KinematicMap(f"{self.name}^-1", self.inverse, self.perm)
        if not self.is_bijection:
            raise SchemaError(f"Map '{self.name}' is not a bijection and has no inverse")
        return KinematicMap(f"{self.name}^-1", invert_table(self.perm), self.perm)

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "perm": list(self.perm)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "KinematicMap":
        if not isinstance(data, dict) or "perm" not in data:
            raise SchemaError(f"Map entry must be an object with a 'perm' array: {data!r}")
        perm = data["perm"]
        if not isinstance(perm, list) or not all(isinstance(i, int) for i in perm):
            raise SchemaError(f"Map 'perm' must be an array of integers: {perm!r}")
        return cls(name=str(data.get("name", "")), perm=tuple(perm))


@dataclass(frozen=True)
class Verdict:
    """Outcome of a similarity check, with a witness on failure."""

    holds: bool
    reason: str
    witness: Optional[Dict[str, Any]] = None
    sampled: bool = False

    def __bool__(self) -> bool:
        return self.holds

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"holds": self.holds, "reason": self.reason, "sampled": self.sampled}
        if self.witness is not None:
            data["witness"] = self.witness
        return data


@dataclass(frozen=True)
class TheorySchema:
    """
    A finite theory schema (S, K) with an explicit kinematic set.

    Args:
        states: The state set
        maps: The kinematic maps, each an assignment table over ``states``
        reversible: Whether K is claimed to be a group; verified on construction
        n_steps: Number of time intervals N of an instance
        name: Label used in logs and reports
        check_group: Skip the O(|K|^2) closure check for schemata that are groups
            by construction and too large to verify cheaply
    """

    states: FiniteStateSpace
    maps: Tuple[KinematicMap, ...]
    reversible: bool
    n_steps: int = 1
    name: str = field(default="", compare=False)
    tolerance: float = DEFAULT_TOLERANCE
    check_group: bool = field(default=True, compare=False, repr=False)
    _by_perm: Dict[Perm, KinematicMap] = field(init=False, repr=False, compare=False)

    exhaustive: ClassVar[bool] = True

    def __post_init__(self):
        if not isinstance(self.states, FiniteStateSpace):
            object.__setattr__(self, "states", FiniteStateSpace(tuple(self.states)))
        maps = tuple(self.maps)
        object.__setattr__(self, "maps", maps)
        if self.n_steps < 1:
            raise SchemaError(f"n_steps must be >= 1, got {self.n_steps}")
        if not maps:
            raise SchemaError("Kinematic set must contain at least one map")
        n = len(self.states)
        by_perm: Dict[Perm, KinematicMap] = {}
        for D in maps:
            if len(D.perm) != n:
                raise SchemaError(
                    f"Map '{D.name}' has {len(D.perm)} entries but the schema has {n} states"
                )
            if D.perm in by_perm:
                raise SchemaError(
                    f"Maps '{by_perm[D.perm].name}' and '{D.name}' have the same table"
                )
            by_perm[D.perm] = D
        object.__setattr__(self, "_by_perm", by_perm)
        if self.reversible and self.check_group:
            self._verify_group()
        logger.debug(
            f"Schema '{self.name}' built: |S|={n}, |K|={len(maps)}, reversible={self.reversible}"
        )

    def _verify_group(self):
        n = len(self.states)
        if identity_table(n) not in self._by_perm:
            raise SchemaError(f"Schema '{self.name}' is marked reversible but lacks the identity")
        for D in self.maps:
            if not D.is_bijection or invert_table(D.perm) not in self._by_perm:
                raise SchemaError(
                    f"Schema '{self.name}' is marked reversible but '{D.name}' has no inverse in K"
                )
        for D in self.maps:
            for E in self.maps:
                if compose_tables(D.perm, E.perm) not in self._by_perm:
                    raise SchemaError(
                        f"Schema '{self.name}' is marked reversible but "
                        f"'{D.name}' after '{E.name}' is not in K"
                    )

    # Carrier interface shared with MetricSchema
    def all_states(self) -> range:
        return range(len(self.states))

    def label(self, x: int) -> Any:
        return self.states[x]

    def index_of(self, label: Any) -> int:
        return self.states.index_of(label)

    def apply(self, D: KinematicMap, x: int) -> int:
        return D.perm[x]

    def canonical(self, perm: Sequence[int], name: str = "") -> KinematicMap:
        """Return the member of K with this table, or a fresh unnamed map."""
        perm = tuple(perm)
        found = self._by_perm.get(perm)
        if found is not None:
            return found
        return KinematicMap(name or f"map{list(perm)}", perm)

    def compose(self, a: KinematicMap, b: KinematicMap) -> KinematicMap:
        """Return a after b."""
        return self.canonical(compose_tables(a.perm, b.perm), f"({a.name})({b.name})")

    def invert(self, a: KinematicMap) -> KinematicMap:
        if not a.is_bijection:
            raise SchemaError(f"Map '{a.name}' is not a bijection and has no inverse")
        return self.canonical(invert_table(a.perm), f"{a.name}^-1")

    def identity(self) -> KinematicMap:
        return self.canonical(identity_table(len(self.states)), "id")

    def contains(self, D: KinematicMap) -> bool:
        return D.perm in self._by_perm

    def probe_maps(self) -> Tuple[KinematicMap, ...]:
        return self.maps

    def coerce_map(self, V: Any) -> KinematicMap:
        """Accept a KinematicMap or a raw table and check that it is total on S."""
        if not isinstance(V, KinematicMap):
            try:
                V = KinematicMap("candidate", tuple(V))
            except TypeError:
                raise SchemaError(f"Cannot interpret {V!r} as a map on states") from None
        if len(V.perm) != len(self.states):
            raise SchemaError(
                f"Map '{V.name}' is not total: {len(V.perm)} entries for {len(self.states)} states"
            )
        return V

    def bijection_witness(self, V: KinematicMap) -> Optional[Dict[str, Any]]:
        pair = V.injectivity_witness()
        if pair is None:
            return None
        i, j = pair
        return {"states": [i, j], "image": V.perm[i]}

    def state_distance(self, x: int, y: int) -> float:
        return 0.0 if x == y else 1.0

    def same_state(self, x: int, y: int) -> bool:
        return x == y

    def same_map(self, a: KinematicMap, b: KinematicMap) -> bool:
        return a.perm == b.perm

    def describe_map(self, D: KinematicMap) -> Any:
        return D.name

    def validate_state(self, x: Any):
        if not isinstance(x, int) or not 0 <= x < len(self.states):
            raise SchemaError(f"State index {x!r} out of range for {len(self.states)} states")

    def sample_state(self, rng: Any) -> int:
        return int(rng.integers(len(self.states)))

    def sample_map(self, rng: Any) -> KinematicMap:
        return self.maps[int(rng.integers(len(self.maps)))]

    def transport(self, x: int, y: int) -> Optional[KinematicMap]:
        """Breadth-first orbit search for a kinematic map sending x to y."""
        if x == y:
            return self.identity()
        path_to = {x: self.identity()}
        queue = deque([x])
        while queue:
            state = queue.popleft()
            for D in self.maps:
                nxt = D.perm[state]
                if nxt in path_to:
                    continue
                path_to[nxt] = self.compose(D, path_to[state])
                if nxt == y:
                    return path_to[nxt]
                queue.append(nxt)
        return None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "states": [_thaw(s) for s in self.states.elements],
            "maps": [D.to_dict() for D in self.maps],
            "reversible": self.reversible,
            "n_steps": self.n_steps,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any], name: str = "") -> "TheorySchema":
        if not isinstance(data, dict):
            raise SchemaError("Schema document must be a JSON object")
        for key in ("states", "maps", "reversible", "n_steps"):
            if key not in data:
                raise SchemaError(f"Schema document is missing '{key}'")
        if not isinstance(data["states"], list) or not isinstance(data["maps"], list):
            raise SchemaError("'states' and 'maps' must be arrays")
        if not isinstance(data["reversible"], bool) or not isinstance(data["n_steps"], int):
            raise SchemaError("'reversible' must be a boolean and 'n_steps' an integer")
        return cls(
            states=FiniteStateSpace(tuple(data["states"])),
            maps=tuple(KinematicMap.from_dict(m) for m in data["maps"]),
            reversible=data["reversible"],
            n_steps=data["n_steps"],
            name=name,
        )


@dataclass(frozen=True)
class MetricSchema:
    """
    A schema whose states live in a normed carrier.

    The kinematic set is a membership predicate plus a finite probe set; any
    check quantifying over K only visits the probes and is labelled sampled.
    """

    name: str
    apply_fn: Callable[[Any, Any], Any]
    compose_fn: Callable[[Any, Any], Any]
    invert_fn: Callable[[Any], Any]
    identity_fn: Callable[[], Any]
    contains_fn: Callable[[Any], bool]
    probes: Tuple[Any, ...]
    state_distance_fn: Callable[[Any, Any], float]
    map_distance_fn: Callable[[Any, Any], float]
    transport_fn: Optional[Callable[[Any, Any], Any]] = None
    bijection_fn: Optional[Callable[[Any], bool]] = None
    state_check_fn: Optional[Callable[[Any], bool]] = None
    state_sampler: Optional[Callable[[Any], Any]] = None
    map_sampler: Optional[Callable[[Any], Any]] = None
    reversible: bool = True
    n_steps: int = 1
    tolerance: float = DEFAULT_TOLERANCE

    exhaustive: ClassVar[bool] = False

    def __post_init__(self):
        if self.n_steps < 1:
            raise SchemaError(f"n_steps must be >= 1, got {self.n_steps}")
        if self.tolerance <= 0:
            raise SchemaError(f"tolerance must be positive, got {self.tolerance}")
        if not self.probes:
            raise SchemaError(f"Metric schema '{self.name}' needs a non-empty probe set")

    def apply(self, D: Any, x: Any) -> Any:
        return self.apply_fn(D, x)

    def compose(self, a: Any, b: Any) -> Any:
        return self.compose_fn(a, b)

    def invert(self, a: Any) -> Any:
        return self.invert_fn(a)

    def identity(self) -> Any:
        return self.identity_fn()

    def contains(self, D: Any) -> bool:
        return bool(self.contains_fn(D))

    def probe_maps(self) -> Tuple[Any, ...]:
        return self.probes

    def coerce_map(self, V: Any) -> Any:
        return V

    def bijection_witness(self, V: Any) -> Optional[Dict[str, Any]]:
        check = self.bijection_fn or self.contains_fn
        return None if check(V) else {"reason": "candidate is not invertible on the carrier"}

    def state_distance(self, x: Any, y: Any) -> float:
        return float(self.state_distance_fn(x, y))

    def same_state(self, x: Any, y: Any) -> bool:
        return self.state_distance(x, y) <= self.tolerance

    def same_map(self, a: Any, b: Any) -> bool:
        return float(self.map_distance_fn(a, b)) <= self.tolerance

    def describe_map(self, D: Any) -> Any:
        for i, probe in enumerate(self.probes):
            if probe is D:
                return f"probe[{i}]"
        return "map"

    def validate_state(self, x: Any):
        if self.state_check_fn is not None and not self.state_check_fn(x):
            raise SchemaError(f"State is not a member of the carrier of '{self.name}'")

    def transport(self, x: Any, y: Any) -> Optional[Any]:
        if self.transport_fn is None:
            return None
        return self.transport_fn(x, y)

    def sample_state(self, rng: Any) -> Any:
        if self.state_sampler is None:
            raise SchemaError(f"Metric schema '{self.name}' has no state sampler")
        return self.state_sampler(rng)

    def sample_map(self, rng: Any) -> Any:
        if self.map_sampler is None:
            return self.probes[int(rng.integers(len(self.probes)))]
        return self.map_sampler(rng)


@dataclass(frozen=True)
class Instance:
    """An initial state plus the evolution maps (D_{1,0}, ..., D_{N,N-1})."""

    x0: Any
    maps: Tuple[Any, ...]

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(self.maps))

    def validate(self, schema: Any):
        if len(self.maps) != schema.n_steps:
            raise SchemaError(
                f"Instance has {len(self.maps)} maps but the schema has N={schema.n_steps}"
            )
        schema.validate_state(self.x0)
        for k, D in enumerate(self.maps):
            if not schema.contains(D):
                raise SchemaError(
                    f"Map for interval {k}->{k + 1} ({schema.describe_map(D)}) is not in K"
                )

    def to_dict(self, schema: Any = None) -> Dict[str, Any]:
        if isinstance(schema, TheorySchema):
            return {
                "x0": _thaw(schema.label(self.x0)),
                "maps": [D.name for D in self.maps],
            }
        return {"x0": _jsonable(self.x0), "maps": [_jsonable(D) for D in self.maps]}


@dataclass(frozen=True)
class Trajectory:
    """States (x_0, ..., x_N) generated by an instance."""

    states: Tuple[Any, ...]
    maps: Tuple[Any, ...]
    schema: Any = field(compare=False, repr=False, default=None)

    def __len__(self) -> int:
        return len(self.states)

    def derived_map(self, k: int, j: int) -> Any:
        """
        Two-index evolution map D_{k,j} between any pair of grid times.

        Only defined on reversible schemata, where
        D_{k,j} = D_{k,l} D_{l,j} for every l.
        """
        schema = self.schema
        if schema is None or not schema.reversible:
            raise SchemaError("Two-index maps D_{k,j} need a reversible schema")
        last = len(self.maps)
        if not (0 <= k <= last and 0 <= j <= last):
            raise SchemaError(f"Time index out of range: ({k}, {j}) with N={last}")
        if k == j:
            return schema.identity()
        if k < j:
            return schema.invert(self.derived_map(j, k))
        result = self.maps[j]
        for step in range(j + 1, k):
            result = schema.compose(self.maps[step], result)
        return result


def run_instance(instance: Instance, schema: Any) -> Trajectory:
    """
    Evolve an instance through its maps.

    Args:
        instance: The (x_0, D) pair to run
        schema: Schema the instance belongs to

    Returns:
        The trajectory (x_0, ..., x_N)

    Raises:
        SchemaError: If a map is not kinematically possible or a state is out of range
    """
    instance.validate(schema)
    states = [instance.x0]
    for D in instance.maps:
        states.append(schema.apply(D, states[-1]))
    return Trajectory(tuple(states), instance.maps, schema)


def check_property_S(V: Any, schema: Any) -> Verdict:
    """
    Check Property S: V is a bijection and D -> V D V^-1 maps K onto K.

    For a finite explicit K, injectivity of conjugation makes "into" equivalent
    to "onto", so checking every D in K suffices.  For metric schemata only the
    declared probe maps are visited.
    """
    V = schema.coerce_map(V)
    sampled = not schema.exhaustive
    broken = schema.bijection_witness(V)
    if broken is not None:
        return Verdict(False, "not a bijection", broken, sampled)
    V_inv = schema.invert(V)
    for D in schema.probe_maps():
        conjugate = schema.compose(schema.compose(V, D), V_inv)
        if not schema.contains(conjugate):
            return Verdict(
                False,
                "conjugation carries a kinematic map outside K",
                {"map": schema.describe_map(D), "conjugate": _describe(conjugate)},
                sampled,
            )
    reason = "Property S holds"
    if sampled:
        reason += f" (sampled evidence over {len(schema.probe_maps())} probe maps)"
    return Verdict(True, reason, None, sampled)


def check_property_S_ext(seq: Sequence[Any], schema: Any) -> Verdict:
    """
    Check Property S_ext for time-dependent spectacles (V_0, ..., V_N).

    Raises:
        SchemaError: If the sequence length is not N + 1
    """
    seq = [schema.coerce_map(V) for V in seq]
    if len(seq) != schema.n_steps + 1:
        raise SchemaError(
            f"Extended similarity needs {schema.n_steps + 1} maps, got {len(seq)}"
        )
    sampled = not schema.exhaustive
    for k, V in enumerate(seq):
        verdict = check_property_S(V, schema)
        if not verdict:
            witness = {"index": k}
            witness.update(verdict.witness or {})
            return Verdict(False, f"V_{k} fails Property S: {verdict.reason}", witness, sampled)
    inverses = [schema.invert(V) for V in seq]
    for k in range(schema.n_steps):
        for D in schema.probe_maps():
            image = schema.compose(schema.compose(seq[k + 1], D), inverses[k])
            if not schema.contains(image):
                return Verdict(
                    False,
                    f"V_{k + 1} D V_{k}^-1 leaves K on interval {k}->{k + 1}",
                    {"interval": k, "map": schema.describe_map(D), "image": _describe(image)},
                    sampled,
                )
    reason = "Property S_ext holds"
    if sampled:
        reason += f" (sampled evidence over {len(schema.probe_maps())} probe maps)"
    return Verdict(True, reason, None, sampled)


def is_dynamical_symmetry(V: Any, D: Any, schema: Any) -> bool:
    """True when V commutes with the particular map D (VD = DV)."""
    V = schema.coerce_map(V)
    return schema.same_map(schema.compose(V, D), schema.compose(D, V))


@dataclass(frozen=True)
class SimilarityGroup:
    """A set of similarities sorted by assignment table, with its provenance."""

    maps: Tuple[KinematicMap, ...]
    source: str
    closed: bool

    def __len__(self) -> int:
        return len(self.maps)

    def __iter__(self):
        return iter(self.maps)

    def __contains__(self, V: Any) -> bool:
        perm = V.perm if isinstance(V, KinematicMap) else tuple(V)
        return any(m.perm == perm for m in self.maps)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "source": self.source,
            "order": len(self.maps),
            "closed": self.closed,
            "elements": [m.to_dict() for m in self.maps],
        }


def _require_finite(schema: Any, what: str):
    if not isinstance(schema, TheorySchema):
        raise SchemaError(f"{what} needs a finite schema with an explicit kinematic set")


def generate_group(generators: Iterable[KinematicMap], schema: TheorySchema,
                   limit: Optional[int] = None) -> Tuple[KinematicMap, ...]:
    """
    Breadth-first closure of a set of bijections under composition.

    Returns:
        The generated group, sorted lexicographically by table
    """
    _require_finite(schema, "generate_group")
    generators = [schema.coerce_map(g) for g in generators]
    for g in generators:
        if not g.is_bijection:
            raise SchemaError(f"Generator '{g.name}' is not a bijection")
    identity = schema.identity()
    elements: Dict[Perm, KinematicMap] = {identity.perm: identity}
    queue = deque([identity])
    while queue:
        current = queue.popleft()
        for g in generators:
            product = compose_tables(g.perm, current.perm)
            if product in elements:
                continue
            known = schema.canonical(product)
            if known.perm == product and schema.contains(known):
                element = known
            elif current is identity:
                element = g
            else:
                element = KinematicMap(f"{g.name}*{current.name}", product)
            elements[product] = element
            if limit is not None and len(elements) > limit:
                raise SizeGuardError(f"Generated group exceeds {limit} elements")
            queue.append(element)
    return tuple(elements[p] for p in sorted(elements))


def _is_closed_group(maps: Sequence[KinematicMap], schema: TheorySchema) -> bool:
    """
    Decide whether a finite set of bijections is a group.

    A generating set is picked greedily from the set; the set is a group exactly
    when the subgroup it generates coincides with it.
    """
    members = {m.perm for m in maps}
    if identity_table(len(schema.states)) not in members:
        return False
    if any(invert_table(p) not in members for p in members):
        return False
    generators: List[KinematicMap] = []
    generated = {identity_table(len(schema.states))}
    for m in sorted(maps, key=lambda m: m.perm):
        if m.perm in generated:
            continue
        generators.append(m)
        try:
            closure = generate_group(generators, schema, limit=len(members))
        except SizeGuardError:
            return False
        generated = {g.perm for g in closure}
        if not generated <= members:
            return False
    return generated == members


def maximal_similarity_group(schema: TheorySchema,
                             max_states: int = DEFAULT_MAX_STATES) -> SimilarityGroup:
    """
    Enumerate every bijection of S satisfying Property S.

    Candidates are visited in lexicographic order of their tables and rejected
    on the first conjugation that leaves K.

    Raises:
        SizeGuardError: If |S| exceeds ``max_states``
    """
    _require_finite(schema, "maximal_similarity_group")
    n = len(schema.states)
    if n > max_states:
        raise SizeGuardError(
            f"Exhaustive search over {n}! bijections exceeds the guard |S| <= {max_states}"
        )
    logger.info(f"Searching all {n}! bijections of schema '{schema.name}'")
    found: List[KinematicMap] = []
    members = schema._by_perm
    for perm in itertools.permutations(range(n)):
        inverse = invert_table(perm)
        if all(
            compose_tables(perm, compose_tables(D.perm, inverse)) in members
            for D in schema.maps
        ):
            found.append(schema.canonical(perm, f"V{len(found)}"))
    closed = _is_closed_group(found, schema)
    if not closed:
        raise RuntimeError(f"Maximal similarity set of '{schema.name}' is not a group")
    logger.info(f"Maximal similarity group of '{schema.name}' has order {len(found)}")
    return SimilarityGroup(tuple(found), "maximal", closed)


def candidate_similarity_group(schema: TheorySchema,
                               candidates: Iterable[Any]) -> SimilarityGroup:
    """Keep the candidates that pass Property S; the result is labelled candidate-restricted."""
    _require_finite(schema, "candidate_similarity_group")
    unique: Dict[Perm, KinematicMap] = {}
    for candidate in candidates:
        V = schema.coerce_map(candidate)
        unique.setdefault(V.perm, V)
    passed = [V for V in unique.values() if check_property_S(V, schema)]
    passed.sort(key=lambda m: m.perm)
    logger.info(
        f"{len(passed)} of {len(unique)} candidate bijections pass Property S on '{schema.name}'"
    )
    return SimilarityGroup(tuple(passed), "candidate-restricted", _is_closed_group(passed, schema))


def label_induced_candidates(schema: TheorySchema, max_length: int = 8) -> List[KinematicMap]:
    """
    Bijections induced by permuting positions inside sequence-shaped labels.

    Applies to schemata whose labels are tuples or strings of one common length.
    A position permutation pi sends label l to (l[pi[0]], l[pi[1]], ...); it is
    kept when every relabelled state is again a state.
    """
    _require_finite(schema, "label_induced_candidates")
    labels = schema.states.elements
    if not all(isinstance(l, (tuple, str)) for l in labels):
        return []
    lengths = {len(l) for l in labels}
    if len(lengths) != 1:
        return []
    length = lengths.pop()
    if length == 0 or length > max_length:
        return []
    found = []
    for pi in itertools.permutations(range(length)):
        table = []
        for l in labels:
            moved = tuple(l[i] for i in pi)
            if isinstance(l, str):
                moved = "".join(moved)
            if moved not in schema.states:
                break
            table.append(schema.index_of(moved))
        else:
            V = KinematicMap(f"positions{pi}".replace(" ", ""), tuple(table))
            if V.is_bijection:
                found.append(V)
    return found


def random_bijections(schema: TheorySchema, count: int, rng: Any) -> List[KinematicMap]:
    """Uniformly random bijections of S drawn from a numpy Generator."""
    _require_finite(schema, "random_bijections")
    n = len(schema.states)
    return [
        KinematicMap(f"random{i}", tuple(int(j) for j in rng.permutation(n)))
        for i in range(count)
    ]


def orbits(maps: Iterable[KinematicMap], schema: TheorySchema) -> List[Tuple[int, ...]]:
    """Partition S into orbits under the given maps, each orbit sorted."""
    _require_finite(schema, "orbits")
    maps = list(maps)
    seen = set()
    result = []
    for start in schema.all_states():
        if start in seen:
            continue
        orbit = {start}
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for D in maps:
                y = D.perm[x]
                if y not in orbit:
                    orbit.add(y)
                    queue.append(y)
        seen |= orbit
        result.append(tuple(sorted(orbit)))
    return result


def _reach_set(schema: TheorySchema, start: int) -> set:
    reached = {start}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for D in schema.maps:
            y = D.perm[x]
            if y not in reached:
                reached.add(y)
                queue.append(y)
    return reached


def is_transitive(schema: TheorySchema) -> bool:
    """
    True iff every state reaches every other state under K.

    For a group one search from the first state suffices; otherwise every state is searched.
    """
    _require_finite(schema, "is_transitive")
    starts = [0] if schema.reversible else range(len(schema.states))
    return all(len(_reach_set(schema, s)) == len(schema.states) for s in starts)


def canonical_json(schema: TheorySchema) -> str:
    return json.dumps(schema.to_dict(), indent=2, sort_keys=True) + "\n"


def dump_schema_file(schema: TheorySchema, path: str):
    """Write a finite schema in the JSON schema-file format."""
    with open(path, "w") as f:
        f.write(canonical_json(schema))
    logger.info(f"Schema '{schema.name}' written to {path}")


def load_schema_file(path: str) -> TheorySchema:
    """
    Load and validate a schema file.

    Raises:
        FileNotFoundError: If the file does not exist
        SchemaError: If the document is malformed or inconsistent
    """
    try:
        with open(path, "r") as f:
            data = json.load(f)
    except FileNotFoundError:
        logger.error(f"Schema file not found: {path}")
        raise
    except json.JSONDecodeError as e:
        logger.error(f"Error parsing schema file {path}: {e}")
        raise SchemaError(f"Malformed JSON in {path}: {e}") from e
    schema = TheorySchema.from_dict(data, name=path)
    logger.info(f"Schema loaded from {path}: |S|={len(schema.states)}, |K|={len(schema.maps)}")
    return schema


def _freeze(value: Any) -> Any:
    if isinstance(value, list):
        return tuple(_freeze(v) for v in value)
    return value


def _thaw(value: Any) -> Any:
    if isinstance(value, tuple):
        return [_thaw(v) for v in value]
    return value


def _jsonable(value: Any) -> Any:
    if isinstance(value, KinematicMap):
        return value.name
    if hasattr(value, "tolist"):
        value = value.tolist()
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _describe(D: Any) -> Any:
    if isinstance(D, KinematicMap):
        return list(D.perm)
    return "map"
