"""Tests for schemata, instances and the Property S checks."""

import json

import pytest

from gruebleen_lab.perm_worlds import (
    DeckKind,
    build_cyclic_schema,
    build_deck_schema,
    build_symmetric_schema,
    half_swap,
)
from gruebleen_lab.schema_core import (
    FiniteStateSpace,
    Instance,
    KinematicMap,
    SchemaError,
    SizeGuardError,
    TheorySchema,
    candidate_similarity_group,
    canonical_json,
    check_property_S,
    check_property_S_ext,
    dump_schema_file,
    generate_group,
    is_dynamical_symmetry,
    is_transitive,
    label_induced_candidates,
    load_schema_file,
    maximal_similarity_group,
    orbits,
    run_instance,
)


def identity_only(size):
    return TheorySchema(
        states=FiniteStateSpace(tuple(f"s{i}" for i in range(size))),
        maps=(KinematicMap("id", tuple(range(size))),),
        reversible=True,
    )


def test_state_space_rejects_duplicates():
    """Test that duplicate states are refused."""
    with pytest.raises(SchemaError):
        FiniteStateSpace(("a", "b", "a"))


def test_kinematic_map_validates_table_and_inverse():
    """Test map table and inverse validation."""
    with pytest.raises(SchemaError):
        KinematicMap("bad", (0, 3, 1))
    with pytest.raises(SchemaError):
        KinematicMap("c", (1, 2, 0), inverse=(1, 2, 0))
    c = KinematicMap("c", (1, 2, 0), inverse=(2, 0, 1))
    assert c.inverted().perm == (2, 0, 1)


def test_kinematic_map_equality_ignores_name():
    """Test that maps compare by table."""
    assert KinematicMap("a", (1, 0)) == KinematicMap("b", (1, 0))
    assert len({KinematicMap("a", (1, 0)), KinematicMap("b", (1, 0))}) == 1


def test_reversible_schema_must_be_a_group():
    """Test that a reversible K must be a group."""
    states = FiniteStateSpace(("a", "b", "c"))
    with pytest.raises(SchemaError):
        # the rotation's inverse is missing
        TheorySchema(states, (KinematicMap("id", (0, 1, 2)), KinematicMap("c", (1, 2, 0))), True)
    # the same maps are fine when the schema does not claim reversibility
    schema = TheorySchema(states, (KinematicMap("id", (0, 1, 2)), KinematicMap("c", (1, 2, 0))), False)
    assert not schema.reversible


def test_run_instance_identity():
    """Test an instance of identity maps."""
    schema = build_cyclic_schema(3, n_steps=2)
    identity = schema.identity()
    trajectory = run_instance(Instance(0, (identity, identity)), schema)
    assert trajectory.states == (0, 0, 0)


def test_run_instance_cyclic():
    """Test an instance on the cyclic schema."""
    schema = build_cyclic_schema(3, n_steps=2)
    c = schema.maps[1]
    trajectory = run_instance(Instance(0, (c, c)), schema)
    assert [schema.label(x) for x in trajectory.states] == ["s0", "s1", "s2"]


def test_run_instance_half_deck():
    """Test an instance on the half deck."""
    schema = build_deck_schema(4, DeckKind.HALF)
    swap_top = next(D for D in schema.maps if D.name == "halves(1,0|2,3)")
    start = schema.index_of((0, 1, 2, 3))
    trajectory = run_instance(Instance(start, (swap_top,)), schema)
    assert schema.label(trajectory.states[1]) == (1, 0, 2, 3)


def test_run_instance_rejects_foreign_maps():
    """Test that maps outside K are refused."""
    schema = build_deck_schema(4, DeckKind.HALF)
    with pytest.raises(SchemaError):
        run_instance(Instance(0, (half_swap(4),)), schema)
    with pytest.raises(SchemaError):
        run_instance(Instance(99, (schema.identity(),)), schema)
    with pytest.raises(SchemaError):
        run_instance(Instance(0, (schema.identity(), schema.identity())), schema)


def test_run_instance_is_deterministic():
    """Test that running an instance twice gives the same trajectory."""
    schema = build_symmetric_schema(4, n_steps=3)
    instance = Instance(2, (schema.maps[5], schema.maps[17], schema.maps[9]))
    assert run_instance(instance, schema) == run_instance(instance, schema)


def test_derived_maps_compose():
    """D_{k,j} = D_{k,l} D_{l,j} for every triple of grid times."""
    schema = build_symmetric_schema(3, n_steps=3)
    instance = Instance(0, (schema.maps[1], schema.maps[4], schema.maps[3]))
    trajectory = run_instance(instance, schema)
    for k in range(4):
        for j in range(4):
            for l in range(4):
                assert trajectory.derived_map(k, j) == schema.compose(
                    trajectory.derived_map(k, l), trajectory.derived_map(l, j)
                )
    assert trajectory.derived_map(3, 0).perm[trajectory.states[0]] == trajectory.states[3]


def test_derived_maps_need_reversibility():
    """Test that derived maps require a reversible schema."""
    schema = TheorySchema(FiniteStateSpace(("a", "b")), (KinematicMap("const", (0, 0)),), False)
    trajectory = run_instance(Instance(1, (schema.maps[0],)), schema)
    with pytest.raises(SchemaError):
        trajectory.derived_map(1, 0)


def test_property_S_identity():
    """Test Property S for the identity."""
    for schema in (build_cyclic_schema(4), build_deck_schema(4, DeckKind.HALF)):
        verdict = check_property_S(schema.identity(), schema)
        assert verdict
        assert not verdict.sampled


def test_property_S_half_swap():
    """Test Property S for the half swap."""
    assert check_property_S(half_swap(4), build_deck_schema(4, DeckKind.HALF))


def test_property_S_constant_map_has_witness():
    """Test that a non-bijection fails with a witness."""
    schema = build_cyclic_schema(3)
    verdict = check_property_S(KinematicMap("const", (0, 0, 0)), schema)
    assert not verdict
    assert verdict.witness == {"states": [0, 1], "image": 0}


def test_property_S_rejects_partial_maps():
    """Test that short tables are refused."""
    with pytest.raises(SchemaError):
        check_property_S((0, 1), build_cyclic_schema(3))


def test_property_S_conjugation_witness():
    """Test the witness when a conjugate leaves K."""
    # a transposition does not normalize the 4-cycle group
    schema = build_cyclic_schema(4)
    verdict = check_property_S((1, 0, 2, 3), schema)
    assert not verdict
    assert "map" in verdict.witness


def test_property_S_ext_half_swap_from_identity():
    """Test that switching on X midway fails Property S_ext."""
    schema = build_deck_schema(4, DeckKind.HALF)
    X = half_swap(4)
    verdict = check_property_S_ext((schema.identity(), X), schema)
    assert not verdict
    assert verdict.witness["interval"] == 0
    assert check_property_S_ext((X, X), schema)


def test_property_S_ext_time_independent_and_identity():
    """Test Property S_ext for constant sequences."""
    schema = build_cyclic_schema(4, n_steps=3)
    group = maximal_similarity_group(schema)
    for V in group:
        assert check_property_S_ext((V,) * 4, schema)
    assert check_property_S_ext((schema.identity(),) * 4, schema)


def test_property_S_ext_length_mismatch():
    """Test that sequences of the wrong length are refused."""
    schema = build_cyclic_schema(3, n_steps=2)
    with pytest.raises(SchemaError):
        check_property_S_ext((schema.identity(),), schema)


def test_maximal_group_full_symmetric():
    """Test the maximal group of the symmetric schema."""
    group = maximal_similarity_group(build_symmetric_schema(3))
    assert len(group) == 6
    assert group.closed
    assert group.source == "maximal"


def test_maximal_group_of_identity_schema_is_everything():
    """Test that with K trivial every bijection is a similarity."""
    assert len(maximal_similarity_group(identity_only(3))) == 6


def test_maximal_group_of_cyclic_is_dihedral():
    """Test that the cyclic schema has a dihedral similarity group."""
    group = maximal_similarity_group(build_cyclic_schema(4))
    assert len(group) == 8


def test_maximal_group_is_a_group_containing_K():
    """Test that the maximal group is closed and contains K."""
    schema = build_cyclic_schema(5)
    group = maximal_similarity_group(schema)
    perms = {V.perm for V in group}
    for V in group:
        V_inv = schema.invert(V)
        assert V_inv.perm in perms
        for D in schema.maps:
            assert schema.contains(schema.compose(schema.compose(V, D), V_inv))
            assert schema.contains(schema.compose(schema.compose(V_inv, D), V))
        for W in group:
            assert schema.compose(V, W).perm in perms
    assert all(D in group for D in schema.maps)


def test_maximal_group_is_sorted():
    """Test the ordering of the maximal group."""
    group = maximal_similarity_group(build_cyclic_schema(4))
    perms = [V.perm for V in group]
    assert perms == sorted(perms)


def test_maximal_group_size_guard():
    """Test the exhaustive-search guard."""
    with pytest.raises(SizeGuardError):
        maximal_similarity_group(build_deck_schema(4, DeckKind.HALF))
    with pytest.raises(SizeGuardError):
        maximal_similarity_group(build_cyclic_schema(5), max_states=4)


def test_is_transitive():
    """Test transitivity of group schemata."""
    assert is_transitive(build_cyclic_schema(5))
    assert is_transitive(identity_only(1))
    assert not is_transitive(identity_only(2))


def test_is_transitive_needs_every_state_to_reach_every_other():
    """A collapsing map lets s0 reach s1 but never the reverse."""
    schema = TheorySchema(
        states=FiniteStateSpace(("s0", "s1")),
        maps=(KinematicMap("id", (0, 1)), KinematicMap("collapse", (1, 1))),
        reversible=False,
    )
    assert not is_transitive(schema)

    swap = TheorySchema(
        states=FiniteStateSpace(("s0", "s1")),
        maps=(KinematicMap("collapse", (1, 1)), KinematicMap("swap", (1, 0))),
        reversible=False,
    )
    assert is_transitive(swap)


def test_generate_group_and_orbits():
    """Test group generation and orbits."""
    schema = build_cyclic_schema(6)
    generated = generate_group([schema.maps[2]], schema)
    assert len(generated) == 3
    assert orbits(generated, schema) == [(0, 2, 4), (1, 3, 5)]
    assert orbits([schema.identity()], schema) == [(i,) for i in range(6)]


def test_label_induced_candidates_find_half_swap():
    """Test that position permutations include X."""
    schema = build_deck_schema(4, DeckKind.HALF)
    candidates = label_induced_candidates(schema)
    assert len(candidates) == 24
    assert half_swap(4) in candidates
    assert any(V.name == "positions(2,3,0,1)" for V in candidates)


def test_candidate_group_for_half_deck():
    """Test the candidate-restricted group of the half deck."""
    schema = build_deck_schema(4, DeckKind.HALF)
    group = candidate_similarity_group(schema, label_induced_candidates(schema))
    assert len(group) == 8
    assert group.closed
    assert group.source == "candidate-restricted"
    assert half_swap(4) in group


def test_dynamical_symmetry_is_stronger_than_similarity():
    """Test that a similarity need not commute with K."""
    schema = build_deck_schema(4, DeckKind.HALF)
    X = half_swap(4)
    assert is_dynamical_symmetry(X, schema.identity(), schema)
    swap_top = next(D for D in schema.maps if D.name == "halves(1,0|2,3)")
    assert not is_dynamical_symmetry(X, swap_top, schema)


def test_schema_file_round_trip(tmp_path):
    """Test dumping and loading a schema file."""
    schema = build_deck_schema(4, DeckKind.HALF)
    path = tmp_path / "halfdeck4.json"
    dump_schema_file(schema, str(path))
    loaded = load_schema_file(str(path))
    assert loaded == schema
    assert canonical_json(loaded) == path.read_text()


def test_load_schema_file_errors(tmp_path):
    """Test schema file errors."""
    bad_json = tmp_path / "bad.json"
    bad_json.write_text("{not json")
    with pytest.raises(SchemaError):
        load_schema_file(str(bad_json))

    out_of_range = tmp_path / "range.json"
    out_of_range.write_text(json.dumps({
        "states": ["a", "b"],
        "maps": [{"name": "id", "perm": [0, 2]}],
        "reversible": False,
        "n_steps": 1,
    }))
    with pytest.raises(SchemaError):
        load_schema_file(str(out_of_range))

    not_a_group = tmp_path / "group.json"
    not_a_group.write_text(json.dumps({
        "states": ["a", "b", "c"],
        "maps": [{"name": "id", "perm": [0, 1, 2]}, {"name": "c", "perm": [1, 2, 0]}],
        "reversible": True,
        "n_steps": 1,
    }))
    with pytest.raises(SchemaError):
        load_schema_file(str(not_a_group))

    with pytest.raises(FileNotFoundError):
        load_schema_file(str(tmp_path / "missing.json"))


def test_load_cyclic_schema_file(tmp_path):
    """Test loading a cyclic schema file."""
    path = tmp_path / "cyclic3.json"
    path.write_text(json.dumps({
        "states": ["s0", "s1", "s2"],
        "maps": [
            {"name": "id", "perm": [0, 1, 2]},
            {"name": "c", "perm": [1, 2, 0]},
            {"name": "c2", "perm": [2, 0, 1]},
        ],
        "reversible": True,
        "n_steps": 2,
    }))
    schema = load_schema_file(str(path))
    assert len(schema.maps) == 3
    assert schema.n_steps == 2
