import random

import pytest

from conftest import members_with_descendants, oracle_project, random_world, world_to_xml
from tracelayout import ProjectionError, parse_instance_xml, project, projection_columns


def test_ertms_project_state0(ertms_instance):
    proj = project(ertms_instance, "State", "State$0")
    assert proj.projected_sig == "this/State"
    assert sorted(proj.fields["vss"].tuples) == [
        ("Train$0", "VSS$1"),
        ("Train$1", "VSS$0"),
    ]
    assert proj.fields["vss"].column_sigs == ["this/Train", "this/VSS"]
    # ttd never mentions State and passes through untouched
    assert proj.fields["ttd"] is ertms_instance.fields["ttd"]
    # the next relation over State loses both columns and vanishes
    assert "ordering/next" not in proj.fields
    assert "ordering/next" not in proj.marks
    assert "this/State" not in proj.visible_sigs
    assert "this/Train" in proj.visible_sigs


def test_ertms_project_state1(ertms_instance):
    proj = project(ertms_instance, "State", "State$1")
    assert sorted(proj.fields["vss"].tuples) == [
        ("Train$0", "VSS$2"),
        ("Train$1", "VSS$1"),
    ]


def test_projection_columns(ertms_instance):
    vss = ertms_instance.fields["vss"]
    assert projection_columns(ertms_instance, vss, "this/State") == [2]
    assert projection_columns(ertms_instance, vss, "this/VSS") == [1]
    ttd = ertms_instance.fields["ttd"]
    assert projection_columns(ertms_instance, ttd, "this/State") == []


def test_projection_columns_match_descendants():
    xml = world_to_xml(
        [
            {"name": "this/S", "parent": None, "atoms": ["S$0"]},
            {"name": "this/Sub", "parent": "this/S", "atoms": ["Sub$0"]},
            {"name": "this/A", "parent": None, "atoms": ["A$0"]},
        ],
        [{"name": "r", "cols": ["this/A", "this/Sub"], "tuples": [["A$0", "Sub$0"]]}],
    )
    inst = parse_instance_xml(xml)
    assert projection_columns(inst, inst.fields["r"], "this/S") == [1]


def test_unary_remainder_becomes_marks():
    xml = world_to_xml(
        [
            {"name": "this/S", "parent": None, "atoms": ["S$0", "S$1"]},
            {"name": "this/T", "parent": None, "atoms": ["T$0", "T$1"]},
        ],
        [{"name": "alive", "cols": ["this/T", "this/S"],
          "tuples": [["T$0", "S$0"], ["T$1", "S$0"], ["T$1", "S$1"]]}],
    )
    inst = parse_instance_xml(xml)
    proj = project(inst, "S", "S$0")
    assert "alive" not in proj.fields
    assert proj.marks == {"alive": {"T$0", "T$1"}}
    proj1 = project(inst, "S", "S$1")
    assert proj1.marks == {"alive": {"T$1"}}


def test_all_projected_columns_must_match():
    xml = world_to_xml(
        [
            {"name": "this/S", "parent": None, "atoms": ["S$0", "S$1"]},
            {"name": "this/A", "parent": None, "atoms": ["A$0"]},
        ],
        [{"name": "r", "cols": ["this/S", "this/A", "this/S"],
          "tuples": [["S$0", "A$0", "S$0"], ["S$0", "A$0", "S$1"]]}],
    )
    inst = parse_instance_xml(xml)
    proj = project(inst, "S", "S$0")
    # only the tuple with S$0 in both S columns survives, as a mark
    assert proj.marks == {"r": {"A$0"}}


def test_projecting_atom_of_subsig():
    xml = world_to_xml(
        [
            {"name": "this/S", "parent": None, "atoms": ["S$0"]},
            {"name": "this/Sub", "parent": "this/S", "atoms": ["Sub$0"]},
            {"name": "this/A", "parent": None, "atoms": ["A$0"]},
        ],
        [{"name": "r", "cols": ["this/A", "this/S"],
          "tuples": [["A$0", "Sub$0"], ["A$0", "S$0"]]}],
    )
    inst = parse_instance_xml(xml)
    proj = project(inst, "S", "Sub$0")
    assert proj.marks == {"r": {"A$0"}}


def test_project_rejects_foreign_atom(ertms_instance):
    with pytest.raises(ProjectionError):
        project(ertms_instance, "State", "Train$0")
    with pytest.raises(ProjectionError):
        project(ertms_instance, "State", "Nope$9")


def test_empty_field_survives_as_empty():
    xml = world_to_xml(
        [
            {"name": "this/S", "parent": None, "atoms": ["S$0", "S$1"]},
            {"name": "this/A", "parent": None, "atoms": ["A$0", "A$1"]},
        ],
        [{"name": "r", "cols": ["this/A", "this/A", "this/S"],
          "tuples": [["A$0", "A$1", "S$1"]]}],
    )
    inst = parse_instance_xml(xml)
    proj = project(inst, "S", "S$0")
    assert proj.fields["r"].tuples == []
    assert proj.fields["r"].column_sigs == ["this/A", "this/A"]


def assert_matches_oracle(sigs, fields, inst, sig_name, atom_label):
    proj = project(inst, sig_name, atom_label)
    want_fields, want_marks = oracle_project(sigs, fields, sig_name, atom_label)
    got_fields = {
        name: (list(f.column_sigs), sorted(map(tuple, f.tuples)))
        for name, f in proj.fields.items()
    }
    assert got_fields == want_fields
    assert proj.marks == want_marks


def test_project_matches_oracle_on_random_worlds():
    rng = random.Random(5150)
    for _ in range(120):
        sigs, fields = random_world(rng)
        inst = parse_instance_xml(world_to_xml(sigs, fields))
        target = rng.choice(sigs)
        pool = [a for s in sigs for a in s["atoms"] if inst.atom_in_sig(inst.atoms[a], target["name"])]
        if not pool:
            continue
        assert_matches_oracle(sigs, fields, inst, target["name"], rng.choice(pool))


def test_union_recovery_over_single_column_fields():
    rng = random.Random(77)
    for _ in range(60):
        sigs, fields = random_world(rng)
        inst = parse_instance_xml(world_to_xml(sigs, fields))
        members = members_with_descendants(sigs)
        for sig in sigs:
            name = sig["name"]
            for fdef in fields:
                key = fdef["name"]
                fdecl = inst.fields.get(key)
                if fdecl is None:
                    continue
                columns = projection_columns(inst, fdecl, name)
                if len(columns) != 1 or fdecl.arity < 3:
                    continue
                # every entry at the matching column is a member, so the
                # union over all members rebuilds the base tuple set
                col = columns[0]
                rebuilt = []
                for atom in members[name]:
                    proj = project(inst, name, atom)
                    for row in proj.fields[key].tuples:
                        full = list(row)
                        full.insert(col, atom)
                        rebuilt.append(tuple(full))
                assert sorted(rebuilt) == sorted(fdecl.tuples)


def test_projection_never_grows_fields():
    rng = random.Random(99)
    for _ in range(60):
        sigs, fields = random_world(rng)
        inst = parse_instance_xml(world_to_xml(sigs, fields))
        target = rng.choice(sigs)
        if not target["atoms"]:
            continue
        proj = project(inst, target["name"], rng.choice(target["atoms"]))
        for name, f in proj.fields.items():
            base = inst.fields[name]
            assert f.arity <= base.arity
            assert len(f.tuples) <= len(base.tuples)
