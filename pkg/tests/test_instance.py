import random

import pytest

from conftest import random_world, read_data, world_to_xml
from tracelayout import (
    InstanceIntegrityError,
    InstanceParseError,
    OrderingError,
    element_order,
    instance_to_xml,
    parse_instance_xml,
    state_order,
)


def normal_form(instance):
    return {
        "command": instance.command,
        "filename": instance.filename,
        "sigs": {
            name: (decl.parent, decl.builtin, [a.label for a in decl.atoms])
            for name, decl in instance.sigs.items()
        },
        "fields": {
            name: (fdecl.label, list(fdecl.column_sigs), sorted(fdecl.tuples))
            for name, fdecl in instance.fields.items()
        },
    }


def test_parse_ertms_sigs(ertms_instance):
    inst = ertms_instance
    assert sorted(n for n, d in inst.sigs.items() if not d.builtin) == [
        "this/State", "this/TTD", "this/Train", "this/VSS",
    ]
    assert len(inst.sigs["this/TTD"].atoms) == 2
    assert len(inst.sigs["this/VSS"].atoms) == 5
    assert len(inst.sigs["this/State"].atoms) == 2
    assert len(inst.sigs["this/Train"].atoms) == 2
    assert inst.sigs["Int"].builtin
    assert inst.sigs["univ"].builtin
    assert inst.sigs["this/TTD"].parent == "univ"
    assert inst.command.startswith("Run run$1")


def test_parse_ertms_fields(ertms_instance):
    inst = ertms_instance
    vss = inst.fields["vss"]
    assert vss.arity == 3
    assert vss.column_sigs == ["this/Train", "this/VSS", "this/State"]
    assert sorted(vss.tuples) == [
        ("Train$0", "VSS$1", "State$0"),
        ("Train$0", "VSS$2", "State$1"),
        ("Train$1", "VSS$0", "State$0"),
        ("Train$1", "VSS$1", "State$1"),
    ]
    ttd = inst.fields["ttd"]
    assert ttd.arity == 2
    assert ttd.column_sigs == ["this/VSS", "this/TTD"]
    assert len(ttd.tuples) == 5


def test_atom_labels(ertms_instance):
    atom = ertms_instance.atoms["Train$0"]
    assert atom.sig == "this/Train"
    assert atom.index == 0
    assert atom.indexed
    assert atom.display == "Train0"


def test_sig_display(ertms_instance):
    assert ertms_instance.sigs["this/VSS"].display == "VSS"
    assert ertms_instance.sigs["univ"].display == "univ"


def test_resolve_sig_by_suffix(ertms_instance):
    assert ertms_instance.resolve_sig("VSS").name == "this/VSS"
    assert ertms_instance.resolve_sig("this/VSS").name == "this/VSS"
    with pytest.raises(InstanceIntegrityError):
        ertms_instance.resolve_sig("NoSuchSig")


def test_resolve_sig_ambiguous_suffix():
    xml = world_to_xml(
        [
            {"name": "mod1/A", "parent": None, "atoms": ["mod1/A$0"]},
            {"name": "mod2/A", "parent": None, "atoms": ["mod2/A$0"]},
        ],
        [],
    )
    inst = parse_instance_xml(xml)
    with pytest.raises(InstanceIntegrityError):
        inst.resolve_sig("A")
    assert inst.resolve_sig("mod1/A").name == "mod1/A"


def test_empty_sig_instance():
    inst = parse_instance_xml(world_to_xml([{"name": "this/A", "parent": None, "atoms": []}], []))
    assert list(inst.sigs["this/A"].atoms) == []
    assert inst.fields == {}


def test_malformed_xml_reports_position():
    with pytest.raises(InstanceParseError) as err:
        parse_instance_xml("<alloy>\n<instance>\n</alloy>")
    assert err.value.line == 3


def test_rejects_multiple_instances():
    xml = world_to_xml([{"name": "this/A", "parent": None, "atoms": []}], [])
    doubled = xml.replace("</instance>", "</instance><instance command=\"x\" filename=\"y\"></instance>")
    with pytest.raises(InstanceParseError, match="expected exactly one"):
        parse_instance_xml(doubled)


def test_rejects_missing_instance():
    with pytest.raises(InstanceParseError, match="no <instance>"):
        parse_instance_xml("<alloy></alloy>")


def test_rejects_duplicate_sig_label():
    xml = world_to_xml(
        [
            {"name": "this/A", "parent": None, "atoms": ["A$0"]},
            {"name": "this/A", "parent": None, "atoms": []},
        ],
        [],
    )
    with pytest.raises(InstanceIntegrityError, match="duplicate sig"):
        parse_instance_xml(xml.replace("ID=\"5\"", "ID=\"6\"", 1))


def test_rejects_duplicate_atom():
    xml = world_to_xml([{"name": "this/A", "parent": None, "atoms": ["A$0", "A$0"]}], [])
    with pytest.raises(InstanceIntegrityError, match="declared twice"):
        parse_instance_xml(xml)


def test_rejects_undeclared_tuple_atom():
    xml = world_to_xml(
        [{"name": "this/A", "parent": None, "atoms": ["A$0"]}],
        [{"name": "f", "cols": ["this/A", "this/A"], "tuples": [["A$0", "Ghost$0"]]}],
    )
    with pytest.raises(InstanceIntegrityError, match="Ghost\\$0"):
        parse_instance_xml(xml)


def test_rejects_tuple_arity_mismatch():
    xml = world_to_xml(
        [{"name": "this/A", "parent": None, "atoms": ["A$0"]}],
        [{"name": "f", "cols": ["this/A", "this/A"], "tuples": [["A$0"]]}],
    )
    with pytest.raises(InstanceIntegrityError, match="arity 1, expected 2"):
        parse_instance_xml(xml)


def test_rejects_parent_cycle():
    xml = """<alloy><instance command="c" filename="f">
    <sig label="univ" ID="2" builtin="yes"></sig>
    <sig label="this/A" ID="4" parentID="5"></sig>
    <sig label="this/B" ID="5" parentID="4"></sig>
    </instance></alloy>"""
    with pytest.raises(InstanceIntegrityError, match="cycles"):
        parse_instance_xml(xml)


def test_duplicate_field_labels_get_distinct_keys():
    xml = world_to_xml(
        [
            {"name": "this/A", "parent": None, "atoms": ["A$0"]},
            {"name": "this/B", "parent": None, "atoms": ["B$0"]},
        ],
        [
            {"name": "f", "cols": ["this/A", "this/B"], "tuples": [["A$0", "B$0"]]},
            {"name": "f", "cols": ["this/B", "this/A"], "tuples": [["B$0", "A$0"]]},
        ],
    )
    inst = parse_instance_xml(xml)
    assert sorted(inst.fields) == ["f", "f#2"]
    assert inst.fields["f"].label == "f"
    assert inst.fields["f#2"].label == "f"
    assert inst.fields["f#2"].column_sigs == ["this/B", "this/A"]


def test_skolems_are_kept_out_of_fields():
    xml = world_to_xml([{"name": "this/A", "parent": None, "atoms": ["A$0"]}], [])
    xml = xml.replace(
        "</instance>",
        "<skolem label=\"$w\" ID=\"30\"><tuple><atom label=\"A$0\"/></tuple>"
        "<types><type ID=\"4\"/></types></skolem></instance>",
    )
    inst = parse_instance_xml(xml)
    assert inst.fields == {}
    assert inst.skolems == {"$w": [("A$0",)]}


def test_subsig_atoms_belong_to_ancestors():
    xml = world_to_xml(
        [
            {"name": "this/A", "parent": None, "atoms": ["A$0"]},
            {"name": "this/Sub", "parent": "this/A", "atoms": ["Sub$0"]},
        ],
        [],
    )
    inst = parse_instance_xml(xml)
    assert inst.atom_in_sig(inst.atoms["Sub$0"], "this/A")
    assert not inst.atom_in_sig(inst.atoms["A$0"], "this/Sub")


# --- ordering ---------------------------------------------------------------


def test_state_order_follows_next_chain(ertms_instance):
    order = state_order(ertms_instance, "State")
    assert order.sig == "this/State"
    assert [a.label for a in order.atoms] == ["State$0", "State$1"]


def test_element_order_follows_vss_chain(ertms_instance):
    labels = [a.label for a in element_order(ertms_instance, "VSS")]
    assert labels == ["VSS$0", "VSS$1", "VSS$2", "VSS$3", "VSS$4"]


def test_order_without_field_sorts_by_index():
    xml = world_to_xml([{"name": "this/S", "parent": None, "atoms": ["S$2", "S$0", "S$1"]}], [])
    inst = parse_instance_xml(xml)
    assert [a.label for a in element_order(inst, "S")] == ["S$0", "S$1", "S$2"]


def test_unsuffixed_atoms_sort_after_indexed():
    xml = world_to_xml([{"name": "this/S", "parent": None, "atoms": ["Lone", "S$1", "S$0"]}], [])
    inst = parse_instance_xml(xml)
    assert [a.label for a in element_order(inst, "S")] == ["S$0", "S$1", "Lone"]


def test_hinted_ordering_cycle_is_an_error():
    xml = world_to_xml(
        [{"name": "this/S", "parent": None, "atoms": ["S$0", "S$1"]}],
        [{"name": "ordering/next", "cols": ["this/S", "this/S"],
          "tuples": [["S$0", "S$1"], ["S$1", "S$0"]]}],
    )
    inst = parse_instance_xml(xml)
    with pytest.raises(OrderingError):
        state_order(inst, "S")


def test_hinted_ordering_branch_is_an_error():
    xml = world_to_xml(
        [{"name": "this/S", "parent": None, "atoms": ["S$0", "S$1", "S$2"]}],
        [{"name": "next", "cols": ["this/S", "this/S"],
          "tuples": [["S$0", "S$1"], ["S$0", "S$2"]]}],
    )
    inst = parse_instance_xml(xml)
    with pytest.raises(OrderingError):
        element_order(inst, "S")


def test_single_unhinted_chain_is_used():
    xml = world_to_xml(
        [{"name": "this/S", "parent": None, "atoms": ["S$0", "S$1", "S$2"]}],
        [{"name": "follows", "cols": ["this/S", "this/S"],
          "tuples": [["S$2", "S$1"], ["S$1", "S$0"]]}],
    )
    inst = parse_instance_xml(xml)
    assert [a.label for a in element_order(inst, "S")] == ["S$2", "S$1", "S$0"]


def test_competing_unhinted_chains_fall_back_to_index_sort():
    xml = world_to_xml(
        [{"name": "this/S", "parent": None, "atoms": ["S$0", "S$1"]}],
        [
            {"name": "fwd", "cols": ["this/S", "this/S"], "tuples": [["S$0", "S$1"]]},
            {"name": "rev", "cols": ["this/S", "this/S"], "tuples": [["S$1", "S$0"]]},
        ],
    )
    inst = parse_instance_xml(xml)
    assert [a.label for a in element_order(inst, "S")] == ["S$0", "S$1"]


def test_non_chain_unhinted_field_is_ignored():
    xml = world_to_xml(
        [{"name": "this/S", "parent": None, "atoms": ["S$0", "S$1", "S$2"]}],
        [{"name": "likes", "cols": ["this/S", "this/S"],
          "tuples": [["S$0", "S$1"], ["S$0", "S$2"]]}],
    )
    inst = parse_instance_xml(xml)
    assert [a.label for a in element_order(inst, "S")] == ["S$0", "S$1", "S$2"]


def test_order_is_a_permutation(ertms_instance):
    for sig in ("TTD", "VSS", "Train", "State"):
        decl = ertms_instance.resolve_sig(sig)
        ordered = element_order(ertms_instance, sig)
        assert sorted(a.label for a in ordered) == sorted(a.label for a in decl.atoms)


# --- round trips ------------------------------------------------------------


def test_round_trip_ertms(ertms_instance):
    again = parse_instance_xml(instance_to_xml(ertms_instance))
    assert normal_form(again) == normal_form(ertms_instance)


def test_parse_is_deterministic():
    text = read_data("ertms_trace.xml")
    assert normal_form(parse_instance_xml(text)) == normal_form(parse_instance_xml(text))


def test_round_trip_random_worlds():
    rng = random.Random(20210)
    for _ in range(40):
        sigs, fields = random_world(rng)
        inst = parse_instance_xml(world_to_xml(sigs, fields))
        again = parse_instance_xml(instance_to_xml(inst))
        assert normal_form(again) == normal_form(inst)


def test_random_world_tuples_match_arity():
    rng = random.Random(7)
    for _ in range(30):
        sigs, fields = random_world(rng)
        inst = parse_instance_xml(world_to_xml(sigs, fields))
        for fdecl in inst.fields.values():
            assert all(len(row) == fdecl.arity for row in fdecl.tuples)
