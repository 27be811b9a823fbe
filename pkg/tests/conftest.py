"""Shared fixtures and an independent instance generator.

The generator builds Analyzer-style XML from a plain-data world
description, and oracle_project implements projection over that plain
data without touching the package. Tests compare the two.
"""

from __future__ import annotations

import random
from pathlib import Path

import pytest

from tracelayout import layout_scene, parse_instance_xml, parse_spec, project, state_order

DATA = Path(__file__).parent / "data"

SIG_POOL = ["this/A", "this/B", "this/C", "this/D", "this/E"]


def read_data(name: str) -> str:
    return (DATA / name).read_text()


@pytest.fixture(scope="session")
def ertms_instance():
    return parse_instance_xml(read_data("ertms_trace.xml"))


@pytest.fixture(scope="session")
def ertms_spec():
    return parse_spec(read_data("ertms_layout.json"))


@pytest.fixture(scope="session")
def ertms_scenes(ertms_instance, ertms_spec):
    atoms = state_order(ertms_instance, "State").atoms
    return [
        layout_scene(project(ertms_instance, "State", atom.label), ertms_spec)
        for atom in atoms
    ]


# --- synthetic worlds ------------------------------------------------------
#
# A world is plain data:
#   sigs:   list of {"name", "parent" (name or None), "atoms": [labels]}
#   fields: list of {"name", "cols": [sig names], "tuples": [[labels], ...]}


def world_to_xml(sigs, fields, command="Run synthetic") -> str:
    ids = {"univ": 2}
    lines = [
        "<alloy builddate=\"test\">",
        f"<instance command=\"{command}\" filename=\"synthetic.als\">",
        "<sig label=\"univ\" ID=\"2\" builtin=\"yes\"></sig>",
    ]
    next_id = 4
    for sig in sigs:
        ids[sig["name"]] = next_id
        next_id += 1
    for sig in sigs:
        parent = ids[sig["parent"]] if sig.get("parent") else ids["univ"]
        lines.append(f"<sig label=\"{sig['name']}\" ID=\"{ids[sig['name']]}\" parentID=\"{parent}\">")
        for atom in sig["atoms"]:
            lines.append(f"  <atom label=\"{atom}\"/>")
        lines.append("</sig>")
    for fdef in fields:
        lines.append(f"<field label=\"{fdef['name']}\" ID=\"{next_id}\" parentID=\"{ids[fdef['cols'][0]]}\">")
        next_id += 1
        for row in fdef["tuples"]:
            cells = " ".join(f"<atom label=\"{a}\"/>" for a in row)
            lines.append(f"  <tuple> {cells} </tuple>")
        types = " ".join(f"<type ID=\"{ids[c]}\"/>" for c in fdef["cols"])
        lines.append(f"  <types> {types} </types>")
        lines.append("</field>")
    lines.append("</instance>")
    lines.append("</alloy>")
    return "\n".join(lines)


def random_world(rng: random.Random, max_atoms=5, max_fields=3, max_arity=3):
    sig_count = rng.randint(1, 5)
    sigs = []
    for i in range(sig_count):
        name = SIG_POOL[i]
        parent = None
        if i > 0 and rng.random() < 0.3:
            parent = sigs[rng.randrange(i)]["name"]
        short = name.split("/")[-1]
        atoms = [f"{short}${j}" for j in range(rng.randint(1, max_atoms))]
        sigs.append({"name": name, "parent": parent, "atoms": atoms})

    members = members_with_descendants(sigs)
    fields = []
    for k in range(rng.randint(0, max_fields)):
        arity = rng.randint(2, max_arity)
        cols = [rng.choice(sigs)["name"] for _ in range(arity)]
        pool = [members[c] for c in cols]
        if any(not p for p in pool):
            continue
        seen = set()
        for _ in range(rng.randint(0, 6)):
            seen.add(tuple(rng.choice(p) for p in pool))
        fields.append({"name": f"f{k}", "cols": cols, "tuples": sorted(seen)})
    return sigs, fields


def members_with_descendants(sigs) -> dict[str, list[str]]:
    """Atom labels of each sig including all its descendants."""
    children: dict[str, list[str]] = {}
    for sig in sigs:
        if sig.get("parent"):
            children.setdefault(sig["parent"], []).append(sig["name"])
    own = {sig["name"]: list(sig["atoms"]) for sig in sigs}

    def collect(name: str) -> list[str]:
        out = list(own[name])
        for child in children.get(name, ()):
            out.extend(collect(child))
        return out

    return {sig["name"]: collect(sig["name"]) for sig in sigs}


def descendant_closure(sigs, name: str) -> set[str]:
    children: dict[str, list[str]] = {}
    for sig in sigs:
        if sig.get("parent"):
            children.setdefault(sig["parent"], []).append(sig["name"])
    out = {name}
    queue = [name]
    while queue:
        for child in children.get(queue.pop(), ()):
            out.add(child)
            queue.append(child)
    return out


def oracle_project(sigs, fields, sig_name: str, atom_label: str):
    """Brute-force filter-and-drop, straight off the plain world data.

    Returns (fields, marks): surviving fields as {name: (cols, tuples)}
    and unary remainders as {name: set of labels}.
    """
    matching_sigs = descendant_closure(sigs, sig_name)
    out_fields = {}
    out_marks = {}
    for fdef in fields:
        cols = fdef["cols"]
        hit = [i for i, c in enumerate(cols) if c in matching_sigs]
        if not hit:
            out_fields[fdef["name"]] = (list(cols), sorted(tuple(t) for t in fdef["tuples"]))
            continue
        kept = []
        for row in fdef["tuples"]:
            if all(row[i] == atom_label for i in hit):
                kept.append(tuple(v for i, v in enumerate(row) if i not in hit))
        remaining = [c for i, c in enumerate(cols) if i not in hit]
        if len(remaining) >= 2:
            out_fields[fdef["name"]] = (remaining, sorted(kept))
        elif len(remaining) == 1:
            out_marks[fdef["name"]] = {row[0] for row in kept}
    return out_fields, out_marks
