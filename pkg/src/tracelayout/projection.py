"""Projection of an instance over one atom of a chosen sig.

Projecting over an atom filters every field that mentions the sig: only
tuples whose entries at all matching columns equal the chosen atom
survive, and those columns are then deleted. Fields that never mention
the sig pass through unchanged. A field whose remaining arity drops
below 2 can no longer be drawn as edges; a unary remainder is kept as a
node membership mark instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ProjectionError
from .instance import Atom, FieldDecl, Instance, SigDecl


@dataclass
class ProjectedInstance:
    base: Instance
    projected_sig: str
    projected_atom: Atom
    fields: dict[str, FieldDecl] = field(default_factory=dict)
    marks: dict[str, set[str]] = field(default_factory=dict)  # field name -> atom labels
    visible_sigs: dict[str, SigDecl] = field(default_factory=dict)


def projection_columns(instance: Instance, fdecl: FieldDecl, sig_name: str) -> list[int]:
    """Indices of the field's columns typed by the sig or a descendant of it."""
    return [
        i for i, column in enumerate(fdecl.column_sigs)
        if instance.sig_matches(column, sig_name)
    ]


def project(instance: Instance, sig_ref: str, atom_label: str) -> ProjectedInstance:
    """Restrict the instance to one atom of the given sig.

    The atom must belong to the sig (directly or through a subsignature).
    """
    decl = instance.resolve_sig(sig_ref)
    atom = instance.atoms.get(atom_label)
    if atom is None:
        raise ProjectionError(f"no atom {atom_label!r} in instance")
    if not instance.atom_in_sig(atom, decl.name):
        raise ProjectionError(f"atom {atom_label!r} does not belong to sig {decl.name!r}")

    reduced: dict[str, FieldDecl] = {}
    marks: dict[str, set[str]] = {}
    for name, fdecl in instance.fields.items():
        columns = projection_columns(instance, fdecl, decl.name)
        if not columns:
            reduced[name] = fdecl
            continue
        kept = [
            tuple(v for i, v in enumerate(row) if i not in columns)
            for row in fdecl.tuples
            if all(row[i] == atom.label for i in columns)
        ]
        remaining = [c for i, c in enumerate(fdecl.column_sigs) if i not in columns]
        if len(remaining) >= 2:
            reduced[name] = FieldDecl(
                name=name, label=fdecl.label, column_sigs=remaining, tuples=kept
            )
        elif len(remaining) == 1:
            marks[name] = {row[0] for row in kept}
        # Arity zero means the field said something about the projected
        # atom only; there is nothing left to attach it to.

    visible = {name: s for name, s in instance.sigs.items() if name != decl.name}
    return ProjectedInstance(
        base=instance,
        projected_sig=decl.name,
        projected_atom=atom,
        fields=reduced,
        marks=marks,
        visible_sigs=visible,
    )
