"""Parsing of Alloy Analyzer instance XML into an in-memory model.

The accepted dialect is the Analyzer's instance export: an ``alloy`` root
with one ``instance`` element holding ``sig`` declarations (with ``atom``
children) and ``field`` declarations (with a ``types`` row and ``tuple``
children). Skolem constants are accepted and ignored. Exactly one instance
per document is consumed; a second one is an error rather than silently
dropped.

Atom order within a sig is recovered from ``util/ordering`` next fields
when one is present, otherwise from the numeric suffix of atom labels.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from .errors import InstanceIntegrityError, InstanceParseError, OrderingError

# Signatures the Analyzer always emits and never draws.
BUILTIN_SIG_LABELS = {"univ", "Int", "seq/Int", "String", "none"}


@dataclass(frozen=True)
class Atom:
    label: str
    sig: str  # qualified name of the declaring sig
    index: int  # numeric suffix after "$", 0 when the label has none
    indexed: bool = True  # False when the label carries no "$" suffix

    @property
    def display(self) -> str:
        """Label with the "$" separator removed, as the Analyzer shows it."""
        return self.label.replace("$", "")

    def sort_key(self) -> tuple:
        # Unindexed atoms sort after indexed ones, lexicographically.
        if self.indexed:
            return (0, self.index, self.label)
        return (1, 0, self.label)


@dataclass
class SigDecl:
    name: str  # qualified label, e.g. "this/Train"
    parent: str | None  # qualified name of the parent sig
    atoms: list[Atom] = field(default_factory=list)
    builtin: bool = False

    @property
    def display(self) -> str:
        return self.name.rsplit("/", 1)[-1]


@dataclass
class FieldDecl:
    name: str  # key in Instance.fields, disambiguated when labels collide
    label: str  # label as written in the XML
    column_sigs: list[str] = field(default_factory=list)  # qualified sig names
    tuples: list[tuple[str, ...]] = field(default_factory=list)  # atom labels

    @property
    def arity(self) -> int:
        return len(self.column_sigs)

    @property
    def display(self) -> str:
        return self.label.rsplit("/", 1)[-1]


@dataclass
class Instance:
    sigs: dict[str, SigDecl]
    fields: dict[str, FieldDecl]
    atoms: dict[str, Atom]
    command: str = ""
    filename: str = ""
    skolems: dict[str, list[tuple[str, ...]]] = field(default_factory=dict)

    def resolve_sig(self, ref: str) -> SigDecl:
        """Find a sig by qualified name or by unqualified suffix.

        An ambiguous suffix is an error so a spec never binds silently to
        the wrong module's sig.
        """
        if ref in self.sigs:
            return self.sigs[ref]
        matches = [s for s in self.sigs.values() if s.display == ref]
        if not matches:
            raise InstanceIntegrityError(f"no sig named {ref!r} in instance")
        if len(matches) > 1:
            names = ", ".join(sorted(s.name for s in matches))
            raise InstanceIntegrityError(f"sig reference {ref!r} is ambiguous: {names}")
        return matches[0]

    def resolve_field(self, ref: str) -> FieldDecl:
        if ref in self.fields:
            return self.fields[ref]
        matches = [f for f in self.fields.values() if f.display == ref or f.label == ref]
        if not matches:
            raise InstanceIntegrityError(f"no field named {ref!r} in instance")
        if len(matches) > 1:
            names = ", ".join(sorted(f.name for f in matches))
            raise InstanceIntegrityError(f"field reference {ref!r} is ambiguous: {names}")
        return matches[0]

    def sig_ancestry(self, sig_name: str) -> list[str]:
        """The sig followed by its ancestors, root last."""
        chain = []
        current: str | None = sig_name
        while current is not None and current in self.sigs:
            chain.append(current)
            current = self.sigs[current].parent
        return chain

    def sig_matches(self, column_sig: str, target: str) -> bool:
        """True when column_sig is the target sig or one of its descendants."""
        return target in self.sig_ancestry(column_sig)

    def atom_in_sig(self, atom: Atom, sig_name: str) -> bool:
        return self.sig_matches(atom.sig, sig_name)


@dataclass(frozen=True)
class StateOrder:
    sig: str
    atoms: tuple[Atom, ...]


def _split_atom_label(label: str) -> tuple[int, bool]:
    base, sep, suffix = label.rpartition("$")
    if sep and suffix.isdigit():
        return int(suffix), True
    return 0, False


def parse_instance_xml(text: str) -> Instance:
    """Parse one Analyzer instance document into an Instance."""
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        line, column = exc.position
        raise InstanceParseError("malformed XML", line, column) from None

    if root.tag == "instance":
        instances = [root]
    else:
        if root.tag != "alloy":
            raise InstanceParseError(f"expected <alloy> root, found <{root.tag}>")
        instances = root.findall("instance")
    if not instances:
        raise InstanceParseError("document contains no <instance> element")
    if len(instances) > 1:
        raise InstanceParseError(
            f"document contains {len(instances)} <instance> elements, expected exactly one"
        )
    node = instances[0]

    sigs: dict[str, SigDecl] = {}
    atoms: dict[str, Atom] = {}
    ids_to_name: dict[str, str] = {}
    parent_ids: dict[str, str | None] = {}

    for sig_el in node.findall("sig"):
        label = sig_el.get("label")
        if not label:
            raise InstanceParseError("<sig> element without a label")
        if label in sigs:
            raise InstanceIntegrityError(f"duplicate sig label {label!r}")
        builtin = sig_el.get("builtin") == "yes" or label in BUILTIN_SIG_LABELS
        decl = SigDecl(name=label, parent=None, builtin=builtin)
        sig_id = sig_el.get("ID")
        if sig_id is not None:
            ids_to_name[sig_id] = label
        parent_ids[label] = sig_el.get("parentID")
        for atom_el in sig_el.findall("atom"):
            atom_label = atom_el.get("label")
            if not atom_label:
                raise InstanceParseError(f"<atom> without a label in sig {label!r}")
            if atom_label in atoms:
                raise InstanceIntegrityError(f"atom {atom_label!r} declared twice")
            index, indexed = _split_atom_label(atom_label)
            atom = Atom(label=atom_label, sig=label, index=index, indexed=indexed)
            atoms[atom_label] = atom
            decl.atoms.append(atom)
        sigs[label] = decl

    # Resolve parent links once every sig is known.
    for name, decl in sigs.items():
        pid = parent_ids[name]
        if pid is not None and pid in ids_to_name:
            decl.parent = ids_to_name[pid]
    for name in sigs:
        seen = set()
        current: str | None = name
        while current is not None:
            if current in seen:
                raise InstanceIntegrityError(f"sig parent chain cycles at {current!r}")
            seen.add(current)
            current = sigs[current].parent if current in sigs else None

    fields: dict[str, FieldDecl] = {}
    for field_el in node.findall("field"):
        label = field_el.get("label")
        if not label:
            raise InstanceParseError("<field> element without a label")
        types_el = field_el.find("types")
        if types_el is None:
            raise InstanceParseError(f"field {label!r} has no <types> row")
        column_sigs = []
        for type_el in types_el.findall("type"):
            type_id = type_el.get("ID")
            if type_id is None or type_id not in ids_to_name:
                raise InstanceIntegrityError(
                    f"field {label!r} references unknown sig ID {type_id!r}"
                )
            column_sigs.append(ids_to_name[type_id])
        if len(column_sigs) < 1:
            raise InstanceParseError(f"field {label!r} has an empty <types> row")
        tuples = []
        for tuple_el in field_el.findall("tuple"):
            entry = []
            for atom_el in tuple_el.findall("atom"):
                atom_label = atom_el.get("label")
                if atom_label not in atoms:
                    raise InstanceIntegrityError(
                        f"field {label!r} references undeclared atom {atom_label!r}"
                    )
                entry.append(atom_label)
            if len(entry) != len(column_sigs):
                raise InstanceIntegrityError(
                    f"field {label!r} has a tuple of arity {len(entry)}, expected {len(column_sigs)}"
                )
            tuples.append(tuple(entry))
        key = label
        serial = 2
        while key in fields:
            key = f"{label}#{serial}"
            serial += 1
        fields[key] = FieldDecl(name=key, label=label, column_sigs=column_sigs, tuples=tuples)

    skolems: dict[str, list[tuple[str, ...]]] = {}
    for skolem_el in node.findall("skolem"):
        label = skolem_el.get("label") or ""
        rows = []
        for tuple_el in skolem_el.findall("tuple"):
            rows.append(tuple(a.get("label") or "" for a in tuple_el.findall("atom")))
        skolems[label] = rows

    return Instance(
        sigs=sigs,
        fields=fields,
        atoms=atoms,
        command=node.get("command", ""),
        filename=node.get("filename", ""),
        skolems=skolems,
    )


def instance_to_xml(instance: Instance) -> str:
    """Serialize back to the accepted dialect, for debugging and round trips."""
    root = ET.Element("alloy")
    node = ET.SubElement(root, "instance")
    if instance.command:
        node.set("command", instance.command)
    if instance.filename:
        node.set("filename", instance.filename)
    ids = {name: str(i + 2) for i, name in enumerate(instance.sigs)}
    for name, decl in instance.sigs.items():
        sig_el = ET.SubElement(node, "sig", label=name, ID=ids[name])
        if decl.parent is not None and decl.parent in ids:
            sig_el.set("parentID", ids[decl.parent])
        if decl.builtin:
            sig_el.set("builtin", "yes")
        for atom in decl.atoms:
            ET.SubElement(sig_el, "atom", label=atom.label)
    for decl in instance.fields.values():
        field_el = ET.SubElement(node, "field", label=decl.label)
        for row in decl.tuples:
            tuple_el = ET.SubElement(field_el, "tuple")
            for atom_label in row:
                ET.SubElement(tuple_el, "atom", label=atom_label)
        types_el = ET.SubElement(field_el, "types")
        for sig_name in decl.column_sigs:
            ET.SubElement(types_el, "type", ID=ids[sig_name])
    for label, rows in instance.skolems.items():
        skolem_el = ET.SubElement(node, "skolem", label=label)
        for row in rows:
            tuple_el = ET.SubElement(skolem_el, "tuple")
            for atom_label in row:
                ET.SubElement(tuple_el, "atom", label=atom_label)
    ET.indent(root)
    return ET.tostring(root, encoding="unicode") + "\n"


def _chain_order(decl: SigDecl, tuples: list[tuple[str, ...]]) -> list[str] | None:
    """Order atom labels along a successor relation, or None if not a chain."""
    members = {a.label for a in decl.atoms}
    if not members:
        return [] if not tuples else None
    succ: dict[str, str] = {}
    targets = set()
    for src, dst in tuples:
        if src not in members or dst not in members:
            return None
        if src in succ or dst in targets:
            return None  # branching in either direction
        succ[src] = dst
        targets.add(dst)
    heads = [label for label in members if label not in targets]
    if len(heads) != 1:
        return None
    order = [heads[0]]
    while order[-1] in succ:
        order.append(succ[order[-1]])
    if len(order) != len(members):
        return None  # a cycle or a second component kept atoms unreachable
    return order


def _is_next_hint(decl: FieldDecl) -> bool:
    name = decl.name.lower()
    return decl.display.lower() == "next" or "ordering" in name


def _resolve_order(instance: Instance, sig_ref: str) -> tuple[list[Atom], FieldDecl | None]:
    decl = instance.resolve_sig(sig_ref)
    hinted = []
    plain = []
    for fdecl in instance.fields.values():
        if fdecl.arity != 2 or fdecl.column_sigs != [decl.name, decl.name]:
            continue
        (hinted if _is_next_hint(fdecl) else plain).append(fdecl)

    for fdecl in sorted(hinted, key=lambda f: f.name):
        order = _chain_order(decl, fdecl.tuples)
        if order is None:
            raise OrderingError(
                f"field {fdecl.name!r} does not order sig {decl.name!r} as a linear chain"
            )
        return [instance.atoms[label] for label in order], fdecl

    chains = []
    for fdecl in sorted(plain, key=lambda f: f.name):
        order = _chain_order(decl, fdecl.tuples)
        if order is not None:
            chains.append((order, fdecl))
    if len(chains) == 1:
        order, fdecl = chains[0]
        return [instance.atoms[label] for label in order], fdecl

    return sorted(decl.atoms, key=Atom.sort_key), None


def element_order(instance: Instance, sig_ref: str) -> list[Atom]:
    """Canonical order of a sig's atoms.

    A ``util/ordering`` next field wins when present; its conventional
    naming is a hint only, so any binary field over the sig that forms a
    linear chain across every atom is accepted. Without one the atoms are
    sorted by label index.
    """
    return _resolve_order(instance, sig_ref)[0]


def ordering_field(instance: Instance, sig_ref: str) -> FieldDecl | None:
    """The field that orders the sig's atoms, when one exists."""
    try:
        return _resolve_order(instance, sig_ref)[1]
    except OrderingError:
        return None


def state_order(instance: Instance, sig_ref: str) -> StateOrder:
    """The trace axis: ordered atoms of the sig that is projected over."""
    decl = instance.resolve_sig(sig_ref)
    return StateOrder(sig=decl.name, atoms=tuple(element_order(instance, decl.name)))
