"""Readers and writers for the LAMMPS text formats used by the pipeline.

Three formats are handled:

* data files (read): ``Masses``, ``Atoms`` (full or molecular style),
  ``Bonds`` and the optional ``Angles``/``Dihedrals``/``Impropers`` sections.
  Coefficient and velocity sections are recognized and skipped.
* molecule template files (read/write): ``Coords``, ``Types``, ``Charges``
  plus interaction sections, as consumed by the REACTION machinery.
* reaction map files (write): equivalences, initiator/edge/delete/create ids.

All text is plain ASCII with ``\\n`` newlines.  Serialization is
deterministic: identical inputs produce byte-identical output.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from templater.errors import (
    DanglingReference,
    MalformedHeader,
    MalformedLine,
    MissingMass,
    UnknownSection,
    ValidationError,
)

# Charges and coordinates use a fixed width so diffs stay stable.
_FLOAT_FMT = "{:.6f}"

# Header count phrases in data files, keyed by the trailing keyword text.
_HEADER_KEYWORDS = (
    "atoms",
    "bonds",
    "angles",
    "dihedrals",
    "impropers",
    "atom types",
    "bond types",
    "angle types",
    "dihedral types",
    "improper types",
    "extra bond per atom",
    "extra angle per atom",
    "extra dihedral per atom",
    "extra improper per atom",
    "extra special per atom",
)

_BOX_KEYWORDS = ("xlo xhi", "ylo yhi", "zlo zhi", "xy xz yz")

# Sections we parse, with the number of atom ids per interaction line.
_INTERACTION_SECTIONS = {"Bonds": 2, "Angles": 3, "Dihedrals": 4, "Impropers": 4}

# Sections accepted and skipped untouched (pass-through per the format).
_SKIPPED_SECTIONS = frozenset(
    {
        "Velocities",
        "Pair Coeffs",
        "PairIJ Coeffs",
        "Bond Coeffs",
        "Angle Coeffs",
        "Dihedral Coeffs",
        "Improper Coeffs",
        "BondBond Coeffs",
        "BondAngle Coeffs",
        "MiddleBondTorsion Coeffs",
        "EndBondTorsion Coeffs",
        "AngleTorsion Coeffs",
        "AngleAngleTorsion Coeffs",
        "BondBond13 Coeffs",
        "AngleAngle Coeffs",
    }
)


@dataclass(frozen=True)
class AtomRecord:
    """One row of an Atoms section (full style; molecular implies charge 0)."""

    atom_id: int
    mol_id: int
    type_id: int
    charge: float
    x: float
    y: float
    z: float


@dataclass
class SystemTopology:
    """Full parsed contents of one LAMMPS data file."""

    atoms: list[AtomRecord]
    masses: dict[int, float]
    bonds: list[tuple[int, tuple[int, int]]]
    angles: list[tuple[int, tuple[int, int, int]]] = field(default_factory=list)
    dihedrals: list[tuple[int, tuple[int, int, int, int]]] = field(default_factory=list)
    impropers: list[tuple[int, tuple[int, int, int, int]]] = field(default_factory=list)
    box: tuple[tuple[float, float], ...] | None = None
    type_counts: dict[str, int] = field(default_factory=dict)

    def atom_ids(self) -> set[int]:
        return {a.atom_id for a in self.atoms}

    def mass_of(self, type_id: int) -> float:
        return self.masses[type_id]

    def validate(self) -> None:
        """Check the structural invariants; raise a ParseError subclass."""
        ids = [a.atom_id for a in self.atoms]
        id_set = set(ids)
        if len(id_set) != len(ids):
            dup = sorted(i for i in id_set if ids.count(i) > 1)[0]
            raise MalformedLine(f"duplicate atom id {dup}")
        for a in self.atoms:
            if a.type_id not in self.masses:
                raise MissingMass(f"atom type {a.type_id} has no Masses entry")
        for name, entries in (
            ("Bonds", self.bonds),
            ("Angles", self.angles),
            ("Dihedrals", self.dihedrals),
            ("Impropers", self.impropers),
        ):
            for _type_id, members in entries:
                for atom_id in members:
                    if atom_id not in id_set:
                        raise DanglingReference(
                            f"{name} entry references missing atom id {atom_id}"
                        )
        for keyword, expected in (
            ("atoms", len(self.atoms)),
            ("bonds", len(self.bonds)),
            ("angles", len(self.angles)),
            ("dihedrals", len(self.dihedrals)),
            ("impropers", len(self.impropers)),
        ):
            declared = self.type_counts.get(keyword)
            if declared is not None and declared != expected:
                raise MalformedHeader(
                    f"header declares {declared} {keyword}, found {expected}"
                )


def _strip_comment(line: str) -> str:
    hash_pos = line.find("#")
    if hash_pos >= 0:
        line = line[:hash_pos]
    return line.strip()


def _parse_header_line(stripped: str) -> tuple[str, int] | None:
    """Return (keyword, count) if the line is a recognized count header."""
    for keyword in _HEADER_KEYWORDS:
        if stripped.endswith(" " + keyword):
            prefix = stripped[: -len(keyword)].strip()
            if " " in prefix:
                return None
            try:
                return keyword, int(prefix)
            except ValueError:
                raise MalformedHeader(f"unparsable count line: {stripped!r}")
    return None


def _parse_box_line(stripped: str) -> tuple[str, tuple[float, float]] | None:
    for keyword in _BOX_KEYWORDS:
        if stripped.endswith(keyword):
            values = stripped[: -len(keyword)].split()
            try:
                floats = [float(v) for v in values]
            except ValueError:
                raise MalformedHeader(f"unparsable box line: {stripped!r}")
            if keyword == "xy xz yz":
                # Triclinic tilt factors are tolerated and ignored.
                return keyword, (0.0, 0.0)
            if len(floats) != 2:
                raise MalformedHeader(f"unparsable box line: {stripped!r}")
            return keyword, (floats[0], floats[1])
    return None


def _split_sections(text: str, known: frozenset[str]) -> list[tuple[str, int, list[tuple[int, str]]]]:
    """Split file body into (section name, header line no, body lines).

    The leading block (before the first section) is returned under the name
    ``""``.  Section names are matched case-sensitively against ``known``;
    anything else that looks like a section header raises UnknownSection.
    """
    lines = text.split("\n")
    sections: list[tuple[str, int, list[tuple[int, str]]]] = [("", 0, [])]
    # The first line of the file is a comment by convention.
    for line_no, raw in enumerate(lines[1:], start=2):
        stripped = _strip_comment(raw)
        if not stripped:
            continue
        if stripped in known:
            sections.append((stripped, line_no, []))
            continue
        first = stripped.split()[0]
        if sections[-1][0] == "" and first[0].isalpha() and not _looks_numeric_row(stripped):
            # Still in the header block: count/box lines are handled by the
            # caller; anything alphabetic that is not one of them is checked
            # there too.  Fall through.
            sections[-1][2].append((line_no, stripped))
            continue
        if first[0].isalpha() and not _looks_numeric_row(stripped):
            raise UnknownSection(f"unrecognized section {stripped!r}", line_no)
        sections[-1][2].append((line_no, stripped))
    return sections


def _looks_numeric_row(stripped: str) -> bool:
    try:
        float(stripped.split()[0])
        return True
    except ValueError:
        return False


def parse_data_file(text: str) -> SystemTopology:
    """Parse a LAMMPS data file into a validated SystemTopology.

    The canonical atom style is ``full``; ``molecular`` is accepted with
    charges defaulting to 0.  Comments and blank lines are ignored and the
    section order is arbitrary.
    """
    known = frozenset({"Masses", "Atoms"}) | frozenset(_INTERACTION_SECTIONS) | _SKIPPED_SECTIONS
    sections = _split_sections(text, known)

    type_counts: dict[str, int] = {}
    box: dict[str, tuple[float, float]] = {}
    masses: dict[int, float] = {}
    atoms: list[AtomRecord] = []
    interactions: dict[str, list] = {name: [] for name in _INTERACTION_SECTIONS}
    seen: set[str] = set()

    for name, header_line_no, body in sections:
        if name == "":
            for line_no, stripped in body:
                header = _parse_header_line(stripped)
                if header is not None:
                    type_counts[header[0]] = header[1]
                    continue
                box_entry = _parse_box_line(stripped)
                if box_entry is not None:
                    if box_entry[0] != "xy xz yz":
                        box[box_entry[0]] = box_entry[1]
                    continue
                raise UnknownSection(f"unrecognized header line {stripped!r}", line_no)
        elif name in _SKIPPED_SECTIONS:
            continue
        elif name in seen:
            raise MalformedHeader(f"duplicate section {name!r}", header_line_no)
        elif name == "Masses":
            seen.add(name)
            for line_no, stripped in body:
                parts = stripped.split()
                try:
                    masses[int(parts[0])] = float(parts[1])
                except (IndexError, ValueError):
                    raise MalformedLine(f"bad Masses entry {stripped!r}", line_no)
        elif name == "Atoms":
            seen.add(name)
            for line_no, stripped in body:
                atoms.append(_parse_atom_line(stripped, line_no))
        else:
            seen.add(name)
            arity = _INTERACTION_SECTIONS[name]
            for line_no, stripped in body:
                parts = stripped.split()
                if len(parts) < 2 + arity:
                    raise MalformedLine(f"bad {name} entry {stripped!r}", line_no)
                try:
                    type_id = int(parts[1])
                    members = tuple(int(p) for p in parts[2 : 2 + arity])
                except ValueError:
                    raise MalformedLine(f"bad {name} entry {stripped!r}", line_no)
                interactions[name].append((type_id, members))

    if "Atoms" not in seen:
        raise MalformedHeader("data file has no Atoms section")
    if "Masses" not in seen:
        raise MalformedHeader("data file has no Masses section")

    box_tuple = None
    if box:
        box_tuple = tuple(box.get(k, (0.0, 0.0)) for k in ("xlo xhi", "ylo yhi", "zlo zhi"))

    topology = SystemTopology(
        atoms=atoms,
        masses=masses,
        bonds=interactions["Bonds"],
        angles=interactions["Angles"],
        dihedrals=interactions["Dihedrals"],
        impropers=interactions["Impropers"],
        box=box_tuple,
        type_counts=type_counts,
    )
    topology.validate()
    return topology


def _parse_atom_line(stripped: str, line_no: int) -> AtomRecord:
    parts = stripped.split()
    try:
        if len(parts) in (7, 10):  # full: id mol type q x y z [image flags]
            return AtomRecord(
                atom_id=int(parts[0]),
                mol_id=int(parts[1]),
                type_id=int(parts[2]),
                charge=float(parts[3]),
                x=float(parts[4]),
                y=float(parts[5]),
                z=float(parts[6]),
            )
        if len(parts) in (6, 9):  # molecular: id mol type x y z [image flags]
            return AtomRecord(
                atom_id=int(parts[0]),
                mol_id=int(parts[1]),
                type_id=int(parts[2]),
                charge=0.0,
                x=float(parts[3]),
                y=float(parts[4]),
                z=float(parts[5]),
            )
    except ValueError:
        pass
    raise MalformedLine(f"bad Atoms entry {stripped!r}", line_no)


@dataclass(frozen=True)
class TemplateAtom:
    """Per-atom payload of a molecule template, indexed implicitly 1..N."""

    type_id: int
    charge: float
    x: float
    y: float
    z: float


@dataclass
class MoleculeTemplateFile:
    """In-memory form of a LAMMPS molecule template file."""

    atoms: list[TemplateAtom]
    bonds: list[tuple[int, tuple[int, int]]] = field(default_factory=list)
    angles: list[tuple[int, tuple[int, int, int]]] = field(default_factory=list)
    dihedrals: list[tuple[int, tuple[int, int, int, int]]] = field(default_factory=list)
    impropers: list[tuple[int, tuple[int, int, int, int]]] = field(default_factory=list)
    special_counts: list[tuple[int, int, int]] | None = None

    @property
    def atom_count(self) -> int:
        return len(self.atoms)

    def validate(self) -> None:
        n = self.atom_count
        if n == 0:
            raise ValidationError("template has no atoms")
        for name, entries in (
            ("bond", self.bonds),
            ("angle", self.angles),
            ("dihedral", self.dihedrals),
            ("improper", self.impropers),
        ):
            for _type_id, members in entries:
                for idx in members:
                    if not 1 <= idx <= n:
                        raise ValidationError(
                            f"{name} references atom index {idx} outside 1..{n}"
                        )
        if self.special_counts is not None and len(self.special_counts) != n:
            raise ValidationError("Special Bond Counts length differs from atom count")


def write_molecule_template(template: MoleculeTemplateFile, title: str = "molecule template") -> str:
    """Serialize a molecule template; sections with zero entries are omitted."""
    template.validate()
    out = [f"# {title}", ""]
    out.append(f"{template.atom_count} atoms")
    for keyword, entries in (
        ("bonds", template.bonds),
        ("angles", template.angles),
        ("dihedrals", template.dihedrals),
        ("impropers", template.impropers),
    ):
        if entries:
            out.append(f"{len(entries)} {keyword}")
    out.append("")

    out.append("Coords")
    out.append("")
    for i, atom in enumerate(template.atoms, start=1):
        coords = " ".join(_FLOAT_FMT.format(v) for v in (atom.x, atom.y, atom.z))
        out.append(f"{i} {coords}")
    out.append("")

    out.append("Types")
    out.append("")
    for i, atom in enumerate(template.atoms, start=1):
        out.append(f"{i} {atom.type_id}")
    out.append("")

    out.append("Charges")
    out.append("")
    for i, atom in enumerate(template.atoms, start=1):
        out.append(f"{i} {_FLOAT_FMT.format(atom.charge)}")
    out.append("")

    for name, entries in (
        ("Bonds", template.bonds),
        ("Angles", template.angles),
        ("Dihedrals", template.dihedrals),
        ("Impropers", template.impropers),
    ):
        if not entries:
            continue
        out.append(name)
        out.append("")
        for i, (type_id, members) in enumerate(entries, start=1):
            out.append(f"{i} {type_id} " + " ".join(str(m) for m in members))
        out.append("")

    if template.special_counts is not None:
        out.append("Special Bond Counts")
        out.append("")
        for i, (n1, n2, n3) in enumerate(template.special_counts, start=1):
            out.append(f"{i} {n1} {n2} {n3}")
        out.append("")

    return "\n".join(out)


_TEMPLATE_SECTIONS = frozenset(
    {"Coords", "Types", "Charges", "Bonds", "Angles", "Dihedrals", "Impropers", "Special Bond Counts"}
)

_TEMPLATE_COUNT_KEYWORDS = ("atoms", "bonds", "angles", "dihedrals", "impropers")


def parse_molecule_template(text: str) -> MoleculeTemplateFile:
    """Inverse of write_molecule_template, up to whitespace."""
    sections = _split_sections(text, _TEMPLATE_SECTIONS)

    counts: dict[str, int] = {}
    rows: dict[str, list[tuple[int, list[str]]]] = {}
    for name, header_line_no, body in sections:
        if name == "":
            for line_no, stripped in body:
                header = _parse_header_line(stripped)
                if header is None or header[0] not in _TEMPLATE_COUNT_KEYWORDS:
                    raise UnknownSection(f"unrecognized header line {stripped!r}", line_no)
                counts[header[0]] = header[1]
            continue
        if name in rows:
            raise MalformedHeader(f"duplicate section {name!r}", header_line_no)
        rows[name] = [(line_no, stripped.split()) for line_no, stripped in body]

    n = counts.get("atoms")
    if n is None:
        raise MalformedHeader("molecule template lacks an atom count")
    for required in ("Coords", "Types", "Charges"):
        if required not in rows:
            raise MalformedHeader(f"molecule template lacks a {required} section")

    def indexed(name: str, width: int) -> list[list[str] | None]:
        table = rows.get(name, [])
        ordered: dict[int, list[str]] = {}
        for line_no, parts in table:
            if len(parts) != width + 1:
                raise MalformedLine(f"bad {name} entry", line_no)
            try:
                idx = int(parts[0])
            except ValueError:
                raise MalformedLine(f"bad {name} entry", line_no)
            if idx in ordered:
                raise MalformedLine(f"duplicate {name} index {idx}", line_no)
            ordered[idx] = parts[1:]
        return [ordered.get(i) for i in range(1, len(ordered) + 1)]

    coords = indexed("Coords", 3)
    types = indexed("Types", 1)
    charges = indexed("Charges", 1)
    if not (len(coords) == len(types) == len(charges) == n) or None in coords or None in types or None in charges:
        raise MalformedHeader(
            f"header declares {n} atoms, sections disagree"
        )

    try:
        atoms = [
            TemplateAtom(
                type_id=int(types[i][0]),
                charge=float(charges[i][0]),
                x=float(coords[i][0]),
                y=float(coords[i][1]),
                z=float(coords[i][2]),
            )
            for i in range(n)
        ]
    except ValueError:
        raise MalformedLine("non-numeric atom data")

    def interactions(name: str, arity: int) -> list[tuple[int, tuple[int, ...]]]:
        table = rows.get(name, [])
        declared = counts.get(name.lower(), 0)
        if len(table) != declared:
            raise MalformedHeader(
                f"header declares {declared} {name.lower()}, found {len(table)}"
            )
        result = []
        for line_no, parts in table:
            if len(parts) != 2 + arity:
                raise MalformedLine(f"bad {name} entry", line_no)
            try:
                result.append((int(parts[0]), int(parts[1]), tuple(int(p) for p in parts[2:])))
            except ValueError:
                raise MalformedLine(f"bad {name} entry", line_no)
        result.sort(key=lambda row: row[0])
        if [row[0] for row in result] != list(range(1, len(result) + 1)):
            raise MalformedLine(f"non-contiguous {name} indices")
        return [(type_id, members) for _, type_id, members in result]

    special = None
    if "Special Bond Counts" in rows:
        table = indexed("Special Bond Counts", 3)
        if len(table) != n or None in table:
            raise MalformedHeader("Special Bond Counts section length mismatch")
        try:
            special = [tuple(int(v) for v in row) for row in table]
        except ValueError:
            raise MalformedLine("bad Special Bond Counts entry")

    template = MoleculeTemplateFile(
        atoms=atoms,
        bonds=interactions("Bonds", 2),
        angles=interactions("Angles", 3),
        dihedrals=interactions("Dihedrals", 4),
        impropers=interactions("Impropers", 4),
        special_counts=special,
    )
    template.validate()
    return template


@dataclass
class ReactionMapFile:
    """Contents of a reaction map file in pre/post template indexing.

    Equivalences cover exactly the non-deleted pre atoms and the non-created
    post atoms; initiators are pre-template indices and must be mapped.
    """

    pre_atom_count: int
    post_atom_count: int
    equivalences: list[tuple[int, int]]
    initiators: tuple[int, int]
    edge_ids: list[int] = field(default_factory=list)
    delete_ids: list[int] = field(default_factory=list)
    create_ids: list[int] = field(default_factory=list)

    def validate(self) -> None:
        pre_side = [pre for pre, _ in self.equivalences]
        post_side = [post for _, post in self.equivalences]
        if len(set(pre_side)) != len(pre_side) or len(set(post_side)) != len(post_side):
            raise ValidationError("equivalences are not a bijection")
        deleted = set(self.delete_ids)
        created = set(self.create_ids)
        expected_pre = set(range(1, self.pre_atom_count + 1)) - deleted
        expected_post = set(range(1, self.post_atom_count + 1)) - created
        if set(pre_side) != expected_pre:
            raise ValidationError("equivalences do not cover the non-deleted pre atoms")
        if set(post_side) != expected_post:
            raise ValidationError("equivalences do not cover the non-created post atoms")
        if len(self.initiators) != 2:
            raise ValidationError("exactly two initiator atoms are required")
        for initiator in self.initiators:
            if initiator not in expected_pre:
                raise ValidationError(f"initiator {initiator} not in the equivalence list")
        for edge in self.edge_ids:
            if not 1 <= edge <= self.pre_atom_count:
                raise ValidationError(f"edge id {edge} outside the pre template")
        for create in created:
            if not 1 <= create <= self.post_atom_count:
                raise ValidationError(f"created atom {create} not in the post template")


def write_map_file(map_file: ReactionMapFile, title: str = "reaction map") -> str:
    """Serialize a reaction map file; zero-length sections are omitted."""
    map_file.validate()
    out = [f"# {title}", ""]
    out.append(f"{len(map_file.equivalences)} equivalences")
    if map_file.edge_ids:
        out.append(f"{len(map_file.edge_ids)} edgeIDs")
    if map_file.delete_ids:
        out.append(f"{len(map_file.delete_ids)} deleteIDs")
    if map_file.create_ids:
        out.append(f"{len(map_file.create_ids)} createIDs")
    out.append("")

    out.append("InitiatorIDs")
    out.append("")
    for initiator in map_file.initiators:
        out.append(str(initiator))
    out.append("")

    for name, ids in (
        ("EdgeIDs", map_file.edge_ids),
        ("DeleteIDs", map_file.delete_ids),
        ("CreateIDs", map_file.create_ids),
    ):
        if not ids:
            continue
        out.append(name)
        out.append("")
        for atom_id in sorted(ids):
            out.append(str(atom_id))
        out.append("")

    out.append("Equivalences")
    out.append("")
    for pre, post in sorted(map_file.equivalences):
        out.append(f"{pre} {post}")
    out.append("")

    return "\n".join(out)
