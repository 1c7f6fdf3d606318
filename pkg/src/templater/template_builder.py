"""Pruning of full reaction graphs into minimal pre/post templates.

The template keeps the reaction site (initiators, every node mapped outside
the conserved regions, created and deleted atoms) plus its graph
neighborhood within a hop cutoff.  Interactions are copied from the input
data files, never re-derived, so templates cannot contain terms absent from
the user's force field.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from templater.conserved_mapping import AtomMapping
from templater.errors import InconsistentPruning
from templater.graph_core import UnifiedGraph
from templater.lammps_io import (
    MoleculeTemplateFile,
    ReactionMapFile,
    SystemTopology,
    TemplateAtom,
)
from templater.reaction_analysis import ReactionReport

DEFAULT_CUTOFF = 4


def prune_to_cutoff(
    graph: UnifiedGraph,
    sites: set[int],
    cutoff: int,
    always_include: frozenset[int] | set[int] = frozenset(),
) -> set[int]:
    """Nodes within ``cutoff`` hops of any site, plus forced inclusions."""
    if not sites:
        raise ValueError("at least one site node is required")
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    kept = set(always_include)
    distances = {gid: 0 for gid in sites}
    queue = deque(sorted(sites))
    while queue:
        node = queue.popleft()
        if distances[node] >= cutoff:
            continue
        for nbr in graph.neighbors(node):
            if nbr not in distances:
                distances[nbr] = distances[node] + 1
                queue.append(nbr)
    kept.update(distances)
    return kept


def mark_edge_atoms(pruned: set[int], graph: UnifiedGraph) -> set[int]:
    """Pruned nodes retaining at least one neighbor outside the template."""
    return {
        gid
        for gid in pruned
        if any(nbr not in pruned for nbr in graph.neighbors(gid))
    }


def carry_features(
    pruned: set[int],
    interactions: list[tuple[int, tuple[int, ...]]],
    local_index: dict[int, int],
) -> list[tuple[int, tuple[int, ...]]]:
    """Keep interactions fully inside the template, in template-local indices.

    Input order is preserved so the emitted sections mirror the data files.
    """
    kept = []
    for type_id, members in interactions:
        if all(m in pruned for m in members):
            kept.append((type_id, tuple(local_index[m] for m in members)))
    return kept


@dataclass
class ReactionTemplates:
    """Pre/post molecule templates plus all map-file bookkeeping."""

    pre: MoleculeTemplateFile
    post: MoleculeTemplateFile
    equivalences: list[tuple[int, int]]
    edge_atoms: list[int]
    initiators: tuple[int, int]
    deleted: list[int]
    created: list[int]
    cutoff: int
    pre_index_of: dict[int, int] = field(default_factory=dict)
    post_index_of: dict[int, int] = field(default_factory=dict)

    def to_map_file(self) -> ReactionMapFile:
        return ReactionMapFile(
            pre_atom_count=self.pre.atom_count,
            post_atom_count=self.post.atom_count,
            equivalences=list(self.equivalences),
            initiators=self.initiators,
            edge_ids=list(self.edge_atoms),
            delete_ids=list(self.deleted),
            create_ids=list(self.created),
        )


def _interactions_in_gid_space(
    graph: UnifiedGraph, topologies: list[SystemTopology]
) -> dict[str, list[tuple[int, tuple[int, ...]]]]:
    out: dict[str, list[tuple[int, tuple[int, ...]]]] = {
        "bonds": [],
        "angles": [],
        "dihedrals": [],
        "impropers": [],
    }
    for component, topology in enumerate(topologies, start=1):
        for name in out:
            for type_id, members in getattr(topology, name):
                out[name].append(
                    (type_id, tuple(graph.gid_for(component, m) for m in members))
                )
    return out


def _template_atoms(
    graph: UnifiedGraph, topologies: list[SystemTopology], ordered_gids: list[int]
) -> list[TemplateAtom]:
    records = {}
    for component, topology in enumerate(topologies, start=1):
        for atom in topology.atoms:
            records[graph.gid_for(component, atom.atom_id)] = atom
    atoms = []
    for gid in ordered_gids:
        record = records[gid]
        atoms.append(
            TemplateAtom(
                type_id=record.type_id,
                charge=record.charge,
                x=record.x,
                y=record.y,
                z=record.z,
            )
        )
    return atoms


def reaction_site_nodes(mapping: AtomMapping, report: ReactionReport) -> set[int]:
    """Reactant-side nodes the cutoff is measured from.

    Everything mapped outside the conserved regions belongs to the reaction
    site, alongside the initiators.  Keeping the whole site guarantees every
    atom whose type or charge changes ends up inside the template.
    """
    sites = {r for r in mapping.pairs if not mapping.is_conserved(r)}
    sites.update(report.initiators)
    return sites


def prune_reaction(
    mapping: AtomMapping,
    report: ReactionReport,
    g_reac: UnifiedGraph,
    g_prod: UnifiedGraph,
    cutoff: int = DEFAULT_CUTOFF,
) -> tuple[set[int], set[int]]:
    """Compute mutually consistent pre/post template node sets.

    Both sides are pruned around corresponding sites; atoms with changed
    bonding and the created/deleted sets are always kept.  The union closure
    through the mapping guarantees splice consistency.
    """
    pre_sites = reaction_site_nodes(mapping, report)
    post_sites = {mapping.pairs[r] for r in pre_sites}
    changed = {r for r, delta in report.bond_deltas.items() if delta}
    pre_always = set(report.deleted) | changed
    post_always = set(report.created) | {mapping.pairs[r] for r in changed}

    pre_set = prune_to_cutoff(g_reac, pre_sites, cutoff, pre_always)
    post_set = prune_to_cutoff(g_prod, post_sites, cutoff, post_always)

    post_set |= {mapping.pairs[r] for r in pre_set if r in mapping.pairs}
    pre_set |= {mapping.reverse[p] for p in post_set if p in mapping.reverse}
    return pre_set, post_set


def assemble_templates(
    mapping: AtomMapping,
    report: ReactionReport,
    pre_pruned: set[int],
    post_pruned: set[int],
    g_reac: UnifiedGraph,
    g_prod: UnifiedGraph,
    reactant_topologies: list[SystemTopology],
    product_topologies: list[SystemTopology],
    cutoff: int = DEFAULT_CUTOFF,
) -> ReactionTemplates:
    """Renumber the pruned sets and assemble both templates plus the map."""
    image = {mapping.pairs[r] for r in pre_pruned if r in mapping.pairs}
    if image != post_pruned - set(report.created):
        raise InconsistentPruning(
            "mapped image of the pre template set differs from the post set"
        )
    if not set(report.deleted) <= pre_pruned or not set(report.created) <= post_pruned:
        raise InconsistentPruning("created/deleted atoms missing from the templates")

    pre_order = sorted(pre_pruned)
    post_order = sorted(post_pruned)
    pre_index = {gid: i for i, gid in enumerate(pre_order, start=1)}
    post_index = {gid: i for i, gid in enumerate(post_order, start=1)}

    reac_interactions = _interactions_in_gid_space(g_reac, reactant_topologies)
    prod_interactions = _interactions_in_gid_space(g_prod, product_topologies)

    pre_template = MoleculeTemplateFile(
        atoms=_template_atoms(g_reac, reactant_topologies, pre_order),
        bonds=carry_features(pre_pruned, reac_interactions["bonds"], pre_index),
        angles=carry_features(pre_pruned, reac_interactions["angles"], pre_index),
        dihedrals=carry_features(pre_pruned, reac_interactions["dihedrals"], pre_index),
        impropers=carry_features(pre_pruned, reac_interactions["impropers"], pre_index),
    )
    post_template = MoleculeTemplateFile(
        atoms=_template_atoms(g_prod, product_topologies, post_order),
        bonds=carry_features(post_pruned, prod_interactions["bonds"], post_index),
        angles=carry_features(post_pruned, prod_interactions["angles"], post_index),
        dihedrals=carry_features(post_pruned, prod_interactions["dihedrals"], post_index),
        impropers=carry_features(post_pruned, prod_interactions["impropers"], post_index),
    )

    equivalences = sorted(
        (pre_index[r], post_index[p])
        for r, p in mapping.pairs.items()
        if r in pre_pruned
    )
    templates = ReactionTemplates(
        pre=pre_template,
        post=post_template,
        equivalences=equivalences,
        edge_atoms=sorted(pre_index[g] for g in mark_edge_atoms(pre_pruned, g_reac)),
        initiators=(pre_index[report.initiators[0]], pre_index[report.initiators[1]]),
        deleted=sorted(pre_index[g] for g in report.deleted),
        created=sorted(post_index[g] for g in report.created),
        cutoff=cutoff,
        pre_index_of=pre_index,
        post_index_of=post_index,
    )
    return templates
