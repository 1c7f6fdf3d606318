"""Reaction-site detection from a finished atom mapping.

Bond deltas compare each mapped node's reactant neighborhood against the
pullback of its product neighborhood; eigenvector-centrality deltas grade
how much a node's structural role shifts.  The initiator pair is the
highest combined scorer of each of the two reacting molecules.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from templater.conserved_mapping import AtomMapping
from templater.errors import NoReactionDetected, UnsupportedReaction
from templater.graph_core import UnifiedGraph, centrality_by_node

# Token marking a product-side neighbor with no preimage (a created atom).
CREATED_MARK = "created"


def bond_delta(
    pair: tuple[int, int],
    mapping: AtomMapping,
    g_reac: UnifiedGraph,
    g_prod: UnifiedGraph,
) -> frozenset:
    """Symmetric difference between reactant and pulled-back product neighbors.

    Product neighbors are translated through the inverse mapping; neighbors
    without a preimage count as gains and are tagged ``("created", gid)``.
    """
    r_gid, p_gid = pair
    pulled = set()
    for nbr in g_prod.neighbors(p_gid):
        pre = mapping.reverse.get(nbr)
        pulled.add(pre if pre is not None else (CREATED_MARK, nbr))
    return frozenset(pulled ^ set(g_reac.neighbors(r_gid)))


def centrality_delta(
    pair: tuple[int, int], g_reac: UnifiedGraph, g_prod: UnifiedGraph
) -> float:
    """Absolute change in per-molecule unit-norm eigenvector centrality."""
    r_gid, p_gid = pair
    c_r = centrality_by_node(g_reac, g_reac.nodes[r_gid].component)[r_gid]
    c_p = centrality_by_node(g_prod, g_prod.nodes[p_gid].component)[p_gid]
    return abs(c_p - c_r)


def classify_created_deleted(
    mapping: AtomMapping, g_reac: UnifiedGraph, g_prod: UnifiedGraph
) -> tuple[set[int], set[int]]:
    """(created product nodes, deleted reactant nodes) of a final mapping."""
    created = {g for g in g_prod.nodes if g not in mapping.reverse}
    deleted = {g for g in g_reac.nodes if g not in mapping.pairs}
    return created, deleted


def select_initiators(
    bond_deltas: dict[int, frozenset],
    centrality_deltas: dict[int, float],
    mapping: AtomMapping,
    g_reac: UnifiedGraph,
    g_prod: UnifiedGraph,
) -> tuple[int, int]:
    """Pick one reactant-side initiator per reacting molecule.

    Candidates are mapped nodes with a nonempty bond delta.  Within each
    reacting molecule the winner maximizes ``|delta_E| + delta_C / max
    delta_C``, so bond rearrangement dominates and centrality breaks ties;
    remaining ties go to the smallest id.  Exactly two reacting molecules
    are supported.
    """
    by_component: dict[int, list[int]] = {}
    for r_gid in sorted(mapping.pairs):
        if bond_deltas.get(r_gid):
            by_component.setdefault(g_reac.nodes[r_gid].component, []).append(r_gid)
    if not by_component:
        raise NoReactionDetected("all bond deltas are empty")
    if len(by_component) != 2:
        raise UnsupportedReaction(
            f"reaction spans {len(by_component)} molecule(s); exactly 2 supported"
        )
    initiators = []
    for component in sorted(by_component):
        candidates = by_component[component]
        max_dc = max(centrality_deltas[r] for r in candidates)

        def combined(r_gid: int) -> float:
            scaled = centrality_deltas[r_gid] / max_dc if max_dc > 0 else 0.0
            return len(bond_deltas[r_gid]) + scaled

        initiators.append(min(candidates, key=lambda r: (-combined(r), r)))
    return initiators[0], initiators[1]


@dataclass
class ReactionReport:
    """Reaction-initiating atoms plus per-node change diagnostics."""

    initiators: tuple[int, int]
    created: set[int]
    deleted: set[int]
    bond_deltas: dict[int, frozenset] = field(default_factory=dict)
    centrality_deltas: dict[int, float] = field(default_factory=dict)


def build_report(
    mapping: AtomMapping, g_reac: UnifiedGraph, g_prod: UnifiedGraph
) -> ReactionReport:
    """Compute all per-pair deltas, classify atoms and select initiators."""
    bond_deltas = {}
    centrality_deltas = {}
    for r_gid, p_gid in mapping.sorted_pairs():
        bond_deltas[r_gid] = bond_delta((r_gid, p_gid), mapping, g_reac, g_prod)
        centrality_deltas[r_gid] = centrality_delta((r_gid, p_gid), g_reac, g_prod)
    created, deleted = classify_created_deleted(mapping, g_reac, g_prod)
    initiators = select_initiators(
        bond_deltas, centrality_deltas, mapping, g_reac, g_prod
    )
    return ReactionReport(
        initiators=initiators,
        created=created,
        deleted=deleted,
        bond_deltas=bond_deltas,
        centrality_deltas=centrality_deltas,
    )


def _delta_token(token, g_reac: UnifiedGraph, g_prod: UnifiedGraph) -> str:
    if isinstance(token, tuple):
        node = g_prod.nodes[token[1]]
        return f"{CREATED_MARK}:{node.component}.{node.source_id}"
    node = g_reac.nodes[token]
    return f"{node.component}.{node.source_id}"


def _node_ref(graph: UnifiedGraph, gid: int) -> dict:
    node = graph.nodes[gid]
    return {"global_id": gid, "molecule": node.component, "atom": node.source_id}


def report_to_dict(
    report: ReactionReport,
    mapping: AtomMapping,
    g_reac: UnifiedGraph,
    g_prod: UnifiedGraph,
) -> dict:
    """Machine-readable report; schema documented in the README."""
    pairs = []
    for r_gid, p_gid in mapping.sorted_pairs():
        pairs.append(
            {
                "reactant": _node_ref(g_reac, r_gid),
                "product": _node_ref(g_prod, p_gid),
                "provenance": mapping.provenance[r_gid],
                "delta_e": sorted(
                    _delta_token(t, g_reac, g_prod) for t in report.bond_deltas[r_gid]
                ),
                "delta_c": report.centrality_deltas[r_gid],
            }
        )
    return {
        "initiators": [_node_ref(g_reac, gid) for gid in report.initiators],
        "created": [_node_ref(g_prod, gid) for gid in sorted(report.created)],
        "deleted": [_node_ref(g_reac, gid) for gid in sorted(report.deleted)],
        "mapping": pairs,
        "counts": {
            "reactant_nodes": len(g_reac.nodes),
            "product_nodes": len(g_prod.nodes),
            "mapped": len(mapping.pairs),
            "conserved": sum(1 for r in mapping.pairs if mapping.is_conserved(r)),
            "created": len(report.created),
            "deleted": len(report.deleted),
        },
    }


def report_to_text(
    report: ReactionReport,
    mapping: AtomMapping,
    g_reac: UnifiedGraph,
    g_prod: UnifiedGraph,
) -> str:
    """Human-readable one-page summary of the analysis."""
    conserved = sum(1 for r in mapping.pairs if mapping.is_conserved(r))

    def refs(graph: UnifiedGraph, gids) -> str:
        labels = [
            f"{graph.nodes[g].component}.{graph.nodes[g].source_id}" for g in sorted(gids)
        ]
        return ", ".join(labels) if labels else "none"

    lines = [
        "reaction analysis",
        "=================",
        f"reactant nodes : {len(g_reac.nodes)} in {g_reac.molecule_count} molecule(s)",
        f"product nodes  : {len(g_prod.nodes)} in {g_prod.molecule_count} molecule(s)",
        f"mapped pairs   : {len(mapping.pairs)} ({conserved} conserved)",
        f"created atoms  : {refs(g_prod, report.created)}",
        f"deleted atoms  : {refs(g_reac, report.deleted)}",
        "",
        "initiators:",
    ]
    for gid in report.initiators:
        node = g_reac.nodes[gid]
        delta = report.bond_deltas[gid]
        lines.append(
            f"  molecule {node.component} atom {node.source_id} "
            f"(|dE|={len(delta)}, dC={report.centrality_deltas[gid]:.6f})"
        )
    changed = [
        r for r, delta in sorted(report.bond_deltas.items()) if delta
    ]
    lines.append("")
    lines.append(f"atoms with changed bonding: {len(changed)}")
    for r_gid in changed:
        node = g_reac.nodes[r_gid]
        tokens = ", ".join(
            sorted(_delta_token(t, g_reac, g_prod) for t in report.bond_deltas[r_gid])
        )
        lines.append(f"  molecule {node.component} atom {node.source_id}: {tokens}")
    return "\n".join(lines) + "\n"
