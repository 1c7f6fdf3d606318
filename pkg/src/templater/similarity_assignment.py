"""Similarity scoring, optimal assignment and the two repair passes.

Unmapped node pairs are scored by a depth-weighted sum of root attribute
agreement and neighbor-shell overlap, turned into a normalized cost matrix
and matched by linear sum assignment.  Two deterministic refinement passes
then repair artifacts of symmetric molecules: image swaps that restore bond
consistency between attribute-identical atoms, and re-pairing of hydrogen
neighbors across matched heavy atoms.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from templater.conserved_mapping import (
    HYDROGEN_SWAPPED,
    PATH_REFINED,
    SIMILARITY,
    AtomMapping,
)
from templater.graph_core import UnifiedGraph

HYDROGEN_MASS = 1.008
DEFAULT_HYDROGEN_TOLERANCE = 0.01

_IMPROVEMENT_EPS = 1e-12
_MAX_SWEEPS = 50


@dataclass(frozen=True)
class ScoringWeights:
    """Relative importance of type match, mass match and shell overlap."""

    alpha: float = 0.5
    beta: float = 0.25
    gamma: float = 0.25

    def normalized(self) -> "ScoringWeights":
        if min(self.alpha, self.beta, self.gamma) < 0:
            raise ValueError("scoring weights must be non-negative")
        total = self.alpha + self.beta + self.gamma
        if total <= 0:
            raise ValueError("scoring weights must not all be zero")
        return ScoringWeights(self.alpha / total, self.beta / total, self.gamma / total)

    @property
    def is_normalized(self) -> bool:
        return abs(self.alpha + self.beta + self.gamma - 1.0) < 1e-9


def _shell_overlap(
    g_a: UnifiedGraph, shell_a: tuple[int, ...], g_b: UnifiedGraph, shell_b: tuple[int, ...]
) -> tuple[int, int]:
    """Multiset intersection sizes of the type and mass populations."""
    types_a = Counter(g_a.nodes[n].type_id for n in shell_a)
    types_b = Counter(g_b.nodes[n].type_id for n in shell_b)
    masses_a = Counter(g_a.nodes[n].mass for n in shell_a)
    masses_b = Counter(g_b.nodes[n].mass for n in shell_b)
    n_type = sum(min(count, types_b[t]) for t, count in types_a.items())
    n_mass = sum(min(count, masses_b[m]) for m, count in masses_a.items())
    return n_type, n_mass


def similarity_score(
    v_r: int,
    v_p: int,
    g_reac: UnifiedGraph,
    g_prod: UnifiedGraph,
    weights: ScoringWeights = ScoringWeights(),
) -> float:
    """Depth-weighted similarity of an unmapped reactant/product node pair.

    The comparison depth is the smaller of the two within-molecule
    eccentricities, clamped to at least 1 so isolated atoms still compare
    their root attributes.  Every depth contributes the (constant) root
    type and mass indicators plus the shell overlap counts, the latter
    normalized by the larger of the two shell sizes at that depth.  The
    per-depth normalization keeps the overlap term bounded, so root
    attribute agreement stays decisive instead of being drowned by
    whichever side sits in the bigger molecule.
    """
    shells_r = g_reac.shells(v_r)
    shells_p = g_prod.shells(v_p)
    depth = max(1, min(len(shells_r), len(shells_p)) - 1)
    node_r = g_reac.nodes[v_r]
    node_p = g_prod.nodes[v_p]
    delta_t = 1.0 if node_r.type_id == node_p.type_id else 0.0
    delta_m = 1.0 if node_r.mass == node_p.mass else 0.0

    total = 0.0
    for k in range(1, depth + 1):
        shell_r = shells_r[k] if k < len(shells_r) else ()
        shell_p = shells_p[k] if k < len(shells_p) else ()
        n_type, n_mass = _shell_overlap(g_reac, shell_r, g_prod, shell_p)
        overlap = (n_type + n_mass) / max(len(shell_r), len(shell_p), 1)
        total += (
            weights.alpha * delta_t
            + weights.beta * delta_m
            + weights.gamma * overlap
        )
    return total


@dataclass
class SimilarityMatrix:
    """Scores for every unmapped reactant row against product column."""

    rows: list[int]
    cols: list[int]
    scores: np.ndarray
    depths: np.ndarray


def build_similarity_matrix(
    g_reac: UnifiedGraph,
    g_prod: UnifiedGraph,
    rows: set[int],
    cols: set[int],
    weights: ScoringWeights = ScoringWeights(),
) -> SimilarityMatrix:
    row_ids = sorted(rows)
    col_ids = sorted(cols)
    scores = np.zeros((len(row_ids), len(col_ids)))
    depths = np.zeros((len(row_ids), len(col_ids)), dtype=int)
    for i, r in enumerate(row_ids):
        ecc_r = len(g_reac.shells(r)) - 1
        for j, p in enumerate(col_ids):
            ecc_p = len(g_prod.shells(p)) - 1
            scores[i, j] = similarity_score(r, p, g_reac, g_prod, weights)
            depths[i, j] = max(1, min(ecc_r, ecc_p))
    return SimilarityMatrix(rows=row_ids, cols=col_ids, scores=scores, depths=depths)


@dataclass
class CostMatrix:
    """Negated similarity scores, min-max normalized into [0, 1]."""

    rows: list[int]
    cols: list[int]
    entries: np.ndarray
    normalization: tuple[str, float, float]


def build_cost_matrix(matrix: SimilarityMatrix) -> CostMatrix:
    raw = -matrix.scores
    low = float(raw.min())
    high = float(raw.max())
    if high == low:
        entries = np.zeros_like(raw)
        normalization = ("constant", low, 0.0)
    else:
        entries = (raw - low) / (high - low)
        normalization = ("min-max", low, high - low)
    return CostMatrix(
        rows=list(matrix.rows), cols=list(matrix.cols), entries=entries, normalization=normalization
    )


@dataclass
class AssignmentResult:
    pairs: list[tuple[int, int]]
    unmatched_rows: list[int]
    unmatched_cols: list[int]
    total_cost: float


def solve_assignment(cost: CostMatrix) -> AssignmentResult:
    """Minimum-cost matching over min(rows, cols) pairs.

    Unmatched rows are deletion candidates, unmatched columns creation
    candidates.  Rectangular matrices are expected whenever atoms appear or
    vanish.
    """
    row_ind, col_ind = linear_sum_assignment(cost.entries)
    pairs = [(cost.rows[i], cost.cols[j]) for i, j in zip(row_ind, col_ind)]
    pairs.sort()
    matched_rows = {cost.rows[i] for i in row_ind}
    matched_cols = {cost.cols[j] for j in col_ind}
    total = float(sum(cost.entries[i, j] for i, j in zip(row_ind, col_ind)))
    return AssignmentResult(
        pairs=pairs,
        unmatched_rows=[r for r in cost.rows if r not in matched_rows],
        unmatched_cols=[c for c in cost.cols if c not in matched_cols],
        total_cost=total,
    )


def assign_similarity(
    mapping: AtomMapping,
    g_reac: UnifiedGraph,
    g_prod: UnifiedGraph,
    weights: ScoringWeights = ScoringWeights(),
) -> tuple[AtomMapping, SimilarityMatrix | None]:
    """Extend a conserved mapping over the unmapped remainder."""
    result = mapping.copy()
    result.refresh_unmapped(g_reac, g_prod)
    if not result.unmapped_reactant or not result.unmapped_product:
        return result, None
    matrix = build_similarity_matrix(
        g_reac, g_prod, result.unmapped_reactant, result.unmapped_product, weights
    )
    assignment = solve_assignment(build_cost_matrix(matrix))
    for r_gid, p_gid in assignment.pairs:
        result.add(r_gid, p_gid, SIMILARITY)
    result.refresh_unmapped(g_reac, g_prod)
    return result, matrix


def _consistency_objective(
    mapping: AtomMapping,
    nodes: set[int],
    g_reac: UnifiedGraph,
    g_prod: UnifiedGraph,
    weights: ScoringWeights,
) -> float:
    """Similarity plus one unit per preserved edge, summed over nodes."""
    total = 0.0
    for r in nodes:
        p = mapping.pairs.get(r)
        if p is None:
            continue
        total += similarity_score(r, p, g_reac, g_prod, weights)
        for x in g_reac.neighbors(r):
            image = mapping.pairs.get(x)
            if image is not None and g_prod.has_edge(p, image):
                total += 1.0
    return total


def refine_symmetric_paths(
    mapping: AtomMapping,
    g_reac: UnifiedGraph,
    g_prod: UnifiedGraph,
    weights: ScoringWeights = ScoringWeights(),
) -> AtomMapping:
    """Resolve mappings of structurally indistinguishable alternatives.

    Images of two equal-mass, non-conserved reactant nodes are swapped
    whenever that strictly raises the combined similarity-plus-connectivity
    objective around them, and the hill climb repeats until no swap helps.
    Conserved pairs act as fixed anchors: they are never re-paired but their
    preserved edges reward candidates consistent with them.  The pass keeps
    the injection, never changes cardinality, and is idempotent.
    """
    result = mapping.copy()
    movable = sorted(r for r in result.pairs if not result.is_conserved(r))
    improved = True
    while improved:
        improved = False
        for i, u in enumerate(movable):
            for v in movable[i + 1 :]:
                if g_reac.nodes[u].mass != g_reac.nodes[v].mass:
                    continue
                affected = {u, v}
                affected.update(x for x in g_reac.neighbors(u) if x in result.pairs)
                affected.update(x for x in g_reac.neighbors(v) if x in result.pairs)
                before = _consistency_objective(result, affected, g_reac, g_prod, weights)
                image_u, image_v = result.pairs[u], result.pairs[v]
                prov_u, prov_v = result.provenance[u], result.provenance[v]
                result.repair(u, None, "")
                result.repair(v, image_u, PATH_REFINED)
                result.repair(u, image_v, PATH_REFINED)
                after = _consistency_objective(result, affected, g_reac, g_prod, weights)
                if after > before + _IMPROVEMENT_EPS:
                    improved = True
                else:
                    result.repair(u, None, "")
                    result.repair(v, image_v, prov_v)
                    result.repair(u, image_u, prov_u)
    return result


def _is_hydrogen_like(graph: UnifiedGraph, gid: int, tolerance: float) -> bool:
    return abs(graph.nodes[gid].mass - HYDROGEN_MASS) <= tolerance


def swap_hydrogens(
    mapping: AtomMapping,
    g_reac: UnifiedGraph,
    g_prod: UnifiedGraph,
    tolerance: float = DEFAULT_HYDROGEN_TOLERANCE,
) -> AtomMapping:
    """Re-pair hydrogen-like neighbors across matched heavy-atom pairs.

    For every matched pair whose neighborhood sizes disagree, hydrogen-like
    reactant neighbors mapped away from the partner's neighborhood are
    re-pointed at hydrogen-like product neighbors lacking a local preimage,
    smallest source ids first.  Displaced images move to the displaced
    preimages, so cardinality and the injection are preserved; conserved
    pairs are never touched.  Runs to a fixpoint, making the pass
    idempotent on molecular graphs (hydrogens have a single neighbor).
    """
    result = mapping.copy()
    changed = True
    sweeps = 0
    while changed and sweeps < _MAX_SWEEPS:
        changed = False
        sweeps += 1
        for r in sorted(result.pairs):
            p = result.pairs[r]
            nbrs_r = g_reac.neighbors(r)
            nbrs_p = g_prod.neighbors(p)
            if len(nbrs_r) == len(nbrs_p):
                continue
            local_images = set(nbrs_p)
            local_preimages = set(nbrs_r)
            stray = [
                h
                for h in nbrs_r
                if _is_hydrogen_like(g_reac, h, tolerance)
                and h in result.pairs
                and not result.is_conserved(h)
                and result.pairs[h] not in local_images
            ]
            open_slots = []
            for h_p in nbrs_p:
                if not _is_hydrogen_like(g_prod, h_p, tolerance):
                    continue
                pre = result.reverse.get(h_p)
                if pre is None:
                    open_slots.append(h_p)
                elif pre not in local_preimages and not result.is_conserved(pre):
                    open_slots.append(h_p)
            for h_r, h_p in zip(sorted(stray), sorted(open_slots)):
                displaced_image = result.pairs[h_r]
                displaced_pre = result.reverse.get(h_p)
                result.repair(h_r, None, "")
                if displaced_pre is not None:
                    result.repair(displaced_pre, None, "")
                result.add(h_r, h_p, HYDROGEN_SWAPPED)
                if displaced_pre is not None:
                    result.add(displaced_pre, displaced_image, HYDROGEN_SWAPPED)
                changed = True
    result.refresh_unmapped(g_reac, g_prod)
    return result


def similarity_csv(matrix: SimilarityMatrix, g_reac: UnifiedGraph, g_prod: UnifiedGraph) -> str:
    """Render the similarity matrix as CSV with source-atom-id headers.

    When a side holds several molecules and plain source ids would collide,
    labels carry a ``component.`` prefix.
    """

    def labels(graph: UnifiedGraph, gids: list[int]) -> list[str]:
        sources = [graph.nodes[g].source_id for g in gids]
        if len(set(sources)) == len(sources):
            return [str(s) for s in sources]
        return [f"{graph.nodes[g].component}.{graph.nodes[g].source_id}" for g in gids]

    header = [""] + labels(g_prod, matrix.cols)
    lines = [",".join(header)]
    row_labels = labels(g_reac, matrix.rows)
    for label, row in zip(row_labels, matrix.scores):
        lines.append(",".join([label] + [f"{value:.6f}" for value in row]))
    return "\n".join(lines) + "\n"
