import os
import random

import pytest

from templater.graph_core import UnifiedGraph, build_unified_graph
from templater.lammps_io import AtomRecord, SystemTopology

FIXTURE_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "fixtures")


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURE_DIR, name)


CASE_STUDIES = {
    "polyaddition": (
        [fixture_path("mdi.data"), fixture_path("bd.data")],
        [fixture_path("polyaddition_product.data")],
    ),
    "polycondensation": (
        [fixture_path("ht.data"), fixture_path("mpd.data")],
        [fixture_path("polycondensation_product.data")],
    ),
    "chain": (
        [fixture_path("butene.data"), fixture_path("butene.data")],
        [fixture_path("octane.data")],
    ),
}


def make_topology(atoms, bonds, masses, angles=(), dihedrals=(), impropers=()):
    """Small-topology builder: atoms are (id, type, charge) triples."""
    records = [
        AtomRecord(atom_id=a, mol_id=1, type_id=t, charge=q, x=float(a), y=0.0, z=0.0)
        for a, t, q in atoms
    ]
    return SystemTopology(
        atoms=records,
        masses=dict(masses),
        bonds=[(1, tuple(b)) for b in bonds],
        angles=[(1, tuple(a)) for a in angles],
        dihedrals=[(1, tuple(d)) for d in dihedrals],
        impropers=[(1, tuple(i)) for i in impropers],
    )


def make_graph(atoms, bonds, masses, side="reactant") -> UnifiedGraph:
    return build_unified_graph([make_topology(atoms, bonds, masses)], side)


def path_topology(n, type_id=1, mass=12.011):
    atoms = [(i, type_id, 0.0) for i in range(1, n + 1)]
    bonds = [(i, i + 1) for i in range(1, n)]
    return make_topology(atoms, bonds, {type_id: mass})


def random_attributed_pair(rng: random.Random, max_nodes=10, labels=3, p_edge=0.35):
    """Random labelled graph pair in kernel form (labels plus bitmasks)."""

    def one_side():
        n = rng.randint(1, max_nodes)
        node_labels = [rng.randrange(labels) for _ in range(n)]
        masks = [0] * n
        for i in range(n):
            for j in range(i + 1, n):
                if rng.random() < p_edge:
                    masks[i] |= 1 << j
                    masks[j] |= 1 << i
        return node_labels, masks

    labels_r, adj_r = one_side()
    labels_p, adj_p = one_side()
    return labels_r, adj_r, labels_p, adj_p


def connected_subsets(n: int, masks: list[int]):
    """All nonempty connected node subsets, largest first."""
    from itertools import combinations

    subsets = []
    nodes = list(range(n))
    for size in range(n, 0, -1):
        for combo in combinations(nodes, size):
            members = set(combo)
            frontier = [combo[0]]
            seen = {combo[0]}
            while frontier:
                node = frontier.pop()
                for other in members:
                    if other not in seen and (masks[node] >> other) & 1:
                        seen.add(other)
                        frontier.append(other)
            if len(seen) == size:
                subsets.append(combo)
    return subsets


def mcs_oracle_size(labels_r, adj_r, labels_p, adj_p) -> int:
    """Exhaustive maximum common connected induced subgraph size.

    Enumerates the connected node subsets of the first graph from largest
    to smallest and searches for a label- and adjacency-exact embedding
    into the second graph by plain backtracking.  Independent of the
    production kernel by construction.
    """
    nr, np_ = len(labels_r), len(labels_p)

    def embeds(subset) -> bool:
        order = list(subset)
        used = [False] * np_

        def place(k: int) -> bool:
            if k == len(order):
                return True
            v = order[k]
            for w in range(np_):
                if used[w] or labels_p[w] != labels_r[v]:
                    continue
                ok = True
                for prev_idx in range(k):
                    u = order[prev_idx]
                    x = assignment[prev_idx]
                    if bool((adj_r[v] >> u) & 1) != bool((adj_p[w] >> x) & 1):
                        ok = False
                        break
                if not ok:
                    continue
                used[w] = True
                assignment.append(w)
                if place(k + 1):
                    return True
                assignment.pop()
                used[w] = False
            return False

        assignment: list[int] = []
        return place(0)

    for subset in connected_subsets(nr, adj_r):
        if embeds(subset):
            return len(subset)
    return 0


@pytest.fixture(scope="session")
def case_states():
    """Pipeline states of the three reaction case studies, computed once."""
    from templater.cli import RunConfig, run_stages

    states = {}
    for name, (reactants, products) in CASE_STUDIES.items():
        cfg = RunConfig(reactants=reactants, products=products, out_dir=".")
        states[name] = run_stages(cfg)
    return states
