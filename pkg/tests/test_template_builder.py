import pytest

from conftest import make_graph, make_topology, path_topology
from templater.conserved_mapping import AtomMapping
from templater.errors import InconsistentPruning
from templater.graph_core import build_unified_graph
from templater.lammps_io import parse_molecule_template, write_molecule_template
from templater.reaction_analysis import ReactionReport, build_report
from templater.similarity_assignment import assign_similarity
from templater.template_builder import (
    assemble_templates,
    carry_features,
    mark_edge_atoms,
    prune_reaction,
    prune_to_cutoff,
)

C = 12.011
MASSES = {1: C, 2: 15.999, 3: 1.008}


class TestPruneToCutoff:
    def test_path_end_cutoff_four(self):
        graph = build_unified_graph([path_topology(10)], "reactant")
        assert prune_to_cutoff(graph, {1}, 4) == {1, 2, 3, 4, 5}

    def test_always_include_forces_membership(self):
        graph = build_unified_graph([path_topology(10)], "reactant")
        kept = prune_to_cutoff(graph, {1}, 2, always_include={9})
        assert kept == {1, 2, 3, 9}

    def test_monotone_in_cutoff(self):
        graph = build_unified_graph([path_topology(10)], "reactant")
        previous = set()
        for cutoff in range(1, 10):
            current = prune_to_cutoff(graph, {3}, cutoff)
            assert previous <= current
            previous = current

    def test_requires_sites(self):
        graph = build_unified_graph([path_topology(3)], "reactant")
        with pytest.raises(ValueError):
            prune_to_cutoff(graph, set(), 4)


class TestMarkEdgeAtoms:
    def test_whole_molecule_no_edges(self):
        graph = build_unified_graph([path_topology(4)], "reactant")
        assert mark_edge_atoms(set(graph.nodes), graph) == set()

    def test_path_boundary(self):
        graph = build_unified_graph([path_topology(10)], "reactant")
        pruned = {1, 2, 3, 4, 5}
        assert mark_edge_atoms(pruned, graph) == {5}


class TestCarryFeatures:
    def test_full_molecule_keeps_everything(self):
        interactions = [(1, (1, 2)), (2, (2, 3))]
        index = {1: 1, 2: 2, 3: 3}
        assert carry_features({1, 2, 3}, interactions, index) == interactions

    def test_partial_atom_drops_interaction(self):
        interactions = [(1, (1, 2, 3)), (2, (2, 3, 4))]
        index = {1: 1, 2: 2, 3: 3}
        assert carry_features({1, 2, 3}, interactions, index) == [(1, (1, 2, 3))]

    def test_renumbering(self):
        interactions = [(7, (4, 6))]
        index = {4: 1, 6: 2}
        assert carry_features({4, 6}, interactions, index) == [(7, (1, 2))]


def small_reaction():
    """A-B + C-D -> A-B-C-D with one new bond between B and C."""
    ab = make_topology([(1, 1, 0.1), (2, 1, -0.1)], [(1, 2)], MASSES)
    cd = make_topology([(1, 2, 0.2), (2, 2, -0.2)], [(1, 2)], MASSES)
    product = make_topology(
        [(1, 1, 0.1), (2, 1, -0.1), (3, 2, 0.2), (4, 2, -0.2)],
        [(1, 2), (2, 3), (3, 4)],
        MASSES,
    )
    g_reac = build_unified_graph([ab, cd], "reactant")
    g_prod = build_unified_graph([product], "product")
    mapping = AtomMapping()
    for r, p in ((1, 1), (2, 2), (3, 3), (4, 4)):
        mapping.add(r, p, "conserved-1")
    mapping.refresh_unmapped(g_reac, g_prod)
    report = build_report(mapping, g_reac, g_prod)
    return g_reac, g_prod, [ab, cd], [product], mapping, report


class TestAssembleTemplates:
    def test_small_reaction_round_trip(self):
        g_reac, g_prod, reac_topos, prod_topos, mapping, report = small_reaction()
        pre_set, post_set = prune_reaction(mapping, report, g_reac, g_prod, cutoff=4)
        templates = assemble_templates(
            mapping, report, pre_set, post_set, g_reac, g_prod, reac_topos, prod_topos, 4
        )
        assert templates.pre.atom_count == 4
        assert templates.post.atom_count == 4
        assert templates.equivalences == [(1, 1), (2, 2), (3, 3), (4, 4)]
        assert templates.initiators == (2, 3)
        text = write_molecule_template(templates.pre)
        assert parse_molecule_template(text) == templates.pre
        map_file = templates.to_map_file()
        map_file.validate()

    def test_charges_and_coordinates_copied_verbatim(self):
        g_reac, g_prod, reac_topos, prod_topos, mapping, report = small_reaction()
        pre_set, post_set = prune_reaction(mapping, report, g_reac, g_prod, cutoff=4)
        templates = assemble_templates(
            mapping, report, pre_set, post_set, g_reac, g_prod, reac_topos, prod_topos, 4
        )
        assert [a.charge for a in templates.pre.atoms] == [0.1, -0.1, 0.2, -0.2]
        assert templates.pre.atoms[0].x == 1.0

    def test_inconsistent_pruning_detected(self):
        g_reac, g_prod, reac_topos, prod_topos, mapping, report = small_reaction()
        with pytest.raises(InconsistentPruning):
            assemble_templates(
                mapping, report, {1, 2}, {1, 2, 3, 4}, g_reac, g_prod,
                reac_topos, prod_topos, 4,
            )

    def test_splice_consistency_property(self, case_states):
        for state in case_states.values():
            templates = state.templates
            pre_gids = set(templates.pre_index_of)
            post_gids = set(templates.post_index_of)
            mapped_image = {
                state.mapping.pairs[r] for r in pre_gids if r in state.mapping.pairs
            }
            created_gids = {g for g in state.report.created}
            assert mapped_image | created_gids == post_gids

    def test_initiators_inside_template(self, case_states):
        for state in case_states.values():
            for gid in state.report.initiators:
                assert gid in state.templates.pre_index_of

    def test_interactions_inside_template(self, case_states):
        for state in case_states.values():
            for template in (state.templates.pre, state.templates.post):
                n = template.atom_count
                for _t, members in template.bonds + template.angles + template.dihedrals + template.impropers:
                    assert all(1 <= m <= n for m in members)

    def test_edge_atoms_have_outside_neighbor(self, case_states):
        for state in case_states.values():
            templates = state.templates
            pruned = set(templates.pre_index_of)
            reverse_index = {v: k for k, v in templates.pre_index_of.items()}
            for edge_idx in templates.edge_atoms:
                gid = reverse_index[edge_idx]
                assert any(n not in pruned for n in state.g_reac.neighbors(gid))

    def test_impropers_only_when_input_declares_them(self, case_states):
        chain = case_states["chain"]
        assert not chain.templates.pre.impropers
        polyaddition = case_states["polyaddition"]
        assert polyaddition.templates.pre.impropers


def topology_from_template(template, masses, keep):
    """Rebuild a SystemTopology from a template restricted to ``keep``.

    ``keep`` is a sorted list of template-local indices forming one
    molecule; atoms are renumbered 1..n in that order.
    """
    renumber = {old: new for new, old in enumerate(keep, start=1)}
    atoms = [
        (renumber[i], template.atoms[i - 1].type_id, template.atoms[i - 1].charge)
        for i in keep
    ]
    bonds = [
        (renumber[a], renumber[b])
        for _t, (a, b) in template.bonds
        if a in renumber and b in renumber
    ]
    return make_topology(atoms, bonds, masses), renumber


def template_components(template):
    adjacency = {i: set() for i in range(1, template.atom_count + 1)}
    for _t, (a, b) in template.bonds:
        adjacency[a].add(b)
        adjacency[b].add(a)
    remaining = set(adjacency)
    components = []
    while remaining:
        start = min(remaining)
        stack, seen = [start], {start}
        while stack:
            node = stack.pop()
            for nbr in adjacency[node]:
                if nbr not in seen:
                    seen.add(nbr)
                    stack.append(nbr)
        remaining -= seen
        components.append(sorted(seen))
    return components


class TestPipelineOnEmittedTemplates:
    def test_rerun_reproduces_initiators_and_equivalences(self, case_states):
        from templater.cli import RunConfig, run_stages
        from templater.conserved_mapping import iterate_conserved
        from templater.lammps_io import parse_data_file
        from templater.reaction_analysis import build_report
        from templater.similarity_assignment import (
            assign_similarity,
            refine_symmetric_paths,
            swap_hydrogens,
        )
        from conftest import CASE_STUDIES

        for name, state in case_states.items():
            masses = {}
            for path in CASE_STUDIES[name][0] + CASE_STUDIES[name][1]:
                with open(path) as handle:
                    masses.update(parse_data_file(handle.read()).masses)
            templates = state.templates

            reactant_topos = []
            pre_translate = {}  # (component position, new id) -> pre index
            for position, keep in enumerate(template_components(templates.pre), start=1):
                topology, renumber = topology_from_template(templates.pre, masses, keep)
                reactant_topos.append(topology)
                for old, new in renumber.items():
                    pre_translate[(position, new)] = old
            post_keep = list(range(1, templates.post.atom_count + 1))
            product_topo, _ = topology_from_template(templates.post, masses, post_keep)

            g_reac = build_unified_graph(reactant_topos, "reactant")
            g_prod = build_unified_graph([product_topo], "product")
            mapping = iterate_conserved(g_reac, g_prod)
            mapping, _ = assign_similarity(mapping, g_reac, g_prod)
            mapping = refine_symmetric_paths(mapping, g_reac, g_prod)
            mapping = swap_hydrogens(mapping, g_reac, g_prod)
            report = build_report(mapping, g_reac, g_prod)

            def to_pre_index(gid):
                node = g_reac.nodes[gid]
                return pre_translate[(node.component, node.source_id)]

            rerun_initiators = {to_pre_index(g) for g in report.initiators}
            assert rerun_initiators == set(templates.initiators), name

            rerun_equivalences = sorted(
                (to_pre_index(r), g_prod.nodes[p].source_id)
                for r, p in mapping.pairs.items()
            )
            assert rerun_equivalences == templates.equivalences, name


class TestCutoffMonotonicity:
    def test_template_grows_with_cutoff(self, case_states):
        from templater.cli import RunConfig, run_stages
        from conftest import CASE_STUDIES

        reactants, products = CASE_STUDIES["polycondensation"]
        sizes = []
        for cutoff in (1, 2, 4, 6):
            cfg = RunConfig(reactants=reactants, products=products, out_dir=".", cutoff=cutoff)
            state = run_stages(cfg)
            sizes.append(state.templates.pre.atom_count)
        assert sizes == sorted(sizes)
