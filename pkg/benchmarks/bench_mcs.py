"""Benchmark the compiled subgraph-search kernel against the Python twin.

Times the connected maximum-common-subgraph search on random attributed
graph pairs of growing size and on the bundled reaction fixtures, then
prints a speedup table.  Results are checked for equality while timing, so
this doubles as a coarse backend consistency check.

Usage: python benchmarks/bench_mcs.py [--repeats N]
"""

import argparse
import os
import random
import sys
import time

sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "src"))

from templater.kernels import _mcs_py  # noqa: E402

try:
    from templater.kernels import _mcs_cy
except ImportError:
    _mcs_cy = None


def random_pair(rng, n, labels=4, p_edge=0.3):
    def side():
        node_labels = [rng.randrange(labels) for _ in range(n)]
        masks = [0] * n
        for i in range(n):
            for j in range(i + 1, n):
                if rng.random() < p_edge:
                    masks[i] |= 1 << j
                    masks[j] |= 1 << i
        return node_labels, masks

    labels_r, adj_r = side()
    labels_p, adj_p = side()
    return labels_r, labels_p, adj_r, adj_p


def fixture_pair():
    """The diisocyanate molecule against the urethane adduct."""
    from templater.conserved_mapping import _adjacency_masks, _attribute_labels
    from templater.graph_core import build_unified_graph
    from templater.lammps_io import parse_data_file

    base = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "tests", "fixtures")
    with open(os.path.join(base, "mdi.data")) as handle:
        mdi = parse_data_file(handle.read())
    with open(os.path.join(base, "polyaddition_product.data")) as handle:
        product = parse_data_file(handle.read())
    g_r = build_unified_graph([mdi], "reactant")
    g_p = build_unified_graph([product], "product")
    nodes_r = g_r.sorted_gids()
    nodes_p = g_p.sorted_gids()
    labels_r, labels_p = _attribute_labels(g_r, nodes_r, g_p, nodes_p)
    return labels_r, labels_p, _adjacency_masks(g_r, nodes_r), _adjacency_masks(g_p, nodes_p)


def time_kernel(kernel, cases, repeats):
    best = float("inf")
    result = None
    for _ in range(repeats):
        started = time.perf_counter()
        result = [kernel(*case, 10**8) for case in cases]
        best = min(best, time.perf_counter() - started)
    return best, result


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    if _mcs_cy is None:
        print("compiled kernel not built; run: python setup.py build_ext --inplace")
        return 1

    rng = random.Random(20240101)
    suites = {}
    for n in (10, 14, 18, 22):
        suites[f"random n={n}"] = [random_pair(rng, n) for _ in range(20)]
    suites["fixture 29 vs 45"] = [fixture_pair()]

    print(f"{'case':<18} {'python':>10} {'compiled':>10} {'speedup':>8}")
    for name, cases in suites.items():
        t_py, res_py = time_kernel(_mcs_py.max_common_connected_subgraph, cases, args.repeats)
        t_cy, res_cy = time_kernel(_mcs_cy.max_common_connected_subgraph, cases, args.repeats)
        assert res_py == res_cy, f"backend mismatch in {name!r}"
        print(f"{name:<18} {t_py:>9.4f}s {t_cy:>9.4f}s {t_py / t_cy:>7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
