import json

import networkx as nx
import numpy as np
import pytest

from klcells import build_system, build_wgraph, cells, leq_cell, preorder_edges
from klcells.cells import cells_json, preorder_to_dot, reachability, to_dot, wgraph_json


def test_a1_singletons(tables):
    g = build_wgraph(tables("A1"))
    part = cells(g, "L")
    assert part.sizes() == [1, 1]


def test_a3_left_cells_are_tableaux(tables):
    # left cells of S4 are counted by standard Young tableaux: 10 in total
    g = build_wgraph(tables("A3"))
    assert len(cells(g, "L").classes) == 10
    assert sorted(cells(g, "LR").sizes()) == [1, 1, 4, 9, 9]


def test_d4_census(D4, D4_table):
    g = build_wgraph(D4_table)
    left = cells(g, "L")
    assert len(left.classes) == 36
    two = cells(g, "LR")
    assert sorted(two.sizes(), reverse=True)[0] == 104
    assert sum(two.sizes()) == 192


def _join(part_a, part_b, vertices):
    G = nx.Graph()
    G.add_nodes_from(vertices)
    for part in (part_a, part_b):
        for c in part.classes:
            G.add_edges_from(zip(c, c[1:]))
    return sorted(len(c) for c in nx.connected_components(G))


@pytest.mark.parametrize("name", ["B3", "D4", "A4"])
def test_two_sided_is_join(name, tables):
    g = build_wgraph(tables(name))
    join = _join(cells(g, "L"), cells(g, "R"), g.vertices)
    assert sorted(cells(g, "LR").sizes()) == join


def test_inverse_swaps_sides(D4, D4_table):
    g = build_wgraph(D4_table)
    left, right = cells(g, "L"), cells(g, "R")
    inv = D4.inverse
    flipped = sorted(sorted(int(inv[w]) for w in c) for c in left.classes)
    assert flipped == sorted(right.classes)


def test_preorder_is_tau_monotone(D4, D4_table):
    g = build_wgraph(D4_table)
    for u, v in preorder_edges(g, "L"):
        assert D4.left_tau[u] & ~D4.left_tau[v]
    R = reachability(g, "L")
    pos = g.position()
    for x in range(0, 192, 5):
        for y in range(0, 192, 3):
            if R[pos[x], pos[y]]:
                # x <=_L y forces tau_R(x) to contain tau_R(y)
                assert D4.right_tau[y] & ~D4.right_tau[x] == 0
    assert leq_cell(g, "L", D4.long_element, D4.long_element)


def test_reachability_matches_networkx(D4_table):
    g = build_wgraph(D4_table)
    G = nx.DiGraph(preorder_edges(g, "R"))
    G.add_nodes_from(g.vertices)
    R = reachability(g, "R")
    pos = g.position()
    for x in g.vertices[::9]:
        reach = nx.descendants(G, x) | {x}
        got = {v for v in g.vertices if R[pos[x], pos[v]]}
        assert got == reach


def test_exports(D4, D4_table):
    w = D4.parse("1 2 4")
    g = build_wgraph(D4_table)
    cell = cells(g, "L").cell(w)
    dot = to_dot(g, cell)
    assert dot.startswith("graph") and dot.count(" -- ") == 20
    assert '"1 2 4 {1,2,4}"' in dot
    di = preorder_to_dot(g, "L", cell)
    assert di.startswith("digraph")
    data = json.loads(json.dumps(wgraph_json(g, cell)))
    assert len(data["vertices"]) == 10 and len(data["edges"]) == 20
    cj = cells_json(D4, cells(g, "LR"))
    assert cj["side"] == "two-sided"
    assert sum(c["size"] for c in cj["cells"]) == 192


def test_subgraph_vertices(D4, D4_table):
    verts = [D4.parse(x) for x in ("1 2 4", "3 1 2 4", "1 3 1 2 4")]
    g = build_wgraph(D4_table, verts)
    assert sorted(g.vertices) == sorted(verts)
    assert all(y in verts and w in verts for y, w, _ in g.edges)
    full = {frozenset((y, w)) for y, w, _ in build_wgraph(D4_table).edges}
    assert g.edge_set() == {e for e in full if e <= set(verts)}
