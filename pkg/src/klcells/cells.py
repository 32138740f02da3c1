"""W-graphs, the left/right preorders, and cells."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .coxeter import LEFT, RIGHT, CoxeterSystem, Element
from .kl import KLTable

TWO_SIDED = "LR"


def _side(side: str) -> str:
    s = side.upper()
    if s in ("L", "LEFT"):
        return LEFT
    if s in ("R", "RIGHT"):
        return RIGHT
    if s in ("LR", "TWO-SIDED", "TWO_SIDED", "B", "BOTH"):
        return TWO_SIDED
    raise ValueError(f"unknown side {side!r}")


@dataclass(eq=False)
class WGraph:
    """Undirected mu-tilde graph on ``vertices`` with descent labels."""

    system: CoxeterSystem
    vertices: list[Element]
    edges: list[tuple[Element, Element, int]]
    left_tau: dict[Element, int]
    right_tau: dict[Element, int]
    _cache: dict = field(default_factory=dict, repr=False)

    def edge_set(self) -> set[frozenset]:
        return {frozenset((y, w)) for y, w, _ in self.edges}

    def position(self) -> dict[Element, int]:
        if "pos" not in self._cache:
            self._cache["pos"] = {v: i for i, v in enumerate(self.vertices)}
        return self._cache["pos"]


@dataclass
class CellPartition:
    side: str
    class_of: dict[Element, int]
    classes: list[list[Element]]

    def cell(self, w: Element) -> list[Element]:
        return self.classes[self.class_of[w]]

    def sizes(self) -> list[int]:
        return [len(c) for c in self.classes]


def build_wgraph(tbl: KLTable, vertices: Iterable[Element] | None = None) -> WGraph:
    """All mu-tilde edges among ``vertices`` (default: the whole table scope)."""
    sys = tbl.system
    verts = sorted(int(v) for v in (tbl.universe if vertices is None else vertices))
    loc = np.array([tbl.loc(v) for v in verts], dtype=np.int64)
    edges: list[tuple[int, int, int]] = []
    if len(verts) > 1:
        if tbl.size <= 8192:
            sub = tbl.mu_matrix()[np.ix_(loc, loc)]
            ii, jj = np.nonzero(np.triu(sub, 1))
            edges = [(verts[i], verts[j], int(sub[i, j])) for i, j in zip(ii, jj)]
        else:
            pos = {int(k): i for i, k in enumerate(loc)}
            for j, k in enumerate(loc):
                for z, m in zip(tbl.mu_rows[k], tbl.mu_vals[k]):
                    i = pos.get(int(z))
                    if i is not None:
                        edges.append((verts[i], verts[j], int(m)))
            edges.sort()
    return WGraph(
        system=sys, vertices=verts, edges=edges,
        left_tau={v: int(sys.left_tau[v]) for v in verts},
        right_tau={v: int(sys.right_tau[v]) for v in verts},
    )


def preorder_edges(g: WGraph, side: str) -> list[tuple[Element, Element]]:
    """Directed u -> v (meaning u <= v) for each edge with tau(u) not inside tau(v)."""
    side = _side(side)
    if side == TWO_SIDED:
        return sorted(set(preorder_edges(g, LEFT)) | set(preorder_edges(g, RIGHT)))
    tau = g.left_tau if side == LEFT else g.right_tau
    out = []
    for y, w, _ in g.edges:
        if tau[y] & ~tau[w]:
            out.append((y, w))
        if tau[w] & ~tau[y]:
            out.append((w, y))
    return out


def _adjacency(g: WGraph, side: str):
    key = ("adj", side)
    if key not in g._cache:
        pos = g.position()
        e = preorder_edges(g, side)
        n = len(g.vertices)
        src = np.array([pos[u] for u, _ in e], dtype=np.int64)
        dst = np.array([pos[v] for _, v in e], dtype=np.int64)
        g._cache[key] = coo_matrix((np.ones(len(e), dtype=np.int8), (src, dst)), shape=(n, n)).tocsr()
    return g._cache[key]


def cells(g: WGraph, side: str) -> CellPartition:
    """Strongly connected components of the directed preorder graph.

    Class ids follow the smallest member index.
    """
    side = _side(side)
    key = ("cells", side)
    if key in g._cache:
        return g._cache[key]
    adj = _adjacency(g, side)
    _, labels = connected_components(adj, directed=True, connection="strong")
    groups: dict[int, list[int]] = {}
    for i, lab in enumerate(labels):
        groups.setdefault(int(lab), []).append(g.vertices[i])
    classes = sorted(groups.values(), key=lambda c: c[0])
    class_of = {v: k for k, c in enumerate(classes) for v in c}
    part = CellPartition(side=side, class_of=class_of, classes=classes)
    g._cache[key] = part
    return part


def reachability(g: WGraph, side: str) -> np.ndarray:
    """Dense matrix R with R[i, j] iff vertices[i] <= vertices[j] (reflexive)."""
    side = _side(side)
    key = ("reach", side)
    if key in g._cache:
        return g._cache[key]
    part = cells(g, side)
    pos = g.position()
    n = len(g.vertices)
    k = len(part.classes)
    cls = np.array([part.class_of[v] for v in g.vertices], dtype=np.int64)
    succ: list[set[int]] = [set() for _ in range(k)]
    for u, v in preorder_edges(g, side):
        a, b = int(cls[pos[u]]), int(cls[pos[v]])
        if a != b:
            succ[a].add(b)
    # condensation is a DAG; close it with Python-int bitsets in reverse topological order
    order = _topo(succ)
    bits = [0] * k
    for c in reversed(order):
        b = 1 << c
        for d in succ[c]:
            b |= bits[d]
        bits[c] = b
    cmat = np.zeros((k, k), dtype=bool)
    for c in range(k):
        b = bits[c]
        idx = [i for i in range(b.bit_length()) if (b >> i) & 1]
        cmat[c, idx] = True
    reach = cmat[np.ix_(cls, cls)]
    g._cache[key] = reach
    return reach


def _topo(succ: Sequence[set[int]]) -> list[int]:
    k = len(succ)
    indeg = [0] * k
    for c in range(k):
        for d in succ[c]:
            indeg[d] += 1
    stack = [c for c in range(k) if indeg[c] == 0]
    out = []
    while stack:
        c = stack.pop()
        out.append(c)
        for d in succ[c]:
            indeg[d] -= 1
            if indeg[d] == 0:
                stack.append(d)
    return out


def leq_cell(g: WGraph, side: str, x: Element, y: Element) -> bool:
    """x <=_side y, i.e. y is reachable from x in the directed preorder graph."""
    pos = g.position()
    if len(g.vertices) <= 4096:
        return bool(reachability(g, side)[pos[x], pos[y]])
    adj = _adjacency(g, _side(side))
    seen = {pos[x]}
    stack = [pos[x]]
    target = pos[y]
    while stack:
        u = stack.pop()
        if u == target:
            return True
        for v in adj.indices[adj.indptr[u]:adj.indptr[u + 1]]:
            if v not in seen:
                seen.add(int(v))
                stack.append(int(v))
    return False


# ---------------------------------------------------------------------------
# Export


def _label(sys: CoxeterSystem, w: Element) -> str:
    return f"{sys.format(w)} {sys.format_subset(int(sys.left_tau[w]))}"


def to_dot(g: WGraph, vertices: Iterable[Element] | None = None, name: str = "wgraph") -> str:
    """Undirected mu-tilde graph on the given vertices."""
    sys = g.system
    keep = set(g.vertices if vertices is None else vertices)
    lines = [f"graph {json.dumps(name)} {{"]
    for v in g.vertices:
        if v in keep:
            lines.append(f"  n{v} [label={json.dumps(_label(sys, v))}];")
    for y, w, m in g.edges:
        if y in keep and w in keep:
            lines.append(f"  n{y} -- n{w} [weight={m}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def preorder_to_dot(g: WGraph, side: str, vertices: Iterable[Element] | None = None,
                    name: str = "preorder") -> str:
    sys = g.system
    keep = set(g.vertices if vertices is None else vertices)
    lines = [f"digraph {json.dumps(name)} {{"]
    for v in g.vertices:
        if v in keep:
            lines.append(f"  n{v} [label={json.dumps(_label(sys, v))}];")
    for u, v in preorder_edges(g, side):
        if u in keep and v in keep:
            lines.append(f"  n{u} -> n{v};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def wgraph_json(g: WGraph, vertices: Iterable[Element] | None = None) -> dict:
    sys = g.system
    keep = set(g.vertices if vertices is None else vertices)
    return {
        "group": sys.name,
        "vertices": [
            {"index": v, "word": sys.format(v),
             "left_tau": [s + 1 for s in range(sys.rank) if (g.left_tau[v] >> s) & 1],
             "right_tau": [s + 1 for s in range(sys.rank) if (g.right_tau[v] >> s) & 1]}
            for v in g.vertices if v in keep
        ],
        "edges": [{"y": y, "w": w, "weight": m} for y, w, m in g.edges if y in keep and w in keep],
    }


def cells_json(sys: CoxeterSystem, part: CellPartition) -> dict:
    return {
        "group": sys.name,
        "side": {"L": "left", "R": "right", "LR": "two-sided"}[part.side],
        "cells": [{"id": k, "size": len(c), "members": [sys.format(w) for w in c]}
                  for k, c in enumerate(part.classes)],
    }
