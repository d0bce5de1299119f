"""Named graph families used for tests and benchmark fixtures."""
from __future__ import annotations

from .graph import Graph


def empty(n: int) -> Graph:
    return Graph.from_edges(n, ())


def complete(n: int) -> Graph:
    return Graph.from_edges(n, ((u, v) for u in range(n) for v in range(u + 1, n)))


def path(n: int) -> Graph:
    return Graph.from_edges(n, ((v, v + 1) for v in range(n - 1)))


def cycle(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycle needs at least 3 vertices")
    return Graph.from_edges(n, [(v, (v + 1) % n) for v in range(n)])


def star(leaves: int) -> Graph:
    """K_{1,leaves} with the hub at vertex 0."""
    return Graph.from_edges(leaves + 1, ((0, v) for v in range(1, leaves + 1)))


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph.from_edges(a + b, ((u, a + v) for u in range(a) for v in range(b)))


def petersen() -> Graph:
    outer = [(v, (v + 1) % 5) for v in range(5)]
    inner = [(5 + v, 5 + (v + 2) % 5) for v in range(5)]
    spokes = [(v, 5 + v) for v in range(5)]
    return Graph.from_edges(10, outer + inner + spokes)


def full_insertion(k: int, l: int) -> Graph:
    """The k-FullIns_l graph family from the DIMACS COLOR benchmark collection.

    Layered Mycielski-style construction: starting from K2 (level count l=1),
    each expansion with parameter k takes the current graph G on n vertices,
    makes k+2 levels of its vertex set (level 0 induces G, the others are
    independent), joins consecutive levels by the bipartite double of E(G),
    adds a clique of k+2 apex vertices, and attaches apex r to every vertex
    of level r. Sizes follow n' = (k+2)(n+1), m' = (2k+3)m + (k+2)n + C(k+2,2)
    and the chromatic number is k + l for l >= 2, matching the published
    instances (e.g. 1-FullIns_4 has 93 vertices, 593 edges, chi = 5).

    Vertex numbering is canonical for this implementation; the DIMACS files
    may use a different (isomorphic) labeling.
    """
    if k < 1 or l < 1:
        raise ValueError("full_insertion requires k >= 1 and l >= 1")
    n, edges = 2, {(0, 1)}
    for _ in range(l - 1):
        n, edges = _full_insertion_step(n, edges, k)
    return Graph.from_edges(n, edges)


def _full_insertion_step(n, edges, k):
    levels = k + 2

    def vid(level, v):
        return level * n + v

    apex = [levels * n + r for r in range(levels)]
    out = set()
    for (u, v) in edges:
        out.add((vid(0, u), vid(0, v)))
    for r in range(levels - 1):
        for (u, v) in edges:
            a, b = vid(r, u), vid(r + 1, v)
            out.add((a, b) if a < b else (b, a))
            a, b = vid(r, v), vid(r + 1, u)
            out.add((a, b) if a < b else (b, a))
    for i in range(levels):
        for j in range(i + 1, levels):
            out.add((apex[i], apex[j]))
        for v in range(n):
            out.add((vid(i, v), apex[i]))
    return levels * n + levels, out
