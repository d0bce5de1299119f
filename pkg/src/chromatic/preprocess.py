"""Instance reduction and bounds ahead of any MILP build.

The pipeline: (a) remove dominated vertices to a fixed point, (b) greedy
upper bound on the reduced graph, (c)/(e) randomized maximal-clique search
scored either by clique size or by the fixing-count objective
|Q|*H + |delta(Q)|, (d) early exit when the clique size meets the upper
bound. A dominance restore stack maps any coloring of the reduced graph
back to the original one without new colors.
"""
from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass

from .graph import Coloring, ColoringError, Graph, verify_coloring

DEFAULT_CLIQUE_TIME_BUDGET = 60.0
CLIQUE_TRIALS_PER_DENSITY = 300


class NotACliqueError(ValueError):
    pass


@dataclass(frozen=True)
class ReducedInstance:
    """Dominance-reduced graph plus the bookkeeping to undo the reduction.

    `kept[i]` is the original id of reduced vertex i. `restore_stack` holds
    (removed, dominator) pairs in original ids, in removal order; a
    dominator may itself be removed later, which is why restores replay the
    stack in reverse.
    """

    graph: Graph
    kept: tuple[int, ...]
    restore_stack: tuple[tuple[int, int], ...]
    original_n: int


@dataclass(frozen=True)
class PreprocessedInstance:
    """Everything the model builders need. Vertex ids are reduced-graph ids."""

    reduced: ReducedInstance
    upper_bound: int
    greedy_coloring: Coloring
    clique: tuple[int, ...]
    anchor: int
    lower_bound: int
    solved_in_preprocessing: bool


def remove_dominated(g: Graph) -> ReducedInstance:
    """Delete dominated vertices (N(u) subseteq N(v)) until none remain.

    Removals can create new dominations, so passes repeat to a fixed point.
    At equality N(u) = N(v) only the higher-numbered vertex may be removed,
    which keeps the procedure deterministic and avoids deleting both. A
    dominated vertex is never adjacent to its dominator (v in N(u) would put
    v inside N(v)), so it can safely take the dominator's color on restore.
    """
    adj = [set(g.adjacency[v]) for v in range(g.n)]
    alive = sorted(range(g.n))
    stack: list[tuple[int, int]] = []

    changed = True
    while changed:
        changed = False
        for u in list(alive):
            if u not in alive:
                continue
            nu = adj[u]
            dominator = -1
            for v in alive:
                if v == u:
                    continue
                nv = adj[v]
                if nu <= nv and (nu != nv or u > v):
                    dominator = v
                    break
            if dominator >= 0:
                stack.append((u, dominator))
                alive.remove(u)
                for w in adj[u]:
                    adj[w].discard(u)
                adj[u] = set()
                changed = True

    kept = tuple(alive)
    new_id = {orig: i for i, orig in enumerate(kept)}
    edges = [(new_id[u], new_id[v]) for (u, v) in g.edges if u in new_id and v in new_id]
    return ReducedInstance(graph=Graph.from_edges(len(kept), edges),
                           kept=kept, restore_stack=tuple(stack), original_n=g.n)


def restore_coloring(r: ReducedInstance, c: Coloring) -> Coloring:
    """Lift a valid coloring of the reduced graph to the original graph.

    Replays the restore stack in reverse removal order; each removed vertex
    copies its dominator's color, so no new color is ever introduced.
    """
    report = verify_coloring(r.graph, c)
    if not report.valid:
        raise ColoringError(f"coloring of reduced graph is invalid: {report.violating_edges}")
    colors: list[int | None] = [None] * r.original_n
    for i, orig in enumerate(r.kept):
        colors[orig] = c.colors[i]
    for (removed, dominator) in reversed(r.restore_stack):
        assert colors[dominator] is not None
        colors[removed] = colors[dominator]
    assert all(x is not None for x in colors)
    return Coloring(tuple(colors))  # type: ignore[arg-type]


def greedy_upper_bound(g: Graph) -> tuple[int, Coloring]:
    """Largest-degree-first greedy coloring; returns (color count, coloring)."""
    if g.n < 1:
        raise ValueError("greedy_upper_bound needs at least one vertex")
    order = sorted(range(g.n), key=lambda v: (-g.degree(v), v))
    colors = [0] * g.n
    for v in order:
        used = {colors[u] for u in g.adjacency[v] if colors[u]}
        c = 1
        while c in used:
            c += 1
        colors[v] = c
    coloring = Coloring(tuple(colors))
    return coloring.num_colors, coloring


def random_maximal_clique(g: Graph, seed: int | random.Random) -> tuple[int, ...]:
    """Grow a uniformly random maximal clique.

    Equivalent to taking a random maximal independent set of the complement
    graph, but built directly: start from a random vertex and repeatedly add
    a random vertex adjacent to everything picked so far.
    """
    if g.n < 1:
        raise ValueError("graph has no vertices")
    rng = seed if isinstance(seed, random.Random) else random.Random(f"clique:{seed}")
    start = rng.randrange(g.n)
    clique = [start]
    candidates = set(g.adjacency[start])
    while candidates:
        v = rng.choice(sorted(candidates))
        clique.append(v)
        candidates &= g.adjacency[v]
    return tuple(sorted(clique))


def _check_clique(g: Graph, clique) -> None:
    members = tuple(clique)
    for i, u in enumerate(members):
        for v in members[i + 1:]:
            if v not in g.adjacency[u]:
                raise NotACliqueError(f"vertices {u} and {v} are not adjacent")


def boundary_edges(g: Graph, clique) -> tuple[tuple[int, int], ...]:
    """delta(Q): edges with exactly one endpoint inside the clique."""
    q = set(clique)
    return tuple(e for e in g.edges if (e[0] in q) != (e[1] in q))


def clique_objective(g: Graph, clique, upper_bound: int, mode: str) -> int:
    """Score a clique: mode 'c' is its size, mode 'e' is |Q|*H + |delta(Q)|."""
    _check_clique(g, clique)
    if mode == "c":
        return len(tuple(clique))
    if mode == "e":
        return len(tuple(clique)) * upper_bound + len(boundary_edges(g, clique))
    raise ValueError(f"unknown clique objective mode {mode!r}")


def find_clique(g: Graph, upper_bound: int, mode: str, seed: int,
                time_budget: float = DEFAULT_CLIQUE_TIME_BUDGET,
                trials: int | None = None) -> tuple[int, ...]:
    """Best clique over randomized trials, scored by `clique_objective`.

    Runs ceil(300 * |E| / |V|) trials (at least one) or until the wall-time
    budget runs out, whichever comes first. Each trial draws from its own
    RNG stream derived from the seed, so results are reproducible whenever
    the time budget is not the binding constraint.
    """
    if trials is None:
        trials = max(1, math.ceil(CLIQUE_TRIALS_PER_DENSITY * g.m / g.n)) if g.n else 1
    deadline = time.monotonic() + time_budget
    best: tuple[int, ...] | None = None
    best_score = -1
    for t in range(trials):
        if best is not None and time.monotonic() > deadline:
            break
        clique = random_maximal_clique(g, random.Random(f"clique:{seed}:{t}"))
        score = clique_objective(g, clique, upper_bound, mode)
        if score > best_score:
            best, best_score = clique, score
    assert best is not None
    return best


def preprocess_pipeline(g: Graph, mode: str = "e", seed: int = 0,
                        clique_time_budget: float = DEFAULT_CLIQUE_TIME_BUDGET) -> PreprocessedInstance:
    """Full reduction: dominance removal, greedy bound, clique search, early exit.

    The anchor vertex is the clique member with the largest degree in the
    reduced graph (ties to the smallest id); it is the vertex the
    partial-ordering models pin to the largest used color.
    """
    reduced = remove_dominated(g)
    upper_bound, greedy = greedy_upper_bound(reduced.graph)
    clique = find_clique(reduced.graph, upper_bound, mode, seed, time_budget=clique_time_budget)
    anchor = max(clique, key=lambda v: (reduced.graph.degree(v), -v))
    lower_bound = len(clique)
    return PreprocessedInstance(
        reduced=reduced,
        upper_bound=upper_bound,
        greedy_coloring=greedy,
        clique=clique,
        anchor=anchor,
        lower_bound=lower_bound,
        solved_in_preprocessing=(lower_bound == upper_bound),
    )
