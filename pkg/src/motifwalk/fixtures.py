"""Small named graphs used by tests, examples and the ``fixture`` command."""

from __future__ import annotations

import random

from .graph import LabeledGraph, load_edge_list

FIG1_NAMES = "abcde"
# a=0 b=1 c=2 d=3 e=4
FIG1_EDGES = [(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (2, 3)]


def fig1() -> LabeledGraph:
    """Five nodes: a is adjacent to all, {a, b, c, d} is a clique, e hangs off a."""
    return LabeledGraph.from_edges(FIG1_EDGES, "undirected", n=5)


def nodes_of(names: str) -> tuple[int, ...]:
    """FIG1 letters to node ids, e.g. ``nodes_of("bcd") == (1, 2, 3)``."""
    return tuple(sorted(FIG1_NAMES.index(c) for c in names))


def complete(n: int) -> LabeledGraph:
    return LabeledGraph.from_edges([(i, j) for i in range(n) for j in range(i + 1, n)], "undirected", n=n)


def path(n: int) -> LabeledGraph:
    return LabeledGraph.from_edges([(i, i + 1) for i in range(n - 1)], "undirected", n=n)


def cycle(n: int) -> LabeledGraph:
    return LabeledGraph.from_edges([(i, (i + 1) % n) for i in range(n)], "undirected", n=n)


def star(n: int) -> LabeledGraph:
    return LabeledGraph.from_edges([(0, i) for i in range(1, n)], "undirected", n=n)


def two_triangles_plus_edge() -> LabeledGraph:
    """Two disjoint triangles and a separate edge (LCC tie-break fixture)."""
    text = b"10 11\n11 12\n10 12\n3 4\n4 5\n3 5\n7 8\n"
    return load_edge_list(text, "undirected")


def random_connected(n: int, p: float, seed: int, mode: str = "undirected") -> LabeledGraph:
    """G(n, p) plus a random spanning tree, so the result is connected.

    In directed mode each edge gets a random orientation (or both ways); in
    signed mode a random sign.
    """
    rng = random.Random(seed)
    order = list(range(n))
    rng.shuffle(order)
    pairs = {tuple(sorted((order[i], order[rng.randrange(i)]))) for i in range(1, n)}
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                pairs.add((i, j))
    edges: list = []
    for u, v in sorted(pairs):
        if mode == "directed":
            r = rng.random()
            if r < 0.4:
                edges.append((u, v))
            elif r < 0.8:
                edges.append((v, u))
            else:
                edges += [(u, v), (v, u)]
        elif mode == "signed":
            edges.append((u, v, rng.choice((1, -1))))
        else:
            edges.append((u, v))
    return LabeledGraph.from_edges(edges, mode, n=n)


def directed_cycle3() -> LabeledGraph:
    return LabeledGraph.from_edges([(0, 1), (1, 2), (2, 0)], "directed", n=3)


NAMED = {
    "fig1": fig1,
    "k4": lambda: complete(4),
    "k5": lambda: complete(5),
    "path5": lambda: path(5),
    "cycle6": lambda: cycle(6),
    "star5": lambda: star(5),
    "two-triangles-plus-edge": two_triangles_plus_edge,
    "random12": lambda: random_connected(12, 0.3, seed=12),
    "directed-cycle3": directed_cycle3,
}
