"""Write a Gnutella-sized random graph for dry runs of the dataset checks.

The graph is a configuration-model draw from a heavy-tailed degree sequence
close to the size of the p2p-Gnutella08 LCC (6,299 nodes, 20,776 edges) but
deliberately not equal to it, so the acceptance suite can never mistake it
for the real dataset; numbers obtained on it only show that the pipeline
runs end to end and how the checks behave on a graph of that scale.
"""

import argparse
import random

import numpy as np

from motifwalk.graph import largest_connected_component, write_edge_list
from motifwalk.nullmodel import generate_configuration_graph

NODES, EDGES = 6000, 20000


def degree_sequence(n: int, m: int, rng: np.random.Generator, cap: int = 100) -> list[int]:
    # discrete Pareto-ish tail, then nudge single nodes until the sum is exact
    deg = np.clip(np.round(rng.pareto(2.2, n) * 4 + 1), 1, cap).astype(int)
    target = 2 * m
    while deg.sum() != target:
        i = int(rng.integers(n))
        if deg.sum() < target and deg[i] < cap:
            deg[i] += 1
        elif deg.sum() > target and deg[i] > 1:
            deg[i] -= 1
    return [int(d) for d in deg]


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="data/surrogate-gnutella.txt")
    ap.add_argument("--seed", type=int, default=8)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    seq = degree_sequence(NODES, EDGES, rng)
    g = generate_configuration_graph([(d, d) for d in seq], random.Random(args.seed).getrandbits(63), "undirected")
    g = largest_connected_component(g)
    with open(args.out, "w") as fh:
        write_edge_list(g, fh)
    print(f"{args.out}: LCC {g.n} nodes, {g.edge_count} edges, max degree {g.max_degree}")


if __name__ == "__main__":
    main()
