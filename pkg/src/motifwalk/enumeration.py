"""Exact ground truth: CIS enumeration, concentrations, explicit CIS graphs."""

from __future__ import annotations

import itertools
import logging
import random
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

import numpy as np

from .estimators import ConcentrationVector
from .graph import BASE, LabeledGraph
from .motifs import (
    ClassRegistry,
    Cis,
    build_registry,
    induced_cis,
    induced_key,
    is_connected_key,
    key_from_digits,
    pair_list,
    pair_weights,
)
from .neighborhood import _scan
from .oracle import BudgetExhausted, QueryOracle

log = logging.getLogger(__name__)

RELATIONSHIP_GUARD = 100_000


class EnumerationGuardError(RuntimeError):
    """The requested enumeration is too large for the configured guard."""


# -- enumeration ----------------------------------------------------------


def enumerate_cises(g: LabeledGraph, k: int, cancel=None) -> Iterator[Cis]:
    """Yield every connected induced k-node subgraph exactly once (ESU).

    Order is deterministic: by root, then by extension order. ``cancel`` may
    be a ``threading.Event``; enumeration stops once it is set.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    adj = g.adj
    for v in range(g.n):
        if cancel is not None and cancel.is_set():
            return
        ext = [u for u in adj[v] if u > v]
        closed = {v, *adj[v]}
        yield from _esu_extend(g, k, [v], ext, closed, v)


def _esu_extend(g, k, sub, ext, closed, root):
    if len(sub) == k:
        yield induced_cis(g, sub)
        return
    ext = list(ext)
    while ext:
        w = ext.pop(0)
        fresh = [u for u in g.adj[w] if u > root and u not in closed]
        yield from _esu_extend(g, k, sub + [w], ext + fresh, closed | {w, *g.adj[w]}, root)


def naive_cises(g: LabeledGraph, k: int) -> list[Cis]:
    """All connected k-subsets by brute force over every node combination."""
    base = BASE[g.mode]
    out = []
    for nodes in itertools.combinations(range(g.n), k):
        key = induced_key(g, nodes)
        if is_connected_key(k, base, key):
            out.append(Cis(nodes, key, g.mode))
    return out


def count_keys(g: LabeledGraph, k: int, roots=None) -> np.ndarray:
    """Per-key counts of all k-CISes via the compiled ESU kernel.

    Keys are in discovery order (see ``_esu_kernel``); combine through a
    registry with :func:`class_counts_from_keys`.
    """
    from ._esu_kernel import esu_count_keys

    if k < 2:
        raise ValueError("k must be >= 2")
    base = BASE[g.mode]
    size = base ** len(pair_list(k))
    if size > 1 << 28:
        raise EnumerationGuardError(f"key space {size} too large for k={k} {g.mode}")
    weights = np.zeros((k, k), dtype=np.int64)
    for (i, j), w in zip(pair_list(k), pair_weights(k, base)):
        weights[i, j] = w
    indptr, indices, labels = g.csr
    counts = np.zeros(size, dtype=np.int64)
    roots = np.arange(g.n, dtype=np.int64) if roots is None else np.asarray(roots, dtype=np.int64)
    esu_count_keys(indptr, indices, labels, k, base, weights, roots, counts)
    return counts


def class_counts_from_keys(counts: np.ndarray, registry: ClassRegistry) -> dict[int, int]:
    out = {cid: 0 for cid in registry.ids}
    for key in np.flatnonzero(counts):
        cid = registry.classify_key(int(key))
        out[cid] = out.get(cid, 0) + int(counts[key])
    return out


def exact_class_counts(g: LabeledGraph, k: int, registry: ClassRegistry | None = None,
                       method: str = "compiled") -> dict[int, int]:
    """Number of k-CISes per class id."""
    registry = build_registry(k, g.mode) if registry is None else registry
    if method == "compiled":
        return class_counts_from_keys(count_keys(g, k), registry)
    if method == "esu":
        source = enumerate_cises(g, k)
    elif method == "naive":
        source = naive_cises(g, k)
    else:
        raise ValueError(f"unknown method {method!r}")
    out = {cid: 0 for cid in registry.ids}
    for s in source:
        cid = registry.classify_key(s.key)
        out[cid] = out.get(cid, 0) + 1
    return out


def concentrations_from_counts(counts: dict[int, int], k: int, mode: str) -> ConcentrationVector:
    total = sum(counts.values())
    if total == 0:
        raise ValueError(f"graph has no connected {k}-node subgraphs")
    values = {cid: c / total for cid, c in sorted(counts.items())}
    observed = frozenset(cid for cid, c in counts.items() if c)
    return ConcentrationVector(k, mode, values, total, observed)


def exact_concentrations(g: LabeledGraph, k: int, registry: ClassRegistry | None = None,
                         method: str = "compiled") -> ConcentrationVector:
    """Exact omega^(k); ``total_samples_used`` holds |C^(k)|."""
    counts = exact_class_counts(g, k, registry, method)
    return concentrations_from_counts(counts, k, g.mode)


# -- explicit CIS relationship graphs ------------------------------------


@dataclass
class CisGraph:
    """An explicitly materialised graph whose nodes are CISes."""

    cises: list[Cis]
    adjacency: list[list[int]]
    index: dict[tuple[int, ...], int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.index:
            self.index = {c.nodes: i for i, c in enumerate(self.cises)}

    def __len__(self) -> int:
        return len(self.cises)

    def degree(self, s: Cis | tuple[int, ...]) -> int:
        nodes = s.nodes if isinstance(s, Cis) else tuple(s)
        return len(self.adjacency[self.index[nodes]])

    def neighbors(self, s: Cis | tuple[int, ...]) -> list[Cis]:
        nodes = s.nodes if isinstance(s, Cis) else tuple(s)
        return [self.cises[j] for j in self.adjacency[self.index[nodes]]]

    @property
    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def edges(self):
        for i, row in enumerate(self.adjacency):
            for j in row:
                if i < j:
                    yield i, j

    def is_connected(self) -> bool:
        return len(self._bfs_colors()[0]) == len(self.cises)

    def is_bipartite(self) -> bool:
        seen, ok = self._bfs_colors()
        return ok

    def _bfs_colors(self):
        if not self.cises:
            return {}, True
        color = {0: 0}
        queue = [0]
        ok = True
        for i in queue:
            for j in self.adjacency[i]:
                if j not in color:
                    color[j] = 1 - color[i]
                    queue.append(j)
                elif color[j] == color[i]:
                    ok = False
        return color, ok


def build_relationship_graph(g: LabeledGraph, k: int, guard: int = RELATIONSHIP_GUARD) -> CisGraph:
    """G^(k): all k-CISes, adjacent iff they share exactly k-1 nodes.

    Built by bucketing each CIS under its (k-1)-node subsets; two distinct
    k-sets share at most one such subset, so every edge appears once.
    """
    cises = []
    for s in enumerate_cises(g, k):
        cises.append(s)
        if len(cises) > guard:
            raise EnumerationGuardError(f"more than {guard} {k}-node CISes")
    buckets: dict[tuple[int, ...], list[int]] = {}
    for i, s in enumerate(cises):
        for drop in range(k):
            buckets.setdefault(s.nodes[:drop] + s.nodes[drop + 1 :], []).append(i)
    adjacency = [[] for _ in cises]
    for members in buckets.values():
        for a, b in itertools.combinations(members, 2):
            adjacency[a].append(b)
            adjacency[b].append(a)
    for row in adjacency:
        row.sort()
    return CisGraph(cises, adjacency)


def build_mixed_graph(g: LabeledGraph, sizes=(3, 4, 5), guard: int = RELATIONSHIP_GUARD) -> CisGraph:
    """G_mix over CISes of consecutive ``sizes``.

    Same-size CISes are adjacent when they share all but one node, and an
    m-node CIS is adjacent to every (m+1)-node CIS containing it.
    """
    sizes = tuple(sorted(sizes))
    cises: list[Cis] = []
    for m in sizes:
        cises.extend(enumerate_cises(g, m))
        if len(cises) > guard:
            raise EnumerationGuardError(f"more than {guard} CISes of sizes {sizes}")
    index = {c.nodes: i for i, c in enumerate(cises)}
    adj: list[set[int]] = [set() for _ in cises]
    for m in sizes:
        buckets: dict[tuple[int, ...], list[int]] = {}
        for i, s in enumerate(cises):
            if s.k != m:
                continue
            for drop in range(m):
                sub = s.nodes[:drop] + s.nodes[drop + 1 :]
                buckets.setdefault(sub, []).append(i)
                j = index.get(sub)
                if j is not None and m - 1 in sizes:
                    adj[i].add(j)
                    adj[j].add(i)
        for members in buckets.values():
            for a, b in itertools.combinations(members, 2):
                adj[a].add(b)
                adj[b].add(a)
    return CisGraph(cises, [sorted(a) for a in adj], index)


# -- RAND-ESU baseline ----------------------------------------------------


@dataclass
class RandEsuSample:
    cises: list[Cis]
    inclusion_probability: float
    truncated: bool
    roots_visited: int


def rand_esu(
    oracle: QueryOracle,
    g: LabeledGraph,
    k: int,
    depth_probs=None,
    seed: int = 0,
    max_roots: int | None = None,
) -> RandEsuSample:
    """Probabilistically pruned ESU over a seeded random order of roots.

    The extension that brings the subgraph to size ``d`` survives with
    probability ``depth_probs[d-1]`` (``d = 1`` is the root), so every CIS
    is emitted with the same probability ``prod(depth_probs)``. Each node
    added to a subgraph is queried; the run stops cleanly on budget
    exhaustion, leaving a sample from a uniform random subset of roots.
    """
    probs = tuple(depth_probs) if depth_probs is not None else (1.0,) * k
    if len(probs) != k or not all(0 < p <= 1 for p in probs):
        raise ValueError(f"need {k} depth probabilities in (0, 1]")
    rng = random.Random(seed)
    roots = list(range(g.n))
    rng.shuffle(roots)
    if max_roots is not None:
        roots = roots[:max_roots]
    out: list[Cis] = []
    visited = 0
    truncated = False
    try:
        for v in roots:
            visited += 1
            if rng.random() >= probs[0]:
                continue
            nbrs, _ = oracle.query(v)
            ext = [u for u in nbrs if u > v]
            _rand_extend(oracle, k, probs, rng, [v], ext, {v, *nbrs}, v, out)
    except BudgetExhausted:
        truncated = True
    return RandEsuSample(out, float(np.prod(probs)), truncated, visited)


def _rand_extend(oracle, k, probs, rng, sub, ext, closed, root, out):
    if len(sub) == k:
        out.append(_query_induced(oracle, sub))
        return
    p = probs[len(sub)]
    ext = list(ext)
    while ext:
        w = ext.pop(0)
        if p < 1.0 and rng.random() >= p:
            continue
        nbrs, _ = oracle.query(w)
        fresh = [u for u in nbrs if u > root and u not in closed]
        _rand_extend(oracle, k, probs, rng, sub + [w], ext + fresh, closed | {w, *nbrs}, root, out)


def _query_induced(oracle: QueryOracle, nodes) -> Cis:
    mode = oracle.graph.mode
    ordered = tuple(sorted(nodes))
    base = BASE[mode]
    key = 0
    for i, u in enumerate(ordered):
        nbrs, labs = oracle.query(u)
        row = dict(zip(nbrs, labs))
        for v in ordered[i + 1 :]:
            key = key * base + row.get(v, 0)
    return Cis(ordered, key, mode)


def rand_esu_estimate(sample: RandEsuSample, registry: ClassRegistry) -> ConcentrationVector:
    """Concentrations from a RAND-ESU sample (equal inclusion weights)."""
    if not sample.cises:
        raise ValueError("RAND-ESU sample is empty")
    counts = Counter(registry.classify_key(s.key) for s in sample.cises)
    total = len(sample.cises)
    values = {cid: counts.get(cid, 0) / total for cid in registry.ids}
    return ConcentrationVector(registry.k, registry.mode, values, total, frozenset(counts))


def containing_counts_bruteforce(g: LabeledGraph, s: Cis) -> int:
    """Number of (k+1)-CISes containing ``s`` by checking every extra node."""
    base = BASE[g.mode]
    k = s.k + 1
    n = 0
    for u in range(g.n):
        if u in s.nodes:
            continue
        nodes = tuple(sorted(s.nodes + (u,)))
        if is_connected_key(k, base, induced_key(g, nodes)):
            n += 1
    return n


def scan_outside(oracle: QueryOracle, nodes) -> set[int]:
    return set(_scan(oracle, nodes))


# -- ground-truth cache ----------------------------------------------------


def truth_path(directory, g: LabeledGraph, k: int) -> Path:
    return Path(directory) / f"truth_{g.fingerprint}_{g.mode}_k{k}.tsv"


def write_truth(path, g: LabeledGraph, k: int, counts: dict[int, int], registry: ClassRegistry) -> None:
    """Class counts as a tab-separated table with a provenance header."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [
        f"# fingerprint={g.fingerprint} k={k} mode={g.mode} total={sum(counts.values())}"
        f" registry={'dynamic' if registry.dynamic else 'builtin'}",
        "class_id\tcanonical_code\tcount",
    ]
    lines += [f"{cid}\t{registry[cid].code_hex}\t{counts[cid]}" for cid in sorted(counts)]
    path.write_text("\n".join(lines) + "\n")


def read_truth(path, registry: ClassRegistry, fingerprint: str | None = None) -> ConcentrationVector:
    """Load a cached table; classes are matched by canonical code, not id."""
    text = Path(path).read_text().splitlines()
    meta = dict(item.split("=", 1) for item in text[0].lstrip("# ").split())
    if fingerprint is not None and meta["fingerprint"] != fingerprint:
        raise ValueError(f"{path} was computed for a different graph")
    if int(meta["k"]) != registry.k or meta["mode"] != registry.mode:
        raise ValueError(f"{path} holds k={meta['k']} {meta['mode']}, expected k={registry.k} {registry.mode}")
    counts = {cid: 0 for cid in registry.ids}
    for line in text[2:]:
        _, code, count = line.split("\t")
        cid = registry.lookup.get(bytes.fromhex(code))
        if cid is None:
            if not registry.dynamic:
                raise ValueError(f"{path}: code {code} unknown to the registry")
            cid = registry.classify_key(key_from_digits(bytes.fromhex(code), registry.k, registry.base))
        counts[cid] = int(count)
    return concentrations_from_counts(counts, registry.k, registry.mode)


def cached_truth(directory, g: LabeledGraph, k: int, registry: ClassRegistry | None = None,
                 compute: bool = True) -> ConcentrationVector | None:
    """Truth from the cache directory, enumerating (and caching) on a miss."""
    registry = build_registry(k, g.mode) if registry is None else registry
    path = truth_path(directory, g, k)
    if path.exists():
        return read_truth(path, registry, g.fingerprint)
    if not compute:
        return None
    counts = exact_class_counts(g, k, registry)
    write_truth(path, g, k, counts, registry)
    return concentrations_from_counts(counts, k, g.mode)
