"""Local structure around a CIS, computed only from queries of its own nodes."""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .graph import BASE, REVERSE
from .motifs import (
    Cis,
    key_digits,
    noncut_positions,
    pair_index,
    skeleton,
    sub_cis,
)
from .oracle import QueryOracle


@dataclass(frozen=True, eq=False)
class Frontier:
    """Outside neighbors ``N(s)`` and the crossing edges ``E^N(s)``.

    ``touch[u]`` maps each inside node adjacent to outside node ``u`` to the
    label digit seen from the inside node.
    """

    outside_nodes: frozenset[int]
    cross_edges: tuple[tuple[int, int, int], ...]
    touch: dict[int, dict[int, int]] = field(repr=False)


@dataclass(frozen=True, eq=False)
class NeighborSet:
    neighbors: list[Cis]

    @property
    def degree(self) -> int:
        return len(self.neighbors)


def _scan(oracle: QueryOracle, nodes) -> dict[int, dict[int, int]]:
    inside = set(nodes)
    touch: dict[int, dict[int, int]] = {}
    for v in nodes:
        nbrs, labs = oracle.query(v)
        for u, d in zip(nbrs, labs):
            if u in inside:
                continue
            row = touch.get(u)
            if row is None:
                touch[u] = {v: d}
            else:
                row[v] = d
    return touch


def frontier(oracle: QueryOracle, s: Cis) -> Frontier:
    """Query the nodes of ``s`` (never its outside neighbors) and collect N(s)."""
    touch = _scan(oracle, s.nodes)
    cross = tuple((v, u, d) for u in sorted(touch) for v, d in sorted(touch[u].items()))
    return Frontier(frozenset(touch), cross, touch)


@lru_cache(maxsize=1 << 16)
def _drop_components(k: int, base: int, key: int, pos: int) -> tuple[int, ...]:
    """Skeleton components (position bitmasks) once ``pos`` is removed."""
    masks = skeleton(k, base, key)
    alive = ((1 << k) - 1) & ~(1 << pos)
    comps = []
    while alive:
        start = alive & -alive
        seen = frontier_bits = start
        while frontier_bits:
            low = frontier_bits & -frontier_bits
            frontier_bits ^= low
            nb = masks[low.bit_length() - 1] & alive & ~seen
            seen |= nb
            frontier_bits |= nb
        comps.append(seen)
        alive &= ~seen
    return tuple(comps)


def insert_key(k: int, mode: str, key: int, q: int, to_new) -> int:
    """Key after inserting a node at position ``q`` of a ``k``-node key.

    ``to_new[i]`` is the digit seen from old position ``i`` toward the new node.
    """
    base = BASE[mode]
    rev = REVERSE[mode]
    old = key_digits(key, k, base)
    idx = pair_index(k)
    out = 0
    for i in range(k + 1):
        for j in range(i + 1, k + 1):
            if i == q:
                d = rev[to_new[j - 1]]
            elif j == q:
                d = to_new[i]
            else:
                d = old[idx[(i - (i > q), j - (j > q))]]
            out = out * base + d
    return out


def _moves(s: Cis, touch: dict[int, dict[int, int]]) -> list[tuple[int, int]]:
    """Neighbors of ``s`` in G^(k) as ``(dropped position, added node)`` pairs."""
    k, base, key = s.k, s.base, s.key
    pos = {v: i for i, v in enumerate(s.nodes)}
    hits = []
    for u in sorted(touch):
        m = 0
        for v in touch[u]:
            m |= 1 << pos[v]
        hits.append((u, m))
    moves = []
    for r in range(k):
        comps = _drop_components(k, base, key, r)
        clear = ~(1 << r)
        if len(comps) == 1:
            c = comps[0]
            moves.extend((r, u) for u, m in hits if m & clear & c)
        else:
            for u, m in hits:
                m &= clear
                if all(m & c for c in comps):
                    moves.append((r, u))
    return moves


def _swap(s: Cis, r: int, u: int, touch_u: dict[int, int]) -> Cis:
    kept = s.nodes[:r] + s.nodes[r + 1 :]
    q = bisect_left(kept, u)
    sub = sub_cis(s, r)
    to_new = [touch_u.get(v, 0) for v in kept]
    key = insert_key(s.k - 1, s.mode, sub.key, q, to_new)
    return Cis(kept[:q] + (u,) + kept[q:], key, s.mode)


def _extend(s: Cis, u: int, touch_u: dict[int, int]) -> Cis:
    q = bisect_left(s.nodes, u)
    to_new = [touch_u.get(v, 0) for v in s.nodes]
    key = insert_key(s.k, s.mode, s.key, q, to_new)
    return Cis(s.nodes[:q] + (u,) + s.nodes[q:], key, s.mode)


def neighbor_cises(s: Cis, f: Frontier) -> NeighborSet:
    """X(s): every connected CIS sharing k-1 nodes with ``s``.

    Edge sets come from ``E(s)`` and the frontier's crossing edges only.
    """
    out = [_swap(s, r, u, f.touch[u]) for r, u in _moves(s, f.touch)]
    assert len({c.nodes for c in out}) == len(out), "duplicate neighbor CIS"
    return NeighborSet(out)


def count_contained(x: Cis) -> int:
    """I(x): number of connected (k-1)-node CISes inside ``x``."""
    if x.k < 3:
        raise ValueError("count_contained needs k >= 3")
    return len(noncut_positions(x.k, x.base, x.key))


def contained_cises(s: Cis) -> list[Cis]:
    if s.k < 3:
        raise ValueError("contained_cises needs k >= 3")
    return [sub_cis(s, i) for i in noncut_positions(s.k, s.base, s.key)]


def containing_count(oracle: QueryOracle, s_prime: Cis) -> int:
    """|O(s')|: number of (k+1)-node CISes containing ``s'``, i.e. |N(s')|."""
    return len(_scan(oracle, s_prime.nodes))


def _scan_arrays(nodes, views) -> tuple[np.ndarray, np.ndarray]:
    """Ascending outside neighbors of ``nodes`` and, for each, the bitmask of
    inside positions adjacent to it. ``views[p]`` is the (neighbors, labels)
    array pair of ``nodes[p]``."""
    cat = np.concatenate([nb for nb, _ in views])
    bits = np.repeat(1 << np.arange(len(nodes), dtype=np.int64), [len(nb) for nb, _ in views])
    keep = cat != nodes[0]
    for v in nodes[1:]:
        keep &= cat != v
    cat, bits = cat[keep], bits[keep]
    if not len(cat):
        return cat, bits
    order = np.argsort(cat, kind="stable")
    cat, bits = cat[order], bits[order]
    starts = np.flatnonzero(np.concatenate(([True], cat[1:] != cat[:-1])))
    return cat[starts], np.bitwise_or.reduceat(bits, starts)


def _valid_moves(s: Cis, masks: np.ndarray, r: int) -> np.ndarray:
    """Which outside nodes may replace position ``r`` and keep ``s`` connected."""
    comps = _drop_components(s.k, s.base, s.key, r)
    m = masks & ~(1 << r)
    ok = (m & comps[0]) != 0
    for c in comps[1:]:
        ok &= (m & c) != 0
    return ok


class StateInfo:
    """Everything a walker needs about one CIS; built once per chain.

    Moves are ordered by dropped position, then by added node, and are only
    materialised when a walker picks one.
    """

    __slots__ = ("cis", "views", "outside_arr", "masks", "offsets", "degree", "_targets", "cache")

    def __init__(self, cis: Cis, views, outside_arr: np.ndarray, masks: np.ndarray):
        self.cis = cis
        self.views = views
        self.outside_arr = outside_arr
        self.masks = masks
        offsets = [0]
        for r in range(cis.k):
            offsets.append(offsets[-1] + int(np.count_nonzero(_valid_moves(cis, masks, r))))
        self.offsets = offsets
        self.degree = offsets[-1]
        self._targets: list[Cis | None] | None = None
        self.cache: dict = {}

    def move(self, i: int) -> tuple[int, int]:
        """The i-th move as (dropped position, added node)."""
        if not 0 <= i < self.degree:
            raise IndexError(i)
        r = bisect_right(self.offsets, i) - 1
        idx = np.flatnonzero(_valid_moves(self.cis, self.masks, r))[i - self.offsets[r]]
        return r, int(self.outside_arr[idx])

    @property
    def moves(self) -> list[tuple[int, int]]:
        return [self.move(i) for i in range(self.degree)]

    def touch_of(self, u: int) -> dict[int, int]:
        """Inside node -> label digit for every inside neighbor of ``u``."""
        m = int(self.masks[np.searchsorted(self.outside_arr, u)])
        out = {}
        for p, v in enumerate(self.cis.nodes):
            if m >> p & 1:
                nb, lb = self.views[p]
                out[v] = int(lb[np.searchsorted(nb, u)])
        return out

    @property
    def touch(self) -> dict[int, dict[int, int]]:
        return {int(u): self.touch_of(int(u)) for u in self.outside_arr}

    def neighbor(self, i: int) -> Cis:
        targets = self._targets
        if targets is None:
            targets = self._targets = [None] * self.degree
        t = targets[i]
        if t is None:
            r, u = self.move(i)
            t = targets[i] = _swap(self.cis, r, u, self.touch_of(u))
        return t

    def extension(self, u: int) -> Cis:
        """``s`` plus outside node ``u``; always connected."""
        return _extend(self.cis, u, self.touch_of(u))

    @property
    def outside(self) -> list[int]:
        return self.outside_arr.tolist()

    def outside_node(self, j: int) -> int:
        return int(self.outside_arr[j])

    def noncut(self) -> tuple[int, ...]:
        s = self.cis
        return noncut_positions(s.k, s.base, s.key)

    def outside_count_without(self, pos: int) -> int:
        """|N(s')| for ``s'`` = ``s`` minus a non-cut position, from ``s``'s scan."""
        # nodes touching only the removed one drop out; the removed node joins
        return int(np.count_nonzero(self.masks != (1 << pos))) + 1


class CisExplorer:
    """Per-chain memo of :class:`StateInfo` objects keyed by node tuple.

    All graph access goes through ``oracle``; a memo hit means every node of
    the state was already queried in this chain.
    """

    def __init__(self, oracle: QueryOracle, capacity: int = 200_000):
        self.oracle = oracle
        self.capacity = capacity
        self._memo: dict[tuple[int, ...], StateInfo] = {}
        self._arrays: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    def _view(self, v: int) -> tuple[np.ndarray, np.ndarray]:
        nb, lb = self.oracle.query(v)  # charged on first use only
        a = self._arrays.get(v)
        if a is None:
            a = self._arrays[v] = (np.array(nb, dtype=np.int64), np.array(lb, dtype=np.int8))
        return a

    def state(self, cis: Cis) -> StateInfo:
        info = self._memo.get(cis.nodes)
        if info is None:
            views = [self._view(v) for v in cis.nodes]
            info = StateInfo(cis, views, *_scan_arrays(cis.nodes, views))
            if len(self._memo) >= self.capacity:
                self._memo.clear()
            self._memo[cis.nodes] = info
        return info
