"""Immutable labeled graphs, SNAP edge-list loading and LCC extraction.

Edge labels are stored per adjacency entry as a small integer *digit* whose
meaning depends on the graph mode:

    undirected: 1 = edge
    directed:   1 = forward (u -> v), 2 = backward (v -> u), 3 = both
    signed:     1 = positive, 2 = negative

The digit stored in ``adj[u]`` for neighbor ``v`` is the label seen from
``u`` toward ``v``. Digit 0 is reserved for "no edge" in subgraph codes.
"""

from __future__ import annotations

import gzip
import io
import os
from bisect import bisect_left
from collections import deque
from enum import Enum
from functools import cached_property
from typing import IO, Iterable, NamedTuple

import numpy as np

MODES = ("undirected", "directed", "signed")

# number of digit values per mode (including 0 = absent)
BASE = {"undirected": 2, "directed": 4, "signed": 3}
# digit seen from the other endpoint
REVERSE = {"undirected": (0, 1), "directed": (0, 2, 1, 3), "signed": (0, 1, 2)}

FORWARD, BACKWARD, BOTH = 1, 2, 3
POSITIVE, NEGATIVE = 1, 2


class GraphFormatError(ValueError):
    """Raised for malformed edge-list input."""


class Direction(Enum):
    FORWARD = "forward"
    BACKWARD = "backward"
    BOTH = "both"
    NONE = "none"


class Sign(Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    NONE = "none"


class EdgeLabel(NamedTuple):
    direction: Direction
    sign: Sign

    def reversed(self) -> "EdgeLabel":
        flip = {Direction.FORWARD: Direction.BACKWARD, Direction.BACKWARD: Direction.FORWARD}
        return EdgeLabel(flip.get(self.direction, self.direction), self.sign)


_DIGIT_TO_LABEL = {
    "undirected": {1: EdgeLabel(Direction.NONE, Sign.NONE)},
    "directed": {
        FORWARD: EdgeLabel(Direction.FORWARD, Sign.NONE),
        BACKWARD: EdgeLabel(Direction.BACKWARD, Sign.NONE),
        BOTH: EdgeLabel(Direction.BOTH, Sign.NONE),
    },
    "signed": {
        POSITIVE: EdgeLabel(Direction.NONE, Sign.POSITIVE),
        NEGATIVE: EdgeLabel(Direction.NONE, Sign.NEGATIVE),
    },
}
_LABEL_TO_DIGIT = {mode: {lab: d for d, lab in table.items()} for mode, table in _DIGIT_TO_LABEL.items()}


def label_from_digit(mode: str, digit: int) -> EdgeLabel:
    return _DIGIT_TO_LABEL[mode][digit]


def digit_from_label(mode: str, label: EdgeLabel) -> int:
    try:
        return _LABEL_TO_DIGIT[mode][label]
    except KeyError:
        raise ValueError(f"label {label} is not valid in {mode} mode") from None


def check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ValueError(f"unknown graph mode {mode!r}; expected one of {MODES}")
    return mode


class LabeledGraph:
    """Immutable labeled graph over dense node ids ``0..n-1``.

    ``adj[v]`` is the ascending tuple of neighbor ids of ``v`` in the
    undirected skeleton and ``lab[v]`` the parallel tuple of label digits.
    ``original_ids[v]`` maps the dense id back to the id used in the input.
    """

    __slots__ = ("mode", "adj", "lab", "original_ids", "edge_count", "__dict__")

    def __init__(self, mode, adj, lab, original_ids=None):
        self.mode = check_mode(mode)
        self.adj = tuple(tuple(a) for a in adj)
        self.lab = tuple(tuple(x) for x in lab)
        if len(self.adj) != len(self.lab):
            raise ValueError("adjacency and label tables differ in length")
        n = len(self.adj)
        self.original_ids = tuple(range(n)) if original_ids is None else tuple(original_ids)
        total = sum(len(a) for a in self.adj)
        if total % 2:
            raise ValueError("adjacency is not symmetric")
        self.edge_count = total // 2

    @classmethod
    def from_edges(
        cls,
        edges: Iterable[tuple],
        mode: str = "undirected",
        n: int | None = None,
    ) -> "LabeledGraph":
        """Build from ``(u, v)`` pairs, or ``(u, v, sign)`` in signed mode.

        Ids are used as given (no remapping); ``n`` defaults to ``max id + 1``.
        Directed pairs are read as ``u -> v``; reciprocal pairs merge into one
        skeleton edge labeled ``both``. Self-loops are dropped.
        """
        check_mode(mode)
        table: dict[int, dict[int, int]] = {}
        top = -1
        for e in edges:
            u, v = int(e[0]), int(e[1])
            top = max(top, u, v)
            if u == v:
                continue
            if mode == "signed":
                if len(e) < 3:
                    raise ValueError(f"signed edge {e!r} has no sign")
                _merge(table, u, v, mode, _parse_sign(e[2]))
            else:
                _merge(table, u, v, mode, None)
        if n is None:
            n = top + 1
        elif top >= n:
            raise ValueError(f"edge endpoint {top} out of range for n={n}")
        adj, lab = [], []
        for v in range(n):
            row = table.get(v, {})
            nbrs = sorted(row)
            adj.append(nbrs)
            lab.append([row[u] for u in nbrs])
        return cls(mode, adj, lab)

    # -- basic reads -----------------------------------------------------

    @property
    def node_count(self) -> int:
        return len(self.adj)

    n = node_count

    def __len__(self) -> int:
        return len(self.adj)

    def __repr__(self) -> str:
        return f"LabeledGraph(mode={self.mode!r}, nodes={self.n}, edges={self.edge_count})"

    def _check(self, v: int) -> None:
        if not 0 <= v < len(self.adj):
            raise IndexError(f"node id {v} out of range [0, {len(self.adj)})")

    def degree(self, v: int) -> int:
        self._check(v)
        return len(self.adj[v])

    def neighbors(self, v: int) -> list[tuple[int, EdgeLabel]]:
        """Incident edges of ``v`` as ``(neighbor, label seen from v)``."""
        self._check(v)
        table = _DIGIT_TO_LABEL[self.mode]
        return [(u, table[d]) for u, d in zip(self.adj[v], self.lab[v])]

    def label(self, u: int, v: int) -> int:
        """Label digit of (u, v) seen from ``u``, or 0 when absent. O(log d)."""
        row = self.adj[u]
        i = bisect_left(row, v)
        if i < len(row) and row[i] == v:
            return self.lab[u][i]
        return 0

    def has_edge(self, u: int, v: int) -> EdgeLabel | None:
        self._check(u)
        self._check(v)
        d = self.label(u, v)
        return _DIGIT_TO_LABEL[self.mode][d] if d else None

    def edges(self):
        """Yield skeleton edges ``(u, v, digit)`` with ``u < v``."""
        for u, (row, labs) in enumerate(zip(self.adj, self.lab)):
            for v, d in zip(row, labs):
                if u < v:
                    yield u, v, d

    def degree_sequence(self) -> list[int]:
        return [len(a) for a in self.adj]

    def in_out_degrees(self) -> tuple[list[int], list[int]]:
        """Directed in/out degrees (a ``both`` edge counts once each way).

        For non-directed modes both sequences equal the skeleton degree.
        """
        if self.mode != "directed":
            d = self.degree_sequence()
            return d, list(d)
        ins, outs = [], []
        for labs in self.lab:
            ins.append(sum(1 for d in labs if d in (BACKWARD, BOTH)))
            outs.append(sum(1 for d in labs if d in (FORWARD, BOTH)))
        return ins, outs

    @cached_property
    def max_degree(self) -> int:
        return max((len(a) for a in self.adj), default=0)

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(indptr, indices, labels)`` arrays of the adjacency."""
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum([len(a) for a in self.adj], out=indptr[1:])
        indices = np.fromiter((u for row in self.adj for u in row), dtype=np.int64, count=int(indptr[-1]))
        labels = np.fromiter((d for row in self.lab for d in row), dtype=np.int64, count=int(indptr[-1]))
        return indptr, indices, labels

    @cached_property
    def fingerprint(self) -> str:
        """Content hash used to key ground-truth caches."""
        import hashlib

        h = hashlib.sha256(self.mode.encode())
        indptr, indices, labels = self.csr
        for arr in (indptr, indices, labels):
            h.update(arr.tobytes())
        return h.hexdigest()[:16]

    def subgraph(self, nodes: Iterable[int]) -> "LabeledGraph":
        """Induced subgraph, densified in ascending order of the given ids."""
        keep = sorted(set(nodes))
        remap = {v: i for i, v in enumerate(keep)}
        adj, lab = [], []
        for v in keep:
            row, labs = [], []
            for u, d in zip(self.adj[v], self.lab[v]):
                j = remap.get(u)
                if j is not None:
                    row.append(j)
                    labs.append(d)
            adj.append(row)
            lab.append(labs)
        return LabeledGraph(self.mode, adj, lab, [self.original_ids[v] for v in keep])

    def components(self) -> list[list[int]]:
        """Connected components of the skeleton, each sorted ascending."""
        seen = bytearray(self.n)
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            seen[s] = 1
            comp = [s]
            queue = deque([s])
            while queue:
                v = queue.popleft()
                for u in self.adj[v]:
                    if not seen[u]:
                        seen[u] = 1
                        comp.append(u)
                        queue.append(u)
            comp.sort()
            comps.append(comp)
        return comps

    def is_connected(self) -> bool:
        return self.n > 0 and len(self.components()) == 1


def _parse_sign(token) -> int:
    s = str(token).strip()
    if s in ("1", "+1", "+"):
        return POSITIVE
    if s in ("-1", "-"):
        return NEGATIVE
    raise ValueError(f"sign must be +1 or -1, got {token!r}")


def _merge(table: dict, u: int, v: int, mode: str, sign: int | None) -> None:
    ru = table.setdefault(u, {})
    rv = table.setdefault(v, {})
    if mode == "undirected":
        ru[v] = rv[u] = 1
    elif mode == "directed":
        ru[v] = ru.get(v, 0) | FORWARD
        rv[u] = rv.get(u, 0) | BACKWARD
    else:
        # conflicting signs on a pair resolve to negative, independent of order
        d = max(ru.get(v, 0), sign)
        ru[v] = rv[u] = d


def load_edge_list(source, mode: str = "undirected") -> LabeledGraph:
    """Parse a SNAP-style edge list into a :class:`LabeledGraph`.

    ``source`` may be a path (``.gz`` is decompressed), a binary stream or a
    text stream. Each non-comment line is ``u v`` or, in signed mode,
    ``u v s`` with ``s`` in ``{+1, -1}``. External ids are remapped to dense
    ids in ascending order of the external id.
    """
    check_mode(mode)
    stream, close = _open(source)
    try:
        raw = []
        for lineno, line in enumerate(stream, 1):
            if isinstance(line, bytes):
                line = line.decode("utf-8")
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            want = 3 if mode == "signed" else 2
            if len(parts) != want:
                raise GraphFormatError(f"line {lineno}: expected {want} fields, got {len(parts)}: {line!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
                if mode == "signed":
                    raw.append((u, v, _parse_sign(parts[2])))
                else:
                    raw.append((u, v))
            except ValueError as exc:
                raise GraphFormatError(f"line {lineno}: {exc}") from None
    finally:
        if close:
            stream.close()

    ids = sorted({x for e in raw for x in e[:2]})
    if not ids:
        raise GraphFormatError("edge list contains no edges")
    remap = {x: i for i, x in enumerate(ids)}
    if mode == "signed":
        sign_tok = {POSITIVE: "+1", NEGATIVE: "-1"}
        edges = [(remap[u], remap[v], sign_tok[s]) for u, v, s in raw]
    else:
        edges = [(remap[u], remap[v]) for u, v in raw]
    g = LabeledGraph.from_edges(edges, mode=mode, n=len(ids))
    g = LabeledGraph(mode, g.adj, g.lab, ids)
    if g.edge_count == 0:
        raise GraphFormatError("edge list contains only self-loops")
    return g


def _open(source) -> tuple[IO, bool]:
    if isinstance(source, (str, os.PathLike)):
        path = os.fspath(source)
        if path.endswith(".gz"):
            return gzip.open(path, "rt", encoding="utf-8"), True
        return open(path, "r", encoding="utf-8"), True
    if isinstance(source, (bytes, bytearray)):
        return io.BytesIO(source), True
    return source, False


def largest_connected_component(g: LabeledGraph) -> LabeledGraph:
    """Induced subgraph on the largest skeleton component.

    Ties go to the component holding the smallest original id.
    """
    if g.n == 0:
        raise ValueError("empty graph")
    comps = g.components()
    best = max(comps, key=lambda c: (len(c), -min(g.original_ids[v] for v in c)))
    if len(best) == g.n:
        return g
    return g.subgraph(best)


def write_edge_list(g: LabeledGraph, stream: IO[str]) -> None:
    """Write ``g`` in the format read by :func:`load_edge_list`."""
    ids = g.original_ids
    stream.write(f"# mode={g.mode} nodes={g.n} edges={g.edge_count}\n")
    for u, v, d in g.edges():
        if g.mode == "signed":
            stream.write(f"{ids[u]}\t{ids[v]}\t{'+1' if d == POSITIVE else '-1'}\n")
        elif g.mode == "directed":
            if d & FORWARD:
                stream.write(f"{ids[u]}\t{ids[v]}\n")
            if d & BACKWARD:
                stream.write(f"{ids[v]}\t{ids[u]}\n")
        else:
            stream.write(f"{ids[u]}\t{ids[v]}\n")
