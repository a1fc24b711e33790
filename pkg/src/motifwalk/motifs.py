"""Connected induced subgraphs (CISes) and their isomorphism classes.

A CIS on nodes ``v_0 < v_1 < ... < v_{k-1}`` is stored as an integer *key*:
the label digits of the pairs ``(0,1), (0,2), ..., (0,k-1), (1,2), ...``
(row-major upper triangle, digit seen from the lower position) read as a
base-``b`` number with the first pair most significant. The canonical code
of a CIS is the minimum key over all ``k!`` node orders, which is the same as
the lexicographically minimal labeled adjacency string.
"""

from __future__ import annotations

import itertools
import threading
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .graph import BASE, REVERSE, LabeledGraph, EdgeLabel, check_mode, label_from_digit

MAX_CANONICAL_K = 8
# key spaces up to this size are classified through a dense lookup table
_TABLE_LIMIT = 1 << 22


class ClassificationError(LookupError):
    """A CIS does not belong to the registry it was classified against."""


class RegistryFallbackWarning(UserWarning):
    """A built-in registry was requested for an unsupported (k, mode)."""


# -- key arithmetic -------------------------------------------------------


@lru_cache(maxsize=None)
def pair_list(k: int) -> tuple[tuple[int, int], ...]:
    return tuple((i, j) for i in range(k) for j in range(i + 1, k))


@lru_cache(maxsize=None)
def pair_index(k: int) -> dict[tuple[int, int], int]:
    return {p: n for n, p in enumerate(pair_list(k))}


@lru_cache(maxsize=None)
def pair_weights(k: int, base: int) -> tuple[int, ...]:
    n = len(pair_list(k))
    return tuple(base ** (n - 1 - p) for p in range(n))


def key_digits(key: int, k: int, base: int) -> list[int]:
    out = []
    for w in pair_weights(k, base):
        d, key = divmod(key, w)
        out.append(d)
    return out


def key_from_digits(digits, k: int, base: int) -> int:
    return sum(d * w for d, w in zip(digits, pair_weights(k, base)))


def induced_key(g: LabeledGraph, nodes) -> int:
    """Key of the subgraph of ``g`` induced on sorted ``nodes``."""
    k = len(nodes)
    base = BASE[g.mode]
    key = 0
    for i in range(k):
        u = nodes[i]
        for j in range(i + 1, k):
            key = key * base + g.label(u, nodes[j])
    return key


@lru_cache(maxsize=1 << 18)
def skeleton(k: int, base: int, key: int) -> tuple[int, ...]:
    """Per-position neighbor bitmasks of the undirected skeleton."""
    masks = [0] * k
    for (i, j), d in zip(pair_list(k), key_digits(key, k, base)):
        if d:
            masks[i] |= 1 << j
            masks[j] |= 1 << i
    return tuple(masks)


def _connected_masks(masks, alive: int) -> bool:
    if not alive:
        return True
    start = alive & -alive
    seen = start
    frontier = start
    while frontier:
        low = frontier & -frontier
        frontier ^= low
        nb = masks[low.bit_length() - 1] & alive & ~seen
        seen |= nb
        frontier |= nb
    return seen == alive


@lru_cache(maxsize=1 << 18)
def is_connected_key(k: int, base: int, key: int) -> bool:
    return _connected_masks(skeleton(k, base, key), (1 << k) - 1)


@lru_cache(maxsize=1 << 18)
def noncut_positions(k: int, base: int, key: int) -> tuple[int, ...]:
    """Positions whose removal leaves the skeleton connected."""
    masks = skeleton(k, base, key)
    full = (1 << k) - 1
    return tuple(i for i in range(k) if _connected_masks(masks, full & ~(1 << i)))


@lru_cache(maxsize=1 << 18)
def drop_key(k: int, base: int, key: int, pos: int) -> int:
    """Key of the subgraph with position ``pos`` removed."""
    digits = key_digits(key, k, base)
    kept = [d for (i, j), d in zip(pair_list(k), digits) if i != pos and j != pos]
    return key_from_digits(kept, k - 1, base)


def edge_count_of_key(k: int, base: int, key: int) -> int:
    return sum(1 for d in key_digits(key, k, base) if d)


# -- the CIS type ---------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Cis:
    """A k-node induced subgraph: sorted node ids plus its labeled key."""

    nodes: tuple[int, ...]
    key: int
    mode: str = "undirected"

    @property
    def k(self) -> int:
        return len(self.nodes)

    @property
    def base(self) -> int:
        return BASE[self.mode]

    def digit(self, i: int, j: int) -> int:
        """Label digit between local positions ``i`` and ``j`` seen from ``i``."""
        if i == j:
            raise ValueError("no self pairs")
        if i < j:
            return key_digits(self.key, self.k, self.base)[pair_index(self.k)[(i, j)]]
        return REVERSE[self.mode][self.digit(j, i)]

    @property
    def edges(self) -> list[tuple[tuple[int, int], EdgeLabel]]:
        """Induced edges as ``((i, j), label)`` over local positions ``i < j``."""
        k, mode = self.k, self.mode
        return [
            (p, label_from_digit(mode, d))
            for p, d in zip(pair_list(k), key_digits(self.key, k, self.base))
            if d
        ]

    @property
    def edge_count(self) -> int:
        return edge_count_of_key(self.k, self.base, self.key)

    @property
    def node_set(self) -> frozenset[int]:
        return frozenset(self.nodes)


def induced_cis(g: LabeledGraph, nodes) -> Cis:
    """Induced subgraph of ``g`` on ``nodes`` (connectivity not checked)."""
    ordered = tuple(sorted(nodes))
    if len(set(ordered)) != len(ordered):
        raise ValueError(f"duplicate nodes in {nodes!r}")
    if not ordered:
        raise ValueError("empty node set")
    for v in ordered:
        g._check(v)
    return Cis(ordered, induced_key(g, ordered), g.mode)


def is_connected(s: Cis) -> bool:
    return is_connected_key(s.k, s.base, s.key)


def sub_cis(s: Cis, pos: int) -> Cis:
    """``s`` with local position ``pos`` removed."""
    nodes = s.nodes[:pos] + s.nodes[pos + 1 :]
    return Cis(nodes, drop_key(s.k, s.base, s.key, pos), s.mode)


# -- canonical form -------------------------------------------------------


@lru_cache(maxsize=None)
def _perm_tables(k: int, mode: str):
    """For every node order: source pair index and reversal flag per pair."""
    idx = pair_index(k)
    perms = list(itertools.permutations(range(k)))
    n_pairs = len(idx)
    src = np.empty((len(perms), n_pairs), dtype=np.int64)
    rev = np.zeros((len(perms), n_pairs), dtype=bool)
    for r, perm in enumerate(perms):
        for p, (i, j) in enumerate(pair_list(k)):
            a, b = perm[i], perm[j]
            if a < b:
                src[r, p] = idx[(a, b)]
            else:
                src[r, p] = idx[(b, a)]
                rev[r, p] = True
    return src, rev


def canonical_keys(keys, k: int, mode: str, chunk: int = 0) -> np.ndarray:
    """Vectorised canonical key for many keys at once."""
    check_mode(mode)
    if k > MAX_CANONICAL_K:
        raise NotImplementedError(f"canonical form supported for k <= {MAX_CANONICAL_K}")
    base = BASE[mode]
    keys = np.asarray(keys, dtype=np.int64).reshape(-1)
    if k == 1:
        return keys.copy()
    src, rev = _perm_tables(k, mode)
    weights = np.array(pair_weights(k, base), dtype=np.int64)
    revmap = np.array(REVERSE[mode], dtype=np.int64)
    any_rev = mode == "directed"
    if not chunk:
        chunk = max(1, (1 << 21) // (src.shape[0] * src.shape[1]))
    out = np.empty(len(keys), dtype=np.int64)
    for lo in range(0, len(keys), chunk):
        part = keys[lo : lo + chunk]
        digits = (part[:, None] // weights[None, :]) % base  # (m, P)
        permuted = digits[:, src]  # (m, perms, P)
        if any_rev:
            permuted = np.where(rev[None, :, :], revmap[permuted], permuted)
        out[lo : lo + chunk] = (permuted @ weights).min(axis=1)
    return out


_canon_memo: dict[tuple[int, str, int], int] = {}


def canonical_key(k: int, mode: str, key: int) -> int:
    memo_key = (k, mode, key)
    hit = _canon_memo.get(memo_key)
    if hit is None:
        hit = int(canonical_keys([key], k, mode)[0])
        _canon_memo[memo_key] = hit
    return hit


def code_bytes(k: int, base: int, key: int) -> bytes:
    return bytes(key_digits(key, k, base))


def canonical_code(s: Cis) -> bytes:
    """Fixed-length labeled adjacency string, minimal over node orders.

    Equal for two CISes exactly when they are isomorphic respecting labels.
    """
    if s.k > MAX_CANONICAL_K:
        raise NotImplementedError(f"canonical form supported for k <= {MAX_CANONICAL_K}")
    return code_bytes(s.k, s.base, canonical_key(s.k, s.mode, s.key))


# -- registries -----------------------------------------------------------


@dataclass(frozen=True)
class MotifClass:
    class_id: int
    code: bytes
    name: str
    canonical_key: int
    edge_count: int

    @property
    def code_hex(self) -> str:
        return self.code.hex()


class ClassRegistry:
    """Class ids for the connected k-node graphs of one label mode.

    Built-in registries hold every class up front with stable ids. Dynamic
    registries assign ids in first-seen order and grow during classification.
    """

    def __init__(self, k: int, mode: str, classes: list[MotifClass], dynamic: bool = False):
        self.k = k
        self.mode = mode
        self.base = BASE[mode]
        self.dynamic = dynamic
        self.classes: list[MotifClass] = list(classes)
        self.lookup: dict[bytes, int] = {c.code: c.class_id for c in classes}
        self._by_canon: dict[int, int] = {c.canonical_key: c.class_id for c in classes}
        self._key_memo: dict[int, int] = {}
        self._table: np.ndarray | None = None
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self.classes)

    def __iter__(self):
        return iter(self.classes)

    def __repr__(self) -> str:
        kind = "dynamic" if self.dynamic else "built-in"
        return f"ClassRegistry(k={self.k}, mode={self.mode!r}, classes={len(self)}, {kind})"

    @property
    def ids(self) -> list[int]:
        return [c.class_id for c in self.classes]

    def __getitem__(self, class_id: int) -> MotifClass:
        return self.classes[class_id - 1]

    def classify_key(self, key: int) -> int:
        hit = self._key_memo.get(key)
        if hit is not None:
            return hit
        k, base = self.k, self.base
        if not is_connected_key(k, base, key):
            raise ClassificationError("cannot classify a disconnected subgraph")
        canon = canonical_key(k, self.mode, key)
        cid = self._by_canon.get(canon)
        if cid is None:
            if not self.dynamic:
                raise ClassificationError(
                    f"code {code_bytes(k, base, canon).hex()} not in the {self.mode} k={k} registry"
                )
            with self._lock:
                cid = self._by_canon.get(canon)
                if cid is None:
                    cid = len(self.classes) + 1
                    code = code_bytes(k, base, canon)
                    cls = MotifClass(cid, code, _class_name(k, self.mode, canon, cid),
                                     canon, edge_count_of_key(k, base, canon))
                    self.classes.append(cls)
                    self.lookup[code] = cid
                    self._by_canon[canon] = cid
        self._key_memo[key] = cid
        return cid

    def classify(self, s: Cis) -> int:
        if s.k != self.k:
            raise ClassificationError(f"CIS has {s.k} nodes, registry expects {self.k}")
        if s.mode != self.mode:
            raise ClassificationError(f"CIS mode {s.mode!r} does not match registry mode {self.mode!r}")
        return self.classify_key(s.key)

    def key_table(self) -> np.ndarray:
        """Dense ``key -> class id`` array (0 for disconnected keys)."""
        if self._table is None:
            size = self.base ** len(pair_list(self.k))
            if size > _TABLE_LIMIT:
                raise MemoryError(f"key space of {size} too large for a dense table")
            keys = np.arange(size, dtype=np.int64)
            canon = canonical_keys(keys, self.k, self.mode)
            table = np.zeros(size, dtype=np.int64)
            for key in range(size):
                if is_connected_key(self.k, self.base, key):
                    table[key] = self.classify_key(key) if self.dynamic else self._by_canon[int(canon[key])]
            self._table = table
        return self._table

    def export_table(self) -> str:
        """Tab-separated class table with an ASCII adjacency drawing per class."""
        lines = ["class_id\tk\tmode\tcode_hex\tedges\tname"]
        for c in self.classes:
            edges = " ".join(
                f"{i}{_ARROW[self.mode][d]}{j}"
                for (i, j), d in zip(pair_list(self.k), key_digits(c.canonical_key, self.k, self.base))
                if d
            )
            lines.append(f"{c.class_id}\t{self.k}\t{self.mode}\t{c.code_hex}\t{edges}\t{c.name}")
        return "\n".join(lines) + "\n"

    def drawing(self, class_id: int) -> str:
        """Adjacency-matrix sketch of a class, labels seen from the row node."""
        c = self[class_id]
        k = self.k
        digits = key_digits(c.canonical_key, k, self.base)
        idx = pair_index(k)
        sym = _CELL[self.mode]
        rows = ["   " + " ".join(str(j) for j in range(k))]
        for i in range(k):
            cells = []
            for j in range(k):
                if i == j:
                    cells.append("\\")
                elif i < j:
                    cells.append(sym[digits[idx[(i, j)]]])
                else:
                    cells.append(sym[REVERSE[self.mode][digits[idx[(j, i)]]]])
            rows.append(f"{i}  " + " ".join(cells))
        return "\n".join(rows)


_ARROW = {
    "undirected": {1: "-"},
    "directed": {1: ">", 2: "<", 3: "="},
    "signed": {1: "+", 2: "~"},
}
_CELL = {
    "undirected": {0: ".", 1: "1"},
    "directed": {0: ".", 1: ">", 2: "<", 3: "="},
    "signed": {0: ".", 1: "+", 2: "-"},
}

_UNDIRECTED_NAMES = {
    (2, (1, 1)): "edge",
    (3, (1, 1, 2)): "path",
    (3, (2, 2, 2)): "triangle",
    (4, (1, 1, 1, 3)): "star",
    (4, (1, 1, 2, 2)): "path",
    (4, (2, 2, 2, 2)): "cycle",
    (4, (1, 2, 2, 3)): "tailed-triangle",
    (4, (2, 2, 3, 3)): "diamond",
    (4, (3, 3, 3, 3)): "clique",
}
_OPEN_PART = {
    "directed": {1: "out", 2: "in", 3: "mutual"},
    "signed": {1: "+", 2: "-"},
}


def _class_name(k: int, mode: str, canon: int, cid: int) -> str:
    base = BASE[mode]
    masks = skeleton(k, base, canon)
    degs = tuple(sorted(bin(m).count("1") for m in masks))
    edges = sum(degs) // 2
    if mode == "undirected":
        if k == 5 and degs == (1, 1, 1, 1, 4):
            return "star"
        if k == 6 and degs == (1, 1, 1, 1, 1, 5):
            return "star"
        return _UNDIRECTED_NAMES.get((k, degs), f"{k}n{edges}e-{cid}")
    if k == 3:
        digits = key_digits(canon, k, base)
        idx = pair_index(3)
        if edges == 2:
            center = next(i for i in range(3) if bin(masks[i]).count("1") == 2)
            parts = []
            for j in range(3):
                if j == center:
                    continue
                d = digits[idx[(min(center, j), max(center, j))]]
                if center > j:
                    d = REVERSE[mode][d]
                parts.append(_OPEN_PART[mode][d])
            sep = "-" if mode == "directed" else ""
            return "open:" + sep.join(sorted(parts))
        if mode == "directed" and _is_directed_cycle(digits):
            return "directed-cycle"
        if mode == "signed":
            return "closed:" + "".join(sorted(_OPEN_PART[mode][d] for d in digits))
        return f"closed-{cid}"
    return f"{k}n{edges}e-{mode}-{cid}"


def _is_directed_cycle(digits) -> bool:
    # pairs (0,1), (0,2), (1,2): 0->1->2->0 or its reverse
    return tuple(digits) in ((1, 2, 1), (2, 1, 2))


@lru_cache(maxsize=None)
def _builtin_supported(k: int, mode: str) -> bool:
    if mode == "undirected":
        return 2 <= k <= 6
    return 2 <= k <= 3


def _make_builtin(k: int, mode: str) -> ClassRegistry:
    base = BASE[mode]
    size = base ** len(pair_list(k))
    keys = np.array([key for key in range(size) if is_connected_key(k, base, key)], dtype=np.int64)
    canon = np.unique(canonical_keys(keys, k, mode))
    order = sorted((edge_count_of_key(k, base, int(c)), int(c)) for c in canon)
    if mode == "directed" and k == 3:
        # the directed 3-cycle is class 7: first among the closed triads
        cyc = next(item for item in order if _is_directed_cycle(key_digits(item[1], 3, base)))
        order.remove(cyc)
        order.insert(6, cyc)
    classes = [
        MotifClass(i, code_bytes(k, base, c), _class_name(k, mode, c, i), c, e)
        for i, (e, c) in enumerate(order, 1)
    ]
    return ClassRegistry(k, mode, classes)


_registry_cache: dict[tuple[int, str], ClassRegistry] = {}
_registry_lock = threading.Lock()


def build_registry(k: int, mode: str = "undirected") -> ClassRegistry:
    """Registry of connected k-node classes for ``mode``.

    Built-in (complete, stable ids) for undirected ``k <= 6`` and directed or
    signed ``k <= 3``; otherwise a dynamic registry is returned with a
    :class:`RegistryFallbackWarning`. Built-in registries are shared.
    """
    check_mode(mode)
    if k < 2:
        raise ValueError("k must be >= 2")
    if not _builtin_supported(k, mode):
        warnings.warn(
            f"no built-in registry for k={k} {mode}; using a dynamic registry "
            "with first-seen class ids (not portable across runs)",
            RegistryFallbackWarning,
            stacklevel=2,
        )
        return ClassRegistry(k, mode, [], dynamic=True)
    with _registry_lock:
        reg = _registry_cache.get((k, mode))
        if reg is None:
            reg = _registry_cache[(k, mode)] = _make_builtin(k, mode)
    return reg


def classify(s: Cis, registry: ClassRegistry) -> int:
    return registry.classify(s)
