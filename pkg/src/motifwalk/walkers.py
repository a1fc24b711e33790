"""Random walks over CIS relationship graphs: SRW, PSRW, MSS, MHSRW, GUISE.

Each chain owns one :class:`QueryOracle` and one ``random.Random``; with the
same seed a chain replays the same states and the same query log. Walks end
after ``steps`` samples or when the oracle raises :class:`BudgetExhausted`,
in which case the trace is flagged truncated and keeps what was collected.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .graph import BASE, LabeledGraph
from .motifs import Cis, ClassRegistry, build_registry, noncut_positions, sub_cis
from .neighborhood import CisExplorer, StateInfo
from .oracle import BudgetExhausted, QueryOracle
from .trace import PairSample, ReduceSample, Sample, WalkTrace

METHODS = ("srw", "psrw", "mss", "mhsrw", "guise")
GUISE_SIZES = (3, 4, 5)


@dataclass(frozen=True)
class WalkConfig:
    """``steps`` is B, the number of recorded samples before burn-in removal.

    ``steps=None`` walks until the oracle budget runs out. ``lazy`` holds the
    current state with probability 1/2 each step (for bipartite G^(k)).
    """

    k: int
    steps: int | None = 1000
    burn_in: int = 0
    seed: int = 0
    method: str = "srw"
    start: int | None = None
    lazy: bool = False

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.steps is not None and self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")
        if self.method == "psrw" and self.k < 3:
            raise ValueError("psrw needs k >= 3 (walk dimension k-1 >= 2)")
        if self.method == "mss" and self.k < 3:
            raise ValueError("mss needs k >= 3")
        if self.k < 2:
            raise ValueError("k must be >= 2")


def chain_seed(master_seed: int, run_index: int) -> int:
    """Independent 64-bit seed for chain ``run_index`` of an experiment."""
    ss = np.random.SeedSequence([master_seed & (2**64 - 1), run_index])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def seed_cis(oracle: QueryOracle, g: LabeledGraph, k: int, start: int | None = None,
             rng: random.Random | None = None) -> Cis:
    """First ``k`` nodes of a BFS from ``start`` (ascending neighbor order).

    Only popped nodes are queried, and all of them are among the ``k`` chosen.
    """
    if g.n < k:
        raise ValueError(f"graph has {g.n} nodes, fewer than k={k}")
    if start is None:
        start = (rng or random.Random(0)).randrange(g.n)
    chosen = [start]
    seen = {start}
    head = 0
    while len(chosen) < k:
        if head == len(chosen):
            raise ValueError("start node's component has fewer than k nodes")
        nbrs, _ = oracle.query(chosen[head])
        head += 1
        for u in nbrs:
            if u not in seen:
                seen.add(u)
                chosen.append(u)
                if len(chosen) == k:
                    break
    return _cis_from_oracle(oracle, chosen)


def _cis_from_oracle(oracle: QueryOracle, nodes) -> Cis:
    ordered = tuple(sorted(nodes))
    mode = oracle.graph.mode
    base = BASE[mode]
    key = 0
    for i, u in enumerate(ordered):
        nbrs, labs = oracle.query(u)
        row = dict(zip(nbrs, labs))
        for v in ordered[i + 1 :]:
            key = key * base + row.get(v, 0)
    return Cis(ordered, key, mode)


class _Chain:
    """Transition machinery shared by all walkers."""

    def __init__(self, oracle: QueryOracle, rng: random.Random):
        self.oracle = oracle
        self.rng = rng
        self.explorer = CisExplorer(oracle)

    def state(self, cis: Cis) -> StateInfo:
        return self.explorer.state(cis)

    def step(self, info: StateInfo) -> tuple[int, StateInfo]:
        """Uniform neighbor in G^(k); returns (move index, next state)."""
        d = info.degree
        if d == 0:
            raise ValueError("state has no neighbors (k must be < |V|)")
        i = int(self.rng.random() * d)
        nxt = info.cache.get("next")
        if nxt is None:
            nxt = info.cache["next"] = [None] * d
        t = nxt[i]
        if t is None:
            t = nxt[i] = self.explorer.state(info.neighbor(i))
        return i, t


def _node_sample(info: StateInfo, registry: ClassRegistry) -> Sample:
    rec = info.cache.get("node")
    if rec is None:
        rec = info.cache["node"] = Sample(info.cis, registry.classify_key(info.cis.key), info.degree)
    return rec


def _pair_sample(info: StateInfo, move: int, registry: ClassRegistry) -> PairSample:
    pairs = info.cache.get("pairs")
    if pairs is None:
        pairs = info.cache["pairs"] = {}
    rec = pairs.get(move)
    if rec is None:
        u = info.move(move)[1]
        x = info.extension(u)
        i = len(noncut_positions(x.k, x.base, x.key))
        rec = pairs[move] = PairSample(x, registry.classify_key(x.key), i)
    return rec


def _reduce_sample(info: StateInfo, registry: ClassRegistry) -> ReduceSample:
    rec = info.cache.get("reduce")
    if rec is None:
        s = info.cis
        contained = tuple(
            (registry.classify_key(sub_cis(s, p).key), info.outside_count_without(p))
            for p in info.noncut()
        )
        rec = info.cache["reduce"] = ReduceSample(s, info.degree, contained)
    return rec


def _setup(oracle, g, cfg: WalkConfig, size: int):
    rng = random.Random(cfg.seed)
    chain = _Chain(oracle, rng)
    if size >= g.n:
        raise ValueError(f"walk size {size} must be < |V| = {g.n}")
    if cfg.steps is None and not oracle.can_terminate():
        raise ValueError("steps=None needs a node budget below |V| or a per-step time cost")
    return rng, chain


def _run(oracle: QueryOracle, cfg: WalkConfig, traces: list[WalkTrace], body: Callable[[], None]) -> None:
    try:
        body()
    except BudgetExhausted:
        for t in traces:
            t.truncated = True
    for t in traces:
        if cfg.burn_in:
            del t.samples[: cfg.burn_in]
        t.stats = oracle.stats()


def _limit(cfg: WalkConfig) -> float:
    return float("inf") if cfg.steps is None else cfg.steps


def run_srw(oracle: QueryOracle, g: LabeledGraph, cfg: WalkConfig,
            registry: ClassRegistry | None = None) -> WalkTrace:
    """Simple random walk on G^(k); records s_1..s_B with their degrees."""
    k = cfg.k
    registry = build_registry(k, g.mode) if registry is None else registry
    rng, chain = _setup(oracle, g, cfg, k)
    trace = WalkTrace("srw", k, g.mode, "node", registries={k: registry})
    out = trace.samples
    limit = _limit(cfg)
    lazy = cfg.lazy

    def body():
        info = chain.state(seed_cis(oracle, g, k, cfg.start, rng))
        oracle.tick()
        out.append(_node_sample(info, registry))
        while len(out) < limit:
            oracle.tick()
            if not (lazy and rng.random() < 0.5):
                info = chain.step(info)[1]
            out.append(_node_sample(info, registry))
            trace.steps_taken += 1

    _run(oracle, cfg, [trace], body)
    return trace


def run_psrw(oracle: QueryOracle, g: LabeledGraph, cfg: WalkConfig,
             registry: ClassRegistry | None = None) -> WalkTrace:
    """SRW on G^(k-1); each consecutive pair of states yields one k-node union.

    B walk states give B-1 pair samples.
    """
    k = cfg.k
    registry = build_registry(k, g.mode) if registry is None else registry
    rng, chain = _setup(oracle, g, cfg, k - 1)
    trace = WalkTrace("psrw", k, g.mode, "pair", registries={k: registry})
    out = trace.samples
    limit = _limit(cfg) - 1

    def body():
        info = chain.state(seed_cis(oracle, g, k - 1, cfg.start, rng))
        oracle.tick()
        while len(out) < limit:
            oracle.tick()
            move, nxt = chain.step(info)
            out.append(_pair_sample(info, move, registry))
            info = nxt
            trace.steps_taken += 1

    _run(oracle, cfg, [trace], body)
    return trace


@dataclass
class MssTraces:
    """Three views of one SRW on G^(k): sizes k (node), k+1 (pair), k-1 (reduce)."""

    node: WalkTrace
    pair: WalkTrace
    reduce: WalkTrace

    def by_size(self) -> dict[int, WalkTrace]:
        return {self.reduce.k: self.reduce, self.node.k: self.node, self.pair.k: self.pair}


def run_mss(oracle: QueryOracle, g: LabeledGraph, cfg: WalkConfig,
            registries: dict[int, ClassRegistry] | None = None) -> MssTraces:
    k = cfg.k
    if k + 1 > g.n:
        raise ValueError("mss needs k+1 <= |V|")
    regs = dict(registries or {})
    for m in (k - 1, k, k + 1):
        if m not in regs:
            regs[m] = build_registry(m, g.mode)
    rng, chain = _setup(oracle, g, cfg, k)
    node = WalkTrace("mss", k, g.mode, "node", registries={k: regs[k]})
    pair = WalkTrace("mss", k + 1, g.mode, "pair", registries={k + 1: regs[k + 1]})
    red = WalkTrace("mss", k - 1, g.mode, "reduce", registries={k - 1: regs[k - 1]})
    nodes, pairs, reds = node.samples, pair.samples, red.samples
    limit = _limit(cfg)
    rk, rk1, rkm = regs[k], regs[k + 1], regs[k - 1]

    def body():
        info = chain.state(seed_cis(oracle, g, k, cfg.start, rng))
        oracle.tick()
        nodes.append(_node_sample(info, rk))
        reds.append(_reduce_sample(info, rkm))
        while len(nodes) < limit:
            oracle.tick()
            move, nxt = chain.step(info)
            pairs.append(_pair_sample(info, move, rk1))
            info = nxt
            nodes.append(_node_sample(info, rk))
            reds.append(_reduce_sample(info, rkm))
            node.steps_taken += 1

    traces = [node, pair, red]
    _run(oracle, cfg, traces, body)
    pair.steps_taken = red.steps_taken = node.steps_taken
    return MssTraces(node, pair, red)


def run_mhsrw(oracle: QueryOracle, g: LabeledGraph, cfg: WalkConfig,
              registry: ClassRegistry | None = None) -> WalkTrace:
    """Metropolis-Hastings walk on G^(k) targeting the uniform law on C^(k).

    A proposal y is accepted with probability min(1, d(x)/d(y)); a rejection
    records x again. Exploring y is charged whether or not it is accepted.
    """
    k = cfg.k
    registry = build_registry(k, g.mode) if registry is None else registry
    rng, chain = _setup(oracle, g, cfg, k)
    trace = WalkTrace("mhsrw", k, g.mode, "node", registries={k: registry})
    out = trace.samples
    limit = _limit(cfg)
    rand = rng.random

    def body():
        info = chain.state(seed_cis(oracle, g, k, cfg.start, rng))
        oracle.tick()
        out.append(_node_sample(info, registry))
        while len(out) < limit:
            oracle.tick()
            _, y = chain.step(info)
            dx, dy = info.degree, y.degree
            if dy <= dx or rand() * dy < dx:
                info = y
            out.append(_node_sample(info, registry))
            trace.steps_taken += 1

    _run(oracle, cfg, [trace], body)
    return trace


# -- GUISE ----------------------------------------------------------------


def _mix_moves(info: StateInfo, sizes: tuple[int, ...]) -> tuple[int, int, int]:
    """(same-size, grow, shrink) neighbor counts of a state in G_mix."""
    cached = info.cache.get("mix")
    if cached is None:
        m = info.cis.k
        grow = len(info.outside_arr) if m + 1 in sizes else 0
        shrink = len(info.noncut()) if m - 1 in sizes else 0
        cached = info.cache["mix"] = (info.degree, grow, shrink)
    return cached


def mix_degree(info: StateInfo, sizes=GUISE_SIZES) -> int:
    return sum(_mix_moves(info, tuple(sizes)))


def mix_neighbors(info: StateInfo, sizes=GUISE_SIZES) -> list[Cis]:
    """Every G_mix neighbor of the state, in proposal order."""
    same, grow, shrink = _mix_moves(info, tuple(sizes))
    out = [info.neighbor(i) for i in range(same)]
    if grow:
        out.extend(info.extension(u) for u in info.outside)
    if shrink:
        out.extend(sub_cis(info.cis, p) for p in info.noncut())
    return out


def _mix_target(chain: _Chain, info: StateInfo, j: int, sizes) -> StateInfo:
    nxt = info.cache.get("mixnext")
    if nxt is None:
        nxt = info.cache["mixnext"] = {}
    t = nxt.get(j)
    if t is None:
        same, grow, shrink = _mix_moves(info, sizes)
        if j < same:
            cis = info.neighbor(j)
        elif j < same + grow:
            cis = info.extension(info.outside_node(j - same))
        else:
                cis = sub_cis(info.cis, info.noncut()[j - same - grow])
        t = nxt[j] = chain.state(cis)
    return t


def run_guise(oracle: QueryOracle, g: LabeledGraph, cfg: WalkConfig,
              registries: dict[int, ClassRegistry] | None = None) -> WalkTrace:
    """Metropolis-Hastings walk on G_mix over 3-, 4- and 5-node CISes.

    Uniform over all 3/4/5-node CISes in the limit; estimate each size with
    :func:`plain_average` on its slice.
    """
    sizes = GUISE_SIZES
    if g.n < 6:
        raise ValueError("guise needs |V| >= 6")
    regs = dict(registries or {})
    for m in sizes:
        if m not in regs:
            regs[m] = build_registry(m, g.mode)
    rng, chain = _setup(oracle, g, cfg, sizes[0])
    trace = WalkTrace("guise", 4, g.mode, "mixed", registries=regs)
    out = trace.samples
    limit = _limit(cfg)
    rand = rng.random

    def record(info):
        rec = info.cache.get("mixrec")
        if rec is None:
            rec = info.cache["mixrec"] = Sample(
                info.cis, regs[info.cis.k].classify_key(info.cis.key), mix_degree(info, sizes)
            )
        return rec

    def body():
        info = chain.state(seed_cis(oracle, g, sizes[0], cfg.start, rng))
        oracle.tick()
        out.append(record(info))
        while len(out) < limit:
            oracle.tick()
            dx = mix_degree(info, sizes)
            y = _mix_target(chain, info, int(rand() * dx), sizes)
            dy = mix_degree(y, sizes)
            if dy <= dx or rand() * dy < dx:
                info = y
            out.append(record(info))
            trace.steps_taken += 1

    _run(oracle, cfg, [trace], body)
    return trace


def run_walk(oracle: QueryOracle, g: LabeledGraph, cfg: WalkConfig, registries=None):
    """Dispatch on ``cfg.method``. MSS returns :class:`MssTraces`."""
    regs = registries or {}
    if cfg.method == "srw":
        return run_srw(oracle, g, cfg, regs.get(cfg.k))
    if cfg.method == "psrw":
        return run_psrw(oracle, g, cfg, regs.get(cfg.k))
    if cfg.method == "mhsrw":
        return run_mhsrw(oracle, g, cfg, regs.get(cfg.k))
    if cfg.method == "mss":
        return run_mss(oracle, g, cfg, regs)
    return run_guise(oracle, g, cfg, regs)


__all__ = [
    "METHODS",
    "MssTraces",
    "WalkConfig",
    "chain_seed",
    "mix_degree",
    "mix_neighbors",
    "run_guise",
    "run_mhsrw",
    "run_mss",
    "run_psrw",
    "run_srw",
    "run_walk",
    "seed_cis",
]
