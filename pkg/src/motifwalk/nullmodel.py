"""Degree-preserving null graphs and Z-scores of class concentrations."""

from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass, field
from typing import IO, Sequence

import numpy as np

from .enumeration import exact_concentrations
from .estimators import ConcentrationVector, ht_edge_estimate
from .graph import BACKWARD, BOTH, FORWARD, POSITIVE, LabeledGraph, largest_connected_component
from .motifs import ClassRegistry, build_registry
from .oracle import BudgetExhausted, QueryOracle
from .walkers import WalkConfig, chain_seed, run_psrw

EDGE_RETRIES = 100
RESTARTS = 50
BALANCE_TRIES = 10_000
EXACT_GUARD = 50_000_000


class WiringError(RuntimeError):
    """Stub matching failed after the allowed number of restarts."""


@dataclass
class JointDegreeDistribution:
    """phi(i, j): fraction of nodes with in-degree i and out-degree j.

    Undirected and signed graphs use (degree, degree). ``positive_fraction``
    is the estimated share of positive edges (signed mode only).
    """

    mass: dict[tuple[int, int], float]
    node_count_estimate: int
    mode: str = "undirected"
    positive_fraction: float | None = None
    truncated: bool = False
    samples: int = 0

    def sample(self, rng: random.Random, n: int) -> list[tuple[int, int]]:
        support = sorted(self.mass)
        weights = [self.mass[s] for s in support]
        return rng.choices(support, weights=weights, k=n)


def _node_degrees(mode: str, labs: Sequence[int]) -> tuple[int, int]:
    if mode != "directed":
        return len(labs), len(labs)
    out = sum(1 for d in labs if d in (FORWARD, BOTH))
    inn = sum(1 for d in labs if d in (BACKWARD, BOTH))
    return inn, out


def exact_joint_degree_dist(g: LabeledGraph) -> JointDegreeDistribution:
    counts: dict[tuple[int, int], int] = {}
    for v in range(g.n):
        key = _node_degrees(g.mode, g.lab[v])
        counts[key] = counts.get(key, 0) + 1
    pos = None
    if g.mode == "signed":
        pos = sum(1 for u, v, d in g.edges() if d == POSITIVE) / max(g.edge_count, 1)
    return JointDegreeDistribution({key: c / g.n for key, c in counts.items()}, g.n, g.mode, pos)


def estimate_joint_degree_dist(oracle: QueryOracle, g: LabeledGraph, steps: int, seed: int,
                               start: int | None = None) -> JointDegreeDistribution:
    """Random walk on nodes; each visit weighted by 1/degree.

    The walk's stationary law is proportional to degree, so the reweighted
    visit frequencies estimate the node-uniform joint degree law.
    """
    rng = random.Random(seed)
    acc: dict[tuple[int, int], float] = {}
    pos_acc = 0.0
    visits = 0
    truncated = False
    v = rng.randrange(g.n) if start is None else start
    try:
        for _ in range(steps):
            nbrs, labs = oracle.query(v)
            if not nbrs:
                raise ValueError("random walk reached an isolated node")
            w = 1.0 / len(nbrs)
            key = _node_degrees(g.mode, labs)
            acc[key] = acc.get(key, 0.0) + w
            if g.mode == "signed":
                pos_acc += sum(1 for d in labs if d == POSITIVE) * w
            visits += 1
            v = nbrs[int(rng.random() * len(nbrs))]
    except BudgetExhausted:
        truncated = True
    if not visits:
        raise ValueError("no nodes visited")
    z = math.fsum(acc.values())
    pos = pos_acc / visits if g.mode == "signed" else None
    return JointDegreeDistribution({key: w / z for key, w in sorted(acc.items())}, g.n, g.mode,
                                   pos, truncated, visits)


# -- configuration model ---------------------------------------------------


def degree_sequence_from(g: LabeledGraph) -> list[tuple[int, int]]:
    """Per-node (in, out) degrees; (d, d) for undirected and signed graphs."""
    return [_node_degrees(g.mode, g.lab[v]) for v in range(g.n)]


def sample_degree_sequence(phi: JointDegreeDistribution, n: int, rng: random.Random) -> list[tuple[int, int]]:
    """Draw ``n`` node degrees from phi; redraw the last node until stubs balance."""
    for _ in range(RESTARTS):
        seq = phi.sample(rng, n - 1)
        if phi.mode == "directed":
            gap = sum(i for i, _ in seq) - sum(o for _, o in seq)
            ok = lambda d: d[1] - d[0] == gap  # noqa: E731
        else:
            parity = sum(d for d, _ in seq) % 2
            ok = lambda d: d[0] % 2 == parity  # noqa: E731
        for _ in range(BALANCE_TRIES):
            last = phi.sample(rng, 1)[0]
            if ok(last):
                return seq + [last]
    raise WiringError("could not balance the sampled degree sequence")


def _wire_directed(seq, rng: random.Random):
    ins = [v for v, (i, _) in enumerate(seq) for _ in range(i)]
    outs = [v for v, (_, o) in enumerate(seq) for _ in range(o)]
    if len(ins) != len(outs):
        raise ValueError("in-stub and out-stub totals differ")
    edges: set[tuple[int, int]] = set()
    while ins:
        # random unconnected in-stub
        a = int(rng.random() * len(ins))
        vi = ins[a]
        ins[a] = ins[-1]
        ins.pop()
        # random out-stub, redrawn on self-loop or existing vo -> vi
        for _ in range(EDGE_RETRIES):
            b = int(rng.random() * len(outs))
            vo = outs[b]
            if vo != vi and (vo, vi) not in edges:
                break
        else:
            return None
        outs[b] = outs[-1]
        outs.pop()
        edges.add((vo, vi))
    return edges


def _wire_undirected(seq, rng: random.Random):
    stubs = [v for v, (d, _) in enumerate(seq) for _ in range(d)]
    if len(stubs) % 2:
        raise ValueError("degree sum is odd")
    edges: set[tuple[int, int]] = set()
    while stubs:
        a = int(rng.random() * len(stubs))
        u = stubs[a]
        stubs[a] = stubs[-1]
        stubs.pop()
        for _ in range(EDGE_RETRIES):
            b = int(rng.random() * len(stubs))
            v = stubs[b]
            if v != u and (min(u, v), max(u, v)) not in edges:
                break
        else:
            return None
        stubs[b] = stubs[-1]
        stubs.pop()
        edges.add((min(u, v), max(u, v)))
    return edges


def generate_configuration_graph(seq: Sequence[tuple[int, int]], seed: int, mode: str = "directed",
                                 positive_fraction: float = 1.0) -> LabeledGraph:
    """Random simple graph with the exact (in, out) degree sequence ``seq``.

    Directed: every in-stub is matched to a random out-stub, redrawing the
    out-stub on a self-loop or an already present edge. Reciprocal pairs are
    allowed and become one ``both`` edge. Undirected and signed graphs use
    ``seq[v][0]`` as the degree and the same redraw rule; signed edges are
    positive with probability ``positive_fraction``. A stub that cannot be
    placed within 100 redraws restarts the wiring, at most 50 times.
    """
    rng = random.Random(seed)
    n = len(seq)
    wire = _wire_directed if mode == "directed" else _wire_undirected
    for _ in range(RESTARTS):
        edges = wire(seq, rng)
        if edges is None:
            continue
        ordered = sorted(edges)
        if mode == "signed":
            labelled = [(u, v, POSITIVE if rng.random() < positive_fraction else -1) for u, v in ordered]
            return LabeledGraph.from_edges(labelled, mode, n=n)
        return LabeledGraph.from_edges(ordered, mode, n=n)
    raise WiringError(f"wiring failed after {RESTARTS} restarts")


# -- Z-scores -------------------------------------------------------------


@dataclass
class ZScoreRow:
    class_id: int
    omega: float
    mu: float
    sigma: float
    z: float | None

    @property
    def undefined(self) -> bool:
        return self.z is None


@dataclass
class ZScoreReport:
    k: int
    mode: str
    rows: list[ZScoreRow]
    method: str
    n_random: int
    null_values: np.ndarray = field(repr=False, default=None)

    def __getitem__(self, class_id: int) -> ZScoreRow:
        return next(r for r in self.rows if r.class_id == class_id)

    def write_csv(self, stream: IO[str]) -> None:
        w = csv.writer(stream, lineterminator="\n")
        w.writerow(["class_id", "omega", "mu", "sigma", "z", "method", "n_random"])
        for r in self.rows:
            z = "undefined" if r.z is None else repr(r.z)
            w.writerow([r.class_id, repr(r.omega), repr(r.mu), repr(r.sigma), z, self.method, self.n_random])


def z_from_null(omega: ConcentrationVector, null: np.ndarray, ids: Sequence[int]) -> list[ZScoreRow]:
    """Rows of Z = (omega - mu)/sigma from a (graphs x classes) null matrix.

    sigma is the n-1 sample standard deviation; sigma = 0 leaves Z undefined.
    """
    mu = null.mean(axis=0)
    sigma = null.std(axis=0, ddof=1)
    rows = []
    for j, cid in enumerate(ids):
        w = omega[cid]
        s = float(sigma[j])
        z = None if s == 0 else (w - float(mu[j])) / s
        rows.append(ZScoreRow(cid, w, float(mu[j]), s, z))
    return rows


def _enumeration_load(g: LabeledGraph, k: int) -> float:
    """Upper bound on k-CISes rooted anywhere: sum of d^(k-1)."""
    return float(sum(float(len(a)) ** (k - 1) for a in g.adj))


def null_concentrations(g: LabeledGraph, k: int, registry: ClassRegistry, method: str,
                        seed: int, psrw_steps: int) -> ConcentrationVector:
    if method == "exact":
        return exact_concentrations(g, k, registry)
    lcc = largest_connected_component(g)
    trace = run_psrw(QueryOracle(lcc), lcc, WalkConfig(k=k, steps=psrw_steps, seed=seed, method="psrw"), registry)
    return ht_edge_estimate(trace)


def z_scores(
    omega: ConcentrationVector,
    source: JointDegreeDistribution | Sequence[tuple[int, int]],
    n_random: int,
    k: int,
    registry: ClassRegistry | None = None,
    seed: int = 0,
    n: int | None = None,
    method: str = "auto",
    psrw_steps: int = 20_000,
    positive_fraction: float | None = None,
) -> ZScoreReport:
    """Z-scores of ``omega`` against ``n_random`` configuration-model graphs.

    ``source`` is either an exact (in, out) degree sequence or an estimated
    joint degree distribution (then ``n`` nodes are drawn from it). Null
    concentrations are exact when the enumeration load is small and PSRW
    estimates otherwise (``method`` forces one or the other). Signed null
    graphs draw each sign independently with ``positive_fraction``, taken
    from ``source`` when it is a distribution.
    """
    if n_random < 2:
        raise ValueError("n_random must be >= 2")
    mode = omega.mode
    registry = build_registry(k, mode) if registry is None else registry
    phi = source if isinstance(source, JointDegreeDistribution) else None
    rows = []
    used = set()
    pos = positive_fraction
    if pos is None:
        pos = phi.positive_fraction if phi is not None and phi.positive_fraction is not None else 1.0
    for i in range(n_random):
        s = chain_seed(seed, i)
        rng = random.Random(s)
        if phi is not None:
            seq = sample_degree_sequence(phi, n or phi.node_count_estimate, rng)
        else:
            seq = list(source)
        g = generate_configuration_graph(seq, rng.getrandbits(63), mode, pos)
        m = method
        if m == "auto":
            m = "exact" if _enumeration_load(g, k) <= EXACT_GUARD else "psrw"
        used.add(m)
        rows.append(null_concentrations(g, k, registry, m, s, psrw_steps))
    ids = sorted(set(registry.ids) | set(omega.values))
    null = np.array([r.as_array(ids) for r in rows])
    label = "+".join(sorted(used))
    return ZScoreReport(k, mode, z_from_null(omega, null, ids), label, n_random, null)
