"""Crawl-style access to a graph with a distinct-node query budget."""

from __future__ import annotations

from dataclasses import dataclass

from .graph import LabeledGraph


class BudgetExhausted(RuntimeError):
    """A query or walk step would exceed the node or time budget."""


@dataclass(frozen=True)
class LatencyModel:
    per_query_ms: float = 0.0
    per_step_compute_ms: float = 0.0

    def __post_init__(self):
        if self.per_query_ms < 0 or self.per_step_compute_ms < 0:
            raise ValueError("latencies must be non-negative")


@dataclass
class QueryBudget:
    limit_nodes: int | None = None
    limit_time: float | None = None
    distinct_queried: int = 0
    simulated_elapsed_ms: float = 0.0


@dataclass(frozen=True)
class OracleStats:
    distinct_queried: int
    simulated_elapsed_ms: float
    cache_hits: int
    steps: int = 0


class QueryOracle:
    """Serves node queries against ``graph`` and accounts for them.

    A query reveals the full incident edge list of a node. Only the first
    query of a node is charged; repeats are cache hits. ``log`` records the
    nodes in first-query order.
    """

    def __init__(
        self,
        graph: LabeledGraph,
        limit_nodes: int | None = None,
        limit_ms: float | None = None,
        latency: LatencyModel | None = None,
    ):
        if limit_nodes is not None and limit_nodes < 0:
            raise ValueError("limit_nodes must be >= 0")
        self.graph = graph
        self.latency = latency or LatencyModel()
        self.budget = QueryBudget(limit_nodes=limit_nodes, limit_time=limit_ms)
        self.cache: dict[int, tuple[tuple[int, ...], tuple[int, ...]]] = {}
        self.log: list[int] = []
        self.cache_hits = 0
        self.steps = 0

    def query(self, v: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Return ``(neighbors, label digits)`` of ``v``."""
        hit = self.cache.get(v)
        if hit is not None:
            self.cache_hits += 1
            return hit
        g = self.graph
        if not 0 <= v < g.n:
            raise IndexError(f"node id {v} out of range")
        b = self.budget
        if b.limit_nodes is not None and b.distinct_queried >= b.limit_nodes:
            raise BudgetExhausted(f"node budget of {b.limit_nodes} reached")
        cost = self.latency.per_query_ms
        if b.limit_time is not None and b.simulated_elapsed_ms + cost > b.limit_time:
            raise BudgetExhausted(f"time budget of {b.limit_time} ms reached")
        b.distinct_queried += 1
        b.simulated_elapsed_ms += cost
        view = (g.adj[v], g.lab[v])
        self.cache[v] = view
        self.log.append(v)
        return view

    def is_cached(self, v: int) -> bool:
        return v in self.cache

    def tick(self) -> None:
        """Charge one walk step of simulated compute time."""
        b = self.budget
        cost = self.latency.per_step_compute_ms
        if b.limit_time is not None and cost and b.simulated_elapsed_ms + cost > b.limit_time:
            raise BudgetExhausted(f"time budget of {b.limit_time} ms reached")
        b.simulated_elapsed_ms += cost
        self.steps += 1

    @property
    def distinct_queried(self) -> int:
        return self.budget.distinct_queried

    def stats(self) -> OracleStats:
        return OracleStats(
            self.budget.distinct_queried,
            self.budget.simulated_elapsed_ms,
            self.cache_hits,
            self.steps,
        )

    def can_terminate(self) -> bool:
        """Whether an unbounded walk is guaranteed to hit a budget limit."""
        b = self.budget
        if b.limit_nodes is not None and b.limit_nodes < self.graph.n:
            return True
        if b.limit_time is not None and self.latency.per_step_compute_ms > 0:
            return True
        return False
