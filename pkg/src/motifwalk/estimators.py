"""Concentration estimators over walk traces, and error metrics across runs."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

import numpy as np

from .motifs import ClassRegistry
from .trace import PairSample, ReduceSample, Sample, WalkTrace


class EmptyTraceError(ValueError):
    pass


@dataclass(frozen=True)
class ConcentrationVector:
    """Class id -> fraction. ``observed`` lists classes seen at least once,
    so an unobserved class (reported 0) is distinguishable from an estimate
    that happens to be zero."""

    k: int
    mode: str
    values: dict[int, float]
    total_samples_used: int
    observed: frozenset[int] = frozenset()

    def __getitem__(self, class_id: int) -> float:
        return self.values.get(class_id, 0.0)

    @property
    def ids(self) -> list[int]:
        return sorted(self.values)

    def as_array(self, ids: Sequence[int] | None = None) -> np.ndarray:
        ids = self.ids if ids is None else ids
        return np.array([self[c] for c in ids], dtype=float)

    def total(self) -> float:
        return math.fsum(self.values.values())


def _normalize(acc: dict[int, float], registry: ClassRegistry, n: int) -> ConcentrationVector:
    z = math.fsum(acc.values())
    if z <= 0:
        raise EmptyTraceError("no weight accumulated")
    values = {cid: 0.0 for cid in registry.ids}
    for cid, w in acc.items():
        values[cid] = w / z
    return ConcentrationVector(registry.k, registry.mode, values, n, frozenset(acc))


def _need(trace: WalkTrace, view: str) -> None:
    if trace.view != view:
        raise ValueError(f"expected a {view!r} trace, got {trace.view!r}")
    if not trace.samples:
        raise EmptyTraceError(f"empty {trace.method} trace")


def ht_node_estimate(trace: WalkTrace) -> ConcentrationVector:
    """Weights each visited CIS by 1/degree (stationary law is proportional to degree)."""
    _need(trace, "node")
    acc: dict[int, float] = {}
    for s in trace.samples:
        acc[s.class_id] = acc.get(s.class_id, 0.0) + 1.0 / s.degree
    return _normalize(acc, trace.registry, len(trace.samples))


def ht_edge_estimate(trace: WalkTrace) -> ConcentrationVector:
    """Weights each pair union x by 1/(I(x)(I(x)-1))."""
    _need(trace, "pair")
    acc: dict[int, float] = {}
    for s in trace.samples:
        i = s.i_count
        if i < 2:
            raise AssertionError(f"pair union with I={i} < 2")
        acc[s.class_id] = acc.get(s.class_id, 0.0) + 1.0 / (i * (i - 1))
    return _normalize(acc, trace.registry, len(trace.samples))


def ht_reduce_estimate(trace: WalkTrace) -> ConcentrationVector:
    """Size k-1 concentrations from size-k states: (1/d) * sum over s' of 1/|O(s')|."""
    _need(trace, "reduce")
    acc: dict[int, float] = {}
    for s in trace.samples:
        inv_d = 1.0 / s.degree
        for cid, o in s.contained:
            assert o > 0, "contained CIS with no containing CIS"
            acc[cid] = acc.get(cid, 0.0) + inv_d / o
    return _normalize(acc, trace.registry, len(trace.samples))


def plain_average(trace: WalkTrace, size: int | None = None) -> ConcentrationVector:
    """Unweighted class frequencies; ``size`` selects a slice of a mixed trace."""
    if not trace.samples:
        raise EmptyTraceError(f"empty {trace.method} trace")
    size = trace.k if size is None else size
    registry = trace.registries[size]
    acc: dict[int, float] = {}
    n = 0
    for s in trace.samples:
        if s.cis.k != size:
            continue
        acc[s.class_id] = acc.get(s.class_id, 0.0) + 1.0
        n += 1
    if not n:
        raise EmptyTraceError(f"no {size}-node samples in {trace.method} trace")
    return _normalize(acc, registry, n)


def estimate(trace: WalkTrace, size: int | None = None) -> ConcentrationVector:
    """The estimator matching the trace's view."""
    if trace.view == "node":
        if trace.method in ("mhsrw", "rand_esu"):
            return plain_average(trace)
        return ht_node_estimate(trace)
    if trace.view == "pair":
        return ht_edge_estimate(trace)
    if trace.view == "reduce":
        return ht_reduce_estimate(trace)
    return plain_average(trace, size)


# -- errors ---------------------------------------------------------------


@dataclass
class ErrorReport:
    per_class: dict[int, float]
    rmse: float
    runs: int
    truth: ConcentrationVector
    excluded: list[int] = field(default_factory=list)
    mean: dict[int, float] = field(default_factory=dict)

    def mean_nrmse(self, ids: Iterable[int] | None = None) -> float:
        ids = list(self.per_class) if ids is None else list(ids)
        return float(np.mean([self.per_class[c] for c in ids]))


def nrmse(estimates: Sequence[ConcentrationVector], truth: ConcentrationVector) -> ErrorReport:
    """Per-class sqrt(mean squared error)/truth, and the vector RMSE.

    The MSE averages over runs (divides by R). Classes with zero truth are
    excluded from the per-class table but still count toward RMSE.
    """
    if len(estimates) < 2:
        raise ValueError("need at least 2 runs")
    ids = sorted(set(truth.values) | {c for e in estimates for c in e.values})
    est = np.array([e.as_array(ids) for e in estimates])
    tru = truth.as_array(ids)
    sq = (est - tru) ** 2
    per_class, excluded = {}, []
    for j, cid in enumerate(ids):
        if tru[j] > 0:
            per_class[cid] = float(math.sqrt(sq[:, j].mean()) / tru[j])
        else:
            excluded.append(cid)
    rmse = float(math.sqrt(sq.sum(axis=1).mean()))
    mean = {cid: float(est[:, j].mean()) for j, cid in enumerate(ids)}
    return ErrorReport(per_class, rmse, len(estimates), truth, excluded, mean)


def write_csv(stream: IO[str], est: ConcentrationVector, registry: ClassRegistry,
              truth: ConcentrationVector | None = None, report: ErrorReport | None = None) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["class_id", "canonical_code", "estimate", "truth", "nrmse"])
    for cid in est.ids:
        t = "" if truth is None else repr(truth[cid])
        e = ""
        if report is not None and cid in report.per_class:
            e = repr(report.per_class[cid])
        w.writerow([cid, registry[cid].code_hex, repr(est[cid]), t, e])
