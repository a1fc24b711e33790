"""Repeated-chain experiments: budgets, per-run estimates, error summaries."""

from __future__ import annotations

import csv
import io
import json
import logging
import multiprocessing as mp
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

from . import __version__
from .enumeration import cached_truth, rand_esu, rand_esu_estimate
from .estimators import (
    ConcentrationVector,
    EmptyTraceError,
    ErrorReport,
    ht_edge_estimate,
    ht_node_estimate,
    ht_reduce_estimate,
    nrmse,
    plain_average,
)
from .fixtures import NAMED
from .graph import LabeledGraph, largest_connected_component, load_edge_list
from .motifs import ClassRegistry, build_registry
from .oracle import LatencyModel, OracleStats, QueryOracle
from .walkers import GUISE_SIZES, WalkConfig, chain_seed, run_guise, run_mhsrw, run_mss, run_psrw, run_srw

log = logging.getLogger(__name__)

ALL_METHODS = ("srw", "psrw", "mss", "mhsrw", "guise", "rand_esu", "psrw_split")


@dataclass
class ExperimentConfig:
    """Everything needed to reproduce a batch of chains.

    ``graph`` is an edge-list path or ``fixture:<name>``. At least one of
    ``steps``, ``budget_nodes`` and ``budget_ms`` must be set; a chain stops
    at whichever limit it reaches first.
    """

    graph: str
    k: int
    methods: list[str] = field(default_factory=lambda: ["psrw"])
    mode: str = "undirected"
    steps: int | None = None
    budget_nodes: int | None = None
    budget_ms: float | None = None
    query_delay_ms: float = 0.0
    step_ms: float = 0.0
    runs: int = 200
    seed: int = 0
    burn_in: int = 0
    lcc: bool = True
    lazy: bool = False
    out: str | None = None
    truth: str | None = None
    compute_truth: bool = False
    workers: int = 1
    rand_esu_probs: list[float] | None = None

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.steps is None and self.budget_nodes is None and self.budget_ms is None:
            raise ValueError("set at least one of steps, budget_nodes, budget_ms")
        if not self.methods:
            raise ValueError("no methods given")
        for m in self.methods:
            if m not in ALL_METHODS:
                raise ValueError(f"unknown method {m!r}")

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def load_graph(spec: str, mode: str = "undirected", lcc: bool = True) -> LabeledGraph:
    if spec.startswith("fixture:"):
        g = NAMED[spec.split(":", 1)[1]]()
    else:
        g = load_edge_list(spec, mode)
    return largest_connected_component(g) if lcc else g


def method_sizes(method: str, k: int) -> tuple[int, ...]:
    if method == "mss":
        return (k - 1, k, k + 1)
    if method in ("guise", "psrw_split"):
        return GUISE_SIZES
    return (k,)


@dataclass
class ChainResult:
    run: int
    estimates: dict[int, ConcentrationVector | None]
    stats: OracleStats
    samples: int
    truncated: bool


def _oracle(g: LabeledGraph, cfg: ExperimentConfig, budget_nodes=None) -> QueryOracle:
    nodes = cfg.budget_nodes if budget_nodes is None else budget_nodes
    return QueryOracle(g, nodes, cfg.budget_ms, LatencyModel(cfg.query_delay_ms, cfg.step_ms))


def _safe(fn, trace):
    try:
        return fn(trace)
    except EmptyTraceError:
        return None


def run_chain(g: LabeledGraph, cfg: ExperimentConfig, method: str, run: int,
              registries: dict[int, ClassRegistry]) -> ChainResult:
    """One independent chain with its own oracle and seed."""
    seed = chain_seed(cfg.seed, run)
    k = cfg.k
    if method == "psrw_split":
        return _run_psrw_split(g, cfg, run, registries, seed)
    oracle = _oracle(g, cfg)
    wc = WalkConfig(k=k, steps=cfg.steps, burn_in=cfg.burn_in, seed=seed,
                    method=method if method != "rand_esu" else "srw", lazy=cfg.lazy)
    if method == "srw":
        t = run_srw(oracle, g, wc, registries[k])
        est, n, trunc = {k: _safe(ht_node_estimate, t)}, len(t), t.truncated
    elif method == "psrw":
        t = run_psrw(oracle, g, wc, registries[k])
        est, n, trunc = {k: _safe(ht_edge_estimate, t)}, len(t), t.truncated
    elif method == "mhsrw":
        t = run_mhsrw(oracle, g, wc, registries[k])
        est, n, trunc = {k: _safe(plain_average, t)}, len(t), t.truncated
    elif method == "mss":
        ts = run_mss(oracle, g, wc, registries)
        est = {
            k - 1: _safe(ht_reduce_estimate, ts.reduce),
            k: _safe(ht_node_estimate, ts.node),
            k + 1: _safe(ht_edge_estimate, ts.pair),
        }
        n, trunc = len(ts.node), ts.node.truncated
    elif method == "guise":
        t = run_guise(oracle, g, wc, registries)
        est = {m: _safe(lambda tr, m=m: plain_average(tr, m), t) for m in GUISE_SIZES}
        n, trunc = len(t), t.truncated
    else:
        # steps caps the number of ESU roots for this baseline
        sample = rand_esu(oracle, g, k, cfg.rand_esu_probs, seed=seed, max_roots=cfg.steps)
        est = {k: rand_esu_estimate(sample, registries[k]) if sample.cises else None}
        n, trunc = len(sample.cises), sample.truncated
    return ChainResult(run, est, oracle.stats(), n, trunc)


def _run_psrw_split(g, cfg, run, registries, seed) -> ChainResult:
    """PSRW for sizes 3, 4 and 5 with the node budget split evenly."""
    est, n, trunc = {}, 0, False
    total_q = total_ms = hits = steps = 0
    per = None if cfg.budget_nodes is None else cfg.budget_nodes // len(GUISE_SIZES)
    per_steps = None if cfg.steps is None else max(cfg.steps // len(GUISE_SIZES), 2)
    for i, m in enumerate(GUISE_SIZES):
        oracle = _oracle(g, cfg, per)
        wc = WalkConfig(k=m, steps=per_steps, burn_in=cfg.burn_in, seed=chain_seed(seed, i), method="psrw")
        t = run_psrw(oracle, g, wc, registries[m])
        est[m] = _safe(ht_edge_estimate, t)
        n += len(t)
        trunc = trunc or t.truncated
        s = oracle.stats()
        total_q += s.distinct_queried
        total_ms += s.simulated_elapsed_ms
        hits += s.cache_hits
        steps += s.steps
    return ChainResult(run, est, OracleStats(total_q, total_ms, hits, steps), n, trunc)


# -- batches -----------------------------------------------------------------

_POOL_STATE: dict = {}


def _pool_job(args):
    method, run = args
    st = _POOL_STATE
    return run_chain(st["g"], st["cfg"], method, run, st["regs"])


def registries_for(cfg: ExperimentConfig, mode: str) -> dict[int, ClassRegistry]:
    sizes = sorted({m for meth in cfg.methods for m in method_sizes(meth, cfg.k)})
    return {m: build_registry(m, mode) for m in sizes}


def run_batch(g: LabeledGraph, cfg: ExperimentConfig, method: str,
              registries: dict[int, ClassRegistry]) -> list[ChainResult]:
    """``cfg.runs`` chains, returned in run order whatever the worker count."""
    workers = cfg.workers
    if workers > 1 and any(r.dynamic for r in registries.values()):
        log.warning("dynamic registries need a single process; ignoring workers=%d", workers)
        workers = 1
    if workers <= 1:
        return [run_chain(g, cfg, method, r, registries) for r in range(cfg.runs)]
    _POOL_STATE.update(g=g, cfg=cfg, regs=registries)
    ctx = mp.get_context("fork")
    with ctx.Pool(workers) as pool:
        out = pool.map(_pool_job, [(method, r) for r in range(cfg.runs)], chunksize=max(cfg.runs // (4 * workers), 1))
    return sorted(out, key=lambda c: c.run)


@dataclass
class SizeSummary:
    method: str
    size: int
    mean: dict[int, float]
    report: ErrorReport | None
    runs_used: int
    note: str = ""


def summarize(results: Sequence[ChainResult], method: str, size: int,
              registry: ClassRegistry, truth: ConcentrationVector | None) -> SizeSummary:
    ests = [r.estimates.get(size) for r in results]
    used = [e for e in ests if e is not None]
    note = ""
    if len(used) < len(ests):
        note = f"{len(ests) - len(used)} runs had no size-{size} samples"
    if not used:
        return SizeSummary(method, size, {}, None, 0, note or "no estimates")
    ids = sorted(set(registry.ids).union(*(e.values for e in used)))
    mean = {c: sum(e[c] for e in used) / len(used) for c in ids}
    report = None
    if truth is None:
        note = (note + "; " if note else "") + "no ground truth; errors omitted"
    elif len(used) >= 2:
        report = nrmse(used, truth)
    return SizeSummary(method, size, mean, report, len(used), note)


def truth_for(g: LabeledGraph, cfg: ExperimentConfig, registries) -> dict[int, ConcentrationVector | None]:
    out = {}
    for m, reg in registries.items():
        if cfg.truth is None:
            out[m] = None
            continue
        out[m] = cached_truth(cfg.truth, g, m, reg, compute=cfg.compute_truth)
    return out


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    graph: LabeledGraph
    registries: dict[int, ClassRegistry]
    truths: dict[int, ConcentrationVector | None]
    chains: dict[str, list[ChainResult]]
    summaries: dict[str, dict[int, SizeSummary]]


def run_experiment(cfg: ExperimentConfig, g: LabeledGraph | None = None) -> ExperimentResult:
    g = load_graph(cfg.graph, cfg.mode, cfg.lcc) if g is None else g
    regs = registries_for(cfg, g.mode)
    truths = truth_for(g, cfg, regs)
    chains, sums = {}, {}
    for method in cfg.methods:
        res = run_batch(g, cfg, method, regs)
        chains[method] = res
        sums[method] = {m: summarize(res, method, m, regs[m], truths[m]) for m in method_sizes(method, cfg.k)}
    return ExperimentResult(cfg, g, regs, truths, chains, sums)


# -- output ------------------------------------------------------------------


def _csv(rows: list[list]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def _fmt(x) -> str:
    return "" if x is None else repr(float(x))


def estimates_csv(res: ExperimentResult, method: str, size: int) -> str:
    reg = res.registries[size]
    rows = [["run", "class_id", "canonical_code", "estimate"]]
    for c in res.chains[method]:
        e = c.estimates.get(size)
        if e is None:
            continue
        for cid in e.ids:
            rows.append([c.run, cid, reg[cid].code_hex, _fmt(e[cid])])
    return _csv(rows)


def runs_csv(res: ExperimentResult, method: str) -> str:
    rows = [["run", "samples", "truncated", "distinct_queried", "simulated_elapsed_ms", "cache_hits", "steps"]]
    for c in res.chains[method]:
        s = c.stats
        rows.append([c.run, c.samples, int(c.truncated), s.distinct_queried, _fmt(s.simulated_elapsed_ms),
                     s.cache_hits, s.steps])
    return _csv(rows)


def summary_csv(res: ExperimentResult, method: str, size: int) -> str:
    s = res.summaries[method][size]
    reg = res.registries[size]
    truth = res.truths.get(size)
    rows = [["class_id", "canonical_code", "name", "mean_estimate", "truth", "nrmse"]]
    for cid in sorted(s.mean):
        nr = s.report.per_class.get(cid) if s.report else None
        rows.append([cid, reg[cid].code_hex, reg[cid].name, _fmt(s.mean[cid]),
                     _fmt(truth[cid]) if truth else "", _fmt(nr)])
    return _csv(rows)


def comparison_csv(res: ExperimentResult) -> tuple[str, str]:
    """(per-class NRMSE table, per-size RMSE table) across methods."""
    nr = [["method", "size", "class_id", "canonical_code", "nrmse"]]
    rm = [["method", "size", "rmse", "mean_nrmse", "runs"]]
    for method, by_size in res.summaries.items():
        for size, s in sorted(by_size.items()):
            if s.report is None:
                continue
            reg = res.registries[size]
            for cid, v in sorted(s.report.per_class.items()):
                nr.append([method, size, cid, reg[cid].code_hex, _fmt(v)])
            rm.append([method, size, _fmt(s.report.rmse), _fmt(s.report.mean_nrmse()), s.runs_used])
    return _csv(nr), _csv(rm)


def manifest(res: ExperimentResult, command: str) -> str:
    doc = {
        "command": command,
        "version": __version__,
        "config": asdict(res.config),
        "graph": {"nodes": res.graph.n, "edges": res.graph.edge_count, "mode": res.graph.mode,
                  "fingerprint": res.graph.fingerprint},
        "registries": {str(m): {"classes": len(r), "dynamic": r.dynamic} for m, r in res.registries.items()},
        "notes": {f"{meth}:k{m}": s.note for meth, d in res.summaries.items() for m, s in d.items() if s.note},
        "budget": {
            meth: {
                "mean_distinct_queried": sum(c.stats.distinct_queried for c in ch) / len(ch),
                "max_distinct_queried": max(c.stats.distinct_queried for c in ch),
                "truncated_runs": sum(c.truncated for c in ch),
            }
            for meth, ch in res.chains.items()
        },
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_outputs(res: ExperimentResult, command: str) -> list[Path]:
    if res.config.out is None:
        return []
    out = Path(res.config.out)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    def put(name, text):
        p = out / name
        p.write_text(text)
        written.append(p)

    for method, by_size in res.summaries.items():
        put(f"runs_{method}.csv", runs_csv(res, method))
        for size in by_size:
            put(f"estimates_{method}_k{size}.csv", estimates_csv(res, method, size))
            put(f"summary_{method}_k{size}.csv", summary_csv(res, method, size))
    if command == "compare":
        a, b = comparison_csv(res)
        put("compare_nrmse.csv", a)
        put("compare_rmse.csv", b)
    put("manifest.json", manifest(res, command))
    return written


def default_workers() -> int:
    return max(1, min(4, os.cpu_count() or 1))
