"""Dataset-scale checks: k=4 accuracy, error scaling, method ordering.

Each check takes a loaded graph plus its edge-list path, fills a ground-truth
cache directory as needed and returns a :class:`CheckResult`. The acceptance
suite runs them on Gnutella; ``scripts/dataset_checks.py`` runs them on any
edge list.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .enumeration import cached_truth
from .experiments import ExperimentConfig, run_experiment
from .graph import LabeledGraph
from .motifs import build_registry


@dataclass
class CheckResult:
    ok: bool
    detail: str
    seconds: float
    values: dict = field(default_factory=dict)


def _truths(g: LabeledGraph, truth_dir: str, sizes) -> dict:
    return {k: cached_truth(truth_dir, g, k, build_registry(k, g.mode), compute=True) for k in sizes}


def k4_accuracy(g: LabeledGraph, path: str, truth_dir: str, runs: int = 200, budget: int = 2000,
                seed: int = 5, threshold: float = 0.6, workers: int = 1) -> CheckResult:
    """PSRW at B* = ``budget``: NRMSE of the five most frequent 4-node classes."""
    t0 = time.perf_counter()
    truth = _truths(g, truth_dir, (4,))[4]
    cfg = ExperimentConfig(graph=path, k=4, methods=["psrw"], budget_nodes=budget, runs=runs, seed=seed,
                           truth=truth_dir, workers=workers)
    rep = run_experiment(cfg, g).summaries["psrw"][4].report
    top = sorted(truth.ids, key=lambda c: -truth[c])[:5]
    vals = {c: rep.per_class[c] for c in top}
    shown = " ".join(f"c{c}={v:.3f}" for c, v in vals.items())
    return CheckResult(all(v < threshold for v in vals.values()),
                       f"PSRW B*={budget} x{runs} NRMSE of top-5 classes: {shown}",
                       time.perf_counter() - t0, vals)


def error_scaling(g: LabeledGraph, path: str, truth_dir: str, runs: int = 200, budgets=(1000, 10_000),
                  seed: int = 6, bounds=(2.0, 5.0), workers: int = 1) -> CheckResult:
    """Triangle NRMSE ratio between the two step budgets (target sqrt(10))."""
    t0 = time.perf_counter()
    _truths(g, truth_dir, (3,))
    err = {}
    for b in budgets:
        cfg = ExperimentConfig(graph=path, k=3, methods=["psrw"], steps=b, runs=runs, seed=seed,
                               truth=truth_dir, workers=workers)
        err[b] = run_experiment(cfg, g).summaries["psrw"][3].report.per_class[2]
    lo, hi = budgets
    ratio = err[lo] / err[hi]
    return CheckResult(bounds[0] <= ratio <= bounds[1],
                       f"triangle NRMSE {err[lo]:.4f} at B={lo} -> {err[hi]:.4f} at B={hi}, ratio {ratio:.2f}",
                       time.perf_counter() - t0, {"nrmse": err, "ratio": ratio})


def method_ordering(g: LabeledGraph, path: str, truth_dir: str, runs: int = 200, budget3: int = 2000,
                    budget_mix: int = 3000, seed: int = 7, workers: int = 1) -> CheckResult:
    """PSRW < SRW < MHSRW in mean NRMSE (k=3); MSS k=4 beats GUISE in RMSE per size."""
    t0 = time.perf_counter()
    _truths(g, truth_dir, (3, 4, 5))
    cfg = ExperimentConfig(graph=path, k=3, methods=["psrw", "srw", "mhsrw"], budget_nodes=budget3,
                           runs=runs, seed=seed, truth=truth_dir, workers=workers)
    s = run_experiment(cfg, g).summaries
    mean = {m: s[m][3].report.mean_nrmse() for m in ("psrw", "srw", "mhsrw")}
    cfg = ExperimentConfig(graph=path, k=4, methods=["mss", "guise"], budget_nodes=budget_mix, runs=runs,
                           seed=seed, truth=truth_dir, workers=workers)
    s = run_experiment(cfg, g).summaries
    rmse = {m: (s["mss"][m].report.rmse, s["guise"][m].report.rmse) for m in (3, 4, 5)}
    ok = mean["psrw"] < mean["srw"] < mean["mhsrw"] and all(a < b for a, b in rmse.values())
    shown = " ".join(f"k{m}: mss {a:.4f} vs guise {b:.4f}" for m, (a, b) in rmse.items())
    detail = (f"mean NRMSE psrw {mean['psrw']:.4f} srw {mean['srw']:.4f} mhsrw {mean['mhsrw']:.4f}; "
              f"RMSE {shown}")
    return CheckResult(ok, detail, time.perf_counter() - t0, {"mean_nrmse": mean, "rmse": rmse})
