"""Command-line entry point: ``motifwalk {enumerate,sample,compare,zscore,fixture}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from . import __version__
from .enumeration import (
    EnumerationGuardError,
    concentrations_from_counts,
    exact_class_counts,
    truth_path,
    write_truth,
)
from .estimators import ht_edge_estimate
from .experiments import (
    ALL_METHODS,
    ExperimentConfig,
    load_graph,
    run_experiment,
    write_outputs,
)
from .fixtures import NAMED
from .graph import MODES, write_edge_list
from .motifs import build_registry
from .nullmodel import (
    degree_sequence_from,
    estimate_joint_degree_dist,
    exact_joint_degree_dist,
    z_scores,
)
from .oracle import QueryOracle
from .walkers import WalkConfig, chain_seed, run_psrw

log = logging.getLogger("motifwalk")


def _common(p: argparse.ArgumentParser, graph_required: bool = True) -> None:
    p.add_argument("--graph", required=graph_required, help="edge list path (.gz ok) or fixture:<name>")
    p.add_argument("--mode", choices=MODES, default="undirected")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output directory")
    p.add_argument("--no-lcc", action="store_true", help="keep the whole graph instead of its LCC")


def _budget(p: argparse.ArgumentParser) -> None:
    p.add_argument("--steps", type=int, help="samples per chain (B)")
    p.add_argument("--budget-nodes", type=int, help="distinct queried nodes per chain (B*)")
    p.add_argument("--budget-ms", type=float, help="simulated time per chain (T)")
    p.add_argument("--query-delay-ms", type=float, default=0.0)
    p.add_argument("--step-ms", type=float, default=0.0, help="simulated compute time per walk step")
    p.add_argument("--runs", type=int, default=200)
    p.add_argument("--burn-in", type=int, default=0)
    p.add_argument("--lazy", action="store_true", help="lazy walk (for bipartite CIS graphs)")
    p.add_argument("--truth", help="ground-truth cache directory")
    p.add_argument("--compute-truth", action="store_true", help="enumerate missing ground truth")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--rand-esu-probs", type=float, nargs="+", help="per-depth survival probabilities")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="motifwalk", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="exact class counts by ESU, cached as ground truth")
    _common(p)
    p.add_argument("--sizes", type=int, nargs="+", help="several k at once (overrides --k)")
    p.add_argument("--truth", help="cache directory (default: --out)")

    p = sub.add_parser("sample", help="independent chains of one method")
    _common(p)
    _budget(p)
    p.add_argument("--method", choices=ALL_METHODS, default="psrw")

    p = sub.add_parser("compare", help="several methods under the same budget")
    _common(p)
    _budget(p)
    p.add_argument("--method", dest="methods", choices=ALL_METHODS, nargs="+", required=True)

    p = sub.add_parser("zscore", help="Z-scores against configuration-model null graphs")
    _common(p)
    p.add_argument("--n-random", type=int, default=100)
    p.add_argument("--phi-steps", type=int, default=0,
                   help="random-walk steps for the joint degree estimate (0: exact degree sequence)")
    p.add_argument("--omega-steps", type=int, default=0, help="PSRW steps for omega (0: exact enumeration)")
    p.add_argument("--null-method", choices=("auto", "exact", "psrw"), default="auto")
    p.add_argument("--null-steps", type=int, default=20_000)

    p = sub.add_parser("fixture", help="write the built-in test graphs as edge lists")
    p.add_argument("--out", required=True)
    p.add_argument("--name", choices=sorted(NAMED), nargs="*")
    return ap


def _config(args, methods) -> ExperimentConfig:
    return ExperimentConfig(
        graph=args.graph, k=args.k, methods=methods, mode=args.mode, steps=args.steps,
        budget_nodes=args.budget_nodes, budget_ms=args.budget_ms, query_delay_ms=args.query_delay_ms,
        step_ms=args.step_ms, runs=args.runs, seed=args.seed, burn_in=args.burn_in,
        lcc=not args.no_lcc, lazy=args.lazy, out=args.out, truth=args.truth,
        compute_truth=args.compute_truth, workers=args.workers, rand_esu_probs=args.rand_esu_probs,
    )


def cmd_enumerate(args) -> int:
    g = load_graph(args.graph, args.mode, not args.no_lcc)
    cache = args.truth or args.out
    for k in args.sizes or [args.k]:
        reg = build_registry(k, g.mode)
        t0 = time.perf_counter()
        counts = exact_class_counts(g, k, reg)
        dt = time.perf_counter() - t0
        omega = concentrations_from_counts(counts, k, g.mode)
        print(f"k={k} {g.mode}: {omega.total_samples_used} CISes in {dt:.2f}s")
        for cid in sorted(counts):
            print(f"  {cid:3d} {reg[cid].name:28s} {counts[cid]:>14d} {omega[cid]:.6f}")
        if cache:
            path = truth_path(cache, g, k)
            write_truth(path, g, k, counts, reg)
            print(f"  cached in {path}")
    return 0


def cmd_sample(args, command="sample") -> int:
    methods = [args.method] if command == "sample" else args.methods
    cfg = _config(args, methods)
    res = run_experiment(cfg)
    for method, by_size in res.summaries.items():
        for size, s in sorted(by_size.items()):
            line = f"{method} k={size}: {s.runs_used} runs"
            if s.report is not None:
                line += f", RMSE {s.report.rmse:.4f}, mean NRMSE {s.report.mean_nrmse():.4f}"
            if s.note:
                line += f" ({s.note})"
            print(line)
    for p in write_outputs(res, command):
        log.info("wrote %s", p)
    return 0


def cmd_zscore(args) -> int:
    g = load_graph(args.graph, args.mode, not args.no_lcc)
    k = args.k
    reg = build_registry(k, g.mode)
    if args.omega_steps:
        wc = WalkConfig(k=k, steps=args.omega_steps, seed=chain_seed(args.seed, 0), method="psrw")
        omega = ht_edge_estimate(run_psrw(QueryOracle(g), g, wc, reg))
    else:
        omega = concentrations_from_counts(exact_class_counts(g, k, reg), k, g.mode)
    if args.phi_steps:
        source = estimate_joint_degree_dist(QueryOracle(g), g, args.phi_steps, chain_seed(args.seed, 1))
        pos = source.positive_fraction
    else:
        source = degree_sequence_from(g)
        pos = exact_joint_degree_dist(g).positive_fraction
    report = z_scores(omega, source, args.n_random, k, reg, seed=args.seed, n=g.n,
                      method=args.null_method, psrw_steps=args.null_steps, positive_fraction=pos)
    for r in report.rows:
        z = "undefined" if r.z is None else f"{r.z:+.3f}"
        print(f"{r.class_id:3d} {reg[r.class_id].name:24s} omega={r.omega:.5f} mu={r.mu:.5f} sigma={r.sigma:.5f} Z={z}")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "zscore.csv", "w") as fh:
            report.write_csv(fh)
        doc = {"command": "zscore", "version": __version__,
               "args": {k_: v for k_, v in sorted(vars(args).items()) if k_ != "func"},
               "graph": {"nodes": g.n, "edges": g.edge_count, "fingerprint": g.fingerprint},
               "null_method": report.method}
        (out / "manifest.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_fixture(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name in args.name or sorted(NAMED):
        g = NAMED[name]()
        with open(out / f"{name}.txt", "w") as fh:
            write_edge_list(g, fh)
        print(f"{name}: {g.n} nodes, {g.edge_count} edges")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.command == "enumerate":
            return cmd_enumerate(args)
        if args.command in ("sample", "compare"):
            return cmd_sample(args, args.command)
        if args.command == "zscore":
            return cmd_zscore(args)
        return cmd_fixture(args)
    except (ValueError, EnumerationGuardError, OSError) as exc:
        print(f"motifwalk: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
