"""Run the dataset-scale checks (k=4 accuracy, error scaling, method ordering) on an edge list.

    python scripts/dataset_checks.py --graph data/p2p-Gnutella08.txt
    python scripts/dataset_checks.py --graph data/surrogate-gnutella.txt --checks ordering
"""

import argparse
import json

from motifwalk.benchmarks import error_scaling, k4_accuracy, method_ordering
from motifwalk.experiments import default_workers, load_graph

CHECKS = {"accuracy": k4_accuracy, "scaling": error_scaling, "ordering": method_ordering}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--graph", required=True)
    ap.add_argument("--checks", nargs="+", choices=sorted(CHECKS), default=["accuracy", "scaling", "ordering"])
    ap.add_argument("--runs", type=int, default=200)
    ap.add_argument("--truth", default="data/truth")
    ap.add_argument("--workers", type=int, default=default_workers())
    ap.add_argument("--json", help="also write the raw values here")
    args = ap.parse_args(argv)
    g = load_graph(args.graph)
    print(f"{args.graph}: LCC {g.n} nodes, {g.edge_count} edges")
    raw, failed = {}, 0
    for name in args.checks:
        res = CHECKS[name](g, args.graph, args.truth, runs=args.runs, workers=args.workers)
        failed += not res.ok
        print(f"{name}: {'PASS' if res.ok else 'FAIL'}  {res.detail} ({res.seconds:.0f}s)", flush=True)
        raw[name] = {"ok": res.ok, "detail": res.detail, "seconds": res.seconds}
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(raw, fh, indent=2, sort_keys=True)
    return 1 if failed else 0


if __name__ == "__main__":
    raise SystemExit(main())
