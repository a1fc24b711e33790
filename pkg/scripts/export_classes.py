"""Regenerate docs/classes.md: class ids, codes and drawings of the built-in registries."""

import argparse

from motifwalk.motifs import build_registry

TABLES = [(3, "undirected"), (4, "undirected"), (5, "undirected"), (3, "directed"), (3, "signed")]

INTRO = """# Subgraph classes

Class ids are stable: they are sorted by edge count, then by canonical key,
except that the directed 3-cycle is placed at id 7. The canonical code is
the label-digit string of the lexicographically smallest relabeling over
the row-major upper triangle. Digits: undirected 1 = edge; directed 1 = row
to column, 2 = column to row, 3 = both; signed 1 = positive, 2 = negative.
Drawings show the adjacency matrix with labels read from the row node.

Undirected k = 6 (112 classes) is built in as well; print it with
`python scripts/export_classes.py --k 6`.
"""


def section(k: int, mode: str) -> str:
    reg = build_registry(k, mode)
    lines = [f"## {mode}, k = {k} ({len(reg)} classes)", ""]
    for c in reg:
        lines.append(f"### {c.class_id}: {c.name} (code {c.code_hex}, {c.edge_count} edges)")
        lines += ["", "```", reg.drawing(c.class_id), "```", ""]
    return "\n".join(lines)


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="docs/classes.md")
    ap.add_argument("--k", type=int, help="print one undirected table to stdout instead")
    args = ap.parse_args(argv)
    if args.k:
        print(build_registry(args.k, "undirected").export_table())
        return
    with open(args.out, "w") as fh:
        fh.write(INTRO + "\n" + "\n".join(section(k, m) for k, m in TABLES))
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
