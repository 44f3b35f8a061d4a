"""Command line: ``sparsejt triangulate | query | bench``.

Exit codes: 0 success, 2 parse/validation error, 3 impossible evidence,
4 capacity error.
"""

from __future__ import annotations

import argparse
import csv
import sys
from decimal import ROUND_HALF_UP, Decimal, localcontext
from typing import Sequence

from . import bench
from .errors import (CapacityError, DomainError, ImpossibleEvidenceError, NetworkError,
                     NormalizationError, PhaseError)
from .graph import HEURISTICS, moralize, statespace_report, triangulate
from .inference import compile_network, propagate, prob_of_evidence, query_joint, query_marginal
from .io import load_network, parse_evidence

EXIT_OK, EXIT_INVALID, EXIT_IMPOSSIBLE, EXIT_CAPACITY = 0, 2, 3, 4


def fmt_prob(p: float, digits: int = 4) -> str:
    """``digits`` significant digits, half-up, after stripping float noise."""
    if p == 0:
        return "0"
    with localcontext() as ctx:
        ctx.rounding = ROUND_HALF_UP
        d = Decimal(f"{p:.12g}")
        q = Decimal(1).scaleb(d.adjusted() - digits + 1)
        return format(d.quantize(q).normalize(), "f")


def cmd_triangulate(args, out) -> int:
    spec = load_network(args.network)
    sizes = dict(zip(spec.domain.labels, spec.domain.sizes))
    tri = triangulate(moralize(spec.dag), sizes, args.tri)
    rows = statespace_report(tri, args.top)
    total_cells = sum(r[1] for r in rows)
    total_bytes = sum(r[2] for r in rows)
    if args.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["rank", "clique", "n_vars", "cells", "bytes"])
        for rank, (clique, cells, nbytes) in enumerate(rows, 1):
            w.writerow([rank, " ".join(clique), len(clique), cells, nbytes])
        w.writerow(["total", "", "", total_cells, total_bytes])
        w.writerow(["fill_edges", "", "", len(tri.fill_edges), ""])
        return EXIT_OK
    sizes_ = [len(c) for c in tri.cliques]
    print(f"heuristic: {args.tri}", file=out)
    print(f"cliques: {len(tri.cliques)} (max size {max(sizes_)}, min size {min(sizes_)})", file=out)
    print(f"fill edges: {len(tri.fill_edges)}", file=out)
    print(f"top {len(rows)} cliques by dense state space:", file=out)
    for rank, (clique, cells, nbytes) in enumerate(rows, 1):
        print(f"  {rank}. {{{', '.join(clique)}}} cells={cells} bytes={nbytes}", file=out)
    print(f"total: cells={total_cells} bytes={total_bytes} ({total_bytes / 1e9:.2f} GB)", file=out)
    return EXIT_OK


def cmd_query(args, out) -> int:
    spec = load_network(args.network)
    ev = parse_evidence(args.evidence)
    nodes = [n.strip() for n in args.nodes.split(",") if n.strip()]
    if not nodes:
        raise ValueError("no query nodes given")
    for n in nodes:
        spec.domain.index(n)
    state = compile_network(spec, ev, heuristic=args.tri, root_node=args.root_node)
    propagate(state, "collect" if args.collect_only else "full")
    pe = prob_of_evidence(state)
    csv_out = args.format == "csv"
    w = csv.writer(out, lineterminator="\n") if csv_out else None
    if args.type == "marginal":
        res = query_marginal(state, nodes)
        if csv_out:
            w.writerow(["node", "state", "probability"])
            for n, dist in res.items():
                for st, p in dist.items():
                    w.writerow([n, st, repr(p)])
        else:
            for n, dist in res.items():
                print(f"{n}: " + ", ".join(f"{st} {fmt_prob(p)}" for st, p in dist.items()),
                      file=out)
    else:
        joint = query_joint(state, nodes)
        dom = joint.domain
        if csv_out:
            w.writerow(list(nodes) + ["probability"])
        else:
            print(f"joint({', '.join(nodes)}):", file=out)
        for j in range(joint.ncells):
            names = [dom.state(l, int(joint.cells[i, j])) for i, l in enumerate(dom.labels)]
            if csv_out:
                w.writerow(names + [repr(float(joint.vals[j]))])
            else:
                cell = " ".join(f"{l}={s}" for l, s in zip(dom.labels, names))
                print(f"  {cell}: {fmt_prob(joint.vals[j])}", file=out)
    if csv_out:
        w.writerow(["p_evidence", "", repr(pe)])
    else:
        print(f"p(evidence): {fmt_prob(pe)}", file=out)
    return EXIT_OK


def _band(text: str) -> tuple[float, float]:
    lo, sep, hi = text.partition(":")
    if not sep:
        raise argparse.ArgumentTypeError(f"band must look like lo:hi, got {text!r}")
    return float(lo), float(hi)


def cmd_bench(args, out) -> int:
    bands = args.band or list(bench.DEFAULT_BANDS)
    cfg = bench.BenchConfig(max_product_cells=int(args.max_cells), sparsity_bands=bands,
                            reps=args.reps, seed=args.seed)
    records = bench.run_bench(cfg)
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            bench.write_records(records, fh)
    else:
        bench.write_records(records, out)
    if args.memory_model_out:
        with open(args.memory_model_out, "w", newline="", encoding="utf-8") as fh:
            bench.write_model(bench.memory_model_rows(), fh)
    if args.out:
        print("op,impl,n,median_seconds,median_bytes", file=out)
        for s in bench.summarize(records):
            print(f"{s['op']},{s['impl']},{s['n']},{s['median_seconds']!r},{s['median_bytes']}",
                  file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sparsejt", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("triangulate", help="report clique state spaces of a triangulation")
    t.add_argument("--network", required=True)
    t.add_argument("--tri", choices=HEURISTICS, default="min_fill")
    t.add_argument("--top", type=int, default=5)
    t.add_argument("--format", choices=("text", "csv"), default="text")
    t.set_defaults(func=cmd_triangulate)

    q = sub.add_parser("query", help="compile, propagate and query a network")
    q.add_argument("--network", required=True)
    q.add_argument("--tri", choices=HEURISTICS, default="min_fill")
    q.add_argument("--evidence", nargs="*", default=[], metavar="VAR=STATE")
    q.add_argument("--nodes", required=True, help="comma-separated variable names")
    q.add_argument("--type", choices=("marginal", "joint"), default="marginal")
    q.add_argument("--root-node")
    q.add_argument("--collect-only", action="store_true")
    q.add_argument("--format", choices=("text", "csv"), default="text")
    q.set_defaults(func=cmd_query)

    b = sub.add_parser("bench", help="sparse vs dense multiplication/marginalization timings")
    b.add_argument("--max-cells", type=float, default=1e6)
    b.add_argument("--band", type=_band, action="append", metavar="LO:HI")
    b.add_argument("--reps", type=int, default=3)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out")
    b.add_argument("--memory-model-out")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except ImpossibleEvidenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IMPOSSIBLE
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (NetworkError, DomainError, NormalizationError, PhaseError,
            ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
