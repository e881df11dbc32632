"""``rdfindex`` command line: data generation, ingest, stats, index build, query and benchmarks."""
from __future__ import annotations

import argparse
import contextlib
import csv
import dataclasses
import json
import logging
import sys
from typing import List, Optional

from . import bench
from .indexes import FAMILIES, build_index, open_index
from .model import role_sets
from .ntriples import IngestConfig, ingest
from .pager import DEFAULT_BLOCK_SIZE, PagerError
from .query import eval_bgp
from .runfile import is_run_file, load_run, save_run
from .sparql import BGPSyntaxError, parse_bgp
from .synthetic import GenSpec, gen_synthetic

log = logging.getLogger("rdfindex")

UNMETERED_CACHE_BLOCKS = 1024


class UsageError(Exception):
    pass


def load_graph(path: str, atom_width: int):
    """Read a run file or an N-Triples file (``-`` for stdin) into a cleaned graph."""
    if path == "-":
        g, report, skipped = ingest(sys.stdin.buffer, IngestConfig(max_atom_len=atom_width))
        return g
    if is_run_file(path):
        return load_run(path)
    with open(path, "rb") as f:
        g, report, skipped = ingest(f, IngestConfig(max_atom_len=atom_width))
    if skipped:
        log.warning("%s: skipped %d malformed lines", path, skipped)
    return g


@contextlib.contextmanager
def _output(path: Optional[str]):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            yield f


def cmd_gen(args) -> int:
    g = gen_synthetic(GenSpec(args.n, args.variant, args.seed))
    count = save_run(args.output, g, args.atom_width)
    print(f"wrote {count} triples to {args.output}", file=sys.stderr)
    return 0


def cmd_ingest(args) -> int:
    cfg = IngestConfig(max_atom_len=args.atom_width, sample_size=args.sample, seed=args.seed)
    if args.input == "-":
        g, report, skipped = ingest(sys.stdin.buffer, cfg)
    else:
        with open(args.input, "rb") as f:
            g, report, skipped = ingest(f, cfg)
    save_run(args.output, g, args.atom_width)
    print(
        f"parsed={report.input_triples + skipped} skipped={skipped} truncated_atoms={report.truncated_atoms} "
        f"duplicates={report.duplicates} dropped_empty={report.dropped_empty} written={report.output_triples}",
        file=sys.stderr,
    )
    return 0


def cmd_stats(args) -> int:
    st = role_sets(load_graph(args.data, args.atom_width))
    fields = dataclasses.asdict(st)
    if args.json:
        print(json.dumps(fields))
    else:
        for k, v in fields.items():
            print(f"{k}\t{v:.2f}" if isinstance(v, float) else f"{k}\t{v}")
    return 0


def cmd_build(args) -> int:
    g = load_graph(args.data, args.atom_width)
    index = build_index(args.family, g, path=args.output, atom_width=args.atom_width, block_size=args.block_size)
    blocks = index.store.stats().allocated
    index.store.close()
    print(f"{args.family}: {len(g)} triples, {blocks} blocks of {args.block_size} bytes", file=sys.stderr)
    return 0


def cmd_query(args) -> int:
    if args.query is None:
        text = sys.stdin.read()
    else:
        with open(args.query, encoding="utf-8") as f:
            text = f.read()
    bgp, select = parse_bgp(text)
    cache = 0 if args.metered else UNMETERED_CACHE_BLOCKS
    index = open_index(args.index, cache_blocks=cache)
    try:
        res = eval_bgp(index, bgp, select)
    finally:
        index.store.close()
    out = csv.writer(sys.stdout, lineterminator="\n")
    if args.header:
        out.writerow(select)
    for row in sorted(res.bindings.rows):
        out.writerow([a.decode("utf-8", "backslashreplace") for a in row])
    if args.explain:
        if args.explain == "json":
            print(json.dumps({"reads": res.cost.reads, "plan": res.plan.root.to_dict()}, indent=2), file=sys.stderr)
        else:
            print(res.plan.render(), file=sys.stderr)
            print(f"total reads={res.cost.reads}", file=sys.stderr)
    return 0


def _parse_sizes(text: str) -> List[int]:
    try:
        sizes = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad --sizes {text!r}") from None
    if not sizes or any(n < 1 for n in sizes) or sizes != sorted(sizes):
        raise UsageError("--sizes must be ascending positive integers")
    return sizes


def cmd_bench(args) -> int:
    if not args.metered:
        raise UsageError("benchmarks always run metered")
    families = [f.strip() for f in args.families.split(",") if f.strip()]
    unknown = [f for f in families if f not in FAMILIES]
    if unknown or not families:
        raise UsageError(f"unknown families {unknown}; choose from {sorted(FAMILIES)}")
    sizes = _parse_sizes(args.sizes) if args.sizes else list(bench.DEFAULT_SIZES)
    source = None
    dataset = args.dataset
    if dataset not in ("synthetic", "synthetic1", "synthetic2"):
        source = load_graph(dataset, args.atom_width)
    cfg = bench.ExperimentConfig(
        dataset=dataset,
        sizes=sizes,
        trials=args.trials,
        seed=args.seed,
        families=families,
        atom_width=args.atom_width,
        block_size=args.block_size,
        source=source,
    )
    run = {"size": bench.run_size_experiment, "k0": bench.run_k0, "k1": bench.run_k1}[args.experiment]
    rows = run(cfg)
    with _output(args.output) as out:
        bench.write_csv(rows, out)
    return 0


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    # subcommands accept the global flags too; SUPPRESS keeps them from
    # overwriting values given before the subcommand name
    def d(value):
        return argparse.SUPPRESS if suppress else value

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=d(0))
    common.add_argument("--block-size", type=int, default=d(DEFAULT_BLOCK_SIZE))
    common.add_argument("--atom-width", type=int, default=d(64), help="maximum atom length in bytes")
    meter = common.add_mutually_exclusive_group()
    meter.add_argument("--metered", dest="metered", action="store_true", default=d(True),
                       help="count every block read with no cache (default)")
    meter.add_argument("--unmetered", dest="metered", action="store_false", default=d(True),
                       help="read through an LRU block cache")
    common.add_argument("-v", "--verbose", action="store_true", default=d(False))
    return common


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rdfindex", description=__doc__, parents=[_global_flags(False)])
    common = _global_flags(True)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("gen", parents=[common], help="write a synthetic graph as a run file")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--variant", type=int, choices=(1, 2), default=1)
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("ingest", parents=[common], help="N-Triples to canonical run file")
    s.add_argument("input", help="N-Triples file, or - for stdin")
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--sample", type=int, help="reservoir-sample this many triples")
    s.set_defaults(func=cmd_ingest)

    s = sub.add_parser("stats", parents=[common], help="triple and role-set counts")
    s.add_argument("data", help="run file or N-Triples file")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_stats)

    s = sub.add_parser("build", parents=[common], help="build an index file")
    s.add_argument("--family", choices=sorted(FAMILIES), required=True)
    s.add_argument("data", help="run file or N-Triples file")
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_build)

    s = sub.add_parser("query", parents=[common], help="evaluate a SELECT/WHERE pattern")
    s.add_argument("index")
    s.add_argument("query", nargs="?", help="query file (stdin when omitted)")
    s.add_argument("--explain", nargs="?", const="text", choices=("text", "json"),
                   help="print the plan with per-step reads to stderr")
    s.add_argument("--header", action="store_true", help="print the selected variable names first")
    s.set_defaults(func=cmd_query)

    s = sub.add_parser("bench", parents=[common], help="size, k0 or k1 experiment as CSV")
    s.add_argument("experiment", choices=("size", "k0", "k1"))
    s.add_argument("--dataset", default="synthetic1",
                   help="synthetic1, synthetic2, synthetic (both plus averages) or a data file")
    s.add_argument("--sizes", help="comma-separated ascending triple counts")
    s.add_argument("--trials", type=int, default=10)
    s.add_argument("--families", default=",".join(bench.DEFAULT_FAMILIES))
    s.add_argument("-o", "--output", help="CSV file (stdout by default)")
    s.set_defaults(func=cmd_bench)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"rdfindex: error: {e}", file=sys.stderr)
        return 2
    except (OSError, PagerError, BGPSyntaxError, ValueError) as e:
        print(f"rdfindex: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
