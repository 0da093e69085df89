"""Command-line front end.

Commands: analyze one input document, compare methods over a corpus,
generate random corpora, run the exhaustive oracle, and dump computed
ages.  Exit codes: 0 ok, 2 malformed input, 3 infeasible configuration,
4 soundness violation detected in oracle mode.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import doc as docio
from . import gen, system
from .doc import InputError
from .intra import INF, compute_intra_state
from .model import ModelError
from .oracle import InstanceTooLarge, OracleLimits

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CONFIG = 3
EXIT_UNSOUND = 4


def _penalty_mode(value):
    if value in ("upgrade", "full"):
        return value
    try:
        return int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"penalty mode must be 'upgrade', 'full' or cycles, got {value!r}")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cachebound",
        description="Static bounds on inter-core shared-cache contention "
                    "and the resulting WCET.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--methods", default="proposed,zhang,liang",
                       help="comma-separated: proposed, zhang, liang")
        p.add_argument("--penalty-mode", type=_penalty_mode, default="upgrade",
                       help="'upgrade' (miss minus shared hit), 'full', or cycles")
        p.add_argument("--coarsen", action="store_true",
                       help="merge each remote task into a single region")
        p.add_argument("--oracle-max-accesses", type=int, default=14)
        p.add_argument("--oracle-samples", type=int, default=200)
        p.add_argument("--seed", type=int, default=0,
                       help="rng seed for oracle sampling fallback")

    p = sub.add_parser("analyze", help="analyze one input document")
    p.add_argument("input", type=Path)
    common(p)
    p.add_argument("--oracle", action="store_true",
                   help="also run the exhaustive oracle and verdicts")
    p.add_argument("--json", type=Path, help="write machine-readable results")
    p.add_argument("--report", type=Path, help="write the text report")
    p.add_argument("--timestamp", action="store_true",
                   help="include a generation timestamp in the JSON results")

    p = sub.add_parser("oracle", help="exhaustive worst case for one document")
    p.add_argument("input", type=Path)
    common(p)
    p.add_argument("--json", type=Path)

    p = sub.add_parser("compare", help="compare methods over a corpus")
    p.add_argument("inputs", type=Path, nargs="?",
                   help="directory of input documents")
    common(p)
    p.add_argument("--gen", type=int, metavar="N",
                   help="generate N random instances instead of reading a directory")
    p.add_argument("--budget", type=int, default=12,
                   help="unrolled access budget for generated instances")
    p.add_argument("--oracle", action="store_true")
    p.add_argument("--csv", type=Path, help="write the comparison table")
    p.add_argument("--jobs", type=int, default=1,
                   help="parallel workers over instances")

    p = sub.add_parser("gen", help="write random input documents")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--budget", type=int, default=12)

    p = sub.add_parser("ages", help="dump computed ages for every task")
    p.add_argument("input", type=Path)
    return parser


def _methods(args):
    methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
    for m in methods:
        if m not in ("proposed", "zhang", "liang"):
            raise InputError(f"unknown method {m!r}")
    return methods


def _analyze_document(document, args, run_oracle):
    limits = OracleLimits(max_accesses=args.oracle_max_accesses,
                          samples=args.oracle_samples)
    return system.analyze(
        document.task(document.analyzed),
        document.remote_cores(),
        document.cache,
        methods=_methods(args),
        penalty_mode=args.penalty_mode,
        coarsen=args.coarsen,
        intra_wcet=document.intra_wcet.get(document.analyzed),
        run_oracle=run_oracle,
        oracle_limits=limits,
        rng=random.Random(args.seed),
    )


def results_dict(report: system.AnalysisReport, timestamp=False) -> dict:
    out = {
        "task": report.task,
        "intra_wcet": report.intra_wcet,
        "penalty_per_level": {str(k): v for k, v in report.penalty.items()},
        "methods": {
            name: {
                "misses": res.misses,
                "interference_cycles": res.interference_cycles,
                "wcet": res.wcet,
                "detail": _jsonable(res.detail),
            }
            for name, res in report.methods.items()
        },
    }
    if report.oracle is not None:
        out["oracle"] = _jsonable(report.oracle)
    if timestamp:
        out["generated_at"] = time.strftime("%Y-%m-%dT%H:%M:%S")
    return out


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if value == INF:
        return "inf"
    return value


def render_report(report: system.AnalysisReport) -> str:
    lines = [f"task under analysis: {report.task}",
             f"intra-core WCET:     {report.intra_wcet} cycles"]
    for level, pen in sorted(report.penalty.items()):
        lines.append(f"miss penalty (L{level}): {pen} cycles")
    lines.append("")
    lines.append(f"{'method':<10} {'misses':>8} {'interference':>13} {'WCET':>10}")
    for name, res in report.methods.items():
        lines.append(f"{name:<10} {res.misses:>8} "
                     f"{res.interference_cycles:>13} {res.wcet:>10}")
    if report.oracle is not None:
        o = report.oracle
        kind = "exact" if o["exact"] else "sampled lower bound"
        lines.append("")
        lines.append(f"oracle ({kind}): {o['misses']} misses")
        for name, verdict in sorted(o["verdicts"].items()):
            lines.append(f"  {name}: {verdict}")
    proposed = report.methods.get("proposed")
    if proposed and proposed.detail:
        witnesses = [d.get("witness") for d in proposed.detail.values()
                     if isinstance(d, dict)]
        steps = [w for ws in witnesses if ws for w in ws]
        if steps:
            lines.append("")
            lines.append("interference witness (proposed):")
            for w in steps:
                for st in w["steps"]:
                    if st["segment"] and st["misses"]:
                        lines.append(
                            f"  set {w['set']}: CR {st['cr']} (regions "
                            f"{st['span'][0]}..{st['span'][1]}) takes "
                            f"{st['misses']} misses from remote regions "
                            f"{st['segment'][0]}..{st['segment'][1]}")
    lines.append("")
    return "\n".join(lines)


def cmd_analyze(args, oracle_only=False):
    document = docio.load_document(args.input)
    report = _analyze_document(document, args,
                               run_oracle=oracle_only or args.oracle)
    text = render_report(report)
    if not oracle_only and args.report:
        args.report.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if args.json:
        payload = results_dict(report,
                               timestamp=getattr(args, "timestamp", False))
        args.json.write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n",
            encoding="utf-8")
    if report.oracle is not None:
        if any(v == "VIOLATION" for v in report.oracle["verdicts"].values()):
            return EXIT_UNSOUND
    return EXIT_OK


def _compare_one(name, document, args):
    report = _analyze_document(document, args, run_oracle=args.oracle)
    row = {"instance": name}
    for method in ("proposed", "zhang", "liang"):
        res = report.methods.get(method)
        row[method] = res.misses if res else ""
    for base in ("zhang", "liang"):
        if base in report.methods and "proposed" in report.methods:
            p = report.methods["proposed"].misses
            b = report.methods[base].misses
            row[f"proposed/{base}"] = 1.0 if p == b == 0 else (
                round(p / b, 4) if b else "")
    if report.oracle is not None:
        row["oracle"] = report.oracle["misses"]
        row["sound"] = all(v != "VIOLATION"
                           for v in report.oracle["verdicts"].values())
    return row


def cmd_compare(args):
    if args.gen is not None:
        instances = [(f"gen-{args.seed + i:05d}",
                      gen.random_document(args.seed + i, budget=args.budget))
                     for i in range(args.gen)]
    else:
        if args.inputs is None:
            raise InputError("compare needs a directory or --gen N")
        paths = sorted(args.inputs.glob("*.json"))
        if not paths:
            raise InputError(f"no .json documents under {args.inputs}")
        instances = []
        for path in paths:
            try:
                instances.append((path.name, docio.load_document(path)))
            except InputError as exc:
                print(f"skipping {path.name}: {exc}", file=sys.stderr)

    def run(item):
        name, document = item
        return _compare_one(name, document, args)

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(run, instances))
    else:
        rows = [run(item) for item in instances]

    fields = ["instance", "proposed", "zhang", "liang",
              "proposed/zhang", "proposed/liang"]
    if args.oracle:
        fields += ["oracle", "sound"]
    mean_row = {"instance": "mean"}
    for ratio in ("proposed/zhang", "proposed/liang"):
        values = [r[ratio] for r in rows if isinstance(r.get(ratio), float)]
        mean_row[ratio] = round(sum(values) / len(values), 4) if values else ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    writer.writerow(mean_row)
    if args.csv:
        args.csv.write_text(buf.getvalue(), encoding="utf-8")
    else:
        sys.stdout.write(buf.getvalue())
    if args.oracle and any(r.get("sound") is False for r in rows):
        return EXIT_UNSOUND
    return EXIT_OK


def cmd_gen(args):
    if args.count < 1:
        raise InputError("--count must be positive")
    args.out.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        seed = args.seed + i
        document = gen.random_document(seed, budget=args.budget)
        docio.dump_document(document, args.out / f"gen-{seed:05d}.json")
    print(f"wrote {args.count} documents to {args.out}")
    return EXIT_OK


def cmd_ages(args):
    document = docio.load_document(args.input)
    for task in document.tasks:
        for pi, path in enumerate(task.paths):
            age_map, cac = compute_intra_state(path, document.cache,
                                               task.age_overrides)
            print(f"task {task.name} path {pi}")
            for (bid, level), age in sorted(age_map.program.items()):
                block = path.block(bid)
                tag = "always-hit" if cac.is_always_hit(bid, level) else "may-access"
                print(f"  L{level} {bid} @{block.address}: program age "
                      f"{age}  [{tag}]")
            for (bid, region, level), age in sorted(age_map.region.items()):
                print(f"  L{level} {bid} region {region}: age {age}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "analyze": cmd_analyze,
        "oracle": lambda a: cmd_analyze(a, oracle_only=True),
        "compare": cmd_compare,
        "gen": cmd_gen,
        "ages": cmd_ages,
    }
    try:
        return handlers[args.command](args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InstanceTooLarge as exc:
        print(f"oracle error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ModelError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
