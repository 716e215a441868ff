"""Command-line driver: `python -m spinfer {infer,far,verify,metrics,gen}`."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from spinfer.emit import SchemaError, emit_contract, emit_json, emit_tr, load_json
from spinfer.far import LEXICAL, far
from spinfer.generate import random_method_source
from spinfer.lang import ParseError, TypeCheckError
from spinfer.oracle import satisfies
from spinfer.passive import passivize
from spinfer.pipeline import Options, Status, infer_method, load_program
from spinfer.refine import FrameInfo, VacuousSpecification, dedupe_cases, prune_unsat, strip_trivial
from spinfer.spec import flatten, from_cases, is_snf

SOURCE_SUFFIX = ".imp"
CSV_COLUMNS = ("method", "length_before", "length_after", "nesting_before", "nesting_after",
               "length_reduction", "nesting_reduction")


def _sources(paths) -> list:
    out = []
    for p in map(Path, paths):
        if p.is_dir():
            out += sorted(p.rglob(f"*{SOURCE_SUFFIX}"))
        else:
            out.append(p)
    return out


def _options(args) -> Options:
    return Options(
        far=not args.no_far,
        simplify=not args.no_simplify,
        deep_prune=args.deep_prune,
        timeout_ms=args.timeout_ms,
        max_cfg=args.max_cfg,
        domain_bound=args.domain_bound,
        precondition=args.precondition,
    )


def _run_file(task):
    path, source, opts = task
    try:
        program = load_program(source)
    except (ParseError, TypeCheckError) as err:
        return path, None, [("*", Status.ERROR, f"{type(err).__name__}: {err}", None)]
    rows = []
    for m in program.methods:
        r = infer_method(program, m, opts)
        rows.append((m.name, r.status, r.message, r))
    return path, program, rows


def _infer_all(paths, opts: Options, jobs: int):
    """[(path, program, [(method, status, message, result)])] in input order."""
    tasks = [(str(p), p.read_text(), opts) for p in _sources(paths)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_file, tasks))
    return [_run_file(t) for t in tasks]


def _render(r, fmt: str) -> str:
    if fmt == "json":
        return emit_json(r.spec, method=r.method, frame=r.frame)
    if fmt == "post":
        return emit_tr(r.spec) + "\n"
    return r.contract


_EXT = {"jml": ".spec", "post": ".post", "json": ".json"}


def _append_telemetry(path, records):
    if not path:
        return
    with open(path, "a", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def cmd_infer(args) -> int:
    opts = _options(args)
    errors = 0
    records = []
    out_dir = Path(args.out) if args.out else None
    for path, program, rows in _infer_all(args.paths, opts, args.jobs):
        for name, status, message, r in rows:
            if status is Status.ERROR:
                errors += 1
            if status is not Status.INFERRED:
                print(f"{path}::{name}: {status}: {message}", file=sys.stderr)
            rec = r.telemetry() if r is not None else {"method": name, "status": str(status), "message": message}
            rec["file"] = path
            records.append(rec)
            if r is None or status is not Status.INFERRED:
                continue
            if args.dump == "snf":
                text = emit_json(r.snf, method=name)
            elif args.dump == "passive":
                text = passivize(program.method(name), program).render() + "\n"
            else:
                text = _render(r, args.format)
            if out_dir is not None:
                target = out_dir / Path(path).stem / f"{name}{_EXT[args.format] if not args.dump else '.' + args.dump}"
                target.parent.mkdir(parents=True, exist_ok=True)
                target.write_text(text)
            else:
                sys.stdout.write(f"// {path}::{name}\n{text}")
    _append_telemetry(args.telemetry, records)
    return 1 if errors else 0


def cmd_far(args) -> int:
    try:
        doc = load_json(Path(args.file).read_text())
    except (SchemaError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    spec = doc["spec"]
    if not is_snf(spec):
        spec = from_cases(flatten(spec))
    try:
        if not args.no_simplify:
            spec = dedupe_cases(prune_unsat(strip_trivial(spec), deep=args.deep_prune,
                                            bound=args.domain_bound))
        if not args.no_far:
            spec = far(spec, LEXICAL)
            if not args.no_simplify:
                spec = dedupe_cases(spec)
    except VacuousSpecification as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    frame = doc["frame"] or FrameInfo()
    if args.format == "json":
        text = emit_json(spec, method=doc["method"], frame=doc["frame"])
    elif args.format == "post":
        text = emit_tr(spec) + "\n"
    else:
        text = emit_contract(spec, frame)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_verify(args) -> int:
    opts = _options(args)
    failures = 0
    for path, program, rows in _infer_all(args.paths, opts, args.jobs):
        for name, status, message, r in rows:
            if status is not Status.INFERRED:
                print(f"SKIP {path}::{name} ({status}: {message})")
                failures += status is Status.ERROR
                continue
            res = satisfies(program.method(name), r.spec, program, bound=args.domain_bound, fuel=args.fuel)
            if res.ok:
                print(f"PASS {path}::{name} (states {res.checked}, excluded {res.excluded})")
            else:
                failures += 1
                print(f"FAIL {path}::{name} counterexample {json.dumps(res.counterexample, sort_keys=True)}")
    return 1 if failures else 0


def _pct(before: float, after: float) -> str:
    return f"{100.0 * (1.0 - after / before):.1f}" if before else "0.0"


def metrics_csv(results) -> str:
    """CSV over (label, InferenceResult) pairs of inferred methods, plus an
    aggregate row of mean-based reductions."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    rows = []
    for label, r in results:
        b, a = r.before, r.after
        rows.append((b["length"], a["length"], b["nesting"], a["nesting"]))
        w.writerow([label, b["length"], a["length"], b["nesting"], a["nesting"],
                    _pct(b["length"], a["length"]), _pct(b["nesting"], a["nesting"])])
    if rows:
        means = [sum(col) / len(rows) for col in zip(*rows)]
        w.writerow(["ALL", f"{means[0]:.2f}", f"{means[1]:.2f}", f"{means[2]:.2f}", f"{means[3]:.2f}",
                    _pct(means[0], means[1]), _pct(means[2], means[3])])
    return buf.getvalue()


def cmd_metrics(args) -> int:
    opts = _options(args)
    inferred = []
    errors = 0
    for path, _, rows in _infer_all(args.paths, opts, args.jobs):
        for name, status, message, r in rows:
            if status is Status.INFERRED:
                inferred.append((f"{Path(path).stem}::{name}", r))
            else:
                errors += status is Status.ERROR
                print(f"{path}::{name}: {status}: {message}", file=sys.stderr)
    text = metrics_csv(inferred)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 1 if errors else 0


def cmd_gen(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        src = random_method_source(args.seed * 100_003 + i, name=f"m{i}")
        (out / f"gen_{args.seed}_{i:04d}{SOURCE_SUFFIX}").write_text(src)
    return 0


def _pipeline_flags(p):
    p.add_argument("--no-far", action="store_true", help="skip flatten-and-recombine")
    p.add_argument("--no-simplify", action="store_true", help="skip strip/prune/dedupe passes")
    p.add_argument("--deep-prune", action="store_true", help="also prune cases unsatisfiable on the bounded domain")
    p.add_argument("--timeout-ms", type=int, default=300_000, help="per-method wall-clock budget")
    p.add_argument("--max-cfg", type=int, default=500, help="refuse methods with more passive nodes")
    p.add_argument("--domain-bound", type=int, default=2, help="ints range over [-B, B] in bounded checks")
    p.add_argument("--precondition", default=None, help="entry precondition over parameters and globals")
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="spinfer", description="Infer and compact method postconditions.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("infer", help="infer contracts for every method")
    p.add_argument("paths", nargs="+")
    _pipeline_flags(p)
    p.add_argument("--format", choices=("jml", "post", "json"), default="jml")
    p.add_argument("--dump", choices=("snf", "passive"), default=None, help="print an intermediate form instead")
    p.add_argument("--out", help="directory for <file>/<method>.spec outputs (default stdout)")
    p.add_argument("--telemetry", help="JSON-lines file to append one record per method to")
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("far", help="compact a specification stored as JSON")
    p.add_argument("file")
    p.add_argument("--no-far", action="store_true")
    p.add_argument("--no-simplify", action="store_true")
    p.add_argument("--deep-prune", action="store_true")
    p.add_argument("--domain-bound", type=int, default=2)
    p.add_argument("--format", choices=("jml", "post", "json"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_far)

    p = sub.add_parser("verify", help="check inferred contracts on a bounded domain")
    p.add_argument("paths", nargs="+")
    _pipeline_flags(p)
    p.add_argument("--fuel", type=int, default=1000, help="loop iterations before a run is excluded")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("metrics", help="length and nesting before/after as CSV")
    p.add_argument("paths", nargs="+")
    _pipeline_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("gen", help="write a seeded corpus of random loop-free methods")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
