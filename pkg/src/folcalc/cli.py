"""Command line entry point: ``folcalc run`` and ``folcalc check``."""
from __future__ import annotations

import argparse
import sys

from .groebner import Budget
from .runner import emit_report, run_scene
from .scene import SceneError, load_scene

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_TASK_FAILED = 2


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="folcalc", description="Foliation calculus and numerical-triviality checks.")
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run every task of a scene and write a JSON report")
    run.add_argument("scene")
    run.add_argument("--out", help="report path (default: stdout)")
    run.add_argument("--parallel", action="store_true", help="run independent tasks in worker processes")
    run.add_argument("--budget", type=int, metavar="N", help="maximum S-pair degree for symbolic tasks")
    run.add_argument("--timing", action="store_true", help="include per-task wall time (breaks byte identity)")
    check = sub.add_parser("check", help="parse and validate a scene without running it")
    check.add_argument("scene")
    return ap


def _load(path: str):
    try:
        return load_scene(path)
    except SceneError as exc:
        for e in exc.errors:
            print(f"{path}:{e}", file=sys.stderr)
    except (OSError, UnicodeDecodeError) as exc:
        print(f"{path}: {exc}", file=sys.stderr)
    return None


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    doc = _load(args.scene)
    if doc is None:
        return EXIT_PARSE
    if args.command == "check":
        print(f"{args.scene}: ok ({len(doc.tasks)} tasks)")
        return EXIT_OK
    if args.budget is not None and args.budget < 1:
        print("--budget must be a positive integer", file=sys.stderr)
        return EXIT_PARSE
    try:
        budget = Budget(max_degree=args.budget) if args.budget is not None else Budget.from_env()
    except ValueError as exc:
        print(exc, file=sys.stderr)
        return EXIT_PARSE
    reports = run_scene(doc, budget, parallel=args.parallel)
    text = emit_report(reports, include_timing=args.timing) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for r in reports:
        if not r.ok:
            print(f"task {r.id!r} ({r.op}): {r.status}: {r.error}", file=sys.stderr)
    return EXIT_OK if all(r.ok for r in reports) else EXIT_TASK_FAILED


if __name__ == "__main__":
    sys.exit(main())
