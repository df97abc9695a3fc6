"""Command-line entry point: ``weakgeom <command> --scenario FILE``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .scenario import COMMANDS, ScenarioError, parse_scenario, run
from .sun_algebra import set_tensor_cache

EXIT_OK, EXIT_RESIDUAL, EXIT_INPUT = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="weakgeom",
        description="Weak values of N-level systems from generalized Bloch vectors.",
    )
    p.add_argument("command", choices=COMMANDS)
    src = p.add_mutually_exclusive_group()
    src.add_argument("--scenario", metavar="FILE", help="scenario JSON ('-' for stdin)")
    src.add_argument("--batch", metavar="DIR", help="run every *.json scenario in DIR")
    p.add_argument("--n", type=int, help="dimension for algebra-check without a scenario")
    p.add_argument("--format", choices=("json", "csv"), default=None)
    p.add_argument("--tensor-cache", metavar="DIR", help="persist structure tensors here")
    p.add_argument("--seed", type=int, help="seed for 'random' scenario fields")
    p.add_argument("--tolerance", type=float, help="override the oracle-residual gate")
    p.add_argument("--workers", type=int, default=4, help="threads for --batch")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _error_doc(source, exc) -> dict:
    doc = {"error": {"type": type(exc).__name__, "message": str(exc)}}
    if isinstance(exc, ScenarioError):
        doc["error"]["path"] = exc.path
    if source is not None:
        doc["source"] = str(source)
    return doc


def _run_one(command, text, args, source=None):
    """Return ``(exit_code, json_doc, csv_rows, fmt)`` for one scenario."""
    try:
        sc = parse_scenario(text, seed=args.seed)
        report = run(sc, command, tolerance=args.tolerance)
    except ValueError as exc:
        return EXIT_INPUT, _error_doc(source, exc), None, args.format or "json"
    doc = report.to_json()
    if source is not None:
        doc["source"] = str(source)
    fmt = args.format or sc.format or "json"
    return (EXIT_OK if report.passed else EXIT_RESIDUAL), doc, report.rows, fmt


def _csv(rows, doc) -> str:
    if rows is None:
        # flatten scalar results into key,value lines
        rows = [{"key": k, "value": v} for k, v in _flatten(doc["results"])]
        rows += [{"key": f"oracle_residual.{k}", "value": v}
                 for k, v in doc["oracle_residuals"].items()]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]) if rows else ["key", "value"],
                            lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}{k}.")
    elif isinstance(obj, list) and obj and isinstance(obj[0], (dict, list)):
        for k, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}{k}.")
    elif isinstance(obj, list):
        yield prefix[:-1], json.dumps(obj)
    else:
        yield prefix[:-1], obj


def _emit(doc, rows, fmt, out):
    if fmt == "csv" and "error" not in doc:
        out.write(_csv(rows, doc))
    else:
        out.write(json.dumps(doc, indent=2, sort_keys=True))
        out.write("\n")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.tensor_cache:
        set_tensor_cache(args.tensor_cache)
    out = sys.stdout

    if args.batch:
        files = sorted(Path(args.batch).glob("*.json"))
        if not files:
            _emit(_error_doc(args.batch, ValueError("no *.json scenarios found")), None, "json", out)
            return EXIT_INPUT
        with ThreadPoolExecutor(max_workers=max(1, args.workers)) as pool:
            results = list(pool.map(
                lambda path: _run_one(args.command, path.read_text(), args, path), files))
        codes = [r[0] for r in results]
        if args.format == "csv":
            for _, doc, rows, _ in results:
                _emit(doc, rows, "csv", out)
        else:
            _emit([r[1] for r in results], None, "json", out)
        return max(codes)

    if args.scenario:
        try:
            text = sys.stdin.read() if args.scenario == "-" else Path(args.scenario).read_text()
        except OSError as exc:
            _emit(_error_doc(args.scenario, exc), None, "json", out)
            return EXIT_INPUT
    elif args.command == "algebra-check" and args.n is not None:
        text = json.dumps({"n": args.n})
    else:
        parser.print_usage(sys.stderr)
        print("weakgeom: error: --scenario or --batch is required", file=sys.stderr)
        return EXIT_INPUT

    code, doc, rows, fmt = _run_one(args.command, text, args, None)
    _emit(doc, rows, fmt, out)
    return code


if __name__ == "__main__":
    sys.exit(main())
