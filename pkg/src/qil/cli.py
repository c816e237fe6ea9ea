"""Command-line entry point: ``qil analyze|verify|duality|corpus``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from .dsl import ParseError, parse_circuit
from .scenarios import run_analyze, run_corpus, run_duality, run_verify


def _load(path: str):
    return parse_circuit(Path(path).read_text(encoding="utf-8"))


def _emit(report, as_json: bool) -> None:
    if as_json:
        print(json.dumps(report.to_json(), indent=2))
    else:
        sys.stdout.write(report.render())


def _parse_failure(path: str, exc: Exception, as_json: bool) -> int:
    if as_json:
        print(json.dumps({"schema": 1, "error": f"{path}: {exc}"}, indent=2))
    else:
        print(f"{path}: {exc}", file=sys.stderr)
    return 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qil", description="Parity-equation reasoning about CSS-type circuits.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="derive the equations and the correlation table")
    p.add_argument("file")

    p = sub.add_parser("verify", help="cross-check the symbolic verdicts against the state vector")
    p.add_argument("file")
    p.add_argument("--trials", type=int, default=100, help="random local bases per all-basis claim")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("duality", help="test whether two circuits give Hadamard-dual states")
    p.add_argument("file_a")
    p.add_argument("file_b")

    p = sub.add_parser("corpus", help="run the built-in scenarios and their fixtures")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)

    for name, p in sub.choices.items():
        p.add_argument("--json", action="store_true", help="emit a JSON report")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "corpus":
        report = run_corpus(args.trials, args.seed)
        _emit(report, args.json)
        return 0 if report.ok else 1

    paths = [args.file_a, args.file_b] if args.command == "duality" else [args.file]
    docs = []
    for path in paths:
        try:
            docs.append(_load(path))
        except (OSError, ParseError) as exc:
            return _parse_failure(path, exc, args.json)

    if args.command == "analyze":
        report = run_analyze(docs[0])
        _emit(report, args.json)
        return report.exit_code
    if args.command == "verify":
        report = run_verify(docs[0], args.trials, args.seed)
        _emit(report, args.json)
        return 0 if report.ok else 1
    report = run_duality(*docs)
    _emit(report, args.json)
    return 0


if __name__ == "__main__":
    sys.exit(main())
