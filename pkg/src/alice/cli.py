"""Command-line entry point.

Exit codes: 0 success, 1 error, 2 no candidate module, 3 no eFPGA solution.
"""

from __future__ import annotations

import argparse
import logging
import sys

from alice.config import load_config
from alice.errors import AliceError
from alice.flow import run_flow, write_artifacts
from alice.report import emit_report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="alice", description="Automatic eFPGA-based design redaction.")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run the redaction flow on a YAML configuration")
    run.add_argument("--config", required=True, help="YAML run configuration")
    run.add_argument("--characterizer-report", help="JSON fabric report overriding the analytic model")
    run.add_argument("--out", default="alice_out", help="output directory (default: %(default)s)")
    run.add_argument("--report-format", choices=("json", "table"), default="table")
    run.add_argument("--dump-dataflow", action="store_true", help="also write dataflow.dot")
    run.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="alice: %(levelname)s: %(message)s",
    )
    try:
        cfg = load_config(args.config)
        result = run_flow(cfg, characterizer_report=args.characterizer_report)
        write_artifacts(result, args.out, dump_dataflow=args.dump_dataflow)
    except AliceError as exc:
        print(f"alice: error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(emit_report(result.report, args.report_format))
    if result.report.message:
        print(f"alice: {result.report.status}: {result.report.message}", file=sys.stderr)
    return result.report.exit_code


if __name__ == "__main__":
    sys.exit(main())
