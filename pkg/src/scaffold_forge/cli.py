"""Command-line entry point: ``scaffold-forge VERB --job FILE``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .algebra.fp import InconsistentSystem
from .pgroup import GroupError
from .ramification import BreakError
from .report import COMMANDS, EXIT_INPUT, RUNNERS, JobError, error_report, load_job, render
from .saltman import BoundTooSmall, SystemTooLarge

INPUT_ERRORS = (JobError, GroupError, BreakError, BoundTooSmall, SystemTooLarge, InconsistentSystem,
                ValueError, KeyError, TypeError)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scaffold-forge",
        description="Generic towers, ramification breaks and Galois scaffolds for filtered p-groups.",
    )
    parser.add_argument("verb", choices=COMMANDS)
    parser.add_argument("--job", required=True, help="JSON job file")
    parser.add_argument("--format", choices=("text", "json"), default=None,
                        help="report format (default: job output.format, else text)")
    parser.add_argument("--out", help="write the report here instead of stdout")
    parser.add_argument("--series-precision", type=int, default=None,
                        help="also print each mu_ij as a Laurent series with this many terms")
    return parser


def run(verb: str, job_path, fmt: str | None = None, series_precision: int | None = None) -> tuple[dict, str]:
    """Run one job; returns (report dict, format actually used)."""
    try:
        job = load_job(job_path)
    except INPUT_ERRORS as exc:
        return error_report(verb, str(exc)), fmt or "text"
    output = job.get("output", {})
    fmt = fmt or output.get("format", "text")
    if series_precision is None:
        series_precision = output.get("precision")
    declared = job.get("command")
    if declared is not None and declared != verb:
        return error_report(verb, f"job declares command {declared!r} but {verb!r} was requested"), fmt
    try:
        if verb == "scaffold":
            report = RUNNERS[verb](job, series_precision)
        else:
            report = RUNNERS[verb](job)
    except INPUT_ERRORS as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        report = error_report(verb, f"{type(exc).__name__}: {msg}")
    return report, fmt


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.series_precision is not None and args.series_precision < 1:
        print("--series-precision must be positive", file=sys.stderr)
        return EXIT_INPUT
    report, fmt = run(args.verb, args.job, args.format, args.series_precision)
    text = render(report, fmt)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if report.get("error"):
        print(f"error: {report['error']}", file=sys.stderr)
    return report["exit_code"]


if __name__ == "__main__":
    sys.exit(main())
