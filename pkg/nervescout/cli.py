import argparse
import logging
import sys
import time
from pathlib import Path
from typing import List, Optional, Tuple

from dotenv import find_dotenv, load_dotenv

from commands import register_commands
from config import Config
from utils.budget import SearchBudget
from utils.errors import BudgetExceeded, DocumentError, InvalidInput
from utils.reports import Report

logger = logging.getLogger("cli")

EXIT_OK, EXIT_FAILS, EXIT_INVALID, EXIT_BUDGET = 0, 1, 2, 3


def build_parser() -> argparse.ArgumentParser:
    """Instantiate the top-level parser with every subcommand registered."""

    parser = argparse.ArgumentParser(prog="nervescout", description="Finite simplicial and categorical constructions.")
    parser.add_argument("--budget", type=int, default=None, help="search node budget (default: NERVESCOUT_BUDGET)")
    parser.add_argument("--timing", action="store_true", help="include wall-clock timing in the report")
    parser.add_argument("--log-level", default=None, help="logging level (default: NERVESCOUT_LOG_LEVEL)")
    parser.add_argument("--witness", help="also write the witness of a failing verdict to this file")
    parser.add_argument("--table", action="store_true", help="print the tabular preview instead of the JSON report")
    subparsers = parser.add_subparsers(dest="group", required=True)
    register_commands(subparsers)
    return parser


def _error_report(command: str, exc: Exception) -> Report:
    error = exc.diagnostic() if isinstance(exc, DocumentError) else {"message": str(exc)}
    error["type"] = type(exc).__name__
    return Report(command, result={"error": error})


def run_command(argv: List[str]) -> Tuple[int, Optional[Report]]:
    """Parse argv, run the subcommand and map the outcome to an exit code."""

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (EXIT_OK if exc.code == 0 else EXIT_INVALID), None
    if args.log_level:
        logging.getLogger().setLevel(args.log_level.upper())
    budget = SearchBudget(args.budget)
    started = time.perf_counter()
    try:
        report = args.handler(args, budget)
    except BudgetExceeded as exc:
        logger.warning(f"[cli] {args.command}: {exc}")
        return EXIT_BUDGET, _error_report(args.command, exc)
    except InvalidInput as exc:
        logger.warning(f"[cli] {args.command}: {exc}")
        return EXIT_INVALID, _error_report(args.command, exc)
    elapsed = time.perf_counter() - started
    logger.info(f"[cli] {args.command} finished in {elapsed:.3f}s after {budget.spent} search nodes")
    if args.timing:
        report.timing = elapsed
    if not args.table:
        report.preview = None
    if args.witness and report.witness is not None:
        Path(args.witness).write_text(Report(args.command, report.verdict, report.bounds, report.witness).render(), encoding="utf-8")
    return (EXIT_FAILS if report.verdict is False else EXIT_OK), report


def main(argv: Optional[List[str]] = None) -> int:
    # A .env in the working directory overrides the defaults read at import.
    load_dotenv(find_dotenv(usecwd=True))
    Config.load()
    level = Config.LOG_LEVEL.upper()
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    argv = sys.argv[1:] if argv is None else argv
    code, report = run_command(argv)
    if report is not None:
        if report.preview is not None:
            sys.stdout.write(report.preview + "\n")
        else:
            sys.stdout.write(report.render())
    return code


if __name__ == "__main__":
    sys.exit(main())
