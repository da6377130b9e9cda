"""CLI entrypoint for cogc."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from typing import NoReturn

from cogc.cli import (
    EXIT_USAGE,
    run_anf,
    run_check,
    run_desugar,
    run_diff_c,
    run_emit_c,
    run_mono,
    run_oracle,
    run_run,
)

logger = logging.getLogger("cogc")

COMMANDS = {
    "check": run_check,
    "run": run_run,
    "oracle": run_oracle,
    "mono": run_mono,
    "anf": run_anf,
    "desugar": run_desugar,
    "emit-c": run_emit_c,
    "diff-c": run_diff_c,
}


class _ArgumentParser(argparse.ArgumentParser):
    """Reports usage errors with the cogc usage exit code."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    """Parse CLI arguments with subcommand routing.

    Subcommands:
        check     Type-check a program
        run       Evaluate a function under either semantics
        oracle    Check that the update semantics refines the value semantics
        mono      Print the monomorphised program
        anf       Print the A-normal form
        desugar   Print the program with match desugared
        emit-c    Write C sources
        diff-c    Compare compiled C against the update semantics
    """
    parser = _ArgumentParser(prog="cogc", description="cogc: a linearly typed core language")
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    def command(name: str, help_text: str) -> argparse.ArgumentParser:
        sub = subparsers.add_parser(name, help=help_text)
        sub.add_argument("file", help="Source file (.cogc)")
        sub.add_argument("--config", default=None, help="Config file path (default: cogc.yaml)")
        return sub

    check_parser = command("check", "Type-check a program")
    check_parser.add_argument("--typing-tree", default=None, help="Write typing trees as JSON")

    run_parser = command("run", "Evaluate a function")
    run_parser.add_argument("--fn", required=True, help="Function to apply")
    run_parser.add_argument("--sem", choices=["value", "update"], default="value")
    run_parser.add_argument("--arg", default="{}", help="Argument as JSON")
    run_parser.add_argument("--trace", action="store_true", help="Also dump the stores")

    oracle_parser = command("oracle", "Run the refinement oracle")
    oracle_parser.add_argument("--fn", required=True, help="Function to check")
    oracle_parser.add_argument("--arg", default=None, help="Argument as JSON")
    oracle_parser.add_argument("--random", type=int, default=None, help="Number of random inputs")
    oracle_parser.add_argument("--seed", type=int, default=None, help="Random seed")
    oracle_parser.add_argument("--jobs", type=int, default=None, help="Worker processes")
    oracle_parser.add_argument(
        "--no-replay", action="store_true", help="Skip replaying typing-rule obligations"
    )

    mono_parser = command("mono", "Monomorphise")
    mono_parser.add_argument("--entry", action="append", default=[], help="Entry point")
    mono_parser.add_argument("--rename-map", default=None, help="Write the rename map as JSON")

    command("anf", "A-normalise")
    command("desugar", "Desugar match")

    emit_parser = command("emit-c", "Write C sources")
    emit_parser.add_argument("-o", "--output", required=True, help="Output directory")
    emit_parser.add_argument("--entry", action="append", default=[], help="Entry point")

    diff_parser = command("diff-c", "Differential run against C")
    diff_parser.add_argument("--fn", required=True, help="Function to compare")
    diff_parser.add_argument("--arg", action="append", required=True, help="Argument as JSON")
    diff_parser.add_argument("--workdir", default=None, help="Keep build files here")

    return parser.parse_args(argv)


def main(argv: list[str] | None = None) -> None:
    """Synchronous entrypoint for the CLI."""
    log_level = os.environ.get("LOG_LEVEL", "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, log_level, logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s — %(message)s",
    )
    args = parse_args(argv)
    logger.info("cogc %s %s", args.command, args.file)
    sys.exit(COMMANDS[args.command](args))


if __name__ == "__main__":
    main()
