"""CLI commands: each ``run_*`` takes parsed arguments and returns an exit code."""

from __future__ import annotations

import asyncio
import json
import logging
import random
import sys
from argparse import Namespace
from pathlib import Path
from typing import Any

from cogc.codegen import DiffStatus, diff_run_c, emit_c
from cogc.config import Config, ConfigError, load_config
from cogc.errors import CogcError, format_diagnostic
from cogc.library import builtin_library
from cogc.marshal import from_json, random_input, typed_json
from cogc.parser import format_program, parse_program
from cogc.passes import desugar_program
from cogc.pipeline import Checked, anf_stage, c_stage, load_file, mono_stage
from cogc.refine import oracle_from_json, run_samples
from cogc.semantics import Store, apply_fn_u, apply_fn_v
from cogc.syntax import FunDef, Program
from cogc.typecheck import ProgramCheckError

logger = logging.getLogger("cogc")

# Exit codes
EXIT_SUCCESS = 0
EXIT_FAILURE = 1
EXIT_ORACLE = 2
EXIT_USAGE = 3


class UsageError(Exception):
    """Raised for arguments that parse but make no sense together."""


def report(path: str, error: CogcError) -> None:
    """Print diagnostics for ``error`` on standard error."""
    if isinstance(error, ProgramCheckError):
        for _, inner in error.errors:
            print(format_diagnostic(path, inner), file=sys.stderr)
        return
    print(format_diagnostic(path, error), file=sys.stderr)
    stderr = getattr(error, "stderr", "")
    if stderr:
        print(stderr.rstrip(), file=sys.stderr)


def _dump(doc: Any) -> None:
    print(json.dumps(doc, indent=2, sort_keys=True))


def _config(args: Namespace) -> Config:
    return load_config(getattr(args, "config", None))


def _parse_json(raw: str, what: str) -> Any:
    try:
        return json.loads(raw)
    except json.JSONDecodeError as e:
        raise UsageError(f"{what} is not valid JSON: {e}") from None


def _entry(program: Program, name: str) -> FunDef:
    d = program.lookup(name)
    if not isinstance(d, FunDef):
        raise UsageError(f"'{name}' is not a function of the program")
    if d.signature.binders:
        raise UsageError(f"'{name}' is polymorphic; pick a monomorphic entry point")
    return d


def _guarded(command):
    """Map configuration, usage and compiler errors of a command to exit codes."""

    def run(args: Namespace) -> int:
        try:
            return command(args)
        except UsageError as e:
            print(f"Error: {e}", file=sys.stderr)
            return EXIT_USAGE
        except ConfigError as e:
            print(f"Error: {e}", file=sys.stderr)
            return EXIT_FAILURE
        except CogcError as e:
            report(args.file, e)
            return EXIT_FAILURE
        except OSError as e:
            print(f"Error: {e}", file=sys.stderr)
            return EXIT_FAILURE

    run.__name__ = command.__name__
    run.__doc__ = command.__doc__
    return run


@_guarded
def run_check(args: Namespace) -> int:
    """Type-check a file; optionally write the typing trees as JSON."""
    checked = load_file(args.file)
    if args.typing_tree:
        trees = {name: tree.to_json() for name, tree in sorted(checked.trees.items())}
        Path(args.typing_tree).write_text(json.dumps(trees, indent=2) + "\n")
    print(f"{args.file}: ok ({len(checked.trees)} function(s))")
    return EXIT_SUCCESS


@_guarded
def run_run(args: Namespace) -> int:
    """Evaluate one function under the value or the update semantics."""
    config = _config(args)
    program = load_file(args.file).program
    d = _entry(program, args.fn)
    registry = builtin_library(program)
    store = Store()
    v_arg, u_arg = from_json(_parse_json(args.arg, "--arg"), d.arg_type, registry, store)
    fuel = config.interpreter.fuel
    if args.sem == "value":
        result = apply_fn_v(program, d.name, (), v_arg, registry=registry, fuel=fuel)
        _dump(typed_json(result, d.result_type))
        return EXIT_SUCCESS
    result, out = apply_fn_u(program, d.name, (), u_arg, store, registry=registry, fuel=fuel)
    if args.trace:
        _dump(
            {
                "result": typed_json(result, d.result_type, out),
                "store_in": store.to_json(),
                "store_out": out.to_json(),
            }
        )
    else:
        _dump(typed_json(result, d.result_type, out))
    return EXIT_SUCCESS


@_guarded
def run_oracle(args: Namespace) -> int:
    """Run the refinement oracle on one input or on random inputs."""
    config = _config(args)
    program = load_file(args.file).program
    d = _entry(program, args.fn)
    fuel = config.interpreter.fuel
    if args.arg is not None and args.random is not None:
        raise UsageError("--arg and --random are mutually exclusive")
    if args.arg is not None:
        doc = _parse_json(args.arg, "--arg")
        verdict = oracle_from_json(program, d.name, doc, fuel=fuel, replay=not args.no_replay)
        _dump(verdict.to_json())
        return EXIT_SUCCESS if verdict.passed else EXIT_ORACLE

    seed = config.oracle.seed if args.seed is None else args.seed
    samples = config.oracle.samples if args.random is None else args.random
    jobs = config.oracle.jobs if args.jobs is None else args.jobs
    if samples <= 0 or jobs <= 0:
        raise UsageError("--random and --jobs must be positive")
    rng = random.Random(seed)
    registry = builtin_library(program)
    docs = [random_input(d.arg_type, rng, registry) for _ in range(samples)]
    verdicts = run_samples(program, d.name, docs, jobs=jobs, fuel=fuel)
    failed = sum(not v.passed for v in verdicts)
    logger.info("oracle %s: %d sample(s), %d failure(s)", d.name, len(verdicts), failed)
    _dump([{"input": doc, "verdict": v.to_json()} for doc, v in zip(docs, verdicts, strict=True)])
    return EXIT_ORACLE if failed else EXIT_SUCCESS


@_guarded
def run_desugar(args: Namespace) -> int:
    """Print the program with every ``match`` rewritten to ``case``."""
    program = desugar_program(parse_program(Path(args.file).read_text()))
    sys.stdout.write(format_program(program))
    return EXIT_SUCCESS


@_guarded
def run_anf(args: Namespace) -> int:
    """Print the A-normal form of the program."""
    checked = anf_stage(load_file(args.file).program)
    sys.stdout.write(format_program(checked.program))
    return EXIT_SUCCESS


@_guarded
def run_mono(args: Namespace) -> int:
    """Print the monomorphised program; optionally write the rename map."""
    config = _config(args)
    entries = args.entry or config.mono.entries or None
    checked, rename = mono_stage(load_file(args.file).program, entries)
    sys.stdout.write(format_program(checked.program))
    if args.rename_map:
        Path(args.rename_map).write_text(json.dumps(rename.to_json(), indent=2) + "\n")
    return EXIT_SUCCESS


def _c_program(args: Namespace, config: Config) -> Checked:
    entries = args.entry or config.mono.entries or None
    checked, _ = c_stage(load_file(args.file).program, entries)
    return checked


@_guarded
def run_emit_c(args: Namespace) -> int:
    """Write the C translation unit, its header and the runtime header."""
    config = _config(args)
    unit = emit_c(_c_program(args, config).program, name=Path(args.file).stem)
    for path in unit.write(args.output):
        print(path)
    return EXIT_SUCCESS


@_guarded
def run_diff_c(args: Namespace) -> int:
    """Compile one function to C and compare it with the update semantics."""
    config = _config(args)
    program = load_file(args.file).program
    d = _entry(program, args.fn)
    docs = [_parse_json(raw, "--arg") for raw in args.arg]
    run = diff_run_c(
        program,
        d.name,
        docs,
        cc=config.codegen.cc,
        cflags=config.codegen.cflags,
        workdir=args.workdir,
        fuel=config.interpreter.fuel,
    )
    verdict = asyncio.run(run)
    _dump(verdict.to_json())
    if verdict.status is DiffStatus.SKIPPED:
        logger.warning("diff-c skipped: %s", verdict.reason)
    return EXIT_FAILURE if verdict.status is DiffStatus.FAIL else EXIT_SUCCESS
