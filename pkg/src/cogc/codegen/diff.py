"""Differential harness: compile emitted C, run it, compare with the update semantics."""

from __future__ import annotations

import asyncio
import enum
import json
import logging
import os
import shlex
import shutil
import tempfile
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from cogc.codegen.c import CEmitter, CodegenError
from cogc.config import DEFAULT_CFLAGS
from cogc.library import builtin_library
from cogc.marshal import from_json, typed_json
from cogc.passes import a_normalise, monomorphise
from cogc.semantics import DEFAULT_FUEL, EvalError, Store, apply_fn_u
from cogc.syntax import FunDef, Program

logger = logging.getLogger("cogc.codegen")

DEFAULT_TIMEOUT = 30.0
_CANDIDATES = ("cc", "gcc", "clang")


class CompileFailure(CodegenError):
    code = "CompileFailure"

    def __init__(self, message: str, stderr: str = "") -> None:
        super().__init__(message)
        self.stderr = stderr


class OutputMismatch(CodegenError):
    code = "OutputMismatch"

    def __init__(self, path: str, expected: Any, actual: Any) -> None:
        super().__init__(f"outputs differ at {path}")
        self.path = path
        self.expected = expected
        self.actual = actual


class DiffStatus(enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    SKIPPED = "SKIPPED"


@dataclass
class DiffCase:
    input: Any
    expected: Any
    actual: Any = None

    @property
    def mismatch(self) -> str | None:
        return json_mismatch(self.expected, self.actual)

    def to_json(self) -> dict[str, Any]:
        return {
            "input": self.input,
            "expected": self.expected,
            "actual": self.actual,
            "mismatch": self.mismatch,
        }


@dataclass
class DiffVerdict:
    status: DiffStatus
    cases: list[DiffCase] = field(default_factory=list)
    compiler: str | None = None
    reason: str = ""

    @property
    def passed(self) -> bool:
        return self.status is DiffStatus.PASS

    def to_json(self) -> dict[str, Any]:
        return {
            "status": self.status.value,
            "compiler": self.compiler,
            "reason": self.reason,
            "cases": [c.to_json() for c in self.cases],
        }

    def raise_for_failure(self) -> None:
        for case in self.cases:
            path = case.mismatch
            if path is not None:
                raise OutputMismatch(path, case.expected, case.actual)


def json_mismatch(expected: Any, actual: Any, path: str = "$") -> str | None:
    """Path of the first difference between two JSON documents, or None."""
    if isinstance(expected, dict) and isinstance(actual, dict):
        for key in sorted(set(expected) | set(actual)):
            if key not in expected or key not in actual:
                return f"{path}.{key}"
            sub = json_mismatch(expected[key], actual[key], f"{path}.{key}")
            if sub is not None:
                return sub
        return None
    if isinstance(expected, list) and isinstance(actual, list):
        if len(expected) != len(actual):
            return f"{path}.length"
        for i, (x, y) in enumerate(zip(expected, actual, strict=True)):
            sub = json_mismatch(x, y, f"{path}[{i}]")
            if sub is not None:
                return sub
        return None
    if type(expected) is not type(actual) or expected != actual:
        return path
    return None


def find_c_compiler(configured: str = "") -> list[str] | None:
    """Compiler command: the configured one, then ``$CC``, then cc, gcc, clang on PATH."""
    for candidate in (configured, os.environ.get("CC", ""), *_CANDIDATES):
        if not candidate:
            continue
        argv = shlex.split(candidate)
        if argv and shutil.which(argv[0]) is not None:
            return argv
        if candidate in (configured, os.environ.get("CC")):
            logger.warning("C compiler %r not found on PATH", candidate)
    return None


async def _run(argv: list[str], cwd: Path, timeout: float) -> tuple[int, str, str]:
    proc = await asyncio.create_subprocess_exec(
        *argv,
        cwd=cwd,
        stdout=asyncio.subprocess.PIPE,
        stderr=asyncio.subprocess.PIPE,
    )
    try:
        stdout, stderr = await asyncio.wait_for(proc.communicate(), timeout=timeout)
    except TimeoutError:
        proc.kill()
        await proc.wait()
        raise
    return proc.returncode, stdout.decode(), stderr.decode()


async def _compile(argv: list[str], cwd: Path, timeout: float) -> None:
    logger.debug("compiling: %s", shlex.join(argv))
    code, _, stderr = await _run(argv, cwd, timeout)
    if code != 0:
        raise CompileFailure(f"{shlex.join(argv)} exited with {code}", stderr)


def interpret(program: Program, fname: str, doc: Any, *, fuel: int = DEFAULT_FUEL) -> Any:
    """Typed JSON of the update semantics applied to ``doc``, or ``{"error": CODE}``."""
    d = program.lookup(fname)
    registry = builtin_library(program)
    store = Store()
    _, u = from_json(doc, d.arg_type, registry, store)
    try:
        result, out = apply_fn_u(program, fname, (), u, store, registry=registry, fuel=fuel)
    except EvalError as exc:
        return {"error": exc.code}
    return typed_json(result, d.result_type, out)


async def diff_run_c(
    program: Program,
    fname: str,
    inputs: Sequence[Any],
    *,
    cc: str = "",
    cflags: Sequence[str] | None = None,
    workdir: str | Path | None = None,
    fuel: int = DEFAULT_FUEL,
    timeout: float = DEFAULT_TIMEOUT,
) -> DiffVerdict:
    """Compile ``fname`` to C and compare its outputs with the interpreter on ``inputs``.

    ``program`` is a checked and elaborated program; ``fname`` must be monomorphic. Each
    input gets its own driver and process. Without a C compiler the verdict is SKIPPED.
    """
    d = program.lookup(fname)
    if not isinstance(d, FunDef) or d.signature.binders:
        raise CodegenError(f"'{fname}' is not a monomorphic function")
    compiler = find_c_compiler(cc)
    if compiler is None:
        logger.warning("no C compiler found; differential run skipped")
        return DiffVerdict(DiffStatus.SKIPPED, reason="no C compiler found")

    mono, rename = monomorphise(program, [fname])
    emitter = CEmitter(a_normalise(mono))
    entry = rename.lookup(fname, ())
    unit = emitter.emit()
    registry = builtin_library(program)
    flags = list(DEFAULT_CFLAGS if cflags is None else cflags)

    with tempfile.TemporaryDirectory(prefix="cogc-") as scratch:
        root = Path(workdir if workdir is not None else scratch).resolve()
        unit.write(root)
        await _compile([*compiler, *flags, "-c", unit.source_name, "-o", "module.o"], root, timeout)

        cases = [DiffCase(doc, interpret(program, fname, doc, fuel=fuel)) for doc in inputs]
        slots = asyncio.Semaphore(os.cpu_count() or 1)

        async def run_case(i: int, doc: Any) -> Any:
            async with slots:
                return await _run_case(i, doc)

        async def _run_case(i: int, doc: Any) -> Any:
            case_dir = root / f"case_{i}"
            case_dir.mkdir(parents=True, exist_ok=True)
            v, _ = from_json(doc, d.arg_type, registry, Store())
            (case_dir / f"{unit.name}_driver.c").write_text(emitter.driver(entry, v))
            argv = [
                *compiler,
                *flags,
                f"-I{root}",
                f"{unit.name}_driver.c",
                str(root / "module.o"),
                "-o",
                "driver",
            ]
            await _compile(argv, case_dir, timeout)
            code, stdout, stderr = await _run([str(case_dir / "driver")], case_dir, timeout)
            if code != 0:
                return {"error": "Crash", "status": code, "stderr": stderr.strip()}
            try:
                return json.loads(stdout)
            except json.JSONDecodeError:
                return {"error": "MalformedOutput", "stdout": stdout}

        actuals = await asyncio.gather(*(run_case(i, doc) for i, doc in enumerate(inputs)))

    for case, actual in zip(cases, actuals, strict=True):
        case.actual = actual
    failed = [c for c in cases if c.mismatch is not None]
    status = DiffStatus.FAIL if failed else DiffStatus.PASS
    logger.info("diff-c %s: %d case(s), %d mismatch(es)", fname, len(cases), len(failed))
    return DiffVerdict(status, cases, shlex.join(compiler))
