"""Stages shared by the CLI and the tests: source text to checked, transformed programs."""

from __future__ import annotations

import logging
from collections.abc import Iterable
from dataclasses import dataclass
from pathlib import Path

from cogc.library import builtin_library
from cogc.parser import parse_program
from cogc.passes import RenameMap, a_normalise, desugar_program, monomorphise
from cogc.syntax import Program
from cogc.typecheck import TypingTree, check_program, elaborate

logger = logging.getLogger("cogc")


@dataclass(frozen=True)
class Checked:
    """An elaborated program together with the typing derivation of each function."""

    program: Program
    trees: dict[str, TypingTree]


def check(program: Program) -> Checked:
    trees = check_program(program)
    builtin_library(program).validate_program(program)
    return Checked(elaborate(program, trees), trees)


def load_program(text: str) -> Checked:
    """Parse, desugar ``match``, type-check and elaborate."""
    program = desugar_program(parse_program(text))
    checked = check(program)
    logger.info("loaded %d definition(s)", len(checked.program.defs))
    return checked


def load_file(path: str | Path) -> Checked:
    return load_program(Path(path).read_text())


def mono_stage(program: Program, entries: Iterable[str] | None = None) -> tuple[Checked, RenameMap]:
    mono, rename = monomorphise(program, entries)
    return check(mono), rename


def anf_stage(program: Program) -> Checked:
    return check(a_normalise(program))


def c_stage(program: Program, entries: Iterable[str] | None = None) -> tuple[Checked, RenameMap]:
    """The program the C backend accepts: monomorphic and A-normal."""
    mono, rename = mono_stage(program, entries)
    return anf_stage(mono.program), rename
