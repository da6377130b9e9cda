"""Source-to-source passes: match desugaring, A-normalisation, monomorphisation."""

from cogc.passes.anf import a_normalise, is_anf, is_atom
from cogc.passes.base import NameSupply, PassError
from cogc.passes.desugar import DuplicateArm, EmptyMatch, desugar_match, desugar_program
from cogc.passes.mono import (
    MissingRenameEntry,
    NoEntryPoint,
    RenameMap,
    UnresolvedInstantiation,
    mono_expr,
    mono_store,
    mono_val,
    monomorphise,
)

__all__ = [
    "DuplicateArm",
    "EmptyMatch",
    "MissingRenameEntry",
    "NameSupply",
    "NoEntryPoint",
    "PassError",
    "RenameMap",
    "UnresolvedInstantiation",
    "a_normalise",
    "desugar_match",
    "desugar_program",
    "is_anf",
    "is_atom",
    "mono_expr",
    "mono_store",
    "mono_val",
    "monomorphise",
]
