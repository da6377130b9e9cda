"""C code generation and the C differential harness."""

from cogc.codegen.c import (
    CCodeBuilder,
    CEmitter,
    CodegenError,
    CUnit,
    UnsupportedConstruct,
    c_identifier,
    emit_c,
)
from cogc.codegen.diff import (
    CompileFailure,
    DiffCase,
    DiffStatus,
    DiffVerdict,
    OutputMismatch,
    diff_run_c,
    find_c_compiler,
    interpret,
    json_mismatch,
)

__all__ = [
    "CCodeBuilder",
    "CEmitter",
    "CUnit",
    "CodegenError",
    "CompileFailure",
    "DiffCase",
    "DiffStatus",
    "DiffVerdict",
    "OutputMismatch",
    "UnsupportedConstruct",
    "c_identifier",
    "diff_run_c",
    "emit_c",
    "find_c_compiler",
    "interpret",
    "json_mismatch",
]
