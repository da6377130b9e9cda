"""cogc: a linearly typed core language with value and update semantics."""

from cogc.errors import CogcError, format_diagnostic
from cogc.parser import format_program, parse_program
from cogc.pipeline import Checked, load_file, load_program
from cogc.typecheck import TypingTree, check_program, elaborate

__all__ = [
    "Checked",
    "CogcError",
    "TypingTree",
    "check_program",
    "elaborate",
    "format_diagnostic",
    "format_program",
    "load_file",
    "load_program",
    "parse_program",
]
