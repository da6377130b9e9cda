"""Tests for cogc package exports."""

from pathlib import Path

PROJECT_ROOT = Path(__file__).resolve().parent.parent


class TestPackageExports:
    def test_all_exports(self):
        import cogc

        assert set(cogc.__all__) == {
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
        }

    def test_same_reference(self):
        """Importing from package and module gives the same object."""
        from cogc import CogcError as FromPkg
        from cogc import load_program as load_from_pkg
        from cogc.errors import CogcError as FromMod
        from cogc.pipeline import load_program as load_from_mod

        assert FromPkg is FromMod
        assert load_from_pkg is load_from_mod

    def test_every_stage_error_is_a_cogc_error(self):
        from cogc import CogcError
        from cogc.codegen import CodegenError
        from cogc.config import ConfigError
        from cogc.parser import ParseError
        from cogc.passes import PassError
        from cogc.semantics import EvalError

        for error in (CodegenError, ConfigError, ParseError, PassError, EvalError):
            assert issubclass(error, CogcError)

    def test_round_trip_through_the_top_level_api(self):
        from cogc import format_program, load_program, parse_program

        checked = load_program("(def main (forall) (fn (x u8) u8 (op + x 1)))")
        assert parse_program(format_program(checked.program)).lookup("main") is not None


class TestProjectFiles:
    def test_example_config_loads(self):
        from cogc.config import load_config

        config = load_config(str(PROJECT_ROOT / "cogc.example.yaml"))
        assert config.oracle.samples == 20

    def test_console_script(self):
        content = (PROJECT_ROOT / "pyproject.toml").read_text()
        assert 'cogc = "cogc.__main__:main"' in content
