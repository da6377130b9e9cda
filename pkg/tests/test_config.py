"""Tests for cogc.config — YAML loading, env var substitution, validation."""

import os
import textwrap

import pytest

from cogc.config import (
    DEFAULT_CFLAGS,
    ConfigError,
    load_config,
    substitute_env_vars_in_text,
)
from cogc.semantics.base import DEFAULT_FUEL


class TestSubstituteEnvVars:
    def test_replaces_env_var(self, monkeypatch):
        monkeypatch.setenv("MY_CC", "clang")
        assert substitute_env_vars_in_text("cc: ${MY_CC}") == "cc: clang"

    def test_replaces_multiple_vars(self, monkeypatch):
        monkeypatch.setenv("A", "1")
        monkeypatch.setenv("B", "2")
        assert substitute_env_vars_in_text("${A}-${B}") == "1-2"

    def test_raises_on_unset_env_var(self):
        os.environ.pop("UNSET_VAR_XYZ", None)
        with pytest.raises(ConfigError, match="Environment variable UNSET_VAR_XYZ is not set"):
            substitute_env_vars_in_text("${UNSET_VAR_XYZ}")

    def test_leaves_plain_text_alone(self):
        assert substitute_env_vars_in_text("fuel: 10 # $HOME") == "fuel: 10 # $HOME"


# --- Fixtures for config YAML files ---

VALID_CONFIG_YAML = textwrap.dedent("""\
    interpreter:
      fuel: 500
    mono:
      entries: [main, helper]
    codegen:
      cc: "gcc"
      cflags: ["-O0"]
    oracle:
      jobs: 4
      seed: 17
      samples: 50
""")


def _write(tmp_path, text: str, name: str = "cogc.yaml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestLoadConfig:
    def test_defaults_without_file(self):
        config = load_config()
        assert config.interpreter.fuel == DEFAULT_FUEL
        assert config.mono.entries == []
        assert config.codegen.cc == ""
        assert config.codegen.cflags == DEFAULT_CFLAGS
        assert (config.oracle.jobs, config.oracle.seed, config.oracle.samples) == (1, 0, 20)

    def test_valid_file(self, tmp_path):
        config = load_config(_write(tmp_path, VALID_CONFIG_YAML, "custom.yaml"))
        assert config.interpreter.fuel == 500
        assert config.mono.entries == ["main", "helper"]
        assert config.codegen.cc == "gcc"
        assert config.codegen.cflags == ["-O0"]
        assert (config.oracle.jobs, config.oracle.seed, config.oracle.samples) == (4, 17, 50)

    def test_default_file_in_working_directory(self, tmp_path):
        # the autouse fixture runs every test inside tmp_path
        _write(tmp_path, "interpreter:\n  fuel: 42\n")
        assert load_config().interpreter.fuel == 42

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="Config file not found"):
            load_config(str(tmp_path / "nope.yaml"))

    def test_empty_file_gives_defaults(self, tmp_path):
        assert load_config(_write(tmp_path, "")).oracle.samples == 20

    def test_env_substitution(self, tmp_path, monkeypatch):
        monkeypatch.setenv("COGC_TEST_JOBS", "3")
        config = load_config(_write(tmp_path, "oracle:\n  jobs: ${COGC_TEST_JOBS}\n"))
        assert config.oracle.jobs == 3

    def test_fuel_override_from_environment(self, tmp_path, monkeypatch):
        monkeypatch.setenv("COGC_FUEL", "7")
        assert load_config(_write(tmp_path, VALID_CONFIG_YAML)).interpreter.fuel == 7

    def test_bad_fuel_override(self, monkeypatch):
        monkeypatch.setenv("COGC_FUEL", "lots")
        with pytest.raises(ConfigError, match="Cannot convert COGC_FUEL"):
            load_config()


class TestValidation:
    @pytest.mark.parametrize(
        ("text", "message"),
        [
            ("- a\n- b\n", "top level must be a mapping"),
            ("oracle: 3\n", "oracle must be a mapping"),
            ("interpreter:\n  fuel: 0\n", "interpreter.fuel must be positive"),
            ("oracle:\n  jobs: -2\n", "oracle.jobs must be positive"),
            ("oracle:\n  seed: abc\n", "Cannot convert oracle.seed"),
            ("oracle:\n  samples: true\n", "Cannot convert oracle.samples"),
            ("mono:\n  entries: main\n", "mono.entries must be a list of strings"),
            ("codegen:\n  cflags: [1, 2]\n", "codegen.cflags must be a list of strings"),
            ("codegen:\n  cc: 5\n", "codegen.cc must be a string"),
        ],
    )
    def test_invalid_values(self, tmp_path, text, message):
        with pytest.raises(ConfigError, match=message):
            load_config(_write(tmp_path, text))

    def test_null_cc_means_autodetect(self, tmp_path):
        assert load_config(_write(tmp_path, "codegen:\n  cc:\n")).codegen.cc == ""
