"""Configuration loading with env var substitution and validation."""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from cogc.errors import CogcError
from cogc.semantics.base import DEFAULT_FUEL

DEFAULT_CONFIG_FILE = "cogc.yaml"
DEFAULT_CFLAGS = ["-std=c11", "-Wall", "-Wextra", "-Werror", "-O1"]


class ConfigError(CogcError):
    """Raised on configuration loading or validation errors."""

    code = "ConfigError"


# --- Env var substitution ---

_ENV_VAR_RE = re.compile(r"\$\{(\w+)\}")


def _replacer(match: re.Match) -> str:
    var = match.group(1)
    val = os.environ.get(var)
    if val is None:
        raise ConfigError(f"Environment variable {var} is not set")
    return val


def substitute_env_vars_in_text(text: str) -> str:
    """Substitute ${VAR} in raw text before YAML parsing."""
    return _ENV_VAR_RE.sub(_replacer, text)


# --- Config dataclasses ---


@dataclass
class InterpreterConfig:
    fuel: int = DEFAULT_FUEL


@dataclass
class MonoConfig:
    entries: list[str] = field(default_factory=list)  # empty: every monomorphic function


@dataclass
class CodegenConfig:
    cc: str = ""  # empty: $CC, then cc, gcc, clang on PATH
    cflags: list[str] = field(default_factory=lambda: list(DEFAULT_CFLAGS))


@dataclass
class OracleConfig:
    jobs: int = 1
    seed: int = 0
    samples: int = 20


@dataclass
class Config:
    interpreter: InterpreterConfig = field(default_factory=InterpreterConfig)
    mono: MonoConfig = field(default_factory=MonoConfig)
    codegen: CodegenConfig = field(default_factory=CodegenConfig)
    oracle: OracleConfig = field(default_factory=OracleConfig)


# --- Helpers ---


def _section(raw: dict, key: str) -> dict:
    data = raw.get(key)
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"{key} must be a mapping")
    return data


def _coerce_int(value: Any, field_name: str) -> int:
    """Coerce a value to int (handles env-substituted strings)."""
    if isinstance(value, bool):
        raise ConfigError(f"Cannot convert {field_name} to int: {value!r}")
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ConfigError(f"Cannot convert {field_name} to int: {value!r}") from None


def _positive(value: Any, field_name: str) -> int:
    n = _coerce_int(value, field_name)
    if n <= 0:
        raise ConfigError(f"{field_name} must be positive, got {n}")
    return n


def _str_list(value: Any, field_name: str) -> list[str]:
    if not isinstance(value, list) or not all(isinstance(x, str) for x in value):
        raise ConfigError(f"{field_name} must be a list of strings")
    return list(value)


# --- Loaders ---


def load_config(path: str | None = None) -> Config:
    """Load and validate cogc.yaml, returning a typed Config.

    Without a path, ``cogc.yaml`` in the working directory is used when present and the
    built-in defaults otherwise. ``COGC_FUEL`` overrides ``interpreter.fuel``.
    """
    raw: dict = {}
    if path is None and Path(DEFAULT_CONFIG_FILE).exists():
        path = DEFAULT_CONFIG_FILE
    if path is not None:
        p = Path(path)
        if not p.exists():
            raise ConfigError(f"Config file not found: {path}")
        with open(p) as f:
            raw = yaml.safe_load(substitute_env_vars_in_text(f.read())) or {}
        if not isinstance(raw, dict):
            raise ConfigError(f"{path}: top level must be a mapping")

    # Interpreter
    interp_raw = _section(raw, "interpreter")
    fuel = _positive(interp_raw.get("fuel", DEFAULT_FUEL), "interpreter.fuel")
    env_fuel = os.environ.get("COGC_FUEL")
    if env_fuel is not None:
        fuel = _positive(env_fuel, "COGC_FUEL")

    # Monomorphisation
    mono_raw = _section(raw, "mono")
    entries = _str_list(mono_raw.get("entries", []), "mono.entries")

    # C backend
    cg_raw = _section(raw, "codegen")
    cc = cg_raw.get("cc", "") or ""
    if not isinstance(cc, str):
        raise ConfigError("codegen.cc must be a string")
    cflags = _str_list(cg_raw.get("cflags", DEFAULT_CFLAGS), "codegen.cflags")

    # Oracle
    or_raw = _section(raw, "oracle")
    oracle = OracleConfig(
        jobs=_positive(or_raw.get("jobs", 1), "oracle.jobs"),
        seed=_coerce_int(or_raw.get("seed", 0), "oracle.seed"),
        samples=_positive(or_raw.get("samples", 20), "oracle.samples"),
    )

    return Config(
        interpreter=InterpreterConfig(fuel=fuel),
        mono=MonoConfig(entries=entries),
        codegen=CodegenConfig(cc=cc, cflags=cflags),
        oracle=oracle,
    )
