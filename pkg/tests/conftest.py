"""Shared fixtures: the program corpus and the C compiler probe."""

from __future__ import annotations

from pathlib import Path

import pytest

from cogc.codegen import find_c_compiler
from cogc.pipeline import load_file

CORPUS = Path(__file__).parent / "corpus"


@pytest.fixture(autouse=True)
def _isolated_config(monkeypatch, tmp_path):
    """Keep a developer's cogc.yaml and COGC_* variables out of the tests."""
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("COGC_FUEL", raising=False)
    monkeypatch.delenv("CC", raising=False)


@pytest.fixture()
def corpus():
    """Loader for accepted corpus programs by stem, e.g. ``corpus("arith")``."""

    def load(name: str):
        return load_file(CORPUS / "accept" / f"{name}.cogc")

    return load


@pytest.fixture()
def corpus_path():
    def path(name: str, kind: str = "accept") -> Path:
        return CORPUS / kind / f"{name}.cogc"

    return path


@pytest.fixture()
def c_compiler():
    argv = find_c_compiler()
    if argv is None:
        pytest.skip("no C compiler on PATH")
    return argv
