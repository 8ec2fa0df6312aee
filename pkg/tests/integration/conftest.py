"""Pytest fixtures for integration tests.

Commands run in-process through main() against files in a temporary
workspace, so every test starts from an empty directory.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any

import pytest

from span_decomp.main import main
from span_decomp.repositories import JsonRepository

if TYPE_CHECKING:
    from collections.abc import Callable
    from pathlib import Path

    from span_decomp.models.structure import Structure


# =============================================================================
# CLI RUNNER
# =============================================================================


@dataclass(frozen=True)
class CliResult:
    """Exit code and captured streams of one command."""

    code: int
    out: str
    err: str

    def json(self) -> Any:
        """Parse stdout as one JSON document."""
        return json.loads(self.out)

    def lines(self) -> list[dict[str, Any]]:
        """Parse stdout as JSON lines."""
        return [json.loads(line) for line in self.out.splitlines() if line]


@dataclass(frozen=True)
class Cli:
    """Runs span-decomp commands inside a workspace directory."""

    workspace: Path
    capsys: pytest.CaptureFixture[str]

    def __call__(self, *argv: str) -> CliResult:
        """Run one command and capture what it printed."""
        self.capsys.readouterr()
        code = main(list(argv))
        captured = self.capsys.readouterr()
        return CliResult(code=code, out=captured.out, err=captured.err)

    def path(self, name: str) -> str:
        """Absolute path of a workspace file."""
        return str(self.workspace / name)


@pytest.fixture
def workspace(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Path:
    """Empty working directory with quiet, readable logs."""
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("SPAN_DECOMP_ENVIRONMENT", "development")
    monkeypatch.setenv("SPAN_DECOMP_LOG_LEVEL", "WARNING")
    monkeypatch.delenv("SPAN_DECOMP_LOG_FILE", raising=False)
    return tmp_path


@pytest.fixture
def cli(workspace: Path, capsys: pytest.CaptureFixture[str]) -> Cli:
    """Command runner bound to the workspace."""
    return Cli(workspace=workspace, capsys=capsys)


# =============================================================================
# FILE FIXTURES
# =============================================================================


@pytest.fixture
def save_structure(workspace: Path) -> Callable[[Structure, str], str]:
    """Write a structure into the workspace and return its path."""
    repository = JsonRepository(workspace)

    def _save(structure: Structure, name: str) -> str:
        return str(repository.save_structure(structure, name))

    return _save
