"""
Shared fixtures for the solvkit test suite.

Key design decisions:
  - Environment is set BEFORE any solvkit import so pydantic-settings
    picks it up; invariant checking is on for every test run
  - Scans run in-process (SCAN_WORKERS=1) for deterministic timing
"""
import os
import sys

import pytest

# ---------------------------------------------------------------------------
# Ensure the project root is importable
# ---------------------------------------------------------------------------
PROJECT_ROOT = os.path.join(os.path.dirname(__file__), "..")
sys.path.insert(0, PROJECT_ROOT)

os.environ.update(
    {
        "SOLVKIT_CHECK_INVARIANTS": "true",
        "SOLVKIT_SCAN_WORKERS": "1",
        "SOLVKIT_DEBUG": "false",
        "SOLVKIT_MAX_CLASS": "4",
    }
)

from click.testing import CliRunner  # noqa: E402

from solvkit.algebra.magnus import GroupContext  # noqa: E402
from solvkit.analysis.search import SearchBounds  # noqa: E402


@pytest.fixture
def s22() -> GroupContext:
    """Free metabelian group of rank 2."""
    return GroupContext(2, 2)


@pytest.fixture
def s32() -> GroupContext:
    return GroupContext(3, 2)


@pytest.fixture
def s23() -> GroupContext:
    """Free solvable group of derived length 3, rank 2."""
    return GroupContext(2, 3)


@pytest.fixture
def small_bounds() -> SearchBounds:
    return SearchBounds(max_length=3, exponent_cap=2, max_candidates=200_000)


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


@pytest.fixture
def write_file(tmp_path):
    """Write text to a temp file and return its path as a string."""

    def _write(name: str, text: str) -> str:
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return _write
