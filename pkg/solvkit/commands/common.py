"""Shared CLI plumbing: group flags, session validation, output and error handling."""

import functools
import sys
from typing import Callable, Iterable

import click
from pydantic import ValidationError
from rich.console import Console
from rich.markup import escape

from solvkit.core.config import settings
from solvkit.core.errors import SolvkitError
from solvkit.schemas.session import SessionConfig

console = Console(highlight=False, soft_wrap=True, emoji=False)
err_console = Console(stderr=True, highlight=False, soft_wrap=True, emoji=False)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2


def group_options(fn: Callable) -> Callable:
    """-r / -d flags for the ambient group S_{r,d}."""
    fn = click.option("--class", "-d", "klass", type=int, default=settings.DEFAULT_CLASS,
                      show_default=True, help="Derived length d.")(fn)
    fn = click.option("--rank", "-r", type=int, default=settings.DEFAULT_RANK,
                      show_default=True, help="Number of free generators r.")(fn)
    return fn


def search_options(fn: Callable) -> Callable:
    """-L / --exp-cap flags for bounded searches."""
    fn = click.option("--exp-cap", type=click.IntRange(min=1), default=settings.SEARCH_EXPONENT_CAP,
                      show_default=True, help="Largest syllable exponent in candidate words.")(fn)
    fn = click.option("--length", "-L", "max_length", type=click.IntRange(min=0),
                      default=settings.SEARCH_MAX_LENGTH, show_default=True,
                      help="Longest candidate H-word.")(fn)
    return fn


def machine_option(fn: Callable) -> Callable:
    return click.option("--machine", is_flag=True, help="Emit key=value records.")(fn)


def session(**flags) -> SessionConfig:
    """Validate flags; usage errors exit 2."""
    try:
        return SessionConfig(**flags)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(p) for p in first.get("loc", ())) or "flags"
        fail(f"invalid {where}: {first['msg']}", EXIT_USAGE)
        raise  # unreachable


def emit(lines: Iterable[str]) -> None:
    for line in lines:
        console.print(line, markup=False)


def fail(message: str, code: int) -> None:
    err_console.print(f"[red]✗ {escape(message)}[/red]", markup=True)
    sys.exit(code)


def read_text(stream) -> str:
    try:
        return stream.read()
    except UnicodeDecodeError as exc:
        fail(f"cannot read input: {exc}", EXIT_USAGE)
        raise  # unreachable


def guarded(fn: Callable) -> Callable:
    """Translate ``SolvkitError`` into a red stderr message and its exit code."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except SolvkitError as exc:
            fail(exc.detail, exc.exit_code)
        except (ValueError, ZeroDivisionError) as exc:
            fail(str(exc), EXIT_USAGE)

    return wrapper
