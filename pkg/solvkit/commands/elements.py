"""Element commands — normal forms, equality, Fox derivatives, valuations."""

import re
import sys

import click

from solvkit.algebra.groupring import parse_laurent, valuation
from solvkit.algebra.magnus import derived_depth, embed, fox
from solvkit.algebra.words import parse_word
from solvkit.commands.common import (
    EXIT_NEGATIVE,
    emit,
    group_options,
    guarded,
    machine_option,
    session,
)


@click.command("nf")
@group_options
@click.option("--eq", "other", default=None, help="Compare WORD with this word instead of printing.")
@machine_option
@click.argument("word")
@guarded
def nf_cmd(rank: int, klass: int, other: str | None, machine: bool, word: str):
    """Print the normal form of WORD in S_{r,d}."""
    cfg = session(rank=rank, klass=klass, mode="machine" if machine else "text")
    ctx = cfg.context
    element = embed(parse_word(word, ctx.rank), ctx)

    if other is not None:
        equal = element == embed(parse_word(other, ctx.rank), ctx)
        emit([f"equal={str(equal).lower()}" if cfg.machine else ("EQUAL" if equal else "NOT-EQUAL")])
        if not equal:
            sys.exit(EXIT_NEGATIVE)
        return

    if cfg.machine:
        depth = derived_depth(element)
        emit([
            f"nf={element.serial}",
            f"identity={str(element.is_identity).lower()}",
            f"derived-depth={'none' if depth is None else depth}",
        ])
    else:
        emit([element.serial])


@click.command("fox")
@group_options
@click.option("--axis", "-j", type=int, default=None, help="Only the derivative along z_j.")
@click.argument("word")
@guarded
def fox_cmd(rank: int, klass: int, axis: int | None, word: str):
    """Print the left Fox derivatives of WORD, valued in Z[S_{r,d-1}]."""
    ctx = session(rank=rank, klass=klass).context
    w = parse_word(word, ctx.rank)
    axes = [axis] if axis is not None else range(1, ctx.rank + 1)
    emit(f"d{j} = {fox(w, j, ctx).format()}" for j in axes)


@click.command("omega")
@click.option("--rank", "-r", type=int, default=None, help="Number of variables a1..ar (default: inferred).")
@click.option("--cap", type=click.IntRange(min=1), default=None, help="Truncation cap (default SOLVKIT_VALUATION_CAP).")
@click.argument("polynomial")
@guarded
def valuation_cmd(rank: int | None, cap: int | None, polynomial: str):
    """Print the augmentation-ideal valuation of a Laurent POLYNOMIAL in a1..ar."""
    if rank is None:
        rank = max((int(t) for t in re.findall(r"a(\d+)", polynomial)), default=1)
    cfg = session(rank=rank, cap=cap) if cap is not None else session(rank=rank)
    x = parse_laurent(polynomial, cfg.rank)
    emit([f"omega={valuation(x, cfg.cap)}"])
