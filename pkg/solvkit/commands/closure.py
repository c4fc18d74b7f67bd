"""Closure commands — retractions, subgroup analysis, bounded search, conjugators."""

import sys

import click

from solvkit.algebra.magnus import embed
from solvkit.algebra.words import format_word, parse_word
from solvkit.analysis.closure import (
    EquationSystem,
    Subgroup,
    analyze,
    cyclic_retract,
    extract_conjugator,
    is_idempotent,
    verify_retraction,
)
from solvkit.analysis.search import bounded_search
from solvkit.commands.common import (
    EXIT_NEGATIVE,
    EXIT_USAGE,
    emit,
    fail,
    group_options,
    guarded,
    machine_option,
    read_text,
    search_options,
    session,
)
from solvkit.schemas.report import closure_record, search_record


@click.command("retract")
@group_options
@click.argument("word")
@guarded
def retract_cmd(rank: int, klass: int, word: str):
    """Build the cyclic retraction onto <WORD>; exit 1 when its abelian image is not primitive."""
    ctx = session(rank=rank, klass=klass).context
    h = parse_word(word, ctx.rank)
    attempt = cyclic_retract(h, ctx)
    if attempt.retraction is None:
        emit([f"retraction: none ({attempt.reason})"])
        sys.exit(EXIT_NEGATIVE)
    check = verify_retraction(attempt.retraction, Subgroup(ctx, (h,)))
    emit([
        *attempt.retraction.lines(),
        f"verified={str(check.passed).lower()}",
        f"idempotent={str(is_idempotent(attempt.retraction)).lower()}",
    ])


@click.command("analyze")
@group_options
@search_options
@click.option("--search", "use_search", is_flag=True, help="Run bounded searches to upgrade verdicts.")
@machine_option
@click.argument("subgroup_file", type=click.File("r"))
@guarded
def analyze_cmd(rank, klass, max_length, exp_cap, use_search, machine, subgroup_file):
    """Analyze the subgroup listed in SUBGROUP_FILE (one generator word per line)."""
    cfg = session(rank=rank, klass=klass, max_length=max_length, exponent_cap=exp_cap,
                  mode="machine" if machine else "text")
    H = Subgroup.parse(read_text(subgroup_file), cfg.context)
    report = analyze(H, search=use_search, bounds=cfg.bounds)
    emit(closure_record(report).lines() if cfg.machine else report.lines())


@click.command("search")
@group_options
@search_options
@machine_option
@click.argument("equations_file", type=click.File("r"))
@click.argument("subgroup_file", type=click.File("r"))
@guarded
def search_cmd(rank, klass, max_length, exp_cap, machine, equations_file, subgroup_file):
    """Look for a solution in H of the system in EQUATIONS_FILE; exit 1 when none is found."""
    cfg = session(rank=rank, klass=klass, max_length=max_length, exponent_cap=exp_cap,
                  mode="machine" if machine else "text")
    system = EquationSystem.parse(read_text(equations_file), cfg.rank)
    if not system.equations:
        fail("equations file is empty", EXIT_USAGE)
    H = Subgroup.parse(read_text(subgroup_file), cfg.context)
    result = bounded_search(system, H, cfg.bounds)
    emit(search_record(result).lines() if cfg.machine else result.lines())
    if not result.found:
        sys.exit(EXIT_NEGATIVE)


@click.command("dextract")
@group_options
@click.argument("elements_file", type=click.File("r"))
@guarded
def conjugator_cmd(rank: int, klass: int, elements_file):
    """Find d with c_i = d^(1 - a_i) for the words c_1..c_k in ELEMENTS_FILE; exit 1 if inconsistent."""
    ctx = session(rank=rank, klass=klass).context
    words = [
        parse_word(line, ctx.rank)
        for line in (raw.split("#", 1)[0].strip() for raw in read_text(elements_file).splitlines())
        if line
    ]
    if not words:
        fail("elements file is empty", EXIT_USAGE)
    extraction = extract_conjugator([embed(w, ctx) for w in words])
    if extraction.d is None:
        emit([f"d: none ({extraction.reason})"])
        sys.exit(EXIT_NEGATIVE)
    emit([f"d={extraction.d.serial}", f"elements={len(words)}"])
    for i, w in enumerate(words, start=1):
        emit([f"c{i} = {format_word(w)}"])
