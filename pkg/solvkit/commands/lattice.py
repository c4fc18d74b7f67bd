"""Lattice commands — Smith normal form and primitivity of abelian images."""

import sys

import click

from solvkit.algebra.lattice import (
    abelian_rank,
    bezout_vector,
    format_matrix,
    is_direct_factor,
    is_primitive,
    parse_matrix,
    smith_normal_form,
    unimodular_complete,
)
from solvkit.commands.common import EXIT_NEGATIVE, EXIT_USAGE, emit, fail, guarded, read_text


@click.command("snf")
@click.argument("matrix_file", type=click.File("r"))
@guarded
def snf_cmd(matrix_file):
    """Smith normal form U*A*V = D of an integer matrix (comma-separated rows)."""
    A = parse_matrix(read_text(matrix_file))
    if not A:
        fail("matrix file is empty", EXIT_USAGE)
    snf = smith_normal_form(A)
    lines = ["U:", format_matrix(snf.U), "D:", format_matrix(snf.D), "V:", format_matrix(snf.V)]
    lines.append("invariant-factors=" + ",".join(str(f) for f in snf.invariant_factors))
    lines.append(f"rab={abelian_rank(A)}")
    lines.append(f"direct-factor={str(is_direct_factor(A)).lower()}")
    emit(lines)


@click.command("primitive")
@click.argument("vector")
@guarded
def primitive_cmd(vector: str):
    """Decide whether VECTOR (e.g. 2,3,0) is primitive in Z^r; exit 1 when it is not."""
    try:
        v = tuple(int(x) for x in vector.split(","))
    except ValueError:
        fail(f"cannot parse vector {vector!r}", EXIT_USAGE)
        return
    if not is_primitive(v):
        emit(["primitive=false"])
        sys.exit(EXIT_NEGATIVE)
    m = bezout_vector(v)
    emit([
        "primitive=true",
        "bezout=" + ",".join(str(x) for x in m),
        "basis:",
        format_matrix(unimodular_complete(v)),
    ])
