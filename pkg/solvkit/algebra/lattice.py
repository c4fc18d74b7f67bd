"""
Integer lattice algebra on abelianizations.

Smith normal form with tracked unimodular transforms, and the tests built
on it: abelian rank of a subgroup, primitivity, direct-factor detection and
completion of a primitive vector to a unimodular basis.

Design:
  - Elimination runs on plain Python ints (no overflow); results are
    returned as ``sympy.ImmutableMatrix`` so callers get exact matrix
    products and determinants for free.
  - Pivot rule: the nonzero entry of minimal absolute value in the active
    block, ties broken by lowest (row, col).  Output is deterministic.
  - Diagonal entries are made nonnegative by sign flips folded into U.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from math import gcd
from typing import Sequence

from sympy import ImmutableMatrix

from solvkit.core.errors import NotPrimitiveError, ZeroElementError

logger = logging.getLogger(__name__)

IntVector = tuple[int, ...]
IntMatrix = tuple[IntVector, ...]


@dataclass(frozen=True, slots=True)
class SmithDecomposition:
    """``U * A * V == D`` with U, V unimodular and a divisibility chain on D."""

    U: ImmutableMatrix
    D: ImmutableMatrix
    V: ImmutableMatrix

    @property
    def diagonal(self) -> IntVector:
        return tuple(int(self.D[i, i]) for i in range(min(self.D.shape)))

    @property
    def invariant_factors(self) -> IntVector:
        return tuple(d for d in self.diagonal if d != 0)


def as_int_matrix(A: Sequence[Sequence[int]] | ImmutableMatrix) -> IntMatrix:
    if isinstance(A, ImmutableMatrix):
        return tuple(tuple(int(A[i, j]) for j in range(A.cols)) for i in range(A.rows))
    return tuple(tuple(int(x) for x in row) for row in A)


def _identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _min_pivot(M: list[list[int]], s: int) -> tuple[int, int] | None:
    best: tuple[int, int] | None = None
    best_abs = 0
    for i in range(s, len(M)):
        for j in range(s, len(M[0])):
            v = abs(M[i][j])
            if v and (best is None or v < best_abs):
                best, best_abs = (i, j), v
    return best


def smith_normal_form(A: Sequence[Sequence[int]] | ImmutableMatrix) -> SmithDecomposition:
    rows = as_int_matrix(A)
    m = len(rows)
    n = len(rows[0]) if m else 0
    M = [list(r) for r in rows]
    U = _identity(m)
    V = _identity(n)

    def swap_rows(i: int, k: int) -> None:
        M[i], M[k] = M[k], M[i]
        U[i], U[k] = U[k], U[i]

    def swap_cols(j: int, k: int) -> None:
        for row in M:
            row[j], row[k] = row[k], row[j]
        for row in V:
            row[j], row[k] = row[k], row[j]

    def add_row(target: int, source: int, q: int) -> None:
        # row_target -= q * row_source
        M[target] = [a - q * b for a, b in zip(M[target], M[source])]
        U[target] = [a - q * b for a, b in zip(U[target], U[source])]

    def add_col(target: int, source: int, q: int) -> None:
        for row in M:
            row[target] -= q * row[source]
        for row in V:
            row[target] -= q * row[source]

    for s in range(min(m, n)):
        while True:
            pivot = _min_pivot(M, s)
            if pivot is None:
                break
            pi, pj = pivot
            if pi != s:
                swap_rows(s, pi)
            if pj != s:
                swap_cols(s, pj)
            p = M[s][s]

            dirty = False
            for i in range(s + 1, m):
                if M[i][s]:
                    add_row(i, s, M[i][s] // p)
                    dirty = dirty or M[i][s] != 0
            for j in range(s + 1, n):
                if M[s][j]:
                    add_col(j, s, M[s][j] // p)
                    dirty = dirty or M[s][j] != 0
            if dirty:
                continue

            offender = next(
                (i for i in range(s + 1, m) for j in range(s + 1, n) if M[i][j] % p),
                None,
            )
            if offender is None:
                break
            logger.debug("SNF step %d: divisibility fix using row %d", s, offender)
            add_row(s, offender, -1)
        if M[s][s] < 0:
            M[s] = [-x for x in M[s]]
            U[s] = [-x for x in U[s]]

    return SmithDecomposition(
        U=ImmutableMatrix(m, m, [x for r in U for x in r]) if m else ImmutableMatrix.zeros(0, 0),
        D=ImmutableMatrix(m, n, [x for r in M for x in r]) if m and n else ImmutableMatrix.zeros(m, n),
        V=ImmutableMatrix(n, n, [x for r in V for x in r]) if n else ImmutableMatrix.zeros(0, 0),
    )


def abelian_rank(A: Sequence[Sequence[int]] | ImmutableMatrix) -> int:
    """Rank of the subgroup of Z^r generated by the rows of *A*."""
    rows = as_int_matrix(A)
    if not rows or not any(any(r) for r in rows):
        return 0
    return len(smith_normal_form(rows).invariant_factors)


def _content(v: Sequence[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, x)
    return g


def is_primitive(v: Sequence[int]) -> bool:
    if not any(v):
        raise ZeroElementError("the zero vector is never primitive")
    return _content(v) == 1


def is_direct_factor(A: Sequence[Sequence[int]] | ImmutableMatrix) -> bool:
    """True iff the row span of *A* is a direct summand of Z^r."""
    rows = as_int_matrix(A)
    if not rows or not any(any(r) for r in rows):
        return True
    return all(d == 1 for d in smith_normal_form(rows).invariant_factors)


def bezout_vector(v: Sequence[int]) -> IntVector:
    """A vector m with <m, v> = 1 (v must be primitive)."""
    if not is_primitive(v):
        raise NotPrimitiveError(f"{tuple(v)} is not primitive")
    snf = smith_normal_form([list(v)])
    u = int(snf.U[0, 0])
    return tuple(u * int(snf.V[i, 0]) for i in range(len(v)))


def unimodular_complete(v: Sequence[int]) -> ImmutableMatrix:
    """An r x r unimodular matrix whose first row is exactly *v*."""
    if not is_primitive(v):
        raise NotPrimitiveError(f"{tuple(v)} is not primitive")
    snf = smith_normal_form([list(v)])
    # U v V = e1 with U = (±1), so v = U^-1 e1 V^-1: first row of V^-1 is u*v.
    W = snf.V.inv()
    u = int(snf.U[0, 0])
    rows = [[int(W[i, j]) for j in range(W.cols)] for i in range(W.rows)]
    rows[0] = [u * x for x in rows[0]]
    assert tuple(rows[0]) == tuple(v)
    return ImmutableMatrix(rows)


def two_generator_check(A: Sequence[Sequence[int]]) -> bool:
    """Two rows spanning a rank-2 direct factor of Z^r."""
    rows = as_int_matrix(A)
    return len(rows) == 2 and abelian_rank(rows) == 2 and is_direct_factor(rows)


# ─── serialization ──────────────────────────────────────────────────────

def format_matrix(A: Sequence[Sequence[int]] | ImmutableMatrix) -> str:
    return "\n".join(",".join(str(x) for x in row) for row in as_int_matrix(A))


def parse_matrix(text: str) -> IntMatrix:
    rows = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            rows.append(tuple(int(x) for x in line.split(",")))
    if rows and len({len(r) for r in rows}) != 1:
        raise ValueError("matrix rows have different lengths")
    return tuple(rows)
