"""
The free metabelian group modulo γ5: truncated Fox coordinates, basic
commutators of weight <= 4, and the swap-commutator coefficient calculus.

An element of M_r / γ5 M_r is stored as its abelianization together with
its class-2 Fox coordinates written in ``y_i = a_i - 1`` and truncated to
y-degree <= 3.  Membership in the lower central series is read off the
coordinates:

    w ∈ γ_c  ⟺  w̄ = 1 and every ∂_j(w) ∈ Δ^(c-1)

so no collection process is needed; the commutator identities become test
oracles instead of rewrite rules.

Design:
  - ``SeriesRing`` is a dense truncated polynomial ring with a precomputed
    multiplication table; elements are plain int tuples.
  - Basic-commutator coordinates come from an integer solve against the
    leading coordinate layers of the basis, cached per (rank, weight), and
    are verified by multiplying back.
  - Grid scans may fan out over a process pool (``settings.SCAN_WORKERS``);
    results are sorted, so output never depends on scheduling.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence

from sympy import Matrix

from solvkit.algebra.groupring import laurent, monomials, shifted_coefficients
from solvkit.algebra.magnus import GroupContext, SolvableElement, embed, left_normed_commutator
from solvkit.algebra.words import SymbolKind, Word, exponent_sum, gen
from solvkit.core.config import settings
from solvkit.core.errors import ContextError, InvariantViolation, PreconditionError

logger = logging.getLogger(__name__)

DEGREE = 3  # weight <= 4 commutators; γ5 is the kernel
Series = tuple[int, ...]
IndexTuple = tuple[int, ...]


# ─── truncated series ──────────────────────────────────────────────────

class SeriesRing:
    """Z[y_1..y_r] modulo monomials of degree > ``degree``."""

    def __init__(self, rank: int, degree: int = DEGREE) -> None:
        self.rank = rank
        self.degree = degree
        self.monomials = monomials(rank, degree)
        self.index = {m: i for i, m in enumerate(self.monomials)}
        self.degrees = [sum(m) for m in self.monomials]
        size = len(self.monomials)
        self.table: list[list[int]] = []
        for m1 in self.monomials:
            row = []
            for m2 in self.monomials:
                m = tuple(x + y for x, y in zip(m1, m2))
                row.append(self.index.get(m, -1))
            self.table.append(row)
        self.size = size
        self._units: dict[tuple[int, ...], Series] = {}

    def zero(self) -> Series:
        return (0,) * self.size

    def constant(self, n: int) -> Series:
        return (n,) + (0,) * (self.size - 1)

    def add(self, x: Series, y: Series) -> Series:
        return tuple(a + b for a, b in zip(x, y))

    def neg(self, x: Series) -> Series:
        return tuple(-a for a in x)

    def mul(self, x: Series, y: Series) -> Series:
        out = [0] * self.size
        nz = [(j, b) for j, b in enumerate(y) if b]
        for i, a in enumerate(x):
            if not a:
                continue
            row = self.table[i]
            for j, b in nz:
                k = row[j]
                if k >= 0:
                    out[k] += a * b
        return tuple(out)

    def unit(self, exps: tuple[int, ...]) -> Series:
        """Expansion of ``a^exps`` = Π (1 + y_i)^e_i."""
        cached = self._units.get(exps)
        if cached is None:
            coefficients = shifted_coefficients(laurent(self.rank, {exps: 1}), self.degree)
            cached = self.from_dict(coefficients)
            self._units[exps] = cached
        return cached

    def from_dict(self, terms: dict[tuple[int, ...], int]) -> Series:
        out = [0] * self.size
        for beta, c in terms.items():
            if sum(beta) <= self.degree:
                out[self.index[beta]] += c
        return tuple(out)

    def order(self, x: Series) -> int | None:
        """Lowest degree with a nonzero coefficient; None for zero."""
        return min((d for d, c in zip(self.degrees, x) if c), default=None)

    def layer(self, x: Series, degree: int) -> list[int]:
        return [c for d, c in zip(self.degrees, x) if d == degree]

    def format(self, x: Series) -> str:
        parts = []
        for m, c in zip(self.monomials, x):
            if not c:
                continue
            label = "*".join(
                f"y{i}" if e == 1 else f"y{i}^{e}" for i, e in enumerate(m, start=1) if e
            )
            body = label if abs(c) == 1 and label else (f"{abs(c)}*{label}" if label else str(abs(c)))
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        if not parts:
            return "0"
        head = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        return head + "".join(f" {s} {b}" for s, b in parts[1:])


@lru_cache(maxsize=None)
def series_ring(rank: int) -> SeriesRing:
    return SeriesRing(rank)


# ─── the quotient group ────────────────────────────────────────────────

@dataclass(frozen=True, slots=True)
class NilElement:
    rank: int
    exps: tuple[int, ...]
    coords: tuple[Series, ...]

    @property
    def is_identity(self) -> bool:
        return not any(self.exps) and not any(any(c) for c in self.coords)

    def weight(self) -> int:
        """Largest c <= 5 with the element in γ_c (5 means trivial mod γ5)."""
        if any(self.exps):
            return 1
        ring = series_ring(self.rank)
        orders = [o for o in (ring.order(c) for c in self.coords) if o is not None]
        return min(orders) + 1 if orders else DEGREE + 2

    def format(self) -> str:
        ring = series_ring(self.rank)
        polys = ";".join(ring.format(c) for c in self.coords)
        return "n5:(" + ",".join(map(str, self.exps)) + ")|[" + polys + "]"

    def __str__(self) -> str:
        return self.format()


class NilGroup:
    """Group law of M_r/γ5 on truncated normal forms."""

    def __init__(self, rank: int) -> None:
        if rank < 1:
            raise ContextError(f"rank must be >= 1, got {rank}")
        self.rank = rank
        self.ring = series_ring(rank)
        self._monomial_elements: dict[tuple[int, ...], NilElement] = {}

    def identity(self) -> NilElement:
        return NilElement(self.rank, (0,) * self.rank, (self.ring.zero(),) * self.rank)

    def generator(self, i: int) -> NilElement:
        if not 1 <= i <= self.rank:
            raise ContextError(f"generator z{i} exceeds rank {self.rank}")
        exps = tuple(int(j == i - 1) for j in range(self.rank))
        coords = tuple(self.ring.constant(int(j == i - 1)) for j in range(self.rank))
        return NilElement(self.rank, exps, coords)

    def multiply(self, a: NilElement, b: NilElement) -> NilElement:
        u = self.ring.unit(a.exps)
        coords = tuple(self.ring.add(ca, self.ring.mul(u, cb)) for ca, cb in zip(a.coords, b.coords))
        return NilElement(self.rank, tuple(x + y for x, y in zip(a.exps, b.exps)), coords)

    def invert(self, a: NilElement) -> NilElement:
        exps = tuple(-x for x in a.exps)
        u = self.ring.unit(exps)
        coords = tuple(self.ring.neg(self.ring.mul(u, c)) for c in a.coords)
        return NilElement(self.rank, exps, coords)

    def power(self, a: NilElement, n: int) -> NilElement:
        base = a if n >= 0 else self.invert(a)
        n = abs(n)
        result = self.identity()
        while n:
            if n & 1:
                result = self.multiply(result, base)
            base = self.multiply(base, base)
            n >>= 1
        return result

    def commutator(self, a: NilElement, b: NilElement) -> NilElement:
        return self.multiply(self.multiply(a, b), self.multiply(self.invert(a), self.invert(b)))

    def left_normed(self, *parts: NilElement) -> NilElement:
        result = self.commutator(parts[0], parts[1])
        for p in parts[2:]:
            result = self.commutator(result, p)
        return result

    def monomial_element(self, exps: Sequence[int]) -> NilElement:
        """``z1^e1 z2^e2 ... zr^er``."""
        key = tuple(exps)
        cached = self._monomial_elements.get(key)
        if cached is None:
            cached = self.identity()
            for i, e in enumerate(key, start=1):
                if e:
                    cached = self.multiply(cached, self.power(self.generator(i), e))
            self._monomial_elements[key] = cached
        return cached

    def embed(self, w: Word) -> NilElement:
        result = self.identity()
        for symbol, e in w.letters:
            if symbol.kind is not SymbolKind.GENERATOR:
                raise ContextError(f"cannot embed variable {symbol}")
            result = self.multiply(result, self.power(self.generator(symbol.index), e))
        return result


@lru_cache(maxsize=None)
def nil_group(rank: int) -> NilGroup:
    return NilGroup(rank)


def nil_project(a: SolvableElement) -> NilElement:
    """Image of a free metabelian element in M_r/γ5."""
    if a.context.klass != 2:
        raise ContextError(f"nil_project needs a class-2 element, got {a.context}")
    assert a.top is not None and a.coords is not None and a.top.exps is not None
    ring = series_ring(a.context.rank)
    coords = tuple(ring.from_dict(shifted_coefficients(c, DEGREE)) if c else ring.zero() for c in a.coords)
    return NilElement(a.context.rank, a.top.exps, coords)


def nil_embed(w: Word, rank: int) -> NilElement:
    return nil_group(rank).embed(w)


# ─── basic commutators ─────────────────────────────────────────────────

def basic_commutators(rank: int, weight: int) -> list[IndexTuple]:
    """Index tuples (i1, ..., iw) with i1 > i2 <= i3 <= ... <= iw."""
    if not 2 <= weight <= DEGREE + 1:
        raise ValueError(f"weight must lie in 2..{DEGREE + 1}")
    out = []
    for t in product(range(1, rank + 1), repeat=weight):
        if t[0] > t[1] and all(t[k] <= t[k + 1] for k in range(1, weight - 1)):
            out.append(t)
    return out


def leading_layer(a: NilElement, weight: int) -> list[int]:
    """Coordinates of y-degree ``weight - 1``, axis-major."""
    ring = series_ring(a.rank)
    out: list[int] = []
    for c in a.coords:
        out.extend(ring.layer(c, weight - 1))
    return out


@dataclass(frozen=True, slots=True)
class _LayerSolver:
    basis: tuple[IndexTuple, ...]
    columns: tuple[tuple[int, ...], ...]
    rows: tuple[int, ...]
    adjugate: tuple[tuple[int, ...], ...]
    det: int


@lru_cache(maxsize=None)
def _layer_solver(rank: int, weight: int) -> _LayerSolver:
    group = nil_group(rank)
    basis = tuple(basic_commutators(rank, weight))
    columns = tuple(
        tuple(leading_layer(group.left_normed(*(group.generator(i) for i in kappa)), weight))
        for kappa in basis
    )
    A = Matrix(len(columns[0]), len(columns), lambda i, j: columns[j][i])
    _, pivots = A.T.rref()
    if len(pivots) != len(basis):
        raise InvariantViolation(f"weight-{weight} basic commutators are dependent for rank {rank}")
    sub = A.extract(list(pivots), list(range(len(basis))))
    adj = sub.adjugate()
    solver = _LayerSolver(
        basis=basis,
        columns=columns,
        rows=tuple(int(p) for p in pivots),
        adjugate=tuple(tuple(int(adj[i, j]) for j in range(adj.cols)) for i in range(adj.rows)),
        det=int(sub.det()),
    )
    logger.debug("layer solver rank=%d weight=%d basis=%d det=%d", rank, weight, len(basis), solver.det)
    return solver


def bc_coordinates(a: NilElement, weight: int = 4) -> dict[IndexTuple, int]:
    """Exponents n_κ with a ≡ Π κ^n_κ modulo γ_(weight+1), for a in γ_weight."""
    if a.weight() < weight:
        raise PreconditionError(f"element is not in γ{weight} (it lies in γ{a.weight()} only)")
    solver = _layer_solver(a.rank, weight)
    target = leading_layer(a, weight)
    picked = [target[r] for r in solver.rows]
    exponents = []
    for row in solver.adjugate:
        num = sum(x * y for x, y in zip(row, picked))
        if num % solver.det:
            raise InvariantViolation("basic-commutator system has a non-integral solution")
        exponents.append(num // solver.det)
    for i, t in enumerate(target):
        if sum(n * col[i] for n, col in zip(exponents, solver.columns)) != t:
            raise InvariantViolation("basic-commutator system is inconsistent")
    return dict(zip(solver.basis, exponents))


def from_bc_coordinates(rank: int, exponents: dict[IndexTuple, int]) -> NilElement:
    group = nil_group(rank)
    result = group.identity()
    for kappa, n in sorted(exponents.items()):
        if n:
            element = group.left_normed(*(group.generator(i) for i in kappa))
            result = group.multiply(result, group.power(element, n))
    return result


# ─── identities ────────────────────────────────────────────────────────

def power_identity_check(k: Sequence[int], indices: Sequence[int] = (2, 1, 1, 1)) -> bool:
    """[z_i1^k1, ..., z_i4^k4] == [z_i1, ..., z_i4]^(k1 k2 k3 k4) modulo γ5."""
    if len(k) != len(indices) or len(k) < 2:
        raise ValueError("need matching exponent and index tuples of length >= 2")
    group = nil_group(max(indices))
    lhs = group.left_normed(*(group.power(group.generator(i), e) for i, e in zip(indices, k)))
    total = 1
    for e in k:
        total *= e
    rhs = group.power(group.left_normed(*(group.generator(i) for i in indices)), total)
    return lhs == rhs


def swap_commutator_coefficients(k: Sequence[int], m: Sequence[int], i: int) -> tuple[int, int, int]:
    """Closed-form exponents of [z_i,z_1,z_1,z_i], [z_i,z_1,z_1,z_1], [z_i,z_1,z_i,z_i]
    in [Πz^m, Πz^k, Πz^k, Πz^m]."""
    if len(k) != len(m) or not 1 < i <= len(k):
        raise ValueError(f"need equal-length vectors with 1 < i <= length, got i={i}")
    k1, ki, m1, mi = k[0], k[i - 1], m[0], m[i - 1]
    delta = k1 * mi - ki * m1
    return delta * (k1 * mi + ki * m1), delta * k1 * m1, delta * ki * mi


def swap_commutator(k: Sequence[int], m: Sequence[int]) -> NilElement:
    group = nil_group(len(k))
    g_k = group.monomial_element(k)
    g_m = group.monomial_element(m)
    return group.left_normed(g_m, g_k, g_k, g_m)


def swap_coefficients_check(k: Sequence[int], m: Sequence[int], i: int) -> bool:
    return swap_coefficients_found(k, m, i) == swap_commutator_coefficients(k, m, i)


def swap_coefficients_found(k: Sequence[int], m: Sequence[int], i: int) -> tuple[int, int, int]:
    coords = bc_coordinates(swap_commutator(k, m), 4)
    return coords[(i, 1, 1, i)], coords[(i, 1, 1, 1)], coords[(i, 1, i, i)]


def is_distinguished_pattern(k: Sequence[int], m: Sequence[int], i: int) -> bool:
    """k1, m_i = ±1 and k_i = m1 = 0: the only shape giving exponents (1, 0, 0)."""
    return abs(k[0]) == 1 and abs(m[i - 1]) == 1 and k[i - 1] == 0 and m[0] == 0


# ─── scans ─────────────────────────────────────────────────────────────

@dataclass(frozen=True, slots=True)
class ScanReport:
    kind: str
    bound: int
    confirmed: bool
    lines: tuple[str, ...]
    solutions: tuple[tuple[int, ...], ...] = ()

    @property
    def verdict_line(self) -> str:
        return f"{self.kind}: {'CONFIRMED' if self.confirmed else 'VIOLATED'} bound={self.bound}"

    def render(self) -> list[str]:
        return [*self.lines, self.verdict_line]


def _check_bound(bound: int) -> None:
    if bound < 1:
        raise PreconditionError(f"scan bound must be >= 1, got {bound}")


def _run_chunks(fn, chunks: Iterable[tuple]) -> list:
    chunks = list(chunks)
    workers = max(1, settings.SCAN_WORKERS)
    if workers == 1 or len(chunks) < 2:
        return [fn(*c) for c in chunks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, *zip(*chunks)))


def _swap_target() -> NilElement:
    group = nil_group(2)
    z1, z2 = group.generator(1), group.generator(2)
    return group.left_normed(z1, z2, z2, z1)


UNIT_SWAP_SOLUTIONS = frozenset({(1, 0, 0, 1), (1, 0, 0, -1), (-1, 0, 0, 1), (-1, 0, 0, -1)})


def swap_solutions_confirmed(solutions: Iterable[tuple[int, int, int, int]]) -> bool:
    """Exactly the four solutions (±1, 0, 0, ±1), none missing and nothing else."""
    return set(solutions) == UNIT_SWAP_SOLUTIONS


def _swap_chunk(a: int, bound: int) -> list[tuple[int, int, int, int]]:
    group = nil_group(2)
    target = _swap_target()
    found = []
    span = range(-bound, bound + 1)
    for b, c, d in product(span, span, span):
        g1 = group.monomial_element((a, b))
        g2 = group.monomial_element((c, d))
        if group.left_normed(g1, g2, g2, g1) == target:
            found.append((a, b, c, d))
    return found


def swap_equation_scan(bound: int) -> ScanReport:
    """All (a,b,c,d) in [-B,B]^4 with [g1,g2,g2,g1] ≡ [z1,z2,z2,z1] mod γ5,
    g1 = z1^a z2^b, g2 = z1^c z2^d.

    Commutator tails of g1, g2 only move the bracket inside γ5, so the
    abelian parts decide; ``commutator_tail_check`` exercises that.
    """
    _check_bound(bound)
    span = range(-bound, bound + 1)
    solutions = sorted(s for chunk in _run_chunks(_swap_chunk, ((a, bound) for a in span)) for s in chunk)
    confirmed = swap_solutions_confirmed(solutions)
    if not confirmed:
        logger.warning("swap scan bound=%d found solutions other than the four units", bound)
    lines = tuple(f"({a},{b},{c},{d})" for a, b, c, d in solutions)
    return ScanReport("LEMMA7-QUOTIENT", bound, confirmed, lines, tuple(solutions))


def _coefficient_chunk(k: tuple[int, ...], bound: int, i: int) -> list[tuple]:
    """(k, m, expected, found, distinguished, unit) rows for one k that disagree
    or touch the distinguished exponent pattern."""
    rows = []
    span = range(-bound, bound + 1)
    for m in product(span, repeat=len(k)):
        expected = swap_commutator_coefficients(k, m, i)
        found = swap_coefficients_found(k, m, i)
        distinguished = is_distinguished_pattern(k, m, i)
        unit = found == (1, 0, 0)
        if found != expected or distinguished or unit:
            rows.append((k, m, expected, found, distinguished, unit))
    return rows


def swap_coefficients_scan(bound: int, rank: int = 3, i: int = 2) -> ScanReport:
    """Compare closed-form and extracted swap coefficients on the full grid
    |k_j|, |m_j| <= B, and check that exponents (1,0,0) occur exactly on the
    distinguished pattern."""
    _check_bound(bound)
    if not 1 < i <= rank:
        raise PreconditionError(f"index i must satisfy 1 < i <= {rank}, got {i}")
    span = range(-bound, bound + 1)
    ks = list(product(span, repeat=rank))
    rows = sorted(
        (r for chunk in _run_chunks(_coefficient_chunk, ((k, bound, i) for k in ks)) for r in chunk),
        key=lambda r: (r[0], r[1]),
    )
    mismatches = [r for r in rows if r[2] != r[3]]
    pattern_breaks = [r for r in rows if r[4] != r[5]]
    unit_hits = sum(1 for r in rows if r[5])
    lines = [f"checked={len(ks) ** 2} mismatches={len(mismatches)} unit-pattern={unit_hits}"]
    for k, m, expected, found, *_ in mismatches:
        lines.append(f"k={k} m={m} expected={expected} found={found}")
    for k, m, _, found, distinguished, _ in pattern_breaks:
        lines.append(f"k={k} m={m} found={found} distinguished={distinguished}")
    confirmed = not mismatches and not pattern_breaks
    if not confirmed:
        logger.warning("coefficient scan bound=%d: %d mismatches", bound, len(mismatches))
    return ScanReport("EQ19-ORACLE", bound, confirmed, tuple(lines))


def commutator_tail_check(
    a: int, b: int, c: int, d: int, tails: tuple[Word, Word]
) -> bool:
    """Appending γ2 tails to g1 = z1^a z2^b and g2 = z1^c z2^d leaves
    [g1,g2,g2,g1] unchanged modulo γ5 (computed exactly in S_{2,2})."""
    ctx = GroupContext(2, 2)
    for tail in tails:
        if tail.max_index(SymbolKind.VARIABLE) or any(exponent_sum(tail, gen(j)) for j in (1, 2)):
            raise PreconditionError("tails must be generator words in the derived subgroup")
    plain1 = Word.of(gen(1), a) * Word.of(gen(2), b)
    plain2 = Word.of(gen(1), c) * Word.of(gen(2), d)
    g1 = embed(plain1 * tails[0], ctx)
    g2 = embed(plain2 * tails[1], ctx)
    full = nil_project(left_normed_commutator(g1, g2, g2, g1))
    group = nil_group(2)
    e1 = group.monomial_element((a, b))
    e2 = group.monomial_element((c, d))
    return full == group.left_normed(e1, e2, e2, e1)
