"""
Closure analysis for subgroups of free solvable groups.

Builds and verifies retractions, applies the sufficient-condition rules
that relate verbal closedness to retracts, and carries the supporting
computations: the conjugation fix-up, extraction of a common conjugator
from module relations, and Fox linear systems for the cyclic-image rule.

Verdicts:
  ┌──────────────────────┬────────────────────────────────────────────────┐
  │ retract-constructed  │ a retraction was built and verified            │
  │ not-verbally-closed  │ a necessary condition for closedness fails     │
  │ conditional          │ a rule's hypothesis pattern matches; closedness │
  │                      │ itself is assumed, not decided                 │
  │ equals-full-group    │ every z_i was certified as an H-word           │
  │ unknown              │ no rule applies                                │
  └──────────────────────┴────────────────────────────────────────────────┘

Design:
  - Verbal closedness is never claimed decided.
  - Every returned retraction has passed ``verify_retraction``; membership
    of images in H is shown by explicit H-words (witnesses).
  - Stateless engine with a module-level singleton ``closure_analyzer``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from math import gcd
from typing import Sequence

from sympy import Matrix, expand

from solvkit.algebra.groupring import (
    FreeAbelianGroup,
    GroupRingElement,
    exact_div,
    from_sympy,
    laurent_variable,
    specialize,
    to_sympy,
)
from solvkit.algebra.lattice import (
    abelian_rank,
    bezout_vector,
    is_direct_factor,
    smith_normal_form,
    two_generator_check as lattice_two_generator_check,
)
from solvkit.algebra.magnus import (
    GroupContext,
    Retraction,
    SolvableElement,
    coefficient_group,
    conjugate,
    embed,
    evaluate,
    fox,
    fox_evaluated,
    fundamental_identity_holds,
    generator,
    identity,
    identity_endomorphism,
    invert,
    key_of,
    module_power,
    multiply,
    power,
    project,
)
from solvkit.algebra.words import (
    SymbolKind,
    Word,
    commutator,
    exponent_vector,
    format_word,
    free_reduce,
    gen,
    parse_word,
    substitute,
    var,
)
from solvkit.analysis.search import (
    H_NAMES,
    SearchBounds,
    SearchResult,
    bounded_search,
    certify_generators,
    find_witness,
)
from solvkit.core.errors import (
    ContextError,
    GroupMismatchError,
    InvariantViolation,
    PreconditionError,
    ZeroElementError,
)

logger = logging.getLogger(__name__)


# ─── inputs ────────────────────────────────────────────────────────────

def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].strip()


@dataclass(frozen=True)
class Subgroup:
    """H = <h1, ..., hm> given by generator words."""

    context: GroupContext
    generators: tuple[Word, ...]

    def __post_init__(self) -> None:
        if not self.generators:
            raise PreconditionError("a subgroup needs at least one generator (use 1 for the trivial one)")
        for w in self.generators:
            if w.max_index(SymbolKind.VARIABLE):
                raise ContextError(f"subgroup generator {w} contains variables")
            if w.max_index(SymbolKind.GENERATOR) > self.context.rank:
                raise ContextError(f"subgroup generator {w} exceeds rank {self.context.rank}")

    @classmethod
    def parse(cls, text: str, context: GroupContext) -> Subgroup:
        """One generator word per line; ``#`` starts a comment."""
        words = [parse_word(line, context.rank) for line in map(_strip_comment, text.splitlines()) if line]
        return cls(context, tuple(words))

    @cached_property
    def exponent_matrix(self) -> tuple[tuple[int, ...], ...]:
        return tuple(exponent_vector(w, self.context.rank) for w in self.generators)

    @cached_property
    def normal_forms(self) -> tuple[SolvableElement, ...]:
        return tuple(embed(w, self.context) for w in self.generators)

    @cached_property
    def abelian_rank(self) -> int:
        return abelian_rank(self.exponent_matrix)

    def element(self, h_word: Word) -> SolvableElement:
        """Value of an H-word (x_k standing for h_k)."""
        return evaluate(h_word, self.normal_forms, context=self.context)

    def expand(self, h_word: Word) -> Word:
        """The generator word obtained by writing out an H-word."""
        assignment = {var(k): w for k, w in enumerate(self.generators, start=1)}
        return substitute(h_word, assignment)


@dataclass(frozen=True, slots=True)
class Equation:
    """``lhs(x1..xn) = rhs`` with constants only on the right."""

    lhs: Word
    rhs: Word

    def __post_init__(self) -> None:
        if self.lhs.max_index(SymbolKind.GENERATOR):
            raise PreconditionError(f"left side {self.lhs} must not contain constants")
        if self.rhs.max_index(SymbolKind.VARIABLE):
            raise PreconditionError(f"right side {self.rhs} must not contain variables")

    def __str__(self) -> str:
        return f"{format_word(self.lhs)} = {format_word(self.rhs)}"


@dataclass(frozen=True, slots=True)
class EquationSystem:
    equations: tuple[Equation, ...]
    variables: int

    def __post_init__(self) -> None:
        used = max((eq.lhs.max_index(SymbolKind.VARIABLE) for eq in self.equations), default=0)
        if used > self.variables:
            raise PreconditionError(f"equations use x{used} but only {self.variables} variables declared")

    @classmethod
    def of(cls, equations: Sequence[Equation]) -> EquationSystem:
        n = max((eq.lhs.max_index(SymbolKind.VARIABLE) for eq in equations), default=0)
        return cls(tuple(equations), n)

    @classmethod
    def parse(cls, text: str, rank: int) -> EquationSystem:
        """One ``lhs = rhs`` per line; ``#`` starts a comment."""
        equations = []
        for line in map(_strip_comment, text.splitlines()):
            if not line:
                continue
            if line.count("=") != 1:
                raise PreconditionError(f"expected exactly one '=' in {line!r}")
            lhs, rhs = line.split("=")
            equations.append(Equation(parse_word(lhs, rank), parse_word(rhs, rank)))
        return cls.of(equations)

    def solved_by(self, images: Sequence[SolvableElement], context: GroupContext) -> bool:
        return all(
            evaluate(eq.lhs, images, context=context) == evaluate(eq.rhs, (), context=context)
            for eq in self.equations
        )


def split_equation(w: Word) -> EquationSystem:
    """Turn ``w(x, constants) = 1`` into split form.

    Each maximal run of generator letters becomes a fresh variable with a side
    equation ``x_new = run``; the main equation reads ``w' = 1``.
    """
    n = w.max_index(SymbolKind.VARIABLE)
    letters: list = []
    side: list[Equation] = []
    run: list = []

    def close_run() -> None:
        if run:
            fresh = var(n + len(side) + 1)
            side.append(Equation(Word.of(fresh), free_reduce(run)))
            letters.append((fresh, 1))
            run.clear()

    for symbol, e in w.letters:
        if symbol.kind is SymbolKind.GENERATOR:
            run.append((symbol, e))
        else:
            close_run()
            letters.append((symbol, e))
    close_run()
    main = Equation(free_reduce(letters), Word.identity())
    return EquationSystem.of([main, *side])


def commutator_equation(h: Word, pairs: int = 1) -> EquationSystem:
    """``[x1,x2][x3,x4]...[x(2k-1),x(2k)] = h``."""
    if pairs < 1:
        raise ValueError("need at least one commutator pair")
    lhs = Word.identity()
    for j in range(1, pairs + 1):
        lhs = lhs * commutator(Word.of(var(2 * j - 1)), Word.of(var(2 * j)))
    return EquationSystem((Equation(lhs, h),), 2 * pairs)


# ─── results ───────────────────────────────────────────────────────────

class Verdict(str, Enum):
    RETRACT_CONSTRUCTED = "retract-constructed"
    NOT_VERBALLY_CLOSED = "not-verbally-closed"
    CONDITIONAL = "conditional"
    EQUALS_FULL_GROUP = "equals-full-group"
    UNKNOWN = "unknown"


class Rule(str, Enum):
    DERIVED_SUBGROUP = "derived-subgroup"
    CYCLIC_IMAGE = "cyclic-image"
    FULL_IMAGE = "full-image"
    TWO_GENERATED = "two-generated"
    METABELIAN_RANK = "metabelian-rank"
    DIRECT_FACTOR = "abelian-direct-factor"
    NONE = "none"


@dataclass(frozen=True, slots=True)
class RetractAttempt:
    retraction: Retraction | None
    reason: str
    exponent_vector: tuple[int, ...] = ()
    multiplier: tuple[int, ...] = ()

    @property
    def succeeded(self) -> bool:
        return self.retraction is not None


@dataclass(frozen=True, slots=True)
class RetractionVerification:
    passed: bool
    fixes: tuple[bool, ...]
    witnesses: tuple[Word | None, ...]
    reason: str

    def __bool__(self) -> bool:
        return self.passed


@dataclass(frozen=True, slots=True)
class ConjugatorExtraction:
    d: SolvableElement | None
    reason: str

    @property
    def consistent(self) -> bool:
        return self.d is not None


@dataclass(frozen=True, slots=True)
class FoxSystem:
    """Module relations Σ_j N_ij c_j = 0 over Z[a1^±1] for H = <z1 c1, c2, ..., cm>."""

    supported: bool
    reason: str
    matrix: tuple[tuple[GroupRingElement, ...], ...] = ()
    determinant: GroupRingElement | None = None
    residue: int | None = None
    solves: bool = False
    annihilates: bool = False

    def lines(self) -> list[str]:
        if not self.supported:
            return [f"fox-system: unsupported ({self.reason})"]
        out = [f"fox-system: size={len(self.matrix)} solves={str(self.solves).lower()}"]
        for i, row in enumerate(self.matrix, start=1):
            out.append(f"fox-system: row{i} = [" + "; ".join(e.format() for e in row) + "]")
        assert self.determinant is not None
        out.append(f"fox-system: det = {self.determinant.format()}")
        out.append(f"fox-system: det at a1=1 = {self.residue}")
        out.append(f"fox-system: annihilates = {str(self.annihilates).lower()}")
        return out


@dataclass(frozen=True, slots=True)
class TransportedSolution:
    elements: tuple[SolvableElement, ...]
    words: tuple[Word, ...] | None
    solves: bool


@dataclass(frozen=True)
class ClosureReport:
    abelian_rank: int
    rule: Rule
    verdict: Verdict
    retraction: Retraction | None = None
    justification: tuple[str, ...] = ()
    fox_system: FoxSystem | None = None
    search: SearchResult | None = None
    extra: tuple[str, ...] = field(default=())

    def lines(self) -> list[str]:
        out = [
            f"rab={self.abelian_rank}",
            f"rule={self.rule.value}",
            f"verdict={self.verdict.value}",
        ]
        if self.retraction is not None:
            out.extend(self.retraction.lines())
        if self.search is not None:
            out.extend(self.search.lines())
        if self.fox_system is not None:
            out.extend(self.fox_system.lines())
        out.extend(self.extra)
        out.extend(f"justification: {j}" for j in self.justification)
        return out


# ─── retractions ───────────────────────────────────────────────────────

def cyclic_retract(h: Word, ctx: GroupContext, *, h_witness: Word | None = None) -> RetractAttempt:
    """Retraction onto <h> when the abelian image of h is primitive.

    With m chosen so that <m, e> = 1, the map z_i -> h^(m_i) sends h to
    h^<m,e> = h because all images are powers of h.  *h_witness* is the
    H-word naming h (default: h itself is the first generator).
    """
    element = embed(h, ctx)
    if element.is_identity:
        raise ZeroElementError("the cyclic retraction needs a nontrivial element")
    e = exponent_vector(h, ctx.rank)
    if not any(e):
        return RetractAttempt(None, "abelian image is trivial", e)
    g = 0
    for x in e:
        g = gcd(g, x)
    if g != 1:
        return RetractAttempt(None, f"abelian image {e} is not primitive (gcd {g})", e)
    m = bezout_vector(e)
    base_witness = h_witness if h_witness is not None else Word.of(var(1))
    rho = Retraction(
        ctx,
        tuple(power(element, mi) for mi in m),
        tuple(h ** mi for mi in m),
        tuple(base_witness ** mi for mi in m),
    )
    if rho.apply(h) != element:
        raise InvariantViolation(f"cyclic retraction does not fix {format_word(h)}")
    logger.debug("cyclic retraction for %s with multiplier %s", format_word(h), m)
    return RetractAttempt(rho, "primitive", e, m)


def verify_retraction(
    rho: Retraction, H: Subgroup, bounds: SearchBounds | None = None
) -> RetractionVerification:
    """rho fixes every h_k, and every rho(z_i) is an H-word (witnessed)."""
    if rho.context != H.context:
        raise GroupMismatchError(f"retraction over {rho.context}, subgroup over {H.context}")
    fixes = tuple(rho.apply(w) == nf for w, nf in zip(H.generators, H.normal_forms))
    witnesses: list[Word | None] = []
    for i, image in enumerate(rho.images):
        candidate = rho.witnesses[i] if rho.witnesses is not None else None
        if candidate is not None and H.element(candidate) == image:
            witnesses.append(candidate)
        else:
            witnesses.append(find_witness(image, H, bounds))
    reasons = [f"does not fix h{k}" for k, ok in enumerate(fixes, start=1) if not ok]
    reasons += [f"no H-word found for the image of z{i}" for i, w in enumerate(witnesses, start=1) if w is None]
    passed = not reasons
    return RetractionVerification(passed, fixes, tuple(witnesses), "; ".join(reasons) or "verified")


def is_idempotent(rho: Retraction, H: Subgroup | None = None) -> bool:
    """rho(rho(z_i)) == rho(z_i) for every i."""
    for i, image in enumerate(rho.images):
        if rho.words is not None:
            twice = rho.apply(rho.words[i])
        elif rho.witnesses is not None and rho.witnesses[i] is not None and H is not None:
            fixed = tuple(rho.apply(w) for w in H.generators)
            twice = evaluate(rho.witnesses[i], fixed, context=rho.context)
        else:
            raise PreconditionError("idempotence needs image words or H-witnesses")
        if twice != image:
            return False
    return True


def transport_solution(
    rho: Retraction, system: EquationSystem, solution: Sequence[Word]
) -> TransportedSolution:
    """Push a solution in G through rho; the image solves the system as well
    when rho fixes the constants."""
    ctx = rho.context
    elements = tuple(embed(w, ctx) for w in solution)
    if not system.solved_by(elements, ctx):
        raise PreconditionError("the given tuple does not solve the system in G")
    images = tuple(rho.apply(w) for w in solution)
    words = None
    if rho.words is not None:
        assignment = {gen(i): w for i, w in enumerate(rho.words, start=1)}
        words = tuple(substitute(w, assignment, SymbolKind.GENERATOR) for w in solution)
    return TransportedSolution(images, words, system.solved_by(images, ctx))


def conjugation_fixup(
    phi: Retraction,
    a: SolvableElement,
    H: Subgroup,
    *,
    a_word: Word | None = None,
    a_witness: Word | None = None,
    bounds: SearchBounds | None = None,
) -> Retraction:
    """psi(z_i) = a^-1 phi(z_i) a, for phi acting on H as conjugation by a.

    psi is returned only once it verifies as a retraction onto H; images
    with no H-word within ``bounds`` raise PreconditionError.
    """
    if a.context != H.context or phi.context != H.context:
        raise GroupMismatchError("endomorphism, element and subgroup must share a context")
    for k, (w, nf) in enumerate(zip(H.generators, H.normal_forms), start=1):
        if phi.apply(w) != conjugate(nf, a):
            raise PreconditionError(f"phi does not act as conjugation by a on h{k}")
    a_inv = invert(a)
    images = tuple(multiply(multiply(a_inv, img), a) for img in phi.images)
    words = None
    if phi.words is not None and a_word is not None:
        words = tuple(free_reduce(a_word.inverse() * w * a_word) for w in phi.words)
    witnesses = None
    if phi.witnesses is not None:
        a_h = a_witness if a_witness is not None else find_witness(a, H, bounds)
        if a_h is not None:
            witnesses = tuple(
                None if w is None else free_reduce(a_h.inverse() * w * a_h) for w in phi.witnesses
            )
    psi = Retraction(H.context, images, words, witnesses)
    unfixed = [k for k, (w, nf) in enumerate(zip(H.generators, H.normal_forms), start=1) if psi.apply(w) != nf]
    if unfixed:
        raise PreconditionError(f"fixed-up map still moves h{unfixed[0]}")
    check = verify_retraction(psi, H, bounds)
    if not check:
        raise PreconditionError(f"fixed-up map is not a retraction onto H: {check.reason}")
    return Retraction(H.context, images, words, check.witnesses)


# ─── module relations ──────────────────────────────────────────────────

def extract_conjugator(cs: Sequence[SolvableElement]) -> ConjugatorExtraction:
    """The d in G' with c_i = d^(1 - a_i), when the c_i are compatible."""
    if not cs:
        raise PreconditionError("need at least one element")
    ctx = cs[0].context
    if ctx.klass != 2:
        raise ContextError(f"conjugator extraction works in metabelian groups, got {ctx}")
    if len(cs) > ctx.rank:
        raise PreconditionError(f"at most {ctx.rank} elements, got {len(cs)}")
    for c in cs:
        if c.context != ctx:
            raise GroupMismatchError("elements from different groups")
        assert c.top is not None
        if not c.top.is_identity:
            raise PreconditionError(f"{c.serial} does not lie in G'")

    one = GroupRingElement.constant(FreeAbelianGroup(ctx.rank), 1)
    shifts = [one - laurent_variable(ctx.rank, i) for i in range(1, len(cs) + 1)]
    for i in range(1, len(cs)):
        if module_power(cs[0], shifts[i]) != module_power(cs[i], shifts[0]):
            return ConjugatorExtraction(None, f"compatibility fails for c1 and c{i + 1}")

    assert cs[0].coords is not None
    coords = []
    for j, x in enumerate(cs[0].coords, start=1):
        q = exact_div(x, shifts[0])
        if q is None:
            return ConjugatorExtraction(None, f"coordinate {j} of c1 is not divisible by 1 - a1")
        coords.append(q)
    d = SolvableElement(ctx, top=identity(ctx.lower()), coords=tuple(coords))
    if not fundamental_identity_holds(d):
        return ConjugatorExtraction(None, "candidate violates the fundamental identity")
    for i, c in enumerate(cs):
        if module_power(d, shifts[i]) != c:
            return ConjugatorExtraction(None, f"candidate does not reproduce c{i + 1}")
    return ConjugatorExtraction(d, "consistent")


def _fox_shape(H: Subgroup) -> tuple[tuple[Word, ...], str]:
    """Split H = <z1 c1, c2, ..., cm> into the words c_i, or explain why not."""
    ctx = H.context
    e1 = tuple(int(j == 0) for j in range(ctx.rank))
    if H.exponent_matrix[0] != e1:
        return (), "first generator must have abelian image z1"
    cs = [free_reduce(Word.of(gen(1), -1) * H.generators[0]), *H.generators[1:]]
    lower = ctx.klass - 1
    for k, c in enumerate(cs, start=1):
        if lower >= 1 and not project(embed(c, ctx), lower).is_identity:
            return (), f"c{k} does not lie in the last term of the derived series"
    return tuple(cs), "shape z1*c1, c2, ..., cm"


def fox_linear_system(H: Subgroup, solution: Sequence[Word]) -> FoxSystem:
    """Fox data of the relations forced by a solution of {c_i(x) = c_i} in H."""
    ctx = H.context
    if ctx.klass < 2:
        return FoxSystem(False, "class 1 has no module relations")
    cs, reason = _fox_shape(H)
    if not cs:
        return FoxSystem(False, reason)
    if len(solution) != ctx.rank:
        raise PreconditionError(f"a solution assigns {ctx.rank} H-words, got {len(solution)}")

    m = len(cs)
    as_variables = {gen(i): Word.of(var(i)) for i in range(1, ctx.rank + 1)}
    unknowns = [substitute(c, as_variables, SymbolKind.GENERATOR) for c in cs]
    values = [H.element(w) for w in solution]
    solves = all(
        evaluate(u, values, context=ctx) == embed(c, ctx) for u, c in zip(unknowns, cs)
    )

    # the H-generators project to a1, 1, ..., 1 in the cyclic image
    ab = GroupContext(ctx.rank, 1)
    points = [generator(1, ab)] + [identity(ab)] * (m - 1)
    laurent_ring = FreeAbelianGroup(ctx.rank)
    h_assignment = {var(i): w for i, w in enumerate(solution, start=1)}
    matrix: list[tuple[GroupRingElement, ...]] = []
    for i, u in enumerate(unknowns):
        composite = substitute(u, h_assignment)
        row = []
        for j in range(m):
            derivative = fox_evaluated(composite, var(j + 1), points, laurent_ring)
            row.append((1 if i == j else 0) - derivative)
        matrix.append(tuple(row))

    det = from_sympy(expand(Matrix([[to_sympy(x) for x in row] for row in matrix]).det()), ctx.rank)
    residue_element = specialize(det, [1])
    residue = residue_element.augmentation()

    group = coefficient_group(ctx)
    lower = ctx.lower()
    a1 = generator(1, lower)

    def lift(x: GroupRingElement) -> GroupRingElement:
        return x.map_keys(lambda k: key_of(power(a1, k[0])), group)

    fox_matrix = [[fox(c, k, ctx) for k in range(1, ctx.rank + 1)] for c in cs]
    annihilates = all(
        not sum((lift(matrix[i][j]) * fox_matrix[j][k] for j in range(m)), GroupRingElement.zero(group))
        for i in range(m)
        for k in range(ctx.rank)
    )
    return FoxSystem(True, reason, tuple(matrix), det, residue, solves, annihilates)


def two_generator_check(H: Subgroup) -> bool:
    """Two generators whose abelian images span a rank-2 direct factor."""
    return lattice_two_generator_check(H.exponent_matrix)


# ─── decision rules ────────────────────────────────────────────────────

def derived_subgroup_verdict(
    H: Subgroup, *, search: bool = False, bounds: SearchBounds | None = None
) -> ClosureReport:
    """Rule for abelian rank 0: H inside G' is verbally closed only when trivial."""
    rab = H.abelian_rank
    if rab != 0:
        return ClosureReport(rab, Rule.NONE, Verdict.UNKNOWN, justification=(
            f"the derived-subgroup rule needs abelian rank 0, found {rab}",
        ))
    nontrivial = [k for k, nf in enumerate(H.normal_forms, start=1) if not nf.is_identity]
    if not nontrivial:
        ctx = H.context
        rho = Retraction(
            ctx,
            tuple(identity(ctx) for _ in range(ctx.rank)),
            tuple(Word.identity() for _ in range(ctx.rank)),
            tuple(Word.identity() for _ in range(ctx.rank)),
        )
        if not verify_retraction(rho, H, bounds):
            raise InvariantViolation("trivial retraction failed verification")
        return ClosureReport(0, Rule.DERIVED_SUBGROUP, Verdict.RETRACT_CONSTRUCTED, rho, (
            "every generator is trivial; z_i -> 1 retracts onto the trivial subgroup",
        ))

    k = nontrivial[0]
    justification = [
        "H lies in the derived subgroup and is nontrivial",
        f"h{k} is a product of commutators in G but a verbally closed subgroup inside G' is trivial",
    ]
    result = None
    if search:
        system = commutator_equation(H.generators[k - 1], 1)
        result = bounded_search(system, H, bounds)
        if not result.found:
            justification.append(f"[x1,x2] = h{k} has no solution in H within the search bounds")
    return ClosureReport(0, Rule.DERIVED_SUBGROUP, Verdict.NOT_VERBALLY_CLOSED,
                         justification=tuple(justification), search=result)


def _primitive_combination(H: Subgroup) -> Word:
    """An H-word whose abelian image generates the (cyclic, direct-factor) image of H."""
    if len(H.generators) == 1:
        return Word.of(var(1))
    snf = smith_normal_form(H.exponent_matrix)
    t = [int(snf.U[0, k]) for k in range(snf.U.cols)]
    w = Word.identity()
    for k, tk in enumerate(t, start=1):
        if tk:
            w = w * Word.of(var(k), tk)
    return w


class ClosureAnalyzer:
    """
    Stateless rule dispatcher.

    Order: abelian rank 0, direct-factor obstruction, cyclic image, full
    image, two generators, metabelian rank; the first matching rule decides.
    """

    def analyze(
        self, H: Subgroup, *, search: bool = False, bounds: SearchBounds | None = None
    ) -> ClosureReport:
        ctx = H.context
        rab = H.abelian_rank
        logger.info("analyzing %d generators in %s (abelian rank %d)", len(H.generators), ctx, rab)

        if rab == 0:
            return derived_subgroup_verdict(H, search=search, bounds=bounds)

        if not is_direct_factor(H.exponent_matrix):
            factors = smith_normal_form(H.exponent_matrix).invariant_factors
            return ClosureReport(rab, Rule.DIRECT_FACTOR, Verdict.NOT_VERBALLY_CLOSED, justification=(
                f"invariant factors {factors} of the abelian image are not all 1",
                "the abelian image of a verbally closed subgroup is a direct factor of G/G'",
            ))

        if rab == 1:
            return self._cyclic(H, search, bounds)
        if rab == ctx.rank:
            return self._full_image(H, search, bounds)
        if len(H.generators) == 2 and two_generator_check(H):
            return ClosureReport(rab, Rule.TWO_GENERATED, Verdict.CONDITIONAL, justification=(
                "the two abelian images span a direct factor of rank 2",
                "a two-generated verbally closed subgroup is a retract; closedness is assumed, not decided",
            ))
        if ctx.klass == 2:
            return ClosureReport(rab, Rule.METABELIAN_RANK, Verdict.CONDITIONAL, justification=(
                f"metabelian case with abelian rank {rab} = l + 1 for l = {rab - 1}",
                f"an {rab - 1}-verbally closed subgroup of this rank is a retract; closedness is assumed",
            ))
        return ClosureReport(rab, Rule.NONE, Verdict.UNKNOWN, justification=(
            "no rule matches this abelian rank and class",
        ))

    def _cyclic(self, H: Subgroup, search: bool, bounds: SearchBounds | None) -> ClosureReport:
        ctx = H.context
        g_witness = _primitive_combination(H)
        g = H.expand(g_witness)
        attempt = cyclic_retract(g, ctx, h_witness=g_witness)
        if attempt.retraction is not None:
            check = verify_retraction(attempt.retraction, H, bounds)
            if check:
                return ClosureReport(1, Rule.CYCLIC_IMAGE, Verdict.RETRACT_CONSTRUCTED, attempt.retraction, (
                    f"abelian image {attempt.exponent_vector} is primitive",
                    f"z_i -> g^m_i with m = {attempt.multiplier} fixes g = {format_word(g)}",
                    "the retraction fixes every generator of H",
                ))
            reason = check.reason
        else:
            reason = attempt.reason

        justification = [
            f"cyclic retraction onto <{format_word(g)}> fails: {reason}",
            "abelian rank 1: a verbally closed H would be a cyclic retract; closedness is assumed, not decided",
        ]
        fox_system = None
        result = None
        cs, shape = _fox_shape(H)
        if not cs:
            justification.append(f"Fox linear system not built: {shape}")
        elif search:
            ab = {gen(i): Word.of(var(i)) for i in range(1, ctx.rank + 1)}
            system = EquationSystem.of(
                [Equation(substitute(c, ab, SymbolKind.GENERATOR), c) for c in cs]
            )
            if system.variables < ctx.rank:
                system = EquationSystem(system.equations, ctx.rank)
            result = bounded_search(system, H, bounds)
            if result.solution is not None:
                fox_system = fox_linear_system(H, result.solution)
                justification.append("the determinant is 1 at a1 = 1, so the relations force every c_i = 1")
            else:
                justification.append("the system c_i(x) = c_i has no solution in H within the search bounds")
        return ClosureReport(1, Rule.CYCLIC_IMAGE, Verdict.CONDITIONAL,
                             justification=tuple(justification), fox_system=fox_system, search=result)

    def _full_image(self, H: Subgroup, search: bool, bounds: SearchBounds | None) -> ClosureReport:
        ctx = H.context
        justification = [
            f"abelian rank equals the rank {ctx.rank} of G",
            "a verbally closed subgroup of full abelian rank is G itself; closedness is assumed, not decided",
        ]
        if not search:
            return ClosureReport(ctx.rank, Rule.FULL_IMAGE, Verdict.CONDITIONAL, justification=tuple(justification))
        witnesses = certify_generators(H, bounds)
        missing = [i for i, w in enumerate(witnesses, start=1) if w is None]
        if missing:
            justification.append(f"no H-word found for z{missing[0]} within the search bounds")
            return ClosureReport(ctx.rank, Rule.FULL_IMAGE, Verdict.CONDITIONAL, justification=tuple(justification))
        base = identity_endomorphism(ctx)
        rho = Retraction(ctx, base.images, base.words, witnesses)
        if not verify_retraction(rho, H, bounds):
            raise InvariantViolation("identity map failed verification despite certified generators")
        extra = tuple(
            f"certificate: z{i} = {format_word(w, H_NAMES)}" for i, w in enumerate(witnesses, start=1)
        )
        justification.append("every z_i is an H-word, so H = G")
        return ClosureReport(ctx.rank, Rule.FULL_IMAGE, Verdict.EQUALS_FULL_GROUP, rho,
                             tuple(justification), extra=extra)


closure_analyzer = ClosureAnalyzer()


def analyze(H: Subgroup, *, search: bool = False, bounds: SearchBounds | None = None) -> ClosureReport:
    return closure_analyzer.analyze(H, search=search, bounds=bounds)
