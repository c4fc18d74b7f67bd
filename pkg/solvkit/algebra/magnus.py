"""
Free solvable groups S_{r,d} through the iterated Magnus embedding.

An element of class d is stored as its image ``top`` in S_{r,d-1} together
with its left Fox coordinates ``coords`` in Z[S_{r,d-1}]^r; class 1 is plain
Z^r.  Two elements are equal iff their normal forms are, which decides the
word problem.

Design:
  - Left Fox calculus: ∂(uv) = ∂u + ū·∂v, ∂_j(z_i) = δ_ij,
    ∂_j(z_i^-1) = -ā_i^-1 δ_ij.  Group law on normal forms:
        (t_a, c_a)(t_b, c_b) = (t_a t_b, c_a + t_a·c_b)
        (t, c)^-1            = (t^-1, -t^-1·c)
  - Conjugation is ``g^f = f g f^-1``, so the module action of Z[S_{r,d-1}]
    on G^(d-1) multiplies Fox coordinates on the left.
  - Coefficient keys: exponent tuples for class 2 (Laurent case), the
    class-(d-1) elements themselves above that.  Keys sort and serialize by
    their canonical serialization.
  - ``settings.MAX_CLASS`` guards d; ``settings.CHECK_INVARIANTS`` re-checks
    the fundamental identity Σ_j c_j(ā_j - 1) = t - 1 after every product.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

from solvkit.algebra.groupring import FreeAbelianGroup, GroupRingElement, Key
from solvkit.algebra.words import Symbol, SymbolKind, Word, format_word, gen
from solvkit.core.config import settings
from solvkit.core.errors import (
    ContextError,
    GroupMismatchError,
    InvariantViolation,
    PreconditionError,
    UnboundVariableError,
)

logger = logging.getLogger(__name__)


# ─── contexts ──────────────────────────────────────────────────────────

@dataclass(frozen=True, slots=True)
class GroupContext:
    """The group S_{rank,klass}."""

    rank: int
    klass: int

    def __post_init__(self) -> None:
        if self.rank < 1:
            raise ContextError(f"rank must be >= 1, got {self.rank}")
        if not 1 <= self.klass <= settings.MAX_CLASS:
            raise ContextError(
                f"class must lie in 1..{settings.MAX_CLASS}, got {self.klass} "
                "(SOLVKIT_MAX_CLASS raises the guard)"
            )

    def lower(self) -> GroupContext:
        if self.klass == 1:
            raise ContextError("S_{r,1} has no lower class")
        return GroupContext(self.rank, self.klass - 1)

    @property
    def coefficient_group(self) -> FreeAbelianGroup | SolvableGroup:
        return coefficient_group(self)

    def __str__(self) -> str:
        return f"S({self.rank},{self.klass})"


@dataclass(frozen=True, slots=True)
class SolvableGroup:
    """S_{r,k} as a coefficient group for Z[S_{r,k}] (keys are elements)."""

    context: GroupContext

    def identity(self) -> SolvableElement:
        return identity(self.context)

    def multiply(self, a: SolvableElement, b: SolvableElement) -> SolvableElement:
        return multiply(a, b)

    def invert(self, a: SolvableElement) -> SolvableElement:
        return invert(a)

    def sort_key(self, a: SolvableElement) -> str:
        return a.serial

    def format_key(self, a: SolvableElement) -> str | None:
        return None if a.is_identity else "{" + a.serial + "}"


@lru_cache(maxsize=None)
def coefficient_group(ctx: GroupContext) -> FreeAbelianGroup | SolvableGroup:
    """Key group of the Fox coordinates of S_{r,d}, i.e. S_{r,d-1}."""
    if ctx.klass == 1:
        raise ContextError("class-1 elements have no Fox coordinates")
    if ctx.klass == 2:
        return FreeAbelianGroup(ctx.rank)
    return SolvableGroup(ctx.lower())


def key_of(a: SolvableElement) -> Key:
    """Group-ring key of *a* inside Z[S_{r,k}]."""
    return a.exps if a.context.klass == 1 else a


# ─── elements ──────────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class SolvableElement:
    context: GroupContext
    exps: tuple[int, ...] | None = None
    top: SolvableElement | None = None
    coords: tuple[GroupRingElement, ...] | None = field(default=None)

    @property
    def klass(self) -> int:
        return self.context.klass

    @cached_property
    def canonical(self) -> tuple:
        if self.context.klass == 1:
            return (1, self.exps)
        assert self.top is not None and self.coords is not None
        return (self.context.klass, self.top.canonical, tuple(c.canonical() for c in self.coords))

    @cached_property
    def serial(self) -> str:
        if self.context.klass == 1:
            assert self.exps is not None
            return "d1:(" + ",".join(str(e) for e in self.exps) + ")"
        assert self.top is not None and self.coords is not None
        polys = ";".join(c.format() for c in self.coords)
        return f"d{self.context.klass}:{self.top.serial}|[{polys}]"

    @cached_property
    def is_identity(self) -> bool:
        if self.context.klass == 1:
            return not any(self.exps or ())
        assert self.top is not None and self.coords is not None
        return self.top.is_identity and not any(self.coords)

    @cached_property
    def _hash(self) -> int:
        return hash((self.context, self.canonical))

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SolvableElement):
            return NotImplemented
        return self.context == other.context and self.canonical == other.canonical

    def __mul__(self, other: SolvableElement) -> SolvableElement:
        return multiply(self, other)

    def __pow__(self, n: int) -> SolvableElement:
        return power(self, n)

    def inverse(self) -> SolvableElement:
        return invert(self)

    def __str__(self) -> str:
        return self.serial

    def __repr__(self) -> str:
        return f"SolvableElement({self.serial!r})"


def _same_context(a: SolvableElement, b: SolvableElement) -> None:
    if a.context != b.context:
        raise GroupMismatchError(f"elements of {a.context} and {b.context} cannot be combined")


@lru_cache(maxsize=None)
def identity(ctx: GroupContext) -> SolvableElement:
    if ctx.klass == 1:
        return SolvableElement(ctx, exps=(0,) * ctx.rank)
    zero = GroupRingElement.zero(coefficient_group(ctx))
    return SolvableElement(ctx, top=identity(ctx.lower()), coords=(zero,) * ctx.rank)


@lru_cache(maxsize=None)
def generator(i: int, ctx: GroupContext) -> SolvableElement:
    """The basis element z_i (1-based)."""
    if not 1 <= i <= ctx.rank:
        raise ContextError(f"generator z{i} exceeds rank {ctx.rank}")
    if ctx.klass == 1:
        return SolvableElement(ctx, exps=tuple(int(j == i - 1) for j in range(ctx.rank)))
    group = coefficient_group(ctx)
    coords = tuple(GroupRingElement.constant(group, int(j == i - 1)) for j in range(ctx.rank))
    return SolvableElement(ctx, top=generator(i, ctx.lower()), coords=coords)


# ─── group law ─────────────────────────────────────────────────────────

def fundamental_identity_holds(a: SolvableElement) -> bool:
    """Σ_j coords_j·(ā_j − 1) == top − 1 in Z[S_{r,d-1}]."""
    if a.context.klass == 1:
        return True
    assert a.top is not None and a.coords is not None
    group = coefficient_group(a.context)
    lower = a.context.lower()
    lhs = GroupRingElement.zero(group)
    for j, c in enumerate(a.coords, start=1):
        if c:
            lhs = lhs + c * (GroupRingElement.monomial(group, key_of(generator(j, lower))) - 1)
    rhs = GroupRingElement.monomial(group, key_of(a.top)) - 1
    return lhs == rhs


def check_fundamental_identity(a: SolvableElement) -> SolvableElement:
    if not fundamental_identity_holds(a):
        raise InvariantViolation(f"fundamental identity fails for {a.serial}")
    return a


def _checked(a: SolvableElement) -> SolvableElement:
    if settings.CHECK_INVARIANTS:
        return check_fundamental_identity(a)
    return a


def multiply(a: SolvableElement, b: SolvableElement) -> SolvableElement:
    _same_context(a, b)
    if a.context.klass == 1:
        assert a.exps is not None and b.exps is not None
        return SolvableElement(a.context, exps=tuple(x + y for x, y in zip(a.exps, b.exps)))
    if a.is_identity:
        return b
    if b.is_identity:
        return a
    assert a.top is not None and b.top is not None and a.coords and b.coords
    shift = key_of(a.top)
    coords = tuple(ca + cb.translate(shift) for ca, cb in zip(a.coords, b.coords))
    return _checked(SolvableElement(a.context, top=multiply(a.top, b.top), coords=coords))


def invert(a: SolvableElement) -> SolvableElement:
    if a.context.klass == 1:
        assert a.exps is not None
        return SolvableElement(a.context, exps=tuple(-x for x in a.exps))
    if a.is_identity:
        return a
    assert a.top is not None and a.coords is not None
    top_inv = invert(a.top)
    shift = key_of(top_inv)
    coords = tuple(-c.translate(shift) for c in a.coords)
    return _checked(SolvableElement(a.context, top=top_inv, coords=coords))


def power(a: SolvableElement, n: int) -> SolvableElement:
    base = a if n >= 0 else invert(a)
    n = abs(n)
    result = identity(a.context)
    while n:
        if n & 1:
            result = multiply(result, base)
        base = multiply(base, base)
        n >>= 1
    return result


def commutator(a: SolvableElement, b: SolvableElement) -> SolvableElement:
    """``[a, b] = a b a^-1 b^-1``."""
    return multiply(multiply(a, b), multiply(invert(a), invert(b)))


def left_normed_commutator(*parts: SolvableElement) -> SolvableElement:
    result = commutator(parts[0], parts[1])
    for p in parts[2:]:
        result = commutator(result, p)
    return result


def conjugate(a: SolvableElement, g: SolvableElement) -> SolvableElement:
    """``a^g = g a g^-1``."""
    return multiply(multiply(g, a), invert(g))


def equals(a: SolvableElement, b: SolvableElement) -> bool:
    _same_context(a, b)
    return a == b


def is_identity(a: SolvableElement) -> bool:
    return a.is_identity


def group_ops(op: str, a: SolvableElement, b: SolvableElement | None = None) -> SolvableElement | bool:
    """Named dispatcher: ``mul``, ``inv``, ``eq``, ``is_identity``."""
    if op == "inv":
        return invert(a)
    if op == "is_identity":
        return a.is_identity
    if b is None:
        raise ValueError(f"operation {op!r} needs two operands")
    if op == "mul":
        return multiply(a, b)
    if op == "eq":
        return equals(a, b)
    raise ValueError(f"unknown group operation {op!r}")


# ─── projections ───────────────────────────────────────────────────────

def project(a: SolvableElement, klass: int) -> SolvableElement:
    """Image of *a* in S_{r,klass} (klass <= a's class)."""
    if not 1 <= klass <= a.context.klass:
        raise ContextError(f"cannot project {a.context} to class {klass}")
    while a.context.klass > klass:
        assert a.top is not None
        a = a.top
    return a


def abelianize(a: SolvableElement) -> tuple[int, ...]:
    base = project(a, 1)
    assert base.exps is not None
    return base.exps


# ─── words ─────────────────────────────────────────────────────────────

@lru_cache(maxsize=4096)
def _generator_power(i: int, e: int, ctx: GroupContext) -> SolvableElement:
    return power(generator(i, ctx), e)


def embed(w: Word, ctx: GroupContext) -> SolvableElement:
    """Normal form of the generator word *w* in S_{r,d}."""
    result = identity(ctx)
    for symbol, e in w.letters:
        if symbol.kind is not SymbolKind.GENERATOR:
            raise UnboundVariableError(f"cannot embed variable {symbol}; substitute it first")
        if symbol.index > ctx.rank:
            raise ContextError(f"generator {symbol} exceeds rank {ctx.rank}")
        result = multiply(result, _generator_power(symbol.index, e, ctx))
    return result


def evaluate(
    w: Word,
    images: Sequence[SolvableElement],
    *,
    kind: SymbolKind = SymbolKind.VARIABLE,
    context: GroupContext | None = None,
) -> SolvableElement:
    """Substitute ``images[i-1]`` for every symbol of *kind* with index i and multiply out.

    Generators are constants when *kind* is ``VARIABLE``.
    """
    if context is None:
        if not images:
            raise ContextError("evaluate needs images or an explicit context")
        context = images[0].context
    for img in images:
        if img.context != context:
            raise GroupMismatchError(f"image in {img.context}, expected {context}")
    result = identity(context)
    for symbol, e in w.letters:
        if symbol.kind is kind:
            if symbol.index > len(images):
                raise UnboundVariableError(f"{symbol} has no image ({len(images)} given)")
            factor = power(images[symbol.index - 1], e)
        elif symbol.kind is SymbolKind.GENERATOR:
            if symbol.index > context.rank:
                raise ContextError(f"generator {symbol} exceeds rank {context.rank}")
            factor = _generator_power(symbol.index, e, context)
        else:
            raise UnboundVariableError(f"variable {symbol} has no image")
        result = multiply(result, factor)
    return result


# ─── Fox calculus ──────────────────────────────────────────────────────

def fox_evaluated(
    w: Word,
    target: Symbol,
    points: Sequence[SolvableElement],
    group: FreeAbelianGroup | SolvableGroup,
) -> GroupRingElement:
    """∂_target(w) with its group-ring keys evaluated at ``z_k -> points[k-1]``."""
    if not points:
        raise ContextError("Fox evaluation needs at least one point")
    prefix = identity(points[0].context)
    terms: dict[Key, int] = {}
    for symbol, step in w.expand():
        if symbol.kind is not target.kind or symbol.index > len(points):
            raise UnboundVariableError(f"{symbol} has no image ({len(points)} given)")
        g = points[symbol.index - 1]
        if step > 0:
            if symbol == target:
                k = key_of(prefix)
                terms[k] = terms.get(k, 0) + 1
            prefix = multiply(prefix, g)
        else:
            prefix = multiply(prefix, invert(g))
            if symbol == target:
                k = key_of(prefix)
                terms[k] = terms.get(k, 0) - 1
    return GroupRingElement(group, terms)


def fox(w: Word, j: int, ctx: GroupContext) -> GroupRingElement:
    """Left Fox derivative ∂_j(w) with values in Z[S_{r,d-1}]."""
    if ctx.klass < 2:
        raise ContextError("Fox derivatives take values in Z[S_{r,d-1}] and need class >= 2")
    if not 1 <= j <= ctx.rank:
        raise ContextError(f"axis {j} outside 1..{ctx.rank}")
    lower = ctx.lower()
    points = [generator(k, lower) for k in range(1, ctx.rank + 1)]
    if w.max_index(SymbolKind.GENERATOR) > ctx.rank:
        raise ContextError(f"word uses generators beyond rank {ctx.rank}")
    return fox_evaluated(w, gen(j), points, coefficient_group(ctx))


def fox_abelian(w: Word, j: int, rank: int) -> GroupRingElement:
    """∂_j(w) pushed to Z[Z^r] along the abelianization."""
    return fox(w, j, GroupContext(rank, 2))


def chain_rule_check(c: Word, h: Sequence[SolvableElement]) -> bool:
    """Compare ∂_j(c(h)) with Σ_i ∂_i(c)[h̄]·∂_j(h_i) for every axis j."""
    if not h:
        raise ContextError("chain rule needs at least one substituted element")
    ctx = h[0].context
    if c.max_index(SymbolKind.VARIABLE):
        raise ContextError("chain rule takes a word over generators")
    arity = c.max_index(SymbolKind.GENERATOR)
    if arity > len(h):
        raise ContextError(f"word uses z{arity} but only {len(h)} elements were given")
    if ctx.klass < 2:
        raise ContextError("chain rule needs class >= 2")
    group = coefficient_group(ctx)
    composite = evaluate(c, h, kind=SymbolKind.GENERATOR)
    tops = [e.top for e in h]
    partials = [fox_evaluated(c, gen(i), tops, group) for i in range(1, len(h) + 1)]
    assert composite.coords is not None
    for j in range(ctx.rank):
        rhs = GroupRingElement.zero(group)
        for d_i, h_i in zip(partials, h):
            assert h_i.coords is not None
            rhs = rhs + d_i * h_i.coords[j]
        if composite.coords[j] != rhs:
            logger.debug("chain rule fails on axis %d for %s", j + 1, format_word(c))
            return False
    return True


# ─── derived series and module structure ───────────────────────────────

def derived_depth(a: SolvableElement) -> int | None:
    """Largest n with a in G^(n); None when a is the identity."""
    if a.is_identity:
        return None
    for k in range(1, a.context.klass):
        if not project(a, k).is_identity:
            return k - 1
    return a.context.klass - 1


def module_power(c: SolvableElement, alpha: GroupRingElement) -> SolvableElement:
    """``c^alpha`` for c in G^(d-1): coordinates multiply by alpha on the left."""
    if c.context.klass == 1:
        raise ContextError("the module action needs class >= 2")
    assert c.top is not None and c.coords is not None
    if not c.top.is_identity:
        raise PreconditionError(f"{c.serial} does not lie in G^(d-1)")
    if alpha.group != coefficient_group(c.context):
        raise GroupMismatchError("module exponent over the wrong group ring")
    return SolvableElement(c.context, top=c.top, coords=tuple(alpha * x for x in c.coords))


def module_rank(cs: Iterable[SolvableElement]) -> int:
    """Rank over Frac(Z[Z^r]) of the Fox-coordinate rows of metabelian cs in G'."""
    rows: list[list[GroupRingElement]] = []
    for c in cs:
        if c.context.klass != 2:
            raise ContextError("module rank is defined for metabelian elements only")
        assert c.top is not None and c.coords is not None
        if not c.top.is_identity:
            raise PreconditionError(f"{c.serial} does not lie in G'")
        rows.append(list(c.coords))
    if not rows:
        return 0
    rank = 0
    width = len(rows[0])
    for col in range(width):
        pivot = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        p = rows[rank][col]
        for i in range(rank + 1, len(rows)):
            f = rows[i][col]
            if f:
                rows[i] = [p * x - f * y for x, y in zip(rows[i], rows[rank])]
        rank += 1
    return rank


# ─── endomorphisms ─────────────────────────────────────────────────────

@dataclass(frozen=True, slots=True)
class Retraction:
    """An endomorphism given by the images of z1..zr.

    ``words`` are optional generator words for display; ``witnesses[i]`` is an
    optional word over x1..xm naming ``images[i]`` as a product of subgroup
    generators (x_k stands for the k-th generator h_k).
    """

    context: GroupContext
    images: tuple[SolvableElement, ...]
    words: tuple[Word, ...] | None = None
    witnesses: tuple[Word | None, ...] | None = None

    def __post_init__(self) -> None:
        if len(self.images) != self.context.rank:
            raise ContextError(f"need {self.context.rank} images, got {len(self.images)}")
        for img in self.images:
            if img.context != self.context:
                raise GroupMismatchError(f"image in {img.context}, expected {self.context}")

    def apply(self, w: Word) -> SolvableElement:
        return evaluate(w, self.images, kind=SymbolKind.GENERATOR)

    def image_label(self, i: int) -> str:
        if self.words is not None:
            return format_word(self.words[i - 1])
        return self.images[i - 1].serial

    def lines(self) -> list[str]:
        return [f"retraction: z{i} -> {self.image_label(i)}" for i in range(1, self.context.rank + 1)]


def identity_endomorphism(ctx: GroupContext) -> Retraction:
    words = tuple(Word.of(gen(i)) for i in range(1, ctx.rank + 1))
    return Retraction(ctx, tuple(generator(i, ctx) for i in range(1, ctx.rank + 1)), words)


def endomorphism_from_words(ctx: GroupContext, words: Sequence[Word]) -> Retraction:
    return Retraction(ctx, tuple(embed(w, ctx) for w in words), tuple(words))
