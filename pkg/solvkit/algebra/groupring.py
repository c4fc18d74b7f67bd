"""
Integral group rings Z[A] over a coefficient group with canonical keys.

The ring is generic in the key group: Fox derivatives of class-d elements
live in Z[S_{r,d-1}], whose keys are solvable normal forms supplied by the
magnus module.  When the key group is free abelian (``FreeAbelianGroup``),
elements are multivariate Laurent polynomials in ``a1..ar`` and the full
toolbox applies: Δ-adic valuation, exponent ranges, exact division.

Design:
  - ``GroupRingElement`` is an immutable value: a dict key -> nonzero int,
    never mutated after construction, hashable.
  - Key groups implement the small ``CoefficientGroup`` protocol; two
    elements interoperate only when their groups compare equal.
  - Laurent serialization sorts monomials lexicographically on exponent
    vectors (``-a1^-1 + 2 - a1``); ``0`` for the zero element.
  - Exact division verifies every quotient by multiplying back, so the
    strategy used to find it (binomial back-substitution, sympy ``exquo``)
    never affects correctness.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import reduce
from itertools import combinations_with_replacement
from math import factorial
from typing import Any, Callable, Hashable, Iterable, Mapping, Protocol

from sympy import Expr, Integer, Poly, Symbol as SympySymbol, ZZ
from sympy.parsing.sympy_parser import (
    convert_xor,
    parse_expr,
    standard_transformations,
)
from sympy.polys.polyerrors import ExactQuotientFailed

from solvkit.core.config import settings
from solvkit.core.errors import GroupMismatchError, PolynomialSyntaxError, ZeroElementError

logger = logging.getLogger(__name__)

Key = Hashable
Exponents = tuple[int, ...]


# ─── coefficient groups ────────────────────────────────────────────────

class CoefficientGroup(Protocol):
    def identity(self) -> Key: ...
    def multiply(self, a: Key, b: Key) -> Key: ...
    def invert(self, a: Key) -> Key: ...
    def sort_key(self, a: Key) -> Any: ...
    def format_key(self, a: Key) -> str | None: ...


@dataclass(frozen=True, slots=True)
class FreeAbelianGroup:
    """Z^r written multiplicatively with basis ``a1..ar``; keys are exponent tuples."""

    rank: int

    def identity(self) -> Exponents:
        return (0,) * self.rank

    def multiply(self, a: Exponents, b: Exponents) -> Exponents:
        return tuple(x + y for x, y in zip(a, b))

    def invert(self, a: Exponents) -> Exponents:
        return tuple(-x for x in a)

    def power(self, a: Exponents, n: int) -> Exponents:
        return tuple(n * x for x in a)

    def sort_key(self, a: Exponents) -> Exponents:
        return a

    def format_key(self, a: Exponents) -> str | None:
        parts = []
        for i, e in enumerate(a, start=1):
            if e == 1:
                parts.append(f"a{i}")
            elif e:
                parts.append(f"a{i}^{e}")
        return "*".join(parts) or None

    def basis(self, i: int) -> Exponents:
        """Exponent vector of ``a_i`` (1-based)."""
        return tuple(int(j == i - 1) for j in range(self.rank))


# ─── ring elements ─────────────────────────────────────────────────────

class GroupRingElement:
    """A finite integer combination of group elements."""

    __slots__ = ("group", "terms", "_hash")

    def __init__(self, group: CoefficientGroup, terms: Mapping[Key, int] | None = None) -> None:
        self.group = group
        self.terms: dict[Key, int] = {k: int(c) for k, c in (terms or {}).items() if c}
        self._hash: int | None = None

    # constructors

    @classmethod
    def zero(cls, group: CoefficientGroup) -> GroupRingElement:
        return cls(group)

    @classmethod
    def constant(cls, group: CoefficientGroup, n: int) -> GroupRingElement:
        return cls(group, {group.identity(): n})

    @classmethod
    def monomial(cls, group: CoefficientGroup, key: Key, coefficient: int = 1) -> GroupRingElement:
        return cls(group, {key: coefficient})

    # arithmetic

    def _check(self, other: GroupRingElement) -> None:
        if self.group != other.group:
            raise GroupMismatchError(
                f"group ring elements over different coefficient groups: {self.group} vs {other.group}"
            )

    def _coerce(self, other: GroupRingElement | int) -> GroupRingElement:
        if isinstance(other, int):
            return GroupRingElement.constant(self.group, other)
        self._check(other)
        return other

    def __add__(self, other: GroupRingElement | int) -> GroupRingElement:
        other = self._coerce(other)
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms.get(k, 0) + c
        return GroupRingElement(self.group, terms)

    __radd__ = __add__

    def __neg__(self) -> GroupRingElement:
        return GroupRingElement(self.group, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: GroupRingElement | int) -> GroupRingElement:
        return self + (-self._coerce(other))

    def __rsub__(self, other: int) -> GroupRingElement:
        return self._coerce(other) - self

    def __mul__(self, other: GroupRingElement | int) -> GroupRingElement:
        if isinstance(other, int):
            return GroupRingElement(self.group, {k: c * other for k, c in self.terms.items()})
        self._check(other)
        terms: dict[Key, int] = {}
        mul = self.group.multiply
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                k = mul(k1, k2)
                terms[k] = terms.get(k, 0) + c1 * c2
        return GroupRingElement(self.group, terms)

    def __rmul__(self, other: int) -> GroupRingElement:
        return self * other

    def __pow__(self, n: int) -> GroupRingElement:
        if n < 0:
            raise ValueError("group ring elements have no general inverses")
        result = GroupRingElement.constant(self.group, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def translate(self, key: Key) -> GroupRingElement:
        """Left multiplication by the group element *key*."""
        mul = self.group.multiply
        return GroupRingElement(self.group, {mul(key, k): c for k, c in self.terms.items()})

    def conjugate(self) -> GroupRingElement:
        """The antipode ``g -> g^-1`` extended linearly."""
        inv = self.group.invert
        return GroupRingElement(self.group, {inv(k): c for k, c in self.terms.items()})

    def map_keys(self, f: Callable[[Key], Key], target: CoefficientGroup) -> GroupRingElement:
        """Ring map induced by the group homomorphism *f* into *target*."""
        terms: dict[Key, int] = {}
        for k, c in self.terms.items():
            image = f(k)
            terms[image] = terms.get(image, 0) + c
        return GroupRingElement(target, terms)

    # queries

    def augmentation(self) -> int:
        return sum(self.terms.values())

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = GroupRingElement.constant(self.group, other)
        if not isinstance(other, GroupRingElement):
            return NotImplemented
        return self.group == other.group and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def sorted_terms(self) -> list[tuple[Key, int]]:
        return sorted(self.terms.items(), key=lambda kc: self.group.sort_key(kc[0]))

    def canonical(self) -> tuple:
        return tuple((self.group.sort_key(k), c) for k, c in self.sorted_terms())

    def format(self) -> str:
        if not self.terms:
            return "0"
        out: list[str] = []
        for key, c in self.sorted_terms():
            label = self.group.format_key(key)
            mag = abs(c)
            if label is None:
                body = str(mag)
            elif mag == 1:
                body = label
            else:
                body = f"{mag}*{label}"
            if not out:
                out.append(body if c > 0 else f"-{body}")
            else:
                out.append(f" + {body}" if c > 0 else f" - {body}")
        return "".join(out)

    def __str__(self) -> str:
        return self.format()

    def __repr__(self) -> str:
        return f"GroupRingElement({self.format()!r})"


def ring_arith(op: str, x: GroupRingElement, y: GroupRingElement | None = None) -> GroupRingElement:
    """Named dispatcher over the ring operations (``add``, ``sub``, ``mul``, ``neg``)."""
    if op == "neg":
        return -x
    if y is None:
        raise ValueError(f"operation {op!r} needs two operands")
    ops = {"add": x.__add__, "sub": x.__sub__, "mul": x.__mul__}
    if op not in ops:
        raise ValueError(f"unknown ring operation {op!r}")
    return ops[op](y)


def augmentation(x: GroupRingElement) -> int:
    return x.augmentation()


# ─── Laurent helpers (A = Z^r) ─────────────────────────────────────────

def laurent(rank: int, terms: Mapping[Exponents, int] | None = None) -> GroupRingElement:
    return GroupRingElement(FreeAbelianGroup(rank), terms)


def laurent_variable(rank: int, i: int, power: int = 1) -> GroupRingElement:
    """The monomial ``a_i^power`` (1-based axis)."""
    group = FreeAbelianGroup(rank)
    return GroupRingElement.monomial(group, group.power(group.basis(i), power))


def _laurent_group(x: GroupRingElement) -> FreeAbelianGroup:
    if not isinstance(x.group, FreeAbelianGroup):
        raise GroupMismatchError("operation needs a Laurent element (free abelian coefficients)")
    return x.group


def _nonzero(x: GroupRingElement, what: str) -> None:
    if not x:
        raise ZeroElementError(f"{what} of the zero element is undefined")


def monomials(rank: int, degree: int) -> list[Exponents]:
    """Exponent vectors of total degree ``<= degree``, graded then lex."""
    out: list[Exponents] = []
    for d in range(degree + 1):
        layer = set()
        for combo in combinations_with_replacement(range(rank), d):
            v = [0] * rank
            for i in combo:
                v[i] += 1
            layer.add(tuple(v))
        out.extend(sorted(layer, reverse=True))
    return out


def binomial(e: int, k: int) -> int:
    """Generalized binomial ``e choose k`` (any integer e, k >= 0)."""
    num = 1
    for j in range(k):
        num *= e - j
    return num // factorial(k)


def shifted_coefficients(x: GroupRingElement, degree: int) -> dict[Exponents, int]:
    """Coefficients of x after ``a_i = 1 + y_i``, truncated to y-degree ``<= degree``.

    Negative exponents expand as truncated binomial series.
    """
    group = _laurent_group(x)
    out: dict[Exponents, int] = {}
    for beta in monomials(group.rank, degree):
        total = 0
        for alpha, c in x.terms.items():
            term = c
            for e, b in zip(alpha, beta):
                if b:
                    term *= binomial(e, b)
                    if not term:
                        break
            total += term
        if total:
            out[beta] = total
    return out


@dataclass(frozen=True, slots=True)
class Valuation:
    """Δ-adic valuation; ``exact=False`` means only ``degree <= ω`` is known."""

    degree: int
    exact: bool = True

    def __str__(self) -> str:
        return str(self.degree) if self.exact else f"≥{self.degree}"


def valuation(x: GroupRingElement, cap: int | None = None) -> Valuation:
    """Largest n with x in Δ^n, computed by truncated expansion below *cap*."""
    cap = settings.VALUATION_CAP if cap is None else cap
    if cap < 1:
        raise ValueError("valuation cap must be positive")
    group = _laurent_group(x)
    _nonzero(x, "valuation")
    # clear negative exponents with a unit monomial
    low = tuple(min(k[i] for k in x.terms) for i in range(group.rank))
    shifted = x.translate(group.invert(tuple(min(e, 0) for e in low)))
    coefficients = shifted_coefficients(shifted, cap - 1)
    if not coefficients:
        logger.debug("valuation of %s reached cap %d", x, cap)
        return Valuation(cap, exact=False)
    return Valuation(min(sum(beta) for beta in coefficients))


def exponent_range(x: GroupRingElement, i: int) -> tuple[int, int]:
    """(least, greatest) exponent of ``a_i`` over the monomials of x."""
    group = _laurent_group(x)
    _nonzero(x, "exponent range")
    if not 1 <= i <= group.rank:
        raise ValueError(f"axis {i} outside 1..{group.rank}")
    values = [k[i - 1] for k in x.terms]
    return min(values), max(values)


def separating_exponent(x: GroupRingElement) -> int:
    """``Σ_i (|p_i| + |q_i|) + 1`` over the exponent ranges of x."""
    group = _laurent_group(x)
    _nonzero(x, "separating exponent")
    total = 0
    for i in range(1, group.rank + 1):
        p, q = exponent_range(x, i)
        total += abs(p) + abs(q)
    return total + 1


def invert_variable(x: GroupRingElement, i: int) -> GroupRingElement:
    """Ring automorphism ``a_i -> a_i^-1``."""
    _laurent_group(x)
    flip = lambda k: tuple(-e if j == i - 1 else e for j, e in enumerate(k))  # noqa: E731
    return x.map_keys(flip, x.group)


def separating_multiplier(x: GroupRingElement) -> GroupRingElement:
    """``Π_i (1 - a_i^m)(1 - a_i^-m) · x`` with m the separating exponent of x."""
    group = _laurent_group(x)
    m = separating_exponent(x)
    one = GroupRingElement.constant(group, 1)
    factors = [
        (one - laurent_variable(group.rank, i, m)) * (one - laurent_variable(group.rank, i, -m))
        for i in range(1, group.rank + 1)
    ]
    return reduce(lambda acc, f: acc * f, factors, x)


def specialize(x: GroupRingElement, axes: Iterable[int]) -> GroupRingElement:
    """Set ``a_i = 1`` for every i in *axes*."""
    _laurent_group(x)
    drop = {i - 1 for i in axes}
    return x.map_keys(lambda k: tuple(0 if j in drop else e for j, e in enumerate(k)), x.group)


# ─── exact division ────────────────────────────────────────────────────

def _binomial_shape(d: GroupRingElement) -> tuple[int, int, int, Exponents] | None:
    """Recognize ``d = s * a^u * (1 - a_j^m)`` with m > 0; return (j, m, s, u)."""
    if len(d.terms) != 2:
        return None
    (k1, c1), (k2, c2) = sorted(d.terms.items())
    if c1 != -c2 or abs(c1) != 1:
        return None
    diff = [b - a for a, b in zip(k1, k2)]
    axes = [j for j, e in enumerate(diff) if e]
    if len(axes) != 1:
        return None
    j = axes[0]
    m = diff[j]
    # k1 has the smaller exponent along j: d = c1 a^k1 (1 - a_j^m)
    return j, m, c1, k1


def _divide_binomial(x: GroupRingElement, j: int, m: int) -> GroupRingElement | None:
    """Divide by ``1 - a_j^m`` via back-substitution ``q_k = x_k + q_(k-m)``."""
    slices: dict[Exponents, dict[int, int]] = {}
    for k, c in x.terms.items():
        rest = k[:j] + (0,) + k[j + 1:]
        slices.setdefault(rest, {})[k[j]] = c
    quotient: dict[Exponents, int] = {}
    for rest, poly in slices.items():
        lo, hi = min(poly), max(poly)
        q: dict[int, int] = {}
        for k in range(lo, hi - m + 1):
            q[k] = poly.get(k, 0) + q.get(k - m, 0)
        for k, c in q.items():
            if c:
                key = list(rest)
                key[j] = k
                quotient[tuple(key)] = c
    return GroupRingElement(x.group, quotient)


def _sympy_gens(rank: int) -> tuple[SympySymbol, ...]:
    return tuple(SympySymbol(f"a{i}") for i in range(1, rank + 1))


def _divide_polynomial(x: GroupRingElement, d: GroupRingElement) -> GroupRingElement | None:
    group = _laurent_group(x)
    low_x = tuple(min(k[i] for k in x.terms) for i in range(group.rank))
    low_d = tuple(min(k[i] for k in d.terms) for i in range(group.rank))
    gens = _sympy_gens(group.rank)
    px = Poly.from_dict(x.translate(group.invert(low_x)).terms, *gens, domain=ZZ)
    pd = Poly.from_dict(d.translate(group.invert(low_d)).terms, *gens, domain=ZZ)
    try:
        pq = px.exquo(pd)
    except ExactQuotientFailed:
        return None
    q = GroupRingElement(group, {k: int(c) for k, c in pq.as_dict().items()})
    return q.translate(group.multiply(low_x, group.invert(low_d)))


def exact_div(x: GroupRingElement, d: GroupRingElement) -> GroupRingElement | None:
    """The q with ``q * d == x``, or None when d does not divide x."""
    group = _laurent_group(x)
    if d.group != group:
        raise GroupMismatchError("dividend and divisor over different rings")
    _nonzero(d, "division")
    if not x:
        return GroupRingElement.zero(group)

    shape = _binomial_shape(d)
    if shape is not None:
        j, m, sign, unit = shape
        q = _divide_binomial(x.translate(group.invert(unit)), j, m)
        if q is not None and sign < 0:
            q = -q
    else:
        q = _divide_polynomial(x, d)

    if q is None or q * d != x:
        logger.debug("exact_div: %s does not divide %s", d, x)
        return None
    return q


# ─── conversion and parsing ────────────────────────────────────────────

def to_sympy(x: GroupRingElement) -> Any:
    group = _laurent_group(x)
    gens = _sympy_gens(group.rank)
    expr = Integer(0)
    for k, c in x.terms.items():
        term = Integer(c)
        for g, e in zip(gens, k):
            term *= g**e
        expr += term
    return expr


def format_laurent(x: GroupRingElement) -> str:
    _laurent_group(x)
    return x.format()


_TRANSFORMS = standard_transformations + (convert_xor,)


def parse_laurent(text: str, rank: int) -> GroupRingElement:
    """Parse a Laurent polynomial in ``a1..ar`` (``^`` or ``**`` for powers)."""
    gens = _sympy_gens(rank)
    names = {str(g): g for g in gens}
    try:
        expr = parse_expr(text, local_dict=names, transformations=_TRANSFORMS, evaluate=True)
    except Exception as exc:  # sympy raises a zoo of exception types
        raise PolynomialSyntaxError(f"cannot parse {text!r}: {exc}") from exc
    if not isinstance(expr, Expr):
        raise PolynomialSyntaxError(f"{text!r} is not a polynomial expression")
    return from_sympy(expr, rank)


def from_sympy(expr: Expr, rank: int) -> GroupRingElement:
    """Convert a sympy expression in ``a1..ar`` into a Laurent element."""
    gens = _sympy_gens(rank)
    extra = expr.free_symbols - set(gens)
    if extra:
        raise PolynomialSyntaxError(
            f"unknown symbols {sorted(map(str, extra))}; expected a1..a{rank}"
        )
    terms: dict[Exponents, int] = {}
    for term, coeff in expr.expand().as_coefficients_dict().items():
        if not coeff.is_integer:
            raise PolynomialSyntaxError(f"coefficient {coeff} is not an integer")
        powers = dict(term.as_powers_dict())
        key = []
        for g in gens:
            e = powers.pop(g, Integer(0))
            if not getattr(e, "is_integer", False):
                raise PolynomialSyntaxError(f"exponent {e} of {g} is not an integer")
            key.append(int(e))
        leftover = {b: e for b, e in powers.items() if b != 1}
        if leftover:
            raise PolynomialSyntaxError(f"{expr} is not a Laurent polynomial")
        k = tuple(key)
        terms[k] = terms.get(k, 0) + int(coeff)
    return laurent(rank, terms)
