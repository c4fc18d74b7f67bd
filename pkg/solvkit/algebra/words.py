"""
Words over generators ``z1..zr`` and variables ``x1..xn``.

Grammar (whitespace ignored between tokens)::

    word  := "1" | term ("*" term)*
    term  := atom ("^" int)?
    atom  := gen | var | "(" word ")" | "[" word ("," word)+ "]"
    gen   := "z" posint      var := "x" posint
    int   := "-"? posint

Commutators expand at parse time as ``[u,v] = u v u^-1 v^-1`` and nest
left-normed: ``[u,v,w] = [[u,v],w]``.

Design:
  - Words are immutable values; every operation returns a fresh word.
  - ``Word(...)`` stores letters as given; ``free_reduce`` (and everything
    built on it: parsing, products, substitution) returns the reduced form.
  - Exponents are Python ints, so nothing overflows downstream.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Mapping

from solvkit.core.errors import ContextError, UnboundVariableError, WordSyntaxError


class SymbolKind(str, Enum):
    GENERATOR = "z"
    VARIABLE = "x"


@dataclass(frozen=True, slots=True, order=True)
class Symbol:
    kind: SymbolKind
    index: int

    def __post_init__(self) -> None:
        if self.index < 1:
            raise ContextError(f"symbol index must be >= 1, got {self.index}")

    def __str__(self) -> str:
        return f"{self.kind.value}{self.index}"


def gen(index: int) -> Symbol:
    return Symbol(SymbolKind.GENERATOR, index)


def var(index: int) -> Symbol:
    return Symbol(SymbolKind.VARIABLE, index)


Letter = tuple[Symbol, int]


@dataclass(frozen=True, slots=True)
class Word:
    """A word as a tuple of ``(symbol, exponent)`` syllables."""

    letters: tuple[Letter, ...] = ()

    @classmethod
    def identity(cls) -> Word:
        return cls(())

    @classmethod
    def of(cls, symbol: Symbol, exponent: int = 1) -> Word:
        return free_reduce(cls(((symbol, exponent),)))

    @property
    def is_identity(self) -> bool:
        return not self.letters

    def __len__(self) -> int:
        return sum(abs(e) for _, e in self.letters)

    def __mul__(self, other: Word) -> Word:
        return free_reduce(Word(self.letters + other.letters))

    def inverse(self) -> Word:
        return Word(tuple((s, -e) for s, e in reversed(self.letters)))

    def __pow__(self, n: int) -> Word:
        base = self if n >= 0 else self.inverse()
        return free_reduce(Word(base.letters * abs(n)))

    def symbols(self) -> frozenset[Symbol]:
        return frozenset(s for s, _ in self.letters)

    def max_index(self, kind: SymbolKind) -> int:
        return max((s.index for s, _ in self.letters if s.kind is kind), default=0)

    def expand(self) -> Iterator[tuple[Symbol, int]]:
        """Yield the word letter by letter as ``(symbol, ±1)``."""
        for symbol, exponent in self.letters:
            step = 1 if exponent > 0 else -1
            for _ in range(abs(exponent)):
                yield symbol, step

    def __str__(self) -> str:
        return format_word(self)


def commutator(u: Word, v: Word) -> Word:
    """``[u, v] = u v u^-1 v^-1``."""
    return u * v * u.inverse() * v.inverse()


def left_normed(*parts: Word) -> Word:
    """``[p1, p2, ..., pk] = [[p1, ..., p(k-1)], pk]``."""
    if len(parts) < 2:
        raise ValueError("a commutator needs at least two entries")
    result = commutator(parts[0], parts[1])
    for part in parts[2:]:
        result = commutator(result, part)
    return result


# ─── free reduction ─────────────────────────────────────────────────────

def free_reduce(w: Word | Iterable[Letter]) -> Word:
    """Return the unique freely reduced word equal to *w* in the free group."""
    letters = w.letters if isinstance(w, Word) else tuple(w)
    stack: list[list] = []
    for symbol, exponent in letters:
        if exponent == 0:
            continue
        if stack and stack[-1][0] == symbol:
            stack[-1][1] += exponent
            if stack[-1][1] == 0:
                stack.pop()
        else:
            stack.append([symbol, exponent])
    return Word(tuple((s, e) for s, e in stack))


def substitute(
    w: Word, assignment: Mapping[Symbol, Word], kind: SymbolKind = SymbolKind.VARIABLE
) -> Word:
    """Replace each occurrence ``s^e`` of a *kind* symbol by ``assignment[s]^e``.

    Symbols of the other kind are constants and pass through unchanged.
    """
    out: list[Letter] = []
    for symbol, exponent in w.letters:
        if symbol.kind is kind:
            if symbol not in assignment:
                raise UnboundVariableError(f"{symbol} has no image")
            out.extend((assignment[symbol] ** exponent).letters)
        else:
            out.append((symbol, exponent))
    return free_reduce(out)


def exponent_sum(w: Word, symbol: Symbol) -> int:
    return sum(e for s, e in w.letters if s == symbol)


def exponent_vector(w: Word, rank: int) -> tuple[int, ...]:
    """Abelianized image of a generator word in Z^rank."""
    sums = [0] * rank
    for symbol, exponent in w.letters:
        if symbol.kind is SymbolKind.GENERATOR:
            if symbol.index > rank:
                raise ContextError(f"generator {symbol} exceeds rank {rank}")
            sums[symbol.index - 1] += exponent
    return tuple(sums)


# ─── formatting ─────────────────────────────────────────────────────────

def format_word(w: Word, names: Mapping[SymbolKind, str] | None = None) -> str:
    """Serialize *w*; ``names`` renames symbol prefixes (e.g. x -> h)."""
    if w.is_identity:
        return "1"
    names = names or {}
    parts = []
    for symbol, exponent in w.letters:
        label = f"{names.get(symbol.kind, symbol.kind.value)}{symbol.index}"
        parts.append(label if exponent == 1 else f"{label}^{exponent}")
    return "*".join(parts)


# ─── parsing ────────────────────────────────────────────────────────────

_TOKEN = re.compile(r"(?:(?P<sym>[zx])(?P<idx>\d+)|(?P<int>-?\d+)|(?P<op>[*^()\[\],]))")


@dataclass(frozen=True, slots=True)
class _Token:
    kind: str  # "sym" | "int" | one of the operator characters | "end"
    text: str
    position: int
    symbol: Symbol | None = None


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if m is None:
            raise WordSyntaxError(f"unexpected character {text[pos]!r}", pos)
        start = pos
        if m.group("sym"):
            idx_text = m.group("idx")
            if int(idx_text) < 1:
                raise WordSyntaxError("symbol index must be positive", start)
            kind = SymbolKind(m.group("sym"))
            tokens.append(_Token("sym", m.group(0).strip(), start, Symbol(kind, int(idx_text))))
        elif m.group("int") is not None:
            tokens.append(_Token("int", m.group("int"), start))
        else:
            tokens.append(_Token(m.group("op"), m.group("op"), start))
        pos = m.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, rank: int | None) -> None:
        self.tokens = _tokenize(text)
        self.i = 0
        self.rank = rank

    @property
    def current(self) -> _Token:
        return self.tokens[self.i]

    def expect(self, kind: str) -> _Token:
        tok = self.current
        if tok.kind != kind:
            found = tok.text or "end of input"
            raise WordSyntaxError(f"expected {kind!r}, found {found!r}", tok.position)
        self.i += 1
        return tok

    def parse(self) -> Word:
        w = self.word()
        if self.current.kind != "end":
            raise WordSyntaxError(f"unexpected {self.current.text!r}", self.current.position)
        return w

    def word(self) -> Word:
        tok = self.current
        if tok.kind == "int":
            if tok.text != "1":
                raise WordSyntaxError(f"unexpected integer {tok.text!r}", tok.position)
            self.i += 1
            return Word.identity()
        w = self.term()
        while self.current.kind == "*":
            self.i += 1
            w = w * self.term()
        return w

    def term(self) -> Word:
        base = self.atom()
        if self.current.kind == "^":
            self.i += 1
            tok = self.expect("int")
            exponent = int(tok.text)
            if exponent == 0 or tok.text.lstrip("-").startswith("0"):
                raise WordSyntaxError("exponent must be a nonzero integer", tok.position)
            base = base ** exponent
        return base

    def atom(self) -> Word:
        tok = self.current
        if tok.kind == "sym":
            self.i += 1
            assert tok.symbol is not None
            if (
                self.rank is not None
                and tok.symbol.kind is SymbolKind.GENERATOR
                and tok.symbol.index > self.rank
            ):
                raise ContextError(
                    f"generator {tok.symbol} exceeds rank {self.rank} at position {tok.position}"
                )
            return Word.of(tok.symbol)
        if tok.kind == "(":
            self.i += 1
            inner = self.word()
            self.expect(")")
            return inner
        if tok.kind == "[":
            self.i += 1
            parts = [self.word()]
            while self.current.kind == ",":
                self.i += 1
                parts.append(self.word())
            self.expect("]")
            if len(parts) < 2:
                raise WordSyntaxError("a commutator needs at least two entries", tok.position)
            return left_normed(*parts)
        found = tok.text or "end of input"
        raise WordSyntaxError(f"unexpected {found!r}", tok.position)


def parse_word(text: str, rank: int | None = None) -> Word:
    """Parse *text* into a freely reduced word.

    Raises ``WordSyntaxError`` (with position) on bad syntax and
    ``ContextError`` when a generator index exceeds *rank*.
    """
    return _Parser(text, rank).parse()
