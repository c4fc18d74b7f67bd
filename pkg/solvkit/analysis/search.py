"""
Bounded enumeration of subgroup words.

Candidates are words over ``x1..xm`` where ``x_k`` stands for the k-th
generator h_k of a subgroup H.  Single words come in shortlex order over
the alphabet ``x1, x1^-1, x2, x2^-1, ...`` (freely reduced, every syllable
exponent at most the cap); tuples are ordered by total length, then by the
length composition, then lexicographically.  The order is fixed, so a
search with the same inputs and bounds always returns the same answer.

An exhausted search proves nothing: the result says so in ``reason``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import product
from typing import TYPE_CHECKING, Iterator, Sequence

from solvkit.algebra.magnus import SolvableElement, evaluate, generator, identity, invert, multiply
from solvkit.algebra.words import Symbol, SymbolKind, Word, format_word, var
from solvkit.core.config import settings

if TYPE_CHECKING:
    from solvkit.analysis.closure import EquationSystem, Subgroup

logger = logging.getLogger(__name__)

H_NAMES = {SymbolKind.VARIABLE: "h"}


@dataclass(frozen=True, slots=True)
class SearchBounds:
    max_length: int
    exponent_cap: int
    max_candidates: int

    def __post_init__(self) -> None:
        if self.max_length < 0 or self.exponent_cap < 1 or self.max_candidates < 1:
            raise ValueError(f"invalid search bounds {self}")

    @classmethod
    def from_settings(cls, **overrides: int) -> SearchBounds:
        values = {
            "max_length": settings.SEARCH_MAX_LENGTH,
            "exponent_cap": settings.SEARCH_EXPONENT_CAP,
            "max_candidates": settings.SEARCH_MAX_CANDIDATES,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass(frozen=True, slots=True)
class SearchResult:
    """Outcome of a bounded search; ``solution`` is None when nothing was found."""

    solution: tuple[Word, ...] | None
    explored: int
    reason: str

    @property
    def found(self) -> bool:
        return self.solution is not None

    def lines(self) -> list[str]:
        if self.solution is None:
            return [f"search: none found <= bounds ({self.reason}; explored={self.explored})"]
        return [
            f"search: x{i} = {format_word(w, H_NAMES)}" for i, w in enumerate(self.solution, start=1)
        ]


# ─── enumeration ───────────────────────────────────────────────────────

def _alphabet(m: int) -> list[tuple[Symbol, int]]:
    return [(var(k), s) for k in range(1, m + 1) for s in (1, -1)]


def enumerate_h_words(
    generators: Sequence[SolvableElement], bounds: SearchBounds
) -> Iterator[list[tuple[Word, SolvableElement]]]:
    """Yield, per length 0..L, the shortlex-ordered words of that length with their values."""
    ctx = generators[0].context
    letters = _alphabet(len(generators))
    values = {
        (symbol, s): generators[symbol.index - 1] if s > 0 else invert(generators[symbol.index - 1])
        for symbol, s in letters
    }
    level: list[tuple[Word, SolvableElement]] = [(Word.identity(), identity(ctx))]
    yield level
    for _ in range(bounds.max_length):
        nxt: list[tuple[Word, SolvableElement]] = []
        for w, element in level:
            last = w.letters[-1] if w.letters else None
            for symbol, s in letters:
                if last is not None and last[0] == symbol:
                    if (last[1] > 0) != (s > 0) or abs(last[1]) >= bounds.exponent_cap:
                        continue
                    extended = Word(w.letters[:-1] + ((symbol, last[1] + s),))
                else:
                    extended = Word(w.letters + ((symbol, s),))
                nxt.append((extended, multiply(element, values[(symbol, s)])))
        level = nxt
        yield level


def _compositions(total: int, parts: int, cap: int) -> Iterator[tuple[int, ...]]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(min(total, cap) + 1):
        for rest in _compositions(total - first, parts - 1, cap):
            yield (first, *rest)


def find_witness(target: SolvableElement, H: Subgroup, bounds: SearchBounds | None = None) -> Word | None:
    """First H-word (in shortlex order) whose value equals *target*."""
    bounds = bounds or SearchBounds.from_settings()
    explored = 0
    for level in enumerate_h_words(H.normal_forms, bounds):
        for w, element in level:
            explored += 1
            if element == target:
                logger.debug("witness %s found after %d words", format_word(w, H_NAMES), explored)
                return w
            if explored >= bounds.max_candidates:
                return None
    return None


def bounded_search(
    system: EquationSystem, H: Subgroup, bounds: SearchBounds | None = None
) -> SearchResult:
    """First tuple of H-words solving every equation of *system*."""
    bounds = bounds or SearchBounds.from_settings()
    ctx = H.context
    targets = [evaluate(eq.rhs, (), context=ctx) for eq in system.equations]
    n = system.variables
    by_length = list(enumerate_h_words(H.normal_forms, bounds))

    explored = 0
    for total in range(n * (len(by_length) - 1) + 1):
        for shape in _compositions(total, n, len(by_length) - 1):
            for candidate in product(*(by_length[length] for length in shape)):
                explored += 1
                images = tuple(element for _, element in candidate)
                if all(
                    evaluate(eq.lhs, images, context=ctx) == target
                    for eq, target in zip(system.equations, targets)
                ):
                    solution = tuple(w for w, _ in candidate)
                    logger.info("bounded search solved %d equations after %d candidates", len(targets), explored)
                    return SearchResult(solution, explored, "solved")
                if explored >= bounds.max_candidates:
                    logger.warning("bounded search stopped at the candidate budget (%d)", explored)
                    return SearchResult(None, explored, "candidate budget exhausted")
    return SearchResult(None, explored, f"all words up to length {bounds.max_length} tried")


def certify_generators(H: Subgroup, bounds: SearchBounds | None = None) -> tuple[Word | None, ...]:
    """H-word witnesses for z1..zr (None where the bounded search fails)."""
    ctx = H.context
    return tuple(find_witness(generator(i, ctx), H, bounds) for i in range(1, ctx.rank + 1))
