"""Word parsing, formatting, free reduction and substitution."""
import allure
import pytest

from solvkit.algebra.words import (
    Word,
    commutator,
    exponent_sum,
    exponent_vector,
    format_word,
    free_reduce,
    gen,
    left_normed,
    parse_word,
    substitute,
    var,
)
from solvkit.core.errors import ContextError, UnboundVariableError, WordSyntaxError

from .factories import random_word, rng

pytestmark = [pytest.mark.regression]


def z(i: int, e: int = 1) -> Word:
    return Word.of(gen(i), e)


# ── Parsing ───────────────────────────────────────────────────────────────


@allure.feature("Words")
@allure.story("Parse")
@allure.severity(allure.severity_level.CRITICAL)
@allure.title("Commutator brackets expand to u v u^-1 v^-1")
@pytest.mark.smoke
def test_parse_commutator():
    assert parse_word("[z1,z2]") == z(1) * z(2) * z(1, -1) * z(2, -1)


@allure.feature("Words")
@allure.story("Parse")
@allure.title("Nested brackets are left-normed")
def test_parse_left_normed():
    a, b, c = z(1), z(2), z(1, 2)
    assert parse_word("[z1,z2,z1^2]") == commutator(commutator(a, b), c)
    assert parse_word("[z1,z2,z1^2]") == left_normed(a, b, c)


@allure.feature("Words")
@allure.story("Parse")
@allure.title("Identity spellings")
@pytest.mark.parametrize("text", ["1", "z1*z1^-1", "(z2^3)^-1*z2^3", "[z1,z1]"])
def test_parse_identity(text):
    w = parse_word(text)
    assert w.is_identity
    assert format_word(w) == "1"


@allure.feature("Words")
@allure.story("Parse")
@allure.title("Whitespace is ignored and syllables merge")
def test_parse_merges_syllables():
    w = parse_word(" z1 * z1 ^ 2 * z2 ")
    assert w.letters == ((gen(1), 3), (gen(2), 1))
    assert len(w) == 4


@allure.feature("Words")
@allure.story("Parse errors")
@allure.severity(allure.severity_level.CRITICAL)
@allure.title("Syntax errors report the offending position")
@pytest.mark.parametrize(
    "text, position",
    [
        ("z1**z2", 3),
        ("z1^", 3),
        ("[z1", 3),
        ("z1 # z2", 3),
        ("z0", 0),
        ("z1^0", 3),
        ("[z1]", 0),
    ],
)
def test_parse_errors(text, position):
    with pytest.raises(WordSyntaxError) as info:
        parse_word(text)
    assert info.value.position == position
    assert f"position {position}" in info.value.detail


@allure.feature("Words")
@allure.story("Parse errors")
@allure.title("Generators beyond the rank are rejected")
def test_parse_rank_violation():
    with pytest.raises(ContextError):
        parse_word("z1*z3", rank=2)
    assert parse_word("z1*z3").max_index(gen(1).kind) == 3


# ── Formatting ────────────────────────────────────────────────────────────


@allure.feature("Words")
@allure.story("Format")
@allure.title("format_word and parse_word agree on reduced words")
def test_format_parse_agree():
    r = rng(7)
    for _ in range(50):
        w = random_word(r, 3, 10)
        assert parse_word(format_word(w)) == w


@allure.feature("Words")
@allure.story("Format")
@allure.title("Exponents are written only when different from 1")
def test_format_exponents():
    assert format_word(parse_word("z1^2*z2^-1*z3")) == "z1^2*z2^-1*z3"


# ── Reduction and substitution ───────────────────────────────────────────


@allure.feature("Words")
@allure.story("Free reduction")
@allure.title("Free reduction cancels across syllable boundaries")
def test_free_reduce():
    letters = [(gen(1), 1), (gen(2), 2), (gen(2), -2), (gen(1), -1), (gen(3), 1)]
    assert free_reduce(letters) == z(3)
    w = random_word(rng(3), 3, 12)
    assert (w * w.inverse()).is_identity
    assert (w.inverse() * w).is_identity


@allure.feature("Words")
@allure.story("Substitution")
@allure.title("Variables are replaced, constants pass through")
def test_substitute():
    w = Word.of(var(1)) * z(2) * Word.of(var(1), -1)
    image = substitute(w, {var(1): z(1) * z(3)})
    assert image == z(1) * z(3) * z(2) * z(3, -1) * z(1, -1)


@allure.feature("Words")
@allure.story("Substitution")
@allure.title("Missing images raise UnboundVariableError")
def test_substitute_unbound():
    with pytest.raises(UnboundVariableError):
        substitute(Word.of(var(2)), {var(1): z(1)})


@allure.feature("Words")
@allure.story("Abelianization")
@allure.title("Exponent sums and vectors")
def test_exponent_vector():
    w = parse_word("z1^3*[z1,z2]*z2^-1*z3^2")
    assert exponent_vector(w, 3) == (3, -1, 2)
    assert exponent_sum(w, gen(1)) == 3
    assert exponent_vector(parse_word("[z1,z2,z3]"), 3) == (0, 0, 0)
    g = parse_word("z1*z2^-1*z1^-1*z2*z1")
    assert exponent_vector(g, 2) == (1, 0)
    assert exponent_sum(g, gen(2)) == 0
    with pytest.raises(ContextError):
        exponent_vector(w, 2)
