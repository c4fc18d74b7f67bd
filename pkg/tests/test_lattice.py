"""Smith normal form, abelian rank and primitivity."""
import allure
import pytest
from sympy import ImmutableMatrix

from solvkit.algebra.lattice import (
    abelian_rank,
    bezout_vector,
    format_matrix,
    is_direct_factor,
    is_primitive,
    parse_matrix,
    smith_normal_form,
    two_generator_check,
    unimodular_complete,
)
from solvkit.core.errors import NotPrimitiveError, ZeroElementError

from .factories import random_exponent_vector, rng

pytestmark = [pytest.mark.regression]


def _assert_decomposition(A):
    snf = smith_normal_form(A)
    assert snf.U * ImmutableMatrix(A) * snf.V == snf.D
    assert abs(snf.U.det()) == 1
    assert abs(snf.V.det()) == 1
    factors = snf.invariant_factors
    assert all(f > 0 for f in factors)
    assert all(b % a == 0 for a, b in zip(factors, factors[1:]))
    for i in range(snf.D.rows):
        for j in range(snf.D.cols):
            if i != j:
                assert snf.D[i, j] == 0
    return snf


# ── Smith normal form ─────────────────────────────────────────────────────


@allure.feature("Lattice")
@allure.story("Smith normal form")
@allure.severity(allure.severity_level.CRITICAL)
@allure.title("U*A*V = D with unimodular transforms and a divisibility chain")
@pytest.mark.smoke
@pytest.mark.parametrize(
    "A, factors",
    [
        ([[2, 4], [6, 8]], (2, 4)),
        ([[1, 0], [0, 1]], (1, 1)),
        ([[2, 0], [0, 3]], (1, 6)),
        ([[0, 0, 0]], ()),
        ([[4, 6, 10]], (2,)),
        ([[1, 2, 3], [4, 5, 6], [7, 8, 9]], (1, 3)),
    ],
)
def test_smith_normal_form(A, factors):
    snf = _assert_decomposition(A)
    assert snf.invariant_factors == factors


@allure.feature("Lattice")
@allure.story("Smith normal form")
@allure.title("Random integer matrices decompose correctly")
def test_smith_normal_form_random():
    r = rng(11)
    for _ in range(40):
        rows = r.randint(1, 4)
        cols = r.randint(1, 4)
        A = [[r.randint(-9, 9) for _ in range(cols)] for _ in range(rows)]
        _assert_decomposition(A)


@allure.feature("Lattice")
@allure.story("Abelian rank")
@allure.title("Rank of the span of abelian images")
def test_abelian_rank():
    assert abelian_rank([[1, 0], [0, 1], [1, 1]]) == 2
    assert abelian_rank([[2, 4], [1, 2]]) == 1
    assert abelian_rank([[0, 0]]) == 0
    assert abelian_rank([]) == 0


# ── Primitivity and direct factors ────────────────────────────────────────


@allure.feature("Lattice")
@allure.story("Primitivity")
@allure.title("gcd of the entries decides primitivity")
def test_is_primitive():
    assert is_primitive((2, 3))
    assert is_primitive((0, -1, 0))
    assert not is_primitive((2, 4, 6))
    with pytest.raises(ZeroElementError):
        is_primitive((0, 0))


@allure.feature("Lattice")
@allure.story("Direct factors")
@allure.title("Direct factors have all invariant factors equal to 1")
def test_is_direct_factor():
    assert is_direct_factor([[1, 0, 0], [0, 1, 0]])
    assert is_direct_factor([[2, 3]])
    assert not is_direct_factor([[2, 0]])
    assert not is_direct_factor([[1, 1], [1, -1]])
    assert is_direct_factor([[0, 0]])


@allure.feature("Lattice")
@allure.story("Primitivity")
@allure.severity(allure.severity_level.CRITICAL)
@allure.title("Bezout vectors pair to 1 and completions are unimodular")
def test_bezout_and_completion():
    r = rng(5)
    checked = 0
    while checked < 30:
        v = random_exponent_vector(r, r.randint(1, 4), spread=6)
        if not is_primitive(v):
            with pytest.raises(NotPrimitiveError):
                bezout_vector(v)
            continue
        m = bezout_vector(v)
        assert sum(a * b for a, b in zip(m, v)) == 1
        W = unimodular_complete(v)
        assert abs(W.det()) == 1
        assert tuple(int(x) for x in W.row(0)) == v
        checked += 1


@allure.feature("Lattice")
@allure.story("Two generators")
@allure.title("Two rows spanning a rank-2 direct factor")
def test_two_generator_check():
    assert two_generator_check([[1, 0, 0], [0, 1, 0]])
    assert two_generator_check([[1, 2, 0], [0, 1, 5]])
    assert not two_generator_check([[1, 0], [0, 2]])
    assert not two_generator_check([[1, 0], [2, 0]])
    assert not two_generator_check([[1, 0, 0]])


# ── Serialization ─────────────────────────────────────────────────────────


@allure.feature("Lattice")
@allure.story("Serialization")
@allure.title("Matrix files: comma rows and # comments")
def test_parse_and_format_matrix():
    text = "# abelian images\n1, 2\n\n3,4  # second\n"
    A = parse_matrix(text)
    assert A == ((1, 2), (3, 4))
    assert format_matrix(A) == "1,2\n3,4"
    with pytest.raises(ValueError):
        parse_matrix("1,2\n3")
