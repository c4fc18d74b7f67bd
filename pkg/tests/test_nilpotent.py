"""The class-4 nilpotent quotient of the free metabelian group, and the grid scans."""
import allure
import pytest

from solvkit.algebra.magnus import GroupContext, embed
from solvkit.algebra.nilpotent import (
    ScanReport,
    basic_commutators,
    bc_coordinates,
    commutator_tail_check,
    from_bc_coordinates,
    is_distinguished_pattern,
    nil_embed,
    nil_group,
    nil_project,
    power_identity_check,
    swap_coefficients_check,
    swap_coefficients_found,
    swap_coefficients_scan,
    swap_commutator_coefficients,
    swap_equation_scan,
    swap_solutions_confirmed,
)
from solvkit.algebra.words import parse_word
from solvkit.core.errors import ContextError, PreconditionError

from .factories import random_commutator_word, random_word, rng

pytestmark = [pytest.mark.regression]


# ── Quotient arithmetic ───────────────────────────────────────────────────


@allure.feature("Nilpotent quotient")
@allure.story("Projection")
@allure.title("Projecting metabelian normal forms agrees with direct embedding")
def test_projection_is_homomorphic():
    ctx = GroupContext(3, 2)
    r = rng(71)
    for _ in range(40):
        w = random_word(r, 3, 10)
        assert nil_project(embed(w, ctx)) == nil_embed(w, 3)
    with pytest.raises(ContextError):
        nil_project(embed(parse_word("z1"), GroupContext(2, 3)))


@allure.feature("Nilpotent quotient")
@allure.story("Lower central series")
@allure.severity(allure.severity_level.CRITICAL)
@allure.title("Weights of left-normed commutators")
@pytest.mark.smoke
@pytest.mark.parametrize(
    "text, weight",
    [
        ("z1", 1),
        ("[z1,z2]", 2),
        ("[z1,z2,z1]", 3),
        ("[z1,z2,z2,z1]", 4),
        ("[z1,z2,z1,z1,z1]", 5),
        ("[[z1,z2],[z1,z2]]", 5),
    ],
)
def test_weights(text, weight):
    element = nil_embed(parse_word(text), 2)
    assert element.weight() == weight
    assert element.is_identity == (weight == 5)


@allure.feature("Nilpotent quotient")
@allure.story("Basic commutators")
@allure.title("Basic commutator counts match the free metabelian ranks")
@pytest.mark.parametrize("rank, weight, count", [(2, 2, 1), (2, 3, 2), (2, 4, 3), (3, 2, 3), (3, 3, 8), (3, 4, 15)])
def test_basic_commutator_counts(rank, weight, count):
    basis = basic_commutators(rank, weight)
    assert len(basis) == count
    assert all(t[0] > t[1] for t in basis)


@allure.feature("Nilpotent quotient")
@allure.story("Basic commutators")
@allure.severity(allure.severity_level.CRITICAL)
@allure.title("Coordinates of basis elements and of products")
def test_bc_coordinates():
    group = nil_group(2)
    z1, z2 = group.generator(1), group.generator(2)
    coords = bc_coordinates(group.left_normed(z2, z1, z1, z1))
    assert coords == {(2, 1, 1, 1): 1, (2, 1, 1, 2): 0, (2, 1, 2, 2): 0}
    element = from_bc_coordinates(2, {(2, 1, 1, 1): 3, (2, 1, 2, 2): -2})
    assert bc_coordinates(element) == {(2, 1, 1, 1): 3, (2, 1, 1, 2): 0, (2, 1, 2, 2): -2}
    assert bc_coordinates(group.left_normed(z2, z1), 2) == {(2, 1): 1}
    # [z1,z2,z2,z1] = [z2,z1,z2,z1]^-1 and the last two entries swap modulo γ5
    assert bc_coordinates(group.left_normed(z1, z2, z2, z1))[(2, 1, 1, 2)] == -1


@allure.feature("Nilpotent quotient")
@allure.story("Basic commutators")
@allure.severity(allure.severity_level.CRITICAL)
@allure.title("Random coordinate vectors survive from_bc_coordinates then bc_coordinates")
@pytest.mark.parametrize("rank, weight", [(2, 3), (2, 4), (3, 3), (3, 4)])
def test_bc_coordinates_random_vectors(rank, weight):
    r = rng(83 + 10 * rank + weight)
    basis = basic_commutators(rank, weight)
    for _ in range(25):
        exponents = {kappa: r.randint(-3, 3) for kappa in basis}
        assert bc_coordinates(from_bc_coordinates(rank, exponents), weight) == exponents



@allure.feature("Nilpotent quotient")
@allure.story("Basic commutators")
@allure.title("Elements outside γ_w are rejected")
def test_bc_coordinates_precondition():
    with pytest.raises(PreconditionError):
        bc_coordinates(nil_embed(parse_word("[z1,z2,z1]"), 2), 4)
    with pytest.raises(PreconditionError):
        bc_coordinates(nil_embed(parse_word("z1"), 2), 2)


# ── Identities ────────────────────────────────────────────────────────────


@allure.feature("Nilpotent quotient")
@allure.story("Identities")
@allure.title("Weight-4 commutators are multilinear in the exponents")
def test_power_identity():
    for k in [(1, 1, 1, 1), (2, -1, 3, 1), (-2, 2, -1, 3), (0, 1, 1, 1)]:
        assert power_identity_check(k)
    assert power_identity_check((2, 3, -1, 2), (3, 1, 2, 2))


@allure.feature("Nilpotent quotient")
@allure.story("Swap coefficients")
@allure.severity(allure.severity_level.CRITICAL)
@allure.title("Closed-form swap coefficients agree with exact coordinates")
def test_swap_coefficients_random():
    r = rng(73)
    for _ in range(60):
        k = tuple(r.randint(-3, 3) for _ in range(3))
        m = tuple(r.randint(-3, 3) for _ in range(3))
        assert swap_coefficients_check(k, m, 2)
        assert swap_coefficients_check(k, m, 3)


@allure.feature("Nilpotent quotient")
@allure.story("Swap coefficients")
@allure.title("The distinguished pattern yields exponents (1, 0, 0)")
def test_distinguished_pattern():
    k, m = (1, 0, 2), (0, -1, 1)
    assert is_distinguished_pattern(k, m, 2)
    assert swap_commutator_coefficients(k, m, 2) == (1, 0, 0)
    assert swap_coefficients_found(k, m, 2) == (1, 0, 0)
    assert not is_distinguished_pattern((1, 1, 0), (0, 1, 0), 2)
    assert swap_commutator_coefficients((1, 1, 0), (0, 1, 0), 2) == (1, 0, 1)
    with pytest.raises(ValueError):
        swap_commutator_coefficients((1, 0), (0, 1), 1)


@allure.feature("Nilpotent quotient")
@allure.story("Swap equation")
@allure.title("Commutator tails do not change the swap commutator modulo γ5")
def test_commutator_tail_check():
    r = rng(79)
    for _ in range(15):
        a, b, c, d = (r.randint(-2, 2) for _ in range(4))
        tails = (random_commutator_word(r, 2, 3), random_commutator_word(r, 2, 3))
        assert commutator_tail_check(a, b, c, d, tails)
    with pytest.raises(PreconditionError):
        commutator_tail_check(1, 0, 0, 1, (parse_word("z1"), parse_word("1")))


# ── Scans ─────────────────────────────────────────────────────────────────


@allure.feature("Nilpotent quotient")
@allure.story("Swap equation")
@allure.severity(allure.severity_level.CRITICAL)
@allure.title("Only (±1, 0, 0, ±1) solves the swap equation")
@pytest.mark.parametrize("bound", [1, 2, 3])
def test_swap_equation_scan(bound):
    report = swap_equation_scan(bound)
    assert report.confirmed
    assert report.solutions == ((-1, 0, 0, -1), (-1, 0, 0, 1), (1, 0, 0, -1), (1, 0, 0, 1))
    assert report.render()[-1] == f"LEMMA7-QUOTIENT: CONFIRMED bound={bound}"
    assert report.lines[0] == "(-1,0,0,-1)"


@allure.feature("Nilpotent quotient")
@allure.story("Swap equation")
@allure.severity(allure.severity_level.CRITICAL)
@allure.title("The swap verdict needs all four unit solutions and nothing else")
@pytest.mark.parametrize(
    "solutions, expected",
    [
        ([(-1, 0, 0, -1), (-1, 0, 0, 1), (1, 0, 0, -1), (1, 0, 0, 1)], True),
        ([], False),
        ([(1, 0, 0, 1)], False),
        ([(-1, 0, 0, -1), (-1, 0, 0, 1), (1, 0, 0, -1)], False),
        ([(-1, 0, 0, -1), (-1, 0, 0, 1), (1, 0, 0, -1), (1, 0, 0, 1), (0, 1, 1, 0)], False),
    ],
)
def test_swap_solutions_confirmed(solutions, expected):
    assert swap_solutions_confirmed(solutions) is expected



@allure.feature("Nilpotent quotient")
@allure.story("Swap coefficients")
@allure.title("Coefficient scan on a small grid")
def test_swap_coefficients_scan_small():
    report = swap_coefficients_scan(1, rank=3, i=2)
    assert report.confirmed
    assert report.lines[0].startswith("checked=729 mismatches=0 unit-pattern=")
    assert report.verdict_line == "EQ19-ORACLE: CONFIRMED bound=1"


@allure.feature("Nilpotent quotient")
@allure.story("Swap coefficients")
@allure.severity(allure.severity_level.CRITICAL)
@allure.title("Full coefficient grid for rank 2")
def test_swap_coefficients_scan_rank_two():
    report = swap_coefficients_scan(3, rank=2, i=2)
    assert report.confirmed
    assert report.lines == ("checked=2401 mismatches=0 unit-pattern=4",)



@allure.feature("Nilpotent quotient")
@allure.story("Swap coefficients")
@allure.title("Full coefficient grid |k_j|, |m_j| <= 3")
@pytest.mark.slow
def test_swap_coefficients_scan_full():
    report = swap_coefficients_scan(3, rank=3, i=2)
    assert report.confirmed
    assert report.lines[0].startswith("checked=117649 mismatches=0")


@allure.feature("Nilpotent quotient")
@allure.story("Scans")
@allure.title("Scan bounds must be positive and reports render verdicts")
def test_scan_bounds():
    with pytest.raises(PreconditionError):
        swap_equation_scan(0)
    with pytest.raises(PreconditionError):
        swap_coefficients_scan(1, rank=3, i=1)
    report = ScanReport("LEMMA7-QUOTIENT", 2, False, ("(0,1,1,0)",))
    assert report.render() == ["(0,1,1,0)", "LEMMA7-QUOTIENT: VIOLATED bound=2"]
