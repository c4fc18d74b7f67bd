"""Retractions, decision rules and the supporting module computations."""
import allure
import pytest

from solvkit.algebra.groupring import laurent_variable
from solvkit.algebra.lattice import is_primitive
from solvkit.algebra.magnus import (
    GroupContext,
    Retraction,
    embed,
    endomorphism_from_words,
    generator,
    identity,
    identity_endomorphism,
    module_power,
)
from solvkit.algebra.words import Word, exponent_vector, format_word, gen, parse_word, var
from solvkit.analysis.closure import (
    EquationSystem,
    Rule,
    Subgroup,
    Verdict,
    analyze,
    commutator_equation,
    conjugation_fixup,
    cyclic_retract,
    derived_subgroup_verdict,
    extract_conjugator,
    fox_linear_system,
    is_idempotent,
    split_equation,
    transport_solution,
    two_generator_check,
    verify_retraction,
)
from solvkit.analysis.search import SearchBounds
from solvkit.core.errors import (
    ContextError,
    GroupMismatchError,
    PreconditionError,
    ZeroElementError,
)

from .factories import random_commutator_word, random_word, rng

pytestmark = [pytest.mark.regression]


def subgroup(ctx, *texts: str) -> Subgroup:
    return Subgroup(ctx, tuple(parse_word(t, ctx.rank) for t in texts))


# ── Inputs ────────────────────────────────────────────────────────────────


@allure.feature("Closure")
@allure.story("Inputs")
@allure.title("Subgroup files: one generator per line, # comments")
def test_subgroup_parse(s22):
    H = Subgroup.parse("# generators\nz1*[z1,z2]\n\n[z1,z2]  # commutator\n", s22)
    assert len(H.generators) == 2
    assert H.exponent_matrix == ((1, 0), (0, 0))
    assert H.abelian_rank == 1
    assert H.element(parse_word("x1*x2^-1")) == embed(parse_word("z1"), s22)
    assert H.expand(parse_word("x2^-1")) == parse_word("[z2,z1]")
    with pytest.raises(PreconditionError):
        Subgroup.parse("# nothing\n", s22)
    with pytest.raises(ContextError):
        Subgroup.parse("x1", s22)
    with pytest.raises(ContextError):
        Subgroup(s22, (parse_word("z3"),))


@allure.feature("Closure")
@allure.story("Inputs")
@allure.title("Equation files keep variables left and constants right")
def test_equation_parse():
    system = EquationSystem.parse("x1*x2 = z1*z2  # product\n[x1,x3] = 1\n", 2)
    assert system.variables == 3
    assert str(system.equations[1]) == "x1*x3*x1^-1*x3^-1 = 1"
    for bad in ("x1 = x2", "x1*z1 = 1", "x1 = z1 = z2", "x1"):
        with pytest.raises(PreconditionError):
            EquationSystem.parse(bad, 2)


@allure.feature("Closure")
@allure.story("Equations")
@allure.title("Constants split off into side equations")
def test_split_equation():
    w = parse_word("x1*z1*x2*z2^-1*z1")
    system = split_equation(w)
    assert system.variables == 4
    assert [str(eq) for eq in system.equations] == [
        "x1*x3*x2*x4 = 1",
        "x3 = z1",
        "x4 = z2^-1*z1",
    ]
    assert split_equation(parse_word("x1^2")).equations[0].lhs == parse_word("x1^2")


@allure.feature("Closure")
@allure.story("Equations")
@allure.title("Commutator-product equations")
def test_commutator_equation():
    system = commutator_equation(parse_word("[z1,z2]"), 2)
    assert system.variables == 4
    assert system.equations[0].lhs == parse_word("[x1,x2]*[x3,x4]")
    with pytest.raises(ValueError):
        commutator_equation(parse_word("z1"), 0)


# ── Cyclic retractions ────────────────────────────────────────────────────


@allure.feature("Closure")
@allure.story("Cyclic retraction")
@allure.severity(allure.severity_level.CRITICAL)
@allure.title("A primitive abelian image yields a verified, idempotent retraction")
@pytest.mark.smoke
def test_cyclic_retract_basic(s22):
    h = parse_word("z1*[z1,z2]")
    attempt = cyclic_retract(h, s22)
    assert attempt.succeeded
    rho = attempt.retraction
    assert rho.lines() == ["retraction: z1 -> z1^2*z2*z1^-1*z2^-1", "retraction: z2 -> 1"]
    check = verify_retraction(rho, Subgroup(s22, (h,)))
    assert check.passed
    assert check.fixes == (True,)
    assert is_idempotent(rho)


@allure.feature("Closure")
@allure.story("Cyclic retraction")
@allure.title("A conjugate of z1 with a commutator tail is a retract")
def test_cyclic_retract_twisted_generator(s22):
    g = parse_word("z1*z2^-1*z1^-1*z2*z1")
    H = Subgroup(s22, (g,))
    attempt = cyclic_retract(g, s22)
    assert attempt.succeeded
    rho = attempt.retraction
    assert rho.apply(g) == embed(g, s22)
    assert verify_retraction(rho, H).passed
    assert is_idempotent(rho)
    report = analyze(H)
    assert report.verdict is Verdict.RETRACT_CONSTRUCTED
    assert report.abelian_rank == 1



@allure.feature("Closure")
@allure.story("Cyclic retraction")
@allure.severity(allure.severity_level.CRITICAL)
@allure.title("Retractions exist exactly for primitive abelian images")
@pytest.mark.parametrize("rank, klass", [(2, 2), (3, 2), (2, 3)])
def test_cyclic_retract_corpus(rank, klass):
    ctx = GroupContext(rank, klass)
    r = rng(83 + rank + klass)
    primitive = non_primitive = 0
    while primitive < 10 or non_primitive < 10:
        w = random_word(r, rank, 6)
        if r.random() < 0.5:
            w = w * w
        e = exponent_vector(w, rank)
        if not any(e):
            continue
        attempt = cyclic_retract(w, ctx)
        if is_primitive(e):
            primitive += 1
            assert attempt.succeeded
            assert verify_retraction(attempt.retraction, Subgroup(ctx, (w,))).passed
            assert is_idempotent(attempt.retraction)
        else:
            non_primitive += 1
            assert not attempt.succeeded
            assert "not primitive" in attempt.reason


@allure.feature("Closure")
@allure.story("Cyclic retraction")
@allure.title("Trivial and non-primitive images are reported, identity rejected")
def test_cyclic_retract_failures(s22):
    attempt = cyclic_retract(parse_word("z1^2"), s22)
    assert attempt.retraction is None
    assert attempt.reason == "abelian image (2, 0) is not primitive (gcd 2)"
    assert cyclic_retract(parse_word("[z1,z2]"), s22).reason == "abelian image is trivial"
    with pytest.raises(ZeroElementError):
        cyclic_retract(parse_word("[z1,z2]*[z2,z1]"), s22)


@allure.feature("Closure")
@allure.story("Verification")
@allure.title("Verification reports unfixed generators and context mismatches")
def test_verify_retraction_failures(s22, s32):
    rho = endomorphism_from_words(s22, [Word.of(gen(1)), Word.identity()])
    check = verify_retraction(rho, subgroup(s22, "z1", "[z1,z2]"))
    assert not check.passed
    assert check.fixes == (True, False)
    assert "does not fix h2" in check.reason
    with pytest.raises(GroupMismatchError):
        verify_retraction(rho, subgroup(s32, "z1"))
    assert not is_idempotent(endomorphism_from_words(s22, [Word.of(gen(2)), Word.of(gen(1))]))


# ── Conjugation fix-up and conjugator extraction ─────────────────────────


@allure.feature("Closure")
@allure.story("Conjugation fix-up")
@allure.title("Undoing an inner twist restores the retraction")
def test_conjugation_fixup(s22):
    H = subgroup(s22, "z1")
    a_word = parse_word("z2*z1^2")
    twisted = [a_word * Word.of(gen(1)) * a_word.inverse(), Word.identity()]
    phi = endomorphism_from_words(s22, twisted)
    psi = conjugation_fixup(phi, embed(a_word, s22), H, a_word=a_word)
    assert psi.lines() == ["retraction: z1 -> z1", "retraction: z2 -> 1"]
    assert verify_retraction(psi, H).passed
    with pytest.raises(PreconditionError):
        conjugation_fixup(identity_endomorphism(s22), generator(2, s22), H)


@allure.feature("Closure")
@allure.story("Conjugation fix-up")
@allure.severity(allure.severity_level.CRITICAL)
@allure.title("A fixed-up map whose images leave H is rejected")
def test_conjugation_fixup_images_outside_subgroup(s22, small_bounds):
    H = subgroup(s22, "z1")
    with pytest.raises(PreconditionError, match="no H-word found for the image of z2"):
        conjugation_fixup(identity_endomorphism(s22), identity(s22), H, bounds=small_bounds)


@allure.feature("Closure")
@allure.story("Conjugation fix-up")
@allure.title("The returned map carries verified H-witnesses")
def test_conjugation_fixup_witnesses(s22):
    H = subgroup(s22, "z1")
    a_word = parse_word("z1*z2")
    twisted = [a_word * Word.of(gen(1)) * a_word.inverse(), Word.identity()]
    psi = conjugation_fixup(endomorphism_from_words(s22, twisted), embed(a_word, s22), H, a_word=a_word)
    assert psi.witnesses is not None
    assert all(w is not None for w in psi.witnesses)
    assert is_idempotent(psi, H)



@allure.feature("Closure")
@allure.story("Conjugator extraction")
@allure.severity(allure.severity_level.CRITICAL)
@allure.title("Forward-constructed conjugators are recovered")
@pytest.mark.parametrize("rank", [2, 3])
def test_extract_conjugator_recovers(rank):
    ctx = GroupContext(rank, 2)
    r = rng(89 + rank)
    for _ in range(25):
        d0 = embed(random_commutator_word(r, rank, 4), ctx)
        cs = [module_power(d0, 1 - laurent_variable(rank, i)) for i in range(1, rank + 1)]
        extraction = extract_conjugator(cs)
        assert extraction.consistent
        assert extraction.d == d0


@allure.feature("Closure")
@allure.story("Conjugator extraction")
@allure.title("Inconsistent inputs are rejected with a reason")
@pytest.mark.parametrize("rank", [2, 3])
def test_extract_conjugator_rejects(rank):
    ctx = GroupContext(rank, 2)
    r = rng(97 + rank)
    rejected = 0
    while rejected < 25:
        d0 = embed(random_commutator_word(r, rank, 4), ctx)
        d1 = embed(random_commutator_word(r, rank, 4), ctx)
        if d0 == d1:
            continue
        cs = [module_power(d0, 1 - laurent_variable(rank, 1)), module_power(d1, 1 - laurent_variable(rank, 2))]
        extraction = extract_conjugator(cs)
        assert not extraction.consistent
        assert extraction.reason == "compatibility fails for c1 and c2"
        rejected += 1


@allure.feature("Closure")
@allure.story("Conjugator extraction")
@allure.title("Divisibility and context preconditions")
def test_extract_conjugator_edges(s22, s23):
    extraction = extract_conjugator([embed(parse_word("[z1,z2]"), s22)])
    assert extraction.reason == "coordinate 1 of c1 is not divisible by 1 - a1"
    with pytest.raises(ContextError):
        extract_conjugator([embed(parse_word("[z1,z2]"), s23)])
    with pytest.raises(PreconditionError):
        extract_conjugator([generator(1, s22)])


# ── Solutions and Fox systems ─────────────────────────────────────────────


@allure.feature("Closure")
@allure.story("Transport")
@allure.title("Retractions carry solutions in G to solutions in H")
def test_transport_solution(s22):
    h = parse_word("z1*[z1,z2]")
    rho = cyclic_retract(h, s22).retraction
    system = EquationSystem.parse("x1^2*x2 = z1*[z1,z2]*z1*[z1,z2]*z2*z2^-1", 2)
    moved = transport_solution(rho, system, [h, Word.identity()])
    assert moved.solves
    assert moved.words[0] == h
    with pytest.raises(PreconditionError):
        transport_solution(rho, system, [parse_word("z1"), Word.identity()])


@allure.feature("Closure")
@allure.story("Fox system")
@allure.title("Fox systems for the cyclic-image shape")
def test_fox_linear_system(s22):
    trivial = fox_linear_system(subgroup(s22, "z1"), [Word.identity(), Word.identity()])
    assert trivial.supported
    assert trivial.solves and trivial.annihilates
    assert trivial.residue == 1
    assert trivial.determinant == 1

    H = subgroup(s22, "z1*[z1,z2]")
    candidate = [Word.of(var(1)), Word.identity()]
    system = fox_linear_system(H, candidate)
    assert system.supported
    assert not system.solves
    assert not system.annihilates
    assert system.residue == 1
    assert system.lines()[-2] == "fox-system: det at a1=1 = 1"

    unsupported = fox_linear_system(subgroup(s22, "z1", "z2"), candidate)
    assert not unsupported.supported
    assert unsupported.lines() == ["fox-system: unsupported (c2 does not lie in the last term of the derived series)"]
    assert not fox_linear_system(subgroup(s22, "z2"), candidate).supported


@allure.feature("Closure")
@allure.story("Two generators")
@allure.title("Two generators spanning a rank-2 direct factor")
def test_two_generator_check(s32):
    assert two_generator_check(subgroup(s32, "z1*[z2,z3]", "z2"))
    assert not two_generator_check(subgroup(s32, "z1", "z2^2"))
    assert not two_generator_check(subgroup(s32, "z1", "z2", "z3"))


# ── Decision rules ────────────────────────────────────────────────────────


@allure.feature("Closure")
@allure.story("Derived subgroup rule")
@allure.severity(allure.severity_level.CRITICAL)
@allure.title("Nontrivial subgroups of G' are not verbally closed")
def test_derived_subgroup_rule(s22):
    bounds = SearchBounds(max_length=5, exponent_cap=5, max_candidates=100_000)
    report = derived_subgroup_verdict(subgroup(s22, "[z1,z2]"), search=True, bounds=bounds)
    assert report.verdict is Verdict.NOT_VERBALLY_CLOSED
    assert report.rule is Rule.DERIVED_SUBGROUP
    assert not report.search.found
    assert any("no solution in H within the search bounds" in j for j in report.justification)

    trivial = analyze(subgroup(s22, "1", "[z1,z2]*[z2,z1]"))
    assert trivial.verdict is Verdict.RETRACT_CONSTRUCTED
    assert trivial.retraction.lines() == ["retraction: z1 -> 1", "retraction: z2 -> 1"]

    assert derived_subgroup_verdict(subgroup(s22, "z1")).verdict is Verdict.UNKNOWN


@allure.feature("Closure")
@allure.story("Analyze")
@allure.severity(allure.severity_level.CRITICAL)
@allure.title("Rule dispatch over representative subgroups")
@pytest.mark.parametrize(
    "rank, klass, generators, rule, verdict",
    [
        (2, 2, ["z1*[z1,z2]"], Rule.CYCLIC_IMAGE, Verdict.RETRACT_CONSTRUCTED),
        (2, 3, ["z1*[z1,z2]"], Rule.CYCLIC_IMAGE, Verdict.RETRACT_CONSTRUCTED),
        (2, 2, ["[z1,z2]"], Rule.DERIVED_SUBGROUP, Verdict.NOT_VERBALLY_CLOSED),
        (2, 2, ["z1^2"], Rule.DIRECT_FACTOR, Verdict.NOT_VERBALLY_CLOSED),
        (3, 2, ["z1^2*z2^2", "z3"], Rule.DIRECT_FACTOR, Verdict.NOT_VERBALLY_CLOSED),
        (2, 2, ["z1^2*z2^3", "z1^4*z2^6"], Rule.CYCLIC_IMAGE, Verdict.CONDITIONAL),
        (2, 2, ["z1", "[z1,z2]"], Rule.CYCLIC_IMAGE, Verdict.CONDITIONAL),
        (2, 2, ["z1", "z2"], Rule.FULL_IMAGE, Verdict.CONDITIONAL),
        (3, 2, ["z1", "z2"], Rule.TWO_GENERATED, Verdict.CONDITIONAL),
        (3, 2, ["z1", "z2", "[z1,z3]"], Rule.METABELIAN_RANK, Verdict.CONDITIONAL),
        (3, 3, ["z1", "z2", "[z1,z3]"], Rule.NONE, Verdict.UNKNOWN),
    ],
)
def test_analyze_dispatch(rank, klass, generators, rule, verdict):
    ctx = GroupContext(rank, klass)
    report = analyze(subgroup(ctx, *generators))
    assert report.rule is rule
    assert report.verdict is verdict
    if verdict is Verdict.RETRACT_CONSTRUCTED:
        assert report.retraction is not None
        assert verify_retraction(report.retraction, subgroup(ctx, *generators)).passed
    lines = report.lines()
    assert lines[1] == f"rule={rule.value}"
    assert lines[2] == f"verdict={verdict.value}"


@allure.feature("Closure")
@allure.story("Analyze")
@allure.title("The cyclic-image fallback searches the Fox system equations")
def test_cyclic_image_fallback_search(s22):
    bounds = SearchBounds(max_length=2, exponent_cap=2, max_candidates=50_000)
    report = analyze(subgroup(s22, "z1", "[z1,z2]"), search=True, bounds=bounds)
    assert report.verdict is Verdict.CONDITIONAL
    assert report.search is not None and not report.search.found
    assert report.justification[0].startswith("cyclic retraction onto <")
    assert report.justification[0].endswith("fails: does not fix h2")


@allure.feature("Closure")
@allure.story("Analyze")
@allure.title("Searching certifies H = G for full-rank images")
def test_full_image_certificate(s22, small_bounds):
    report = analyze(subgroup(s22, "z1*z2", "z2"), search=True, bounds=small_bounds)
    assert report.verdict is Verdict.EQUALS_FULL_GROUP
    lines = report.lines()
    assert "retraction: z1 -> z1" in lines
    assert "certificate: z1 = h1*h2^-1" in lines
    assert report.retraction.witnesses[1] == Word.of(var(2))
    assert format_word(report.retraction.witnesses[0]) == "x1*x2^-1"


@allure.feature("Closure")
@allure.story("Analyze")
@allure.title("Reports list abelian rank, rule and verdict first")
def test_report_lines(s22):
    lines = analyze(subgroup(s22, "z1*[z1,z2]")).lines()
    assert lines[:5] == [
        "rab=1",
        "rule=cyclic-image",
        "verdict=retract-constructed",
        "retraction: z1 -> z1^2*z2*z1^-1*z2^-1",
        "retraction: z2 -> 1",
    ]
    assert all(line.startswith("justification: ") for line in lines[5:])
    assert Retraction(s22, (generator(1, s22), generator(2, s22))).image_label(1) == generator(1, s22).serial
