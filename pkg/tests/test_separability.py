import pytest

from limitlearn import (
    Character,
    Family,
    FamilyError,
    GENERATORS,
    PrefixState,
    component,
    fair_informant,
    fin_antichain,
    finitely_separable,
    generated_limit_verdict,
    limit_witness,
    separator_of,
    separator_realized,
    structure_from_prefix,
    informant_prefix,
)
from limitlearn.separability import GeneratorSpec

from families import (
    C57,
    EXAMPLE1,
    EXAMPLE2,
    FIVE_OMEGA,
    FIVE_OMEGA_TWO,
    NONSEPARABLE,
    SEPARABLE_CORPUS,
    census,
    kron,
    kron_slice,
)

OM = "omega"


# ---------------------------------------------------------------------------
# Limits


def test_limit_witness_examples():
    assert limit_witness(FIVE_OMEGA, [FIVE_OMEGA_TWO]) == FIVE_OMEGA_TWO
    assert limit_witness(census(0, {5: OM, 6: 2}), [census(0, {5: OM, 7: 1})]) is None
    assert limit_witness(FIVE_OMEGA, [FIVE_OMEGA]) is None


def test_limit_witness_rejects_infinite_classes():
    with pytest.raises(FamilyError):
        limit_witness(census(0, {}, 1), [FIVE_OMEGA])


def test_finitely_separable_examples():
    res = finitely_separable(NONSEPARABLE)
    assert not res.separable
    assert res.counterexample == (FIVE_OMEGA, FIVE_OMEGA_TWO)
    assert finitely_separable(EXAMPLE1).separable
    for m in range(2, 7):
        assert finitely_separable(kron_slice(m)).separable


def test_separable_is_monotone_under_subfamilies():
    for name, fam in SEPARABLE_CORPUS.items():
        assert finitely_separable(fam).separable, name
        for i in range(len(fam)):
            sub = fam[:i] + fam[i + 1:]
            assert finitely_separable(sub).separable, (name, i)


# ---------------------------------------------------------------------------
# Separators


def test_separator_examples():
    a1, a2 = kron_slice(2)
    assert separator_of(a1, [a1, a2]).sorted_components() == [component(2, 1)]
    assert separator_of(FIVE_OMEGA, [FIVE_OMEGA]).components == frozenset()
    fam = EXAMPLE1
    # the two members are not finitely bi-embeddable, so both separators are empty
    assert separator_of(C57, fam).components == frozenset()


def test_separator_within_one_class():
    # all kronecker members share one finite-bi-embeddability class; the
    # separator of each collects the least component missing from every other
    fam = kron_slice(4)
    for i, member in enumerate(fam):
        sep = separator_of(member, fam)
        expected = {component(j + 1, 1) for j in range(4) if j != i}
        assert sep.components == expected, (i, sep)


def test_separators_form_an_antichain():
    fam = kron_slice(4)
    seps = [separator_of(m, fam).components for m in fam]
    for i, a in enumerate(seps):
        for j, b in enumerate(seps):
            if i != j:
                assert not a <= b, (i, j)


def test_separator_realized():
    fam = kron_slice(3)
    sep = separator_of(fam[0], fam)  # components <2,1>, <3,1>
    s, _ = structure_from_prefix(
        informant_prefix([(0, 1, 1), (2, 3, 1), (3, 4, 1), (0, 2, 0)])
    )
    assert separator_realized(sep, s)
    empty_sep = separator_of(FIVE_OMEGA, [FIVE_OMEGA])
    assert separator_realized(empty_sep, s)
    just7 = separator_of(C57, [C57, census(0, {6: 1, 1: OM})])  # placeholder owner check
    assert just7.owner == C57


def test_every_member_eventually_realizes_its_separator():
    for fam in (kron_slice(4), (census(0, {2: 1, 1: OM}), census(0, {2: 2, 1: OM}))):
        for member in fam:
            sep = separator_of(member, fam)
            state = PrefixState("informant")
            it = iter(fair_informant(member, 0))
            for _ in range(4000):
                state.feed(next(it))
            census_now = state.char()
            assert all(census_now.has_component(c) for c in sep.components), (member, sep)


def test_separator_requires_membership():
    with pytest.raises(FamilyError):
        separator_of(FIVE_OMEGA, EXAMPLE1)


# ---------------------------------------------------------------------------
# Anti-chain (one-shot learnability)


def test_fin_antichain_examples():
    assert fin_antichain(EXAMPLE1)
    assert not fin_antichain(EXAMPLE2)
    assert fin_antichain((FIVE_OMEGA,))
    assert not fin_antichain(kron_slice(3))


def test_antichain_implies_separable():
    for name, fam in SEPARABLE_CORPUS.items():
        if len(fam) > 1 and fin_antichain(fam):
            assert finitely_separable(fam).separable, name
    # and the non-separable pair is not an anti-chain
    assert not fin_antichain(NONSEPARABLE)


# ---------------------------------------------------------------------------
# Generated families


def test_five_n_tail_limit_verdict():
    fam = Family(generator="five_n_tail")
    for bound in (8, 32):
        verdict = generated_limit_verdict(FIVE_OMEGA, fam, bound)
        assert verdict.kind == "limit", verdict
        assert verdict.certified


def test_kronecker_limit_verdicts():
    fam = Family(generator="kronecker")
    for i in range(5):
        verdict = generated_limit_verdict(kron(i), fam, 32)
        assert verdict.kind == "limit", (i, verdict)
        assert verdict.certified


def test_clause_one_refutation():
    # a census that some generated member does not finitely embed into
    fam = Family(generator="kronecker")
    verdict = generated_limit_verdict(FIVE_OMEGA, fam, 16)
    assert verdict.kind == "not-limit"
    assert "finitely embed" in verdict.detail


def test_certified_finite_component_refutation():
    # a registered-for-this-test generator whose closed form rules a component out
    GENERATORS["test-six"] = GeneratorSpec(
        "test-six",
        lambda n: Character.make(0, {6: n + 1, 1: OM}, 0),
        lambda comp: not comp.size.is_omega and comp.size.finite in (1, 6),
    )
    try:
        fam = Family(generator="test-six")
        verdict = generated_limit_verdict(census(0, {6: OM, 2: 1}), fam, 24)
        assert verdict.kind == "not-limit"
        assert "finitely many" in verdict.detail
    finally:
        del GENERATORS["test-six"]


def test_heuristic_verdict_without_closed_form():
    GENERATORS["test-blind"] = GeneratorSpec(
        "test-blind",
        lambda n: Character.make(0, {5: n + 1, 1: OM}, 0),
        None,
    )
    try:
        fam = Family(generator="test-blind")
        verdict = generated_limit_verdict(FIVE_OMEGA, fam, 32)
        assert verdict.kind == "limit"
        assert not verdict.certified  # heuristic witness only
    finally:
        del GENERATORS["test-blind"]


def test_generated_verdict_requires_generator():
    with pytest.raises(FamilyError):
        generated_limit_verdict(FIVE_OMEGA, Family.of(FIVE_OMEGA), 8)


# ---------------------------------------------------------------------------
# Family files


def test_family_json_roundtrip(tmp_path):
    fam = Family(EXAMPLE1, "kronecker", {})
    fam.dump(tmp_path / "f.json")
    loaded = Family.load(tmp_path / "f.json")
    assert loaded.members == fam.members
    assert loaded.generator == "kronecker"


def test_family_rejects_isomorphic_members():
    from limitlearn import RepresentationError

    with pytest.raises(RepresentationError):
        Family.of(FIVE_OMEGA, census(0, {5: OM}))
