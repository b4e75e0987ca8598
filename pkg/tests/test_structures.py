import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from limitlearn import (
    OMEGA,
    ZERO,
    Character,
    ExtNat,
    FiniteStructure,
    RepresentationError,
    biembeddable,
    char_diff_min,
    char_of_finite,
    char_subset,
    character,
    component,
    embeds,
    ext,
    fin_biembeddable,
    fin_embeds,
    iso_eq,
    pair_code,
    unpair_code,
)

from families import C56, FIVE_OMEGA, FIVE_OMEGA_TWO, census, small_characters
from oracles import brute_embeds, brute_fin_embeds

OM = "omega"


# ---------------------------------------------------------------------------
# Extended naturals


def test_extnat_order_and_addition():
    assert ExtNat(3) < OMEGA
    assert not OMEGA < ExtNat(3)
    assert OMEGA <= OMEGA
    assert ExtNat(2) + ExtNat(5) == ExtNat(7)
    assert OMEGA + ExtNat(5) == OMEGA
    assert ExtNat(5) + OMEGA == OMEGA
    assert ext("omega").is_omega
    assert ext(4) == ExtNat(4)


@given(st.integers(0, 100), st.integers(0, 100))
def test_extnat_total_order_matches_integers(a, b):
    assert (ExtNat(a) <= ExtNat(b)) == (a <= b)
    assert ExtNat(a) < OMEGA


def test_extnat_rejects_negatives():
    with pytest.raises(RepresentationError):
        ExtNat(-1)


def test_extnat_hash_matches_int_equality():
    assert ExtNat(3) == 3 and hash(ExtNat(3)) == hash(3)
    assert OMEGA != 3 and OMEGA == OMEGA
    assert len({ExtNat(2), 2, OMEGA}) == 2


# ---------------------------------------------------------------------------
# Pairing


@given(st.integers(0, 2000), st.integers(0, 2000))
def test_pairing_roundtrip(x, y):
    assert unpair_code(pair_code(x, y)) == (x, y)


@given(st.integers(0, 50000))
def test_unpairing_roundtrip(code):
    x, y = unpair_code(code)
    assert pair_code(x, y) == code


# ---------------------------------------------------------------------------
# Census counts


def test_count_reads_description():
    assert character((5, OM)).count(5) == OMEGA
    assert census(1, {2: 0}).count(2) == ZERO
    assert census(1, {2: 0}).count(7) == ExtNat(1)


def test_count_rejects_size_zero():
    with pytest.raises(RepresentationError):
        character((5, OM)).count(0)


def test_char_of_finite_counts_blocks():
    s = FiniteStructure.from_blocks([{0, 1}, {2}])
    assert char_of_finite(s) == character((2, 1), (1, 1))
    assert char_of_finite(FiniteStructure.from_blocks([])) == Character.make()
    assert char_of_finite(FiniteStructure.from_blocks([{0}, {1}, {2}])) == character((1, 3))


def test_cumulative_counts():
    assert FIVE_OMEGA.cumulative(3) == OMEGA
    assert character((5, 2), (2, 1)).cumulative(3) == ExtNat(2)
    assert census(1, {2: 0}).cumulative(4) == OMEGA


def test_component_membership():
    assert FIVE_OMEGA.has_component(component(5, 100))
    assert not character((5, 2)).has_component(component(5, 3))
    assert character((5, 2)).has_component(component(5, 2))


def test_canonical_form_is_enforced():
    with pytest.raises(RepresentationError):
        Character(default=ZERO, exceptions=((2, ZERO),))  # exception equals default
    with pytest.raises(RepresentationError):
        Character.make(0, {0: 1}, 0)
    # make() canonicalizes silently
    assert Character.make(1, {3: 1}, 0) == census(1)


# ---------------------------------------------------------------------------
# Subset and least missing component


def test_char_subset_examples():
    assert char_subset(FIVE_OMEGA, FIVE_OMEGA_TWO)
    assert not char_subset(FIVE_OMEGA_TWO, FIVE_OMEGA)
    for c in (FIVE_OMEGA, C56, census(1, {2: 0})):
        assert char_subset(c, c)


def test_char_diff_min_examples():
    a1 = census(1, {1: 0})
    a2 = census(1, {2: 0})
    assert char_diff_min(a1, a2) == component(2, 1)
    assert char_diff_min(FIVE_OMEGA, FIVE_OMEGA) is None
    # computed independently: enumerate both component sets and take the least
    c, s = character((5, 2), (3, 1)), character((5, 1))
    comps_c = {(k, i) for k in (3, 5) for i in range(1, 3) if c.count(k) >= i}
    comps_s = {(k, i) for k in (3, 5) for i in range(1, 3) if s.count(k) >= i}
    expected = min(comps_c - comps_s, key=lambda ki: pair_code(*ki))
    got = char_diff_min(c, s)
    assert (got.size.finite, got.index) == expected


def test_char_diff_min_rejects_infinite_classes():
    with pytest.raises(RepresentationError):
        char_diff_min(census(0, {}, 1), FIVE_OMEGA)


# ---------------------------------------------------------------------------
# Embedding tests against the stated example oracles


def test_fin_embeds_examples():
    assert fin_embeds(FIVE_OMEGA, character((6, OM)))
    assert not fin_embeds(character((6, OM)), FIVE_OMEGA)
    assert fin_embeds(FIVE_OMEGA_TWO, FIVE_OMEGA)
    assert fin_embeds(FIVE_OMEGA, FIVE_OMEGA_TWO)
    # matches the brute-force route on the same pairs
    assert brute_fin_embeds(FIVE_OMEGA, character((6, OM)))
    assert not brute_fin_embeds(character((6, OM)), FIVE_OMEGA)


def test_embeds_examples():
    assert embeds(census(0, {}, 1), census(0, {}, 2))
    assert not embeds(census(0, {}, 1), census(1))
    assert embeds(FIVE_OMEGA_TWO, FIVE_OMEGA)
    assert brute_embeds(FIVE_OMEGA_TWO, FIVE_OMEGA)
    assert not brute_embeds(census(0, {}, 1), census(1))


def test_equivalences():
    assert iso_eq(FIVE_OMEGA, character((5, OM)))
    assert biembeddable(FIVE_OMEGA, FIVE_OMEGA_TWO)
    assert not fin_biembeddable(FIVE_OMEGA, character((6, OM)))
    assert fin_biembeddable(C56, C56)


# ---------------------------------------------------------------------------
# Algebraic properties over generated censuses


_small = st.sampled_from(small_characters())
_with_omega = st.sampled_from(
    small_characters() + [census(0, {5: OM}), census(0, {2: OM, 1: 1}), census(0, {3: 2}, 1)]
)


@settings(max_examples=150, deadline=None)
@given(_with_omega, _with_omega, _with_omega)
def test_embedding_orders_are_preorders(a, b, c):
    assert fin_embeds(a, a) and embeds(a, a)
    if fin_embeds(a, b) and fin_embeds(b, c):
        assert fin_embeds(a, c)
    if embeds(a, b) and embeds(b, c):
        assert embeds(a, c)


@settings(max_examples=150, deadline=None)
@given(_with_omega, _with_omega)
def test_iso_implies_biembeddable(a, b):
    if iso_eq(a, b):
        assert fin_biembeddable(a, b)
        assert biembeddable(a, b)


@settings(max_examples=150, deadline=None)
@given(_with_omega, _with_omega)
def test_mutual_subset_is_isomorphism(a, b):
    if char_subset(a, b) and char_subset(b, a):
        assert iso_eq(a, b)


@settings(max_examples=150, deadline=None)
@given(_small, _small)
def test_diff_min_absent_iff_subset(a, b):
    assert (char_diff_min(a, b) is None) == char_subset(a, b)
    diff = char_diff_min(a, b)
    if diff is not None:
        assert a.has_component(diff)
        assert not b.has_component(diff)


@settings(max_examples=150, deadline=None)
@given(_small, _small)
def test_subset_implies_embeddings(a, b):
    if char_subset(a, b):
        assert fin_embeds(a, b)
        assert embeds(a, b)


def test_structure_validation():
    with pytest.raises(RepresentationError):
        FiniteStructure((frozenset({0, 1}), frozenset({1, 2})))
    with pytest.raises(RepresentationError):
        FiniteStructure((frozenset(), frozenset({0})))
    with pytest.raises(RepresentationError):
        FiniteStructure.from_blocks([{0, 2}])  # not a prefix of the naturals


def test_json_roundtrip():
    for c in (FIVE_OMEGA, FIVE_OMEGA_TWO, census(1, {2: 0}), census(0, {3: 2}, 1), Character.make()):
        assert Character.from_json(c.to_json()) == c
    assert Character.from_json([[5, "omega"], [2, 1]]) == FIVE_OMEGA_TWO
