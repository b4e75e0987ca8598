"""Limits, finite separability, separators, and the anti-chain test.

A structure is a limit of a family when arbitrarily long finite fragments of
it can masquerade as family members, which blocks convergence of any learner
aiming at isomorphism.  For finite families the subfamily quantifier collapses
to pairwise checks; for generated infinite families we give bounded verdicts,
certified where the generator registry supplies a closed-form statement about
which components recur infinitely often.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from .structures import (
    OMEGA,
    ZERO,
    Character,
    Component,
    ExtNat,
    FiniteStructure,
    RepresentationError,
    char_diff_min,
    char_of_finite,
    char_subset,
    fin_biembeddable,
    fin_embeds,
    iso_eq,
    pair_code,
)


class FamilyError(ValueError):
    """A family violates a precondition of the requested operation."""


def _require_finite_classes(chars: Iterable[Character], what: str) -> None:
    for c in chars:
        if c.omega_count != ZERO:
            raise FamilyError(f"{what} is only defined for families without infinite classes")


# ---------------------------------------------------------------------------
# Generators


@dataclass(frozen=True)
class GeneratorSpec:
    """A registered total map index -> Character, injective up to isomorphism.

    ``component_recurs`` decides, in closed form, whether a component occurs
    in infinitely many generated members; None means unknown for purposes of
    bounded limit verdicts.
    """

    name: str
    produce: Callable[[int], Character]
    component_recurs: Optional[Callable[[Component], bool]] = None
    companion_limit: Optional[Character] = None


def _five_n_tail(n: int) -> Character:
    # n classes of size 5 plus unboundedly many singletons
    return Character.make(0, {5: n, 1: OMEGA}, 0)


def _five_n_tail_recurs(comp: Component) -> bool:
    return not comp.size.is_omega and comp.size.finite in (1, 5)


def _kronecker(i: int) -> Character:
    # one class of every finite size except i+1
    return Character.make(1, {i + 1: 0}, 0)


def _kronecker_recurs(comp: Component) -> bool:
    return not comp.size.is_omega and comp.index == 1


GENERATORS: dict[str, GeneratorSpec] = {
    "five_n_tail": GeneratorSpec(
        "five_n_tail", _five_n_tail, _five_n_tail_recurs,
        companion_limit=Character.make(0, {5: OMEGA}, 0),
    ),
    "kronecker": GeneratorSpec("kronecker", _kronecker, _kronecker_recurs),
}


@dataclass(frozen=True)
class Family:
    """A finite list of pairwise non-isomorphic censuses, optionally extended
    by a registered generator."""

    members: tuple[Character, ...] = ()
    generator: Optional[str] = None
    generator_params: dict = field(default_factory=dict, hash=False, compare=False)

    def __post_init__(self):
        for i, a in enumerate(self.members):
            for b in self.members[i + 1:]:
                if iso_eq(a, b):
                    raise RepresentationError(f"family members {a} and {b} are isomorphic")
        if self.generator is not None and self.generator not in GENERATORS:
            raise FamilyError(f"unknown generator {self.generator!r}")

    @classmethod
    def of(cls, *members: Character) -> "Family":
        return cls(tuple(members))

    def spec(self) -> Optional[GeneratorSpec]:
        return GENERATORS[self.generator] if self.generator else None

    def generated(self, n: int) -> list[Character]:
        spec = self.spec()
        if spec is None:
            raise FamilyError("family has no generator")
        return [spec.produce(i) for i in range(n)]

    def to_json(self):
        data = {"members": [m.to_json() for m in self.members]}
        if self.generator:
            data["generator"] = {"name": self.generator, "params": self.generator_params}
        return data

    @classmethod
    def from_json(cls, data) -> "Family":
        members = tuple(Character.from_json(m) for m in data.get("members", []))
        gen = data.get("generator")
        if gen is None:
            return cls(members)
        return cls(members, gen["name"], gen.get("params", {}))

    @classmethod
    def load(cls, path) -> "Family":
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, sort_keys=True, indent=2)
            fh.write("\n")


# ---------------------------------------------------------------------------
# Limits


def limit_witness(candidate: Character, members: Sequence[Character]) -> Character | None:
    """Some member that candidate cannot be separated from: non-isomorphic,
    finitely embeds into the candidate, and realizes every component of it.
    Returns None when no member qualifies."""
    _require_finite_classes([candidate, *members], "the limit test")
    for member in members:
        if iso_eq(member, candidate):
            continue
        if fin_embeds(member, candidate) and char_subset(candidate, member):
            return member
    return None


@dataclass(frozen=True)
class LimitVerdict:
    kind: str  # "limit" | "not-limit" | "unknown"
    bound: int
    detail: str = ""
    certified: bool = False


def generated_limit_verdict(candidate: Character, family: Family, bound: int) -> LimitVerdict:
    """Bounded limit test against a generated family (members isomorphic to the
    candidate are skipped).

    The membership clause is refutable from the first `bound` members; the
    recurrence clause is certified by the generator's closed-form component
    predicate when available, otherwise judged heuristically (a component must
    occur in at least half of the first `bound` members with the count still
    growing) and the verdict stays uncertified.
    """
    spec = family.spec()
    if spec is None:
        raise FamilyError("bounded limit verdicts require a generator")
    if candidate.omega_count != ZERO:
        raise FamilyError("the limit test is only defined without infinite classes")
    members = family.generated(bound)
    _require_finite_classes(members, "the limit test")
    for i, member in enumerate(members):
        if iso_eq(member, candidate):
            continue
        if not fin_embeds(member, candidate):
            return LimitVerdict(
                "not-limit", bound,
                f"member {i} ({member}) does not finitely embed into the candidate",
                certified=True,
            )
    # every component of the candidate's census with canonical code <= bound
    components: list[Component] = []
    size = 1
    while pair_code(size, 1) <= bound:
        count = candidate.count(size)
        idx = 1
        while count >= idx and pair_code(size, idx) <= bound:
            components.append(Component(ExtNat(size), idx))
            idx += 1
        size += 1
    heuristic_used = False
    for comp in components:
        if spec.component_recurs is not None:
            if spec.component_recurs(comp):
                continue
            return LimitVerdict(
                "not-limit", bound,
                f"component {comp} certified to occur in only finitely many members",
                certified=True,
            )
        heuristic_used = True
        half = [m for m in members[: max(1, bound // 2)] if m.has_component(comp)]
        full = [m for m in members if m.has_component(comp)]
        if len(full) < (bound + 1) // 2 or len(full) <= len(half):
            return LimitVerdict(
                "unknown", bound,
                f"component {comp} lacks a recurrence witness at this bound",
            )
    return LimitVerdict("limit", bound, certified=not heuristic_used)


# ---------------------------------------------------------------------------
# Finite separability


@dataclass(frozen=True)
class SeparabilityResult:
    separable: bool
    counterexample: tuple[Character, Character] | None = None  # (limit, witness)

    def __bool__(self) -> bool:
        return self.separable


def finitely_separable(members: Sequence[Character]) -> SeparabilityResult:
    """No member is a limit of the others.  For a finite family the subfamily
    quantifier collapses to this pairwise check."""
    _require_finite_classes(members, "finite separability")
    for candidate in members:
        witness = limit_witness(candidate, [m for m in members if not iso_eq(m, candidate)])
        if witness is not None:
            return SeparabilityResult(False, (candidate, witness))
    return SeparabilityResult(True)


@dataclass(frozen=True)
class Separator:
    owner: Character
    components: frozenset[Component]

    def sorted_components(self) -> list[Component]:
        return sorted(self.components, key=Component.sort_key)

    def to_json(self):
        return [c.to_json() for c in self.sorted_components()]


def separator_of(member: Character, members: Sequence[Character]) -> Separator:
    """The finite component set distinguishing a member from every
    non-isomorphic, finitely bi-embeddable companion in the family."""
    _require_finite_classes(members, "separators")
    if not any(iso_eq(member, m) for m in members):
        raise FamilyError("separator owner must belong to the family")
    comps = set()
    for other in members:
        if iso_eq(other, member) or not fin_biembeddable(other, member):
            continue
        diff = char_diff_min(member, other)
        if diff is not None:  # always present when the family is finitely separable
            comps.add(diff)
    return Separator(member, frozenset(comps))


def separator_realized(sep: Separator, structure: FiniteStructure) -> bool:
    census = char_of_finite(structure)
    return all(census.has_component(c) for c in sep.components)


def fin_antichain(members: Sequence[Character]) -> bool:
    """Pairwise incomparability under finite embedding; for finite families
    this is exactly one-shot (first-conjecture) learnability."""
    for i, a in enumerate(members):
        for b in members[i + 1:]:
            if iso_eq(a, b):
                raise FamilyError("anti-chain test expects pairwise non-isomorphic members")
            if fin_embeds(a, b) or fin_embeds(b, a):
                return False
    return True
