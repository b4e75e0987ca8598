"""Learners over informant and text streams, traces, and bounded simulation.

A learner is a deterministic, resettable state machine from fed items to
conjectures.  A conjecture is either a census (Character) or None, printed as
"?".  Learners cache their conjecture between items that cannot change it, so
feeding a long stream is cheap; all of them are cloneable so adversaries can
probe hypothetical extensions.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .presentations import INFORMANT, TEXT, PrefixState, Stream, reorder_items
from .separability import FamilyError, Separator, fin_antichain, finitely_separable, separator_of
from .structures import (
    ZERO,
    Character,
    FiniteStructure,
    biembeddable,
    embeds,
    fin_biembeddable,
    fin_embeds,
    iso_eq,
)

Conjecture = Optional[Character]


def conjectures_equal(a: Conjecture, b: Conjecture) -> bool:
    if a is None or b is None:
        return a is None and b is None
    return iso_eq(a, b)


def conjecture_str(c: Conjecture) -> str:
    return "?" if c is None else str(c)


class Learner:
    """Base interface: reset, feed one item, report the current conjecture.

    ``consume`` updates state without forcing the (possibly lazy) conjecture;
    callers that only sample conjectures occasionally should prefer it.
    """

    mode: str = INFORMANT
    name: str = "learner"

    def reset(self) -> None:
        raise NotImplementedError

    def consume(self, item) -> None:
        raise NotImplementedError

    def feed(self, item) -> Conjecture:
        self.consume(item)
        return self.conjecture()

    def conjecture(self) -> Conjecture:
        raise NotImplementedError

    def clone(self) -> "Learner":
        raise NotImplementedError


class ConstantLearner(Learner):
    def __init__(self, char: Character, mode: str = INFORMANT):
        self.char = char
        self.mode = mode
        self.name = f"constant{char}"

    def reset(self) -> None:
        pass

    def consume(self, item) -> None:
        pass

    def conjecture(self) -> Conjecture:
        return self.char

    def clone(self) -> "ConstantLearner":
        return ConstantLearner(self.char, self.mode)


class SplitOnNegativeLearner(Learner):
    """Conjectures one all-encompassing infinite class until any negative fact
    between distinct elements arrives, then two infinite classes forever."""

    ONE = Character.make(0, {}, 1)
    TWO = Character.make(0, {}, 2)

    mode = INFORMANT
    name = "split-on-negative"

    def __init__(self):
        self._split = False

    def reset(self) -> None:
        self._split = False

    def consume(self, item) -> None:
        x, y, label = item
        if not label and x != y:
            self._split = True

    def conjecture(self) -> Conjecture:
        return self.TWO if self._split else self.ONE

    def clone(self) -> "SplitOnNegativeLearner":
        dup = SplitOnNegativeLearner()
        dup._split = self._split
        return dup


class EchoLearner(Learner):
    """Conjectures the census of whatever finite structure the prefix decodes to."""

    name = "echo"

    def __init__(self, mode: str = INFORMANT):
        self.mode = mode
        self._state = PrefixState(mode)

    def reset(self) -> None:
        self._state = PrefixState(self.mode)

    def consume(self, item) -> None:
        self._state.feed(item)

    def conjecture(self) -> Conjecture:
        return self._state.char()

    def clone(self) -> "EchoLearner":
        dup = EchoLearner(self.mode)
        dup._state = self._state.copy()
        return dup


class MinEmbedLearner(Learner):
    """Conjectures the least-indexed family member that hosts the data and is
    minimal in the finite-embedding order among the hosts.

    This learner stabilizes on the finite-bi-embeddability type of the target;
    when run on its own it should be judged up to that equivalence.
    """

    mode = INFORMANT

    def __init__(self, members: Sequence[Character], enforce: bool = True):
        members = tuple(members)
        if enforce:
            for m in members:
                if m.omega_count != ZERO:
                    raise FamilyError("this learner requires families without infinite classes")
            if not finitely_separable(members):
                raise FamilyError("this learner requires a finitely separable family")
        self.members = members
        self.name = "min-embed"
        n = len(members)
        self._strictly_below = [
            [fin_embeds(members[j], members[i]) and not fin_embeds(members[i], members[j])
             for j in range(n)]
            for i in range(n)
        ]
        self._state = PrefixState(INFORMANT)
        self._rev = -1
        self._cached: Conjecture = None
        self._cached_index: int | None = None

    def reset(self) -> None:
        self._state = PrefixState(INFORMANT)
        self._rev = -1

    def _recompute(self) -> None:
        census = self._state.char()
        hosts = [i for i, m in enumerate(self.members) if embeds(census, m)]
        minimal = [
            i for i in hosts
            if not any(self._strictly_below[i][j] for j in hosts)
        ]
        self._cached_index = min(minimal) if minimal else None
        self._cached = self.members[self._cached_index] if minimal else None
        self._rev = self._state.struct_rev

    def consume(self, item) -> None:
        self._state.feed(item)

    def conjecture(self) -> Conjecture:
        if self._rev != self._state.struct_rev:
            self._recompute()
        return self._cached

    def conjectured_index(self) -> int | None:
        self.conjecture()
        return self._cached_index

    def clone(self) -> "MinEmbedLearner":
        dup = MinEmbedLearner.__new__(MinEmbedLearner)
        dup.members = self.members
        dup.name = self.name
        dup._strictly_below = self._strictly_below
        dup._state = self._state.copy()
        dup._rev = self._rev
        dup._cached = self._cached
        dup._cached_index = self._cached_index
        return dup


class SeparatorLearner(Learner):
    """Refines MinEmbedLearner to the isomorphism type via realized separators.

    Within the current finite-bi-embeddability class, the conjecture is the
    member whose separator has been realized the longest by a fixed set of
    witness blocks.  Tracking witnesses (rather than bare realization) is what
    makes transient block sizes harmless: a block that is still growing keeps
    resetting the age of any separator it helped realize.
    """

    mode = INFORMANT

    def __init__(self, members: Sequence[Character], enforce: bool = True):
        self._inner = MinEmbedLearner(members, enforce=enforce)
        self.members = self._inner.members
        self.name = "separator"
        self._separators: list[Separator] = [
            separator_of(m, self.members) for m in self.members
        ]
        n = len(self.members)
        self._class_of: list[list[int]] = [
            [j for j in range(n) if fin_biembeddable(self.members[j], self.members[i])]
            for i in range(n)
        ]
        self._rev = -1
        self._cached: Conjecture = None

    @property
    def _state(self) -> PrefixState:
        return self._inner._state

    def reset(self) -> None:
        self._inner.reset()
        self._rev = -1

    def _realized_since(self, sep: Separator) -> int | None:
        """Earliest stage from which one fixed witness assignment for every
        component has persisted; None when some component is unrealized."""
        state = self._state
        since = 0
        for comp in sep.components:
            births = state.births_for_size(comp.size.finite)
            if len(births) < comp.index:
                return None
            births.sort()
            since = max(since, births[comp.index - 1])
        return since

    def _recompute(self) -> None:
        idx = self._inner.conjectured_index()
        if idx is None:
            self._cached = None
            self._rev = self._state.struct_rev
            return
        best: tuple[int, int] | None = None
        for j in self._class_of[idx]:
            since = self._realized_since(self._separators[j])
            if since is None:
                continue
            key = (since, j)
            if best is None or key < best:
                best = key
        self._cached = self.members[best[1]] if best else None
        self._rev = self._state.struct_rev

    def consume(self, item) -> None:
        self._inner._state.feed(item)

    def conjecture(self) -> Conjecture:
        if self._rev != self._state.struct_rev:
            self._recompute()
        return self._cached

    def clone(self) -> "SeparatorLearner":
        dup = SeparatorLearner.__new__(SeparatorLearner)
        dup._inner = self._inner.clone()
        dup.members = self.members
        dup.name = self.name
        dup._separators = self._separators
        dup._class_of = self._class_of
        dup._rev = self._rev
        dup._cached = self._cached
        return dup


def _partitions(total: int, max_part: int):
    """Descending partitions of `total` with parts bounded by `max_part`."""
    if total == 0:
        yield ()
        return
    for first in range(min(total, max_part), 0, -1):
        for rest in _partitions(total - first, first):
            yield (first,) + rest


def distinguishing_substructure(
    member: Character, others: Sequence[Character], cap: int = 200
) -> FiniteStructure:
    """Smallest finite substructure of `member` (by total size, then profile)
    embeddable into no other member."""

    def parts_ge(profile, t):
        return sum(1 for p in profile if p >= t)

    max_part = 1
    for c in (member, *others):
        for size, _ in c.exceptions:
            max_part = max(max_part, size + 1)
    for total in range(1, cap + 1):
        for profile in sorted(_partitions(total, max_part)):
            thresholds = set(profile)
            if any(not member.cumulative(t) >= parts_ge(profile, t) for t in thresholds):
                continue  # not realizable inside member
            if all(
                any(parts_ge(profile, t) > other.cumulative(t) for t in thresholds)
                for other in others
            ):
                blocks, start = [], 0
                for p in profile:
                    blocks.append(range(start, start + p))
                    start += p
                return FiniteStructure.from_blocks(blocks)
    raise FamilyError(f"no distinguishing substructure of {member} within size {cap}")


class OneShotLearner(Learner):
    """Stays silent until a distinguishing finite substructure of some member
    shows up in explicitly separated blocks, then commits to that member forever.

    Distinct witness blocks may only be used when the data has explicitly
    labeled them apart; blocks that merely look distinct could still merge.
    """

    mode = INFORMANT

    def __init__(
        self,
        members: Sequence[Character],
        witnesses: Sequence[FiniteStructure] | None = None,
        enforce: bool = True,
    ):
        members = tuple(members)
        if enforce and not fin_antichain(members):
            raise FamilyError("one-shot learning requires a finite-embedding anti-chain")
        self.members = members
        self.name = "one-shot"
        if witnesses is None:
            witnesses = [
                distinguishing_substructure(m, [o for o in members if o is not m])
                for m in members
            ]
        self.witnesses = list(witnesses)
        self._profiles = [
            sorted((len(b) for b in w.blocks), reverse=True) for w in self.witnesses
        ]
        self._state = PrefixState(INFORMANT)
        self._fired: int | None = None
        self._rev = (-1, -1)

    def reset(self) -> None:
        self._state = PrefixState(INFORMANT)
        self._fired = None
        self._rev = (-1, -1)

    def _witness_present(self, profile: list[int]) -> bool:
        state = self._state
        hosts = sorted(
            ((state.block_size(r), r) for r in state.block_roots() if state.block_size(r) >= profile[-1]),
        )
        chosen: list[int] = []

        def assign(i: int) -> bool:
            if i == len(profile):
                return True
            need = profile[i]
            for size, root in hosts:
                if size < need or root in chosen:
                    continue
                if all(state.separated(root, c) for c in chosen):
                    chosen.append(root)
                    if assign(i + 1):
                        return True
                    chosen.pop()
            return False

        return assign(0)

    def consume(self, item) -> None:
        self._state.feed(item)
        if self._fired is not None:
            return
        rev = (self._state.struct_rev, self._state.neg_rev)
        if rev == self._rev:
            return
        self._rev = rev
        counts = self._state.size_counts
        top = max(counts) if counts else 0
        for i, profile in enumerate(self._profiles):
            if profile[0] <= top and self._witness_present(profile):
                self._fired = i
                return

    def conjecture(self) -> Conjecture:
        return None if self._fired is None else self.members[self._fired]

    def clone(self) -> "OneShotLearner":
        dup = OneShotLearner.__new__(OneShotLearner)
        dup.members = self.members
        dup.name = self.name
        dup.witnesses = self.witnesses
        dup._profiles = self._profiles
        dup._state = self._state.copy()
        dup._fired = self._fired
        dup._rev = self._rev
        return dup


class TextFromInformantLearner(Learner):
    """Runs an informant learner on the class-by-class reordering of the text.

    The reordered prefix depends only on the decoded classes, so the base
    learner is re-run only when the decoded structure actually changes; when
    the new reordering extends the old one, the retained base instance is fed
    just the appended items.
    """

    mode = TEXT

    def __init__(self, base: Learner):
        if base.mode != INFORMANT:
            raise ValueError("base learner must consume informants")
        self._pristine = base.clone()
        self.name = f"txt-{base.name}"
        self._state = PrefixState(TEXT)
        self._base = base.clone()
        self._fed: list = []
        self._rev = self._state.struct_rev
        self._cached = self._base.conjecture()

    def reset(self) -> None:
        self._state = PrefixState(TEXT)
        self._base = self._pristine.clone()
        self._fed = []
        self._rev = self._state.struct_rev
        self._cached = self._base.conjecture()

    def consume(self, item) -> None:
        self._state.feed(item)
        if self._state.struct_rev != self._rev:
            self._rev = self._state.struct_rev
            items = reorder_items(self._state.blocks())
            if len(items) >= len(self._fed) and items[: len(self._fed)] == self._fed:
                delta = items[len(self._fed):]
            else:
                self._base = self._pristine.clone()
                delta = items
            for it in delta:
                self._base.feed(it)
            self._fed = items
            self._cached = self._base.conjecture()

    def conjecture(self) -> Conjecture:
        return self._cached

    def clone(self) -> "TextFromInformantLearner":
        dup = TextFromInformantLearner.__new__(TextFromInformantLearner)
        dup._pristine = self._pristine.clone()
        dup.name = self.name
        dup._state = self._state.copy()
        dup._base = self._base.clone()
        dup._fed = list(self._fed)
        dup._rev = self._rev
        dup._cached = self._cached
        return dup


# ---------------------------------------------------------------------------
# Factories (the names the CLI understands)


def learner_constant(char: Character, mode: str = INFORMANT) -> ConstantLearner:
    return ConstantLearner(char, mode)


def learner_split_on_negative() -> SplitOnNegativeLearner:
    return SplitOnNegativeLearner()


def learner_echo(mode: str = INFORMANT) -> EchoLearner:
    return EchoLearner(mode)


def learner_min_embed(members: Sequence[Character], enforce: bool = True) -> MinEmbedLearner:
    return MinEmbedLearner(members, enforce)


def learner_separator(members: Sequence[Character], enforce: bool = True) -> SeparatorLearner:
    return SeparatorLearner(members, enforce)


def learner_one_shot(
    members: Sequence[Character],
    witnesses: Sequence[FiniteStructure] | None = None,
    enforce: bool = True,
) -> OneShotLearner:
    return OneShotLearner(members, witnesses, enforce)


def learner_from_text(base: Learner) -> TextFromInformantLearner:
    return TextFromInformantLearner(base)


# ---------------------------------------------------------------------------
# Traces and simulation


@dataclass
class Trace:
    """Conjecture sequence of a run; index 0 is the empty-history conjecture."""

    conjectures: list

    @property
    def mind_changes_ex(self) -> list[int]:
        return [
            s for s in range(1, len(self.conjectures))
            if not conjectures_equal(self.conjectures[s], self.conjectures[s - 1])
        ]

    @property
    def mind_changes_fin(self) -> list[int]:
        return [
            s for s in range(1, len(self.conjectures))
            if self.conjectures[s - 1] is not None
            and not conjectures_equal(self.conjectures[s], self.conjectures[s - 1])
        ]

    def fin_shape(self, target: Character, relation: str = "iso") -> bool:
        """The one-shot success shape: some correct census is conjectured and
        nothing else (question marks aside) ever is."""
        rel = RELATIONS[relation]
        actual = [c for c in self.conjectures if c is not None]
        return bool(actual) and all(rel(c, target) and iso_eq(c, actual[0]) for c in actual)

    def final(self) -> Conjecture:
        return self.conjectures[-1]

    def stable_from(self) -> int:
        """First stage from which the conjecture never changes again."""
        last = len(self.conjectures) - 1
        start = last
        while start > 0 and conjectures_equal(self.conjectures[start - 1], self.conjectures[last]):
            start -= 1
        return start

    def lines(self) -> list[str]:
        out = []
        for s, c in enumerate(self.conjectures):
            changed = s > 0 and not conjectures_equal(c, self.conjectures[s - 1])
            out.append(f"stage {s}: {conjecture_str(c)}" + (" [MC]" if changed else ""))
        return out


RELATIONS: dict[str, Callable[[Character, Character], bool]] = {
    "iso": iso_eq,
    "biembed": biembeddable,
}


@dataclass
class SimulationResult:
    trace: Trace
    converged: bool
    stage: int | None
    target: Character | None
    relation: str
    horizon: int
    window: int
    exhausted: bool = False

    @property
    def final(self) -> Conjecture:
        return self.trace.final()

    def summary(self) -> dict:
        return {
            "converged": self.converged,
            "stage": self.stage,
            "final": None if self.final is None else self.final.to_json(),
            "target": None if self.target is None else self.target.to_json(),
            "relation": self.relation,
            "horizon": self.horizon,
            "window": self.window,
            "mind_changes": len(self.trace.mind_changes_ex),
            "mind_change_stages": self.trace.mind_changes_ex,
            "exhausted": self.exhausted,
        }


def run_simulation(
    learner: Learner,
    stream,
    stages: int,
    target: Character | None = None,
    relation: str = "iso",
    window: int = 200,
) -> SimulationResult:
    """Feed `stages` items and judge bounded-horizon convergence.

    Converged means: the conjecture is constant over the final `window` stages
    and, when a target is given, the final conjecture matches it under the
    chosen relation.  The reported stage is the first from which the
    conjecture never changed again.
    """
    if stages < 1:
        raise ValueError("stages must be >= 1")
    if window < 1 or window > stages:
        raise ValueError("window must satisfy 1 <= window <= stages")
    if isinstance(stream, Stream) and stream.kind != learner.mode:
        raise ValueError(f"{learner.mode} learner cannot read a {stream.kind} stream")
    learner.reset()
    conjectures = [learner.conjecture()]
    exhausted = False
    it = iter(stream)
    for _ in range(stages):
        try:
            item = next(it)
        except StopIteration:
            exhausted = True
            break
        conjectures.append(learner.feed(item))
    trace = Trace(conjectures)
    stable = trace.stable_from()
    steady = len(conjectures) - stable > window
    correct = True
    if target is not None:
        final = trace.final()
        correct = final is not None and RELATIONS[relation](final, target)
    converged = steady and correct and not exhausted
    return SimulationResult(
        trace, converged, stable if converged else None,
        target, relation, stages, window, exhausted,
    )
