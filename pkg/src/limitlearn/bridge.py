"""Translation between structure learning and language learning.

A census translates to a size sequence g (slot index -> class size) and then
to the language { <i,j> : j < g(i) }.  Size sequences are finitely described
(explicit prefix, round-robin tail streams, finite overrides), which keeps
membership, pointwise comparison, and subset checks on the induced languages
exact.  Finite permutations of the slots give the language family a census
maps to; all searches over that family are bounded and say so.
"""
from __future__ import annotations

import functools
import itertools
import math
import random
from dataclasses import dataclass
from typing import Optional, Sequence

from .learners import Learner
from .presentations import INFORMANT, PrefixState, Stream
from .structures import (
    OMEGA,
    ZERO,
    Character,
    ExtNat,
    RepresentationError,
    embeds,
    ext,
    unpair_code,
)

LANGUAGE = "language"


# ---------------------------------------------------------------------------
# Size sequences


@dataclass(frozen=True)
class _ConstStream:
    value: ExtNat

    def nth(self, n: int) -> ExtNat:
        return self.value

    def settle(self) -> int:
        return 1


@dataclass(frozen=True)
class _PatternStream:
    """Ascending admissible sizes, each repeated `per_size` times."""

    per_size: int
    skip: frozenset[int]
    start: int = 1

    def nth(self, n: int) -> ExtNat:
        q = n // self.per_size
        size = self.start
        while True:
            if size not in self.skip:
                if q == 0:
                    return ExtNat(size)
                q -= 1
            size += 1

    def settle(self) -> int:
        top = max(self.skip, default=0) + self.start + 1
        admissible = sum(1 for s in range(self.start, top + 1) if s not in self.skip)
        return self.per_size * (admissible + 1)


@dataclass(frozen=True)
class SizeSequence:
    """A finitely described total map slot index -> class size (0 = no class)."""

    prefix: tuple[ExtNat, ...] = ()
    streams: tuple = ()
    overrides: tuple[tuple[int, ExtNat], ...] = ()

    def eval(self, i: int) -> ExtNat:
        for idx, value in self.overrides:
            if idx == i:
                return value
        if i < len(self.prefix):
            return self.prefix[i]
        if not self.streams:
            return ZERO
        j = i - len(self.prefix)
        return self.streams[j % len(self.streams)].nth(j // len(self.streams))

    def settle_index(self) -> int:
        """Index past the prefix, overrides, and stream warm-up, from which the
        sequence is exactly periodic-affine."""
        base = len(self.prefix)
        if self.overrides:
            base = max(base, 1 + max(i for i, _ in self.overrides))
        S = max(1, len(self.streams))
        warm = max((s.settle() for s in self.streams), default=1)
        return base + S * (warm + 1)

    def period(self) -> int:
        S = max(1, len(self.streams))
        ds = [s.per_size for s in self.streams if isinstance(s, _PatternStream)]
        return S * math.lcm(*ds) if ds else S

    def __str__(self) -> str:
        head = ",".join(repr(v) for v in self.prefix[:8])
        return f"SizeSequence([{head}...], {len(self.streams)} streams)"


LanguageDesc = SizeSequence


def size_sequence_of(char: Character) -> SizeSequence:
    """The canonical slot layout for a census: finitely-counted sizes first
    (ascending), then the unbounded demands round-robin."""
    if char.default.is_omega:
        raise RepresentationError("size sequences for an infinite default are out of scope")
    prefix: list[ExtNat] = []
    for size, count in char.exceptions:
        if not count.is_omega:
            prefix.extend([ExtNat(size)] * count.finite)
    if not char.omega_count.is_omega:
        prefix.extend([OMEGA] * char.omega_count.finite)
    streams: list = []
    for size, count in char.exceptions:
        if count.is_omega:
            streams.append(_ConstStream(ExtNat(size)))
    if char.default != ZERO:
        streams.append(_PatternStream(char.default.finite, frozenset(char.sizes_of_interest)))
    if char.omega_count.is_omega:
        streams.append(_ConstStream(OMEGA))
    return SizeSequence(tuple(prefix), tuple(streams))


def slot_count(seq: SizeSequence, size: "ExtNat | int | str") -> ExtNat:
    """How many slots carry exactly the given size (the census count property)."""
    size = ext(size)
    total = 0
    for i in range(len(seq.prefix)):
        if seq.eval(i) == size:
            total += 1
    checked = set(range(len(seq.prefix)))
    for idx, value in seq.overrides:
        if idx in checked:
            continue
        checked.add(idx)
        if value == size:
            total += 1
        base = seq.prefix[idx] if idx < len(seq.prefix) else _tail_value(seq, idx)
        if idx >= len(seq.prefix) and base == size:
            total -= 1  # the override hides one tail occurrence
    for stream in seq.streams:
        if isinstance(stream, _ConstStream):
            if stream.value == size:
                return OMEGA
        else:
            if size.is_omega:
                continue
            if size.finite >= stream.start and size.finite not in stream.skip:
                total += stream.per_size
    return ExtNat(total)


def _tail_value(seq: SizeSequence, i: int) -> ExtNat:
    if not seq.streams:
        return ZERO
    j = i - len(seq.prefix)
    return seq.streams[j % len(seq.streams)].nth(j // len(seq.streams))


# ---------------------------------------------------------------------------
# Pointwise comparison (exact, via eventual periodicity)


@functools.lru_cache(maxsize=65536)
def _values(seq: SizeSequence, upto: int) -> tuple:
    return tuple(seq.eval(i) for i in range(upto))


def _steps(seq: SizeSequence, base: int, period: int) -> list:
    values = _values(seq, base + 3 * period)
    out = []
    for rho in range(period):
        v0, v1, v2 = (values[base + rho + k * period] for k in range(3))
        if v0.is_omega or v1.is_omega:
            if not (v0.is_omega and v1.is_omega and v2.is_omega):
                raise RuntimeError("sequence not settled at the computed base")
            out.append(None)
            continue
        step = v1.finite - v0.finite
        if v2.finite - v1.finite != step or step < 0:
            raise RuntimeError("sequence not settled at the computed base")
        out.append(step)
    return out


@functools.lru_cache(maxsize=1 << 20)
def seq_le(a: SizeSequence, b: SizeSequence) -> bool:
    """Pointwise comparison of two size sequences (= language inclusion)."""
    base = max(a.settle_index(), b.settle_index())
    period = math.lcm(a.period(), b.period())
    va = _values(a, base + 3 * period)
    vb = _values(b, base + 3 * period)
    for i in range(base + 2 * period):
        if not va[i] <= vb[i]:
            return False
    sa = _steps(a, base, period)
    sb = _steps(b, base, period)
    for rho in range(period):
        if sb[rho] is None:
            continue
        if sa[rho] is None or sa[rho] > sb[rho]:
            return False
    return True


def seq_eq(a: SizeSequence, b: SizeSequence) -> bool:
    return seq_le(a, b) and seq_le(b, a)


# ---------------------------------------------------------------------------
# Languages


def lang_member(lang: SizeSequence, code: int) -> bool:
    i, j = unpair_code(code)
    value = lang.eval(i)
    return value.is_omega or j < value.finite


def fair_language_text(lang: SizeSequence, seed: int = 0) -> Stream:
    """Text for the language: member codes ascending (seed-shuffled in small
    windows), pauses elsewhere."""
    rng = random.Random(seed)

    def gen():
        code = 0
        while True:
            window = list(range(code, code + 16))
            code += 16
            rng.shuffle(window)
            for c in window:
                yield c if lang_member(lang, c) else None

    return Stream(LANGUAGE, None, gen())


# ---------------------------------------------------------------------------
# Finite permutations


@dataclass(frozen=True)
class FinitePermutation:
    """A bijection on the naturals that moves only finitely many points."""

    moves: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        src = [a for a, _ in self.moves]
        dst = [b for _, b in self.moves]
        if sorted(src) != sorted(dst) or len(set(src)) != len(src):
            raise ValueError("not a permutation")
        if any(a == b for a, b in self.moves):
            raise ValueError("fixed points do not belong in the support")

    def apply(self, i: int) -> int:
        for a, b in self.moves:
            if a == i:
                return b
        return i

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(sorted(a for a, _ in self.moves))

    def key(self) -> tuple:
        supp = self.support
        return (len(supp), supp, tuple(self.apply(a) for a in supp))


IDENTITY = FinitePermutation()


def finite_permutations(value_bound: int, support_bound: int):
    """Canonical enumeration: by support size, then support set, then mapping."""
    yield IDENTITY
    for size in range(2, support_bound + 1):
        for supp in itertools.combinations(range(value_bound), size):
            for image in itertools.permutations(supp):
                if all(a != b for a, b in zip(supp, image)):
                    yield FinitePermutation(tuple(zip(supp, image)))


def permuted(seq: SizeSequence, perm: FinitePermutation) -> SizeSequence:
    """The sequence i -> seq(perm(i)); equal outside the permutation's support."""
    if not perm.moves:
        return seq
    overrides = {i: v for i, v in seq.overrides}
    new_overrides = dict(overrides)
    for a, b in perm.moves:
        new_overrides[a] = seq.eval(b)
    return SizeSequence(seq.prefix, seq.streams, tuple(sorted(new_overrides.items())))


def language_closure(langs: Sequence[SizeSequence], positions: int) -> list[SizeSequence]:
    """The given languages together with all transposition variants over the
    first `positions` slots (a bounded stand-in for the full permutation closure)."""
    out = list(langs)
    for lang in langs:
        for a in range(positions):
            for b in range(a + 1, positions):
                cand = permuted(lang, FinitePermutation(((a, b), (b, a))))
                if not any(seq_eq(cand, seen) for seen in out):
                    out.append(cand)
    return out


# ---------------------------------------------------------------------------
# Tell-tales


def telltale_search(
    lang: SizeSequence,
    family_langs: Sequence[SizeSequence],
    bound: int,
) -> Optional[set[int]]:
    """A finite subset of the language that no other family language can sit
    above (between it and the language), or None at this bound.

    The set carries one separating code per properly-included family language;
    codes and the set size are capped by `bound`.
    """
    witnesses: set[int] = set()
    for other in family_langs:
        if seq_eq(other, lang):
            continue
        if not seq_le(other, lang):
            continue
        found = None
        for code in range(bound + 1):
            if lang_member(lang, code) and not lang_member(other, code):
                found = code
                break
        if found is None:
            return None
        witnesses.add(found)
        if len(witnesses) > bound:
            return None
    return witnesses


# ---------------------------------------------------------------------------
# Structure learning -> language learning


class StructToLanguageLearner(Learner):
    """Turns an informant learner into a language learner.

    Language data is re-encoded as the finite structure relating codes with
    equal first coordinate; the base learner's census conjecture is dressed
    with the least finite permutation that keeps the data inside the conjectured
    language.  Conjectures are size sequences (language descriptions).
    """

    mode = LANGUAGE

    def __init__(self, base: Learner, support_bound: int = 4, value_bound: int = 16):
        if base.mode != INFORMANT:
            raise ValueError("base learner must consume informants")
        self._pristine = base.clone()
        self._pristine.reset()
        self.name = f"lang-{base.name}"
        self.support_bound = support_bound
        self.value_bound = value_bound
        self.reset()

    def reset(self) -> None:
        self._codes: list[int] = []
        self._code_set: set[int] = set()
        self._groups: dict[int, int] = {}
        self._base = self._pristine.clone()
        self._cached: Optional[SizeSequence] = None
        self._dirty = True  # the empty history already has a conjecture
        self._perm_cache: dict[Character, tuple[list, int]] = {}

    def consume(self, item) -> None:
        if item is None or item in self._code_set:
            return
        # encode the new code against the ones already seen: codes are related
        # exactly when their first pairing coordinates agree
        group = unpair_code(item)[0]
        base = self._base
        base.consume((item, item, 1))
        for other in self._codes:
            label = 1 if self._groups[other] == group else 0
            base.consume((item, other, label))
            base.consume((other, item, label))
        self._code_set.add(item)
        self._codes.append(item)
        self._groups[item] = group
        self._dirty = True

    def _least_consistent_perm(self, census: Character) -> Optional[FinitePermutation]:
        seq = size_sequence_of(census)
        if census not in self._perm_cache:
            perms = list(finite_permutations(self.value_bound, self.support_bound))
            self._perm_cache[census] = (perms, 0)
        perms, pos = self._perm_cache[census]
        # consistency only shrinks as data grows, so the pointer never backs up
        while pos < len(perms):
            candidate = permuted(seq, perms[pos])
            if all(lang_member(candidate, c) for c in self._code_set):
                self._perm_cache[census] = (perms, pos)
                return perms[pos]
            pos += 1
        self._perm_cache[census] = (perms, pos)
        return None

    def conjecture(self) -> Optional[SizeSequence]:
        if self._dirty:
            self._dirty = False
            census = self._base.conjecture()
            if census is None:
                self._cached = None
            else:
                perm = self._least_consistent_perm(census)
                self._cached = None if perm is None else permuted(size_sequence_of(census), perm)
        return self._cached

    def clone(self) -> "StructToLanguageLearner":
        dup = StructToLanguageLearner.__new__(StructToLanguageLearner)
        dup._pristine = self._pristine.clone()
        dup.name = self.name
        dup.support_bound = self.support_bound
        dup.value_bound = self.value_bound
        dup._codes = list(self._codes)
        dup._code_set = set(self._code_set)
        dup._groups = dict(self._groups)
        dup._base = self._base.clone()
        dup._cached = self._cached
        dup._dirty = self._dirty
        dup._perm_cache = {k: (v[0], v[1]) for k, v in self._perm_cache.items()}
        return dup


def struct_to_language_learner(base: Learner, support_bound: int = 4,
                               value_bound: int = 16) -> StructToLanguageLearner:
    return StructToLanguageLearner(base, support_bound, value_bound)


# ---------------------------------------------------------------------------
# Language learning -> structure learning


class LanguageToStructLearner(Learner):
    """Learns censuses from informants by translating the data into slot
    demands and searching the configured family for the minimal consistent
    language.

    The decoded classes, read as slot demands, fit some finitely permuted slot
    layout of a member exactly when the class multiset matches injectively,
    size-monotonically, into the member's classes; so candidacy is an
    embedding check, and the conjecture prefers candidates whose languages sit
    inclusion-minimally.  Mutually hostable candidates (whose permuted
    languages interleave forever) are arbitrated by the longest stably
    realized separator, the same bookkeeping the informant-side learner uses.
    The empty prefix conjectures nothing.
    """

    mode = INFORMANT

    def __init__(self, members: Sequence[Character]):
        from .learners import SeparatorLearner

        self.members = tuple(members)
        self.name = "lang-decode"
        n = len(self.members)
        self._strictly_below = [
            [embeds(self.members[j], self.members[i])
             and not embeds(self.members[i], self.members[j])
             for j in range(n)]
            for i in range(n)
        ]
        self._arbiter = SeparatorLearner(self.members, enforce=False)
        self.reset()

    def reset(self) -> None:
        self._arbiter.reset()
        self._rev = -1
        self._cached = None

    @property
    def _state(self) -> PrefixState:
        return self._arbiter._state

    def consume(self, item) -> None:
        self._arbiter.consume(item)

    def conjecture(self):
        if self._rev == self._state.struct_rev:
            return self._cached
        self._rev = self._state.struct_rev
        if self._state.n_mentioned == 0:
            self._cached = None
            return None
        census = self._state.char()
        hosts = [i for i, m in enumerate(self.members) if embeds(census, m)]
        minimal = [i for i in hosts if not any(self._strictly_below[i][j] for j in hosts)]
        if not minimal:
            self._cached = None
            return None
        choice = min(minimal)
        refined = self._arbiter.conjecture()
        if refined is not None and any(
            self.members[i] == refined for i in minimal
        ):
            self._cached = refined
        else:
            self._cached = self.members[choice]
        return self._cached

    def clone(self) -> "LanguageToStructLearner":
        dup = LanguageToStructLearner.__new__(LanguageToStructLearner)
        dup.members = self.members
        dup.name = self.name
        dup._strictly_below = self._strictly_below
        dup._arbiter = self._arbiter.clone()
        dup._rev = self._rev
        dup._cached = self._cached
        return dup


def language_to_struct_learner(members: Sequence[Character]) -> LanguageToStructLearner:
    return LanguageToStructLearner(members)


# ---------------------------------------------------------------------------
# Language-side convergence check


def run_language_simulation(learner: Learner, stream, stages: int,
                            target: SizeSequence, window: int = 200) -> dict:
    """Bounded-horizon convergence for language learners: constant over the
    last `window` stages and pointwise equal to the target language."""
    learner.reset()
    conjectures = [learner.conjecture()]
    it = iter(stream)
    for _ in range(stages):
        conjectures.append(learner.feed(next(it)))
    final = conjectures[-1]

    def same(a, b):
        if a is None or b is None:
            return a is None and b is None
        return seq_eq(a, b)

    stable = len(conjectures) - 1
    while stable > 0 and same(conjectures[stable - 1], final):
        stable -= 1
    converged = (
        len(conjectures) - stable > window
        and final is not None
        and seq_eq(final, target)
    )
    return {"converged": converged, "stage": stable if converged else None,
            "final": final, "stages": stages}
