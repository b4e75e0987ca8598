"""Constructive refutations: adaptive streams that defeat learners.

The limit adversary alternates between presenting a limit structure and the
witnesses that imitate it, switching whenever the learner catches up.  The
diagonalizer grows two almost-identical structures and expands them each time
the learner tells them apart.  The locking machinery searches for prefixes no
consistent extension can dislodge, and rewrites learners into that normal
form.  All searches are bounded and say so in their verdicts.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence

from .learners import Learner, Trace, conjectures_equal
from .presentations import (
    INFORMANT,
    PAUSE,
    TEXT,
    Prefix,
    PrefixState,
)
from .separability import FamilyError
from .structures import (
    ZERO,
    Character,
    char_subset,
    embeds,
    fin_embeds,
    iso_eq,
    pair_code,
    unpair_code,
)

_EXHAUSTED = object()


# ---------------------------------------------------------------------------
# A retargetable presentation builder (informant mode)


class _TargetBuilder:
    """Emits informant items in Cantor pair order while steering the resulting
    structure toward a target census.

    Elements are assigned to class slots as the pair walk reaches them; labels
    are read off the slot assignment, which never changes retroactively, so
    every emitted prefix stays consistent.  Retargeting maps the existing
    slots into the new census's demand; with ``freeze`` the slots keep their
    exact current sizes (they must fit the new census), otherwise they may be
    planned to grow.  Slots planned as infinite classes have target None and
    absorb elements round-robin forever.
    """

    def __init__(self, target: Character, blocks: Sequence[Sequence[int]] = ()):
        if target.default.is_omega:
            raise FamilyError("builder does not support censuses with an infinite default")
        self.slot_members: list[list[int]] = []
        self.slot_target: list[Optional[int]] = []
        self.slot_of: dict[int, int] = {}
        self.used: dict[int, int] = {}
        self.used_omega = 0
        self.cursor = 0
        self.deferred: deque[tuple[int, int]] = deque()
        self.finishing = False
        self.target = target
        self._rot = 0
        self._inf_rot = 0
        self._pattern_next = 1
        self._pattern_left = 0
        self._pattern_size = 1
        if blocks:
            order = sorted(((len(b), i) for i, b in enumerate(blocks)), reverse=True)
            self.slot_members = [sorted(blocks[i]) for _, i in order]
            self.slot_target = self._match_sizes([s for s, _ in order])
            for idx, members in enumerate(self.slot_members):
                for x in members:
                    self.slot_of[x] = idx

    # -- demand bookkeeping ----------------------------------------------

    def _avail(self, size: int) -> bool:
        count = self.target.count(size)
        if count.is_omega:
            return True
        return self.used.get(size, 0) < count.finite

    def _avail_omega(self) -> bool:
        count = self.target.omega_count
        return count.is_omega or self.used_omega < count.finite

    def _match_sizes(self, sizes_desc: list[int]) -> list[Optional[int]]:
        """Plan a target size >= each block size, smallest available first;
        blocks that no finite class can host go to infinite classes."""
        self.used = {}
        self.used_omega = 0
        planned: list[Optional[int]] = []
        key_sizes = [s for s, _ in self.target.exceptions]
        limit = max(key_sizes + sizes_desc + [1]) + 1
        for size in sizes_desc:
            k = size
            while k <= limit and not self._avail(k):
                k += 1
            if k <= limit:
                self.used[k] = self.used.get(k, 0) + 1
                planned.append(k)
            elif self._avail_omega():
                self.used_omega += 1
                planned.append(None)
            else:
                raise FamilyError(f"existing classes do not fit the census {self.target}")
        return planned

    def _next_spawn_target(self):
        target = self.target
        for size, count in target.exceptions:
            if not count.is_omega and count != ZERO and self.used.get(size, 0) < count.finite:
                self.used[size] = self.used.get(size, 0) + 1
                return size
        if not target.omega_count.is_omega and target.omega_count != ZERO \
                and self.used_omega < target.omega_count.finite:
            self.used_omega += 1
            return None
        unbounded: list = [s for s, c in target.exceptions if c.is_omega]
        has_pattern = target.default != ZERO
        has_omega = target.omega_count.is_omega
        nsources = len(unbounded) + has_pattern + has_omega
        if nsources == 0:
            return _EXHAUSTED
        pick = self._rot % nsources
        self._rot += 1
        if pick < len(unbounded):
            size = unbounded[pick]
        elif has_pattern and pick == len(unbounded):
            skip = set(self.target.sizes_of_interest)
            while self._pattern_left == 0:
                while self._pattern_next in skip:
                    self._pattern_next += 1
                self._pattern_left = target.default.finite
                self._pattern_size = self._pattern_next
                self._pattern_next += 1
            self._pattern_left -= 1
            size = self._pattern_size
        else:
            self.used_omega += 1
            return None
        self.used[size] = self.used.get(size, 0) + 1
        return size

    # -- retargeting -------------------------------------------------------

    @property
    def clean(self) -> bool:
        return all(
            t is not None and len(m) == t
            for m, t in zip(self.slot_members, self.slot_target)
        )

    def census(self) -> Character:
        counts: dict[int, int] = {}
        for m in self.slot_members:
            counts[len(m)] = counts.get(len(m), 0) + 1
        return Character.make(0, counts, 0)

    def retarget(self, new_target: Character, freeze: bool) -> None:
        if not self.clean:
            raise FamilyError("retargeting requires all planned classes to be complete")
        self.target = new_target
        self._rot = 0
        self._pattern_next, self._pattern_left = 1, 0
        sizes = [len(m) for m in self.slot_members]
        if freeze:
            if not char_subset(self.census(), new_target):
                raise FamilyError(f"cannot freeze classes {self.census()} inside {new_target}")
            self.slot_target = list(sizes)
            self.used = {}
            self.used_omega = 0
            for s in sizes:
                self.used[s] = self.used.get(s, 0) + 1
        else:
            order = sorted(range(len(sizes)), key=lambda i: -sizes[i])
            planned = self._match_sizes([sizes[i] for i in order])
            new_targets: list[Optional[int]] = [0] * len(sizes)
            for rank, i in enumerate(order):
                new_targets[i] = planned[rank]
            self.slot_target = new_targets
        self.finishing = False

    # -- emission -----------------------------------------------------------

    def _assign(self, e: int) -> bool:
        for idx, members in enumerate(self.slot_members):
            t = self.slot_target[idx]
            if t is not None and len(members) < t:
                members.append(e)
                self.slot_of[e] = idx
                return True
        if not self.finishing:
            tgt = self._next_spawn_target()
            if tgt is not _EXHAUSTED:
                self.slot_members.append([e])
                self.slot_target.append(tgt)
                self.slot_of[e] = len(self.slot_members) - 1
                return True
        infinite = [i for i, t in enumerate(self.slot_target) if t is None]
        if infinite:
            idx = infinite[self._inf_rot % len(infinite)]
            self._inf_rot += 1
            self.slot_members[idx].append(e)
            self.slot_of[e] = idx
            return True
        return False

    def _try_pair(self, x: int, y: int) -> bool:
        for e in dict.fromkeys((x, y)):
            if e not in self.slot_of and not self._assign(e):
                return False
        return True

    def next_item(self) -> tuple[int, int, int]:
        for _ in range(len(self.deferred) + 100000):
            if self.deferred:
                x, y = self.deferred[0]
                if x in self.slot_of and y in self.slot_of or self._try_pair(x, y):
                    self.deferred.popleft()
                    return self._label(x, y)
            x, y = unpair_code(self.cursor)
            self.cursor += 1
            if self._try_pair(x, y):
                return self._label(x, y)
            self.deferred.append((x, y))
        raise FamilyError("builder made no progress; retarget before emitting")

    def _label(self, x: int, y: int) -> tuple[int, int, int]:
        return (x, y, 1 if self.slot_of[x] == self.slot_of[y] else 0)

    def upcoming_pairs(self, n: int) -> list[tuple[int, int]]:
        """The next pairs of the walk among already-assigned elements."""
        out = []
        for x, y in self.deferred:
            if x in self.slot_of and y in self.slot_of:
                out.append((x, y))
                if len(out) == n:
                    return out
        code = self.cursor
        fuel = 40 * (n + 1) * (len(self.slot_of) + 4)
        while len(out) < n and fuel:
            x, y = unpair_code(code)
            code += 1
            fuel -= 1
            if x in self.slot_of and y in self.slot_of:
                out.append((x, y))
        return out


# ---------------------------------------------------------------------------
# The limit adversary


@dataclass
class AdversaryReport:
    trace: Trace
    items: list
    phase_switches: list[tuple[int, str]]
    final_target: Character
    consistent: bool

    @property
    def mind_changes(self) -> int:
        return len(self.trace.mind_changes_ex)

    def defeated(self, threshold: int = 5) -> bool:
        """The dichotomy forced on the learner: it either changed its mind at
        least `threshold` times or its final conjecture misses the structure
        the stream is presenting."""
        final = self.trace.final()
        wrong = final is None or not iso_eq(final, self.final_target)
        return self.mind_changes >= threshold or wrong

    def to_json(self) -> dict:
        final = self.trace.final()
        return {
            "phase_switches": len(self.phase_switches),
            "switch_stages": [s for s, _ in self.phase_switches],
            "mind_changes": self.mind_changes,
            "final_target": self.final_target.to_json(),
            "final_conjecture": None if final is None else final.to_json(),
            "consistent": self.consistent,
            "defeated": self.defeated(),
        }


class LimitAdversary:
    """Builds a presentation of a limit structure that retreats to imitating a
    witness whenever the learner names the current target.

    Witness phases never grow the classes already presented, so the partial
    classes always extend to the witness; with infinitely many switches the
    emitted stream presents the limit structure itself.
    """

    def __init__(self, learner: Learner, limit: Character, members: Sequence[Character]):
        if learner.mode != INFORMANT:
            raise FamilyError("the limit adversary drives informant learners")
        if limit.omega_count != ZERO or any(m.omega_count != ZERO for m in members):
            raise FamilyError("the limit adversary requires families without infinite classes")
        self.learner = learner
        self.limit = limit
        self.witnesses = [
            m for m in members
            if not iso_eq(m, limit) and fin_embeds(m, limit) and char_subset(limit, m)
        ]
        if not self.witnesses:
            raise FamilyError(f"{limit} is not a limit of the given family")

    def run(self, stages: int) -> AdversaryReport:
        learner = self.learner
        learner.reset()
        builder = _TargetBuilder(self.limit)
        monitor = PrefixState(INFORMANT)
        in_limit_phase = True
        current = self.limit
        wit_idx = 0
        switches: list[tuple[int, str]] = []
        items = []
        conjectures = [learner.conjecture()]
        pending = conjectures_equal(conjectures[0], current)
        consistent = True
        for step in range(stages):
            if pending and builder.clean:
                if in_limit_phase:
                    current = self.witnesses[wit_idx % len(self.witnesses)]
                    wit_idx += 1
                    builder.retarget(current, freeze=True)
                else:
                    current = self.limit
                    builder.retarget(current, freeze=False)
                in_limit_phase = not in_limit_phase
                switches.append((step, str(current)))
                pending = False
            builder.finishing = pending
            item = builder.next_item()
            try:
                monitor.feed(item)
            except Exception:
                consistent = False
            items.append(item)
            conj = learner.feed(item)
            conjectures.append(conj)
            if conjectures_equal(conj, current):
                pending = True
        return AdversaryReport(Trace(conjectures), items, switches, current, consistent)


def limit_adversary(learner: Learner, limit: Character, members: Sequence[Character]) -> LimitAdversary:
    return LimitAdversary(learner, limit, members)


# ---------------------------------------------------------------------------
# The pairwise diagonalizer


@dataclass
class DiagonalizationReport:
    class_size: int
    stages: int
    expansionary_stages: list[int]
    sigma_prefix: Prefix
    tau_prefix: Prefix
    nu_marks: list[int]  # sigma item counts at the expansionary snapshots
    sigma_char: Character
    tau_char: Character
    e_counts_ok: bool
    singletons_ok: bool
    nu_mind_changes_ok: bool
    distinct_ok: bool

    @property
    def ok(self) -> bool:
        return (self.e_counts_ok and self.singletons_ok
                and self.nu_mind_changes_ok and self.distinct_ok)

    def to_json(self) -> dict:
        return {
            "class_size": self.class_size,
            "stages": self.stages,
            "expansionary_stages": self.expansionary_stages,
            "sigma_char": self.sigma_char.to_json(),
            "tau_char": self.tau_char.to_json(),
            "e_counts_ok": self.e_counts_ok,
            "singletons_ok": self.singletons_ok,
            "nu_mind_changes_ok": self.nu_mind_changes_ok,
            "distinct_ok": self.distinct_ok,
            "ok": self.ok,
        }


def _full_labeling_extension(old_n: int, new_n: int, same_class) -> list[tuple[int, int, int]]:
    pairs = [
        (x, y)
        for x in range(new_n)
        for y in range(new_n)
        if x >= old_n or y >= old_n
    ]
    pairs.sort(key=lambda p: pair_code(p[0], p[1]))
    return [(x, y, 1 if same_class(x, y) else 0) for x, y in pairs]


def diagonalize(learner: Learner, class_size: int, stages: int) -> DiagonalizationReport:
    """Grow paired structures that differ by one class of the given size,
    expanding both every time the learner's conjectures tell them apart.

    One side starts as `class_size` singletons, the other as a single full
    class, so the two sides differ from stage 0 on.  Expansionary stages add
    two fresh classes to the first side and the same two plus one more to the
    second (plus singleton padding); other stages add one shared singleton.
    The report checks the claims that hold on either branch: exact class
    counts per expansionary stage, singleton growth, and a mind change between
    consecutive expansionary snapshots of the first side's presentation.
    """
    e = class_size
    if e < 2:
        raise ValueError("class size must be >= 2")
    if learner.mode != INFORMANT:
        raise FamilyError("the diagonalizer drives informant learners")
    learner.reset()
    lrn_sigma = learner.clone()
    lrn_tau = learner.clone()
    sigma_class: dict[int, int] = {i: i for i in range(e)}
    tau_class: dict[int, int] = {i: 0 for i in range(e)}
    next_class = e + 1
    sigma_items = _full_labeling_extension(0, e, lambda x, y: sigma_class[x] == sigma_class[y])
    tau_items = _full_labeling_extension(0, e, lambda x, y: tau_class[x] == tau_class[y])
    for it in sigma_items:
        lrn_sigma.consume(it)
    for it in tau_items:
        lrn_tau.consume(it)
    c_sigma = [lrn_sigma.conjecture()]
    c_tau = [lrn_tau.conjecture()]
    n = e
    last_exp = 0
    expansionary: list[int] = []
    nu_marks = [len(sigma_items)]
    case2 = 0
    for s in range(stages):
        stage_no = s + 1
        z = n
        if any(
            not conjectures_equal(c_sigma[v], c_tau[v])
            for v in range(last_exp, len(c_sigma))
        ):
            expansionary.append(stage_no)
            last_exp = stage_no
            ids = [next_class, next_class + 1, next_class + 2]
            next_class += 3
            for k in range(3):
                for x in range(z + k * e, z + (k + 1) * e):
                    tau_class[x] = ids[k]
                    if k < 2:
                        sigma_class[x] = ids[k]
                    else:
                        sigma_class[x] = next_class
                        next_class += 1
            extra = z + 3 * e
            sigma_class[extra] = next_class
            tau_class[extra] = next_class + 1
            next_class += 2
            new_n = extra + 1
        else:
            case2 += 1
            sigma_class[z] = next_class
            tau_class[z] = next_class + 1
            next_class += 2
            new_n = z + 1
        ext_sigma = _full_labeling_extension(n, new_n, lambda x, y: sigma_class[x] == sigma_class[y])
        ext_tau = _full_labeling_extension(n, new_n, lambda x, y: tau_class[x] == tau_class[y])
        sigma_items.extend(ext_sigma)
        tau_items.extend(ext_tau)
        for it in ext_sigma:
            lrn_sigma.consume(it)
        for it in ext_tau:
            lrn_tau.consume(it)
        n = new_n
        c_sigma.append(lrn_sigma.conjecture())
        c_tau.append(lrn_tau.conjecture())
        if expansionary and expansionary[-1] == stage_no:
            nu_marks.append(len(sigma_items))

    m = len(expansionary)

    def census_of(assignment: dict[int, int]) -> Character:
        sizes: dict[int, int] = {}
        for cid in assignment.values():
            sizes[cid] = sizes.get(cid, 0) + 1
        counts: dict[int, int] = {}
        for size in sizes.values():
            counts[size] = counts.get(size, 0) + 1
        return Character.make(0, counts, 0)

    sigma_char = census_of(sigma_class)
    tau_char = census_of(tau_class)
    e_counts_ok = sigma_char.count(e) == 2 * m and tau_char.count(e) == 1 + 3 * m
    singletons_ok = (
        sigma_char.count(1) == e + m * (e + 1) + case2
        and tau_char.count(1) == m + case2
    )
    nu_ok = all(
        not conjectures_equal(c_sigma[t1], c_sigma[t2])
        for t1, t2 in zip(expansionary, expansionary[1:])
    )
    distinct_ok = not iso_eq(sigma_char, tau_char)
    return DiagonalizationReport(
        e, stages, expansionary,
        Prefix(INFORMANT, tuple(sigma_items)), Prefix(INFORMANT, tuple(tau_items)),
        nu_marks, sigma_char, tau_char,
        e_counts_ok, singletons_ok, nu_ok, distinct_ok,
    )


# ---------------------------------------------------------------------------
# Weak locking search


@dataclass
class LockingSearchResult:
    kind: str  # "candidate" | "violator"
    sigma: Prefix
    tau: Prefix | None
    depth: int
    width: int
    probes: int


class _TextBuilder:
    """Completes a text prefix toward a census of `omega_classes` infinite
    classes: existing components are distributed over the classes and every
    pair of the growing universe is visited in Cantor order."""

    def __init__(self, blocks: Sequence[Sequence[int]], omega_classes: int,
                 second_component_fresh: bool = False):
        self.k = omega_classes
        self.class_of: dict[int, int] = {}
        ordered = sorted((sorted(b) for b in blocks), key=lambda b: b[0])
        for i, block in enumerate(ordered):
            cls = 0 if second_component_fresh else i % omega_classes
            for x in block:
                self.class_of[x] = cls
        self._fresh_rot = 1 if second_component_fresh else len(ordered)
        self.cursor = 0
        self._next_elem = max(self.class_of, default=-1) + 1

    def _ensure(self, e: int) -> None:
        while self._next_elem <= e:
            if self._next_elem not in self.class_of:
                self.class_of[self._next_elem] = self._fresh_rot % self.k
                self._fresh_rot += 1
            self._next_elem += 1
        if e not in self.class_of:
            self.class_of[e] = self._fresh_rot % self.k
            self._fresh_rot += 1

    def next_item(self):
        x, y = unpair_code(self.cursor)
        self.cursor += 1
        self._ensure(max(x, y))
        if self.class_of[x] == self.class_of[y]:
            return (x, y)
        return PAUSE

    def upcoming_positive_candidates(self, n: int) -> list:
        """Candidate single text items: a fresh self-pair plus upcoming
        positive pairs of the walk."""
        fresh = self._next_elem
        out: list = [(fresh, fresh)]
        code = self.cursor
        fuel = 40 * (n + 1) * (len(self.class_of) + 4)
        while len(out) < n and fuel:
            x, y = unpair_code(code)
            code += 1
            fuel -= 1
            if x in self.class_of and y in self.class_of and self.class_of[x] == self.class_of[y]:
                out.append((x, y))
        return out


def weak_locking_search(
    learner: Learner,
    target: Character,
    start: Prefix,
    depth: int = 50,
    width: int = 8,
) -> LockingSearchResult:
    """Semi-decide whether `start` locks the learner on the target census.

    Walks one canonical completion of `start` toward the target for `depth`
    items, probing up to `width` single-item variations at every step.  Any
    conjecture differing from the one at `start` yields a violator pair;
    otherwise `start` is reported as a candidate locking sequence at these
    bounds.  Completability of informant prefixes is judged without merging
    existing blocks, which is conservative.
    """
    if learner.mode != start.kind:
        raise FamilyError("learner mode does not match the prefix kind")
    state = PrefixState(start.kind)
    state.feed_all(start.items)  # raises on inconsistency
    if start.kind == INFORMANT:
        if not embeds(state.char(), target):
            raise FamilyError("start prefix is not completable to the target census")
        builder = _TargetBuilder(target, state.blocks())
    else:
        if target.omega_count == ZERO or target.omega_count.is_omega:
            raise FamilyError("text locking search supports finitely many infinite classes")
        builder = _TextBuilder(state.blocks(), target.omega_count.finite)
    base = learner.clone()
    base.reset()
    for it in start.items:
        base.consume(it)
    base_conj = base.conjecture()
    spine: list = []
    probes = 0

    def violator(extra) -> LockingSearchResult:
        tau = Prefix(start.kind, start.items + tuple(spine) + tuple(extra))
        return LockingSearchResult("violator", start, tau, depth, width, probes)

    for _ in range(depth):
        for cand in _candidate_items(builder, state, target, width, start.kind):
            probes += 1
            probe = base.clone()
            probe.consume(cand)
            if not conjectures_equal(probe.conjecture(), base_conj):
                return violator([cand])
        # advance the spine by one genuinely novel fact
        item = builder.next_item()
        for _skip in range(100000):
            if _novel(state, start.kind, item):
                break
            item = builder.next_item()
        spine.append(item)
        state.feed(item)
        base.consume(item)
        probes += 1
        if not conjectures_equal(base.conjecture(), base_conj):
            return violator([])
    return LockingSearchResult("candidate", start, None, depth, width, probes)


def _novel(state: PrefixState, kind: str, item) -> bool:
    """Does the item tell the decoder anything it does not already know?"""
    if kind == TEXT:
        if item is None:
            return False
        x, y = item
        if not (state.mentions(x) and state.mentions(y)):
            return True
        return state.find(x) != state.find(y)
    x, y, label = item
    if not (state.mentions(x) and state.mentions(y)):
        return True
    rx, ry = state.find(x), state.find(y)
    if label:
        return rx != ry
    return rx != ry and not state.separated(rx, ry)


def _candidate_items(builder, state: PrefixState, target: Character, width: int, kind: str):
    if kind == TEXT:
        cands = [PAUSE]
        cands.extend(builder.upcoming_positive_candidates(max(1, width - 1)))
        return cands[:width]
    cands: list = []
    for x, y in builder.upcoming_pairs(width):
        if not (state.mentions(x) and state.mentions(y)):
            cands.append(builder._label(x, y))
            continue
        same = builder.slot_of[x] == builder.slot_of[y]
        cands.append((x, y, 1 if same else 0))
        if len(cands) >= width:
            break
        rx, ry = state.find(x), state.find(y)
        if rx == ry or state.separated(rx, ry):
            continue
        if same:
            cands.append((x, y, 0))
        else:
            # merging the two blocks must still fit the census
            merged = dict(state.size_counts)
            for s in (state.block_size(rx), state.block_size(ry)):
                merged[s] -= 1
                if not merged[s]:
                    del merged[s]
            big = state.block_size(rx) + state.block_size(ry)
            merged[big] = merged.get(big, 0) + 1
            if embeds(Character.make(0, merged, 0), target):
                cands.append((x, y, 1))
    return cands[:width]


# ---------------------------------------------------------------------------
# Locking normal form


class LockingNormalForm(Learner):
    """Wraps a learner so that its conjecture only follows fragments of the
    history that actually caused mind changes.

    Keeps a distilled prefix: each incoming item is probed alone against the
    wrapped learner's state at the distilled prefix, and the full history is
    probed as one fragment, in that order; whichever flips the conjecture is
    appended.  After a change every remembered item is probed again.  The
    wrapper locks once nothing it remembers flips it.
    """

    def __init__(self, base: Learner):
        self._pristine = base.clone()
        self._pristine.reset()
        self.mode = base.mode
        self.name = f"locking-{base.name}"
        self.reset()

    def reset(self) -> None:
        self._history: list = []
        self._sigma: list = []
        self._at_sigma = self._pristine.clone()
        self._conj = self._at_sigma.conjecture()
        self._shadow = self._at_sigma.clone()  # state at sigma + full history
        self._no_flip: set = set()
        self._pending: deque = deque()
        self._pending_set: set = set()

    def _rebuild_shadow(self) -> None:
        self._shadow = self._at_sigma.clone()
        for it in self._history:
            self._shadow.consume(it)

    def _changed(self, new_at_sigma, appended: list) -> None:
        self._sigma.extend(appended)
        self._at_sigma = new_at_sigma
        self._conj = new_at_sigma.conjecture()
        self._no_flip.clear()
        seen: set = set()
        self._pending.clear()
        for h in self._history:
            if h not in seen:
                seen.add(h)
                self._pending.append(h)
        self._pending_set = seen
        self._rebuild_shadow()

    def consume(self, item) -> None:
        self._history.append(item)
        self._shadow.consume(item)
        if item not in self._no_flip and item not in self._pending_set:
            self._pending.append(item)
            self._pending_set.add(item)
        progress = True
        while progress:
            progress = False
            while self._pending:
                it = self._pending.popleft()
                self._pending_set.discard(it)
                if it in self._no_flip:
                    continue
                probe = self._at_sigma.clone()
                probe.consume(it)
                if conjectures_equal(probe.conjecture(), self._conj):
                    self._no_flip.add(it)
                else:
                    self._changed(probe, [it])
                    progress = True
                    break
            if not progress and not conjectures_equal(self._shadow.conjecture(), self._conj):
                self._changed(self._shadow, list(self._history))
                progress = True

    def conjecture(self):
        return self._conj

    def distilled(self) -> Prefix:
        return Prefix(self.mode, tuple(self._sigma))

    def clone(self) -> "LockingNormalForm":
        dup = LockingNormalForm.__new__(LockingNormalForm)
        dup._pristine = self._pristine.clone()
        dup.mode = self.mode
        dup.name = self.name
        dup._history = list(self._history)
        dup._sigma = list(self._sigma)
        dup._at_sigma = self._at_sigma.clone()
        dup._conj = self._conj
        dup._shadow = self._shadow.clone()
        dup._no_flip = set(self._no_flip)
        dup._pending = deque(self._pending)
        dup._pending_set = set(self._pending_set)
        return dup


def locking_transform(base: Learner) -> LockingNormalForm:
    return LockingNormalForm(base)


# ---------------------------------------------------------------------------
# The text adversary


ONE_CLASS = Character.make(0, {}, 1)
TWO_CLASSES = Character.make(0, {}, 2)


@dataclass
class TextAdversaryReport:
    verdict: str  # "defeated" | "undecided"
    reason: str
    restarts: int
    sigma: Prefix | None
    locked_conjecture: Optional[Character]
    phase2_stages: int = 0

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "reason": self.reason,
            "restarts": self.restarts,
            "sigma_length": None if self.sigma is None else len(self.sigma),
            "locked_conjecture": None if self.locked_conjecture is None
            else self.locked_conjecture.to_json(),
            "phase2_stages": self.phase2_stages,
        }


def text_adversary(
    learner: Learner,
    depth: int = 40,
    width: int = 6,
    horizon: int = 2000,
    max_restarts: int = 25,
) -> TextAdversaryReport:
    """Defeat a text learner on the pair {one infinite class, two infinite classes}.

    Phase 1 hunts for a locking candidate on the single-class structure; phase
    2 extends it with a second connected component.  A learner that never
    locks within bounds, locks on a wrong conjecture, or stays locked while
    the stream turns two-classed is defeated; anything else is undecided.
    """
    if learner.mode != TEXT:
        raise FamilyError("the text adversary drives text learners")
    sigma = Prefix(TEXT, ())
    restarts = 0
    result = weak_locking_search(learner, ONE_CLASS, sigma, depth, width)
    while result.kind == "violator" and restarts < max_restarts:
        sigma = result.tau
        restarts += 1
        result = weak_locking_search(learner, ONE_CLASS, sigma, depth, width)
    if result.kind == "violator":
        return TextAdversaryReport(
            "defeated",
            "no locking candidate on the single-class structure within bounds",
            restarts, sigma, None,
        )
    probe = learner.clone()
    probe.reset()
    for it in sigma.items:
        probe.consume(it)
    locked = probe.conjecture()
    if locked is None or not iso_eq(locked, ONE_CLASS):
        return TextAdversaryReport(
            "defeated",
            "locks on an incorrect conjecture for the single-class structure",
            restarts, sigma, locked,
        )
    state = PrefixState(TEXT)
    state.feed_all(sigma.items)
    builder = _TextBuilder(state.blocks(), 2, second_component_fresh=True)
    for step in range(horizon):
        item = builder.next_item()
        probe.consume(item)
        if not conjectures_equal(probe.conjecture(), locked):
            return TextAdversaryReport(
                "undecided",
                "the learner moved off its locked conjecture during the two-class phase",
                restarts, sigma, locked, step + 1,
            )
    return TextAdversaryReport(
        "defeated",
        "stayed locked on the single-class conjecture while the stream presents two classes",
        restarts, sigma, locked, horizon,
    )
