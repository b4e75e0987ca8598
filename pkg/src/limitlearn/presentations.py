"""Texts, informants, prefix decoding, and fair stream generation.

Items are plain tuples for speed: an informant item is ``(x, y, label)`` with
label 1 for related and 0 for unrelated; a text item is ``(x, y)`` or ``None``
for a pause.  Streams are single-consumer iterators tagged with their kind.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

from .structures import (
    ZERO,
    Character,
    FiniteStructure,
    RepresentationError,
    unpair_code,
)

InformantItem = tuple[int, int, int]
TextItem = Optional[tuple[int, int]]
PAUSE: TextItem = None

INFORMANT = "informant"
TEXT = "text"


class ConsistencyError(ValueError):
    """An informant prefix labels some pair both ways (directly or by closure)."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


@dataclass(frozen=True)
class Prefix:
    kind: str
    items: tuple

    def __post_init__(self):
        if self.kind not in (INFORMANT, TEXT):
            raise ValueError(f"unknown prefix kind {self.kind!r}")

    def __len__(self) -> int:
        return len(self.items)

    def extended(self, *items) -> "Prefix":
        return Prefix(self.kind, self.items + tuple(items))


def informant_prefix(items: Iterable[InformantItem] = ()) -> Prefix:
    return Prefix(INFORMANT, tuple(items))


def text_prefix(items: Iterable[TextItem] = ()) -> Prefix:
    return Prefix(TEXT, tuple(items))


# ---------------------------------------------------------------------------
# Incremental prefix decoding


class PrefixState:
    """Union-find decoder for a growing prefix.

    Tracks the positive-closure blocks over all mentioned elements, explicit
    negative facts between blocks, the census of current block sizes, and for
    each block the stage at which it last changed size (used by learners that
    must distinguish long-stable blocks from transient ones).
    """

    __slots__ = (
        "kind", "stage", "struct_rev", "neg_rev", "_parent", "_members",
        "_enemies", "size_counts", "birth", "_char_cache",
    )

    def __init__(self, kind: str = INFORMANT):
        self.kind = kind
        self.stage = 0
        self.struct_rev = 0
        self.neg_rev = 0
        self._parent: dict[int, int] = {}
        self._members: dict[int, list[int]] = {}
        self._enemies: dict[int, set[int]] = {}
        self.size_counts: dict[int, int] = {}
        self.birth: dict[int, int] = {}
        self._char_cache: Character | None = None

    # -- union-find -----------------------------------------------------

    def find(self, x: int) -> int:
        parent = self._parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def _add_element(self, x: int) -> int:
        if x in self._parent:
            return self.find(x)
        self._parent[x] = x
        self._members[x] = [x]
        self.size_counts[1] = self.size_counts.get(1, 0) + 1
        self.birth[x] = self.stage
        self.struct_rev += 1
        self._char_cache = None
        return x

    def _union(self, a: int, b: int) -> None:
        if len(self._members[a]) < len(self._members[b]):
            a, b = b, a
        counts = self.size_counts
        for size in (len(self._members[a]), len(self._members[b])):
            counts[size] -= 1
            if not counts[size]:
                del counts[size]
        self._members[a].extend(self._members[b])
        del self._members[b]
        self._parent[b] = a
        new_size = len(self._members[a])
        counts[new_size] = counts.get(new_size, 0) + 1
        enemies_b = self._enemies.pop(b, None)
        if enemies_b:
            mine = self._enemies.setdefault(a, set())
            for e in enemies_b:
                self._enemies[e].discard(b)
                self._enemies[e].add(a)
                mine.add(e)
        self.birth.pop(b, None)
        self.birth[a] = self.stage
        self.struct_rev += 1
        self._char_cache = None

    # -- feeding --------------------------------------------------------

    def feed(self, item) -> None:
        """Consume one item; raises ConsistencyError on contradictory labels."""
        index = self.stage
        self.stage += 1
        if self.kind == TEXT:
            if item is None:
                return
            x, y = item
            ra, rb = self._add_element(x), self._add_element(y)
            if ra != rb:
                self._union(ra, rb)
            return
        x, y, label = item
        ra, rb = self._add_element(x), self._add_element(y)
        if label:
            if ra != rb:
                if rb in self._enemies.get(ra, ()):  # explicitly separated
                    raise ConsistencyError(
                        f"item {index}: pair ({x},{y}) related but blocks separated", index)
                self._union(ra, rb)
        else:
            if ra == rb:
                raise ConsistencyError(
                    f"item {index}: pair ({x},{y}) unrelated but positively connected", index)
            if rb not in self._enemies.get(ra, ()):
                self._enemies.setdefault(ra, set()).add(rb)
                self._enemies.setdefault(rb, set()).add(ra)
                self.neg_rev += 1

    def feed_all(self, items: Iterable) -> None:
        for item in items:
            self.feed(item)

    # -- queries ----------------------------------------------------------

    @property
    def n_mentioned(self) -> int:
        return len(self._parent)

    def mentions(self, x: int) -> bool:
        return x in self._parent

    def blocks(self) -> list[list[int]]:
        return [sorted(m) for m in self._members.values()]

    def block_roots(self) -> list[int]:
        return list(self._members.keys())

    def block_size(self, root: int) -> int:
        return len(self._members[root])

    def block_members(self, root: int) -> list[int]:
        return self._members[root]

    def separated(self, root_a: int, root_b: int) -> bool:
        return root_b in self._enemies.get(root_a, ())

    def char(self) -> Character:
        if self._char_cache is None:
            self._char_cache = Character.make(0, dict(self.size_counts), 0)
        return self._char_cache

    def births_for_size(self, size: int) -> list[int]:
        return [self.birth[r] for r, m in self._members.items() if len(m) == size]

    def copy(self) -> "PrefixState":
        dup = PrefixState.__new__(PrefixState)
        dup.kind = self.kind
        dup.stage = self.stage
        dup.struct_rev = self.struct_rev
        dup.neg_rev = self.neg_rev
        dup._parent = dict(self._parent)
        dup._members = {r: list(m) for r, m in self._members.items()}
        dup._enemies = {r: set(e) for r, e in self._enemies.items()}
        dup.size_counts = dict(self.size_counts)
        dup.birth = dict(self.birth)
        dup._char_cache = self._char_cache
        return dup


def structure_from_prefix(prefix: Prefix) -> tuple[FiniteStructure, dict[int, int]]:
    """Decode a prefix into the finite structure it determines.

    The universe is every element mentioned (positively or negatively), the
    relation is the reflexive-symmetric-transitive closure of the positive
    pairs, and everything else is taken as negative.  Returns the structure on
    a normalized universe {0..n-1} plus the original-name-to-normalized map.
    """
    state = PrefixState(prefix.kind)
    state.feed_all(prefix.items)
    names = sorted(state._parent)
    rename = {name: i for i, name in enumerate(names)}
    blocks = [[rename[x] for x in block] for block in state.blocks()]
    return FiniteStructure.from_blocks(blocks), rename


# ---------------------------------------------------------------------------
# Trace / replay file format


def format_item(kind: str, item) -> str:
    if kind == TEXT:
        if item is None:
            return "#"
        return f"P {item[0]} {item[1]}"
    x, y, label = item
    return f"{'P' if label else 'N'} {x} {y}"


def parse_item(kind: str, line: str):
    line = line.strip()
    if line == "#":
        if kind != TEXT:
            raise ValueError("pause mark in an informant trace")
        return PAUSE
    tag, xs, ys = line.split()
    x, y = int(xs), int(ys)
    if kind == TEXT:
        if tag != "P":
            raise ValueError(f"negative item {line!r} in a text trace")
        return (x, y)
    if tag == "P":
        return (x, y, 1)
    if tag == "N":
        return (x, y, 0)
    raise ValueError(f"unrecognized trace line {line!r}")


def write_trace(path, prefix: Prefix) -> None:
    with open(path, "w") as fh:
        for item in prefix.items:
            fh.write(format_item(prefix.kind, item) + "\n")


def read_trace(path, kind: str) -> Prefix:
    with open(path) as fh:
        items = [parse_item(kind, line) for line in fh if line.strip()]
    return Prefix(kind, tuple(items))


# ---------------------------------------------------------------------------
# Planned class assignments


class ClassAssignment:
    """Deterministic assignment of elements 0,1,2,... to classes realizing a census.

    Slots are instantiated by a seed-shuffled round-robin schedule: finitely
    demanded classes are spawned first (one every other round), while
    open-ended demands (omega counts, default-pattern sizes, infinite classes)
    spawn progressively forever.  Every unfull slot grows by one element per
    round, so finite classes complete and infinite ones grow unboundedly.
    """

    SPAWN_PERIOD = 2

    def __init__(self, char: Character, seed: int = 0):
        if char.is_empty:
            raise RepresentationError("cannot present the all-zero census")
        self.char = char
        rng = random.Random(seed)
        finite: list[int | None] = []
        for size, count in char.exceptions:
            if not count.is_omega:
                finite.extend([size] * count.finite)
        if not char.omega_count.is_omega and char.omega_count != ZERO:
            finite.extend([None] * char.omega_count.finite)
        rng.shuffle(finite)
        self._finite_demands = finite
        self._sources: list = []
        for size, count in char.exceptions:
            if count.is_omega:
                self._sources.append(("const", size))
        if char.default != ZERO:
            self._sources.append(("pattern", None))
        if char.omega_count.is_omega:
            self._sources.append(("const", None))
        if self._sources:
            rng.shuffle(self._sources)
        self._pattern_next = 1
        self._pattern_left = 0
        self._sweep_pos = 0
        self._sweep_limit = 0
        self._source_idx = 0
        self._rng = rng
        self._round = 0
        # slots: parallel lists of target size (None = infinite) and member count
        self._targets: list[int | None] = []
        self._filled: list[int] = []
        self._slot_of: dict[int, int] = {}
        self._next_element = 0
        self.finite_universe = char.total_size_finite
        self.universe_size = char.finite_universe_size() if self.finite_universe else None

    def _next_pattern_size(self) -> int:
        skip = set(self.char.sizes_of_interest)
        if self.char.default.is_omega:
            # triangular sweep: every admissible size recurs unboundedly often
            while True:
                self._sweep_pos += 1
                if self._sweep_pos > self._sweep_limit:
                    self._sweep_limit += 1
                    self._sweep_pos = 1
                if self._sweep_pos not in skip:
                    return self._sweep_pos
        while self._pattern_left == 0:
            while self._pattern_next in skip:
                self._pattern_next += 1
            self._pattern_left = self.char.default.finite
            self._size_being_emitted = self._pattern_next
            self._pattern_next += 1
        self._pattern_left -= 1
        return self._size_being_emitted

    def _spawn_next(self) -> None:
        if self._finite_demands:
            target = self._finite_demands.pop()
        elif self._sources:
            kind, value = self._sources[self._source_idx % len(self._sources)]
            self._source_idx += 1
            target = value if kind == "const" else self._next_pattern_size()
        else:
            return
        self._targets.append(target)
        self._filled.append(0)

    def _run_round(self) -> None:
        if self._round % self.SPAWN_PERIOD == 0:
            self._spawn_next()
        order = list(range(len(self._targets)))
        if len(order) > 1:
            pivot = self._rng.randrange(len(order))
            order = order[pivot:] + order[:pivot]
        for slot in order:
            target = self._targets[slot]
            if target is None or self._filled[slot] < target:
                self._slot_of[self._next_element] = slot
                self._filled[slot] += 1
                self._next_element += 1
        self._round += 1

    def slot_of(self, x: int) -> int:
        if self.finite_universe and x >= self.universe_size:
            raise RepresentationError(f"element {x} outside the finite universe")
        guard = 0
        while x not in self._slot_of:
            before = self._next_element
            self._run_round()
            guard = guard + 1 if self._next_element == before else 0
            if guard > 4:  # demand exhausted: finite structure fully assigned
                raise RepresentationError(f"element {x} outside the finite universe")
        return self._slot_of[x]

    def related(self, x: int, y: int) -> bool:
        return self.slot_of(x) == self.slot_of(y)


# ---------------------------------------------------------------------------
# Streams


@dataclass
class Stream:
    kind: str
    character: Character | None
    _iterator: Iterator = field(repr=False)

    def __iter__(self):
        return self._iterator

    def __next__(self):
        return next(self._iterator)


def _pair_walk(universe: int | None) -> Iterator[tuple[int, int]]:
    if universe is None:
        code = 0
        while True:
            yield unpair_code(code)
            code += 1
    else:
        pairs = [(x, y) for x in range(universe) for y in range(universe)]
        pairs.sort(key=lambda p: (p[0] + p[1], p[1]))
        while True:
            yield from pairs


def fair_informant(char: Character, seed: int = 0) -> Stream:
    """Deterministic informant for the census: labels every pair in Cantor order.

    For a census with finitely many elements the labeled pairs of the finite
    universe repeat forever (informants may repeat items).
    """
    plan = ClassAssignment(char, seed)

    def gen():
        for x, y in _pair_walk(plan.universe_size):
            yield (x, y, 1 if plan.related(x, y) else 0)

    return Stream(INFORMANT, char, gen())


def fair_text(char: Character, seed: int = 0) -> Stream:
    """Deterministic text: related pairs in Cantor order, pauses elsewhere."""
    plan = ClassAssignment(char, seed)

    def gen():
        bound = plan.universe_size
        for x, y in _pair_walk(None):
            if bound is not None and (x >= bound or y >= bound):
                yield PAUSE
            else:
                yield (x, y) if plan.related(x, y) else PAUSE

    return Stream(TEXT, char, gen())


REORDER_STRATEGIES = (
    "negatives-first",
    "positives-first",
    "reverse",
    "interleave-swap",
    "large-pairs-first",
)


def reordered_informant(char: Character, seed: int, strategy: str, window: int = 2000) -> Stream:
    """Adversarially permuted fair informant: the first `window` items are
    rearranged by the named strategy, the rest stream unchanged.

    The window keeps the adversarial mention-to-link lag inside a 10^4-stage
    horizon; facts are order-independent, so any permutation stays a fair
    presentation of the census."""
    base = fair_informant(char, seed)
    it = iter(base)
    head = [next(it) for _ in range(window)]
    if strategy == "negatives-first":
        head.sort(key=lambda item: item[2])
    elif strategy == "positives-first":
        head.sort(key=lambda item: -item[2])
    elif strategy == "reverse":
        head.reverse()
    elif strategy == "interleave-swap":
        for i in range(0, len(head) - 1, 2):
            head[i], head[i + 1] = head[i + 1], head[i]
    elif strategy == "large-pairs-first":
        head.sort(key=lambda item: -(item[0] + item[1]))
    else:
        raise ValueError(f"unknown reorder strategy {strategy!r}")

    def gen():
        yield from head
        yield from it

    return Stream(INFORMANT, char, gen())


# ---------------------------------------------------------------------------
# Text-to-informant reordering


def reorder_items(blocks: list[list[int]]) -> list[InformantItem]:
    """Informant items presenting the given classes one at a time: each class's
    positive pairs, then the assumed negatives between it and earlier classes."""
    classes = sorted((sorted(b) for b in blocks), key=lambda b: b[0])
    items: list[InformantItem] = []
    for idx, cls in enumerate(classes):
        for x in cls:
            for y in cls:
                items.append((x, y, 1))
        cross: list[tuple[int, int]] = []
        for earlier in classes[:idx]:
            for x in cls:
                for y in earlier:
                    cross.append((x, y))
                    cross.append((y, x))
        cross.sort()
        items.extend((x, y, 0) for x, y in cross)
    return items


def reorder_to_informant(prefix: Prefix) -> Prefix:
    """Rewrite a text prefix as the informant prefix that presents its classes
    one at a time.

    Classes (inferred from the positive closure) are ordered by least mentioned
    element.  Each class contributes all its positive pairs, followed by the
    assumed negative pairs between it and every earlier class.
    """
    if prefix.kind != TEXT:
        raise ValueError("reorder_to_informant expects a text prefix")
    state = PrefixState(TEXT)
    state.feed_all(prefix.items)
    return Prefix(INFORMANT, tuple(reorder_items(state.blocks())))
