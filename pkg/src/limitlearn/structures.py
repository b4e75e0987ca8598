"""Descriptions of countable equivalence structures and their embedding order.

An equivalence structure on the naturals is determined up to isomorphism by
how many classes of each size it has.  We describe that census finitely:
a default count that applies to all but finitely many finite sizes, explicit
exceptions, and a count of infinite classes.  All embedding questions between
two such descriptions reduce to comparing cumulative class counts at finitely
many threshold sizes, which keeps every operation here exact and total.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Union


class RepresentationError(ValueError):
    """A description violates a structural invariant (e.g. a size-0 class)."""


# ---------------------------------------------------------------------------
# Extended naturals


@dataclass(frozen=True)
class ExtNat:
    """A natural number extended with an absorbing infinite value."""

    finite: Union[int, None] = None  # None encodes the infinite value

    def __post_init__(self):
        if self.finite is not None and (not isinstance(self.finite, int) or self.finite < 0):
            raise RepresentationError(f"not an extended natural: {self.finite!r}")

    @property
    def is_omega(self) -> bool:
        return self.finite is None

    def __add__(self, other: "ExtNat | int") -> "ExtNat":
        other = ext(other)
        if self.is_omega or other.is_omega:
            return OMEGA
        return ExtNat(self.finite + other.finite)

    __radd__ = __add__

    def __le__(self, other: "ExtNat | int") -> bool:
        other = ext(other)
        if other.is_omega:
            return True
        if self.is_omega:
            return False
        return self.finite <= other.finite

    def __lt__(self, other: "ExtNat | int") -> bool:
        other = ext(other)
        return self <= other and self != other

    def __ge__(self, other: "ExtNat | int") -> bool:
        return ext(other) <= self

    def __gt__(self, other: "ExtNat | int") -> bool:
        return ext(other) < self

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = ExtNat(other)
        if not isinstance(other, ExtNat):
            return NotImplemented
        return self.finite == other.finite

    def __hash__(self) -> int:
        # finite values compare equal to plain ints, so they must hash alike
        return hash(self.finite) if self.finite is not None else hash(("ExtNat", None))

    def __repr__(self) -> str:
        return "omega" if self.is_omega else str(self.finite)

    def to_json(self):
        return "omega" if self.is_omega else self.finite


OMEGA = ExtNat(None)
ZERO = ExtNat(0)


def ext(value: "ExtNat | int | str") -> ExtNat:
    """Coerce an int, ExtNat, or the string 'omega' to an ExtNat."""
    if isinstance(value, ExtNat):
        return value
    if value == "omega":
        return OMEGA
    if isinstance(value, int):
        return ExtNat(value)
    raise RepresentationError(f"cannot interpret {value!r} as an extended natural")


# ---------------------------------------------------------------------------
# Pairing

def pair_code(x: int, y: int) -> int:
    """Cantor code of the ordered pair (x, y)."""
    return (x + y) * (x + y + 1) // 2 + y


def unpair_code(code: int) -> tuple[int, int]:
    w = int(((8 * code + 1) ** 0.5 - 1) // 2)
    while (w + 1) * (w + 2) // 2 <= code:
        w += 1
    while w * (w + 1) // 2 > code:
        w -= 1
    y = code - w * (w + 1) // 2
    return w - y, y


# ---------------------------------------------------------------------------
# Components


@dataclass(frozen=True)
class Component:
    """The claim "at least `index` classes of size `size`"."""

    size: ExtNat
    index: int

    def __post_init__(self):
        if self.index < 1:
            raise RepresentationError("component index must be >= 1")
        if not self.size.is_omega and self.size.finite < 1:
            raise RepresentationError("component size must be >= 1")

    def sort_key(self) -> tuple[int, int]:
        # Finite-size components ordered by Cantor code; infinite-size ones
        # after all of them, by index.
        if self.size.is_omega:
            return (1, self.index)
        return (0, pair_code(self.size.finite, self.index))

    def __repr__(self) -> str:
        return f"<{self.size!r},{self.index}>"

    def to_json(self):
        return [self.size.to_json(), self.index]


def component(size: "ExtNat | int | str", index: int) -> Component:
    return Component(ext(size), index)


# ---------------------------------------------------------------------------
# Characters


@dataclass(frozen=True)
class Character:
    """Census of an equivalence structure: classes per size, finitely described.

    ``default`` is the count for every finite size not listed in
    ``exceptions``; ``omega_count`` is the number of infinite classes.
    Canonical form (no exception equal to the default) makes equality
    syntactic and equivalent to isomorphism of the described structures.
    """

    default: ExtNat = ZERO
    exceptions: tuple[tuple[int, ExtNat], ...] = ()
    omega_count: ExtNat = ZERO

    def __post_init__(self):
        seen = set()
        for size, count in self.exceptions:
            if not isinstance(size, int) or size < 1:
                raise RepresentationError(f"class size must be a finite integer >= 1, got {size!r}")
            if size in seen:
                raise RepresentationError(f"duplicate exception for size {size}")
            if count == self.default:
                raise RepresentationError(
                    f"non-canonical description: exception {size} equals the default count"
                )
            seen.add(size)
        if tuple(sorted(s for s, _ in self.exceptions)) != tuple(s for s, _ in self.exceptions):
            raise RepresentationError("exceptions must be sorted by size")

    @classmethod
    def make(
        cls,
        default: "ExtNat | int | str" = 0,
        exceptions: Mapping[int, "ExtNat | int | str"] | Iterable[tuple[int, object]] = (),
        omega_count: "ExtNat | int | str" = 0,
    ) -> "Character":
        default = ext(default)
        items = exceptions.items() if isinstance(exceptions, Mapping) else exceptions
        canon = sorted((int(k), ext(v)) for k, v in items)
        canon = tuple((k, v) for k, v in canon if v != default)
        return cls(default, canon, ext(omega_count))

    @classmethod
    def of(cls, *pairs: tuple[object, object]) -> "Character":
        """Shorthand for a default-0 census, e.g. ``Character.of((5, OMEGA), (2, 1))``.

        A pair whose size slot is "omega"/OMEGA sets the infinite-class count.
        """
        omega_count: ExtNat = ZERO
        exc: list[tuple[int, ExtNat]] = []
        for size, count in pairs:
            if size == "omega" or (isinstance(size, ExtNat) and size.is_omega):
                omega_count = ext(count)
            else:
                exc.append((int(size), ext(count)))
        return cls.make(0, exc, omega_count)

    @cached_property
    def exception_map(self) -> dict[int, ExtNat]:
        return dict(self.exceptions)

    @cached_property
    def sizes_of_interest(self) -> tuple[int, ...]:
        return tuple(s for s, _ in self.exceptions)

    def count(self, size: "ExtNat | int | str") -> ExtNat:
        """Number of classes of exactly the given size."""
        size = ext(size)
        if size.is_omega:
            return self.omega_count
        if size.finite < 1:
            raise RepresentationError("class sizes start at 1")
        return self.exception_map.get(size.finite, self.default)

    def cumulative(self, threshold: "ExtNat | int | str") -> ExtNat:
        """Number of classes of size >= threshold (infinite classes included)."""
        threshold = ext(threshold)
        if threshold.is_omega:
            return self.omega_count
        if threshold.finite < 1:
            raise RepresentationError("cumulative threshold starts at 1")
        if self.default != ZERO:
            return OMEGA  # infinitely many finite sizes contribute
        total = self.omega_count
        for size, cnt in self.exceptions:
            if size >= threshold.finite:
                total = total + cnt
        return total

    def has_component(self, comp: Component) -> bool:
        return self.count(comp.size) >= comp.index

    @property
    def is_empty(self) -> bool:
        return self.default == ZERO and not self.exceptions and self.omega_count == ZERO

    @property
    def total_size_finite(self) -> bool:
        """True when the described structure has finitely many elements."""
        if self.default != ZERO or self.omega_count != ZERO:
            return False
        return all(not c.is_omega for _, c in self.exceptions)

    def finite_universe_size(self) -> int:
        if not self.total_size_finite:
            raise RepresentationError("structure has infinitely many elements")
        return sum(s * c.finite for s, c in self.exceptions)

    def __str__(self) -> str:
        parts = []
        if self.default != ZERO:
            parts.append(f"*:{self.default!r}")
        parts.extend(f"{s}:{c!r}" for s, c in self.exceptions)
        if self.omega_count != ZERO:
            parts.append(f"omega:{self.omega_count!r}")
        return "[" + ",".join(parts) + "]"

    def to_json(self):
        if self.default == ZERO and self.omega_count == ZERO:
            return [[s, c.to_json()] for s, c in self.exceptions]
        return {
            "default": self.default.to_json(),
            "exceptions": {str(s): c.to_json() for s, c in self.exceptions},
            "omega_count": self.omega_count.to_json(),
        }

    @classmethod
    def from_json(cls, data) -> "Character":
        if isinstance(data, list):
            # shorthand: [[size, count], ...] with default 0
            return cls.of(*[(s, c) for s, c in data])
        if not isinstance(data, dict):
            raise RepresentationError(f"cannot parse character from {data!r}")
        exc = {int(k): v for k, v in data.get("exceptions", {}).items()}
        return cls.make(data.get("default", 0), exc, data.get("omega_count", 0))


def character(*pairs) -> Character:
    """Test-friendly constructor: character((5, "omega"), (2, 1))."""
    return Character.of(*pairs)


# ---------------------------------------------------------------------------
# Finite structures


@dataclass(frozen=True)
class FiniteStructure:
    """A concrete equivalence relation on {0..n-1}, given by its blocks."""

    blocks: tuple[frozenset[int], ...]

    def __post_init__(self):
        seen: set[int] = set()
        for block in self.blocks:
            if not block:
                raise RepresentationError("blocks must be nonempty")
            if block & seen:
                raise RepresentationError("blocks must be disjoint")
            seen |= block
        if seen and seen != set(range(len(seen))):
            raise RepresentationError("blocks must partition a prefix of the naturals")

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]]) -> "FiniteStructure":
        canon = tuple(sorted((frozenset(b) for b in blocks), key=min))
        return cls(canon)

    @property
    def n(self) -> int:
        return sum(len(b) for b in self.blocks)

    def character(self) -> Character:
        counts: dict[int, int] = {}
        for block in self.blocks:
            counts[len(block)] = counts.get(len(block), 0) + 1
        return Character.make(0, counts, 0)

    def related(self, x: int, y: int) -> bool:
        for block in self.blocks:
            if x in block:
                return y in block
        return False


def char_of_finite(structure: FiniteStructure) -> Character:
    """Census of a finite structure: default 0, only the occurring sizes listed."""
    return structure.character()


# ---------------------------------------------------------------------------
# Embedding order on characters


def char_subset(a: Character, b: Character) -> bool:
    """Pointwise count comparison: every class demand of `a` is met exactly in `b`."""
    if not a.default <= b.default:
        return False
    if not a.omega_count <= b.omega_count:
        return False
    for size in set(a.sizes_of_interest) | set(b.sizes_of_interest):
        if not a.count(size) <= b.count(size):
            return False
    return True


def char_diff_min(c: Character, s: Character) -> Component | None:
    """Least component (canonical order) present in `c` but not in `s`.

    Only defined for censuses without infinite classes; exact on the finite
    descriptions.  Returns None when every component of `c` is in `s`.
    """
    if c.omega_count != ZERO or s.omega_count != ZERO:
        raise RepresentationError("component difference requires structures with finite classes")
    candidate_sizes = set(c.sizes_of_interest) | set(s.sizes_of_interest)
    # Smallest size governed by both defaults: relevant when c's default
    # exceeds s's, in which case every such size yields a missing component.
    k = 1
    while k in candidate_sizes:
        k += 1
    candidate_sizes.add(k)
    best: Component | None = None
    for size in candidate_sizes:
        have, bound = c.count(size), s.count(size)
        if have > bound:
            # bound is finite here since have > bound
            cand = Component(ExtNat(size), bound.finite + 1)
            if best is None or cand.sort_key() < best.sort_key():
                best = cand
    return best


def _breakpoints(a: Character, b: Character) -> list[int]:
    pts = {1}
    for size in a.sizes_of_interest + b.sizes_of_interest:
        pts.add(size)
        pts.add(size + 1)
    return sorted(pts)


def fin_embeds(a: Character, b: Character) -> bool:
    """Every finite substructure of an `a`-structure embeds into a `b`-structure.

    Equivalent to the cumulative count of `a` never exceeding that of `b` at
    any finite threshold; thresholds need checking only where either census
    steps.
    """
    return all(a.cumulative(t) <= b.cumulative(t) for t in _breakpoints(a, b))


def embeds(a: Character, b: Character) -> bool:
    """The whole class multiset of `a` matches injectively, size-monotonically,
    into that of `b` (infinite classes only into infinite classes)."""
    return a.omega_count <= b.omega_count and fin_embeds(a, b)


def iso_eq(a: Character, b: Character) -> bool:
    return a == b


def biembeddable(a: Character, b: Character) -> bool:
    return embeds(a, b) and embeds(b, a)


def fin_biembeddable(a: Character, b: Character) -> bool:
    return fin_embeds(a, b) and fin_embeds(b, a)
