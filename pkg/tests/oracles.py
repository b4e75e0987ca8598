"""Brute-force embedding oracles, independent of the cumulative-count route.

Everything here works on explicit finite truncations of the censuses;
matchability is decided either by counting interchangeable uniform blocks or
by an augmenting-path search over the materialized host list.  Nothing calls
Character.cumulative, so agreement with the package's embedding tests is a
genuine two-route check.

The counting oracles saturate materialized per-size counts at SATURATE and
treat anything at or above it as infinite; they are exact for censuses whose
finite counts stay well below that cap (the oracle corpus keeps counts <= 3
over at most a handful of sizes).
"""
from __future__ import annotations

from functools import lru_cache

from limitlearn import Character

INF = None  # symbolic size of an infinite class
SATURATE = 50


def truncation(char: Character, copies_cap: int, top: int) -> tuple:
    """Explicit class-size list: per-size counts capped, sizes materialized
    up to `top`, infinite classes as symbolic INF entries."""
    sizes: list = []
    for size in range(1, top + 1):
        count = char.count(size)
        n = copies_cap if count.is_omega else min(count.finite, copies_cap)
        sizes.extend([size] * n)
    omega = char.omega_count
    n = copies_cap if omega.is_omega else min(omega.finite, copies_cap)
    sizes.extend([INF] * n)
    return tuple(sizes)


def _shared_top(a: Character, b: Character, slack: int) -> int:
    keys = list(a.sizes_of_interest) + list(b.sizes_of_interest) + [1]
    return max(keys) + slack


def brute_fin_embeds(a: Character, b: Character) -> bool:
    """Finite embedding via uniform witnesses.

    A violating finite substructure, if one exists, can be shrunk to m blocks
    of a single size t (cut every block at the threshold where the hosts run
    out and drop the rest), and uniform blocks are interchangeable, so
    counting hosts in deep truncations decides each witness.
    """
    top = _shared_top(a, b, SATURATE + 10)
    hosts_a = truncation(a, SATURATE + 5, top)
    hosts_b = truncation(b, SATURATE + 5, top)
    for t in range(1, max(list(a.sizes_of_interest) + list(b.sizes_of_interest) + [1]) + 3):
        realizable = sum(1 for h in hosts_a if h is INF or h >= t)
        available = sum(1 for h in hosts_b if h is INF or h >= t)
        if available >= SATURATE:
            continue  # infinitely many hosts at this threshold
        if min(realizable, SATURATE) > available:
            return False
    return True


def brute_embeds(a: Character, b: Character) -> bool:
    """Full embedding by counting: the finite-threshold checks of the finite
    oracle plus the requirement that infinite classes find infinite hosts."""
    if not brute_fin_embeds(a, b):
        return False
    top = _shared_top(a, b, SATURATE + 10)
    inf_a = sum(1 for h in truncation(a, SATURATE + 5, top) if h is INF)
    inf_b = sum(1 for h in truncation(b, SATURATE + 5, top) if h is INF)
    if inf_b >= SATURATE:
        return True
    return min(inf_a, SATURATE) <= inf_b


# ---------------------------------------------------------------------------
# Matching-based oracles (small censuses)


def _fits(block, host) -> bool:
    if block is INF:
        return host is INF
    if host is INF:
        return True
    return block <= host


def match_blocks(blocks: tuple, hosts: tuple) -> bool:
    """Can every block go to its own host of at least its size?  Augmenting
    path search (Kuhn's algorithm)."""
    owner = [None] * len(hosts)

    def augment(b, seen):
        for h, host in enumerate(hosts):
            if h in seen or not _fits(blocks[b], host):
                continue
            seen.add(h)
            if owner[h] is None or augment(owner[h], seen):
                owner[h] = b
                return True
        return False

    return all(augment(b, set()) for b in range(len(blocks)))


@lru_cache(maxsize=None)
def _matchable(profile: tuple, hosts: tuple) -> bool:
    return match_blocks(profile, hosts)


def all_profiles(max_total: int):
    """Descending block-size profiles with total size up to the bound."""
    out = []

    def rec(total, max_part, acc):
        if total == 0:
            out.append(tuple(acc))
            return
        for first in range(min(total, max_part), 0, -1):
            acc.append(first)
            rec(total - first, first, acc)
            acc.pop()

    for total in range(1, max_total + 1):
        rec(total, total, [])
    return out


def brute_fin_embeds_profiles(a: Character, b: Character, max_total: int = 10) -> bool:
    """Exhaustive small-profile oracle: every finite substructure of `a` up to
    the given total size must match into `b` (full matching search).  Sound
    for censuses with counts <= 2 over sizes <= 3, where any violation fits
    within total size 10."""
    top = _shared_top(a, b, 8)
    hosts_a = truncation(a, 12, top)
    hosts_b = truncation(b, 12, top)
    for profile in all_profiles(max_total):
        if _matchable(profile, hosts_a) and not _matchable(profile, hosts_b):
            return False
    return True


def brute_embeds_matching(a: Character, b: Character, copies_cap: int = 8) -> bool:
    """Full embedding by explicit matching of truncated class lists; sound for
    small censuses where violations appear within the caps."""
    top = _shared_top(a, b, 14)
    demands = list(truncation(a, copies_cap, top))
    hosts = truncation(b, 3 * copies_cap, top + 20)
    demands.sort(key=lambda s: -(10 ** 9) if s is INF else -s)
    return match_blocks(tuple(demands), hosts)
