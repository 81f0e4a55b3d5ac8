"""Coalitions, set partitions, and embedded coalitions over small player sets.

Players are small non-negative integers. A coalition is an int bitmask with
bit ``i`` set for player ``i``; a partition is a tuple of pairwise disjoint
nonempty block masks sorted by least member; an embedded coalition is a pair
``(S, pi)`` where ``pi`` partitions the complement of ``S``. Everything is an
immutable value, so all operations here are pure and safe to share across
threads.
"""

from __future__ import annotations

import math
from typing import Iterable, Iterator

from .errors import CapacityError

Coalition = int
Partition = tuple[int, ...]
EmbeddedCoalition = tuple[int, Partition]

# Bitmasks are fixed-width: player ids must fit in MAX_PLAYER_ID bits.
MAX_PLAYER_ID = 31

DEFAULT_UNIVERSE_BOUND = 8
_universe_bound = DEFAULT_UNIVERSE_BOUND

EMPTY: Coalition = 0
EMPTY_PARTITION: Partition = ()


def universe_bound() -> int:
    """Largest admitted cardinality for enumerated player sets."""
    return _universe_bound


def set_universe_bound(n: int) -> int:
    """Set the cardinality bound; returns the previous value."""
    global _universe_bound
    if n < 0:
        raise ValueError("universe bound must be non-negative")
    old = _universe_bound
    _universe_bound = n
    return old


def mask_from(players: Iterable[int]) -> Coalition:
    """Pack an iterable of player ids into a coalition mask."""
    mask = 0
    for i in players:
        if not 0 <= i <= MAX_PLAYER_ID:
            raise ValueError(f"player id {i} outside supported range 0..{MAX_PLAYER_ID}")
        bit = 1 << i
        if mask & bit:
            raise ValueError(f"duplicate player id {i}")
        mask |= bit
    return mask


def as_mask(players) -> Coalition:
    """Coerce an int mask or an iterable of ids to a coalition mask."""
    if isinstance(players, int):
        if players < 0:
            raise ValueError("coalition mask must be non-negative")
        return players
    return mask_from(players)


def members(mask: Coalition) -> tuple[int, ...]:
    return tuple(i for i in range(mask.bit_length()) if mask >> i & 1)


def size(mask: Coalition) -> int:
    return mask.bit_count()


def contains(mask: Coalition, i: int) -> bool:
    return bool(mask >> i & 1)


def singleton(i: int) -> Coalition:
    if not 0 <= i <= MAX_PLAYER_ID:
        raise ValueError(f"player id {i} outside supported range 0..{MAX_PLAYER_ID}")
    return 1 << i


def least_member(mask: Coalition) -> int:
    if mask == 0:
        raise ValueError("empty coalition has no least member")
    return (mask & -mask).bit_length() - 1


def subsets(mask: Coalition) -> Iterator[Coalition]:
    """All submasks of ``mask`` including 0 and ``mask``, ascending."""
    sub = 0
    while True:
        yield sub
        if sub == mask:
            return
        # standard subset-stepping trick: next submask in ascending order
        sub = (sub - mask) & mask


def _check_capacity(mask: Coalition) -> None:
    n = mask.bit_count()
    if n > _universe_bound:
        raise CapacityError(
            f"player set of size {n} exceeds the universe bound {_universe_bound}"
        )


def canonical_partition(blocks: Iterable[Coalition]) -> Partition:
    """Sort blocks by least member and validate disjointness/nonemptiness."""
    blocks = tuple(blocks)
    union = 0
    for block in blocks:
        if block == 0:
            raise ValueError("partition blocks must be nonempty")
        if union & block:
            raise ValueError("partition blocks must be pairwise disjoint")
        union |= block
    return tuple(sorted(blocks, key=least_member))


def partition_from(blocks: Iterable[Iterable[int]]) -> Partition:
    return canonical_partition(mask_from(block) for block in blocks)


def union_of(pi: Partition) -> Coalition:
    mask = 0
    for block in pi:
        mask |= block
    return mask


def is_partition_of(pi: Partition, players: Coalition) -> bool:
    if not isinstance(pi, tuple):
        return False
    union = 0
    for block in pi:
        if block == 0 or union & block:
            return False
        union |= block
    return union == players and pi == tuple(sorted(pi, key=least_member))


def atomistic(players: Coalition) -> Partition:
    return tuple(1 << i for i in range(players.bit_length()) if players >> i & 1)


def block_of(pi: Partition, i: int) -> Coalition:
    """The block of ``pi`` containing player ``i``."""
    bit = 1 << i
    for block in pi:
        if block & bit:
            return block
    raise ValueError(f"player {i} is not covered by the partition")


def block_sizes(pi: Partition) -> tuple[int, ...]:
    """Sorted multiset of block cardinalities (the partition's type)."""
    return tuple(sorted(block.bit_count() for block in pi))


_partition_cache: dict[Coalition, tuple[Partition, ...]] = {}


def enumerate_partitions(players) -> tuple[Partition, ...]:
    """All partitions of the player set, canonical, in deterministic order.

    The empty set has exactly one partition, the empty tuple. Raises
    CapacityError beyond the universe bound.
    """
    mask = as_mask(players)
    _check_capacity(mask)
    cached = _partition_cache.get(mask)
    if cached is None:
        cached = _build_partitions(mask)
        _partition_cache[mask] = cached
    return cached


def _build_partitions(mask: Coalition) -> tuple[Partition, ...]:
    # Insert players in ascending order: merging into an existing block or
    # appending a new singleton both preserve least-member block order, so
    # every intermediate partition is already canonical.
    result: list[Partition] = [()]
    for i in members(mask):
        bit = 1 << i
        grown: list[Partition] = []
        for pi in result:
            for k, block in enumerate(pi):
                grown.append(pi[:k] + (block | bit,) + pi[k + 1 :])
            grown.append(pi + (bit,))
        result = grown
    return tuple(result)


_embedded_cache: dict[Coalition, tuple[EmbeddedCoalition, ...]] = {}


def enumerate_embedded(players) -> tuple[EmbeddedCoalition, ...]:
    """All pairs ``(S, pi)`` with ``S`` a subset and ``pi`` partitioning the rest.

    Includes ``S = 0``; the empty set yields the single pair ``(0, ())``.
    """
    mask = as_mask(players)
    _check_capacity(mask)
    cached = _embedded_cache.get(mask)
    if cached is None:
        cached = tuple(
            (S, pi) for S in subsets(mask) for pi in enumerate_partitions(mask & ~S)
        )
        _embedded_cache[mask] = cached
    return cached


def insert_player(pi: Partition, i: int, target: Coalition = EMPTY) -> Partition:
    """Add player ``i`` to block ``target`` of ``pi``, or as a singleton.

    ``target`` must be a block of ``pi`` or the empty coalition.
    """
    bit = singleton(i)
    if union_of(pi) & bit:
        raise ValueError(f"player {i} is already covered by the partition")
    if target == EMPTY:
        blocks = pi + (bit,)
    else:
        if target not in pi:
            raise ValueError("target is not a block of the partition")
        blocks = tuple(block | bit if block == target else block for block in pi)
    return tuple(sorted(blocks, key=least_member))


def delete_players(pi: Partition, removed) -> Partition:
    """Drop the given players from every block, discarding emptied blocks."""
    mask = as_mask(removed)
    if mask & ~union_of(pi):
        raise ValueError("cannot delete players that are not covered by the partition")
    kept = tuple(block & ~mask for block in pi if block & ~mask)
    return tuple(sorted(kept, key=least_member))


def bell_number(n: int) -> int:
    """Number of partitions of an n-set, via B(n+1) = sum C(n,k) B(k)."""
    if n < 0:
        raise ValueError("bell_number needs n >= 0")
    bell = [1]
    for m in range(n):
        bell.append(sum(math.comb(m, k) * bell[k] for k in range(m + 1)))
    return bell[n]


def embedded_count(n: int) -> int:
    """Number of embedded coalitions on an n-set: sum C(n,s) B(n-s)."""
    return sum(math.comb(n, s) * bell_number(n - s) for s in range(n + 1))
