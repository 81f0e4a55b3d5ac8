"""Monte Carlo layer: uniform Chinese restaurant draws and payoff estimators.

The only module that leaves exact arithmetic; the exact modules stay the
oracle. Randomness comes from numpy's counter-based Philox generator so runs
are reproducible from the recorded seed, and shards merge with pooled
mean/variance so the combination is order independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import partitions, tux_games
from .partitions import Partition
from .tu_games import TuGame
from .tux_games import TuxGame

GENERATOR_ID = "numpy-philox"
_SHARD = 4096


@dataclass(frozen=True)
class SampleEstimate:
    mean: float
    std_error: float
    n_samples: int
    seed: int
    generator: str = GENERATOR_ID


def _seat(order, u, ids):
    """One restaurant pass: players arrive in ``order``; at step k the
    arrival opens a table with probability 1/(k+1) or joins a block of size b
    with probability b/(k+1)."""
    blocks: list[int] = []
    sizes: list[int] = []
    for k, pos in enumerate(order):
        bit = 1 << ids[pos]
        ticket = u[k] * (k + 1)
        if ticket < 1.0 or not blocks:
            blocks.append(bit)
            sizes.append(1)
            continue
        ticket -= 1.0
        for which, b in enumerate(sizes):
            if ticket < b:
                blocks[which] |= bit
                sizes[which] += 1
                break
            ticket -= b
        else:
            blocks[-1] |= bit
            sizes[-1] += 1
    return tuple(sorted(blocks, key=partitions.least_member))


def sample_crp(players, seed: int, count: int) -> list[Partition]:
    """Draw partitions whose law is the uniform CRP (Ewens rate 1)."""
    if count < 1:
        raise ValueError("count must be at least 1")
    mask = partitions.as_mask(players)
    ids = partitions.members(mask)
    n = len(ids)
    if n == 0:
        return [()] * count
    rng = np.random.Generator(np.random.Philox(seed))
    draws: list[Partition] = []
    remaining = count
    while remaining:
        m = min(remaining, _SHARD)
        orders = rng.permuted(np.tile(np.arange(n), (m, 1)), axis=1)
        u = rng.random((m, n))
        for d in range(m):
            draws.append(_seat(orders[d], u[d], ids))
        remaining -= m
    return draws


def _pool(stats):
    """Combine per-shard (count, mean, M2) Welford accumulators."""
    count, mean, m2 = 0, 0.0, 0.0
    for c, mu, s in stats:
        if c == 0:
            continue
        delta = mu - mean
        total = count + c
        mean += delta * c / total
        m2 += s + delta * delta * count * c / total
        count = total
    return count, mean, m2


def _welford(values):
    count, mean, m2 = 0, 0.0, 0.0
    for x in values:
        count += 1
        delta = x - mean
        mean += delta / count
        m2 += delta * (x - mean)
    return count, mean, m2


def _crp_shapley_samples(v: TuGame, i: int, rng, m: int):
    ids = partitions.members(v.players & ~(1 << i))
    n = v.n
    bit = 1 << i
    worth = {S: float(v.worth(S)) for S in partitions.subsets(v.players)}
    k = len(ids)
    out = np.empty(m)
    orders = rng.permuted(np.tile(np.arange(max(k, 1)), (m, 1)), axis=1) if k else None
    u = rng.random((m, k)) if k else None
    for d in range(m):
        pi = _seat(orders[d], u[d], ids) if k else ()
        x = worth[bit] / n
        for B in pi:
            x += B.bit_count() / n * (worth[B | bit] - worth[B])
        out[d] = x
    return out


def _mpw_samples(w: TuxGame, i: int, rng, m: int):
    ids = partitions.members(w.players)
    n = len(ids)
    bit = 1 << i
    worth = {cell: float(x) for cell, x in w.cells()}
    out = np.empty(m)
    arrivals = rng.permuted(np.tile(np.arange(n), (m, 1)), axis=1)
    u = rng.random((m, 2, n))
    for d in range(m):
        S = 0
        for pos in arrivals[d]:
            p = ids[pos]
            if p == i:
                break
            S |= 1 << p
        with_i = _draw_masked(u[d][0], w.players & ~(S | bit))
        without_i = _draw_masked(u[d][1], w.players & ~S)
        out[d] = worth[(S | bit, with_i)] - worth[(S, without_i)]
    return out


def _draw_masked(u, mask):
    ids = partitions.members(mask)
    return _seat(range(len(ids)), u, ids) if ids else ()


def estimate_payoff(game, i: int, target: str, n_samples: int, seed: int) -> SampleEstimate:
    """Unbiased Monte Carlo estimate of a player's exact payoff.

    target "shapley": draw an outside partition from the uniform CRP and
    average the weighted marginal contribution of joining each block or
    staying alone. Needs a TU game (a partition-function game qualifies when
    it is externality free).

    target "mpw": draw a uniform arrival order; for the predecessor
    coalition S, draw independent CRP partitions of the players outside
    S+i and outside S, and average the difference of the two worths. This is
    an unbiased marginal of the average game.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    if target == "shapley":
        if isinstance(game, TuxGame):
            tu = tux_games.externality_free_tu(game)
            if tu is None:
                raise ValueError(
                    "shapley target needs a TU game; this one has externalities"
                )
            game = tu
        if not isinstance(game, TuGame):
            raise ValueError("shapley target needs a TU game")
        sampler = _crp_shapley_samples
    elif target == "mpw":
        if isinstance(game, TuGame):
            game = tux_games.lift_tu_game(game)
        if not isinstance(game, TuxGame):
            raise ValueError("mpw target needs a partition-function game")
        sampler = _mpw_samples
    else:
        raise ValueError(f"unknown target {target!r}; expected 'shapley' or 'mpw'")
    if not partitions.contains(game.players, i):
        raise ValueError(f"player {i} is not in the game")

    shards = math.ceil(n_samples / _SHARD)
    children = np.random.SeedSequence(seed).spawn(shards)
    stats = []
    remaining = n_samples
    for child in children:
        m = min(remaining, _SHARD)
        rng = np.random.Generator(np.random.Philox(child))
        stats.append(_welford(sampler(game, i, rng, m)))
        remaining -= m
    count, mean, m2 = _pool(stats)
    std_error = math.sqrt(m2 / (count - 1) / count) if count > 1 else 0.0
    return SampleEstimate(mean, std_error, count, seed)
