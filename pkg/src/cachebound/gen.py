"""Seeded random instance generation.

Instances stay small enough for the exhaustive oracle: the combined
unrolled access count of all tasks is capped.  Addresses come from a
small pool so reuse distances are short and contention actually occurs.
"""

from __future__ import annotations

import random

from .doc import InputDocument
from .model import (CacheConfig, CacheLevel, MemoryBlock, TaskCfg,
                    UnorderedRegion, UrPath)


def random_cache(rng: random.Random) -> CacheConfig:
    roll = rng.random()
    if roll < 0.70:
        # the presentation model: one fully associative shared level
        return CacheConfig(
            levels=(CacheLevel(sets=1, assoc=rng.choice([2, 2, 3]),
                               hit_latency=5, shared=True),),
            line_size=1, miss_latency=100)
    if roll < 0.85:
        return CacheConfig(
            levels=(CacheLevel(sets=2, assoc=2, hit_latency=5, shared=True),),
            line_size=1, miss_latency=100)
    return CacheConfig(
        levels=(CacheLevel(sets=1, assoc=1, hit_latency=1, shared=False),
                CacheLevel(sets=rng.choice([1, 2]), assoc=2,
                           hit_latency=5, shared=True)),
        line_size=1, miss_latency=100)


def _random_path(rng, pool, budget, ids):
    """Regions totalling at most `budget` unrolled accesses."""
    regions = []
    spent = 0
    for _ in range(rng.randint(1, 4)):
        if spent >= budget:
            break
        count = rng.choice([1, 1, 1, 2, 3])
        addrs = rng.sample(pool, k=min(rng.randint(1, 2), len(pool)))
        body = []
        per_round = 0
        for a in addrs:
            ids[0] += 1
            body.append(MemoryBlock(id=f"b{ids[0]}", address=a))
            per_round += 1
        if rng.random() < 0.25 and len(pool) > len(addrs):
            inner_addr = rng.choice([a for a in pool if a not in addrs])
            inner_count = rng.choice([2, 3])
            ids[0] += 1
            body.append(UnorderedRegion(
                index=0, count=inner_count,
                body=[MemoryBlock(id=f"b{ids[0]}", address=inner_addr)]))
            per_round += inner_count
        if spent + count * per_round > budget:
            count = 1
            if spent + per_round > budget:
                break
        regions.append(UnorderedRegion(index=0, count=count, body=body))
        spent += count * per_round
    if not regions:
        ids[0] += 1
        regions = [UnorderedRegion(index=0, count=1,
                                   body=[MemoryBlock(id=f"b{ids[0]}",
                                                     address=rng.choice(pool))])]
    return regions


def random_task(rng: random.Random, name: str, pool, budget: int,
                two_paths_prob: float = 0.2) -> TaskCfg:
    ids = [0]
    n_paths = 2 if rng.random() < two_paths_prob else 1
    paths = [UrPath(regions=_random_path(rng, pool, budget, ids), owner=name)
             for _ in range(n_paths)]
    return TaskCfg(name=name, paths=paths)


def random_document(seed: int, *, budget: int = 12,
                    multicore_prob: float = 0.15) -> InputDocument:
    """One reproducible instance: an analyzed task plus one or two
    interfering cores, all within the oracle's exhaustive range."""
    rng = random.Random(seed)
    cache = random_cache(rng)
    pool = list(range(rng.randint(3, 6)))
    local_budget = rng.randint(3, max(3, budget // 2))
    remote_budget = budget - local_budget
    tasks = [random_task(rng, "tau", pool, local_budget)]
    cores = [["tau"]]
    if rng.random() < multicore_prob and remote_budget >= 4:
        half = remote_budget // 2
        tasks.append(random_task(rng, "rem1", pool, half))
        tasks.append(random_task(rng, "rem2", pool, remote_budget - half))
        cores += [["rem1"], ["rem2"]]
    else:
        tasks.append(random_task(rng, "rem1", pool, remote_budget))
        cores.append(["rem1"])
    return InputDocument(cache=cache, tasks=tasks, analyzed="tau",
                         cores=cores, options={"seed": seed})
