"""Reimplementations of the two prior analyses, for comparison.

The region-level baseline charges every access of a block as a miss as
soon as its interfering segment touches the block's cache set, keeping
only the partial order between regions.  The address-counting baseline
charges every access of a reference whose eviction threshold the
interfering tasks' unique addresses can meet, regardless of when they
run.  Both are deliberately coarse; the point of the fine-grained
analysis is to land below them.
"""

from __future__ import annotations

from .contention import region_unique_addresses
from .intra import compute_intra_state
from .model import CacheConfig, UrPath
from .refs import build_references


def zhang_style_bound(local_path: UrPath, remote_path: UrPath,
                      cache: CacheConfig, level: int, set_index: int,
                      cac_local, cac_remote) -> int:
    """Partial-order baseline: a region's blocks all miss whenever the
    matched remote segment accesses their set; segments of consecutive
    regions may share only their boundary region."""
    remote = remote_path.regions
    m = len(remote)
    if m == 0:
        return 0
    conflict_at = [
        bool(region_unique_addresses(u, level, set_index, cache, cac_remote))
        for u in remote
    ]

    def value(region):
        return sum(
            local_path.total_count(b.id)
            for b in region.blocks()
            if cac_local.reaches(b.id, level)
            and cache.set_index(b.address, level) == set_index
        )

    def contribution(region_value, start, end):
        return region_value if any(conflict_at[start - 1:end]) else 0

    # states: segment end -> best accumulated misses
    layer: dict = {}
    first = value(local_path.regions[0])
    for end in range(1, m + 1):
        layer[end] = max(layer.get(end, 0), contribution(first, 1, end))
    for region in local_path.regions[1:]:
        region_value = value(region)
        nxt: dict = {}
        for start in sorted(layer):
            for end in range(start, m + 1):
                v = layer[start] + contribution(region_value, start, end)
                if v > nxt.get(end, -1):
                    nxt[end] = v
        layer = nxt
    return max(layer.values())


def liang_style_bound(local_path: UrPath, remote_sides, cache: CacheConfig,
                      level: int, set_index: int, age_map, cac_local) -> int:
    """Address-counting baseline over one cache set.

    `remote_sides` is a list of (path, cac) pairs covering every path of
    every interfering task; their unique same-set addresses are pooled,
    since interference is assumed possible at any time.  Every local
    reference whose eviction threshold the pool meets contributes all of
    its accesses."""
    assoc = cache.level(level).assoc
    uniques: set[int] = set()
    for path, cac_remote in remote_sides:
        for region in path.regions:
            uniques |= region_unique_addresses(
                region, level, set_index, cache, cac_remote)
    refsets = build_references(local_path, age_map, cac_local, level)
    total = 0
    for x in sorted(refsets):
        for ref in refsets[x]:
            if cache.set_index(ref.address, level) != set_index:
                continue
            if ref.min_age >= assoc:
                continue
            if len(uniques) >= ref.evict_need(assoc):
                total += ref.count
    return total


def zhang_task_bound(task, remote_task, cache, level) -> int:
    """Task-level wrapper: per-set sums, worst remote path, worst local path."""
    sets = cache.level(level).sets
    best = 0
    for local_path in task.paths:
        _, cac_local = compute_intra_state(local_path, cache,
                                           task.age_overrides)
        path_worst = 0
        for remote_path in remote_task.paths:
            _, cac_remote = compute_intra_state(remote_path, cache,
                                                remote_task.age_overrides)
            total = sum(
                zhang_style_bound(local_path, remote_path, cache, level, s,
                                  cac_local, cac_remote)
                for s in range(sets)
            )
            path_worst = max(path_worst, total)
        best = max(best, path_worst)
    return best


def liang_task_bound(task, remote_tasks, cache, level) -> int:
    """Task-level wrapper: all interfering tasks pooled, worst local path."""
    remote_sides = [
        (path, compute_intra_state(path, cache, rt.age_overrides)[1])
        for rt in remote_tasks
        for path in rt.paths
    ]
    sets = cache.level(level).sets
    best = 0
    for local_path in task.paths:
        age_map, cac_local = compute_intra_state(local_path, cache,
                                                 task.age_overrides)
        total = sum(
            liang_style_bound(local_path, remote_sides, cache, level, s,
                              age_map, cac_local)
            for s in range(sets)
        )
        best = max(best, total)
    return best
