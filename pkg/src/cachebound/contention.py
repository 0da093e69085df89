"""Fine-grained miss counting for one contention region.

The remote side of the analysis is abstracted into access queues: per
interfering region, the sorted per-address access counts that reach the
shared level and map to the analyzed set.  Queues of consecutive regions
aggregate rank-wise.  Misses are then counted by an iterative drain: each
miss of a reference consumes one access from each of the `need` largest
queue entries, where `need` is the number of unique remote addresses that
must intervene to push the reference out.  A bounded carry-on term covers
evictions assembled across region boundaries, which the rank-wise
aggregation cannot see.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .intra import CacClass
from .model import CacheConfig, UnorderedRegion


@dataclass
class DrainResult:
    total: int
    per_ref: dict
    residual: list[int]


@dataclass
class ExtraInterference:
    """Whole-path remote contribution of an additional core: its
    aggregated queue, unique address set, and region count."""

    queue: list[int]
    uniques: set[int] = field(default_factory=set)
    region_count: int = 0


def build_access_queue(region: UnorderedRegion, level: int, set_index: int,
                       cache: CacheConfig, cac: CacClass) -> list[int]:
    """Per unique address of the region: its total access count, summed
    over blocks, filtered to accesses that reach the level and map to the
    set.  Sorted non-increasing, zero entries dropped."""
    counts: dict[int, int] = {}
    for block in region.blocks():
        if not cac.reaches(block.id, level):
            continue
        if cache.set_index(block.address, level) != set_index:
            continue
        counts[block.address] = counts.get(block.address, 0) + _total_count(region, block.id)
    return sorted((c for c in counts.values() if c > 0), reverse=True)


def _total_count(region, block_id):
    """Unrolled access count of a block within one execution of `region`."""
    def walk(r, mult):
        mult *= r.count
        for item in r.body:
            if isinstance(item, UnorderedRegion):
                found = walk(item, mult)
                if found is not None:
                    return found
            elif item.id == block_id:
                return mult
        return None

    return walk(region, 1)


def region_unique_addresses(region, level, set_index, cache, cac) -> set[int]:
    return {
        b.address
        for b in region.blocks()
        if cac.reaches(b.id, level) and cache.set_index(b.address, level) == set_index
    }


def aggregate_queues(queues) -> list[int]:
    """Rank-wise sum of sorted queues, re-sorted, zeros dropped."""
    merged: list[int] = []
    for q in queues:
        for v, entry in enumerate(q):
            if v < len(merged):
                merged[v] += entry
            else:
                merged.append(entry)
    return sorted((e for e in merged if e > 0), reverse=True)


def drain_misses(queue, refs, assoc, caps=None, check=False) -> DrainResult:
    """Count misses of same-address references against one queue.

    References are processed in non-decreasing order of the number of
    unique addresses they need.  Each miss removes one access from each of
    the `need` largest entries; a reference stops when its access count is
    exhausted or fewer than `need` addresses remain.  Later references see
    the drained queue.  Equal-rank entries are interchangeable, so batches
    of iterations are folded where the top group is stable.
    """
    q = sorted((e for e in queue if e > 0), reverse=True)
    per_ref: dict = {}
    total = 0
    for ref in sorted(refs, key=lambda r: r.evict_need(assoc)):
        if ref.min_age >= assoc:
            raise ValueError(f"reference {ref.key} cannot be cached "
                             "(min_age >= associativity)")
        need = ref.evict_need(assoc)
        cap = ref.count if caps is None else caps[ref]
        before = list(q) if check else None
        n = 0
        while n < cap and len(q) >= need:
            if len(q) == need:
                t = min(cap - n, q[-1])
            else:
                t = min(cap - n, q[need - 1] - q[need])
                if t == 0:
                    t = 1
            head = [e - t for e in q[:need]]
            q = _merge_desc(head, q[need:])
            n += t
        if check:
            assert miss_count_bounds_ok(ref, before, n, assoc), \
                f"miss bound violated for {ref.key}: n={n} queue={before}"
        per_ref[ref] = n
        total += n
    return DrainResult(total=total, per_ref=per_ref, residual=q)


def _merge_desc(a, b):
    """Merge two non-increasing lists, dropping zeros."""
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        if a[i] >= b[j]:
            out.append(a[i]); i += 1
        else:
            out.append(b[j]); j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    while out and out[-1] <= 0:
        out.pop()
    return out


def miss_count_bounds_ok(ref, queue_before, n, assoc) -> bool:
    """The two invariants every drain must satisfy: a reference misses at
    most `count` times, and each miss consumes `need` distinct-address
    accesses, so n * need never exceeds what the queue can supply."""
    if n > ref.count:
        return False
    need = ref.evict_need(assoc)
    return n * need <= sum(min(entry, n) for entry in queue_before)


def region_miss_bound(refs, segment, assoc, level, set_index, cache,
                      cac_remote, extras=(), check=False):
    """Misses of a CR's references under a contiguous interfering segment.

    Same-address references share one drained queue; different-address
    groups each drain a fresh copy of the aggregated queue, since one
    remote access ages all of them at once.  The carry-on term adds at
    most one miss per region boundary for accesses the rank-wise
    aggregation cannot evict, restricted to references whose eviction
    threshold the segment's unique addresses can actually meet.  Returns
    the bound and per-reference miss counts (carry-on misses attributed to
    the most evictable references first).
    """
    queues = [build_access_queue(u, level, set_index, cache, cac_remote)
              for u in segment]
    uniques = set()
    for u in segment:
        uniques |= region_unique_addresses(u, level, set_index, cache, cac_remote)
    region_count = len(segment)
    for extra in extras:
        queues.append(list(extra.queue))
        uniques |= extra.uniques
        region_count += extra.region_count
    aggregated = aggregate_queues(queues)

    per_ref: dict = {}
    total = 0
    for _, group in _by_address(refs):
        drained = drain_misses(aggregated, group, assoc, check=check)
        per_ref.update(drained.per_ref)
        total += drained.total
        eligible = [r for r in sorted(group, key=lambda r: r.evict_need(assoc))
                    if r.evict_need(assoc) <= len(uniques)]
        slack = sum(r.count - drained.per_ref[r] for r in eligible)
        carry = min(slack, max(region_count - 1, 0))
        total += carry
        for r in eligible:
            if carry == 0:
                break
            take = min(r.count - per_ref[r], carry)
            per_ref[r] += take
            carry -= take
    return total, per_ref


def _by_address(refs):
    groups: dict[int, list] = {}
    for r in refs:
        groups.setdefault(r.address, []).append(r)
    return sorted(groups.items())


def sequential_miss_bound(refs, remote_regions, assoc, level, set_index,
                          cache, cac_remote) -> int:
    """Region-by-region application of the drain, carrying only remaining
    access counts forward.  Misses the cross-region collaboration that the
    aggregated queue captures; kept as the comparison point showing why
    aggregation is needed."""
    remaining = {r: r.count for r in refs}
    total = 0
    for region in remote_regions:
        queue = build_access_queue(region, level, set_index, cache, cac_remote)
        for _, group in _by_address(refs):
            live = [r for r in group if remaining[r] > 0]
            if not live:
                continue
            drained = drain_misses(queue, live, assoc, caps=remaining)
            for r, n in drained.per_ref.items():
                remaining[r] -= n
            total += drained.total
    return total
