"""Ground truth at desk scale.

Exact LRU simulation over concrete traces, exhaustive search over
intra-region orderings and inter-core interleavings for the worst-case
number of interference misses, exhaustive enumeration of feasible per
region miss assignments, and brute-force segment assignment for the
dynamic program.  Everything here is deliberately independent of the
analysis modules it certifies.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations, product

from .model import UnorderedRegion, UrPath

LOCAL = "local"


class InstanceTooLarge(RuntimeError):
    """Exhaustive search refused: instance exceeds the configured limits."""


@dataclass(frozen=True)
class OracleLimits:
    max_accesses: int = 14        # combined unrolled accesses, all tasks
    max_orderings: int = 4000     # distinct trace combinations
    samples: int = 200            # fallback sampling draws


def simulate_lru(trace, assoc):
    """Pure LRU over a single cache set: per access (owner, address) in
    the trace, True on hit.  Most recent address first in the state."""
    state: list[int] = []
    hits = []
    for _, address in trace:
        try:
            state.remove(address)
            hits.append(True)
        except ValueError:
            hits.append(False)
            if len(state) >= assoc:
                state.pop()
        state.insert(0, address)
    return hits


def interference_flags(trace, assoc):
    """Per local access: True when it misses in the joint trace but hits
    when the local projection runs alone in the same order."""
    joint = simulate_lru(trace, assoc)
    local = [(o, a) for o, a in trace if o == LOCAL]
    alone = simulate_lru(local, assoc)
    flags = []
    i = 0
    for (owner, _), hit in zip(trace, joint):
        if owner == LOCAL:
            flags.append(alone[i] and not hit)
            i += 1
    return flags


def region_traces(region: UnorderedRegion, keep, limit):
    """All distinct unrolled address sequences of one region.

    One execution of the body is a permutation of its items, each item
    expanded to one of its own traces; the region repeats that `count`
    times with orderings chosen independently per round.  `keep` filters
    blocks (level/set selection).  Deduplicates as it goes and raises
    InstanceTooLarge past `limit` sequences.
    """
    item_traces = []
    for item in region.body:
        if isinstance(item, UnorderedRegion):
            item_traces.append(region_traces(item, keep, limit))
        elif keep(item):
            item_traces.append([(item.address,)])
        else:
            item_traces.append([()])
    rounds = set()
    for perm in permutations(range(len(item_traces))):
        for choice in product(*(item_traces[i] for i in perm)):
            rounds.add(tuple(a for part in choice for a in part))
            if len(rounds) > limit:
                raise InstanceTooLarge("too many region orderings")
    if not rounds:
        rounds = {()}
    traces = {()}
    for _ in range(region.count):
        traces = {t + r for t in traces for r in rounds}
        if len(traces) > limit:
            raise InstanceTooLarge("too many region orderings")
    return sorted(traces)


def path_traces(path: UrPath, keep, limit):
    """All distinct unrolled address sequences of a path."""
    traces = {()}
    for region in path.regions:
        parts = region_traces(region, keep, limit)
        traces = {t + p for t in traces for p in parts}
        if len(traces) > limit:
            raise InstanceTooLarge("too many path orderings")
    return sorted(traces)


def sample_path_trace(path: UrPath, keep, rng):
    """One random unrolled address sequence of a path."""
    out = []

    def emit(region):
        for _ in range(region.count):
            items = list(region.body)
            rng.shuffle(items)
            for item in items:
                if isinstance(item, UnorderedRegion):
                    emit(item)
                elif keep(item):
                    out.append(item.address)

    for region in path.regions:
        emit(region)
    return tuple(out)


def _max_flags(local, alone_hits, remotes, assoc):
    """Maximum flagged misses over all interleavings of the local trace
    with the remote traces, each kept in order.  Memoized on positions
    plus the exact LRU state."""
    memo: dict = {}

    def rec(i, js, state):
        key = (i, js, state)
        cached = memo.get(key)
        if cached is not None:
            return cached
        best = 0
        if i < len(local):
            address = local[i]
            hit = address in state
            flagged = 1 if (alone_hits[i] and not hit) else 0
            best = flagged + rec(i + 1, js, _touch(state, address, assoc))
        for c, trace in enumerate(remotes):
            j = js[c]
            if j < len(trace):
                address = trace[j]
                njs = js[:c] + (j + 1,) + js[c + 1:]
                best = max(best, rec(i, njs, _touch(state, address, assoc)))
        memo[key] = best
        return best

    return rec(0, (0,) * len(remotes), ())


def _touch(state, address, assoc):
    kept = tuple(a for a in state if a != address)
    return ((address,) + kept)[:assoc]


def max_interference_misses(local_path, remote_paths, assoc, keep_local,
                            keep_remotes, limits=OracleLimits(), rng=None):
    """Worst-case interference misses over every ordering and interleaving.

    Exhaustive within `limits`; with an `rng` the search falls back to
    random ordering draws past the limits (a lower bound, reported by the
    second return value as False)."""
    local_n = _unrolled_size(local_path, keep_local)
    remote_n = sum(_unrolled_size(p, k)
                   for p, k in zip(remote_paths, keep_remotes))
    exhaustive = local_n + remote_n <= limits.max_accesses
    if exhaustive:
        try:
            locals_ = path_traces(local_path, keep_local, limits.max_orderings)
            remotes_ = [path_traces(p, k, limits.max_orderings)
                        for p, k in zip(remote_paths, keep_remotes)]
            combos = len(locals_)
            for r in remotes_:
                combos *= max(len(r), 1)
            if combos > limits.max_orderings:
                raise InstanceTooLarge("too many trace combinations")
        except InstanceTooLarge:
            exhaustive = False
    if not exhaustive:
        if rng is None:
            raise InstanceTooLarge(
                f"instance too large for exhaustive search "
                f"({local_n}+{remote_n} accesses); pass an rng to sample")
        best = 0
        for _ in range(limits.samples):
            lt = sample_path_trace(local_path, keep_local, rng)
            alone = simulate_lru([(LOCAL, a) for a in lt], assoc)
            rts = [sample_path_trace(p, k, rng)
                   for p, k in zip(remote_paths, keep_remotes)]
            best = max(best, _max_flags(lt, alone, rts, assoc))
        return best, False

    best = 0
    for lt in locals_:
        alone = simulate_lru([(LOCAL, a) for a in lt], assoc)
        for combo in product(*remotes_):
            best = max(best, _max_flags(lt, alone, combo, assoc))
    return best, True


def _unrolled_size(path, keep):
    def size(region):
        n = 0
        for item in region.body:
            if isinstance(item, UnorderedRegion):
                n += size(item)
            elif keep(item):
                n += 1
        return n * region.count

    return sum(size(r) for r in path.regions)


def _consumable(piles, needs, memo):
    """Whether misses with the given needs can each take one access from
    that many distinct addresses, out of per-address access counts
    `piles`.  For one miss, taking from the largest piles is never worse;
    the order of misses is searched."""
    key = (piles, needs)
    hit = memo.get(key)
    if hit is not None:
        return hit
    ok = not needs
    for i in range(len(needs)):
        if i > 0 and needs[i] == needs[i - 1]:
            continue
        need = needs[i]
        if need > len(piles):
            continue
        rest = needs[:i] + needs[i + 1:]
        after = tuple(sorted(
            (p - 1 if j < need else p for j, p in enumerate(piles) if not
             (j < need and p == 1)), reverse=True))
        if _consumable(after, rest, memo):
            ok = True
            break
    memo[key] = ok
    return ok


def _token_feasible(piles, needs):
    piles = tuple(sorted((p for p in piles if p > 0), reverse=True))
    needs = tuple(sorted(needs, reverse=True))
    return _consumable(piles, needs, {})


def max_feasible_assignment(needs_counts, queues):
    """Exact optimum of the per-region miss assignment problem for one
    same-address group: maximize total misses over integer assignments
    n[k][x] with per-reference totals capped by the access count, where
    the misses assigned to a region must be realizable there (each miss
    of reference k consumes one access from need_k distinct addresses,
    accesses consumed at most once)."""
    total_delta = sum(d for _, d in needs_counts)
    if total_delta > 12 or len(queues) > 3:
        raise InstanceTooLarge("assignment enumeration limits exceeded")
    m = len(queues)
    refs = list(needs_counts)

    def splits(delta):
        if m == 0:
            yield ()
            return
        for combo in product(range(delta + 1), repeat=m):
            if sum(combo) <= delta:
                yield combo

    best = 0
    for assignment in product(*(list(splits(d)) for _, d in refs)):
        total = sum(sum(row) for row in assignment)
        if total <= best:
            continue
        ok = True
        for x in range(m):
            needs = []
            for (need, _), row in zip(refs, assignment):
                needs.extend([need] * row[x])
            if not _token_feasible(queues[x], needs):
                ok = False
                break
        if ok:
            best = total
    return best


def assignment_relaxation_bound(needs_counts, queues):
    """The analytical relaxation of the assignment problem: the summed
    supply inequality over the regions, without realizability.  Always at
    least the exact assignment optimum; can exceed the aggregated-queue
    result, which is why the dominance comparison uses the exact form."""
    total_delta = sum(d for _, d in needs_counts)
    if total_delta > 12 or len(queues) > 3:
        raise InstanceTooLarge("assignment enumeration limits exceeded")
    m = len(queues)
    refs = list(needs_counts)

    def splits(delta):
        if m == 0:
            yield ()
            return
        for combo in product(range(delta + 1), repeat=m):
            if sum(combo) <= delta:
                yield combo

    best = 0
    for assignment in product(*(list(splits(d)) for _, d in refs)):
        lhs = 0
        col = [0] * m
        for (need, _), row in zip(refs, assignment):
            lhs += sum(row) * need
            for x, v in enumerate(row):
                col[x] += v
        rhs = 0
        for x, q in enumerate(queues):
            rhs += sum(min(entry, col[x]) for entry in q)
        if lhs <= rhs:
            best = max(best, sum(col))
    return best


def exhaustive_segment_max(crs, remote_path, assoc, level, set_index, cache,
                           cac_remote, extras=()):
    """Brute-force optimum over all segment assignments obeying the
    partial order, with the same done-set accounting the dynamic program
    uses.  Limited to four CRs against four remote regions."""
    from .contention import region_miss_bound

    if not crs or not remote_path.regions:
        return 0
    m = len(remote_path.regions)
    if len(crs) > 4 or m > 4:
        raise InstanceTooLarge("exhaustive segment limits exceeded")
    regions = remote_path.regions
    best = 0

    def rec(s, min_start, done, acc):
        nonlocal best
        if s == len(crs):
            best = max(best, acc)
            return
        cr = crs[s]
        live = [r for r in cr.refs if r not in done]
        inherited = {r for r in cr.refs if r in done}
        for start in range(min_start, m + 1):
            for end in range(start, m + 1):
                total, per_ref = region_miss_bound(
                    live, regions[start - 1:end], assoc, level, set_index,
                    cache, cac_remote, extras=extras)
                nd = inherited | {
                    r for r in live if per_ref.get(r, 0) >= r.count}
                rec(s + 1, end, nd, acc + total)

    rec(0, 1, set(), 0)
    return best
