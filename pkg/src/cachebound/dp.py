"""Dynamic program over the contention-region sequence.

Both the CR sequence and the remote region sequence run in temporal
order, so the interfering segments assigned to consecutive CRs may share
at most their boundary region.  States track the segment end and the set
of references whose accesses are all counted already, which stops a
single-access reference that spans several CRs from being counted twice.
States with the same (end, done-set) pair keep only the maximum value.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .contention import region_miss_bound
from .intra import compute_intra_state
from .refs import build_references
from .regions import assign_windows, build_contention_regions


@dataclass
class DpResult:
    misses: int
    witness: list = field(default_factory=list)
    # per CR position: {(segment_end, done_keys): value}
    states: list = field(default_factory=list)


def analyze_pair(crs, remote_path, assoc, level, set_index, cache,
                 cac_remote, extras=(), check=False) -> DpResult:
    """Maximum misses of a CR sequence against one remote region sequence.

    Seeds every prefix segment for the first CR; transitions extend a
    state by a segment starting at its end (extending further left never
    helps, and starting later only shrinks the segment).  A zero-cost skip
    transition is also taken, which keeps the state space closed under
    "this CR is not interfered at all".
    """
    if not crs or not remote_path.regions:
        return DpResult(misses=0)
    regions = remote_path.regions
    m = len(regions)

    def bound(refs, start, end):
        return region_miss_bound(
            refs, regions[start - 1:end], assoc, level, set_index, cache,
            cac_remote, extras=extras, check=check)

    # state key: (segment_end, frozenset of fully-missed refs)
    layer: dict = {}
    first = crs[0]
    for end in range(1, m + 1):
        total, per_ref = bound(first.refs, 1, end)
        done = frozenset(r for r in first.refs if per_ref.get(r, 0) >= r.count)
        _update(layer, (end, done), total, parent=None, segment=(1, end))
    layers = [layer]

    for cr in crs[1:]:
        nxt: dict = {}
        for key in _ordered(layer):
            start, prev_done = key
            value = layer[key][0]
            live = [r for r in cr.refs if r not in prev_done]
            inherited = frozenset(r for r in cr.refs if r in prev_done)
            for end in range(start, m + 1):
                total, per_ref = bound(live, start, end)
                done = inherited | frozenset(
                    r for r in live if per_ref.get(r, 0) >= r.count)
                _update(nxt, (end, done), value + total,
                        parent=key, segment=(start, end))
            _update(nxt, (start, inherited), value, parent=key, segment=None)
        layer = nxt
        layers.append(layer)

    best_key = max(_ordered(layer), key=lambda k: layer[k][0])
    best = layer[best_key][0]
    witness = _walk_back(layers, best_key, crs)
    states = [
        {(end, _done_keys(done)): entry[0] for (end, done), entry in lay.items()}
        for lay in layers
    ]
    return DpResult(misses=best, witness=witness, states=states)


def _update(layer, key, value, parent, segment):
    cur = layer.get(key)
    if cur is None or value > cur[0]:
        layer[key] = (value, parent, segment)


def _ordered(layer):
    """Deterministic iteration: by segment end, then done-set keys, and
    for the final max a larger value wins before the tie-break."""
    return sorted(layer, key=lambda k: (k[0], _done_keys(k[1])))


def _done_keys(done):
    return tuple(sorted(r.key for r in done))


def _walk_back(layers, key, crs):
    steps = []
    for s in range(len(layers) - 1, -1, -1):
        value, parent, segment = layers[s][key]
        prev_value = layers[s - 1][parent][0] if s > 0 else 0
        steps.append({
            "cr": crs[s].index,
            "span": crs[s].span,
            "segment": segment,
            "misses": value - prev_value,
        })
        key = parent
    steps.reverse()
    return steps


def analyze_refsets_pair(local_path, remote_path, cache, level, set_index,
                         age_map, cac_local, cac_remote, extras=(),
                         check=False, optimize=True) -> DpResult:
    """Full per-set pipeline for one (local path, remote path) pair:
    references, windows, CRs, then the dynamic program."""
    assoc = cache.level(level).assoc
    refsets = build_references(local_path, age_map, cac_local, level)
    for refs in refsets.values():
        refs[:] = [r for r in refs
                   if cache.set_index(r.address, level) == set_index]
    assign_windows(local_path, refsets, cac_local, level)
    crs = build_contention_regions(local_path, refsets, assoc, optimize=optimize)
    return analyze_pair(crs, remote_path, assoc, level, set_index, cache,
                        cac_remote, extras=extras, check=check)


def analyze_task_pair(task, remote_task, cache, level, check=False):
    """Max misses of a task under one interfering task at a shared level.

    For each local path the per-set results are summed and the worst
    remote path taken; the task bound is the worst local path.  Returns
    the bound and per-path detail.
    """
    sets = cache.level(level).sets
    best = 0
    detail = []
    for local_path in task.paths:
        age_map, cac_local = compute_intra_state(local_path, cache,
                                                 task.age_overrides)
        path_worst = 0
        for remote_path in remote_task.paths:
            _, cac_remote = compute_intra_state(remote_path, cache,
                                                remote_task.age_overrides)
            total = 0
            for set_index in range(sets):
                result = analyze_refsets_pair(
                    local_path, remote_path, cache, level, set_index,
                    age_map, cac_local, cac_remote, check=check)
                total += result.misses
            path_worst = max(path_worst, total)
        detail.append(path_worst)
        best = max(best, path_worst)
    return best, detail
