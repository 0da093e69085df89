"""Whole-system orchestration and WCET composition.

Runs the contention analysis per shared cache level and cache set, merges
interfering tasks per remote core into one region sequence, folds the
additional cores' accesses into the queues, and composes the task's WCET
from its intra-core bound plus the interference latency.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import baselines, oracle
from .contention import (ExtraInterference, aggregate_queues,
                         build_access_queue, region_unique_addresses)
from .dp import analyze_refsets_pair
from .intra import compute_intra_state
from .model import (CacheConfig, MemoryBlock, ModelError, TaskCfg,
                    UnorderedRegion, UrPath)


@dataclass
class MethodResult:
    misses: int
    interference_cycles: int
    wcet: int
    detail: dict = field(default_factory=dict)


@dataclass
class AnalysisReport:
    task: str
    intra_wcet: int
    penalty: dict          # per shared level
    methods: dict          # name -> MethodResult
    oracle: dict | None = None


def partition_by_set_and_level(task: TaskCfg, cache: CacheConfig) -> dict:
    """Block ids per (level, set): those that may access the level and map
    to the set.  Union over the task's paths."""
    out: dict = {}
    for level in range(1, cache.num_levels + 1):
        for s in range(cache.level(level).sets):
            out[(level, s)] = set()
    for path in task.paths:
        _, cac = compute_intra_state(path, cache, task.age_overrides)
        for block in path.blocks():
            for level in range(1, cache.num_levels + 1):
                if cac.reaches(block.id, level):
                    s = cache.set_index(block.address, level)
                    out[(level, s)].add(block.id)
    return out


def _clone_region(region: UnorderedRegion, prefix: str) -> UnorderedRegion:
    body = []
    for item in region.body:
        if isinstance(item, UnorderedRegion):
            body.append(_clone_region(item, prefix))
        else:
            body.append(MemoryBlock(id=prefix + item.id, address=item.address))
    return UnorderedRegion(index=region.index, count=region.count, body=body,
                           declared_id=region.declared_id)


def build_remote_sequence(tasks_with_paths, coarsen: bool = False):
    """Merged region sequence for one remote core.

    `tasks_with_paths` lists (TaskCfg, UrPath) in the core's execution
    order; block ids are namespaced by task to keep them unique, and age
    overrides are carried along under the namespaced ids.  With
    `coarsen`, each task's regions collapse into a single region (its
    former regions nested inside), trading partial-order precision for
    fewer dynamic-program states.  Returns (path, overrides)."""
    regions = []
    overrides = {}
    for task, path in tasks_with_paths:
        prefix = f"{task.name}/"
        cloned = [_clone_region(r, prefix) for r in path.regions]
        if coarsen:
            regions.append(UnorderedRegion(index=0, count=1, body=cloned))
        else:
            regions.extend(cloned)
        for key, age in task.age_overrides.items():
            overrides[(prefix + key[0],) + key[1:]] = age
    merged = UrPath(regions=regions,
                    owner="+".join(t.name for t, _ in tasks_with_paths))
    return merged, overrides


def remote_path_choices(core_tasks):
    """Every combination of path choices for the tasks of one core."""
    def rec(i):
        if i == len(core_tasks):
            yield []
            return
        task = core_tasks[i]
        for path in task.paths:
            for rest in rec(i + 1):
                yield [(task, path)] + rest

    return list(rec(0))


def computed_intra_wcet(task: TaskCfg, cache: CacheConfig) -> int:
    """Worst-path sum of per-access latencies: each scope context of a
    block pays the hit latency of the first level it is classified to hit,
    or the miss latency when it hits nowhere."""
    worst = 0
    for path in task.paths:
        age_map, cac = compute_intra_state(path, cache, task.age_overrides)
        cost = 0
        for block in path.blocks():
            contexts = [(1, lambda lvl, b=block: age_map.program_age(b.id, lvl))]
            outer = path.total_count(block.id)
            for region in path.nesting_chain(block.id):
                outer //= region.count
                repeat = outer * (region.count - 1)
                if repeat > 0:
                    contexts.append((
                        repeat,
                        lambda lvl, b=block, r=region:
                            age_map.region_age(b.id, r.index, lvl),
                    ))
            for count, age_at in contexts:
                latency = cache.miss_latency
                for level in range(1, cache.num_levels + 1):
                    if not cac.reaches(block.id, level):
                        break
                    if age_at(level) < cache.level(level).assoc:
                        latency = cache.level(level).hit_latency
                        break
                cost += count * latency
        worst = max(worst, cost)
    return worst


def penalty_for(cache: CacheConfig, level: int, mode) -> int:
    """Cycles one interference miss adds on top of the intra-core bound."""
    if isinstance(mode, int):
        return mode
    if mode == "full":
        return cache.miss_latency
    if mode == "upgrade":
        return cache.miss_latency - cache.level(level).hit_latency
    raise ModelError(f"unknown penalty mode {mode!r}")


def _extra_for_core(path, level, set_index, cache, cac):
    queues = [build_access_queue(r, level, set_index, cache, cac)
              for r in path.regions]
    uniques = set()
    for r in path.regions:
        uniques |= region_unique_addresses(r, level, set_index, cache, cac)
    return ExtraInterference(queue=aggregate_queues(queues), uniques=uniques,
                             region_count=len(path.regions))


def proposed_task_bound(task: TaskCfg, remote_cores, cache: CacheConfig,
                        level: int, coarsen=False, check=False):
    """Miss bound of a task at one shared level under any number of
    remote cores.

    The dynamic program runs against the first core's merged sequence;
    every further core contributes its whole-path queue to each region
    bound, which keeps the state space one-dimensional at the price of
    ignoring the extra cores' internal order.  Worst case over local
    paths and over every combination of remote path choices."""
    if not remote_cores:
        return 0, {}
    choice_lists = [remote_path_choices(core) for core in remote_cores]
    sets = cache.level(level).sets
    best = 0
    detail: dict = {"sets": {}, "witness": []}
    for local_path in task.paths:
        age_map, cac_local = compute_intra_state(local_path, cache,
                                                 task.age_overrides)
        for combo in _product(choice_lists):
            cores = [build_remote_sequence(tp, coarsen=coarsen) for tp in combo]
            merged = [p for p, _ in cores]
            states = [compute_intra_state(p, cache, ov)[1] for p, ov in cores]
            total = 0
            per_set = {}
            witnesses = []
            for set_index in range(sets):
                extras = [
                    _extra_for_core(p, level, set_index, cache, c)
                    for p, c in zip(merged[1:], states[1:])
                ]
                result = analyze_refsets_pair(
                    local_path, merged[0], cache, level, set_index,
                    age_map, cac_local, states[0], extras=extras, check=check)
                total += result.misses
                if result.misses:
                    per_set[set_index] = result.misses
                    witnesses.append({"set": set_index, "steps": result.witness})
            if total > best:
                best = total
                detail = {"sets": per_set, "witness": witnesses,
                          "local_path": task.paths.index(local_path)}
    return best, detail


def _product(lists):
    if not lists:
        return
    def rec(i):
        if i == len(lists):
            yield []
            return
        for item in lists[i]:
            for rest in rec(i + 1):
                yield [item] + rest
    yield from rec(0)


def zhang_bound(task, remote_cores, cache, level) -> int:
    """Region-level baseline across cores: per-core interference summed,
    each core's tasks merged into one sequence."""
    total = 0
    for core in remote_cores:
        worst = 0
        for combo in remote_path_choices(core):
            merged, overrides = build_remote_sequence(combo)
            merged_task = TaskCfg(name=merged.owner or "remote",
                                  paths=[merged], age_overrides=overrides)
            worst = max(worst, baselines.zhang_task_bound(
                task, merged_task, cache, level))
        total += worst
    return total


def liang_bound(task, remote_cores, cache, level) -> int:
    remote_tasks = [t for core in remote_cores for t in core]
    return baselines.liang_task_bound(task, remote_tasks, cache, level)


def oracle_bound(task, remote_cores, cache, level,
                 limits=oracle.OracleLimits(), rng=None):
    """Exhaustive worst case, summed per set, maximized over paths and
    remote path choices.  Returns (misses, exact)."""
    sets = cache.level(level).sets
    assoc = cache.level(level).assoc
    choice_lists = [remote_path_choices(core) for core in remote_cores]
    best = 0
    exact = True
    for local_path in task.paths:
        _, cac_local = compute_intra_state(local_path, cache,
                                           task.age_overrides)
        for combo in _product(choice_lists):
            cores = [build_remote_sequence(tp) for tp in combo]
            merged = [p for p, _ in cores]
            states = [compute_intra_state(p, cache, ov)[1] for p, ov in cores]
            total = 0
            for set_index in range(sets):
                def keep(cac):
                    return lambda b: (cac.reaches(b.id, level)
                                      and cache.set_index(b.address, level) == set_index)
                misses, was_exact = oracle.max_interference_misses(
                    local_path, merged, assoc, keep(cac_local),
                    [keep(c) for c in states], limits=limits, rng=rng)
                total += misses
                exact = exact and was_exact
            best = max(best, total)
    return best, exact


def analyze(task: TaskCfg, remote_cores, cache: CacheConfig, *,
            methods=("proposed", "zhang", "liang"), penalty_mode="upgrade",
            coarsen=False, check=False, intra_wcet=None, run_oracle=False,
            oracle_limits=oracle.OracleLimits(), rng=None) -> AnalysisReport:
    """Analyze one task against the remote cores at every shared level."""
    shared = cache.shared_levels()
    if not shared:
        raise ModelError("cache has no shared level; nothing to analyze")
    if intra_wcet is None:
        intra_wcet = computed_intra_wcet(task, cache)
    penalties = {level: penalty_for(cache, level, penalty_mode)
                 for level in shared}

    report = AnalysisReport(task=task.name, intra_wcet=intra_wcet,
                            penalty=penalties, methods={})
    runners = {
        "proposed": lambda level: proposed_task_bound(
            task, remote_cores, cache, level, coarsen=coarsen, check=check),
        "zhang": lambda level: (zhang_bound(task, remote_cores, cache, level), {}),
        "liang": lambda level: (liang_bound(task, remote_cores, cache, level), {}),
    }
    for name in methods:
        per_level = {}
        detail: dict = {}
        for level in shared:
            misses, level_detail = runners[name](level)
            per_level[level] = misses
            if level_detail:
                detail[level] = level_detail
        cycles = sum(per_level[lvl] * penalties[lvl] for lvl in shared)
        report.methods[name] = MethodResult(
            misses=sum(per_level.values()),
            interference_cycles=cycles,
            wcet=intra_wcet + cycles,
            detail={"per_level": per_level, **detail},
        )

    if run_oracle:
        per_level = {}
        exact_all = True
        for level in shared:
            misses, exact = oracle_bound(task, remote_cores, cache, level,
                                         limits=oracle_limits, rng=rng)
            per_level[level] = misses
            exact_all = exact_all and exact
        verdicts = {}
        for name, res in report.methods.items():
            sound = all(
                res.detail["per_level"][lvl] >= per_level[lvl]
                for lvl in shared
            )
            verdicts[name] = "SOUND" if sound else (
                "VIOLATION" if exact_all else "BELOW-SAMPLED-LOWER-BOUND")
        report.oracle = {
            "per_level": per_level,
            "misses": sum(per_level.values()),
            "exact": exact_all,
            "verdicts": verdicts,
        }
    return report
