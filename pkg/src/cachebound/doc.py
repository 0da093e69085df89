"""Input document model and its JSON form.

One JSON document describes the cache hierarchy, the tasks (regions as
nested objects), the per-core task placement, and analysis options.
Block entries carry byte addresses; they are converted to line-granular
addresses at parse time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .intra import INF
from .model import (CacheConfig, CacheLevel, MemoryBlock, ModelError,
                    TaskCfg, UnorderedRegion, UrPath)


class InputError(ValueError):
    """Malformed input document."""


@dataclass
class InputDocument:
    cache: CacheConfig
    tasks: list[TaskCfg]
    analyzed: str
    cores: list[list[str]]
    intra_wcet: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)

    def task(self, name: str) -> TaskCfg:
        for t in self.tasks:
            if t.name == name:
                return t
        raise InputError(f"unknown task {name!r}")

    def remote_cores(self) -> list[list[TaskCfg]]:
        """Tasks per core, excluding the core running the analyzed task."""
        out = []
        for names in self.cores:
            if self.analyzed in names:
                continue
            out.append([self.task(n) for n in names])
        return out


def _require(cond, message):
    if not cond:
        raise InputError(message)


def _parse_region(obj, line_size, auto, declared_seen):
    _require(isinstance(obj, dict) and "count" in obj and "body" in obj,
             "region must be an object with 'count' and 'body'")
    declared = obj.get("id")
    if declared is not None:
        _require(declared not in declared_seen,
                 f"duplicate region id {declared}")
        declared_seen.add(declared)
    body = []
    for item in obj["body"]:
        _require(isinstance(item, dict), "region body items must be objects")
        if "block" in item:
            address = item["block"]
            _require(isinstance(address, int) and address >= 0,
                     "block address must be a non-negative integer")
            block_id = item.get("id")
            if block_id is None:
                auto[0] += 1
                block_id = f"b{auto[0]}"
            body.append(MemoryBlock(id=str(block_id),
                                    address=address // line_size))
        else:
            body.append(_parse_region(item, line_size, auto, declared_seen))
    return UnorderedRegion(index=0, count=obj["count"], body=body,
                           declared_id=declared)


def _parse_age(value):
    if value == "inf":
        return INF
    _require(isinstance(value, int) and value >= 0,
             f"age must be a non-negative integer or 'inf', got {value!r}")
    return value


def _parse_task(obj, cache):
    _require("name" in obj and "paths" in obj,
             "task must carry 'name' and 'paths'")
    name = obj["name"]
    _require(obj["paths"], f"task {name!r}: empty path set")
    paths = []
    for path_obj in obj["paths"]:
        auto = [0]
        declared_seen: set = set()
        regions = [_parse_region(r, cache.line_size, auto, declared_seen)
                   for r in path_obj]
        paths.append(UrPath(regions=regions, owner=name))
    overrides = {}
    for entry in obj.get("ages", []):
        _require({"block", "level", "scope", "age"} <= set(entry),
                 "age override needs block, level, scope and age")
        scope = entry["scope"]
        key = ((entry["block"], entry["level"]) if scope == "program"
               else (entry["block"], scope, entry["level"]))
        overrides[key] = _parse_age(entry["age"])
    return TaskCfg(name=name, paths=paths, age_overrides=overrides)


def parse_document(data: dict) -> InputDocument:
    _require(isinstance(data, dict), "input document must be a JSON object")
    _require("cache" in data, "missing cache section")
    _require("tasks" in data and data["tasks"], "missing tasks section")
    cobj = data["cache"]
    _require("levels" in cobj and cobj["levels"], "cache needs a levels list")
    try:
        cache = CacheConfig(
            levels=tuple(
                CacheLevel(sets=lvl["sets"], assoc=lvl["assoc"],
                           hit_latency=lvl["hit_latency"],
                           shared=lvl.get("shared", False))
                for lvl in cobj["levels"]
            ),
            line_size=cobj.get("line_size", 16),
            miss_latency=cobj.get("miss_latency", 100),
        )
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed cache section: {exc}") from None

    tasks = []
    analyzed = None
    intra = {}
    try:
        for tobj in data["tasks"]:
            task = _parse_task(tobj, cache)
            tasks.append(task)
            if tobj.get("under_analysis"):
                _require(analyzed is None,
                         "exactly one task may be under analysis")
                analyzed = task.name
            if "intra_wcet" in tobj:
                intra[task.name] = tobj["intra_wcet"]
    except ModelError as exc:
        raise InputError(str(exc)) from None
    _require(analyzed is not None, "exactly one task must be under analysis")

    names = {t.name for t in tasks}
    _require(len(names) == len(tasks), "task names must be unique")
    cores = data.get("cores")
    if cores is None:
        cores = [[t.name] for t in tasks]
    _require(isinstance(cores, list) and all(isinstance(c, list) for c in cores),
             "cores must be a list of task-name lists")
    for core in cores:
        for n in core:
            _require(n in names, f"core references unknown task {n!r}")
    _require(any(analyzed in core for core in cores),
             "the analyzed task must be placed on a core")
    return InputDocument(cache=cache, tasks=tasks, analyzed=analyzed,
                         cores=cores, intra_wcet=intra,
                         options=data.get("options", {}))


def _region_to_dict(region: UnorderedRegion, line_size: int) -> dict:
    body = []
    for item in region.body:
        if isinstance(item, UnorderedRegion):
            body.append(_region_to_dict(item, line_size))
        else:
            body.append({"block": item.address * line_size, "id": item.id})
    out = {"count": region.count, "body": body}
    if region.declared_id is not None:
        out["id"] = region.declared_id
    return out


def document_to_dict(doc: InputDocument) -> dict:
    tasks = []
    for task in doc.tasks:
        tobj: dict = {
            "name": task.name,
            "paths": [
                [_region_to_dict(r, doc.cache.line_size) for r in p.regions]
                for p in task.paths
            ],
        }
        if task.name == doc.analyzed:
            tobj["under_analysis"] = True
        if task.name in doc.intra_wcet:
            tobj["intra_wcet"] = doc.intra_wcet[task.name]
        ages = []
        for key, age in task.age_overrides.items():
            if len(key) == 2:
                block, level = key
                scope = "program"
            else:
                block, scope, level = key
            ages.append({"block": block, "level": level, "scope": scope,
                         "age": "inf" if age == INF else age})
        if ages:
            tobj["ages"] = ages
        tasks.append(tobj)
    return {
        "cache": {
            "line_size": doc.cache.line_size,
            "miss_latency": doc.cache.miss_latency,
            "levels": [
                {"sets": lvl.sets, "assoc": lvl.assoc,
                 "hit_latency": lvl.hit_latency, "shared": lvl.shared}
                for lvl in doc.cache.levels
            ],
        },
        "tasks": tasks,
        "cores": doc.cores,
        "options": doc.options,
    }


def load_document(path) -> InputDocument:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: not valid JSON ({exc})") from None
    return parse_document(data)


def dump_document(doc: InputDocument, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(document_to_dict(doc), fh, indent=2, sort_keys=True)
        fh.write("\n")
