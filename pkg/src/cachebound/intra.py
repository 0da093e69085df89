"""Intra-core facts consumed by the contention analysis.

Ages are conflict-set upper bounds on LRU reuse distance, computed per
cache level over the accesses that actually reach that level and map to
the same cache set.  A block's accesses split into scopes: the first
access in a path (program scope) and the repeated accesses inside each
enclosing region (region scope).  An age of INF means the access cannot
hit: either the address was never touched before in scope, or the
conflict set already exceeds the associativity.

Cache access classification (CAC) then decides, level by level, which
blocks proceed to the next level: a block whose every scope hits level L
is invisible to level L+1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import CacheConfig, UrPath

INF = float("inf")


@dataclass
class AgeMap:
    """Computed (or overridden) ages, keyed per cache level.

    `program` and `region` are conflict-set bounds (no ordering can exceed
    them); `program_min` is the shortest reuse distance any ordering can
    produce, which decides whether an access can hit at all.  Region-scope
    accesses always admit a zero-distance ordering, so no map is kept for
    them.  Overridden ages are taken as exact and land in both maps.
    """

    program: dict = field(default_factory=dict)      # (block_id, level) -> age
    region: dict = field(default_factory=dict)       # (block_id, region_index, level) -> age
    program_min: dict = field(default_factory=dict)  # (block_id, level) -> age
    region_min: dict = field(default_factory=dict)   # (block_id, region_index, level) -> age

    def program_age(self, block_id, level):
        return self.program[(block_id, level)]

    def region_age(self, block_id, region_index, level):
        return self.region[(block_id, region_index, level)]


@dataclass
class CacClass:
    """Per-level hit classification: ALWAYS_HIT blocks stop at that level."""

    always_hit: set = field(default_factory=set)  # {(block_id, level)}

    def is_always_hit(self, block_id, level) -> bool:
        return (block_id, level) in self.always_hit

    def reaches(self, block_id, level) -> bool:
        """Whether accesses of the block propagate down to this level."""
        return not any(
            (block_id, lower) in self.always_hit for lower in range(1, level)
        )


def _level_addresses(path, region, level, cache, cac, target_addr):
    """Unique addresses in `region` that reach `level`, map to the same
    set as `target_addr`, and differ from it."""
    target_set = cache.set_index(target_addr, level)
    out = set()
    for b in region.blocks():
        if b.address == target_addr:
            continue
        if cache.set_index(b.address, level) != target_set:
            continue
        if cac.reaches(b.id, level):
            out.add(b.address)
    return out


def _clamp(card, assoc):
    return card if card < assoc else INF

def region_scope_age(path: UrPath, block_id: str, region, level: int,
                     cache: CacheConfig, cac: CacClass):
    """Conflict-set bound on the reuse distance between consecutive
    accesses of the block inside one region execution."""
    block = path.block(block_id)
    if block_id not in {b.id for b in region.blocks()}:
        raise ValueError(f"block {block_id!r} not contained in region {region.index}")
    conflicts = _level_addresses(path, region, level, cache, cac, block.address)
    return _clamp(len(conflicts), cache.level(level).assoc)


def _previous_access_region(path, block, level, cac):
    home = path.home_index(block.id)
    prev = None
    for region in path.regions:
        if region.index >= home:
            break
        for b in region.blocks():
            if b.address == block.address and cac.reaches(b.id, level):
                prev = region.index
    return prev


def program_scope_age(path: UrPath, block_id: str, level: int,
                      cache: CacheConfig, cac: CacClass):
    """Bound on the reuse distance of the block's first access in the path.

    INF when no earlier out-most region accesses the same address at this
    level.  Otherwise the union of conflicting addresses over every region
    from the previous access's region through the block's own region,
    which covers any placement of the two accesses inside their regions.
    """
    block = path.block(block_id)
    prev = _previous_access_region(path, block, level, cac)
    if prev is None:
        return INF
    between = set()
    for region in path.regions[prev - 1:path.home_index(block_id)]:
        between |= _level_addresses(path, region, level, cache, cac, block.address)
    return _clamp(len(between), cache.level(level).assoc)


def program_scope_min_age(path: UrPath, block_id: str, level: int,
                          cache: CacheConfig, cac: CacClass):
    """Shortest reuse distance of the first access over all orderings: the
    regions strictly between the previous access and the block's region
    always intervene in full, while the two end regions can contribute
    nothing (previous access last, this access first)."""
    block = path.block(block_id)
    prev = _previous_access_region(path, block, level, cac)
    if prev is None:
        return INF
    between = set()
    for region in path.regions[prev:path.home_index(block_id) - 1]:
        between |= _level_addresses(path, region, level, cache, cac, block.address)
    return len(between)


def _scope_ages(path, block_id, level, cache, cac, age_map):
    """All scope ages of a block at a level: program scope plus every
    enclosing region the block re-executes in (count > 1)."""
    ages = [age_map.program_age(block_id, level)]
    for region in path.nesting_chain(block_id):
        if region.count > 1:
            ages.append(age_map.region_age(block_id, region.index, level))
    return ages


def compute_intra_state(path: UrPath, cache: CacheConfig,
                        overrides=None) -> tuple[AgeMap, CacClass]:
    """Ages and CAC for every level, computed bottom-up.

    `overrides` maps (block_id, level) -> age for program scope and
    (block_id, region_declared_id, level) -> age for region scopes;
    overridden values feed the classification of the level they apply to.
    """
    overrides = overrides or {}
    age_map = AgeMap()
    cac = CacClass()
    block_ids = sorted(b.id for b in path.blocks())
    for level in range(1, cache.num_levels + 1):
        assoc = cache.level(level).assoc
        for bid in block_ids:
            if not cac.reaches(bid, level):
                continue
            age = overrides.get((bid, level))
            if age is None:
                age_map.program[(bid, level)] = program_scope_age(
                    path, bid, level, cache, cac)
                age_map.program_min[(bid, level)] = program_scope_min_age(
                    path, bid, level, cache, cac)
            else:
                age_map.program[(bid, level)] = age
                age_map.program_min[(bid, level)] = age
            for region in path.nesting_chain(bid):
                age = overrides.get((bid, region.declared_id, level))
                if age is None:
                    age_map.region[(bid, region.index, level)] = \
                        region_scope_age(path, bid, region, level, cache, cac)
                    age_map.region_min[(bid, region.index, level)] = 0
                else:
                    age_map.region[(bid, region.index, level)] = age
                    age_map.region_min[(bid, region.index, level)] = age
        for bid in block_ids:
            if not cac.reaches(bid, level):
                continue
            if all(a < assoc for a in _scope_ages(path, bid, level, cache, cac, age_map)):
                cac.always_hit.add((bid, level))
    return age_map, cac


def classify_cac(path: UrPath, age_map: AgeMap, cache: CacheConfig) -> CacClass:
    """Classification from an existing age map (ages already per level)."""
    cac = CacClass()
    block_ids = sorted(b.id for b in path.blocks())
    for level in range(1, cache.num_levels + 1):
        assoc = cache.level(level).assoc
        for bid in block_ids:
            if not cac.reaches(bid, level):
                continue
            if (bid, level) not in age_map.program:
                continue
            if all(a < assoc for a in _scope_ages(path, bid, level, cache, cac, age_map)):
                cac.always_hit.add((bid, level))
    return cac
