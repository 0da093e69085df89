"""Memory reference construction.

A block's accesses are split by scope into references (address, access
count, age): one reference for the first access in the path, and one per
enclosing region for the repeated accesses inside it.  The region-scope
count is the product of the strictly-enclosing region counts times
(count - 1) of the scope region itself, so the counts of one block always
sum to its total unrolled access count.
"""

from __future__ import annotations

from dataclasses import dataclass

from .intra import AgeMap, CacClass
from .model import UrPath


@dataclass(eq=False)
class MemoryReference:
    """A group of same-age accesses to one address.

    `scope` is None for the first-access (program scope) reference, else
    the index of the region whose iterations produce the accesses.  `age`
    is the conservative reuse-distance bound; `min_age` is the shortest
    distance any ordering can produce and decides whether the reference
    can hit at all (it defaults to `age` when not given).
    `window_start`/`window_end` delimit the out-most regions at which a
    remote access can still age this reference; they are filled by the
    contention-region construction.
    """

    block_id: str
    address: int
    count: int
    age: float
    home_region: int
    scope: int | None
    min_age: float | None = None
    window_start: int | None = None
    window_end: int | None = None

    def __post_init__(self):
        if self.min_age is None:
            self.min_age = self.age

    @property
    def key(self) -> str:
        tag = "program" if self.scope is None else f"r{self.scope}"
        return f"{self.block_id}:{tag}"

    def evict_need(self, assoc: int) -> int:
        """Unique remote addresses required to push this reference out.

        At least one even when the conservative age already exceeds the
        associativity: such a reference still hits under favourable
        orderings and one extra address suffices in the least favourable
        hitting one."""
        if self.age >= assoc:
            return 1
        return int(assoc - self.age)


def build_references(path: UrPath, age_map: AgeMap, cac: CacClass,
                     level: int) -> dict[int, list[MemoryReference]]:
    """References per out-most region, for blocks that reach `level`.

    References with age >= associativity are still emitted (they are
    intra-core misses and belong in the per-access latency accounting);
    the contention-region construction filters them out downstream.
    """
    refsets: dict[int, list[MemoryReference]] = {}
    for region in path.regions:
        refs: list[MemoryReference] = []
        for block in sorted(region.blocks(), key=lambda b: b.id):
            if not cac.reaches(block.id, level):
                continue
            refs.append(MemoryReference(
                block_id=block.id,
                address=block.address,
                count=1,
                age=age_map.program_age(block.id, level),
                home_region=region.index,
                scope=None,
                min_age=age_map.program_min[(block.id, level)],
            ))
            outer_product = path.total_count(block.id)
            for scope_region in path.nesting_chain(block.id):
                # strict ancestors only: peel the scope region's own count
                outer_product //= scope_region.count
                repeat = outer_product * (scope_region.count - 1)
                if repeat > 0:
                    refs.append(MemoryReference(
                        block_id=block.id,
                        address=block.address,
                        count=repeat,
                        age=age_map.region_age(block.id, scope_region.index, level),
                        home_region=region.index,
                        scope=scope_region.index,
                        min_age=age_map.region_min[
                            (block.id, scope_region.index, level)],
                    ))
        refsets[region.index] = refs
    return refsets


def total_reference_count(refsets, block_id: str) -> int:
    """Summed access count of one block across its references."""
    return sum(
        r.count
        for refs in refsets.values()
        for r in refs
        if r.block_id == block_id
    )
