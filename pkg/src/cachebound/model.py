"""Program and cache data model.

A task is a set of execution paths, each path an ordered sequence of
out-most unordered regions (URs).  A UR executes its body a fixed number
of times; the order of accesses inside one execution is unknown.  Regions
nest, forming a tree per out-most region.  Memory blocks are addressed
access points; distinct blocks may share an address (same cache line
touched from different program points).
"""

from __future__ import annotations

from dataclasses import dataclass, field


class ModelError(ValueError):
    """Structurally invalid task or cache description."""


@dataclass(frozen=True)
class MemoryBlock:
    """One addressed access point.  `address` is line-granular."""

    id: str
    address: int

    def __post_init__(self):
        if self.address < 0:
            raise ModelError(f"block {self.id}: negative address")


@dataclass
class UnorderedRegion:
    """A counted program region whose internal access order is unknown.

    `index` is the analysis index (out-most regions are numbered by path
    position, nested ones after them).  `declared_id` preserves the index
    used in the input file, for age overrides and reporting.
    """

    index: int
    count: int
    body: list  # items: MemoryBlock | UnorderedRegion
    declared_id: int | None = None

    def __post_init__(self):
        if self.count < 1:
            raise ModelError(f"region {self.index}: count must be >= 1")

    def blocks(self):
        """All blocks directly or transitively contained, in body order."""
        for item in self.body:
            if isinstance(item, MemoryBlock):
                yield item
            else:
                yield from item.blocks()

    def subregions(self):
        """All nested regions (not including self), pre-order."""
        for item in self.body:
            if isinstance(item, UnorderedRegion):
                yield item
                yield from item.subregions()


def unique_addresses(region: UnorderedRegion) -> set[int]:
    """The set of distinct block addresses accessed anywhere in the region."""
    return {b.address for b in region.blocks()}


@dataclass
class UrPath:
    """One execution path: the ordered out-most regions of a CFG path.

    Construction renumbers out-most regions 1..n in execution order and
    nested regions n+1.. in traversal order, then indexes every block's
    nesting chain.
    """

    regions: list[UnorderedRegion]
    owner: str = ""
    _chains: dict = field(init=False, repr=False)
    _homes: dict = field(init=False, repr=False)
    _blocks: dict = field(init=False, repr=False)
    _by_index: dict = field(init=False, repr=False)

    def __post_init__(self):
        if not self.regions:
            raise ModelError(f"task {self.owner!r}: empty path set")
        for pos, region in enumerate(self.regions, start=1):
            if region.declared_id is None:
                region.declared_id = region.index
            region.index = pos
        next_index = len(self.regions) + 1
        for region in self.regions:
            for sub in region.subregions():
                if sub.declared_id is None:
                    sub.declared_id = sub.index
                sub.index = next_index
                next_index += 1
        self._chains = {}
        self._homes = {}
        self._blocks = {}
        self._by_index = {}
        for region in self.regions:
            self._by_index[region.index] = region
            for sub in region.subregions():
                self._by_index[sub.index] = sub
            self._index_blocks(region, region.index, (region,))
        for region in self.regions:
            seen = {}
            for b in region.blocks():
                if b.address in seen:
                    raise ModelError(
                        f"address {b.address} accessed by both {seen[b.address]!r} "
                        f"and {b.id!r} inside out-most region {region.declared_id}; "
                        "same-address blocks must live in different out-most regions"
                    )
                seen[b.address] = b.id

    def _index_blocks(self, region, home, stack):
        for item in region.body:
            if isinstance(item, MemoryBlock):
                if item.id in self._blocks:
                    raise ModelError(f"duplicate block id {item.id!r} in one path")
                self._blocks[item.id] = item
                self._homes[item.id] = home
                # innermost first, out-most region last
                self._chains[item.id] = tuple(reversed(stack))
            else:
                self._index_blocks(item, home, stack + (item,))

    def block(self, block_id: str) -> MemoryBlock:
        try:
            return self._blocks[block_id]
        except KeyError:
            raise ModelError(f"unknown block id {block_id!r}") from None

    def blocks(self):
        return self._blocks.values()

    def nesting_chain(self, block_id: str) -> tuple[UnorderedRegion, ...]:
        """Enclosing regions of a block, innermost to out-most."""
        self.block(block_id)
        return self._chains[block_id]

    def home_index(self, block_id: str) -> int:
        """Index of the out-most region containing the block."""
        self.block(block_id)
        return self._homes[block_id]

    def region(self, index: int) -> UnorderedRegion:
        return self._by_index[index]

    def total_count(self, block_id: str) -> int:
        """Number of times the block is accessed in one path execution."""
        total = 1
        for region in self.nesting_chain(block_id):
            total *= region.count
        return total


@dataclass
class TaskCfg:
    """A task: a name and its enumerated execution paths.

    `age_overrides` replaces computed ages: keys are (block_id, level)
    for program scope and (block_id, region_declared_id, level) for
    region scope."""

    name: str
    paths: list[UrPath]
    age_overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.paths:
            raise ModelError(f"task {self.name!r}: empty path set")
        for p in self.paths:
            p.owner = self.name


def enumerate_paths(task: TaskCfg) -> list[UrPath]:
    """The task's declared paths, region indices renumbered per path."""
    return list(task.paths)


@dataclass(frozen=True)
class CacheLevel:
    sets: int
    assoc: int
    hit_latency: int
    shared: bool

    def __post_init__(self):
        if self.sets < 1:
            raise ModelError("cache level: sets must be >= 1")
        if self.assoc < 1:
            raise ModelError("cache level: associativity must be >= 1")


@dataclass(frozen=True)
class CacheConfig:
    """A cache hierarchy.  Level 1 is closest to the core; shared levels
    must form a suffix of the hierarchy."""

    levels: tuple[CacheLevel, ...]
    line_size: int = 16
    miss_latency: int = 100

    def __post_init__(self):
        if not self.levels:
            raise ModelError("cache: at least one level required")
        if self.line_size < 1:
            raise ModelError("cache: line_size must be >= 1")
        seen_shared = False
        for lvl in self.levels:
            if seen_shared and not lvl.shared:
                raise ModelError("cache: a private level may not follow a shared one")
            seen_shared = seen_shared or lvl.shared

    def level(self, level: int) -> CacheLevel:
        return self.levels[level - 1]

    @property
    def num_levels(self) -> int:
        return len(self.levels)

    def shared_levels(self) -> list[int]:
        return [i for i, lvl in enumerate(self.levels, start=1) if lvl.shared]

    def set_index(self, address: int, level: int) -> int:
        return address % self.level(level).sets


def default_cache(assoc: int = 2) -> CacheConfig:
    """Two-level hierarchy: private 8x2 L1 and a shared 32-set L2,
    16-byte lines, 1/5/100 cycle latencies."""
    return CacheConfig(
        levels=(
            CacheLevel(sets=8, assoc=2, hit_latency=1, shared=False),
            CacheLevel(sets=32, assoc=assoc, hit_latency=5, shared=True),
        ),
        line_size=16,
        miss_latency=100,
    )
