"""Static analysis of inter-core shared-cache contention for WCET bounds."""

from .contention import (ExtraInterference, aggregate_queues,
                         build_access_queue, drain_misses, region_miss_bound)
from .dp import analyze_pair, analyze_task_pair
from .intra import INF, compute_intra_state
from .model import (CacheConfig, CacheLevel, MemoryBlock, ModelError, TaskCfg,
                    UnorderedRegion, UrPath, default_cache, enumerate_paths,
                    unique_addresses)
from .refs import MemoryReference, build_references
from .regions import ContentionRegion, build_contention_regions
from .system import AnalysisReport, analyze

__all__ = [
    "AnalysisReport",
    "CacheConfig",
    "CacheLevel",
    "ContentionRegion",
    "ExtraInterference",
    "INF",
    "MemoryBlock",
    "MemoryReference",
    "ModelError",
    "TaskCfg",
    "UnorderedRegion",
    "UrPath",
    "aggregate_queues",
    "analyze",
    "analyze_pair",
    "analyze_task_pair",
    "build_access_queue",
    "build_contention_regions",
    "build_references",
    "compute_intra_state",
    "default_cache",
    "drain_misses",
    "enumerate_paths",
    "region_miss_bound",
    "unique_addresses",
]

__version__ = "0.1.0"
